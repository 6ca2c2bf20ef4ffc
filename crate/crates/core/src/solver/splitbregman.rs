//! Split Bregman iteration for the self-repelling snake.
//!
//! Each outer iteration runs a few semi-implicit sweeps for `φ` (explicit
//! forces, implicit `μ` coupling solved by FFT), then updates the auxiliary
//! unit field `w ≈ ∇φ` by shrinkage and projection, then the Bregman
//! variable `b`. The level set is never re-initialized; the projection keeps
//! `|w| = 1` and the penalty pulls `∇φ` towards it.
//!
//! [`SplitBregman`] owns all scratch storage. Together with the state and
//! the edge map it holds 12 scalars per pixel, plus `O(M + N)`:
//!
//! | buffer                      | scalars |
//! |-----------------------------|---------|
//! | `φ`, `w`, `b` (state)       | 5       |
//! | edge map `g` (caller)       | 1       |
//! | previous `φ`                | 1       |
//! | band values `h(φ)`          | 1       |
//! | non-local vector `v`        | 2       |
//! | right-hand side             | 1       |
//! | half spectrum of the solve  | 1       |
//!
//! Gradients and divergences are evaluated on the fly.

use alloc::vec;
use alloc::vec::Vec;

use crate::energy::{
    balloon_energy, bregman_penalty, combine, geodesic_length_energy, EnergyBreakdown,
    EnergyWeights,
};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::grid::{forward_diff_at, gradient_forward, GridDims, ScalarField, VectorField2};
use crate::par;
use crate::regularize::RegularizerParams;
use crate::repulsion::{
    band_into, nonlocal_vector, window_sum_into, RepulsionParams, WindowKernel,
};
use crate::solver::poisson::ScreenedPoisson;
use crate::solver::{check_stability, relative_change, Termination};

/// Field scalars per pixel used by a run: state, edge map and workspace.
pub const FIELD_SCALARS_PER_PIXEL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverParams {
    pub weights: EnergyWeights,
    pub reg: RegularizerParams,
    pub rep: RepulsionParams,
    /// Time step `τ`.
    pub tau: f64,
    /// Maximum `φ` sweeps per outer iteration.
    pub inner_iters: usize,
    /// Outer iteration cap.
    pub outer_iters: usize,
    /// Passes of the fixed-point `w` update.
    pub w_iters: usize,
    pub tol_inner: f64,
    pub tol_outer: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            weights: EnergyWeights {
                gamma: 4.0,
                alpha: 4.0,
                beta: 0.2,
                mu: 8.0,
            },
            reg: RegularizerParams::default(),
            rep: RepulsionParams::default(),
            tau: 0.1,
            inner_iters: 3,
            outer_iters: 3000,
            w_iters: 1,
            tol_inner: 1e-5,
            tol_outer: 1e-5,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        RegularizerParams::new(self.reg.epsilon(), self.reg.band_offset())?;
        RepulsionParams::new(self.rep.scale(), self.rep.window_half())?;
        ensure_positive("tau", self.tau)?;
        ensure_positive("tol_inner", self.tol_inner)?;
        ensure_positive("tol_outer", self.tol_outer)?;
        if self.w_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "w_iters",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// How the `w` sub-problem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WMode {
    /// Soft shrinkage of `∇φ + b + (2β/μ) h v`, then projection.
    #[default]
    Threshold,
    /// `w_iters` passes of the linearized optimality condition, then
    /// projection.
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub phi: ScalarField,
    pub w: VectorField2,
    pub b: VectorField2,
    /// Completed outer iterations.
    pub k: usize,
    /// Energy of the initial state followed by one entry per iteration.
    pub energy_log: Vec<EnergyBreakdown>,
    /// Relative `φ` change of each iteration.
    pub phi_change_log: Vec<f64>,
}

impl SolverState {
    /// `w⁰ = ∇φ⁰`, `b⁰ = 0`.
    pub fn new(init: ScalarField) -> Result<Self> {
        init.ensure_finite("initial level set")?;
        let w = gradient_forward(&init)?;
        let b = VectorField2::zeros(init.dims());
        Ok(Self {
            phi: init,
            w,
            b,
            k: 0,
            energy_log: Vec::new(),
            phi_change_log: Vec::new(),
        })
    }

    pub fn dims(&self) -> GridDims {
        self.phi.dims()
    }

    fn check_dims(&self, g: &ScalarField) -> Result<()> {
        let d = self.dims();
        d.ensure_same(g.dims())?;
        d.ensure_same(self.w.dims())?;
        d.ensure_same(self.b.dims())
    }
}

/// Outcome of one `w` update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProjectionStats {
    /// Pixels where the pre-projection vector was nonzero.
    pub projected: usize,
    /// Pixels that kept their previous `w`.
    pub kept: usize,
    /// Largest `||w| − 1|` over projected pixels.
    pub max_unit_error: f64,
}

impl ProjectionStats {
    fn record(&mut self, w: (f64, f64)) {
        self.projected += 1;
        let e = (libm::sqrt(w.0 * w.0 + w.1 * w.1) - 1.0).abs();
        if e > self.max_unit_error {
            self.max_unit_error = e;
        }
    }

    fn merge(&mut self, other: ProjectionStats) {
        self.projected += other.projected;
        self.kept += other.kept;
        self.max_unit_error = self.max_unit_error.max(other.max_unit_error);
    }
}

/// Passed to the observer after every outer iteration.
#[derive(Debug)]
pub struct IterationReport<'a> {
    pub state: &'a SolverState,
    /// `φ` sweeps actually run.
    pub sweeps: usize,
    /// Statistics of every `w` pass of this iteration, merged.
    pub projection: ProjectionStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub state: SolverState,
    pub termination: Termination,
}

/// Normalizes `wt` into `w` unless it vanished.
#[inline]
fn project(wt: (f64, f64), w1: &mut f64, w2: &mut f64, stats: &mut ProjectionStats) {
    let n = libm::sqrt(wt.0 * wt.0 + wt.1 * wt.1);
    if n > 0.0 {
        *w1 = wt.0 / n;
        *w2 = wt.1 / n;
        stats.record((*w1, *w2));
    } else {
        stats.kept += 1;
    }
}

/// Right-hand side of the `φ` sweep along row `i`.
#[allow(clippy::too_many_arguments)]
fn rhs_row(
    p: &SolverParams,
    cols: usize,
    i: usize,
    last_row: bool,
    phi: &[f64],
    g: &[f64],
    w: (&[f64], &[f64]),
    b: (&[f64], &[f64]),
    v: (&[f64], &[f64]),
    out: &mut [f64],
) {
    let wt = &p.weights;
    let reach = p.reg.band_reach();
    let base = i * cols;
    // divergence of b − w; the left neighbour's column term is carried along
    let mut prev2 = 0.0;
    for (j, o) in out.iter_mut().enumerate() {
        let k = base + j;
        let here1 = if last_row { 0.0 } else { b.0[k] - w.0[k] };
        let prev1 = if i == 0 {
            0.0
        } else {
            b.0[k - cols] - w.0[k - cols]
        };
        let cur2 = b.1[k] - w.1[k];
        let here2 = if j + 1 == cols { 0.0 } else { cur2 };
        let div = (here1 - prev1) + (here2 - prev2);
        prev2 = cur2;
        let x = phi[k];
        let mut force = wt.mu * div;
        if x.abs() < reach {
            let (w1, w2) = (w.0[k], w.1[k]);
            let (d, dp) = p.reg.dirac_and_prime(x);
            let geodesic = -wt.gamma * g[k] * libm::sqrt(w1 * w1 + w2 * w2) * dp;
            let balloon = wt.alpha * g[k] * d;
            let repulsion =
                2.0 * wt.beta * p.reg.narrow_band_prime(x) * (w1 * v.0[k] + w2 * v.1[k]);
            force += geodesic + balloon + repulsion;
        }
        *o = x + p.tau * force;
    }
}

/// Reusable workspace for one grid size and parameter set.
#[derive(Debug, Clone)]
pub struct SplitBregman {
    params: SolverParams,
    dims: GridDims,
    kernel: WindowKernel,
    poisson: ScreenedPoisson,
    rhs: Vec<f64>,
    prev: Vec<f64>,
    h: Vec<f64>,
    v1: Vec<f64>,
    v2: Vec<f64>,
    /// `h` and `v` match the state about to be stepped.
    nonlocal_fresh: bool,
}

impl SplitBregman {
    pub fn new(dims: GridDims, params: SolverParams) -> Result<Self> {
        params.validate()?;
        let n = dims.len();
        Ok(Self {
            params,
            dims,
            kernel: params.rep.kernel(),
            poisson: ScreenedPoisson::new(dims, params.tau * params.weights.mu)?,
            rhs: vec![0.0; n],
            prev: vec![0.0; n],
            h: vec![0.0; n],
            v1: vec![0.0; n],
            v2: vec![0.0; n],
            nonlocal_fresh: false,
        })
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    /// Field-sized scalars owned by the workspace: five real fields plus the
    /// half spectrum, about 6 per pixel.
    pub fn workspace_field_scalars(&self) -> usize {
        self.poisson.spectrum_scalars()
            + self.rhs.len()
            + self.prev.len()
            + self.h.len()
            + self.v1.len()
            + self.v2.len()
    }

    /// Scalars owned besides the field buffers, `O(M + N)`.
    pub fn aux_scalars(&self) -> usize {
        self.poisson.aux_scalars()
    }

    /// `h ← h(φ)`, `v ← Σ K w h`.
    fn refresh_nonlocal(&mut self, phi: &[f64], w: &VectorField2) {
        band_into(phi, &self.params.reg, &mut self.h);
        window_sum_into(
            &self.kernel,
            self.dims.cols(),
            w.channel1(),
            w.channel2(),
            &self.h,
            &mut self.v1,
            &mut self.v2,
        );
    }

    /// Runs up to `inner_iters` sweeps on `state.phi`; returns the number
    /// of sweeps done.
    fn phi_sweeps(&mut self, state: &mut SolverState, g: &ScalarField) -> Result<usize> {
        let dims = self.dims;
        let cols = dims.cols();
        let limit = 10.0 * dims.diameter();
        let iteration = state.k + 1;
        for s in 0..self.params.inner_iters {
            if !core::mem::take(&mut self.nonlocal_fresh) {
                self.refresh_nonlocal(state.phi.as_slice(), &state.w);
            }
            {
                let p = &self.params;
                let phi = state.phi.as_slice();
                let gs = g.as_slice();
                let w = (state.w.channel1(), state.w.channel2());
                let b = (state.b.channel1(), state.b.channel2());
                let v = (self.v1.as_slice(), self.v2.as_slice());
                let rows = dims.rows();
                par::for_each_row(&mut self.rhs, cols, |i, row| {
                    rhs_row(p, cols, i, i + 1 == rows, phi, gs, w, b, v, row);
                });
            }
            self.poisson.solve_in_place(&mut self.rhs);
            let phi = state.phi.as_mut_slice();
            let mut diff = 0.0;
            let mut norm = 0.0;
            for (x, &z) in phi.iter_mut().zip(&self.rhs) {
                diff += (z - *x) * (z - *x);
                norm += *x * *x;
                *x = z;
            }
            check_stability(phi, limit, iteration, s + 1)?;
            if libm::sqrt(diff) / (libm::sqrt(norm) + 1e-6) <= self.params.tol_inner {
                return Ok(s + 1);
            }
        }
        Ok(self.params.inner_iters)
    }

    fn update_w(
        &mut self,
        state: &mut SolverState,
        g: &ScalarField,
        mode: WMode,
    ) -> ProjectionStats {
        match mode {
            WMode::Threshold => {
                self.refresh_nonlocal(state.phi.as_slice(), &state.w);
                self.threshold_pass(state, g)
            }
            WMode::FixedPoint => {
                let mut stats = ProjectionStats::default();
                for _ in 0..self.params.w_iters {
                    self.refresh_nonlocal(state.phi.as_slice(), &state.w);
                    stats.merge(self.fixed_point_pass(state, g));
                }
                stats
            }
        }
    }

    /// Expects `h` and `v` fresh for `(w^k, φ^{k+1})`.
    fn threshold_pass(&self, state: &mut SolverState, g: &ScalarField) -> ProjectionStats {
        let dims = self.dims;
        let wt = &self.params.weights;
        let reg = &self.params.reg;
        let pull = 2.0 * wt.beta / wt.mu;
        let shrink = wt.gamma / wt.mu;
        let phi = state.phi.as_slice();
        let (b1, b2) = (state.b.channel1(), state.b.channel2());
        let (w1, w2) = state.w.channels_mut();
        let mut stats = ProjectionStats::default();
        for i in 0..dims.rows() {
            for j in 0..dims.cols() {
                let k = dims.index(i, j);
                let (d1, d2) = forward_diff_at(phi, dims, i, j);
                let bb1 = d1 + b1[k] + pull * self.h[k] * self.v1[k];
                let bb2 = d2 + b2[k] + pull * self.h[k] * self.v2[k];
                let thr = shrink * g.as_slice()[k] * reg.dirac(phi[k]);
                let mag = libm::sqrt(bb1 * bb1 + bb2 * bb2);
                let wt = if mag > thr && mag > 0.0 {
                    let s = (mag - thr) / mag;
                    (s * bb1, s * bb2)
                } else {
                    (0.0, 0.0)
                };
                project(wt, &mut w1[k], &mut w2[k], &mut stats);
            }
        }
        stats
    }

    /// Expects `h` and `v` fresh for `(w^r, φ^{k+1})`.
    fn fixed_point_pass(&self, state: &mut SolverState, g: &ScalarField) -> ProjectionStats {
        let dims = self.dims;
        let wt = &self.params.weights;
        let reg = &self.params.reg;
        let phi = state.phi.as_slice();
        let (b1, b2) = (state.b.channel1(), state.b.channel2());
        let (w1, w2) = state.w.channels_mut();
        let mut stats = ProjectionStats::default();
        for i in 0..dims.rows() {
            for j in 0..dims.cols() {
                let k = dims.index(i, j);
                let (d1, d2) = forward_diff_at(phi, dims, i, j);
                let denom = wt.gamma * g.as_slice()[k] * reg.dirac(phi[k]) + wt.mu;
                let rep = 2.0 * wt.beta * self.h[k];
                let t1 = (wt.mu * d1 + wt.mu * b1[k] + rep * self.v1[k]) / denom;
                let t2 = (wt.mu * d2 + wt.mu * b2[k] + rep * self.v2[k]) / denom;
                project((t1, t2), &mut w1[k], &mut w2[k], &mut stats);
            }
        }
        stats
    }

    fn update_b(state: &mut SolverState) {
        let dims = state.dims();
        let phi = state.phi.as_slice();
        let (w1, w2) = (state.w.channel1(), state.w.channel2());
        let (b1, b2) = state.b.channels_mut();
        for i in 0..dims.rows() {
            for j in 0..dims.cols() {
                let k = dims.index(i, j);
                let (d1, d2) = forward_diff_at(phi, dims, i, j);
                b1[k] += d1 - w1[k];
                b2[k] += d2 - w2[k];
            }
        }
    }

    /// Energy of the state. Leaves `h` and `v` fresh for `(w, φ)`, which is
    /// what the first sweep of the next iteration needs.
    fn energy(&mut self, state: &SolverState, g: &ScalarField) -> Result<EnergyBreakdown> {
        let reg = &self.params.reg;
        let geodesic = geodesic_length_energy(&state.phi, g, reg)?;
        let balloon = balloon_energy(&state.phi, g, reg)?;
        let penalty = bregman_penalty(&state.phi, &state.w, &state.b, self.params.weights.mu)?;
        self.refresh_nonlocal(state.phi.as_slice(), &state.w);
        self.nonlocal_fresh = true;
        let (w1, w2) = (state.w.channel1(), state.w.channel2());
        let mut repulsion = 0.0;
        for k in 0..self.dims.len() {
            if self.h[k] != 0.0 {
                repulsion -= self.h[k] * (w1[k] * self.v1[k] + w2[k] * self.v2[k]);
            }
        }
        Ok(combine(
            &self.params.weights,
            geodesic,
            balloon,
            repulsion,
            penalty,
        ))
    }

    /// One outer iteration: `φ` sweeps, `w` update, `b` update, logging.
    pub fn step(
        &mut self,
        state: &mut SolverState,
        g: &ScalarField,
        mode: WMode,
    ) -> Result<(usize, ProjectionStats)> {
        state.check_dims(g)?;
        self.dims.ensure_same(state.dims())?;
        self.nonlocal_fresh = false;
        self.advance(state, g, mode)
    }

    fn advance(
        &mut self,
        state: &mut SolverState,
        g: &ScalarField,
        mode: WMode,
    ) -> Result<(usize, ProjectionStats)> {
        self.prev.copy_from_slice(state.phi.as_slice());
        let sweeps = self.phi_sweeps(state, g)?;
        let stats = self.update_w(state, g, mode);
        Self::update_b(state);
        if !state.b.is_finite() {
            return Err(Error::NonFinite {
                stage: "Bregman update",
            });
        }
        state.k += 1;
        let change = relative_change(state.phi.as_slice(), &self.prev);
        state.phi_change_log.push(change);
        let e = self.energy(state, g)?;
        state.energy_log.push(e);
        Ok((sweeps, stats))
    }

    pub fn run(&mut self, g: &ScalarField, init: ScalarField, mode: WMode) -> Result<RunOutcome> {
        self.run_with(g, init, mode, |_| {})
    }

    /// Like [`SplitBregman::run`], calling `observer` after every iteration.
    pub fn run_with(
        &mut self,
        g: &ScalarField,
        init: ScalarField,
        mode: WMode,
        mut observer: impl FnMut(&IterationReport<'_>),
    ) -> Result<RunOutcome> {
        g.ensure_finite("edge map")?;
        let mut state = SolverState::new(init)?;
        state.check_dims(g)?;
        self.dims.ensure_same(state.dims())?;
        let e0 = self.energy(&state, g)?;
        state.energy_log.push(e0);
        let mut termination = Termination::IterationCap;
        while state.k < self.params.outer_iters {
            let (sweeps, projection) = self.advance(&mut state, g, mode)?;
            observer(&IterationReport {
                state: &state,
                sweeps,
                projection,
            });
            if state.phi_change_log[state.k - 1] <= self.params.tol_outer {
                termination = Termination::Converged;
                break;
            }
        }
        Ok(RunOutcome { state, termination })
    }
}

/// Convenience wrapper building a fresh workspace.
pub fn run(
    g: &ScalarField,
    init: ScalarField,
    params: &SolverParams,
    mode: WMode,
) -> Result<RunOutcome> {
    SplitBregman::new(init.dims(), *params)?.run(g, init, mode)
}

fn check_op_params(params: &SolverParams) -> Result<()> {
    params.weights.validate()?;
    ensure_nonnegative("tau", params.tau)
}

/// Right-hand side `F` of the `φ` sweep for the current state, with `v`
/// computed from `(w, φ)`.
pub fn phi_rhs(state: &SolverState, g: &ScalarField, params: &SolverParams) -> Result<ScalarField> {
    check_op_params(params)?;
    state.check_dims(g)?;
    let dims = state.dims();
    let v = nonlocal_vector(&state.w, &state.phi, &params.rep, &params.reg)?;
    let cols = dims.cols();
    let mut out = ScalarField::zeros(dims);
    for (i, row) in out.as_mut_slice().chunks_mut(cols).enumerate() {
        rhs_row(
            params,
            cols,
            i,
            i + 1 == dims.rows(),
            state.phi.as_slice(),
            g.as_slice(),
            (state.w.channel1(), state.w.channel2()),
            (state.b.channel1(), state.b.channel2()),
            (v.channel1(), v.channel2()),
            row,
        );
    }
    out.ensure_finite("phi right-hand side")?;
    Ok(out)
}

/// The `φ` sub-problem from `state.phi`; returns the new `φ` and the
/// number of sweeps run.
pub fn phi_subproblem(
    state: &SolverState,
    g: &ScalarField,
    params: &SolverParams,
) -> Result<(ScalarField, usize)> {
    state.check_dims(g)?;
    let mut ws = SplitBregman::new(state.dims(), *params)?;
    let mut s = state.clone();
    let sweeps = ws.phi_sweeps(&mut s, g)?;
    Ok((s.phi, sweeps))
}

/// Shrinkage `w` update with `state.phi` taken as `φ^{k+1}`.
pub fn update_w_threshold(
    state: &SolverState,
    g: &ScalarField,
    params: &SolverParams,
) -> Result<(VectorField2, ProjectionStats)> {
    update_w_with(state, g, params, WMode::Threshold)
}

/// Fixed-point `w` update with `state.phi` taken as `φ^{k+1}`.
pub fn update_w_fixed_point(
    state: &SolverState,
    g: &ScalarField,
    params: &SolverParams,
) -> Result<(VectorField2, ProjectionStats)> {
    update_w_with(state, g, params, WMode::FixedPoint)
}

fn update_w_with(
    state: &SolverState,
    g: &ScalarField,
    params: &SolverParams,
    mode: WMode,
) -> Result<(VectorField2, ProjectionStats)> {
    state.check_dims(g)?;
    let mut ws = SplitBregman::new(state.dims(), *params)?;
    let mut s = state.clone();
    let stats = ws.update_w(&mut s, g, mode);
    Ok((s.w, stats))
}

/// `b + ∇φ − w` with `state.phi`, `state.w` taken as the new iterates.
pub fn update_b(state: &SolverState) -> Result<VectorField2> {
    let d = state.dims();
    d.ensure_same(state.w.dims())?;
    d.ensure_same(state.b.dims())?;
    let mut s = state.clone();
    SplitBregman::update_b(&mut s);
    Ok(s.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::circle_sdf;

    fn params() -> SolverParams {
        SolverParams::default()
    }

    #[test]
    fn zero_step_and_far_field_leave_phi() {
        let d = GridDims::new(8, 8).unwrap();
        let g = ScalarField::filled(d, 1.0);
        let st = SolverState::new(circle_sdf(d, (3.5, 3.5), 2.0)).unwrap();
        let p = SolverParams {
            tau: 0.0,
            ..params()
        };
        assert_eq!(phi_rhs(&st, &g, &p).unwrap(), st.phi);

        let mut far = SolverState::new(ScalarField::filled(d, 10.0)).unwrap();
        far.w = VectorField2::zeros(d);
        assert_eq!(phi_rhs(&far, &g, &params()).unwrap(), far.phi);
    }

    #[test]
    fn zero_sweeps_and_zero_iterations_are_no_ops() {
        let d = GridDims::new(12, 12).unwrap();
        let g = ScalarField::filled(d, 1.0);
        let init = circle_sdf(d, (6.0, 6.0), 3.0);
        let st = SolverState::new(init.clone()).unwrap();
        let p = SolverParams {
            inner_iters: 0,
            ..params()
        };
        let (phi, sweeps) = phi_subproblem(&st, &g, &p).unwrap();
        assert_eq!((phi, sweeps), (init.clone(), 0));
        let p = SolverParams {
            outer_iters: 0,
            ..params()
        };
        let out = run(&g, init.clone(), &p, WMode::Threshold).unwrap();
        assert_eq!(out.state.phi, init);
        assert_eq!(out.state.energy_log.len(), 1);
        assert_eq!(out.termination, Termination::IterationCap);
    }

    #[test]
    fn threshold_example_values() {
        // a pixel with B = (2, 0) and threshold 1 maps to (1, 0)
        let d = GridDims::new(3, 3).unwrap();
        let reg = RegularizerParams::default();
        let mut st = SolverState::new(ScalarField::zeros(d)).unwrap();
        st.b = VectorField2::from_fn(d, |_, _| (2.0, 0.0));
        // δ(0) = 1 with ε = 1, so threshold = (γ/μ) g = 1 with g = μ/γ
        let p = SolverParams {
            weights: EnergyWeights::new(4.0, 0.0, 0.0, 8.0).unwrap(),
            reg,
            ..params()
        };
        let g = ScalarField::filled(d, 2.0);
        let (w, stats) = update_w_threshold(&st, &g, &p).unwrap();
        for k in 0..9 {
            assert_eq!((w.channel1()[k], w.channel2()[k]), (1.0, 0.0));
        }
        assert_eq!(stats.projected, 9);

        // at the threshold the shrinkage vanishes and w is kept
        let g = ScalarField::filled(d, 4.0);
        let (w, stats) = update_w_threshold(&st, &g, &p).unwrap();
        assert_eq!(w, st.w);
        assert_eq!(stats.kept, 9);
    }

    #[test]
    fn unit_ramp_gives_its_gradient() {
        let d = GridDims::new(10, 10).unwrap();
        let phi = ScalarField::from_fn(d, |_, j| j as f64 + 20.0);
        let mut st = SolverState::new(phi).unwrap();
        st.w = VectorField2::zeros(d);
        let g = ScalarField::filled(d, 1.0);
        let p = SolverParams {
            weights: EnergyWeights::new(4.0, 4.0, 0.0, 8.0).unwrap(),
            ..params()
        };
        let (w, _) = update_w_threshold(&st, &g, &p).unwrap();
        let (wf, _) = update_w_fixed_point(&st, &g, &p).unwrap();
        for i in 0..10 {
            for j in 0..9 {
                assert_eq!(w.get(i, j), (0.0, 1.0));
                assert_eq!(wf.get(i, j), (0.0, 1.0));
            }
        }
    }

    #[test]
    fn b_update_definition() {
        let d = GridDims::new(6, 5).unwrap();
        let phi = ScalarField::from_fn(d, |i, j| (i * j) as f64 * 0.3 - 1.0);
        let mut st = SolverState::new(phi).unwrap();
        assert_eq!(update_b(&st).unwrap().max_abs(), 0.0);
        st.w = VectorField2::from_fn(d, |i, _| (0.1 * i as f64, -0.5));
        st.b = VectorField2::from_fn(d, |_, j| (0.0, j as f64));
        let b = update_b(&st).unwrap();
        let grad = gradient_forward(&st.phi).unwrap();
        for k in 0..d.len() {
            let e1 = st.b.channel1()[k] + grad.channel1()[k] - st.w.channel1()[k];
            let e2 = st.b.channel2()[k] + grad.channel2()[k] - st.w.channel2()[k];
            assert_eq!((b.channel1()[k], b.channel2()[k]), (e1, e2));
        }
    }

    #[test]
    fn workspace_holds_about_six_scalars_per_pixel() {
        let d = GridDims::new(20, 30).unwrap();
        let ws = SplitBregman::new(d, params()).unwrap();
        assert_eq!(ws.workspace_field_scalars(), 5 * d.len() + 2 * 20 * 16);
        assert!(ws.aux_scalars() <= 8 * (d.rows() + d.cols()));
    }

    #[test]
    fn huge_step_is_reported_as_unstable() {
        let d = GridDims::new(16, 16).unwrap();
        let g = ScalarField::filled(d, 1.0);
        let init = circle_sdf(d, (8.0, 8.0), 4.0);
        let p = SolverParams {
            tau: 1e12,
            outer_iters: 5,
            ..params()
        };
        match run(&g, init, &p, WMode::Threshold) {
            Err(Error::Unstable { iteration, .. }) => assert_eq!(iteration, 1),
            other => panic!("expected instability, got {other:?}"),
        }
    }
}
