//! Additive operator splitting baseline.
//!
//! The curvature term is treated semi-implicitly with one tridiagonal
//! system per grid row and per grid column (harmonic averages of
//! `g / |∇φ|` between neighbours); the balloon term is upwinded and the
//! repulsion drift is explicit. The two directional solutions are averaged.
//! Unlike the split Bregman scheme, `φ` drifts away from a distance function
//! and is re-initialized periodically.

use alloc::vec;
use alloc::vec::Vec;

use crate::energy::{total_energy, EnergyBreakdown, EnergyInput, EnergyWeights};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::grid::{central_diff_at, gradient_forward, GridDims, ScalarField};
use crate::par;
use crate::regularize::RegularizerParams;
use crate::repulsion::{gradient_path_into, RepulsionParams, WindowKernel};
use crate::solver::{check_stability, relative_change, Termination};
use crate::tridiag::{solve_in_place, TridiagonalSystem};

/// Added to `|∇φ|` before it is used as a divisor.
pub const GRADIENT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AosParams {
    /// `μ` is unused here.
    pub weights: EnergyWeights,
    pub reg: RegularizerParams,
    pub rep: RepulsionParams,
    pub tau: f64,
    /// Outer steps between re-initializations.
    pub reinit_every: usize,
    pub reinit_iters: usize,
    pub reinit_dt: f64,
    pub outer_iters: usize,
    pub tol: f64,
}

impl Default for AosParams {
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
            reinit_every: 1,
            reinit_iters: 10,
            reinit_dt: 0.3,
            outer_iters: 3000,
            tol: 1e-5,
        }
    }
}

impl AosParams {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        RegularizerParams::new(self.reg.epsilon(), self.reg.band_offset())?;
        RepulsionParams::new(self.rep.scale(), self.rep.window_half())?;
        ensure_nonnegative("tau", self.tau)?;
        ensure_positive("reinit_dt", self.reinit_dt)?;
        ensure_positive("tol", self.tol)?;
        if self.reinit_every == 0 {
            return Err(Error::InvalidParameter {
                name: "reinit_every",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Orientation of the grid lines a system couples along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// One system per grid row, coupling horizontal neighbours.
    Rows,
    /// One system per grid column, coupling vertical neighbours.
    Cols,
}

/// Off-diagonal entries of the curvature operator along one grid line.
/// `lower[i - 1]` couples node `i` to `i - 1`, `upper[i]` couples `i` to
/// `i + 1`; the diagonal is the negative row sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LineCoefficients {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LineCoefficients {
    pub fn len(&self) -> usize {
        self.upper.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        let l = if i > 0 { self.lower[i - 1] } else { 0.0 };
        let u = if i < self.upper.len() {
            self.upper[i]
        } else {
            0.0
        };
        -(l + u)
    }

    /// `(1 − 2τ A) x = rhs`.
    pub fn system(&self, tau: f64, rhs: Vec<f64>) -> TridiagonalSystem {
        let n = self.len();
        TridiagonalSystem {
            sub: self.lower.iter().map(|a| -2.0 * tau * a).collect(),
            diag: (0..n).map(|i| 1.0 - 2.0 * tau * self.diagonal(i)).collect(),
            sup: self.upper.iter().map(|a| -2.0 * tau * a).collect(),
            rhs,
        }
    }
}

/// `2γ mᵢ / (mᵢ/gᵢ + mⱼ/gⱼ)` with `m = |∇°φ| + floor`.
#[inline]
fn coupling(gamma: f64, mi: f64, gi: f64, mj: f64, gj: f64) -> f64 {
    2.0 * gamma * mi / (mi / gi + mj / gj)
}

fn check_edge_map(g: &ScalarField) -> Result<()> {
    if g.as_slice().iter().all(|&x| x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "g",
            reason: "edge map must be positive and finite",
        })
    }
}

fn gradient_magnitude_into(phi: &ScalarField, out: &mut [f64]) {
    let dims = phi.dims();
    for i in 0..dims.rows() {
        for j in 0..dims.cols() {
            let (a, b) = central_diff_at(phi, i, j);
            out[dims.index(i, j)] = libm::sqrt(a * a + b * b) + GRADIENT_FLOOR;
        }
    }
}

/// Line operators for every row or every column.
pub fn aos_coefficients(
    phi: &ScalarField,
    g: &ScalarField,
    gamma: f64,
    direction: Direction,
) -> Result<Vec<LineCoefficients>> {
    let dims = phi.dims();
    dims.ensure_same(g.dims())?;
    check_edge_map(g)?;
    let mut m = vec![0.0; dims.len()];
    gradient_magnitude_into(phi, &mut m);
    let gs = g.as_slice();
    let (lines, len) = match direction {
        Direction::Rows => (dims.rows(), dims.cols()),
        Direction::Cols => (dims.cols(), dims.rows()),
    };
    let at = |line: usize, pos: usize| match direction {
        Direction::Rows => dims.index(line, pos),
        Direction::Cols => dims.index(pos, line),
    };
    Ok((0..lines)
        .map(|line| {
            let lower = (1..len)
                .map(|p| {
                    let (i, j) = (at(line, p), at(line, p - 1));
                    coupling(gamma, m[i], gs[i], m[j], gs[j])
                })
                .collect();
            let upper = (0..len - 1)
                .map(|p| {
                    let (i, j) = (at(line, p), at(line, p + 1));
                    coupling(gamma, m[i], gs[i], m[j], gs[j])
                })
                .collect();
            LineCoefficients { lower, upper }
        })
        .collect())
}

/// Upwind `|∇φ|` for `φ_t + F |∇φ| = 0`, selecting by the sign of `F`.
/// Arguments are backward and forward differences along each axis.
#[inline]
pub(crate) fn godunov_norm(bx: f64, fx: f64, by: f64, fy: f64, speed_positive: bool) -> f64 {
    let axis = |back: f64, fwd: f64| {
        if speed_positive {
            let a = back.max(0.0);
            let b = fwd.min(0.0);
            (a * a).max(b * b)
        } else {
            let a = back.min(0.0);
            let b = fwd.max(0.0);
            (a * a).max(b * b)
        }
    };
    libm::sqrt(axis(bx, fx) + axis(by, fy))
}

/// One-sided differences with zero flux across the frame.
#[inline]
fn one_sided(p: &[f64], dims: GridDims, i: usize, j: usize) -> (f64, f64, f64, f64) {
    let (rows, cols) = (dims.rows(), dims.cols());
    let k = i * cols + j;
    let x = p[k];
    let bx = if i > 0 { x - p[k - cols] } else { 0.0 };
    let fx = if i + 1 < rows { p[k + cols] - x } else { 0.0 };
    let by = if j > 0 { x - p[k - 1] } else { 0.0 };
    let fy = if j + 1 < cols { p[k + 1] - x } else { 0.0 };
    (bx, fx, by, fy)
}

/// Upwinded balloon drift `α g |∇φ|`.
fn balloon_drift_into(phi: &[f64], g: &[f64], alpha: f64, dims: GridDims, out: &mut [f64]) {
    let cols = dims.cols();
    par::for_each_row(out, cols, |i, row| {
        for (j, o) in row.iter_mut().enumerate() {
            let a = alpha * g[i * cols + j];
            if a == 0.0 {
                *o = 0.0;
                continue;
            }
            let (bx, fx, by, fy) = one_sided(phi, dims, i, j);
            // φ_t = a|∇φ| is φ_t + F|∇φ| = 0 with F = −a
            *o = a * godunov_norm(bx, fx, by, fy, a < 0.0);
        }
    });
}

/// Reusable buffers for one grid size.
#[derive(Debug, Clone)]
pub struct Aos {
    params: AosParams,
    dims: GridDims,
    kernel: WindowKernel,
    grad: Vec<f64>,
    rhs: Vec<f64>,
    drift: Vec<f64>,
    by_rows: Vec<f64>,
    /// Column solutions, stored transposed.
    by_cols: Vec<f64>,
    scratch: [Vec<f64>; 3],
}

impl Aos {
    pub fn new(dims: GridDims, params: AosParams) -> Result<Self> {
        params.validate()?;
        let n = dims.len();
        Ok(Self {
            params,
            dims,
            kernel: params.rep.kernel(),
            grad: vec![0.0; n],
            rhs: vec![0.0; n],
            drift: vec![0.0; n],
            by_rows: vec![0.0; n],
            by_cols: vec![0.0; n],
            scratch: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        })
    }

    pub fn params(&self) -> &AosParams {
        &self.params
    }

    /// One semi-implicit step, in place.
    pub fn step(&mut self, phi: &mut ScalarField, g: &ScalarField) -> Result<()> {
        let dims = self.dims;
        dims.ensure_same(phi.dims())?;
        dims.ensure_same(g.dims())?;
        let (rows, cols) = (dims.rows(), dims.cols());
        let p = self.params;
        let tau = p.tau;

        gradient_magnitude_into(phi, &mut self.grad);
        balloon_drift_into(
            phi.as_slice(),
            g.as_slice(),
            p.weights.alpha,
            dims,
            &mut self.drift,
        );
        gradient_path_into(
            phi,
            p.weights.beta,
            &p.rep,
            &self.kernel,
            &p.reg,
            &mut self.scratch,
            &mut self.rhs,
        );
        for ((r, &x), &d) in self.rhs.iter_mut().zip(phi.as_slice()).zip(&self.drift) {
            *r = x + tau * (d + *r);
        }

        let gamma = p.weights.gamma;
        let (m, gs, rhs) = (&self.grad, g.as_slice(), &self.rhs);
        let solve_lines =
            |out: &mut [f64], len: usize, at: &(dyn Fn(usize, usize) -> usize + Sync)| {
                let failure = core::sync::atomic::AtomicUsize::new(usize::MAX);
                par::for_each_row(out, len, |line, x| {
                    let mut sub = vec![0.0; len - 1];
                    let mut sup = vec![0.0; len - 1];
                    let mut diag = vec![0.0; len];
                    let mut scratch = vec![0.0; len];
                    for pos in 0..len {
                        let i = at(line, pos);
                        let mut sum = 0.0;
                        if pos > 0 {
                            let j = at(line, pos - 1);
                            let a = coupling(gamma, m[i], gs[i], m[j], gs[j]);
                            sub[pos - 1] = -2.0 * tau * a;
                            sum += a;
                        }
                        if pos + 1 < len {
                            let j = at(line, pos + 1);
                            let a = coupling(gamma, m[i], gs[i], m[j], gs[j]);
                            sup[pos] = -2.0 * tau * a;
                            sum += a;
                        }
                        diag[pos] = 1.0 + 2.0 * tau * sum;
                        x[pos] = rhs[i];
                    }
                    let dominant = (0..len).all(|r| {
                        let l = if r > 0 { sub[r - 1].abs() } else { 0.0 };
                        let u = if r + 1 < len { sup[r].abs() } else { 0.0 };
                        diag[r].abs() > l + u || (l + u == 0.0 && diag[r] != 0.0)
                    });
                    if !dominant || solve_in_place(&sub, &diag, &sup, x, &mut scratch).is_err() {
                        failure.fetch_min(line, core::sync::atomic::Ordering::Relaxed);
                    }
                });
                match failure.into_inner() {
                    usize::MAX => Ok(()),
                    row => Err(Error::NotDiagonallyDominant { row }),
                }
            };
        solve_lines(&mut self.by_rows, cols, &|line, pos| line * cols + pos)?;
        solve_lines(&mut self.by_cols, rows, &|line, pos| pos * cols + line)?;

        let out = phi.as_mut_slice();
        for i in 0..rows {
            for j in 0..cols {
                out[i * cols + j] = 0.5 * (self.by_rows[i * cols + j] + self.by_cols[j * rows + i]);
            }
        }
        Ok(())
    }

    pub fn run(&mut self, g: &ScalarField, init: ScalarField) -> Result<AosOutcome> {
        self.run_with(g, init, |_, _| {})
    }

    /// Runs to convergence or the iteration cap, calling
    /// `observer(iteration, φ)` after every step.
    pub fn run_with(
        &mut self,
        g: &ScalarField,
        init: ScalarField,
        mut observer: impl FnMut(usize, &ScalarField),
    ) -> Result<AosOutcome> {
        init.ensure_finite("initial level set")?;
        check_edge_map(g)?;
        self.dims.ensure_same(init.dims())?;
        let p = self.params;
        let limit = 10.0 * self.dims.diameter();
        let mut phi = init;
        let mut prev = vec![0.0; self.dims.len()];
        let mut energy_log = vec![self.energy(&phi, g)?];
        let mut phi_change_log = Vec::new();
        let mut termination = Termination::IterationCap;
        let mut k = 0;
        while k < p.outer_iters {
            prev.copy_from_slice(phi.as_slice());
            self.step(&mut phi, g)?;
            k += 1;
            check_stability(phi.as_slice(), limit, k, 0)?;
            if p.reinit_iters > 0 && k % p.reinit_every == 0 {
                phi = reinitialize(&phi, p.reinit_iters, p.reinit_dt)?;
            }
            let change = relative_change(phi.as_slice(), &prev);
            phi_change_log.push(change);
            energy_log.push(self.energy(&phi, g)?);
            observer(k, &phi);
            if change <= p.tol {
                termination = Termination::Converged;
                break;
            }
        }
        Ok(AosOutcome {
            phi,
            iterations: k,
            termination,
            energy_log,
            phi_change_log,
        })
    }

    /// Snake energy with `w = ∇φ` and no penalty term.
    fn energy(&self, phi: &ScalarField, g: &ScalarField) -> Result<EnergyBreakdown> {
        let w = gradient_forward(phi)?;
        total_energy(
            EnergyInput {
                phi,
                w: &w,
                b: None,
            },
            g,
            &self.params.weights,
            &self.params.reg,
            &self.params.rep,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AosOutcome {
    pub phi: ScalarField,
    pub iterations: usize,
    pub termination: Termination,
    pub energy_log: Vec<EnergyBreakdown>,
    pub phi_change_log: Vec<f64>,
}

/// One AOS step from `φ`.
pub fn aos_step(phi: &ScalarField, g: &ScalarField, params: &AosParams) -> Result<ScalarField> {
    check_edge_map(g)?;
    let mut ws = Aos::new(phi.dims(), *params)?;
    let mut out = phi.clone();
    ws.step(&mut out, g)?;
    check_stability(out.as_slice(), 10.0 * phi.dims().diameter(), 1, 0)?;
    Ok(out)
}

/// Smoothed sign of the re-initialization flow, `sin(min(|φ|, π/2)) sign φ`.
#[inline]
pub fn smoothed_sign(phi: f64) -> f64 {
    libm::sin(phi.abs().min(core::f64::consts::FRAC_PI_2)).copysign(phi)
}

/// Evolves `ψ_t = −S(φ)(|∇ψ| − 1)` from `ψ = φ` with Godunov upwinding.
pub fn reinitialize(phi: &ScalarField, iters: usize, dt: f64) -> Result<ScalarField> {
    phi.ensure_finite("re-initialization input")?;
    ensure_positive("dt", dt)?;
    let dims = phi.dims();
    let sign: Vec<f64> = phi.as_slice().iter().map(|&x| smoothed_sign(x)).collect();
    let mut psi = phi.clone();
    let mut next = vec![0.0; dims.len()];
    for _ in 0..iters {
        let cur = psi.as_slice();
        let cols = dims.cols();
        par::for_each_row(&mut next, cols, |i, row| {
            for (j, o) in row.iter_mut().enumerate() {
                let k = i * cols + j;
                let s = sign[k];
                if s == 0.0 {
                    *o = cur[k];
                    continue;
                }
                let (bx, fx, by, fy) = one_sided(cur, dims, i, j);
                let norm = godunov_norm(bx, fx, by, fy, s > 0.0);
                *o = cur[k] - dt * s * (norm - 1.0);
            }
        });
        psi.as_mut_slice().copy_from_slice(&next);
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::circle_sdf;
    use crate::tridiag::thomas_solve;

    #[test]
    fn constant_coefficients_for_unit_gradient() {
        let d = GridDims::new(9, 7).unwrap();
        // |∇°φ| = 1 away from the frame
        let phi = ScalarField::from_fn(d, |i, _| i as f64);
        let g = ScalarField::filled(d, 0.5);
        let lines = aos_coefficients(&phi, &g, 3.0, Direction::Rows).unwrap();
        for line in &lines[1..8] {
            for &a in line.lower.iter().chain(&line.upper) {
                assert!((a - 1.5).abs() < 1e-12, "{a}");
            }
        }
        for line in &lines {
            assert_eq!(line.len(), 7);
            for i in 1..6 {
                let sum = line.lower[i - 1] + line.upper[i] + line.diagonal(i);
                assert_eq!(sum, 0.0);
            }
            // frame nodes couple to one neighbour only
            assert_eq!(line.diagonal(0), -line.upper[0]);
            assert_eq!(line.diagonal(6), -line.lower[5]);
        }
    }

    #[test]
    fn line_systems_are_dominant_and_solvable() {
        let d = GridDims::new(12, 10).unwrap();
        let phi = circle_sdf(d, (5.5, 4.0), 3.0);
        let g = ScalarField::from_fn(d, |i, j| 0.2 + 0.05 * ((i + j) % 7) as f64);
        for dir in [Direction::Rows, Direction::Cols] {
            for line in aos_coefficients(&phi, &g, 2.0, dir).unwrap() {
                let rhs: Vec<f64> = (0..line.len()).map(|k| k as f64).collect();
                let sys = line.system(0.7, rhs.clone());
                sys.check_dominance().unwrap();
                let x = thomas_solve(&sys).unwrap();
                let back = sys.apply(&x);
                for (a, b) in back.iter().zip(&rhs) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let d = GridDims::new(16, 16).unwrap();
        let phi = circle_sdf(d, (8.0, 7.0), 5.0);
        let g = ScalarField::filled(d, 1.0);
        let p = AosParams {
            tau: 0.0,
            ..AosParams::default()
        };
        assert_eq!(aos_step(&phi, &g, &p).unwrap(), phi);
    }

    #[test]
    fn smoothed_sign_is_clamped() {
        assert_eq!(smoothed_sign(0.0), 0.0);
        assert_eq!(smoothed_sign(10.0), 1.0);
        assert_eq!(smoothed_sign(-10.0), -1.0);
        assert!((smoothed_sign(0.5) - libm::sin(0.5)).abs() < 1e-16);
    }

    #[test]
    fn reinitialize_keeps_a_straight_distance_function() {
        let d = GridDims::new(20, 24).unwrap();
        let phi = ScalarField::from_fn(d, |_, j| j as f64 - 10.3);
        let out = reinitialize(&phi, 10, 0.3).unwrap();
        for (a, b) in out.as_slice().iter().zip(phi.as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_edge_map() {
        let d = GridDims::new(8, 8).unwrap();
        let phi = circle_sdf(d, (4.0, 4.0), 2.0);
        let g = ScalarField::zeros(d);
        assert!(aos_coefficients(&phi, &g, 1.0, Direction::Rows).is_err());
    }
}
