//! The three snake energies and the Bregman penalty, as unit-weight pixel
//! sums.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_nonnegative, ensure_positive, Result};
use crate::grid::{forward_diff_at, GridDims, ScalarField, VectorField2};
use crate::regularize::RegularizerParams;
use crate::repulsion::{band_into, RepulsionParams, WindowKernel};

/// Penalty weights: `γ` geodesic length, `α` balloon, `β` repulsion and the
/// Bregman penalty `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyWeights {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
}

impl EnergyWeights {
    pub fn new(gamma: f64, alpha: f64, beta: f64, mu: f64) -> Result<Self> {
        let w = Self {
            gamma,
            alpha,
            beta,
            mu,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_nonnegative("gamma", self.gamma)?;
        ensure_nonnegative("alpha", self.alpha)?;
        ensure_nonnegative("beta", self.beta)?;
        ensure_positive("mu", self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub geodesic: f64,
    pub balloon: f64,
    pub repulsion: f64,
    pub penalty: f64,
    pub total: f64,
}

/// `Σ g |∇φ| δ_ε(φ)` with forward differences.
pub fn geodesic_length_energy(
    phi: &ScalarField,
    g: &ScalarField,
    reg: &RegularizerParams,
) -> Result<f64> {
    let dims = phi.dims();
    dims.ensure_same(g.dims())?;
    let p = phi.as_slice();
    let mut sum = 0.0;
    for i in 0..dims.rows() {
        for j in 0..dims.cols() {
            let k = dims.index(i, j);
            let d = reg.dirac(p[k]);
            if d != 0.0 {
                let (a, b) = forward_diff_at(p, dims, i, j);
                sum += g.as_slice()[k] * libm::sqrt(a * a + b * b) * d;
            }
        }
    }
    Ok(sum)
}

/// `Σ g (1 − H_ε(φ))`, the edge-weighted inside area.
pub fn balloon_energy(phi: &ScalarField, g: &ScalarField, reg: &RegularizerParams) -> Result<f64> {
    phi.dims().ensure_same(g.dims())?;
    Ok(phi
        .as_slice()
        .iter()
        .zip(g.as_slice())
        .map(|(&p, &gv)| gv * (1.0 - reg.heaviside(p)))
        .sum())
}

/// `−Σ_x Σ_{y ∈ window(x)} K(x − y) (w(x) · w(y)) h(φ(x)) h(φ(y))`.
pub fn repulsion_energy(
    phi: &ScalarField,
    w: &VectorField2,
    rep: &RepulsionParams,
    reg: &RegularizerParams,
) -> Result<f64> {
    let dims = phi.dims();
    dims.ensure_same(w.dims())?;
    let mut h = vec![0.0; dims.len()];
    band_into(phi.as_slice(), reg, &mut h);
    let a: Vec<f64> = w.channel1().iter().zip(&h).map(|(x, y)| x * y).collect();
    let b: Vec<f64> = w.channel2().iter().zip(&h).map(|(x, y)| x * y).collect();
    Ok(repulsion_energy_weighted(&a, &b, dims, &rep.kernel()))
}

/// Repulsion energy from the band-weighted channels `(a, b) = w · h(φ)`.
pub(crate) fn repulsion_energy_weighted(
    a: &[f64],
    b: &[f64],
    dims: GridDims,
    kernel: &WindowKernel,
) -> f64 {
    let (rows, cols) = (dims.rows() as isize, dims.cols() as isize);
    let half = kernel.half() as isize;
    let mut sum = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let kx = (i * cols + j) as usize;
            if a[kx] == 0.0 && b[kx] == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for p in -half..=half {
                let ii = i + p;
                if ii < 0 || ii >= rows {
                    continue;
                }
                for q in -half..=half {
                    let jj = j + q;
                    if jj < 0 || jj >= cols {
                        continue;
                    }
                    let ky = (ii * cols + jj) as usize;
                    inner += kernel.weight(p, q) * (a[kx] * a[ky] + b[kx] * b[ky]);
                }
            }
            sum += inner;
        }
    }
    -sum
}

/// `(μ/2) Σ |w − ∇φ − b|²`.
pub fn bregman_penalty(
    phi: &ScalarField,
    w: &VectorField2,
    b: &VectorField2,
    mu: f64,
) -> Result<f64> {
    let dims = phi.dims();
    dims.ensure_same(w.dims())?;
    dims.ensure_same(b.dims())?;
    let p = phi.as_slice();
    let mut sum = 0.0;
    for i in 0..dims.rows() {
        for j in 0..dims.cols() {
            let k = dims.index(i, j);
            let (g1, g2) = forward_diff_at(p, dims, i, j);
            let r1 = w.channel1()[k] - g1 - b.channel1()[k];
            let r2 = w.channel2()[k] - g2 - b.channel2()[k];
            sum += r1 * r1 + r2 * r2;
        }
    }
    Ok(0.5 * mu * sum)
}

/// Level-set state the energy is evaluated on. `b` is present for split
/// Bregman states and adds the penalty term.
#[derive(Debug, Clone, Copy)]
pub struct EnergyInput<'a> {
    pub phi: &'a ScalarField,
    pub w: &'a VectorField2,
    pub b: Option<&'a VectorField2>,
}

pub fn total_energy(
    state: EnergyInput<'_>,
    g: &ScalarField,
    weights: &EnergyWeights,
    reg: &RegularizerParams,
    rep: &RepulsionParams,
) -> Result<EnergyBreakdown> {
    let geodesic = geodesic_length_energy(state.phi, g, reg)?;
    let balloon = balloon_energy(state.phi, g, reg)?;
    let repulsion = repulsion_energy(state.phi, state.w, rep, reg)?;
    let penalty = match state.b {
        Some(b) => bregman_penalty(state.phi, state.w, b, weights.mu)?,
        None => 0.0,
    };
    Ok(combine(weights, geodesic, balloon, repulsion, penalty))
}

pub(crate) fn combine(
    weights: &EnergyWeights,
    geodesic: f64,
    balloon: f64,
    repulsion: f64,
    penalty: f64,
) -> EnergyBreakdown {
    EnergyBreakdown {
        geodesic,
        balloon,
        repulsion,
        penalty,
        total: weights.gamma * geodesic
            + weights.alpha * balloon
            + weights.beta * repulsion
            + penalty,
    }
}
