//! Windowed non-local sums behind the self-repulsion term.
//!
//! For every pixel `x`, `v(x) = Σ_y K(x − y) w(y) h(φ(y))` over a square
//! window of half-width `window_half`, with `K(p, q) = exp(−(p² + q²)/d²)`.
//! Neighbours outside the image contribute nothing.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::grid::{central_diff_at, ScalarField, VectorField2};
use crate::par;
use crate::regularize::RegularizerParams;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RepulsionParams {
    scale: f64,
    window_half: usize,
}

impl Default for RepulsionParams {
    fn default() -> Self {
        Self {
            scale: 5.0,
            window_half: 2,
        }
    }
}

impl RepulsionParams {
    pub fn new(scale: f64, window_half: usize) -> Result<Self> {
        ensure_positive("scale", scale)?;
        if window_half == 0 {
            return Err(Error::InvalidParameter {
                name: "window_half",
                reason: "must be at least 1",
            });
        }
        Ok(Self { scale, window_half })
    }

    /// Gaussian nearness scale `d`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn window_half(&self) -> usize {
        self.window_half
    }

    /// Side length of the square window, `2 * window_half + 1`.
    pub fn window_size(&self) -> usize {
        2 * self.window_half + 1
    }

    pub fn kernel(&self) -> WindowKernel {
        WindowKernel::new(self)
    }
}

/// Tabulated Gaussian weights over the window.
#[derive(Debug, Clone)]
pub struct WindowKernel {
    half: usize,
    weights: Vec<f64>,
}

impl WindowKernel {
    fn new(params: &RepulsionParams) -> Self {
        let half = params.window_half as isize;
        let d2 = params.scale * params.scale;
        let mut weights = Vec::with_capacity(params.window_size() * params.window_size());
        for p in -half..=half {
            for q in -half..=half {
                weights.push(libm::exp(-((p * p + q * q) as f64) / d2));
            }
        }
        Self {
            half: params.window_half,
            weights,
        }
    }

    pub fn half(&self) -> usize {
        self.half
    }

    #[inline]
    pub fn weight(&self, p: isize, q: isize) -> f64 {
        let side = 2 * self.half + 1;
        let h = self.half as isize;
        self.weights[(p + h) as usize * side + (q + h) as usize]
    }
}

/// Fills `h` with `h(φ)` pixel-wise.
pub(crate) fn band_into(phi: &[f64], reg: &RegularizerParams, h: &mut [f64]) {
    for (out, &p) in h.iter_mut().zip(phi) {
        *out = reg.narrow_band(p);
    }
}

/// `out(x) = Σ_y K(x − y) · (src(y) · h(y))` for both channels.
///
/// Rows of `h` that are entirely zero are skipped. Every output still sums
/// its terms in the plain double-loop order (window row, then window
/// column); the extra terms are exact zeros for finite sources, so the result
/// equals the plain double loop bit for bit.
pub(crate) fn window_sum_into(
    kernel: &WindowKernel,
    cols: usize,
    src1: &[f64],
    src2: &[f64],
    h: &[f64],
    out1: &mut [f64],
    out2: &mut [f64],
) {
    let rows = h.len() / cols;
    let row_active: Vec<bool> = h
        .chunks(cols)
        .map(|r| r.iter().any(|&x| x != 0.0))
        .collect();
    let half = kernel.half;
    let side = 2 * half + 1;
    par::for_each_row_pair(out1, out2, cols, |i, o1, o2| {
        o1.fill(0.0);
        o2.fill(0.0);
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(rows - 1);
        for ii in lo..=hi {
            if !row_active[ii] {
                continue;
            }
            let row = ii * cols..(ii + 1) * cols;
            let (hr, s1, s2) = (&h[row.clone()], &src1[row.clone()], &src2[row]);
            let krow = &kernel.weights[(ii + half - i) * side..][..side];
            for (t, &wgt) in krow.iter().enumerate() {
                // output j reads column j + t − half
                let (out_lo, in_lo) = if t < half {
                    (half - t, 0)
                } else {
                    (0, t - half)
                };
                let len = cols.saturating_sub(out_lo.max(in_lo));
                let src = hr[in_lo..in_lo + len]
                    .iter()
                    .zip(&s1[in_lo..in_lo + len])
                    .zip(&s2[in_lo..in_lo + len]);
                for ((a1, a2), ((&hv, &x1), &x2)) in o1[out_lo..out_lo + len]
                    .iter_mut()
                    .zip(o2[out_lo..out_lo + len].iter_mut())
                    .zip(src)
                {
                    *a1 += wgt * (x1 * hv);
                    *a2 += wgt * (x2 * hv);
                }
            }
        }
    });
}

/// The non-local vector `v = Σ_y K(x − y) w(y) h(φ(y))`.
pub fn nonlocal_vector(
    w: &VectorField2,
    phi: &ScalarField,
    rep: &RepulsionParams,
    reg: &RegularizerParams,
) -> Result<VectorField2> {
    let dims = phi.dims();
    dims.ensure_same(w.dims())?;
    let mut h = vec![0.0; dims.len()];
    band_into(phi.as_slice(), reg, &mut h);
    let mut v = VectorField2::zeros(dims);
    let kernel = rep.kernel();
    let (o1, o2) = v.channels_mut();
    window_sum_into(&kernel, dims.cols(), w.channel1(), w.channel2(), &h, o1, o2);
    Ok(v)
}

/// Repulsion contribution to the `φ` update: `2β h'(φ) (w · v)`.
pub fn repulsion_force(
    phi: &ScalarField,
    w: &VectorField2,
    v: &VectorField2,
    beta: f64,
    reg: &RegularizerParams,
) -> Result<ScalarField> {
    ensure_nonnegative("beta", beta)?;
    let dims = phi.dims();
    dims.ensure_same(w.dims())?;
    dims.ensure_same(v.dims())?;
    let mut out = ScalarField::zeros(dims);
    for (k, o) in out.as_mut_slice().iter_mut().enumerate() {
        let dot = w.channel1()[k] * v.channel1()[k] + w.channel2()[k] * v.channel2()[k];
        *o = 2.0 * beta * reg.narrow_band_prime(phi.as_slice()[k]) * dot;
    }
    Ok(out)
}

/// Repulsion drift of the original level-set flow, differentiated through the
/// Gaussian: `(4β/d²) h(φ(x)) Σ_y K(x − y) ((x − y) · ∇φ(y)) h(φ(y))`, with
/// central differences for `∇φ`. Used by the AOS baseline only.
pub fn repulsion_force_gradient_path(
    phi: &ScalarField,
    beta: f64,
    rep: &RepulsionParams,
    reg: &RegularizerParams,
) -> Result<ScalarField> {
    ensure_nonnegative("beta", beta)?;
    let n = phi.dims().len();
    let mut out = ScalarField::zeros(phi.dims());
    let mut scratch = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    gradient_path_into(
        phi,
        beta,
        rep,
        &rep.kernel(),
        reg,
        &mut scratch,
        out.as_mut_slice(),
    );
    Ok(out)
}

/// Buffer-reusing form of [`repulsion_force_gradient_path`]; `scratch`
/// holds three field-sized buffers.
pub(crate) fn gradient_path_into(
    phi: &ScalarField,
    beta: f64,
    rep: &RepulsionParams,
    kernel: &WindowKernel,
    reg: &RegularizerParams,
    scratch: &mut [Vec<f64>; 3],
    out: &mut [f64],
) {
    let dims = phi.dims();
    let (rows, cols) = (dims.rows(), dims.cols());
    if beta == 0.0 {
        out.fill(0.0);
        return;
    }
    let [h, gh1, gh2] = scratch;
    band_into(phi.as_slice(), reg, h);
    // h-weighted central gradient, only where h is nonzero
    for i in 0..rows {
        for j in 0..cols {
            let k = i * cols + j;
            if h[k] != 0.0 {
                let (a, b) = central_diff_at(phi, i, j);
                gh1[k] = a * h[k];
                gh2[k] = b * h[k];
            } else {
                gh1[k] = 0.0;
                gh2[k] = 0.0;
            }
        }
    }
    let half = kernel.half() as isize;
    let coeff = 4.0 * beta / (rep.scale() * rep.scale());
    let (h, gh1, gh2) = (&*h, &*gh1, &*gh2);
    par::for_each_row(out, cols, |i, row| {
        for (j, o) in row.iter_mut().enumerate() {
            let hx = h[i * cols + j];
            if hx == 0.0 {
                *o = 0.0;
                continue;
            }
            let mut acc = 0.0;
            for p in -half..=half {
                let ii = i as isize + p;
                if ii < 0 || ii >= rows as isize {
                    continue;
                }
                for q in -half..=half {
                    let jj = j as isize + q;
                    if jj < 0 || jj >= cols as isize {
                        continue;
                    }
                    let k = ii as usize * cols + jj as usize;
                    // x − y = (−p, −q)
                    acc += kernel.weight(p, q) * (-(p as f64) * gh1[k] - (q as f64) * gh2[k]);
                }
            }
            *o = coeff * hx * acc;
        }
    });
}
