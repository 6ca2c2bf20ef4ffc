//! Periodic screened-Poisson solve `(1 − c Δ) φ = F` by 2D FFT.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{ensure_nonnegative, Result};
use crate::fft::{Complex64, RealFft2};
use crate::grid::{GridDims, ScalarField};

/// Reusable plan for one grid and one coefficient `c`. The Fourier symbol
/// `1 − c (2 cos z₁ + 2 cos z₂ − 4)` is real and even, so only the half
/// spectrum of the real input is formed. The symbol is evaluated on the fly
/// from two cosine tables.
#[derive(Debug, Clone)]
pub struct ScreenedPoisson {
    dims: GridDims,
    coeff: f64,
    fft: RealFft2,
    spectrum: Vec<Complex64>,
    cos_rows: Vec<f64>,
    cos_cols: Vec<f64>,
}

impl ScreenedPoisson {
    pub fn new(dims: GridDims, coeff: f64) -> Result<Self> {
        ensure_nonnegative("coeff", coeff)?;
        let table = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|l| libm::cos(2.0 * PI * l as f64 / n as f64))
                .collect()
        };
        let fft = RealFft2::new(dims.rows(), dims.cols());
        Ok(Self {
            dims,
            coeff,
            spectrum: vec![Complex64::new(0.0, 0.0); fft.spectrum_len()],
            fft,
            cos_rows: table(dims.rows()),
            cos_cols: table(dims.cols()),
        })
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    /// Scalars in the half spectrum, `M (N/2 + 1)` complex values.
    pub fn spectrum_scalars(&self) -> usize {
        2 * self.spectrum.len()
    }

    /// Scalars held besides the spectrum; grows with `M + N` only.
    pub fn aux_scalars(&self) -> usize {
        2 * self.fft.aux_len() + self.cos_rows.len() + self.cos_cols.len()
    }

    #[inline]
    pub fn symbol(&self, l1: usize, l2: usize) -> f64 {
        1.0 - self.coeff * (2.0 * self.cos_rows[l1] + 2.0 * self.cos_cols[l2] - 4.0)
    }

    /// Replaces the right-hand side held in `data` by the solution.
    pub fn solve_in_place(&mut self, data: &mut [f64]) {
        let rows = self.dims.rows();
        let hc = self.fft.half_cols();
        self.fft.forward(data, &mut self.spectrum);
        let norm = self.dims.len() as f64;
        let c = self.coeff;
        for (l1, row) in self.spectrum.chunks_mut(hc).enumerate().take(rows) {
            let cr = 2.0 * self.cos_rows[l1];
            for (z, &cc) in row.iter_mut().zip(&self.cos_cols) {
                *z /= (1.0 - c * (cr + 2.0 * cc - 4.0)) * norm;
            }
        }
        self.fft.inverse(&mut self.spectrum, data);
    }
}

/// `Re IFFT(FFT(F) / symbol)` with `coeff = τμ`.
pub fn solve_screened_poisson(rhs: &ScalarField, coeff: f64) -> Result<ScalarField> {
    rhs.ensure_finite("screened Poisson right-hand side")?;
    let mut plan = ScreenedPoisson::new(rhs.dims(), coeff)?;
    let mut out = rhs.clone();
    plan.solve_in_place(out.as_mut_slice());
    Ok(out)
}
