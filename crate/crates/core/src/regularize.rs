//! Pointwise nonlinearities: regularized Heaviside and Dirac, the narrow-band
//! indicator, and the edge-stopping function.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};
use crate::grid::{central_diff_at, ScalarField};

/// Smoothing half-width `ε` and narrow-band half-width `l`, both in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RegularizerParams {
    epsilon: f64,
    band_offset: f64,
}

impl Default for RegularizerParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            band_offset: 1.0,
        }
    }
}

impl RegularizerParams {
    pub fn new(epsilon: f64, band_offset: f64) -> Result<Self> {
        ensure_positive("epsilon", epsilon)?;
        ensure_positive("band_offset", band_offset)?;
        Ok(Self {
            epsilon,
            band_offset,
        })
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn band_offset(&self) -> f64 {
        self.band_offset
    }

    /// `|φ|` at and beyond which the narrow band is exactly zero.
    #[inline]
    pub fn band_reach(&self) -> f64 {
        self.band_offset + self.epsilon
    }

    #[inline]
    pub fn heaviside(&self, phi: f64) -> f64 {
        heaviside(phi, self.epsilon)
    }

    #[inline]
    pub fn dirac(&self, phi: f64) -> f64 {
        dirac(phi, self.epsilon)
    }

    #[inline]
    pub fn dirac_prime(&self, phi: f64) -> f64 {
        dirac_prime(phi, self.epsilon)
    }

    /// `h(φ) = H(φ + l)(1 − H(φ − l))`.
    #[inline]
    pub fn narrow_band(&self, phi: f64) -> f64 {
        if phi.abs() >= self.band_reach() {
            return 0.0;
        }
        let l = self.band_offset;
        heaviside(phi + l, self.epsilon) * (1.0 - heaviside(phi - l, self.epsilon))
    }

    /// `h'(φ) = δ(φ + l)(1 − H(φ − l)) − H(φ + l)δ(φ − l)`.
    #[inline]
    pub fn narrow_band_prime(&self, phi: f64) -> f64 {
        if phi.abs() >= self.band_reach() {
            return 0.0;
        }
        let (l, e) = (self.band_offset, self.epsilon);
        let (h_lo, d_lo) = heaviside_and_dirac(phi + l, e);
        let (h_hi, d_hi) = heaviside_and_dirac(phi - l, e);
        d_lo * (1.0 - h_hi) - h_lo * d_hi
    }

    /// `(δ(φ), δ'(φ))` from one sine–cosine evaluation.
    #[inline]
    pub fn dirac_and_prime(&self, phi: f64) -> (f64, f64) {
        let e = self.epsilon;
        if phi.abs() > e {
            return (0.0, 0.0);
        }
        let (s, c) = libm::sincos(PI * phi / e);
        ((1.0 + c) / (2.0 * e), -PI / (2.0 * e * e) * s)
    }
}

#[inline]
fn heaviside_and_dirac(phi: f64, eps: f64) -> (f64, f64) {
    if phi > eps {
        (1.0, 0.0)
    } else if phi < -eps {
        (0.0, 0.0)
    } else {
        let (s, c) = libm::sincos(PI * phi / eps);
        (0.5 * (1.0 + phi / eps + s / PI), (1.0 + c) / (2.0 * eps))
    }
}

// The scalar kernels below assume ε > 0; RegularizerParams enforces it.

#[inline]
fn heaviside(phi: f64, eps: f64) -> f64 {
    if phi > eps {
        1.0
    } else if phi < -eps {
        0.0
    } else {
        0.5 * (1.0 + phi / eps + libm::sin(PI * phi / eps) / PI)
    }
}

#[inline]
fn dirac(phi: f64, eps: f64) -> f64 {
    if phi.abs() > eps {
        0.0
    } else {
        (1.0 + libm::cos(PI * phi / eps)) / (2.0 * eps)
    }
}

#[inline]
fn dirac_prime(phi: f64, eps: f64) -> f64 {
    if phi.abs() > eps {
        0.0
    } else {
        -PI / (2.0 * eps * eps) * libm::sin(PI * phi / eps)
    }
}

/// Regularized Heaviside; `eps` must be positive.
pub fn heaviside_eps(phi: f64, eps: f64) -> Result<f64> {
    ensure_positive("epsilon", eps)?;
    Ok(heaviside(phi, eps))
}

/// Regularized Dirac delta, the derivative of [`heaviside_eps`].
pub fn dirac_eps(phi: f64, eps: f64) -> Result<f64> {
    ensure_positive("epsilon", eps)?;
    Ok(dirac(phi, eps))
}

pub fn dirac_eps_prime(phi: f64, eps: f64) -> Result<f64> {
    ensure_positive("epsilon", eps)?;
    Ok(dirac_prime(phi, eps))
}

/// Parameters of `g = 1 / (1 + ρ |∇(G_σ * f)|^s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct EdgeParams {
    rho: f64,
    sigma: f64,
    power: u8,
    kernel_radius: usize,
}

impl Default for EdgeParams {
    fn default() -> Self {
        Self::new(10.0, 1.0, 2).expect("default edge parameters are valid")
    }
}

impl EdgeParams {
    /// Kernel radius defaults to `⌈3σ⌉`.
    pub fn new(rho: f64, sigma: f64, power: u8) -> Result<Self> {
        ensure_positive("sigma", sigma)?;
        let radius = libm::ceil(3.0 * sigma) as usize;
        Self::with_radius(rho, sigma, power, radius.max(1))
    }

    pub fn with_radius(rho: f64, sigma: f64, power: u8, kernel_radius: usize) -> Result<Self> {
        ensure_positive("rho", rho)?;
        ensure_positive("sigma", sigma)?;
        if !(power == 1 || power == 2) {
            return Err(Error::InvalidParameter {
                name: "power",
                reason: "must be 1 or 2",
            });
        }
        if (kernel_radius as f64) < libm::ceil(3.0 * sigma) || kernel_radius == 0 {
            return Err(Error::InvalidParameter {
                name: "kernel_radius",
                reason: "must be at least ceil(3 * sigma)",
            });
        }
        Ok(Self {
            rho,
            sigma,
            power,
            kernel_radius,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn power(&self) -> u8 {
        self.power
    }

    pub fn kernel_radius(&self) -> usize {
        self.kernel_radius
    }
}

/// Truncated Gaussian kernel of the given radius, normalized to sum one.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|x| libm::exp(-((x * x) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|x| *x /= total);
    k
}

/// Separable Gaussian blur with replicate padding.
pub fn gaussian_blur(f: &ScalarField, sigma: f64, radius: usize) -> Result<ScalarField> {
    ensure_positive("sigma", sigma)?;
    f.ensure_finite("gaussian_blur input")?;
    let kernel = gaussian_kernel(sigma, radius);
    let r = radius as isize;
    let dims = f.dims();
    let tmp = ScalarField::from_fn(dims, |i, j| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, w)| w * f.get_clamped(i as isize, j as isize + k as isize - r))
            .sum()
    });
    Ok(ScalarField::from_fn(dims, |i, j| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, w)| w * tmp.get_clamped(i as isize + k as isize - r, j as isize))
            .sum()
    }))
}

/// Edge-stopping function `g ∈ (0, 1]`, near zero on strong edges.
///
/// The caller is expected to normalize `f` to `[0, 1]`; `ρ` is calibrated to
/// that range.
pub fn edge_detector(f: &ScalarField, params: &EdgeParams) -> Result<ScalarField> {
    let smooth = gaussian_blur(f, params.sigma, params.kernel_radius)?;
    let g = ScalarField::from_fn(f.dims(), |i, j| {
        let (a, b) = central_diff_at(&smooth, i, j);
        let mag2 = a * a + b * b;
        let grad_s = if params.power == 2 {
            mag2
        } else {
            libm::sqrt(mag2)
        };
        1.0 / (1.0 + params.rho * grad_s)
    });
    Ok(g)
}

/// True when every value lies in `[0, 1]`.
pub fn is_unit_range(f: &ScalarField) -> bool {
    f.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x))
}
