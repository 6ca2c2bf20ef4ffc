//! Dense 2D fields and first-order finite-difference stencils.
//!
//! Pixels are addressed `(i, j)` with `i` the row in `0..rows` and `j` the
//! column in `0..cols`, stored row-major. There is no ghost layer: the
//! stencils replicate edge values, which makes the forward gradient zero
//! across the far edge. The backward divergence is built as the exact
//! negative adjoint of that gradient, so `div(grad φ)` is the replicated
//! 5-point Laplacian everywhere.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridDims {
    rows: usize,
    cols: usize,
}

impl GridDims {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 3 || cols < 3 {
            return Err(Error::InvalidDims { rows, cols });
        }
        Ok(Self { rows, cols })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    /// Euclidean length of the grid diagonal.
    pub fn diameter(&self) -> f64 {
        libm::hypot(self.rows as f64, self.cols as f64)
    }

    pub(crate) fn ensure_same(&self, other: GridDims) -> Result<()> {
        if *self == other {
            Ok(())
        } else {
            Err(Error::DimsMismatch {
                expected: (self.rows, self.cols),
                found: (other.rows, other.cols),
            })
        }
    }
}

/// Real value per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    dims: GridDims,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(dims: GridDims) -> Self {
        Self::filled(dims, 0.0)
    }

    pub fn filled(dims: GridDims, value: f64) -> Self {
        Self {
            dims,
            data: vec![value; dims.len()],
        }
    }

    pub fn from_vec(dims: GridDims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::BadLength {
                expected: dims.len(),
                found: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn from_fn(dims: GridDims, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for i in 0..dims.rows {
            for j in 0..dims.cols {
                data.push(f(i, j));
            }
        }
        Self { dims, data }
    }

    #[inline]
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.dims.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.dims.index(i, j);
        self.data[k] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub(crate) fn ensure_finite(&self, stage: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { stage })
        }
    }

    /// Frobenius norm.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum::<f64>())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// Pixel-wise inner product.
    pub fn dot(&self, other: &ScalarField) -> Result<f64> {
        self.dims.ensure_same(other.dims)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// Value at `(i + di, j + dj)` with indices clamped into the grid.
    #[inline]
    pub fn get_clamped(&self, i: isize, j: isize) -> f64 {
        let r = i.clamp(0, self.dims.rows as isize - 1) as usize;
        let c = j.clamp(0, self.dims.cols as isize - 1) as usize;
        self.data[r * self.dims.cols + c]
    }
}

/// Two real channels per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    dims: GridDims,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

impl VectorField2 {
    pub fn zeros(dims: GridDims) -> Self {
        Self {
            dims,
            c1: vec![0.0; dims.len()],
            c2: vec![0.0; dims.len()],
        }
    }

    pub fn from_channels(dims: GridDims, c1: Vec<f64>, c2: Vec<f64>) -> Result<Self> {
        for c in [&c1, &c2] {
            if c.len() != dims.len() {
                return Err(Error::BadLength {
                    expected: dims.len(),
                    found: c.len(),
                });
            }
        }
        Ok(Self { dims, c1, c2 })
    }

    pub fn from_fn(dims: GridDims, mut f: impl FnMut(usize, usize) -> (f64, f64)) -> Self {
        let mut out = Self::zeros(dims);
        for i in 0..dims.rows {
            for j in 0..dims.cols {
                let (a, b) = f(i, j);
                let k = dims.index(i, j);
                out.c1[k] = a;
                out.c2[k] = b;
            }
        }
        out
    }

    #[inline]
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        let k = self.dims.index(i, j);
        (self.c1[k], self.c2[k])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: (f64, f64)) {
        let k = self.dims.index(i, j);
        self.c1[k] = value.0;
        self.c2[k] = value.1;
    }

    /// Row-direction component.
    #[inline]
    pub fn channel1(&self) -> &[f64] {
        &self.c1
    }

    /// Column-direction component.
    #[inline]
    pub fn channel2(&self) -> &[f64] {
        &self.c2
    }

    #[inline]
    pub fn channels_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.c1, &mut self.c2)
    }

    pub fn is_finite(&self) -> bool {
        self.c1.iter().chain(&self.c2).all(|x| x.is_finite())
    }

    /// Pixel-wise Euclidean norm.
    pub fn magnitude(&self) -> ScalarField {
        ScalarField {
            dims: self.dims,
            data: self
                .c1
                .iter()
                .zip(&self.c2)
                .map(|(a, b)| libm::hypot(*a, *b))
                .collect(),
        }
    }

    /// Sum over pixels of the pixel-wise dot product.
    pub fn dot(&self, other: &VectorField2) -> Result<f64> {
        self.dims.ensure_same(other.dims)?;
        let s1: f64 = self.c1.iter().zip(&other.c1).map(|(a, b)| a * b).sum();
        let s2: f64 = self.c2.iter().zip(&other.c2).map(|(a, b)| a * b).sum();
        Ok(s1 + s2)
    }

    /// Largest channel magnitude.
    pub fn max_abs(&self) -> f64 {
        self.c1
            .iter()
            .chain(&self.c2)
            .fold(0.0, |m, x| f64::max(m, x.abs()))
    }
}

/// Forward difference at one pixel; zero across the far edge.
#[inline]
pub fn forward_diff_at(phi: &[f64], dims: GridDims, i: usize, j: usize) -> (f64, f64) {
    let k = i * dims.cols + j;
    let here = phi[k];
    let di = if i + 1 < dims.rows {
        phi[k + dims.cols] - here
    } else {
        0.0
    };
    let dj = if j + 1 < dims.cols {
        phi[k + 1] - here
    } else {
        0.0
    };
    (di, dj)
}

/// Backward-difference divergence at one pixel, the negative adjoint of
/// [`forward_diff_at`].
#[inline]
pub fn backward_div_at(u1: &[f64], u2: &[f64], dims: GridDims, i: usize, j: usize) -> f64 {
    let k = i * dims.cols + j;
    let last_row = i + 1 == dims.rows;
    let last_col = j + 1 == dims.cols;
    let here1 = if last_row { 0.0 } else { u1[k] };
    let prev1 = if i == 0 { 0.0 } else { u1[k - dims.cols] };
    let here2 = if last_col { 0.0 } else { u2[k] };
    let prev2 = if j == 0 { 0.0 } else { u2[k - 1] };
    (here1 - prev1) + (here2 - prev2)
}

/// Central-difference gradient at one pixel with replicated edges.
#[inline]
pub fn central_diff_at(phi: &ScalarField, i: usize, j: usize) -> (f64, f64) {
    let (i, j) = (i as isize, j as isize);
    (
        0.5 * (phi.get_clamped(i + 1, j) - phi.get_clamped(i - 1, j)),
        0.5 * (phi.get_clamped(i, j + 1) - phi.get_clamped(i, j - 1)),
    )
}

pub fn gradient_forward(phi: &ScalarField) -> Result<VectorField2> {
    phi.ensure_finite("gradient_forward input")?;
    let dims = phi.dims;
    let mut out = VectorField2::zeros(dims);
    for i in 0..dims.rows {
        for j in 0..dims.cols {
            let (a, b) = forward_diff_at(&phi.data, dims, i, j);
            let k = dims.index(i, j);
            out.c1[k] = a;
            out.c2[k] = b;
        }
    }
    Ok(out)
}

pub fn divergence_backward(u: &VectorField2) -> Result<ScalarField> {
    if !u.is_finite() {
        return Err(Error::NonFinite {
            stage: "divergence_backward input",
        });
    }
    let dims = u.dims;
    Ok(ScalarField::from_fn(dims, |i, j| {
        backward_div_at(&u.c1, &u.c2, dims, i, j)
    }))
}

/// 5-point Laplacian with replicated (homogeneous Neumann) edges.
pub fn laplacian(phi: &ScalarField) -> Result<ScalarField> {
    phi.ensure_finite("laplacian input")?;
    Ok(ScalarField::from_fn(phi.dims, |i, j| {
        let (i, j) = (i as isize, j as isize);
        phi.get_clamped(i - 1, j)
            + phi.get_clamped(i + 1, j)
            + phi.get_clamped(i, j - 1)
            + phi.get_clamped(i, j + 1)
            - 4.0 * phi.get_clamped(i, j)
    }))
}

/// Magnitude of the central-difference gradient.
pub fn gradient_central_magnitude(phi: &ScalarField) -> ScalarField {
    ScalarField::from_fn(phi.dims, |i, j| {
        let (a, b) = central_diff_at(phi, i, j);
        libm::hypot(a, b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn dims(r: usize, c: usize) -> GridDims {
        GridDims::new(r, c).unwrap()
    }

    fn random_field(rng: &mut StdRng, d: GridDims) -> ScalarField {
        ScalarField::from_fn(d, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn rejects_small_grids() {
        assert!(GridDims::new(2, 5).is_err());
        assert!(GridDims::new(3, 3).is_ok());
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let phi = ScalarField::filled(dims(3, 3), 5.0);
        let g = gradient_forward(&phi).unwrap();
        assert!(g.channel1().iter().chain(g.channel2()).all(|&x| x == 0.0));
        assert!(laplacian(&phi)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&x| x == 0.0));
    }

    #[test]
    fn linear_field_gradient() {
        let d = dims(5, 4);
        let phi = ScalarField::from_fn(d, |i, _| i as f64);
        let g = gradient_forward(&phi).unwrap();
        for i in 0..5 {
            for j in 0..4 {
                let (a, b) = g.get(i, j);
                assert_eq!(a, if i < 4 { 1.0 } else { 0.0 });
                assert_eq!(b, 0.0);
            }
        }
        let div = divergence_backward(&g).unwrap();
        for i in 1..4 {
            for j in 1..3 {
                assert_eq!(div.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn quadratic_field_laplacian_is_two() {
        let d = dims(6, 6);
        let phi = ScalarField::from_fn(d, |i, _| (i * i) as f64);
        let lap = laplacian(&phi).unwrap();
        for i in 1..5 {
            for j in 1..5 {
                assert_eq!(lap.get(i, j), 2.0);
            }
        }
    }

    #[test]
    fn zero_divergence() {
        let u = VectorField2::zeros(dims(4, 4));
        assert!(divergence_backward(&u)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_non_finite() {
        let mut phi = ScalarField::zeros(dims(3, 3));
        phi.set(1, 1, f64::NAN);
        assert!(matches!(
            gradient_forward(&phi),
            Err(Error::NonFinite { .. })
        ));
        assert!(laplacian(&phi).is_err());
    }

    #[test]
    fn adjointness_on_random_fields() {
        let mut rng = StdRng::seed_from_u64(7);
        for (r, c) in [(4, 4), (3, 7), (9, 5)] {
            let d = dims(r, c);
            let phi = random_field(&mut rng, d);
            let v = VectorField2::from_fn(d, |_, _| {
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            // brute-force inner products
            let grad = gradient_forward(&phi).unwrap();
            let mut lhs = 0.0;
            for i in 0..r {
                for j in 0..c {
                    let (a, b) = grad.get(i, j);
                    let (p, q) = v.get(i, j);
                    lhs += a * p + b * q;
                }
            }
            let div = divergence_backward(&v).unwrap();
            let mut rhs = 0.0;
            for i in 0..r {
                for j in 0..c {
                    rhs -= phi.get(i, j) * div.get(i, j);
                }
            }
            assert!(
                (lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs()),
                "{lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn divergence_of_gradient_is_laplacian_everywhere() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in [4, 6] {
            let phi = random_field(&mut rng, dims(n, n));
            let composed = divergence_backward(&gradient_forward(&phi).unwrap()).unwrap();
            let lap = laplacian(&phi).unwrap();
            for (a, b) in composed.as_slice().iter().zip(lap.as_slice()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn repeated_calls_are_identical() {
        let mut rng = StdRng::seed_from_u64(3);
        let phi = random_field(&mut rng, dims(5, 5));
        assert_eq!(gradient_forward(&phi), gradient_forward(&phi));
        assert_eq!(laplacian(&phi), laplacian(&phi));
    }
}
