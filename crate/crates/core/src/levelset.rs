//! Signed distance initialization (negative inside).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_positive, Error, Result};
use crate::grid::{GridDims, ScalarField};
use crate::topology::BinaryMask;

/// Pixel-space point as `(row, col)`.
pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum InitSpec {
    Circle {
        center: Point,
        radius: f64,
    },
    /// Axis-aligned box between two opposite corners.
    Rectangle {
        corner_a: Point,
        corner_b: Point,
    },
    UnionOfCircles {
        circles: Vec<(Point, f64)>,
    },
    /// Inside is `{f < level}`: objects are dark on a light background.
    Threshold {
        level: f64,
    },
}

fn in_bounds(dims: GridDims, p: Point) -> bool {
    p.0 >= 0.0 && p.1 >= 0.0 && p.0 <= (dims.rows() - 1) as f64 && p.1 <= (dims.cols() - 1) as f64
}

fn out_of_bounds() -> Error {
    Error::InvalidParameter {
        name: "init",
        reason: "geometry lies outside the image",
    }
}

/// Exact SDF of a disk.
pub fn circle_sdf(dims: GridDims, center: Point, radius: f64) -> ScalarField {
    ScalarField::from_fn(dims, |i, j| {
        libm::hypot(i as f64 - center.0, j as f64 - center.1) - radius
    })
}

/// Exact SDF of an axis-aligned box.
pub fn rectangle_sdf(dims: GridDims, a: Point, b: Point) -> ScalarField {
    let c = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
    let half = (0.5 * (a.0 - b.0).abs(), 0.5 * (a.1 - b.1).abs());
    ScalarField::from_fn(dims, |i, j| {
        let q0 = (i as f64 - c.0).abs() - half.0;
        let q1 = (j as f64 - c.1).abs() - half.1;
        let outside = libm::hypot(q0.max(0.0), q1.max(0.0));
        outside + q0.max(q1).min(0.0)
    })
}

pub fn init_level_set(
    spec: &InitSpec,
    dims: GridDims,
    image: Option<&ScalarField>,
) -> Result<ScalarField> {
    match spec {
        InitSpec::Circle { center, radius } => {
            ensure_positive("radius", *radius)?;
            if !in_bounds(dims, *center) {
                return Err(out_of_bounds());
            }
            Ok(circle_sdf(dims, *center, *radius))
        }
        InitSpec::Rectangle { corner_a, corner_b } => {
            if !in_bounds(dims, *corner_a) || !in_bounds(dims, *corner_b) {
                return Err(out_of_bounds());
            }
            if corner_a.0 == corner_b.0 || corner_a.1 == corner_b.1 {
                return Err(Error::InvalidParameter {
                    name: "init",
                    reason: "rectangle has zero extent",
                });
            }
            Ok(rectangle_sdf(dims, *corner_a, *corner_b))
        }
        InitSpec::UnionOfCircles { circles } => {
            if circles.is_empty() {
                return Err(Error::InvalidParameter {
                    name: "init",
                    reason: "union of circles needs at least one circle",
                });
            }
            let mut out = ScalarField::filled(dims, f64::INFINITY);
            for &(center, radius) in circles {
                ensure_positive("radius", radius)?;
                if !in_bounds(dims, center) {
                    return Err(out_of_bounds());
                }
                let c = circle_sdf(dims, center, radius);
                for (o, v) in out.as_mut_slice().iter_mut().zip(c.as_slice()) {
                    *o = o.min(*v);
                }
            }
            Ok(out)
        }
        InitSpec::Threshold { level } => {
            if !(*level > 0.0 && *level < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "level",
                    reason: "threshold must lie in (0, 1)",
                });
            }
            let image = image.ok_or(Error::InvalidParameter {
                name: "init",
                reason: "threshold initialization needs an image",
            })?;
            dims.ensure_same(image.dims())?;
            let mask = BinaryMask::from_fn(dims, |i, j| image.get(i, j) < *level);
            sdf_from_mask(&mask)
        }
    }
}

/// SDF of a pixel mask: the zero level sits half-way between inside and
/// outside pixel centres.
pub fn sdf_from_mask(mask: &BinaryMask) -> Result<ScalarField> {
    let dims = mask.dims();
    let inside = mask.count();
    if inside == 0 || inside == dims.len() {
        return Err(Error::NoContour);
    }
    let to_inside = squared_distance_to(dims, |k| mask.as_slice()[k]);
    let to_outside = squared_distance_to(dims, |k| !mask.as_slice()[k]);
    let data = (0..dims.len())
        .map(|k| {
            if mask.as_slice()[k] {
                -(libm::sqrt(to_outside[k]) - 0.5)
            } else {
                libm::sqrt(to_inside[k]) - 0.5
            }
        })
        .collect();
    ScalarField::from_vec(dims, data)
}

/// Exact squared Euclidean distance to the nearest pixel where `target`
/// holds (two separable lower-envelope passes).
pub fn squared_distance_to(dims: GridDims, target: impl Fn(usize) -> bool) -> Vec<f64> {
    let (rows, cols) = (dims.rows(), dims.cols());
    let far = ((rows + cols) * (rows + cols)) as f64;
    let mut grid: Vec<f64> = (0..dims.len())
        .map(|k| if target(k) { 0.0 } else { far })
        .collect();
    let n = rows.max(cols);
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for j in 0..cols {
        for i in 0..rows {
            f[i] = grid[i * cols + j];
        }
        lower_envelope(&f[..rows], &mut out[..rows], &mut v, &mut z);
        for i in 0..rows {
            grid[i * cols + j] = out[i];
        }
    }
    for i in 0..rows {
        f[..cols].copy_from_slice(&grid[i * cols..(i + 1) * cols]);
        lower_envelope(&f[..cols], &mut out[..cols], &mut v, &mut z);
        grid[i * cols..(i + 1) * cols].copy_from_slice(&out[..cols]);
    }
    grid
}

fn lower_envelope(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let sq = |q: usize| (q * q) as f64;
    for q in 1..n {
        // f is finite, so s > z[0] and k never underflows
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + sq(q)) - (f[p] + sq(p))) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate().take(n) {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let diff = q as f64 - v[k] as f64;
        *out = diff * diff + f[v[k]];
    }
}
