//! Synthetic test images: dark shapes on a light background, lightly
//! blurred so the edge detector sees a finite-width edge.

use alloc::vec::Vec;

use crate::error::Result;
use crate::grid::{GridDims, ScalarField};
use crate::levelset::Point;
use crate::regularize::gaussian_blur;

pub const FOREGROUND: f64 = 0.2;
pub const BACKGROUND: f64 = 0.9;
pub const BLUR_SIGMA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disk {
        center: Point,
        radius: f64,
    },
    /// Segment `a`–`b` thickened by `radius`.
    Capsule {
        a: Point,
        b: Point,
        radius: f64,
    },
    /// Axis-aligned box between two corners.
    Rect {
        min: Point,
        max: Point,
    },
    Ellipse {
        center: Point,
        semi_axes: (f64, f64),
    },
}

impl Shape {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Shape::Disk { center, radius } => libm::hypot(p.0 - center.0, p.1 - center.1) <= radius,
            Shape::Capsule { a, b, radius } => {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len2 = dx * dx + dy * dy;
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
                };
                libm::hypot(p.0 - a.0 - t * dx, p.1 - a.1 - t * dy) <= radius
            }
            Shape::Rect { min, max } => {
                p.0 >= min.0 && p.0 <= max.0 && p.1 >= min.1 && p.1 <= max.1
            }
            Shape::Ellipse { center, semi_axes } => {
                let u = (p.0 - center.0) / semi_axes.0;
                let v = (p.1 - center.1) / semi_axes.1;
                u * u + v * v <= 1.0
            }
        }
    }
}

/// Unblurred two-level image of the union of `shapes`.
pub fn render(dims: GridDims, shapes: &[Shape]) -> ScalarField {
    ScalarField::from_fn(dims, |i, j| {
        let p = (i as f64, j as f64);
        if shapes.iter().any(|s| s.contains(p)) {
            FOREGROUND
        } else {
            BACKGROUND
        }
    })
}

/// [`render`] followed by the standard blur.
pub fn render_blurred(dims: GridDims, shapes: &[Shape]) -> Result<ScalarField> {
    gaussian_blur(&render(dims, shapes), BLUR_SIGMA, 2)
}

pub fn two_circles(dims: GridDims, centers: [Point; 2], radii: [f64; 2]) -> Result<ScalarField> {
    render_blurred(
        dims,
        &[
            Shape::Disk {
                center: centers[0],
                radius: radii[0],
            },
            Shape::Disk {
                center: centers[1],
                radius: radii[1],
            },
        ],
    )
}

/// Two congruent disks side by side on a 128×128 canvas, 4 px apart.
pub fn two_circles_default() -> ScalarField {
    let (centers, radii) = two_circles_layout();
    two_circles(GridDims::new(128, 128).expect("valid dims"), centers, radii)
        .expect("fixed layout is valid")
}

/// Centres sit half a pixel off the grid so the gap is symmetric about the
/// column line `j = 64.5`.
pub fn two_circles_layout() -> ([Point; 2], [f64; 2]) {
    ([(64.0, 40.5), (64.0, 88.5)], [22.0, 22.0])
}

/// Palm with four fingers pointing up, narrow gaps between the fingers.
pub fn hand_shapes() -> Vec<Shape> {
    let mut shapes = alloc::vec![Shape::Rect {
        min: (78.0, 30.0),
        max: (112.0, 98.0),
    }];
    for k in 0..4 {
        let col = 38.0 + 17.33 * k as f64;
        let tip = if k == 1 || k == 2 { 22.0 } else { 32.0 };
        shapes.push(Shape::Capsule {
            a: (tip, col),
            b: (90.0, col),
            radius: 6.5,
        });
    }
    shapes
}

pub fn hand() -> ScalarField {
    render_blurred(GridDims::new(128, 128).expect("valid dims"), &hand_shapes())
        .expect("fixed layout is valid")
}

/// Ellipses on a jittered lattice, for cell- and grain-like scenes.
pub fn blob_shapes(dims: GridDims, per_side: usize) -> Vec<Shape> {
    let cell_r = dims.rows() as f64 / per_side as f64;
    let cell_c = dims.cols() as f64 / per_side as f64;
    let mut shapes = Vec::new();
    for a in 0..per_side {
        for b in 0..per_side {
            let k = (a * per_side + b) as f64;
            // deterministic jitter in (−0.15, 0.15) of a cell
            let jr = 0.15 * libm::sin(12.9898 * k + 1.0);
            let jc = 0.15 * libm::cos(78.233 * k + 2.0);
            let center = (
                (a as f64 + 0.5 + jr) * cell_r,
                (b as f64 + 0.5 + jc) * cell_c,
            );
            let s = 0.22 + 0.06 * libm::sin(3.7 * k);
            let t = 0.22 + 0.06 * libm::cos(5.3 * k);
            shapes.push(Shape::Ellipse {
                center,
                semi_axes: (s * cell_r, t * cell_c),
            });
        }
    }
    shapes
}

pub fn blobs(dims: GridDims, per_side: usize) -> Result<ScalarField> {
    render_blurred(dims, &blob_shapes(dims, per_side))
}
