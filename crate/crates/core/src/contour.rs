//! Zero level line extraction by marching squares.
//!
//! The field is padded with one ring of ghost pixels set to `+1`, so every
//! contour closes, including those of regions touching the frame. Saddle
//! cells are resolved by the sign of the four-corner average.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::ScalarField;
use crate::levelset::Point;

const GHOST: f64 = 1.0;
const NONE: u32 = u32::MAX;

/// A closed polyline in `(row, col)` pixel coordinates. The first vertex is
/// not repeated at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
}

impl Polyline {
    /// Perimeter including the closing segment.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|k| {
                let (a, b) = (self.points[k], self.points[(k + 1) % n]);
                libm::hypot(a.0 - b.0, a.1 - b.1)
            })
            .sum()
    }

    /// Shoelace area; the sign follows the traversal direction.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        0.5 * (0..n)
            .map(|k| {
                let (a, b) = (self.points[k], self.points[(k + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum::<f64>()
    }
}

struct Padded<'a> {
    phi: &'a ScalarField,
    rows: usize,
    cols: usize,
}

impl Padded<'_> {
    /// Value at padded index `(i, j)`; the original grid sits at offset 1.
    fn at(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 || i > self.rows || j > self.cols {
            GHOST
        } else {
            self.phi.get(i - 1, j - 1)
        }
    }
}

/// Crossing point on the segment between padded pixels `a` and `b`.
fn crossing(a: (usize, usize), va: f64, b: (usize, usize), vb: f64) -> Point {
    let t = va / (va - vb);
    let (a0, a1) = (a.0 as f64 - 1.0, a.1 as f64 - 1.0);
    let (b0, b1) = (b.0 as f64 - 1.0, b.1 as f64 - 1.0);
    (a0 + t * (b0 - a0), a1 + t * (b1 - a1))
}

/// Closed polylines of `{φ = 0}` separating `{φ < 0}` from `{φ ≥ 0}`.
pub fn extract_zero_level(phi: &ScalarField) -> Vec<Polyline> {
    let dims = phi.dims();
    let (rows, cols) = (dims.rows(), dims.cols());
    let pad = Padded { phi, rows, cols };
    let (pr, pc) = (rows + 2, cols + 2);
    // horizontal edges (i, j)–(i, j+1) first, then vertical (i, j)–(i+1, j)
    let h_edge = |i: usize, j: usize| (i * (pc - 1) + j) as u32;
    let v_base = pr * (pc - 1);
    let v_edge = |i: usize, j: usize| (v_base + i * pc + j) as u32;
    let n_edges = v_base + (pr - 1) * pc;

    let mut segments: Vec<(u32, u32)> = Vec::new();
    for i in 0..pr - 1 {
        for j in 0..pc - 1 {
            let tl = pad.at(i, j);
            let tr = pad.at(i, j + 1);
            let br = pad.at(i + 1, j + 1);
            let bl = pad.at(i + 1, j);
            let case = (tl < 0.0) as u8
                | ((tr < 0.0) as u8) << 1
                | ((br < 0.0) as u8) << 2
                | ((bl < 0.0) as u8) << 3;
            let top = h_edge(i, j);
            let bottom = h_edge(i + 1, j);
            let left = v_edge(i, j);
            let right = v_edge(i, j + 1);
            let centre_inside = tl + tr + br + bl < 0.0;
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, top)),
                2 | 13 => segments.push((top, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, bottom)),
                6 | 9 => segments.push((top, bottom)),
                7 | 8 => segments.push((left, bottom)),
                5 => {
                    if centre_inside {
                        segments.push((top, right));
                        segments.push((bottom, left));
                    } else {
                        segments.push((left, top));
                        segments.push((right, bottom));
                    }
                }
                10 => {
                    if centre_inside {
                        segments.push((left, top));
                        segments.push((right, bottom));
                    } else {
                        segments.push((top, right));
                        segments.push((bottom, left));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    if segments.is_empty() {
        return Vec::new();
    }

    // each crossed edge is shared by exactly two segments
    let mut owners = vec![[NONE; 2]; n_edges];
    for (s, &(a, b)) in segments.iter().enumerate() {
        for e in [a, b] {
            let slot = &mut owners[e as usize];
            if slot[0] == NONE {
                slot[0] = s as u32;
            } else {
                slot[1] = s as u32;
            }
        }
    }
    let point_on = |e: u32| -> Point {
        let e = e as usize;
        let (a, b) = if e < v_base {
            let (i, j) = (e / (pc - 1), e % (pc - 1));
            ((i, j), (i, j + 1))
        } else {
            let k = e - v_base;
            let (i, j) = (k / pc, k % pc);
            ((i, j), (i + 1, j))
        };
        crossing(a, pad.at(a.0, a.1), b, pad.at(b.0, b.1))
    };

    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        let mut points = Vec::new();
        let (first, mut edge) = segments[start];
        let mut seg = start;
        used[seg] = true;
        points.push(point_on(first));
        while edge != first {
            points.push(point_on(edge));
            let [s0, s1] = owners[edge as usize];
            seg = if s0 as usize == seg { s1 } else { s0 } as usize;
            used[seg] = true;
            let (a, b) = segments[seg];
            edge = if a == edge { b } else { a };
        }
        out.push(Polyline { points });
    }
    out
}
