//! Binary masks, connected-component counts and overlap.

use alloc::vec::Vec;

use crate::error::Result;
use crate::grid::{GridDims, ScalarField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    dims: GridDims,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn from_fn(dims: GridDims, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for i in 0..dims.rows() {
            for j in 0..dims.cols() {
                data.push(f(i, j));
            }
        }
        Self { dims, data }
    }

    /// Inside of the level set, `{φ < 0}`.
    pub fn inside(phi: &ScalarField) -> Self {
        Self {
            dims: phi.dims(),
            data: phi.as_slice().iter().map(|&x| x < 0.0).collect(),
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&x| !x).collect(),
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[self.dims.index(i, j)]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    /// Number of set pixels.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&x| x).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Number of connected components of the set pixels.
///
/// Raster scan with union-find over the already visited neighbours.
pub fn count_regions(mask: &BinaryMask, connectivity: Connectivity) -> usize {
    let (rows, cols) = (mask.dims.rows(), mask.dims.cols());
    let mut parent: Vec<u32> = (0..mask.data.len() as u32).collect();
    let on = |i: usize, j: usize| mask.data[i * cols + j];
    for i in 0..rows {
        for j in 0..cols {
            if !on(i, j) {
                continue;
            }
            let k = (i * cols + j) as u32;
            if j > 0 && on(i, j - 1) {
                union(&mut parent, k, k - 1);
            }
            if i > 0 && on(i - 1, j) {
                union(&mut parent, k, k - cols as u32);
            }
            if connectivity == Connectivity::Eight && i > 0 {
                if j > 0 && on(i - 1, j - 1) {
                    union(&mut parent, k, k - cols as u32 - 1);
                }
                if j + 1 < cols && on(i - 1, j + 1) {
                    union(&mut parent, k, k - cols as u32 + 1);
                }
            }
        }
    }
    (0..mask.data.len() as u32)
        .filter(|&k| mask.data[k as usize] && find(&mut parent, k) == k)
        .count()
}

/// Intersection over union; 1 when both masks are empty.
pub fn jaccard(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    a.dims.ensure_same(b.dims)?;
    let (mut inter, mut uni) = (0usize, 0usize);
    for (&x, &y) in a.data.iter().zip(&b.data) {
        inter += (x && y) as usize;
        uni += (x || y) as usize;
    }
    Ok(if uni == 0 {
        1.0
    } else {
        inter as f64 / uni as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(d: GridDims, c: (f64, f64), r: f64) -> impl Fn(usize, usize) -> bool {
        move |i, j| {
            let _ = d;
            libm::hypot(i as f64 - c.0, j as f64 - c.1) <= r
        }
    }

    #[test]
    fn disks() {
        let d = GridDims::new(40, 40).unwrap();
        let one = disk(d, (20.0, 20.0), 8.0);
        let m = BinaryMask::from_fn(d, &one);
        assert_eq!(count_regions(&m, Connectivity::Four), 1);
        let a = disk(d, (10.0, 10.0), 5.0);
        let b = disk(d, (28.0, 28.0), 6.0);
        let m2 = BinaryMask::from_fn(d, |i, j| a(i, j) || b(i, j));
        assert_eq!(count_regions(&m2, Connectivity::Four), 2);
        assert_eq!(count_regions(&m2.complement(), Connectivity::Eight), 1);
    }

    #[test]
    fn diagonal_touch_depends_on_connectivity() {
        let d = GridDims::new(4, 4).unwrap();
        let m = BinaryMask::from_fn(d, |i, j| (i, j) == (1, 1) || (i, j) == (2, 2));
        assert_eq!(count_regions(&m, Connectivity::Four), 2);
        assert_eq!(count_regions(&m, Connectivity::Eight), 1);
    }

    #[test]
    fn u_shape_needs_union_of_labels() {
        // two arms that only join on the last row
        let d = GridDims::new(5, 5).unwrap();
        let m = BinaryMask::from_fn(d, |i, j| j == 0 || j == 4 || i == 4);
        assert_eq!(count_regions(&m, Connectivity::Four), 1);
    }

    #[test]
    fn jaccard_values() {
        let d = GridDims::new(30, 30).unwrap();
        let a = BinaryMask::from_fn(d, |i, j| i < 10 && j < 10);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        let far = BinaryMask::from_fn(d, |i, j| i >= 20 && j >= 20);
        assert_eq!(jaccard(&a, &far).unwrap(), 0.0);
        // squares overlapping in a 10×5 strip
        let b = BinaryMask::from_fn(d, |i, j| i < 10 && (5..15).contains(&j));
        assert!((jaccard(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let empty = BinaryMask::from_fn(d, |_, _| false);
        assert_eq!(jaccard(&empty, &empty).unwrap(), 1.0);
    }
}
