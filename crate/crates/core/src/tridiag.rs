//! Tridiagonal systems and the Thomas algorithm.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `sub[i]` couples row `i + 1` to column `i`; `sup[i]` couples row `i` to
/// column `i + 1`. Both have length `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.diag.len();
        let off = n.saturating_sub(1);
        if self.sub.len() != off {
            return Err(Error::BadLength {
                expected: off,
                found: self.sub.len(),
            });
        }
        if self.sup.len() != off {
            return Err(Error::BadLength {
                expected: off,
                found: self.sup.len(),
            });
        }
        if self.rhs.len() != n {
            return Err(Error::BadLength {
                expected: n,
                found: self.rhs.len(),
            });
        }
        Ok(())
    }

    /// Weak row diagonal dominance, `|d_i| ≥ |l_i| + |u_i|`.
    pub fn check_dominance(&self) -> Result<()> {
        let n = self.diag.len();
        for i in 0..n {
            let lower = if i > 0 { self.sub[i - 1].abs() } else { 0.0 };
            let upper = if i + 1 < n { self.sup[i].abs() } else { 0.0 };
            if self.diag[i].abs() < lower + upper {
                return Err(Error::NotDiagonallyDominant { row: i });
            }
        }
        Ok(())
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Solves the system after checking its shape and diagonal dominance.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    sys.check_shape()?;
    sys.check_dominance()?;
    let mut x = sys.rhs.clone();
    let mut scratch = vec![0.0; sys.len()];
    solve_in_place(&sys.sub, &sys.diag, &sys.sup, &mut x, &mut scratch)?;
    Ok(x)
}

/// Thomas algorithm overwriting `rhs` with the solution. `scratch` holds the
/// modified super-diagonal and must be at least as long as `diag`.
pub fn solve_in_place(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    // LR decomposition fused with forward substitution
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::Singular { row: 0 });
    }
    if n > 1 {
        scratch[0] = sup[0] / pivot;
    }
    rhs[0] /= pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i - 1] * scratch[i - 1];
        if pivot == 0.0 {
            return Err(Error::Singular { row: i });
        }
        if i + 1 < n {
            scratch[i] = sup[i] / pivot;
        }
        rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / pivot;
    }
    // backward substitution
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let sys = TridiagonalSystem {
            sub: vec![0.0; 4],
            diag: vec![1.0; 5],
            sup: vec![0.0; 4],
            rhs: vec![1.0, -2.0, 3.5, 0.0, 7.0],
        };
        assert_eq!(thomas_solve(&sys).unwrap(), sys.rhs);
    }

    #[test]
    fn rejects_non_dominant_and_bad_shapes() {
        let sys = TridiagonalSystem {
            sub: vec![2.0],
            diag: vec![1.0, 1.0],
            sup: vec![0.0],
            rhs: vec![1.0, 1.0],
        };
        assert_eq!(
            thomas_solve(&sys),
            Err(Error::NotDiagonallyDominant { row: 1 })
        );
        let bad = TridiagonalSystem {
            sub: vec![0.0],
            diag: vec![1.0, 1.0, 1.0],
            sup: vec![0.0, 0.0],
            rhs: vec![1.0; 3],
        };
        assert!(matches!(thomas_solve(&bad), Err(Error::BadLength { .. })));
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut scratch = [0.0; 2];
        let mut rhs = [1.0, 1.0];
        assert_eq!(
            solve_in_place(&[1.0], &[1.0, 1.0], &[1.0], &mut rhs, &mut scratch),
            Err(Error::Singular { row: 1 })
        );
    }
}
