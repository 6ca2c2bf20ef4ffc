//! Time-stepping schemes for the self-repelling snake.

pub mod aos;
pub mod poisson;
pub mod splitbregman;

use crate::error::{Error, Result};

/// Why a solver loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Termination {
    /// The relative `φ` change fell below the outer tolerance.
    Converged,
    /// The iteration cap was reached first.
    IterationCap,
}

/// `‖a − b‖ / (‖b‖ + 1e-6)`.
pub(crate) fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (&a, &b) in new.iter().zip(old) {
        diff += (a - b) * (a - b);
        norm += b * b;
    }
    libm::sqrt(diff) / (libm::sqrt(norm) + 1e-6)
}

/// Fails when `φ` left the divergence bound or stopped being finite.
pub(crate) fn check_stability(
    phi: &[f64],
    limit: f64,
    iteration: usize,
    sweep: usize,
) -> Result<()> {
    let mut sup = 0.0f64;
    for &x in phi {
        if x.is_nan() {
            sup = f64::NAN;
            break;
        }
        sup = sup.max(x.abs());
    }
    if !(sup <= limit) {
        return Err(Error::Unstable {
            iteration,
            sweep,
            sup_norm: sup,
        });
    }
    Ok(())
}
