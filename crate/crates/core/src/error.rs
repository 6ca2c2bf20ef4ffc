use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grids need at least 3×3 pixels.
    InvalidDims {
        rows: usize,
        cols: usize,
    },
    /// Two fields that must share a grid do not.
    DimsMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// Buffer length does not equal `rows * cols`.
    BadLength {
        expected: usize,
        found: usize,
    },
    NonFinite {
        stage: &'static str,
    },
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Zero pivot in a tridiagonal solve.
    Singular {
        row: usize,
    },
    NotDiagonallyDominant {
        row: usize,
    },
    /// `‖φ‖∞` exceeded the divergence threshold.
    Unstable {
        iteration: usize,
        sweep: usize,
        sup_norm: f64,
    },
    /// A threshold mask was empty or covered the whole image.
    NoContour,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDims { rows, cols } => {
                write!(f, "grid must be at least 3x3, got {rows}x{cols}")
            }
            Error::DimsMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::BadLength { expected, found } => {
                write!(f, "buffer length {found} does not match grid size {expected}")
            }
            Error::NonFinite { stage } => write!(f, "non-finite value in {stage}"),
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::Singular { row } => write!(f, "zero pivot at row {row}"),
            Error::NotDiagonallyDominant { row } => {
                write!(f, "tridiagonal system is not diagonally dominant at row {row}")
            }
            Error::Unstable {
                iteration,
                sweep,
                sup_norm,
            } => write!(
                f,
                "level set diverged at iteration {iteration}, sweep {sweep} (|phi|_inf = {sup_norm:.3e}); \
                 try a smaller time step"
            ),
            Error::NoContour => write!(f, "mask is empty or full, no contour exists"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be non-negative and finite",
        })
    }
}
