use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("genus mismatch: expected {expected}, found {found}")]
    GenusMismatch { expected: usize, found: usize },
    #[error("invalid characteristic: {0}")]
    InvalidCharacteristic(String),
    #[error("characteristic {0} is even; its gradient at the origin vanishes identically")]
    EvenCharacteristic(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "not in the Siegel upper half-space: symmetry defect {defect:e}, smallest eigenvalue of Im tau {min_eigenvalue:e}"
    )]
    NotSiegel { defect: f64, min_eigenvalue: f64 },
    #[error("series tolerance {tol:e} not reachable within radius {max_radius}")]
    ToleranceUnachievable { tol: f64, max_radius: usize },
    #[error("quadrature on [{a}, {b}] did not converge (last change {change:e})")]
    QuadratureNonConvergence { a: f64, b: f64, change: f64 },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("vanishing quantity: {0}")]
    Vanishing(String),
}

impl Error {
    /// True for errors caused by malformed input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidCurve(_)
                | Error::InvalidPartition(_)
                | Error::IndexOutOfRange { .. }
                | Error::GenusMismatch { .. }
                | Error::InvalidCharacteristic(_)
                | Error::EvenCharacteristic(_)
                | Error::InvalidArgument(_)
        )
    }
}
