use thiserror::Error;

/// Errors raised across the crate.
///
/// Every variant maps onto one of the CLI exit classes through [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature exceeded maximum depth {depth} on [{a}, {b}] (error estimate {estimate:e})")]
    MaxDepthExceeded { depth: usize, a: f64, b: f64, estimate: f64 },

    #[error("non-finite integrand sample at parameter {at}")]
    NonFiniteSample { at: f64 },

    #[error("singular Jacobian (condition number {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("points {i} and {j} coincide")]
    CoincidentPoints { i: usize, j: usize },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("branch point on path near {re}{im:+}i")]
    BranchPointOnPath { re: f64, im: f64 },

    #[error("pole on path near {re}{im:+}i")]
    PoleOnPath { re: f64, im: f64 },

    #[error("pole evaluation at {re}{im:+}i")]
    PoleEvaluation { re: f64, im: f64 },

    #[error("gradient is not subunit: |2u_z| = {modulus} at {re}{im:+}i")]
    NotSubunitGradient { modulus: f64, re: f64, im: f64 },

    #[error("non-finite graph gradient at {re}{im:+}i")]
    NonFiniteGradient { re: f64, im: f64 },

    #[error("Gauss map not expanding: |g| = {modulus} at {re}{im:+}i")]
    NotExpanding { modulus: f64, re: f64, im: f64 },

    #[error("circulation has imaginary part {imag:e}")]
    NonRealCirculation { imag: f64 },

    #[error("boundary components merged: {0}")]
    ComponentsMerged(String),

    #[error("unclassifiable: case (a) residual {case_a:e}, case (b) residual {case_b:e}")]
    Unclassifiable { case_a: f64, case_b: f64 },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: 2 input, 3 solver, 4 geometry.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CoincidentPoints { .. }
            | Error::ParameterOutOfRange(_)
            | Error::InvalidInput(_)
            | Error::Io(_) => 2,
            Error::MaxDepthExceeded { .. }
            | Error::NonFiniteSample { .. }
            | Error::SingularJacobian { .. }
            | Error::NoConvergence { .. } => 3,
            _ => 4,
        }
    }

    pub(crate) fn pole_at(z: num_complex::Complex64) -> Self {
        Error::PoleOnPath { re: z.re, im: z.im }
    }

    pub(crate) fn branch_at(z: num_complex::Complex64) -> Self {
        Error::BranchPointOnPath { re: z.re, im: z.im }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
