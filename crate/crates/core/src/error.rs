use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Root-location triple carried by errors that still want to report counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct RootCounts {
    pub inside: usize,
    pub unimodular: usize,
    pub outside: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("exponent {0} exceeds the per-variable cap of 1000000")]
    ExponentOverflow(u64),

    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeOverflow { degree: u64, cap: u64 },

    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root solver did not converge (worst backward error {worst_residual:e})")]
    NonConvergence { worst_residual: f64 },

    #[error(
        "polynomial has {} unimodular roots (inside {}, outside {})",
        .0.unimodular, .0.inside, .0.outside
    )]
    UnimodularRoots(RootCounts),

    #[error("polynomial vanishes on the contour near t = {t}")]
    ZeroOnContour { t: f64 },

    #[error("winding integral did not lock onto an integer within {nodes} nodes (last value {re}{im:+}i)")]
    WindingCap { re: f64, im: f64, nodes: usize },

    #[error("discarded {fraction:.4} of samples, above the budget of {limit}")]
    DiscardBudget { fraction: f64, limit: f64 },

    #[error("slice polynomial is numerically zero at an outer torus point")]
    SliceZero,
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax_error",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::ExponentOverflow(_) => "exponent_overflow",
            Error::DegreeOverflow { .. } => "degree_overflow",
            Error::ZeroPolynomial => "zero_polynomial",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonConvergence { .. } => "non_convergence",
            Error::UnimodularRoots(_) => "unimodular_roots",
            Error::ZeroOnContour { .. } => "zero_on_contour",
            Error::WindingCap { .. } => "winding_cap",
            Error::DiscardBudget { .. } => "discard_budget",
            Error::SliceZero => "slice_zero",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnknownVariable(_)
            | Error::ExponentOverflow(_)
            | Error::DegreeOverflow { .. }
            | Error::ZeroPolynomial
            | Error::InvalidArgument(_) => 2,
            Error::UnimodularRoots(_) => 4,
            Error::NonConvergence { .. }
            | Error::ZeroOnContour { .. }
            | Error::WindingCap { .. }
            | Error::DiscardBudget { .. }
            | Error::SliceZero => 3,
        }
    }
}
