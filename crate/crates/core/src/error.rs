use thiserror::Error;

/// Errors raised by the numeric kernels and the schema layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received data violating its contract.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An exponential would overflow; carries the real part of the exponent.
    #[error("range error: exponent real part {exponent_re} exceeds the representable range")]
    Range { exponent_re: f64 },

    /// The circle quadrature kept hitting a zero of the integrand.
    #[error("singular node on |z| = {radius} persisted after {rotations} grid rotations")]
    SingularNode { radius: f64, rotations: usize },

    /// An adaptive scheme exhausted its refinement budget.
    #[error("{op} did not converge: {detail}")]
    NonConvergence { op: &'static str, detail: String },

    /// Input is well formed but carries no usable information (all-zero, single point, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A quantity that requires f(0) != 0 was requested for a function vanishing at the origin.
    #[error("function vanishes at the origin (multiplicity {0})")]
    OriginZero(u32),

    /// A zero of the function sits on the integration contour.
    #[error("zero on contour: {0}")]
    ZeroOnContour(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        !matches!(self, Error::Invalid(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
