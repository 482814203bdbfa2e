use thiserror::Error;

/// Errors raised by the tunneling-splitting library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Parameters fall outside the regime where the semiclassical formulas apply.
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    /// The potential violates an assumption of the formulas (e.g. unequal well curvatures).
    #[error("model assumption violated: {0}")]
    ModelAssumption(String),
    /// The potential does not have the min/max/min double-well shape.
    #[error("potential shape: {0}")]
    Shape(String),
    #[error("outside evaluation domain: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("not a barrier: {0}")]
    NotABarrier(String),
    #[error("root bracketing failed: {0}")]
    Bracketing(String),
    #[error("doublet pairing failed: {0}")]
    Pairing(String),
    #[error("configuration: {0}")]
    Configuration(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("schema: {0}")]
    Schema(String),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::OutOfRegime(_) => "out_of_regime",
            Error::ModelAssumption(_) => "model_assumption",
            Error::Shape(_) => "shape",
            Error::Domain(_) => "domain",
            Error::Numerical(_) => "numerical",
            Error::NotABarrier(_) => "not_a_barrier",
            Error::Bracketing(_) => "bracketing",
            Error::Pairing(_) => "pairing",
            Error::Configuration(_) => "configuration",
            Error::Precondition(_) => "precondition",
            Error::Indeterminate(_) => "indeterminate",
            Error::Schema(_) => "schema",
        }
    }

    /// True for errors caused by the inputs rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::OutOfRegime(_)
                | Error::ModelAssumption(_)
                | Error::Shape(_)
                | Error::Domain(_)
                | Error::Configuration(_)
                | Error::Precondition(_)
                | Error::Indeterminate(_)
                | Error::Schema(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be finite, got {x}"
        )))
    }
}

pub(crate) fn ensure_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be finite and positive, got {x}"
        )))
    }
}
