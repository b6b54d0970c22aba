use thiserror::Error;

/// Errors raised by the gearmap library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GearError {
    /// A parameter lies outside the domain of the requested operation.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("degenerate Möbius transformation (ad - bc = 0)")]
    DegenerateMobius,

    #[error("coincident points cannot determine a circle")]
    CoincidentPoints,

    #[error("evaluation point {re}{im:+}i is within {distance:e} of a pole")]
    NearPole { re: f64, im: f64, distance: f64 },

    #[error("step size underflow on ray at angle {theta} (radius {radius})")]
    StepUnderflow { theta: f64, radius: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("path passes within {distance:e} of a singular point at {re}{im:+}i")]
    PathTooClose { re: f64, im: f64, distance: f64 },

    #[error("quadrature did not converge (residual estimate {residual:e})")]
    Quadrature { residual: f64 },

    #[error("inversion failed: {0}")]
    Inversion(String),

    #[error("convention check failed: {0}")]
    Convention(String),

    #[error("boundary trace too short on {0}")]
    TraceTooShort(&'static str),

    #[error("not a pregear: {0}")]
    NotPregear(String),
}

pub type Result<T> = std::result::Result<T, GearError>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> GearError {
    GearError::Domain {
        name,
        value,
        reason,
    }
}
