use thiserror::Error;

use crate::scenelang::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("degenerate level-set gradient at t = {t}: |grad phi| = {norm:e}")]
    DegenerateGradient { t: f64, norm: f64 },

    #[error("point at t = {t} is outside the interface chart (distance estimate {distance:e}, chart width {width:e})")]
    ChartOutOfRange { t: f64, distance: f64, width: f64 },

    #[error("closest-point iteration failed to converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("quadrature ball of radius {radius:e} leaves the chart tube of width {width:e}")]
    QuadratureBallEscapesTube { radius: f64, width: f64 },

    #[error("dimension {0} is not supported here")]
    NotImplementedDimension(usize),

    #[error("tangent frame seeds are degenerate at t = {t} (smallest projected norm {min_norm:e})")]
    DegenerateFrame { t: f64, min_norm: f64 },

    #[error("transversality fails at t = {t}, x = {x:?}: relative normal speeds u+ = {u_plus:e}, u- = {u_minus:e} have opposite signs")]
    TransversalityViolation { t: f64, x: Vec<f64>, u_plus: f64, u_minus: f64 },

    #[error("step limit {steps} reached at t = {t}")]
    MaxStepsExceeded { steps: usize, t: f64 },

    #[error("trajectory left the domain at t = {t}, x = {x:?}")]
    LeftDomain { t: f64, x: Vec<f64> },

    #[error("Jacobian is singular or ill-conditioned (condition {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("non-finite field value at t = {t}, x = {x:?}")]
    NonFinite { t: f64, x: Vec<f64> },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, printed by the command-line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateGradient { .. } => "DegenerateGradient",
            Error::ChartOutOfRange { .. } => "ChartOutOfRange",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::QuadratureBallEscapesTube { .. } => "QuadratureBallEscapesTube",
            Error::NotImplementedDimension(_) => "NotImplementedDimension",
            Error::DegenerateFrame { .. } => "DegenerateFrame",
            Error::TransversalityViolation { .. } => "TransversalityViolation",
            Error::MaxStepsExceeded { .. } => "MaxStepsExceeded",
            Error::LeftDomain { .. } => "LeftDomain",
            Error::SingularJacobian { .. } => "SingularJacobian",
            Error::NonFinite { .. } => "NonFinite",
            Error::Parse(e) => e.kind.name(),
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
