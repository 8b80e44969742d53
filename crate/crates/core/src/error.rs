use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point {coords:?} violates the domain: {reason}")]
    DomainViolation { coords: Vec<f64>, reason: String },

    #[error("tangent map has rank below {n} (smallest singular value {sigma_min:.3e})")]
    RankDeficient { n: usize, sigma_min: f64 },

    #[error("umbilic point: rho^2 = {rho_sq:.3e} is below {eps:.1e}")]
    UmbilicPoint { rho_sq: f64, eps: f64 },

    #[error("{op} needs dimension at least {min}, got {n}")]
    DimensionTooSmall { op: &'static str, min: usize, n: usize },

    #[error("normal bundle is not flat: commutator norm {commutator:.3e} exceeds {tol:.1e}")]
    NotFlat { commutator: f64, tol: f64 },

    #[error("principal normals {gap:.3e} apart fall in the ambiguous band [{tol:.1e}, {upper:.1e})")]
    GroupingAmbiguous { gap: f64, tol: f64, upper: f64 },

    #[error("multiplicity pattern {pattern:?} does not match: {reason}")]
    StructureMismatch { pattern: Vec<usize>, reason: String },

    #[error("f_{index} = {value:.3e} vanishes")]
    DegenerateFi { index: usize, value: f64 },

    #[error("invalid family spec: {0}")]
    SpecInvalid(String),

    #[error("parameter {name} = {value} out of range: {range}")]
    ParamOutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("integration failed at s = {s}: {reason}")]
    IntegrationFailure { s: f64, reason: String },

    #[error("config error: {0}")]
    ConfigError(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
