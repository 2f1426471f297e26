use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("assumption ({item}) violated: {detail}")]
    AssumptionViolated { item: &'static str, detail: String },

    #[error("invalid pentapod: {0}")]
    InvalidPentapod(String),

    #[error("architecturally singular: {0}")]
    ArchitecturallySingular(String),

    #[error("dependent constraints: {0}")]
    DependentConstraints(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("wrong branch: {0}")]
    WrongBranch(String),

    #[error("not a displacement: x0 = 0")]
    BoundaryPoint,

    #[error("not a bond: {0}")]
    NotABond(String),

    #[error("not a self-motion: {0}")]
    NotASelfMotion(String),

    #[error("root isolation did not converge on [{lo}, {hi}]")]
    NonConvergence { lo: f64, hi: f64 },

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
