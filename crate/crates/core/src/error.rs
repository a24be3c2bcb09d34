use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid boundary law: {0}")]
    InvalidLaw(String),

    #[error("time {t} outside the validity horizon [0, {t_max}]")]
    OutsideHorizon { t: f64, t_max: f64 },

    #[error("position x = {x} outside the box [0, {length}]")]
    OutsideBox { x: f64, length: f64 },

    #[error("potential is singular at q = {0}")]
    Singular(f64),

    #[error("level {0} is deleted from this spectrum")]
    DeletedLevel(usize),

    #[error("no closed-form modes for the Case I composite potential")]
    CaseIComposite,

    #[error("unsupported seed level j = {0} (closed forms exist for j = 0, 1)")]
    UnsupportedSeed(usize),

    #[error("seed function has an interior node near q = {0}")]
    NodalSeed(f64),

    #[error("Wronskian vanishes near q = {0}")]
    VanishingWronskian(f64),

    #[error("seed product vanishes at q = {0}")]
    VanishingBeta(f64),

    #[error("quadrature failed to converge (estimated error {0:e})")]
    Quadrature(f64),

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid superposition: {0}")]
    InvalidSuperposition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
