use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("invalid {field} = {value}: {reason}")]
    Invalid { field: &'static str, value: f64, reason: &'static str },
    #[error("mode index must be 1 or 2, got {0}")]
    InvalidMode(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("no coupling: |Omega_c1|^2 + |Omega_c2|^2 = 0")]
    NoCoupling,
    #[error("singular dispersion: Delta_p1 |Omega_c2|^2 + Delta_p2 |Omega_c1|^2 = 0")]
    Singular,
    #[error("Re(alpha) = 0: the modes do not exchange energy")]
    NoOscillation,
    #[error("relative phase undefined at z = {z}: a mode amplitude vanishes")]
    UndefinedPhase { z: f64 },
    #[error("input has zero intensity")]
    ZeroInput,
    #[error("frequency grid must be symmetric about zero")]
    AsymmetricGrid,
    #[error("spectra and frequency grid lengths differ")]
    LengthMismatch,
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("grid: {0}")]
    Grid(String),
    #[error("integration diverged at z index {iz}, t index {it}")]
    Diverged { iz: usize, it: usize },
    #[error(
        "time window too short: {fraction:.3e} of the input energy is still \
         arriving in the last 5% of the window"
    )]
    Truncated { fraction: f64 },
    #[error("convergence study needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("memory configuration: {0}")]
    Config(String),
    #[error("{0} window carries no energy")]
    ZeroEnergy(&'static str),
    #[error("columns have mismatched lengths ({0} vs {1})")]
    Mismatch(usize, usize),
}
