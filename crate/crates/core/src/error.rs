use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0:?} is a lattice point of the torus")]
    SingularPoint((f64, f64)),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("wrap distance {0} is outside the regular-part domain (< 1/2)")]
    OutOfRange(f64),
    #[error("degenerate vortex configuration: {0}")]
    DegenerateConfig(String),
    #[error("radial minimizer did not converge: {0}")]
    NonConvergence(String),
    #[error("momentum lift left the lattice by {0:e}")]
    LatticeViolation(f64),
    #[error("vortices closer than the collision radius: separation {0:e}")]
    CollisionImminent(f64),
    #[error("step failure at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),
    #[error("grid of size {n} too coarse for {vortices} vortices (need n >= {min})")]
    GridTooCoarse { n: usize, vortices: usize, min: usize },
    #[error("invalid test function: {0}")]
    EtaSpecInvalid(String),
    #[error("vortex core unresolved: eps = {eps} < 4h = {four_h}")]
    CoreUnresolved { eps: f64, four_h: f64 },
    #[error("unstable step at t = {t}: discrete Hamiltonian jumped from {before} to {after}")]
    UnstableStep { t: f64, before: f64, after: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable identifier used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularPoint(_) => "SingularPoint",
            Error::Parameter(_) => "ParameterError",
            Error::OutOfRange(_) => "OutOfRange",
            Error::DegenerateConfig(_) => "DegenerateConfig",
            Error::NonConvergence(_) => "NonConvergence",
            Error::LatticeViolation(_) => "LatticeViolation",
            Error::CollisionImminent(_) => "CollisionImminent",
            Error::StepFailure { .. } => "StepFailure",
            Error::InvalidInitialData(_) => "InvalidInitialData",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::EtaSpecInvalid(_) => "EtaSpecInvalid",
            Error::CoreUnresolved { .. } => "CoreUnresolved",
            Error::UnstableStep { .. } => "UnstableStep",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
            Error::Csv(_) => "CsvError",
        }
    }

    /// Process exit status; every kind gets its own code.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 3,
            Error::Csv(_) => 4,
            Error::SingularPoint(_) => 10,
            Error::Parameter(_) => 11,
            Error::OutOfRange(_) => 12,
            Error::DegenerateConfig(_) => 13,
            Error::NonConvergence(_) => 14,
            Error::LatticeViolation(_) => 15,
            Error::CollisionImminent(_) => 16,
            Error::StepFailure { .. } => 17,
            Error::InvalidInitialData(_) => 18,
            Error::GridTooCoarse { .. } => 19,
            Error::EtaSpecInvalid(_) => 20,
            Error::CoreUnresolved { .. } => 21,
            Error::UnstableStep { .. } => 22,
        }
    }
}
