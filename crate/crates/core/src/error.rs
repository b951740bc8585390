use thiserror::Error;

/// Errors produced by the spectral, model and diagnostic layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be a power of two and at least 8, got {0}")]
    InvalidGridSize(usize),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("synthesis band [{kmin}, {kmax}] not contained in [1, {cutoff}] for n = {n}")]
    BandOutsideGrid {
        kmin: i64,
        kmax: i64,
        cutoff: i64,
        n: usize,
    },

    #[error("Hoelder exponent h must lie in (0, 1), got {0}")]
    InvalidHoelderExponent(f64),

    #[error("model {kind} {expectation} a magnetic field")]
    MagneticFieldMismatch {
        kind: &'static str,
        expectation: &'static str,
    },

    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),

    #[error("solution blew up at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("mollifier scale must be positive, got {0}")]
    InvalidMollifierScale(f64),

    #[error(
        "mollification scale {epsilon} outside resolvable range ({min}, {max}) for n = {n}"
    )]
    EpsilonOutOfRange {
        epsilon: f64,
        min: f64,
        max: f64,
        n: usize,
    },

    #[error("defect {label} requires a magnetic field (mhd_leray_alpha only)")]
    DefectNeedsMagneticField { label: &'static str },

    #[error("structure-function order must be 1, 2 or 3, got {0}")]
    InvalidMomentOrder(u32),

    #[error("displacement radius {0} outside (0, pi]")]
    RadiusOutOfRange(f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("energy-balance residual needs at least 3 consecutive snapshots, got {0}")]
    TooFewSnapshots(usize),

    #[error("energy-balance residual is defined for leray_alpha states, got {0}")]
    WrongModelForBalance(&'static str),

    #[error("fractional order theta must be positive, got {0}")]
    InvalidTheta(f64),

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
