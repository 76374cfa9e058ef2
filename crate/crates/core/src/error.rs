use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid lattice sample at hbar = {hbar}: {reason}")]
    InvalidSample { hbar: f64, reason: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid label map: {0}")]
    InvalidLabelMap(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The two label maps do not cover the same point set.
    #[error("structural mismatch: {only_a} point(s) only in the first map, {only_b} only in the second")]
    StructuralMismatch { only_a: usize, only_b: usize },

    /// No lattice point of a slice maps into the region.
    #[error("degenerate slice: no lattice point lands in the region at hbar = {hbar}")]
    DegenerateSlice { hbar: f64 },

    #[error("unsupported model system '{0}'")]
    UnsupportedModel(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Consecutive slices could not be matched by any admissible witness.
    #[error("sequence break between hbar = {from} and hbar = {to}: {reason}")]
    SequenceBreak { from: f64, to: f64, reason: String },

    /// The least-squares system is rank deficient.
    #[error("underdetermined fit (rank {rank} < {unknowns}): {deficient}")]
    Underdetermined {
        rank: usize,
        unknowns: usize,
        deficient: String,
    },

    /// The rotation number diverges at this point in the chosen convention.
    #[error("rotation number has a pole at ({x}, {y})")]
    Pole { x: f64, y: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
