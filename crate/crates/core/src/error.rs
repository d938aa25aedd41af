use thiserror::Error;

/// Errors produced by radiomap operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("grid must be non-empty ({rows}x{cols} requested)")]
    EmptyGrid { rows: usize, cols: usize },

    #[error("cell ({row}, {col}) out of bounds for {rows}x{cols} grid")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("patch size must be odd and >= 3, got {0}")]
    InvalidPatchSize(usize),

    #[error("observed region is empty")]
    EmptyObserved,

    #[error("missing region is empty")]
    EmptyMissing,

    #[error("read of unreconstructed cell ({row}, {col})")]
    UnreconstructedRead { row: usize, col: usize },

    #[error("degenerate scale: grid is constant over the observed region")]
    DegenerateScale,

    #[error("non-finite value at cell ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("linear system is singular or rank-deficient: {0}")]
    SingularSystem(String),

    #[error("insufficient samples: need {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("no fully observed {size}x{size} window exists; try a smaller patch size")]
    NoObservedWindow { size: usize },

    #[error("patch at ({row}, {col}) has no observed cells")]
    EmptyPatch { row: usize, col: usize },

    #[error("segment count {requested} exceeds cell count {cells}")]
    TooManySegments { requested: usize, cells: usize },

    #[error("inpainting stalled: {missing} cells missing, {boundary} boundary cells, round {round}")]
    NonProgress {
        missing: usize,
        boundary: usize,
        round: usize,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} at line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
