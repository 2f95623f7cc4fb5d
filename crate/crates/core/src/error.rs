use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the simulation and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("numerical divergence at t = {time}: {what}")]
    Divergence { time: f64, what: String },

    #[error("condensate left the trusted region: |COM displacement| = {displacement} exceeds {bound}")]
    BoxExit { displacement: f64, bound: f64 },

    #[error("no convergence after {iterations} iterations ({kind}); last update {last_update:e}")]
    NonConvergence {
        iterations: usize,
        kind: StallKind,
        last_update: f64,
    },

    #[error("undefined phase: cavity amplitude {0:e} below 1e-12")]
    UndefinedPhase(f64),

    #[error("undefined center of mass: circular mean magnitude {0:e} below 1e-12")]
    UndefinedCom(f64),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("non-identifiable record: {0}")]
    NonIdentifiable(String),

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("projection norm {0:e} below 1e-10")]
    ProjectionVanished(f64),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// How an iterative solver failed to settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallKind {
    /// Updates keep shrinking but too slowly for the iteration cap.
    Slow,
    /// Successive updates flip direction without decaying.
    Oscillatory,
}

impl std::fmt::Display for StallKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StallKind::Slow => f.write_str("slow convergence"),
            StallKind::Oscillatory => f.write_str("oscillatory"),
        }
    }
}
