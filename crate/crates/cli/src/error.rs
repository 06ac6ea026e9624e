use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),

    /// A solver or analysis failure on a well-formed config.
    #[error("{0}")]
    Solver(quasifix::Error),

    /// The enrichment search found no grid point with `θ̂ < b + 1`.
    #[error("no b in the grid yields an enriched contraction")]
    NoEnrichment,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 3,
            RunError::Solver(_) | RunError::NoEnrichment => 2,
            RunError::Io { .. } => 1,
        }
    }

    /// Stable status label for summaries and diagnostics.
    pub fn status(&self) -> &'static str {
        match self {
            RunError::Config(_) => "ConfigParseError",
            RunError::Solver(e) => e.kind(),
            RunError::NoEnrichment => "NoEnrichment",
            RunError::Io { .. } => "IoError",
        }
    }
}

impl From<quasifix::Error> for RunError {
    fn from(e: quasifix::Error) -> Self {
        use quasifix::Error as E;
        match e {
            // malformed inputs surface as config errors, everything else
            // happened while solving
            E::DimensionMismatch { .. }
            | E::InvalidParameter(_)
            | E::NonFiniteCoordinate { .. }
            | E::EmptySampleSet
            | E::IndexOutOfRange { .. }
            | E::ExpressionParse { .. } => RunError::Config(e.to_string()),
            other => RunError::Solver(other),
        }
    }
}
