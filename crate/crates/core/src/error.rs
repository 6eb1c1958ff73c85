use thiserror::Error;

/// Errors produced anywhere in the clustering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (dimension mismatch, NaN, bad parameter).
    #[error("invalid input: {0}")]
    Input(String),

    /// The data admit no meaningful answer (e.g. all points identical, so the
    /// bandwidth heuristic collapses to zero).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// An iterative routine ran out of budget.
    #[error("numerical failure: {message} (worst residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    /// DaSpec selected no eigenvector. The top eigenvector always qualifies in
    /// exact arithmetic, so this signals a numerical fault upstream.
    #[error("algorithm degenerate: {0}")]
    AlgorithmDegenerate(String),

    /// A point has zero total affinity to every other point.
    #[error("degenerate affinity: {0}")]
    DegenerateAffinity(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::DegenerateData(_) => "degenerate_data",
            Error::Numerical { .. } => "numerical",
            Error::AlgorithmDegenerate(_) => "algorithm_degenerate",
            Error::DegenerateAffinity(_) => "degenerate_affinity",
            Error::Csv(_) => "csv",
            Error::Io(_) => "io",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
