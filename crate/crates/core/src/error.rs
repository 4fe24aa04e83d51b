use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("capacity violated at node {node}: workload {workload} exceeds 1")]
    Capacity { node: usize, workload: f64 },

    #[error("search budget exceeded: {0}")]
    Budget(String),

    #[error("no placement satisfies the capacity rows; binding vm types: {types:?}")]
    Infeasible { types: Vec<usize> },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("missing sweep cells: {0}")]
    MissingCells(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used by the command line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Model(_) => "model",
            Error::Validation(_) => "validation",
            Error::Capacity { .. } => "capacity",
            Error::Budget(_) => "budget",
            Error::Infeasible { .. } => "infeasible",
            Error::Parse { .. } => "parse",
            Error::MissingCells(_) => "missing_cells",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }
}
