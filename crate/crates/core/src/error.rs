use std::path::PathBuf;

/// Errors raised by the analysis, regulation and simulation layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A root-finding target has no solution inside the admissible range.
    #[error("{op}: no feasible solution ({msg})")]
    Infeasible { op: &'static str, msg: String },

    /// Bisection failed to bracket or converge.
    #[error("root finding failed: {0}")]
    Solver(String),

    #[error("invalid scenario: {0}")]
    Config(String),

    #[error("failed to parse {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}

pub(crate) fn infeasible(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Infeasible {
        op,
        msg: msg.into(),
    }
}
