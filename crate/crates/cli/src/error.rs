use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("line {line}: undeclared register `{name}`")]
    UndeclaredRegister { line: usize, name: String },

    #[error("line {line}: unknown {what} `{name}`")]
    Unknown { line: usize, what: &'static str, name: String },

    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },

    #[error("line {line}: {source}")]
    Runtime {
        line: usize,
        #[source]
        source: modvar_core::Error,
    },

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn line(&self) -> Option<usize> {
        match self {
            CliError::Syntax { line, .. }
            | CliError::UndeclaredRegister { line, .. }
            | CliError::Unknown { line, .. }
            | CliError::Semantic { line, .. }
            | CliError::Runtime { line, .. } => Some(*line),
            CliError::Io(_) | CliError::Usage(_) => None,
        }
    }

    /// Process exit code: 2 for violated internal invariants, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime { source: modvar_core::Error::Invariant(_), .. } => 2,
            _ => 1,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "syntax",
            CliError::UndeclaredRegister { .. } => "undeclared_register",
            CliError::Unknown { .. } => "unknown_name",
            CliError::Semantic { .. } => "semantic",
            CliError::Runtime { .. } => "runtime",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }
}
