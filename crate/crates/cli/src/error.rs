use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at line {line}, column {col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("undeclared variable {name} at line {line}, column {col}")]
    UndeclaredVariable {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] charpoly::Error),
}

impl CliError {
    /// 0 ok, 1 invariant violation, 2 inconclusive, 3 input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => e.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
