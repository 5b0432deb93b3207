use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("`{path}` sums to {sum}, more than {tol:e} away from 1")]
    Normalization { path: String, sum: f64, tol: f64 },

    #[error("command `{command}` does not apply to `{kind}` problems: {hint}")]
    IncompatibleCommand {
        command: &'static str,
        kind: &'static str,
        hint: &'static str,
    },

    #[error("svg output needs two profile components, this result has {0}")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ipset_core::Error),
}

impl CliError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        use ipset_core::Error as E;
        match self {
            CliError::Core(E::Lp(_) | E::ConvergenceFailure(_) | E::ReductionFailed(_) | E::GridTooCoarse) => 3,
            _ => 2,
        }
    }
}
