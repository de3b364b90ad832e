use thiserror::Error;

/// Errors surfaced to the user, grouped into classes with distinct exit
/// behavior and messages.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("validation failed: {}", failures.join("; "))]
    Validation { failures: Vec<String> },
    #[error("insufficient truncation: {0}")]
    Truncation(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(eqsteenrod::Error),
}

impl CliError {
    /// Short class name used in messages and JSON error output.
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Syntax { .. } => "syntax",
            CliError::Schema { .. } => "schema",
            CliError::Validation { .. } => "validation",
            CliError::Truncation(_) => "truncation",
            CliError::Usage(_) => "usage",
            CliError::Core(_) => "internal",
        }
    }

    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        let (line, column) = (err.line(), err.column());
        match err.classify() {
            Category::Syntax | Category::Eof => CliError::Syntax {
                line,
                column,
                message: strip_position(&err.to_string()),
            },
            Category::Data => CliError::schema(
                format!("line {line}, column {column}"),
                strip_position(&err.to_string()),
            ),
            Category::Io => CliError::Io {
                path: "<input>".into(),
                source: err.into(),
            },
        }
    }
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(k) => message[..k].to_string(),
        None => message.to_string(),
    }
}

impl From<eqsteenrod::Error> for CliError {
    fn from(e: eqsteenrod::Error) -> Self {
        use eqsteenrod::Error as E;
        match e {
            E::InsufficientTruncation { .. } => CliError::Truncation(e.to_string()),
            E::InvalidGroup(_)
            | E::Subconjugacy { .. }
            | E::InvalidSimplicialSet(_)
            | E::InvalidAction(_)
            | E::InvalidCoefficients(_)
            | E::FaceIndex { .. }
            | E::DimensionMismatch(_)
            | E::NotPrime(_) => CliError::Validation {
                failures: vec![e.to_string()],
            },
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
