use thiserror::Error;

/// Failures that stop a command before it produces a report.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input; `field` is a path into the input.
    #[error("{field}: {message}")]
    Input { field: String, message: String },
    /// Well-formed input with a parameter combination no estimator supports.
    #[error("{field}: {message}")]
    Unsupported { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn input(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Input {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Wraps a core error, sorting it into input and unsupported-parameter
    /// failures.
    pub fn core(field: impl Into<String>, err: latsum_core::Error) -> Self {
        let (field, message) = (field.into(), err.to_string());
        if err.is_unsupported() {
            CliError::Unsupported { field, message }
        } else {
            CliError::Input { field, message }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Io { .. } => crate::EXIT_INPUT,
            CliError::Unsupported { .. } => crate::EXIT_UNSUPPORTED,
        }
    }
}
