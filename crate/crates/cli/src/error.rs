use thiserror::Error;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{flag}: {reason}")]
    Flag { flag: String, reason: String },
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] lidstone_fem::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn flag(flag: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Flag {
            flag: flag.into(),
            reason: reason.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Flag { .. } | CliError::Config { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_NUMERICAL,
        }
    }
}

/// Flag that sets a library parameter, for diagnostics.
fn flag_for(field: &str) -> String {
    match field {
        "epsilons" => "--epsilon".into(),
        "n_values" => "--n".into(),
        "mesh_kinds" => "--mesh".into(),
        other => format!("--{}", other.replace('_', "-")),
    }
}

/// Rewrites parameter errors from the library so they name the flag.
pub fn with_flag(err: lidstone_fem::Error) -> CliError {
    match err {
        lidstone_fem::Error::InvalidParameter { field, reason } => CliError::Flag {
            flag: flag_for(field),
            reason,
        },
        other => CliError::Core(other),
    }
}
