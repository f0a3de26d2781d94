use std::fmt;

use vaxdyn_core::Error as CoreError;

/// CLI failure with the process exit code it maps to: 1 for validation
/// problems (bad config, parameters, unreadable/unwritable paths), 2 for
/// numerical failures.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::QuadratureTolerance { .. }
            | CoreError::NoEquilibrium
            | CoreError::RootRefinement { .. }
            | CoreError::DegenerateEquilibrium { .. }
            | CoreError::OddCountChange { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
