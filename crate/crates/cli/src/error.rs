use gausscap_core::Error as CoreError;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    CheckFailed = 1,
    InvalidInput = 2,
    Inconclusive = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            status: Status::InvalidInput,
            message: message.into(),
        }
    }

    pub fn check(message: impl Into<String>) -> Self {
        Self {
            status: Status::CheckFailed,
            message: message.into(),
        }
    }

    pub fn inconclusive(message: impl Into<String>) -> Self {
        Self {
            status: Status::Inconclusive,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let status = match &e {
            CoreError::Inconclusive(_) => Status::Inconclusive,
            CoreError::InvalidParameter { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::NotSquare { .. }
            | CoreError::NotSymmetric(_)
            | CoreError::NotPositive(_)
            | CoreError::NotPhysical(_)
            | CoreError::NotCompletelyPositive(_)
            | CoreError::NotNormalized(..)
            | CoreError::InadmissiblePair { .. }
            | CoreError::IndeterminateGap
            | CoreError::Unclassified => Status::InvalidInput,
            _ => Status::CheckFailed,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::check(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::check(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::check(format!("json error: {e}"))
    }
}
