use thiserror::Error;

/// Process exit codes: 0 success, 2 configuration error, 3 numerical
/// blow-up, 4 verification failure, 1 anything else.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical blow-up at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("verification failed: {failed} of {total} criteria")]
    Verification { failed: usize, total: usize },

    #[error("snapshot error: {0}")]
    Snapshot(#[from] crate::snapshot::SnapshotError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(aol_core::Error),
}

impl From<aol_core::Error> for CliError {
    fn from(e: aol_core::Error) -> Self {
        match e {
            aol_core::Error::BlowUp { time, reason } => CliError::BlowUp { time, reason },
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::BlowUp { .. } => 3,
            CliError::Verification { .. } => 4,
            // core configuration-style errors are configuration errors too
            CliError::Core(e) => match e {
                aol_core::Error::BlowUp { .. } => 3,
                _ => 2,
            },
            CliError::Snapshot(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
