use std::fmt;

use decouple_core::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    /// Infeasible placement with a human-readable witness.
    Infeasible(String),
    /// A check ran to completion and did not pass.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Failed(_) => 1,
            CliError::Infeasible(_) => 3,
            CliError::Core(e) => match e {
                Error::EmptyNetwork
                | Error::UnknownNode(_)
                | Error::DuplicateEdge(..)
                | Error::ZeroWeight(..)
                | Error::InstanceViolation(_)
                | Error::MissingRoles(_)
                | Error::Parse(_)
                | Error::DimensionMismatch(_) => 2,
                Error::Infeasible(_)
                | Error::FlowUnbounded { .. }
                | Error::ExtremalCutInsufficient { .. }
                | Error::Premise(_)
                | Error::GeneralFriendUnsupported => 3,
                Error::SizeLimit { .. } | Error::CapExceeded(_) => 4,
                Error::StepSizeGuard(_) => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(msg) | CliError::Failed(msg) => f.write_str(msg),
            CliError::Infeasible(msg) => write!(f, "infeasible: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
