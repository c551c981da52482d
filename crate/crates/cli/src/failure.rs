use std::fmt;

use linky_core::corpus::CorpusError;
use linky_core::linkage::LinkageError;
use linky_core::workspace::WorkspaceError;

/// A command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const DATA: u8 = 2;
    pub const INTERNAL: u8 = 3;

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => Self::USAGE,
            Failure::Data(_) => Self::DATA,
            Failure::Internal(_) => Self::INTERNAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<LinkageError> for Failure {
    fn from(e: LinkageError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<WorkspaceError> for Failure {
    fn from(e: WorkspaceError) -> Self {
        match e {
            WorkspaceError::Io { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}
