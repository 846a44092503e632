use std::fmt;

use subposet_core::covering::CoveringError;
use subposet_core::ffield::FieldError;
use subposet_core::lattice::LatticeError;
use subposet_core::poset::PosetError;
use subposet_core::profile::ProfileError;
use subposet_core::search::SearchError;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_TOO_LARGE: u8 = 3;
pub const EXIT_NODE_CAP: u8 = 4;

/// A failed command with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, kind: "UsageError", message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

fn make(code: u8, kind: &'static str, e: impl fmt::Display) -> CliError {
    CliError { code, kind, message: e.to_string() }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        make(EXIT_USAGE, "FieldError", e)
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::TooLarge(_) => make(EXIT_TOO_LARGE, "TooLarge", e),
            LatticeError::Field(f) => f.into(),
            LatticeError::OutOfRange(_) => make(EXIT_USAGE, "OutOfRange", e),
            _ => make(EXIT_USAGE, "LatticeError", e),
        }
    }
}

impl From<PosetError> for CliError {
    fn from(e: PosetError) -> Self {
        match e {
            PosetError::TooLarge(_) | PosetError::HorizonTooLarge(_) => make(EXIT_TOO_LARGE, "TooLarge", e),
            _ => make(EXIT_USAGE, "ParseError", e),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Lattice(l) => l.into(),
            SearchError::Overflow => make(EXIT_TOO_LARGE, "Overflow", e),
            SearchError::NodeCapExceeded(_) => make(EXIT_NODE_CAP, "NodeCapExceeded", e),
            SearchError::OutOfRange(_) => make(EXIT_USAGE, "OutOfRange", e),
            _ => make(EXIT_USAGE, "WeightError", e),
        }
    }
}

impl From<CoveringError> for CliError {
    fn from(e: CoveringError) -> Self {
        match e {
            CoveringError::Lattice(l) => l.into(),
            CoveringError::Search(s) => s.into(),
            CoveringError::InvalidTuple(_) => make(EXIT_USAGE, "InvalidTuple", e),
            _ => make(EXIT_USAGE, "CoveringError", e),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Lattice(l) => l.into(),
            ProfileError::Search(s) => s.into(),
            ProfileError::NotKSperner(_) => make(EXIT_USAGE, "NotKSperner", e),
            ProfileError::OutOfRange(_) => make(EXIT_USAGE, "OutOfRange", e),
        }
    }
}
