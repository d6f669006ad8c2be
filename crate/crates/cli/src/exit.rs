//! Exit codes: 0 success, 2 usage, 3 data, 4 unmet mathematical precondition.

use std::fmt;

pub const USAGE: i32 = 2;
pub const DATA: i32 = 3;
pub const PRECONDITION: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn usage(message: String) -> Self {
        Self { code: USAGE, message }
    }

    pub fn data(message: String) -> Self {
        Self { code: DATA, message }
    }

    pub fn precondition(message: String) -> Self {
        Self { code: PRECONDITION, message }
    }

    /// Library error raised while interpreting user-supplied parameters.
    pub fn usage_from(e: cosparse::Error) -> Self {
        if e.is_precondition() {
            Self::precondition(e.to_string())
        } else {
            Self::usage(e.to_string())
        }
    }
}

impl From<cosparse::Error> for CliError {
    fn from(e: cosparse::Error) -> Self {
        use cosparse::Error as E;
        let code = match &e {
            _ if e.is_precondition() => PRECONDITION,
            E::Parse(_) | E::InvalidParameter(_) => USAGE,
            E::DimensionMismatch(_) | E::Io(_) | E::Json(_) => DATA,
            _ => DATA,
        };
        Self { code, message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}
