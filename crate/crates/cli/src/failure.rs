use std::fmt;

use rigidplan::Error;

/// Process exit status plus the message printed on stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const IO: u8 = 1;
pub const INVALID_INPUT: u8 = 2;
pub const INCOMPATIBLE_BOUNDARIES: u8 = 3;
pub const THRESHOLD_EXCEEDED: u8 = 4;
pub const NOT_CONVERGED: u8 = 5;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn io(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        Self::new(IO, format!("{context}: {err}"))
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(INVALID_INPUT, message)
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::NotCongruent { .. }
            | Error::ReflectionRequired { .. }
            | Error::DegenerateHeading => INCOMPATIBLE_BOUNDARIES,
            Error::NotConverged { .. } => NOT_CONVERGED,
            _ => INVALID_INPUT,
        };
        let check = match err {
            Error::NotCongruent { .. } => "congruence check failed: ",
            Error::ReflectionRequired { .. } => "reflection check failed: ",
            Error::DegenerateHeading => "heading check failed: ",
            _ => "",
        };
        Self::new(code, format!("{check}{err}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
