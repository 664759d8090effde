//! Errors carrying their process exit code.

use cnlab::Error;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_BLOWUP: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
        }
    }

    pub fn io(context: &str, e: std::io::Error) -> Self {
        Self {
            code: EXIT_USAGE,
            kind: "io",
            message: format!("{context}: {e}"),
        }
    }

    pub fn to_json(&self) -> String {
        json!({"error": self.kind, "message": self.message, "exit_code": self.code}).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::NonConvergence(_) => (EXIT_NON_CONVERGENCE, "non_convergence"),
            Error::BlowupSuspected { .. } => (EXIT_BLOWUP, "blowup_suspected"),
            Error::Config(_) => (EXIT_USAGE, "config"),
            Error::Io(_) => (EXIT_USAGE, "io"),
            _ => (EXIT_USAGE, "invalid_input"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}
