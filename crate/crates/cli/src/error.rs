//! Error type for the command line: every failure maps to an exit code and a
//! single-line JSON object on standard error.

use std::fmt;
use std::process::ExitCode;

use vecgap_core::gadgets::GadgetError;
use vecgap_core::matching::MatchingError;
use vecgap_core::model::ModelError;
use vecgap_core::solvers::SolverError;
use vecgap_core::verify::VerifyError;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", message)
    }

    pub fn io(path: &str, err: std::io::Error) -> Self {
        Self::new("io", format!("{path}: {err}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(2)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind, "message": self.message } }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::new("parse", e.to_string())
    }
}

impl From<MatchingError> for CliError {
    fn from(e: MatchingError) -> Self {
        let kind = match e {
            MatchingError::SizeLimit { .. } => "limit",
            _ => "matching",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<GadgetError> for CliError {
    fn from(e: GadgetError) -> Self {
        match e {
            GadgetError::Matching(m) => m.into(),
            GadgetError::Model(m) => m.into(),
            other => Self::new("gadget", other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        let kind = match e {
            SolverError::SizeLimit { .. } => "limit",
            _ => "solver",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Gadget(g) => g.into(),
            VerifyError::Matching(m) => m.into(),
            VerifyError::Solver(s) => s.into(),
            VerifyError::BudgetExceeded { .. } | VerifyError::MTooLarge { .. } => {
                Self::new("limit", e.to_string())
            }
            other => Self::new("verify", other.to_string()),
        }
    }
}
