use std::fmt;

use aridyn::DynError;

/// Runner failures, each tied to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// A certification or invariant check failed (exit 1).
    Invariant(String),
    /// Malformed or unsupported input (exit 2).
    Input(String),
    /// A computation ran out of budget (exit 3).
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invariant(m) | CliError::Input(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> Self {
        let msg = e.to_string();
        match e {
            DynError::Invariant(_) => CliError::Invariant(msg),
            DynError::BudgetExceeded { .. }
            | DynError::ArithDegreeBudget(_)
            | DynError::Undecided(_) => CliError::Budget(msg),
            _ => CliError::Input(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("i/o error: {}", e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(format!("csv error: {}", e))
    }
}
