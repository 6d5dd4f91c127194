use std::fmt;

/// Process exit codes: 0 ok, 2 parse, 3 infeasible, 4 budget, 5 internal.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError { code: EXIT_PARSE, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<fairdiv::Error> for CliError {
    fn from(e: fairdiv::Error) -> Self {
        let code = match &e {
            fairdiv::Error::InvalidDataset(_) => EXIT_PARSE,
            fairdiv::Error::Infeasible(_) => EXIT_INFEASIBLE,
            fairdiv::Error::BudgetExceeded { .. } => EXIT_BUDGET,
            fairdiv::Error::Internal(_) | fairdiv::Error::EmptySelection => EXIT_INTERNAL,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::parse(format!("io error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
