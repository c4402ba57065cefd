use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Core(polyflow::Error),
    Usage(String),
    /// A check ran to completion and missed its tolerance.
    Failed(String),
}

impl CliError {
    pub const USAGE_EXIT: u8 = 2;
    pub const NO_SUCH_SOLUTION_EXIT: u8 = 3;
    pub const CHECK_FAILED_EXIT: u8 = 4;

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "USAGE",
            CliError::Failed(_) => "CHECK_FAILED",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(polyflow::Error::NoSuchSolution(_)) => Self::NO_SUCH_SOLUTION_EXIT,
            CliError::Core(_) => 1,
            CliError::Usage(_) => Self::USAGE_EXIT,
            CliError::Failed(_) => Self::CHECK_FAILED_EXIT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<polyflow::Error> for CliError {
    fn from(e: polyflow::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
