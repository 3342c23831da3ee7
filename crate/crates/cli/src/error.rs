use khl_core::KhlError;

/// Failure classes with distinct exit codes: bad configuration is the
/// caller's problem (2), a numerical breakdown in an otherwise valid run is
/// the library's (3).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Numerical(msg) => f.write_str(msg),
        }
    }
}

impl From<KhlError> for CliError {
    fn from(e: KhlError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

/// Prefixes library errors with the operation that raised them, so an exit-3
/// diagnostic names where the numerics gave out.
pub trait ErrCtx<T> {
    fn ctx(self, op: &str) -> Result<T, CliError>;
}

impl<T> ErrCtx<T> for khl_core::Result<T> {
    fn ctx(self, op: &str) -> Result<T, CliError> {
        self.map_err(|e| {
            if e.is_numerical() {
                CliError::Numerical(format!("{op}: {e}"))
            } else {
                CliError::Config(format!("{op}: {e}"))
            }
        })
    }
}
