use thiserror::Error;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// One or more input values violate a type invariant. Every violation
    /// found is listed, not just the first.
    #[error("invalid input: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// Inputs are individually valid but the physical model does not apply
    /// to them (interfering branches, unmeasurable fringes, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("table error: {0}")]
    Table(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(vec![msg.into()])
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Collects validation messages so that constructors can report all of them
/// at once.
#[derive(Debug, Default)]
pub(crate) struct Violations(Vec<String>);

impl Violations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub fn into_result(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self.0))
        }
    }
}
