//! Exit codes and the mapping from errors to them.

use std::fmt;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NO_SCOREABLE: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;

/// Marks an error as a usage problem (bad flags or config) rather than bad data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (exit {})", self.message, self.code)
    }
}

/// Exit code for an error chain: the first recognised cause decides.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use authorlm::Error as E;
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::NoScoreableWords => EXIT_NO_SCOREABLE,
                E::Diverged | E::TrainingDiverged { .. } => EXIT_DIVERGED,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure {
            code: exit_code(&err),
            message: format!("{err:#}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn codes_follow_the_cause() {
        let e = anyhow::Error::new(authorlm::Error::NoScoreableWords).context("classifying");
        assert_eq!(exit_code(&e), EXIT_NO_SCOREABLE);
        let e: anyhow::Result<()> = Err(authorlm::Error::TrainingDiverged { epoch: 2, iteration: 3 }.into());
        let e = e.context("author a, seed 1, kind nnlm").unwrap_err();
        assert_eq!(exit_code(&e), EXIT_DIVERGED);
        assert!(format!("{e:#}").contains("author a, seed 1, kind nnlm"));
        let e = anyhow::Error::new(UsageError("bad flag".into()));
        assert_eq!(exit_code(&e), EXIT_USAGE);
        let e = anyhow::Error::new(authorlm::Error::CorpusTooSmall { sentences: 3 });
        assert_eq!(exit_code(&e), EXIT_DATA);
        assert_eq!(exit_code(&anyhow::anyhow!("anything else")), EXIT_DATA);
    }
}
