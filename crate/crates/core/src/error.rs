use thiserror::Error;

use crate::profile::CandidateId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid roster: {0}")]
    InvalidRoster(String),

    #[error("unknown candidate {0:?}")]
    UnknownCandidate(String),

    #[error("malformed ballot: {0}")]
    MalformedBallot(String),

    #[error("this analysis needs a {expected}-candidate roster, found {found}")]
    RosterSize { expected: usize, found: usize },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ballot {index} has {found} rank positions, expected {expected}")]
    RaggedBallot {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("condensed profile line {line}: {message}")]
    Condensed { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("decisive tie for last place between {}", join(.candidates))]
    DecisiveTie { candidates: Vec<CandidateId> },

    #[error("unresolved tie for a runoff slot between {}", join(.candidates))]
    FinalistTie { candidates: Vec<CandidateId> },

    #[error("no active ballots to tabulate")]
    NoActiveBallots,

    #[error("unattainable: {0}")]
    Unattainable(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

fn join(candidates: &[CandidateId]) -> String {
    candidates
        .iter()
        .map(|c| c.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    /// Errors about the election itself rather than the invocation or input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DecisiveTie { .. }
                | Error::FinalistTie { .. }
                | Error::NoActiveBallots
                | Error::Unattainable(_)
        )
    }
}
