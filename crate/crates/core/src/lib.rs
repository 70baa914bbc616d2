//! Cast vote record analysis for single-winner ranked elections.
//!
//! Raw ballots are normalized into a [`CondensedProfile`], which then feeds
//! instant runoff tabulation, pairwise (Condorcet) analysis, and
//! approval/STAR counterfactual models evaluated in exact rationals.

pub mod approval;
pub mod cli;
pub mod condorcet;
pub mod error;
pub mod exact;
pub mod ingest;
pub mod irv;
pub mod profile;
pub mod report;
pub mod scenario;
pub mod star;

pub use error::{Error, Result};
pub use profile::{
    classify_ballot, condense, first_place_totals, second_place_totals, BallotClass, CandidateId,
    CondensedProfile, Mark, Pattern, PerCandidate, RankedBallot, Roster,
};
pub use scenario::{GroupParams, Winner};
