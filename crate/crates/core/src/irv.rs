//! Instant runoff tabulation over a condensed profile.
//!
//! Overvoted ballots are invalid for IRV and are only reported. Each round
//! counts every active ballot for its highest-ranked continuing candidate;
//! a strict majority of active ballots wins, otherwise the lowest candidate
//! is eliminated and their ballots move on or exhaust.

use crate::error::{Error, Result};
use crate::exact::{percent, Rational};
use crate::profile::{CandidateId, CondensedProfile};

/// What to do when several candidates share the lowest tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TiePolicy {
    /// Refuse to pick; report a decisive tie.
    #[default]
    Error,
    /// Eliminate whichever tied candidate comes last in roster order.
    LastInRoster,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrvRound {
    /// 1-based.
    pub round_index: usize,
    /// Continuing candidates in roster order.
    pub tallies: Vec<(CandidateId, u64)>,
    pub active_ballots: u64,
    /// Candidate eliminated at the end of this round.
    pub eliminated: Option<CandidateId>,
    /// Ballots received at the start of this round from the previous
    /// round's eliminated candidate. Empty in round 1.
    pub transfers: Vec<(CandidateId, u64)>,
    /// Ballots of the previous round's eliminated candidate that had no
    /// continuing preference left.
    pub exhausted_this_round: u64,
}

impl IrvRound {
    pub fn tally(&self, name: &str) -> Option<u64> {
        lookup(&self.tallies, name)
    }

    pub fn transfer(&self, name: &str) -> Option<u64> {
        lookup(&self.transfers, name)
    }
}

fn lookup(rows: &[(CandidateId, u64)], name: &str) -> Option<u64> {
    rows.iter()
        .find(|(c, _)| c.as_str() == name)
        .map(|(_, n)| *n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrvOutcome {
    pub rounds: Vec<IrvRound>,
    pub winner: CandidateId,
    /// Ballots excluded because of a first-place tie.
    pub invalid_overvotes: u64,
}

impl IrvOutcome {
    pub fn final_round(&self) -> &IrvRound {
        self.rounds.last().expect("at least one round")
    }

    /// Round in which `name` was eliminated, if they were.
    pub fn elimination_round(&self, name: &str) -> Option<usize> {
        self.rounds
            .iter()
            .find(|r| r.eliminated.as_ref().is_some_and(|c| c.as_str() == name))
            .map(|r| r.round_index)
    }
}

pub fn tabulate_irv(profile: &CondensedProfile) -> Result<IrvOutcome> {
    tabulate_irv_with(profile, TiePolicy::Error)
}

pub fn tabulate_irv_with(profile: &CondensedProfile, policy: TiePolicy) -> Result<IrvOutcome> {
    let roster = profile.roster();
    let n = roster.len();
    if n == 0 {
        return Err(Error::NoActiveBallots);
    }

    // (ranking, position of the current preference, count)
    let mut piles: Vec<(Vec<usize>, usize, u64)> = profile
        .patterns()
        .filter(|(p, _)| !p.is_overvote())
        .map(|(p, count)| (p.ranking(n), 0, count))
        .collect();
    let mut continuing = vec![true; n];
    let mut rounds = Vec::new();
    let mut transfers: Vec<(CandidateId, u64)> = Vec::new();
    let mut exhausted = 0u64;

    loop {
        let mut tallies = vec![0u64; n];
        for (ranking, pos, count) in &piles {
            if let Some(&c) = ranking.get(*pos) {
                tallies[c] += count;
            }
        }
        let active: u64 = tallies.iter().sum();
        let live: Vec<usize> = (0..n).filter(|&c| continuing[c]).collect();
        let round_index = rounds.len() + 1;
        let tally_rows = live
            .iter()
            .map(|&c| (roster.get(c).clone(), tallies[c]))
            .collect();

        if active == 0 {
            return Err(Error::NoActiveBallots);
        }

        let leader = *live.iter().max_by_key(|&&c| tallies[c]).expect("nonempty");
        if live.len() == 1 || tallies[leader] * 2 > active {
            rounds.push(IrvRound {
                round_index,
                tallies: tally_rows,
                active_ballots: active,
                eliminated: None,
                transfers: std::mem::take(&mut transfers),
                exhausted_this_round: exhausted,
            });
            return Ok(IrvOutcome {
                rounds,
                winner: roster.get(leader).clone(),
                invalid_overvotes: profile.total_overvotes(),
            });
        }

        let low = live.iter().map(|&c| tallies[c]).min().expect("nonempty");
        let lowest: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&c| tallies[c] == low)
            .collect();
        let loser = match (lowest.as_slice(), policy) {
            ([only], _) => *only,
            (_, TiePolicy::LastInRoster) => *lowest.last().expect("nonempty"),
            (_, TiePolicy::Error) => {
                return Err(Error::DecisiveTie {
                    candidates: lowest.iter().map(|&c| roster.get(c).clone()).collect(),
                })
            }
        };

        rounds.push(IrvRound {
            round_index,
            tallies: tally_rows,
            active_ballots: active,
            eliminated: Some(roster.get(loser).clone()),
            transfers: std::mem::take(&mut transfers),
            exhausted_this_round: exhausted,
        });

        continuing[loser] = false;
        let mut received = vec![0u64; n];
        exhausted = 0;
        for (ranking, pos, count) in piles.iter_mut() {
            if ranking.get(*pos) != Some(&loser) {
                continue;
            }
            while *pos < ranking.len() && !continuing[ranking[*pos]] {
                *pos += 1;
            }
            match ranking.get(*pos) {
                Some(&next) => received[next] += *count,
                None => exhausted += *count,
            }
        }
        transfers = (0..n)
            .filter(|&c| continuing[c])
            .map(|c| (roster.get(c).clone(), received[c]))
            .collect();
    }
}

/// Shares for one round, in percent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundShares {
    pub round_index: usize,
    /// (candidate, share of this round's active ballots, share of round-1 ballots)
    pub shares: Vec<(CandidateId, Rational, Rational)>,
}

pub fn irv_percentages(outcome: &IrvOutcome) -> Vec<RoundShares> {
    let first_active = outcome.rounds.first().map_or(0, |r| r.active_ballots);
    outcome
        .rounds
        .iter()
        .map(|r| RoundShares {
            round_index: r.round_index,
            shares: r
                .tallies
                .iter()
                .map(|(c, n)| {
                    (
                        c.clone(),
                        percent(*n, r.active_ballots),
                        percent(*n, first_active),
                    )
                })
                .collect(),
        })
        .collect()
}
