//! Head-to-head tallies, Condorcet winner and loser, and center-squeeze
//! diagnosis.

use crate::error::Result;
use crate::exact::{percent, Rational};
use crate::irv::tabulate_irv;
use crate::profile::{CandidateId, CondensedProfile, Pattern, Roster};

/// Which ballots take part in pairwise comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Bullet votes and full rankings only.
    #[default]
    RankedOnly,
    /// Also first-place ties between two candidates, which prefer both over
    /// everyone else.
    IncludeTopTies,
}

impl Basis {
    pub fn label(self) -> &'static str {
        match self {
            Basis::RankedOnly => "ranked-only",
            Basis::IncludeTopTies => "include-ties",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseTally {
    roster: Roster,
    basis: Basis,
    /// prefers[a][b]: ballots ranking a above b. Diagonal unused.
    prefers: Vec<Vec<u64>>,
    total: u64,
}

impl PairwiseTally {
    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Ballots in the basis.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn prefers_idx(&self, a: usize, b: usize) -> u64 {
        assert_ne!(a, b, "no self-comparison");
        self.prefers[a][b]
    }

    pub fn no_preference_idx(&self, a: usize, b: usize) -> u64 {
        self.total - self.prefers_idx(a, b) - self.prefers_idx(b, a)
    }

    pub fn prefers(&self, a: &str, b: &str) -> Result<u64> {
        let (a, b) = (self.roster.require(a)?, self.roster.require(b)?);
        Ok(self.prefers_idx(a, b))
    }

    pub fn no_preference(&self, a: &str, b: &str) -> Result<u64> {
        let (a, b) = (self.roster.require(a)?, self.roster.require(b)?);
        Ok(self.no_preference_idx(a, b))
    }

    /// Unordered pairs in roster order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.roster.len();
        (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
    }
}

pub fn pairwise_tallies(profile: &CondensedProfile, basis: Basis) -> PairwiseTally {
    let n = profile.roster().len();
    let mut prefers = vec![vec![0u64; n]; n];
    let mut total = 0;
    for (pattern, count) in profile.patterns() {
        let ranked = match pattern {
            Pattern::OverAll => continue,
            Pattern::OverTwo(..) if basis == Basis::RankedOnly => continue,
            Pattern::OverTwo(a, b) => {
                for c in (0..n).filter(|&c| c != a && c != b) {
                    prefers[a][c] += count;
                    prefers[b][c] += count;
                }
                total += count;
                continue;
            }
            p => p.ranking(n),
        };
        // Ranked candidates beat everyone ranked lower or not at all.
        for (i, &a) in ranked.iter().enumerate() {
            for c in (0..n).filter(|c| !ranked[..=i].contains(c)) {
                prefers[a][c] += count;
            }
        }
        total += count;
    }
    PairwiseTally {
        roster: profile.roster().clone(),
        basis,
        prefers,
        total,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairMargin {
    pub a: CandidateId,
    pub b: CandidateId,
    pub a_votes: u64,
    pub b_votes: u64,
    pub no_preference: u64,
    /// Percent of ballots expressing a preference in this pair.
    pub a_share: Rational,
    pub b_share: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondorcetReport {
    pub winner: Option<CandidateId>,
    pub loser: Option<CandidateId>,
    pub margins: Vec<PairMargin>,
}

pub fn pair_margins(t: &PairwiseTally) -> Vec<PairMargin> {
    t.pairs()
        .map(|(a, b)| {
            let (av, bv) = (t.prefers_idx(a, b), t.prefers_idx(b, a));
            PairMargin {
                a: t.roster.get(a).clone(),
                b: t.roster.get(b).clone(),
                a_votes: av,
                b_votes: bv,
                no_preference: t.no_preference_idx(a, b),
                a_share: percent(av, av + bv),
                b_share: percent(bv, av + bv),
            }
        })
        .collect()
}

pub fn condorcet_winner_loser(t: &PairwiseTally) -> CondorcetReport {
    let n = t.roster.len();
    let find = |beats: &dyn Fn(usize, usize) -> bool| {
        if n < 2 {
            return None;
        }
        (0..n)
            .find(|&w| (0..n).filter(|&x| x != w).all(|x| beats(w, x)))
            .map(|w| t.roster.get(w).clone())
    };
    CondorcetReport {
        winner: find(&|w, x| t.prefers_idx(w, x) > t.prefers_idx(x, w)),
        loser: find(&|l, x| t.prefers_idx(l, x) < t.prefers_idx(x, l)),
        margins: pair_margins(t),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterSqueeze {
    pub condorcet_winner: Option<CandidateId>,
    pub irv_winner: CandidateId,
    /// Round in which IRV eliminated the Condorcet winner.
    pub irv_elimination_round: Option<usize>,
    pub squeezed: bool,
}

/// A center squeeze: a Condorcet winner (ranked-only basis) exists and IRV
/// eliminates them before the final round.
pub fn detect_center_squeeze(profile: &CondensedProfile) -> Result<CenterSqueeze> {
    let irv = tabulate_irv(profile)?;
    let report = condorcet_winner_loser(&pairwise_tallies(profile, Basis::RankedOnly));
    let round = report
        .winner
        .as_ref()
        .and_then(|w| irv.elimination_round(w.as_str()));
    Ok(CenterSqueeze {
        squeezed: round.is_some(),
        condorcet_winner: report.winner,
        irv_winner: irv.winner,
        irv_elimination_round: round,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(rows: &[(Pattern, u64)]) -> CondensedProfile {
        let mut p = CondensedProfile::new(Roster::new(["A", "B", "C"]).unwrap());
        for (pat, n) in rows {
            p.add_pattern(*pat, *n);
        }
        p
    }

    #[test]
    fn cycle_has_no_winner_or_loser() {
        let p = profile(&[
            (Pattern::Full(0, 1), 4),
            (Pattern::Full(1, 2), 3),
            (Pattern::Full(2, 0), 2),
        ]);
        let t = pairwise_tallies(&p, Basis::RankedOnly);
        assert_eq!(t.prefers("A", "B").unwrap(), 6);
        assert_eq!(t.prefers("B", "A").unwrap(), 3);
        let r = condorcet_winner_loser(&t);
        assert_eq!(r.winner, None);
        assert_eq!(r.loser, None);
        assert!(!detect_center_squeeze(&p).unwrap().squeezed);
    }

    #[test]
    fn two_candidate_majority() {
        let mut p = CondensedProfile::new(Roster::new(["A", "B"]).unwrap());
        p.add_pattern(Pattern::Bullet(0), 3);
        p.add_pattern(Pattern::Bullet(1), 2);
        let r = condorcet_winner_loser(&pairwise_tallies(&p, Basis::RankedOnly));
        assert_eq!(r.winner.unwrap().as_str(), "A");
        assert_eq!(r.loser.unwrap().as_str(), "B");
    }

    #[test]
    fn bullet_majority_is_not_squeezed() {
        let p = profile(&[
            (Pattern::Bullet(0), 3),
            (Pattern::Bullet(1), 1),
            (Pattern::Bullet(2), 1),
        ]);
        let t = pairwise_tallies(&p, Basis::RankedOnly);
        assert_eq!(t.prefers("A", "B").unwrap(), 3);
        assert_eq!(t.no_preference("B", "C").unwrap(), 3);
        let s = detect_center_squeeze(&p).unwrap();
        assert_eq!(s.condorcet_winner.unwrap().as_str(), "A");
        assert_eq!(s.irv_winner.as_str(), "A");
        assert!(!s.squeezed);
    }

    #[test]
    fn include_ties_basis() {
        let p = profile(&[
            (Pattern::Full(0, 1), 2),
            (Pattern::OverTwo(0, 1), 3),
            (Pattern::OverAll, 4),
        ]);
        let ranked = pairwise_tallies(&p, Basis::RankedOnly);
        let ties = pairwise_tallies(&p, Basis::IncludeTopTies);
        assert_eq!(ranked.total(), 2);
        assert_eq!(ties.total(), 5);
        assert_eq!(ties.prefers("A", "C").unwrap(), 5);
        assert_eq!(ties.prefers("B", "C").unwrap(), 5);
        assert_eq!(ties.prefers("A", "B").unwrap(), 2);
        assert_eq!(ties.no_preference("A", "B").unwrap(), 3);
    }

    #[test]
    fn truncated_rankings_in_larger_roster() {
        let mut p = CondensedProfile::new(Roster::new(["A", "B", "C", "D"]).unwrap());
        p.add_pattern(Pattern::Full(2, 1), 1);
        let t = pairwise_tallies(&p, Basis::RankedOnly);
        assert_eq!(t.prefers("C", "B").unwrap(), 1);
        assert_eq!(t.prefers("B", "A").unwrap(), 1);
        assert_eq!(t.prefers("B", "D").unwrap(), 1);
        assert_eq!(t.no_preference("A", "D").unwrap(), 1);
    }
}
