//! STAR-voting counterfactual.
//!
//! First choices get 5 stars and last choices 0. Bullet voters give 0 to
//! both others, pair-overvote voters give 5 to both members of the pair,
//! and all-candidate overvotes are left out. Each full-ranking group gives
//! its second choice an average of `s` stars, `1 <= s <= 4`, in hundredths.
//! The two highest totals advance to a runoff decided ballot by ballot.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{grid, int, ratio, to_decimal, Rational};
use crate::profile::{
    first_place_totals, second_place_totals, CandidateId, CondensedProfile, Pattern, PerCandidate,
};
use crate::scenario::{GroupParams, Winner};

pub const MAX_STARS: u64 = 5;
pub const MIN_SECOND: u64 = 1;
pub const MAX_SECOND: u64 = 4;

/// Average stars each full-ranking group gives its second choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarScenario(pub GroupParams);

impl StarScenario {
    pub fn uniform(s: Rational) -> Self {
        StarScenario(GroupParams::uniform(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Runoff {
    pub a: CandidateId,
    pub b: CandidateId,
    pub a_votes: u64,
    pub b_votes: u64,
    /// Ballots scoring both finalists equally, above zero.
    pub no_preference: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarOutcome {
    pub scores: PerCandidate<Rational>,
    /// Finalists in roster order.
    pub finalists: (CandidateId, CandidateId),
    pub runoff: Runoff,
    pub winner: Winner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreRange {
    pub min: PerCandidate<u64>,
    pub max: PerCandidate<u64>,
}

pub fn star_range(profile: &CondensedProfile) -> Result<ScoreRange> {
    profile.require_three()?;
    let base = first_place_totals(profile, true);
    let slope = second_place_totals(profile);
    let at = |s: u64| -> Vec<u64> {
        base.values()
            .iter()
            .zip(slope.values())
            .map(|(b, k)| MAX_STARS * b + s * k)
            .collect()
    };
    let roster = profile.roster().clone();
    Ok(ScoreRange {
        min: PerCandidate::new(roster.clone(), at(MIN_SECOND)),
        max: PerCandidate::new(roster, at(MAX_SECOND)),
    })
}

fn check_stars(s: &Rational) -> Result<()> {
    let hundred = BigInt::from(100u32);
    if *s < int(MIN_SECOND) || *s > int(MAX_SECOND) {
        return Err(Error::InvalidParameter(format!(
            "second-choice stars {} are outside [1, 4]",
            to_decimal(s, 4)
        )));
    }
    if !(s * Rational::from_integer(hundred)).is_integer() {
        return Err(Error::InvalidParameter(format!(
            "second-choice stars {} are finer than hundredths",
            to_decimal(s, 4)
        )));
    }
    Ok(())
}

/// Stars a ballot of `pattern` gives each candidate; `None` for ballots
/// outside the model.
fn ballot_scores(pattern: Pattern, n: usize, second: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let mut out = vec![Rational::zero(); n];
    match pattern {
        Pattern::Bullet(a) => out[a] = int(MAX_STARS),
        Pattern::Full(a, b) => {
            out[a] = int(MAX_STARS);
            out[b] = second[a][b].clone();
        }
        Pattern::OverTwo(a, b) => {
            out[a] = int(MAX_STARS);
            out[b] = int(MAX_STARS);
        }
        Pattern::OverAll => return None,
    }
    Some(out)
}

fn head_to_head(
    profile: &CondensedProfile,
    second: &[Vec<Rational>],
    a: usize,
    b: usize,
) -> Runoff {
    let n = profile.roster().len();
    let (mut av, mut bv, mut tie) = (0, 0, 0);
    for (pattern, count) in profile.patterns() {
        let Some(s) = ballot_scores(pattern, n, second) else {
            continue;
        };
        if s[a] > s[b] {
            av += count;
        } else if s[b] > s[a] {
            bv += count;
        } else if !s[a].is_zero() {
            tie += count;
        }
    }
    Runoff {
        a: profile.roster().get(a).clone(),
        b: profile.roster().get(b).clone(),
        a_votes: av,
        b_votes: bv,
        no_preference: tie,
    }
}

pub fn evaluate_star(profile: &CondensedProfile, scenario: &StarScenario) -> Result<StarOutcome> {
    profile.require_three()?;
    let roster = profile.roster();
    let n = roster.len();
    let second = scenario.0.resolve(roster, check_stars)?;

    let mut scores = vec![Rational::zero(); n];
    for (pattern, count) in profile.patterns() {
        if let Some(s) = ballot_scores(pattern, n, &second) {
            for (total, stars) in scores.iter_mut().zip(s) {
                *total += stars * int(count);
            }
        }
    }

    let (fa, fb) = pick_finalists(profile, &second, &scores)?;
    let runoff = head_to_head(profile, &second, fa, fb);
    let winner = if runoff.a_votes > runoff.b_votes {
        Winner::Single(runoff.a.clone())
    } else if runoff.b_votes > runoff.a_votes {
        Winner::Single(runoff.b.clone())
    } else {
        Winner::Tie(vec![runoff.a.clone(), runoff.b.clone()])
    };
    Ok(StarOutcome {
        scores: PerCandidate::new(roster.clone(), scores),
        finalists: (roster.get(fa).clone(), roster.get(fb).clone()),
        runoff,
        winner,
    })
}

/// Top two scores advance. A tie for the last slot goes to the head-to-head
/// winner among the tied candidates; if that is also tied it is an error.
fn pick_finalists(
    profile: &CondensedProfile,
    second: &[Vec<Rational>],
    scores: &[Rational],
) -> Result<(usize, usize)> {
    let roster = profile.roster();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&x, &y| scores[y].cmp(&scores[x]).then(x.cmp(&y)));
    let cut = &scores[order[1]];
    let above: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&c| scores[c] > *cut)
        .collect();
    let tied: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&c| scores[c] == *cut)
        .collect();
    let slots = 2 - above.len();

    let unresolved = |cs: &[usize]| Error::FinalistTie {
        candidates: cs.iter().map(|&c| roster.get(c).clone()).collect(),
    };
    let chosen: Vec<usize> = if tied.len() == slots {
        tied.clone()
    } else if slots == 1 && tied.len() == 2 {
        let r = head_to_head(profile, second, tied[0], tied[1]);
        match r.a_votes.cmp(&r.b_votes) {
            std::cmp::Ordering::Greater => vec![tied[0]],
            std::cmp::Ordering::Less => vec![tied[1]],
            std::cmp::Ordering::Equal => return Err(unresolved(&tied)),
        }
    } else if slots == 2 && tied.len() == 3 {
        // Drop the one candidate who loses head-to-head to both others.
        let loses_all = |c: usize| {
            tied.iter().filter(|&&x| x != c).all(|&x| {
                let r = head_to_head(profile, second, c, x);
                r.a_votes < r.b_votes
            })
        };
        let losers: Vec<usize> = tied.iter().copied().filter(|&c| loses_all(c)).collect();
        match losers.as_slice() {
            [out] => tied.iter().copied().filter(|c| c != out).collect(),
            _ => return Err(unresolved(&tied)),
        }
    } else {
        return Err(unresolved(&tied));
    };

    let mut pair: Vec<usize> = above.into_iter().chain(chosen).collect();
    pair.sort_unstable();
    Ok((pair[0], pair[1]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarThreshold {
    /// Uniform second-choice stars, on the hundredths grid.
    pub stars: Rational,
    /// Score of the guaranteed candidate at `stars`.
    pub score: Rational,
    /// The rival's maximum possible score.
    pub rival_max: u64,
}

/// Least uniform second-choice average on the 0.01 grid at which
/// `guaranteed` scores strictly above `rival`'s maximum.
pub fn uniform_star_threshold(
    profile: &CondensedProfile,
    guaranteed: &str,
    rival: &str,
) -> Result<StarThreshold> {
    let range = star_range(profile)?;
    let roster = profile.roster();
    let (g, r) = (roster.require(guaranteed)?, roster.require(rival)?);
    if g == r {
        return Err(Error::InvalidParameter(
            "guaranteed and rival must be different candidates".into(),
        ));
    }
    let base = MAX_STARS * first_place_totals(profile, true).at(g);
    let slope = *second_place_totals(profile).at(g);
    let rival_max = *range.max.at(r);

    let stars = if *range.min.at(g) > rival_max {
        int(MIN_SECOND)
    } else if slope == 0 {
        return Err(Error::Unattainable(format!(
            "{guaranteed} has no second-choice support and cannot exceed {rival_max}"
        )));
    } else {
        // least hundredth strictly above (rival_max - base) / slope
        let hundredths = (int(100) * ratio(rival_max - base, slope)).floor() + Rational::one();
        hundredths / int(100)
    };
    if stars > int(MAX_SECOND) {
        return Err(Error::Unattainable(format!(
            "{guaranteed} cannot exceed {rival}'s maximum of {rival_max} with at most {MAX_SECOND} stars"
        )));
    }
    let score = int(base) + int(slope) * &stars;
    Ok(StarThreshold {
        stars,
        score,
        rival_max,
    })
}

/// Winners at uniform `s` from 1 to 4 by `step`.
pub fn sweep_star(profile: &CondensedProfile, step: &Rational) -> Result<Vec<(Rational, Winner)>> {
    let points = grid(&int(MIN_SECOND), &int(MAX_SECOND), step)?;
    sweep_points(profile, &points)
}

pub fn sweep_points(
    profile: &CondensedProfile,
    points: &[Rational],
) -> Result<Vec<(Rational, Winner)>> {
    points
        .iter()
        .map(|s| {
            let out = evaluate_star(profile, &StarScenario::uniform(s.clone()))?;
            Ok((s.clone(), out.winner))
        })
        .collect()
}
