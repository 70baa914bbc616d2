//! Approval-voting counterfactual.
//!
//! Bullet voters approve their one candidate, pair-overvote voters approve
//! both members of the pair, and all-candidate overvotes are left out.
//! Voters with a full ranking approve their first choice, never their
//! last, and approve their second choice with the group's probability `p`.
//! Scores are the exact expected approval counts.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{grid, int, is_unit_interval, ratio, to_decimal, Rational};
use crate::profile::{
    first_place_totals, second_place_totals, CondensedProfile, Pattern, PerCandidate,
};
use crate::scenario::{argmax, GroupParams, Winner};

/// Fraction of each full-ranking group approving its second choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApprovalScenario(pub GroupParams);

impl ApprovalScenario {
    pub fn uniform(p: Rational) -> Self {
        ApprovalScenario(GroupParams::uniform(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApprovalOutcome {
    pub scores: PerCandidate<Rational>,
    pub winner: Winner,
    /// Mean approvals among voters with a full ranking. `None` without any.
    pub mean_approvals_rankers: Option<Rational>,
    /// Mean approvals over every ballot in the model (full rankings,
    /// bullet votes, and pair overvotes).
    pub mean_approvals_all: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApprovalRange {
    pub min: PerCandidate<u64>,
    pub max: PerCandidate<u64>,
}

pub fn approval_range(profile: &CondensedProfile) -> Result<ApprovalRange> {
    profile.require_three()?;
    let base = first_place_totals(profile, true);
    let slope = second_place_totals(profile);
    let max = base
        .values()
        .iter()
        .zip(slope.values())
        .map(|(b, s)| b + s)
        .collect();
    Ok(ApprovalRange {
        max: PerCandidate::new(profile.roster().clone(), max),
        min: base,
    })
}

fn check_probability(p: &Rational) -> Result<()> {
    if is_unit_interval(p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "approval fraction {} is outside [0, 1]",
            to_decimal(p, 4)
        )))
    }
}

pub fn evaluate_approval(
    profile: &CondensedProfile,
    scenario: &ApprovalScenario,
) -> Result<ApprovalOutcome> {
    profile.require_three()?;
    let roster = profile.roster();
    let p = scenario.0.resolve(roster, check_probability)?;

    let mut scores: Vec<Rational> = first_place_totals(profile, true)
        .values()
        .iter()
        .map(|&b| int(b))
        .collect();
    let mut extra = Rational::zero();
    for (pattern, count) in profile.patterns() {
        if let Pattern::Full(a, b) = pattern {
            let added = &p[a][b] * int(count);
            scores[b] += &added;
            extra += added;
        }
    }

    let rankers = profile.total_full();
    let model_ballots = profile.total_valid_ranked() + profile.total_pair_overvotes();
    let all_approvals =
        int(profile.total_valid_ranked() + 2 * profile.total_pair_overvotes()) + &extra;
    let mean_approvals_rankers = (rankers > 0).then(|| Rational::one() + &extra / int(rankers));
    let mean_approvals_all = (model_ballots > 0).then(|| all_approvals / int(model_ballots));

    Ok(ApprovalOutcome {
        winner: argmax(roster, &scores),
        scores: PerCandidate::new(roster.clone(), scores),
        mean_approvals_rankers,
        mean_approvals_all,
    })
}

/// Least uniform `p` in `[0, 1]` at which `riser` catches `leader`, or
/// `None` if that never happens on the interval.
pub fn uniform_threshold(
    profile: &CondensedProfile,
    riser: &str,
    leader: &str,
) -> Result<Option<Rational>> {
    profile.require_three()?;
    let roster = profile.roster();
    let (r, l) = (roster.require(riser)?, roster.require(leader)?);
    if r == l {
        return Err(Error::InvalidParameter(
            "riser and leader must be different candidates".into(),
        ));
    }
    let base = first_place_totals(profile, true);
    let slope = second_place_totals(profile);
    let (base_r, base_l) = (*base.at(r), *base.at(l));
    let (slope_r, slope_l) = (*slope.at(r), *slope.at(l));
    if base_r >= base_l {
        return Ok(Some(Rational::zero()));
    }
    if slope_r <= slope_l {
        return Ok(None);
    }
    let p = ratio(base_l - base_r, slope_r - slope_l);
    Ok((p <= Rational::one()).then_some(p))
}

/// Least number of second-choice approvals `candidate` needs from the
/// full-ranking group `first>candidate` to beat every rival's maximum.
pub fn min_second_votes_to_clinch(
    profile: &CondensedProfile,
    candidate: &str,
    group_first: &str,
) -> Result<u64> {
    let range = approval_range(profile)?;
    let roster = profile.roster();
    let c = roster.require(candidate)?;
    let f = roster.require(group_first)?;
    if c == f {
        return Err(Error::InvalidParameter(format!(
            "{candidate} cannot be second choice of their own group"
        )));
    }
    let rival_max = (0..roster.len())
        .filter(|&x| x != c)
        .map(|x| *range.max.at(x))
        .max()
        .unwrap_or(0);
    let base = *range.min.at(c);
    let needed = (rival_max + 1).saturating_sub(base);
    let available = profile.count(Pattern::Full(f, c));
    if needed > available {
        return Err(Error::Unattainable(format!(
            "{candidate} needs {needed} approvals from the {group_first}>{candidate} group, which has {available}"
        )));
    }
    Ok(needed)
}

/// Winners at uniform `p = 0, step, 2·step, …, 1`.
pub fn sweep_uniform(
    profile: &CondensedProfile,
    step: &Rational,
) -> Result<Vec<(Rational, Winner)>> {
    let points = grid(&Rational::zero(), &Rational::one(), step)?;
    sweep_points(profile, &points)
}

pub fn sweep_points(
    profile: &CondensedProfile,
    points: &[Rational],
) -> Result<Vec<(Rational, Winner)>> {
    points
        .iter()
        .map(|p| {
            let out = evaluate_approval(profile, &ApprovalScenario::uniform(p.clone()))?;
            Ok((p.clone(), out.winner))
        })
        .collect()
}
