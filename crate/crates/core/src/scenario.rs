//! Behavior parameters for the full-ranking groups of a three-candidate
//! race, shared by the approval and STAR models.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::profile::{CandidateId, Roster};

/// A full-ranking group: voters who ranked `first` then `second`.
pub type Group = (CandidateId, CandidateId);

/// One value per full-ranking group: a default plus per-group overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    default: Rational,
    overrides: BTreeMap<Group, Rational>,
}

impl GroupParams {
    pub fn uniform(value: Rational) -> Self {
        GroupParams {
            default: value,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_group(mut self, first: &str, second: &str, value: Rational) -> Result<Self> {
        let group = (CandidateId::new(first)?, CandidateId::new(second)?);
        if group.0 == group.1 {
            return Err(Error::InvalidParameter(format!(
                "group {first}>{second} names the same candidate twice"
            )));
        }
        self.overrides.insert(group, value);
        Ok(self)
    }

    pub fn default_value(&self) -> &Rational {
        &self.default
    }

    pub fn overrides(&self) -> impl Iterator<Item = (&Group, &Rational)> {
        self.overrides.iter()
    }

    /// Values indexed `[first][second]` against a roster, checking every
    /// value with `check`.
    pub(crate) fn resolve(
        &self,
        roster: &Roster,
        check: impl Fn(&Rational) -> Result<()>,
    ) -> Result<Vec<Vec<Rational>>> {
        check(&self.default)?;
        let n = roster.len();
        let mut table = vec![vec![self.default.clone(); n]; n];
        for ((first, second), value) in &self.overrides {
            check(value)?;
            let a = roster.require(first.as_str())?;
            let b = roster.require(second.as_str())?;
            table[a][b] = value.clone();
        }
        Ok(table)
    }
}

/// Winner of a scored contest; exact ties are reported, never broken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Winner {
    Single(CandidateId),
    Tie(Vec<CandidateId>),
}

impl Winner {
    pub fn single(&self) -> Option<&CandidateId> {
        match self {
            Winner::Single(c) => Some(c),
            Winner::Tie(_) => None,
        }
    }

    pub fn is(&self, name: &str) -> bool {
        self.single().is_some_and(|c| c.as_str() == name)
    }

    pub fn label(&self) -> String {
        match self {
            Winner::Single(c) => c.to_string(),
            Winner::Tie(cs) => {
                let names: Vec<&str> = cs.iter().map(|c| c.as_str()).collect();
                format!("tie:{}", names.join("+"))
            }
        }
    }
}

/// Highest-scoring candidate(s) in roster order.
pub(crate) fn argmax(roster: &Roster, scores: &[Rational]) -> Winner {
    let Some(best) = scores.iter().max() else {
        return Winner::Tie(Vec::new());
    };
    let top: Vec<CandidateId> = scores
        .iter()
        .enumerate()
        .filter(|(_, s)| *s == best)
        .map(|(i, _)| roster.get(i).clone())
        .collect();
    if top.len() == 1 {
        Winner::Single(top.into_iter().next().expect("one"))
    } else {
        Winner::Tie(top)
    }
}
