//! Ballot classification and condensed preference profiles.
//!
//! A [`CondensedProfile`] stores, for a fixed roster, how many ballots fall
//! into each normalized preference pattern: a bullet vote, a first/second
//! ranking, a first-place tie between two candidates, or a first-place tie
//! across the whole roster. Every tabulation in this crate works from that
//! aggregate rather than from individual ballots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Prefix that marks a write-in mark in raw ballot data.
pub const WRITE_IN_PREFIX: &str = "WRITEIN:";

/// Characters that cannot appear in candidate names; they delimit the
/// condensed profile pattern tokens.
pub const RESERVED_NAME_CHARS: &[char] = &[',', '>', '+', '\n', '\r'];

/// Name of a candidate on the roster.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(String);

impl CandidateId {
    pub fn new(name: impl AsRef<str>) -> Result<Self> {
        let name = name.as_ref().trim();
        if name.is_empty() {
            return Err(Error::InvalidRoster("empty candidate name".into()));
        }
        if name.contains(RESERVED_NAME_CHARS) || name.starts_with(WRITE_IN_PREFIX) {
            return Err(Error::InvalidRoster(format!(
                "candidate name {name:?} uses a reserved character or prefix"
            )));
        }
        Ok(CandidateId(name.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CandidateId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Ordered list of distinct candidates. The order is only used for output.
///
/// The default roster is empty; it only arises from an empty condensed file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Roster(Vec<CandidateId>);

impl Roster {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for name in names {
            let id = CandidateId::new(name)?;
            if !seen.insert(id.clone()) {
                return Err(Error::InvalidRoster(format!("duplicate candidate {id}")));
            }
            out.push(id);
        }
        if out.is_empty() {
            return Err(Error::InvalidRoster("roster has no candidates".into()));
        }
        Ok(Roster(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn candidates(&self) -> &[CandidateId] {
        &self.0
    }

    pub fn get(&self, index: usize) -> &CandidateId {
        &self.0[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        let name = name.trim();
        self.0.iter().position(|c| c.as_str() == name)
    }

    /// Like [`Roster::index_of`] but reports an unknown-candidate error.
    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownCandidate(name.trim().to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &CandidateId> {
        self.0.iter()
    }
}

/// One mark on a paper ballot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    Candidate(CandidateId),
    /// Opaque write-in text (everything after the prefix).
    WriteIn(String),
}

impl Mark {
    /// Parse a raw mark token, resolving it against the roster.
    pub fn parse(token: &str, roster: &Roster) -> Result<Self> {
        if let Some(rest) = token.strip_prefix(WRITE_IN_PREFIX) {
            return Ok(Mark::WriteIn(rest.to_string()));
        }
        let idx = roster.require(token)?;
        Ok(Mark::Candidate(roster.get(idx).clone()))
    }
}

/// A raw ranked ballot: one (possibly empty) set of marks per rank position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedBallot {
    pub ranks: Vec<BTreeSet<Mark>>,
}

impl RankedBallot {
    pub fn new(ranks: Vec<BTreeSet<Mark>>) -> Self {
        RankedBallot { ranks }
    }

    /// Build a ballot from candidate names, one slice per rank.
    /// Names starting with [`WRITE_IN_PREFIX`] become write-in marks.
    pub fn from_names(ranks: &[&[&str]], roster: &Roster) -> Result<Self> {
        let ranks = ranks
            .iter()
            .map(|rank| rank.iter().map(|t| Mark::parse(t, roster)).collect())
            .collect::<Result<Vec<_>>>()?;
        Ok(RankedBallot { ranks })
    }
}

/// Normalized classification of a single ballot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BallotClass {
    Bullet(CandidateId),
    Full(CandidateId, CandidateId),
    /// First-place tie between exactly two candidates (stored sorted).
    OvervoteTopTwo(CandidateId, CandidateId),
    /// First-place tie covering every roster candidate.
    OvervoteTopAll,
    Blank,
}

impl BallotClass {
    /// Pair overvote with members in canonical order.
    pub fn overvote_pair(a: CandidateId, b: CandidateId) -> Self {
        if a <= b {
            BallotClass::OvervoteTopTwo(a, b)
        } else {
            BallotClass::OvervoteTopTwo(b, a)
        }
    }
}

/// Index-based counterpart of [`BallotClass`] used for storage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Bullet(usize),
    Full(usize, usize),
    /// Members are stored with the lower roster index first.
    OverTwo(usize, usize),
    OverAll,
}

impl Pattern {
    pub fn over_two(a: usize, b: usize) -> Self {
        Pattern::OverTwo(a.min(b), a.max(b))
    }

    /// First-place candidate of a ranked (non-overvote) pattern.
    pub fn first(&self) -> Option<usize> {
        match *self {
            Pattern::Bullet(a) | Pattern::Full(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn is_overvote(&self) -> bool {
        matches!(self, Pattern::OverTwo(..) | Pattern::OverAll)
    }

    /// Candidates in preference order for ranked patterns. With a
    /// three-candidate roster a full ranking implies the last place.
    pub fn ranking(&self, roster_len: usize) -> Vec<usize> {
        match *self {
            Pattern::Bullet(a) => vec![a],
            Pattern::Full(a, b) => {
                let mut order = vec![a, b];
                if roster_len == 3 {
                    order.extend((0..3).find(|c| *c != a && *c != b));
                }
                order
            }
            Pattern::OverTwo(..) | Pattern::OverAll => Vec::new(),
        }
    }
}

/// Per-candidate values in roster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerCandidate<T> {
    roster: Roster,
    values: Vec<T>,
}

impl<T> PerCandidate<T> {
    pub fn new(roster: Roster, values: Vec<T>) -> Self {
        assert_eq!(roster.len(), values.len(), "one value per candidate");
        PerCandidate { roster, values }
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.roster.index_of(name).map(|i| &self.values[i])
    }

    pub fn at(&self, index: usize) -> &T {
        &self.values[index]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CandidateId, &T)> {
        self.roster.iter().zip(self.values.iter())
    }
}

/// Classify one ballot.
///
/// Write-in marks are dropped, repeated marks for a candidate already seen at
/// a higher rank are dropped, and then empty rank positions are skipped. The
/// first remaining rank decides the class; for a single first choice, the next
/// remaining rank supplies a second choice only when it holds exactly one mark.
pub fn classify_ballot(ballot: &RankedBallot, roster: &Roster) -> Result<BallotClass> {
    if roster.len() < 2 {
        return Err(Error::InvalidRoster(
            "classification needs at least two candidates".into(),
        ));
    }
    if ballot.ranks.len() > roster.len() {
        return Err(Error::MalformedBallot(format!(
            "{} rank positions for a {}-candidate roster",
            ballot.ranks.len(),
            roster.len()
        )));
    }

    let mut seen = BTreeSet::new();
    let mut ranks: Vec<Vec<usize>> = Vec::new();
    for rank in &ballot.ranks {
        let mut marks = Vec::new();
        for mark in rank {
            if let Mark::Candidate(c) = mark {
                let idx = roster.require(c.as_str())?;
                if !seen.contains(&idx) && !marks.contains(&idx) {
                    marks.push(idx);
                }
            }
        }
        seen.extend(marks.iter().copied());
        if !marks.is_empty() {
            ranks.push(marks);
        }
    }

    let Some(top) = ranks.first() else {
        return Ok(BallotClass::Blank);
    };
    let name = |i: usize| roster.get(i).clone();
    match top.len() {
        1 => {
            let first = top[0];
            match ranks.get(1) {
                Some(next) if next.len() == 1 => Ok(BallotClass::Full(name(first), name(next[0]))),
                // Tied or absent second rank: no preference among the rest.
                _ => Ok(BallotClass::Bullet(name(first))),
            }
        }
        n if n == roster.len() => Ok(BallotClass::OvervoteTopAll),
        2 => Ok(BallotClass::overvote_pair(name(top[0]), name(top[1]))),
        n => Err(Error::MalformedBallot(format!(
            "first-place tie among {n} of {} candidates is not representable",
            roster.len()
        ))),
    }
}

/// Aggregate ballot counts by normalized pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondensedProfile {
    roster: Roster,
    counts: BTreeMap<Pattern, u64>,
    blank: u64,
}

impl CondensedProfile {
    pub fn new(roster: Roster) -> Self {
        CondensedProfile {
            roster,
            counts: BTreeMap::new(),
            blank: 0,
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn blank_count(&self) -> u64 {
        self.blank
    }

    pub fn set_blank_count(&mut self, n: u64) {
        self.blank = n;
    }

    /// Convert a name-based class into a storage pattern. `None` for `Blank`.
    pub fn pattern_of(&self, class: &BallotClass) -> Result<Option<Pattern>> {
        let idx = |c: &CandidateId| self.roster.require(c.as_str());
        let pattern = match class {
            BallotClass::Blank => return Ok(None),
            BallotClass::Bullet(a) => Pattern::Bullet(idx(a)?),
            BallotClass::Full(a, b) => {
                let (a, b) = (idx(a)?, idx(b)?);
                if a == b {
                    return Err(Error::MalformedBallot(format!(
                        "full ranking repeats {}",
                        self.roster.get(a)
                    )));
                }
                Pattern::Full(a, b)
            }
            BallotClass::OvervoteTopTwo(a, b) => {
                let (a, b) = (idx(a)?, idx(b)?);
                if a == b {
                    return Err(Error::MalformedBallot(format!(
                        "overvote pair repeats {}",
                        self.roster.get(a)
                    )));
                }
                if self.roster.len() == 2 {
                    Pattern::OverAll
                } else {
                    Pattern::over_two(a, b)
                }
            }
            BallotClass::OvervoteTopAll => Pattern::OverAll,
        };
        Ok(Some(pattern))
    }

    pub fn class_of(&self, pattern: Pattern) -> BallotClass {
        let name = |i: usize| self.roster.get(i).clone();
        match pattern {
            Pattern::Bullet(a) => BallotClass::Bullet(name(a)),
            Pattern::Full(a, b) => BallotClass::Full(name(a), name(b)),
            Pattern::OverTwo(a, b) => BallotClass::overvote_pair(name(a), name(b)),
            Pattern::OverAll => BallotClass::OvervoteTopAll,
        }
    }

    pub fn add(&mut self, class: &BallotClass, n: u64) -> Result<()> {
        match self.pattern_of(class)? {
            Some(p) => self.add_pattern(p, n),
            None => self.blank += n,
        }
        Ok(())
    }

    pub fn add_pattern(&mut self, pattern: Pattern, n: u64) {
        let len = self.roster.len();
        let in_range = |i: usize| i < len;
        let ok = match pattern {
            Pattern::Bullet(a) => in_range(a),
            Pattern::Full(a, b) | Pattern::OverTwo(a, b) => in_range(a) && in_range(b) && a != b,
            Pattern::OverAll => true,
        };
        assert!(ok, "pattern {pattern:?} does not fit a roster of {len}");
        if n > 0 {
            *self.counts.entry(pattern).or_insert(0) += n;
        }
    }

    pub fn count(&self, pattern: Pattern) -> u64 {
        self.counts.get(&pattern).copied().unwrap_or(0)
    }

    pub fn count_class(&self, class: &BallotClass) -> Result<u64> {
        Ok(match self.pattern_of(class)? {
            Some(p) => self.count(p),
            None => self.blank,
        })
    }

    /// Nonzero pattern counts in canonical order.
    pub fn patterns(&self) -> impl Iterator<Item = (Pattern, u64)> + '_ {
        self.counts.iter().map(|(p, n)| (*p, *n))
    }

    /// Every pattern the roster admits, zero counts included, in the
    /// canonical order: bullets, full rankings, pair overvotes, the
    /// all-candidate overvote.
    pub fn all_patterns(&self) -> Vec<Pattern> {
        let n = self.roster.len();
        let mut out: Vec<Pattern> = (0..n).map(Pattern::Bullet).collect();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    out.push(Pattern::Full(a, b));
                }
            }
        }
        if n > 2 {
            for a in 0..n {
                for b in a + 1..n {
                    out.push(Pattern::OverTwo(a, b));
                }
            }
        }
        if n > 1 {
            out.push(Pattern::OverAll);
        }
        out
    }

    /// Ballots with a single highest-ranked candidate.
    pub fn total_valid_ranked(&self) -> u64 {
        self.patterns()
            .filter(|(p, _)| !p.is_overvote())
            .map(|(_, n)| n)
            .sum()
    }

    pub fn total_overvotes(&self) -> u64 {
        self.patterns()
            .filter(|(p, _)| p.is_overvote())
            .map(|(_, n)| n)
            .sum()
    }

    pub fn total_pair_overvotes(&self) -> u64 {
        self.patterns()
            .filter(|(p, _)| matches!(p, Pattern::OverTwo(..)))
            .map(|(_, n)| n)
            .sum()
    }

    /// Ballots that marked at least one roster candidate.
    pub fn total_with_any_mark(&self) -> u64 {
        self.total_valid_ranked() + self.total_overvotes()
    }

    /// Every ballot, blanks included.
    pub fn total_ballots(&self) -> u64 {
        self.total_with_any_mark() + self.blank
    }

    pub fn total_bullet(&self) -> u64 {
        self.patterns()
            .filter(|(p, _)| matches!(p, Pattern::Bullet(_)))
            .map(|(_, n)| n)
            .sum()
    }

    pub fn total_full(&self) -> u64 {
        self.patterns()
            .filter(|(p, _)| matches!(p, Pattern::Full(..)))
            .map(|(_, n)| n)
            .sum()
    }

    /// Same profile with every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        CondensedProfile {
            roster: self.roster.clone(),
            counts: self
                .counts
                .iter()
                .filter(|(_, n)| **n * factor > 0)
                .map(|(p, n)| (*p, n * factor))
                .collect(),
            blank: self.blank * factor,
        }
    }

    /// One class per ballot, in canonical pattern order, blanks last.
    pub fn expand(&self) -> Vec<BallotClass> {
        let mut out = Vec::new();
        for (p, n) in self.patterns() {
            let class = self.class_of(p);
            out.extend(std::iter::repeat_n(class, n as usize));
        }
        out.extend(std::iter::repeat_n(BallotClass::Blank, self.blank as usize));
        out
    }

    pub(crate) fn require_three(&self) -> Result<()> {
        if self.roster.len() != 3 {
            return Err(Error::RosterSize {
                expected: 3,
                found: self.roster.len(),
            });
        }
        Ok(())
    }
}

/// Count classified ballots into a profile.
pub fn condense<'a, I>(classified: I, roster: &Roster) -> Result<CondensedProfile>
where
    I: IntoIterator<Item = &'a BallotClass>,
{
    let mut profile = CondensedProfile::new(roster.clone());
    for class in classified {
        profile.add(class, 1)?;
    }
    Ok(profile)
}

/// First-place support per candidate. With `include_top_ties`, each pair
/// overvote also counts once for both of its members. All-candidate
/// overvotes never count.
pub fn first_place_totals(profile: &CondensedProfile, include_top_ties: bool) -> PerCandidate<u64> {
    let mut totals = vec![0u64; profile.roster.len()];
    for (p, n) in profile.patterns() {
        match p {
            Pattern::Bullet(a) | Pattern::Full(a, _) => totals[a] += n,
            Pattern::OverTwo(a, b) if include_top_ties => {
                totals[a] += n;
                totals[b] += n;
            }
            _ => {}
        }
    }
    PerCandidate::new(profile.roster.clone(), totals)
}

/// Number of full rankings naming each candidate second.
pub fn second_place_totals(profile: &CondensedProfile) -> PerCandidate<u64> {
    let mut totals = vec![0u64; profile.roster.len()];
    for (p, n) in profile.patterns() {
        if let Pattern::Full(_, b) = p {
            totals[b] += n;
        }
    }
    PerCandidate::new(profile.roster.clone(), totals)
}
