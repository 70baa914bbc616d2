//! Shared helpers for the integration tests: the Alaska fixture, random
//! ballot generators, and brute-force oracles that read one ballot at a
//! time without going through the condensed profile.

#![allow(dead_code)]

use std::path::PathBuf;

use ballotlab::ingest::parse_condensed;
use ballotlab::{classify_ballot, condense, CondensedProfile, Mark, RankedBallot, Roster};
use proptest::prelude::*;

pub const NAMES: [&str; 3] = ["A", "B", "C"];

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/alaska_special_2022.condensed.csv")
}

pub fn alaska() -> CondensedProfile {
    let bytes = std::fs::read(fixture_path()).expect("fixture");
    parse_condensed(&bytes).expect("fixture parses")
}

/// What a generated voter meant, independent of how the marks are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intent {
    Bullet(usize),
    /// First, second; the remaining candidate is last.
    Full(usize, usize),
    Pair(usize, usize),
    All,
    Blank,
}

impl Intent {
    pub fn is_overvote(self) -> bool {
        matches!(self, Intent::Pair(..) | Intent::All)
    }
}

fn other(a: usize, b: usize) -> usize {
    3 - a - b
}

pub fn intent_strategy(overvotes: bool) -> BoxedStrategy<Intent> {
    let pairs = prop_oneof![Just((0, 1)), Just((0, 2)), Just((1, 2))];
    let ordered = (0usize..3, 0usize..3).prop_filter("distinct", |(a, b)| a != b);
    if overvotes {
        prop_oneof![
            3 => (0usize..3).prop_map(Intent::Bullet),
            6 => ordered.prop_map(|(a, b)| Intent::Full(a, b)),
            2 => pairs.prop_map(|(a, b)| Intent::Pair(a, b)),
            1 => Just(Intent::All),
            1 => Just(Intent::Blank),
        ]
        .boxed()
    } else {
        prop_oneof![
            3 => (0usize..3).prop_map(Intent::Bullet),
            6 => ordered.prop_map(|(a, b)| Intent::Full(a, b)),
        ]
        .boxed()
    }
}

pub fn intents(max: usize, overvotes: bool) -> BoxedStrategy<Vec<Intent>> {
    prop::collection::vec(intent_strategy(overvotes), 0..=max).boxed()
}

/// Lay out an intent as three rank positions. `style` picks among
/// equivalent encodings: skipped ranks, write-ins, repeated marks, and an
/// explicit third choice.
pub fn render(intent: Intent, style: u8) -> Vec<Vec<String>> {
    let n = |i: usize| NAMES[i].to_string();
    let w = || "WRITEIN:Someone".to_string();
    let ranks: Vec<Vec<String>> = match (intent, style % 4) {
        (Intent::Bullet(a), 0) => vec![vec![n(a)], vec![], vec![]],
        (Intent::Bullet(a), 1) => vec![vec![], vec![n(a)], vec![]],
        (Intent::Bullet(a), 2) => vec![vec![n(a), w()], vec![n(a)], vec![]],
        (Intent::Bullet(a), _) => {
            let (x, y) = ((a + 1) % 3, (a + 2) % 3);
            vec![vec![n(a)], vec![n(x), n(y)], vec![]]
        }
        (Intent::Full(a, b), 0) => vec![vec![n(a)], vec![n(b)], vec![]],
        (Intent::Full(a, b), 1) => vec![vec![n(a)], vec![n(b)], vec![n(other(a, b))]],
        (Intent::Full(a, b), 2) => vec![vec![n(a)], vec![], vec![n(b)]],
        (Intent::Full(a, b), _) => vec![vec![n(a), w()], vec![n(a), n(b)], vec![w()]],
        (Intent::Pair(a, b), 0) => vec![vec![n(a), n(b)], vec![], vec![]],
        (Intent::Pair(a, b), 1) => vec![vec![], vec![n(b), n(a)], vec![n(other(a, b))]],
        (Intent::Pair(a, b), _) => vec![vec![n(a), n(b), w()], vec![], vec![]],
        (Intent::All, 0) => vec![vec![n(0), n(1), n(2)], vec![], vec![]],
        (Intent::All, _) => vec![vec![], vec![], vec![n(2), n(0), n(1)]],
        (Intent::Blank, 0) => vec![vec![], vec![], vec![]],
        (Intent::Blank, _) => vec![vec![w()], vec![], vec![w()]],
    };
    ranks
}

pub fn to_ballot(ranks: &[Vec<String>], roster: &Roster) -> RankedBallot {
    RankedBallot::new(
        ranks
            .iter()
            .map(|r| r.iter().map(|t| Mark::parse(t, roster).unwrap()).collect())
            .collect(),
    )
}

/// Build a profile by classifying each rendered ballot.
pub fn profile_of(intents: &[Intent]) -> CondensedProfile {
    let roster = Roster::new(NAMES).unwrap();
    let classes: Vec<_> = intents
        .iter()
        .enumerate()
        .map(|(i, &it)| {
            classify_ballot(&to_ballot(&render(it, i as u8), &roster), &roster).unwrap()
        })
        .collect();
    condense(&classes, &roster).unwrap()
}

/// Voters preferring `a` to `b`. With `ties`, a pair overvote prefers both
/// of its members to the excluded candidate.
pub fn oracle_prefers(intents: &[Intent], a: usize, b: usize, ties: bool) -> u64 {
    intents
        .iter()
        .filter(|&&it| match it {
            Intent::Bullet(x) => x == a,
            Intent::Full(x, y) => x == a || (y == a && x != b),
            Intent::Pair(x, y) => ties && (x == a || y == a) && x != b && y != b,
            Intent::All | Intent::Blank => false,
        })
        .count() as u64
}

/// Approval counts when group `first>second` approves its second choice
/// iff `approve[first][second]`.
pub fn oracle_approval(intents: &[Intent], approve: &[[bool; 3]; 3]) -> [u64; 3] {
    let mut out = [0u64; 3];
    for &it in intents {
        match it {
            Intent::Bullet(a) => out[a] += 1,
            Intent::Full(a, b) => {
                out[a] += 1;
                if approve[a][b] {
                    out[b] += 1;
                }
            }
            Intent::Pair(a, b) => {
                out[a] += 1;
                out[b] += 1;
            }
            Intent::All | Intent::Blank => {}
        }
    }
    out
}

/// Stars on one ballot, or `None` for ballots the model leaves out.
pub fn oracle_ballot_stars(it: Intent, stars: &[[u64; 3]; 3]) -> Option<[u64; 3]> {
    let mut s = [0u64; 3];
    match it {
        Intent::Bullet(a) => s[a] = 5,
        Intent::Full(a, b) => {
            s[a] = 5;
            s[b] = stars[a][b];
        }
        Intent::Pair(a, b) => {
            s[a] = 5;
            s[b] = 5;
        }
        Intent::All | Intent::Blank => return None,
    }
    Some(s)
}

pub fn oracle_star_scores(intents: &[Intent], stars: &[[u64; 3]; 3]) -> [u64; 3] {
    let mut out = [0u64; 3];
    for &it in intents {
        if let Some(s) = oracle_ballot_stars(it, stars) {
            for c in 0..3 {
                out[c] += s[c];
            }
        }
    }
    out
}

/// Runoff counts: (prefer a, prefer b, equal and nonzero).
pub fn oracle_star_runoff(
    intents: &[Intent],
    stars: &[[u64; 3]; 3],
    a: usize,
    b: usize,
) -> (u64, u64, u64) {
    let (mut x, mut y, mut t) = (0, 0, 0);
    for &it in intents {
        if let Some(s) = oracle_ballot_stars(it, stars) {
            if s[a] > s[b] {
                x += 1;
            } else if s[b] > s[a] {
                y += 1;
            } else if s[a] > 0 {
                t += 1;
            }
        }
    }
    (x, y, t)
}

/// Condorcet loser on the ranked-only basis.
pub fn oracle_condorcet_loser(intents: &[Intent]) -> Option<usize> {
    (0..3).find(|&l| {
        (0..3)
            .filter(|&x| x != l)
            .all(|x| oracle_prefers(intents, l, x, false) < oracle_prefers(intents, x, l, false))
    })
}
