//! Reading and writing ballot files.
//!
//! Two formats are supported:
//!
//! * the raw cast-vote-record document, a JSON object with a `candidates`
//!   roster and a `ballots` array where each ballot is an array of rank
//!   positions and each rank position is an array of mark strings;
//! * the condensed profile, a `pattern,count` CSV with one row per
//!   preference pattern.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::profile::{classify_ballot, CondensedProfile, Mark, Pattern, RankedBallot, Roster};

pub const CONDENSED_HEADER: &str = "pattern,count";

/// A parsed and validated raw cast vote record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCvrDocument {
    pub roster: Roster,
    pub ballots: Vec<RankedBallot>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJson {
    candidates: Vec<String>,
    ballots: Vec<Vec<Vec<String>>>,
}

pub fn parse_raw(bytes: &[u8]) -> Result<RawCvrDocument> {
    let raw: RawJson = serde_json::from_slice(bytes).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let roster = Roster::new(&raw.candidates)?;

    let expected = raw.ballots.first().map_or(0, Vec::len);
    let mut ballots = Vec::with_capacity(raw.ballots.len());
    for (index, ballot) in raw.ballots.iter().enumerate() {
        if ballot.len() != expected {
            return Err(Error::RaggedBallot {
                index,
                expected,
                found: ballot.len(),
            });
        }
        let ranks = ballot
            .iter()
            .map(|rank| {
                rank.iter()
                    .map(|token| Mark::parse(token, &roster))
                    .collect::<Result<BTreeSet<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ballots.push(RankedBallot::new(ranks));
    }
    Ok(RawCvrDocument { roster, ballots })
}

/// Classify and count every ballot of a raw document.
pub fn ingest(doc: &RawCvrDocument) -> Result<CondensedProfile> {
    let mut profile = CondensedProfile::new(doc.roster.clone());
    for ballot in &doc.ballots {
        let class = classify_ballot(ballot, &doc.roster)?;
        profile.add(&class, 1)?;
    }
    Ok(profile)
}

enum Token {
    Bullet(String),
    Full(String, String),
    Over(Vec<String>),
    Blank,
}

fn parse_token(token: &str) -> std::result::Result<Token, String> {
    if token == "blank" {
        return Ok(Token::Blank);
    }
    let (kind, body) = token
        .split_once(':')
        .ok_or_else(|| format!("malformed pattern {token:?}"))?;
    let names = |sep: char| -> std::result::Result<Vec<String>, String> {
        body.split(sep)
            .map(|n| {
                let n = n.trim();
                if n.is_empty() {
                    Err(format!("empty candidate name in {token:?}"))
                } else {
                    Ok(n.to_string())
                }
            })
            .collect()
    };
    match kind {
        "bullet" => {
            let name = body.trim();
            if name.is_empty() {
                return Err(format!("empty candidate name in {token:?}"));
            }
            Ok(Token::Bullet(name.to_string()))
        }
        "full" => {
            let n = names('>')?;
            match <[String; 2]>::try_from(n) {
                Ok([a, b]) => Ok(Token::Full(a, b)),
                Err(_) => Err(format!("full pattern needs two candidates: {token:?}")),
            }
        }
        _ => {
            let width: usize = kind
                .strip_prefix("over")
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| format!("unknown pattern kind {kind:?}"))?;
            let n = names('+')?;
            if n.len() != width || width < 2 {
                return Err(format!("{kind} pattern lists {} candidates", n.len()));
            }
            Ok(Token::Over(n))
        }
    }
}

/// Parse a condensed profile file. The roster is the candidates in order of
/// first appearance; missing patterns count as zero.
pub fn parse_condensed(bytes: &[u8]) -> Result<CondensedProfile> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Condensed {
        line: 1,
        message: format!("not UTF-8: {e}"),
    })?;

    let mut rows = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut saw_header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Condensed {
            line: line_no,
            message,
        };
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim() != CONDENSED_HEADER {
                return Err(err(format!("expected header {CONDENSED_HEADER:?}")));
            }
            saw_header = true;
            continue;
        }
        let (token, count) = line
            .split_once(',')
            .ok_or_else(|| err("expected `pattern,count`".into()))?;
        let count: i64 = count
            .trim()
            .parse()
            .map_err(|_| err(format!("count {:?} is not an integer", count.trim())))?;
        if count < 0 {
            return Err(err(format!("negative count {count}")));
        }
        let token = parse_token(token.trim()).map_err(err)?;
        let mentioned: Vec<&String> = match &token {
            Token::Bullet(a) => vec![a],
            Token::Full(a, b) => vec![a, b],
            Token::Over(v) => v.iter().collect(),
            Token::Blank => vec![],
        };
        let distinct: BTreeSet<&String> = mentioned.iter().copied().collect();
        if distinct.len() != mentioned.len() {
            return Err(err("pattern repeats a candidate".into()));
        }
        for name in mentioned {
            if !names.contains(name) {
                names.push(name.clone());
            }
        }
        rows.push((line_no, token, count as u64));
    }

    let roster = if names.is_empty() {
        Roster::default()
    } else {
        Roster::new(&names)?
    };
    let mut profile = CondensedProfile::new(roster.clone());
    let mut seen: BTreeMap<Option<Pattern>, usize> = BTreeMap::new();
    for (line, token, count) in rows {
        let err = |message: String| Error::Condensed { line, message };
        let idx = |n: &str| roster.require(n);
        let pattern = match token {
            Token::Blank => None,
            Token::Bullet(a) => Some(Pattern::Bullet(idx(&a)?)),
            Token::Full(a, b) => Some(Pattern::Full(idx(&a)?, idx(&b)?)),
            Token::Over(v) if v.len() == roster.len() => Some(Pattern::OverAll),
            Token::Over(v) if v.len() == 2 => Some(Pattern::over_two(idx(&v[0])?, idx(&v[1])?)),
            Token::Over(v) => {
                return Err(err(format!(
                    "overvote of {} candidates in a {}-candidate roster",
                    v.len(),
                    roster.len()
                )))
            }
        };
        if let Some(prev) = seen.insert(pattern, line) {
            return Err(err(format!(
                "duplicate pattern (first seen on line {prev})"
            )));
        }
        match pattern {
            Some(p) => profile.add_pattern(p, count),
            None => profile.set_blank_count(count),
        }
    }
    Ok(profile)
}

/// Token for one pattern in the condensed format.
pub fn pattern_token(profile: &CondensedProfile, pattern: Pattern) -> String {
    let roster = profile.roster();
    let name = |i: usize| roster.get(i).as_str();
    match pattern {
        Pattern::Bullet(a) => format!("bullet:{}", name(a)),
        Pattern::Full(a, b) => format!("full:{}>{}", name(a), name(b)),
        Pattern::OverTwo(a, b) => format!("over2:{}+{}", name(a), name(b)),
        Pattern::OverAll => {
            let all: Vec<&str> = roster.iter().map(|c| c.as_str()).collect();
            format!("over{}:{}", all.len(), all.join("+"))
        }
    }
}

/// Serialize a profile. Every pattern the roster admits is written, zero
/// counts included, so the roster order survives a round trip.
pub fn write_condensed(profile: &CondensedProfile) -> String {
    let mut out = String::new();
    out.push_str(CONDENSED_HEADER);
    out.push('\n');
    for p in profile.all_patterns() {
        let _ = writeln!(out, "{},{}", pattern_token(profile, p), profile.count(p));
    }
    let _ = writeln!(out, "blank,{}", profile.blank_count());
    out
}
