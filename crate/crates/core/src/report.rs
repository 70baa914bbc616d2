//! Tabular reports and their renderings.
//!
//! A report is one or more sections, each a titled table of cells. Exact
//! values stay exact until rendering: the human table shows rounded
//! decimals, while CSV and JSON lines carry integers or `num/den` strings.

use std::fmt::Write as _;

use crate::exact::{exact_string, to_decimal, Rational};
use crate::profile::{CondensedProfile, Pattern};
use crate::star::{MAX_SECOND, MIN_SECOND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Text(String),
    Int(u64),
    /// Exact value shown with `places` decimals in table mode.
    Exact {
        value: Rational,
        places: u32,
    },
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn exact(value: Rational) -> Self {
        Cell::Exact { value, places: 2 }
    }

    pub fn exact_places(value: Rational, places: u32) -> Self {
        Cell::Exact { value, places }
    }

    fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Exact { value, places } => to_decimal(value, *places),
        }
    }

    fn machine(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Exact { value, .. } => exact_string(value),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            other => serde_json::Value::String(other.machine()).to_string(),
        }
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDocument {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form lines shown under the table in table mode only.
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn new<I, S>(title: impl Into<String>, columns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ReportDocument {
            title: title.into(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        assert_eq!(cells.len(), self.columns.len(), "row width");
        self.rows.push(cells);
        self
    }

    pub fn note(&mut self, line: impl Into<String>) -> &mut Self {
        self.notes.push(line.into());
        self
    }
}

/// Where a report came from. Only rendered in table mode so machine
/// output stays byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub input: String,
    pub sha256: String,
    pub command: String,
    pub version: String,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Render report sections. Sections are separated by a blank line in
/// table and CSV modes; JSON lines tag each row with its section when
/// there is more than one.
pub fn emit_table(
    sections: &[ReportDocument],
    format: Format,
    provenance: Option<&Provenance>,
) -> String {
    let mut out = String::new();
    match format {
        Format::Table => {
            for (i, doc) in sections.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                render_table(doc, &mut out);
            }
            if let Some(p) = provenance {
                let _ = writeln!(
                    out,
                    "\n# {} (sha256 {}) | {} | ballotlab {}",
                    p.input, p.sha256, p.command, p.version
                );
            }
        }
        Format::Csv => {
            for (i, doc) in sections.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let header: Vec<String> = doc.columns.iter().map(|c| csv_field(c)).collect();
                out.push_str(&header.join(","));
                out.push('\n');
                for row in &doc.rows {
                    let cells: Vec<String> = row.iter().map(|c| csv_field(&c.machine())).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
        }
        Format::JsonLines => {
            let tag = sections.len() > 1;
            for doc in sections {
                for row in &doc.rows {
                    let mut fields = Vec::new();
                    if tag {
                        fields.push(format!(
                            "\"table\":{}",
                            serde_json::Value::String(doc.title.clone())
                        ));
                    }
                    for (col, cell) in doc.columns.iter().zip(row) {
                        fields.push(format!(
                            "{}:{}",
                            serde_json::Value::String(col.clone()),
                            cell.json()
                        ));
                    }
                    let _ = writeln!(out, "{{{}}}", fields.join(","));
                }
            }
        }
    }
    out
}

fn render_table(doc: &ReportDocument, out: &mut String) {
    let cells: Vec<Vec<String>> = doc
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::display).collect())
        .collect();
    let mut widths: Vec<usize> = doc.columns.iter().map(|c| c.chars().count()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |vals: &[String], numeric: &[bool]| -> String {
        let parts: Vec<String> = vals
            .iter()
            .zip(&widths)
            .zip(numeric)
            .map(|((v, w), right)| {
                if *right {
                    format!("{v:>w$}")
                } else {
                    format!("{v:<w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let numeric: Vec<bool> = (0..doc.columns.len())
        .map(|i| !doc.rows.is_empty() && doc.rows.iter().all(|r| !matches!(r[i], Cell::Text(_))))
        .collect();

    let _ = writeln!(out, "{}", doc.title);
    let _ = writeln!(out, "{}", line(&doc.columns, &numeric));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", rule.join("  "));
    for row in &cells {
        let _ = writeln!(out, "{}", line(row, &numeric));
    }
    for note in &doc.notes {
        let _ = writeln!(out, "{note}");
    }
}

/// Which model a range plot describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeModel {
    Approval,
    Star,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotSegment {
    pub candidate: String,
    /// `base` or `potential`.
    pub segment: &'static str,
    /// The rival whose first-place voters supply a potential segment; the
    /// candidate's own name for the base segment.
    pub source: String,
    pub value: u64,
}

/// Base support plus one potential segment per rival first-place group.
/// Each candidate's segments sum to their range maximum.
pub fn range_plot_segments(
    profile: &CondensedProfile,
    base: &[u64],
    model: RangeModel,
) -> Vec<PlotSegment> {
    let roster = profile.roster();
    let per_vote = match model {
        RangeModel::Approval => 1,
        RangeModel::Star => MAX_SECOND - MIN_SECOND,
    };
    let mut out = Vec::new();
    for (c, name) in roster.iter().enumerate() {
        out.push(PlotSegment {
            candidate: name.to_string(),
            segment: "base",
            source: name.to_string(),
            value: base[c],
        });
        for (r, rival) in roster.iter().enumerate().filter(|(r, _)| *r != c) {
            out.push(PlotSegment {
                candidate: name.to_string(),
                segment: "potential",
                source: rival.to_string(),
                value: per_vote * profile.count(Pattern::Full(r, c)),
            });
        }
    }
    out
}

/// Long-form `candidate,segment,source,value` CSV.
pub fn emit_range_plot_data(segments: &[PlotSegment]) -> String {
    let mut out = String::from("candidate,segment,source,value\n");
    for s in segments {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&s.candidate),
            s.segment,
            csv_field(&s.source),
            s.value
        );
    }
    out
}
