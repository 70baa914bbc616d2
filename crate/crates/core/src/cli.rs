//! The `ballotlab` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::approval::{self, ApprovalScenario};
use crate::condorcet::{self, Basis};
use crate::error::{Error, Result};
use crate::exact::{grid, parse_rational, to_decimal, Rational};
use crate::ingest::{ingest, parse_condensed, parse_raw, pattern_token};
use crate::irv::{irv_percentages, tabulate_irv_with, TiePolicy};
use crate::profile::CondensedProfile;
use crate::report::{
    emit_range_plot_data, emit_table, range_plot_segments, Cell, Format, Provenance, RangeModel,
    ReportDocument,
};
use crate::scenario::{GroupParams, Winner};
use crate::star::{self, StarScenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ballotlab", version, about = "Cast vote record analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: FormatArg,

    /// Write output to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Input format; inferred from the extension by default.
    #[arg(long, global = true, value_enum)]
    input_format: Option<InputFormat>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    JsonLines,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InputFormat {
    Raw,
    Condensed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BasisArg {
    RankedOnly,
    IncludeTies,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TieArg {
    Error,
    LastInRoster,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize ballots into a condensed profile.
    Ingest { file: PathBuf },
    /// Instant runoff tabulation.
    Irv {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "error")]
        tie_policy: TieArg,
    },
    /// Head-to-head tallies for every pair.
    Pairwise {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ranked-only")]
        basis: BasisArg,
    },
    /// Condorcet winner and loser.
    Condorcet {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ranked-only")]
        basis: BasisArg,
    },
    /// Center-squeeze diagnosis.
    Squeeze { file: PathBuf },
    /// Approval-voting model.
    #[command(subcommand)]
    Approval(ApprovalCmd),
    /// STAR-voting model.
    #[command(subcommand)]
    Star(StarCmd),
}

#[derive(Args, Debug)]
struct RangeArgs {
    file: PathBuf,
    /// Emit long-form plot data instead of the range table.
    #[arg(long)]
    plot_data: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    file: PathBuf,
    /// start:end:step
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ApprovalCmd {
    Range(RangeArgs),
    Eval {
        file: PathBuf,
        /// Uniform second-choice approval fraction.
        #[arg(long, default_value = "0")]
        p: String,
        /// Per-group override, `first>second=value`.
        #[arg(long = "p-group")]
        p_group: Vec<String>,
    },
    Threshold {
        file: PathBuf,
        #[arg(long)]
        riser: String,
        #[arg(long)]
        leader: String,
    },
    Clinch {
        file: PathBuf,
        #[arg(long)]
        candidate: String,
        /// First choice of the group supplying the second-choice votes.
        #[arg(long)]
        from: String,
    },
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
enum StarCmd {
    Range(RangeArgs),
    Eval {
        file: PathBuf,
        /// Uniform average stars for second choices.
        #[arg(long, default_value = "1")]
        s: String,
        /// Per-group override, `first>second=value`.
        #[arg(long = "s-group")]
        s_group: Vec<String>,
    },
    Threshold {
        file: PathBuf,
        #[arg(long)]
        guaranteed: String,
        #[arg(long)]
        rival: String,
    },
    Sweep(SweepArgs),
}

/// Run the command line with `argv` (program name first). Returns the
/// process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error");
            let _ = writeln!(stderr, "{first}");
            return EXIT_USAGE;
        }
    };
    let command_line = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");

    match execute(&cli, &command_line) {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text.as_bytes()).map_err(|source| Error::Io {
                    context: format!("writing {}", path.display()),
                    source,
                }),
                None => stdout
                    .write_all(text.as_bytes())
                    .map_err(|source| Error::Io {
                        context: "writing output".into(),
                        source,
                    }),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_domain() {
                EXIT_DOMAIN
            } else {
                EXIT_USAGE
            }
        }
    }
}

struct Loaded {
    profile: CondensedProfile,
    provenance: Provenance,
}

fn load(path: &Path, forced: Option<InputFormat>, command: &str) -> Result<Loaded> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    let format = match forced {
        Some(f) => f,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Raw,
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Condensed,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "cannot infer the format of {}; pass --input-format",
                    path.display()
                )))
            }
        },
    };
    let profile = match format {
        InputFormat::Raw => ingest(&parse_raw(&bytes)?)?,
        InputFormat::Condensed => parse_condensed(&bytes)?,
    };
    let digest = Sha256::digest(&bytes);
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded {
        profile,
        provenance: Provenance {
            input: path.display().to_string(),
            sha256,
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

fn execute(cli: &Cli, command_line: &str) -> Result<String> {
    let format = match cli.format {
        FormatArg::Table => Format::Table,
        FormatArg::Csv => Format::Csv,
        FormatArg::JsonLines => Format::JsonLines,
    };
    let file = match &cli.command {
        Command::Ingest { file }
        | Command::Irv { file, .. }
        | Command::Pairwise { file, .. }
        | Command::Condorcet { file, .. }
        | Command::Squeeze { file } => file,
        Command::Approval(cmd) => match cmd {
            ApprovalCmd::Range(a) => &a.file,
            ApprovalCmd::Sweep(a) => &a.file,
            ApprovalCmd::Eval { file, .. }
            | ApprovalCmd::Threshold { file, .. }
            | ApprovalCmd::Clinch { file, .. } => file,
        },
        Command::Star(cmd) => match cmd {
            StarCmd::Range(a) => &a.file,
            StarCmd::Sweep(a) => &a.file,
            StarCmd::Eval { file, .. } | StarCmd::Threshold { file, .. } => file,
        },
    };
    let loaded = load(file, cli.input_format, command_line)?;
    let p = &loaded.profile;

    let sections = match &cli.command {
        Command::Ingest { .. } => ingest_report(p),
        Command::Irv { tie_policy, .. } => {
            let policy = match tie_policy {
                TieArg::Error => TiePolicy::Error,
                TieArg::LastInRoster => TiePolicy::LastInRoster,
            };
            irv_report(p, policy)?
        }
        Command::Pairwise { basis, .. } => vec![pairwise_report(p, basis_of(*basis))],
        Command::Condorcet { basis, .. } => condorcet_report(p, basis_of(*basis)),
        Command::Squeeze { .. } => vec![squeeze_report(p)?],
        Command::Approval(cmd) => match cmd {
            ApprovalCmd::Range(a) => {
                let range = approval::approval_range(p)?;
                if a.plot_data {
                    let segs = range_plot_segments(p, range.min.values(), RangeModel::Approval);
                    return Ok(emit_range_plot_data(&segs));
                }
                vec![range_report(
                    "Approval voting range",
                    "votes",
                    &range.min,
                    &range.max,
                )]
            }
            ApprovalCmd::Eval {
                p: uniform,
                p_group,
                ..
            } => {
                let params = group_params(uniform, p_group)?;
                approval_eval_report(p, &ApprovalScenario(params))?
            }
            ApprovalCmd::Threshold { riser, leader, .. } => {
                vec![approval_threshold_report(p, riser, leader)?]
            }
            ApprovalCmd::Clinch {
                candidate, from, ..
            } => {
                let k = approval::min_second_votes_to_clinch(p, candidate, from)?;
                let mut doc = ReportDocument::new("Approval clinch", ["key", "value"]);
                doc.row(vec!["candidate".into(), candidate.trim().into()]);
                doc.row(vec![
                    "group".into(),
                    format!("{}>{}", from.trim(), candidate.trim()).into(),
                ]);
                doc.row(vec!["required".into(), k.into()]);
                vec![doc]
            }
            ApprovalCmd::Sweep(a) => {
                let points = parse_grid(a.grid.as_deref(), "0:1:0.01")?;
                vec![approval_sweep_report(p, &points)?]
            }
        },
        Command::Star(cmd) => match cmd {
            StarCmd::Range(a) => {
                let range = star::star_range(p)?;
                if a.plot_data {
                    let segs = range_plot_segments(p, range.min.values(), RangeModel::Star);
                    return Ok(emit_range_plot_data(&segs));
                }
                vec![range_report(
                    "STAR voting range",
                    "score",
                    &range.min,
                    &range.max,
                )]
            }
            StarCmd::Eval { s, s_group, .. } => {
                let params = group_params(s, s_group)?;
                star_eval_report(p, &StarScenario(params))?
            }
            StarCmd::Threshold {
                guaranteed, rival, ..
            } => {
                vec![star_threshold_report(p, guaranteed, rival)?]
            }
            StarCmd::Sweep(a) => {
                let points = parse_grid(a.grid.as_deref(), "1:4:0.01")?;
                vec![star_sweep_report(p, &points)?]
            }
        },
    };
    Ok(emit_table(&sections, format, Some(&loaded.provenance)))
}

fn basis_of(b: BasisArg) -> Basis {
    match b {
        BasisArg::RankedOnly => Basis::RankedOnly,
        BasisArg::IncludeTies => Basis::IncludeTopTies,
    }
}

fn group_params(uniform: &str, groups: &[String]) -> Result<GroupParams> {
    let mut params = GroupParams::uniform(parse_rational(uniform)?);
    for g in groups {
        let bad = || Error::InvalidParameter(format!("expected first>second=value, got {g:?}"));
        let (pair, value) = g.split_once('=').ok_or_else(bad)?;
        let (first, second) = pair.split_once('>').ok_or_else(bad)?;
        params = params.with_group(first, second, parse_rational(value)?)?;
    }
    Ok(params)
}

fn parse_grid(text: Option<&str>, default: &str) -> Result<Vec<Rational>> {
    let text = text.unwrap_or(default);
    let parts: Vec<&str> = text.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(Error::InvalidParameter(format!(
            "grid must be start:end:step, got {text:?}"
        )));
    };
    grid(
        &parse_rational(start)?,
        &parse_rational(end)?,
        &parse_rational(step)?,
    )
}

fn ingest_report(p: &CondensedProfile) -> Vec<ReportDocument> {
    let mut doc = ReportDocument::new("Condensed profile", ["pattern", "count"]);
    for pattern in p.all_patterns() {
        doc.row(vec![
            pattern_token(p, pattern).into(),
            p.count(pattern).into(),
        ]);
    }
    doc.row(vec!["blank".into(), p.blank_count().into()]);
    doc.note(format!("valid ranked ballots: {}", p.total_valid_ranked()));
    doc.note(format!(
        "ballots marking any candidate: {}",
        p.total_with_any_mark()
    ));
    doc.note(format!("overvotes: {}", p.total_overvotes()));
    vec![doc]
}

fn irv_report(p: &CondensedProfile, policy: TiePolicy) -> Result<Vec<ReportDocument>> {
    let outcome = tabulate_irv_with(p, policy)?;
    let shares = irv_percentages(&outcome);

    let mut rounds = ReportDocument::new(
        "IRV rounds",
        ["round", "candidate", "votes", "pct_active", "pct_round1"],
    );
    for (round, share) in outcome.rounds.iter().zip(&shares) {
        for ((c, votes), (_, active, first)) in round.tallies.iter().zip(&share.shares) {
            rounds.row(vec![
                (round.round_index as u64).into(),
                c.as_str().into(),
                (*votes).into(),
                Cell::exact(active.clone()),
                Cell::exact(first.clone()),
            ]);
        }
    }

    let mut moves = ReportDocument::new("IRV transfers", ["round", "from", "to", "votes"]);
    for pair in outcome.rounds.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        let from = prev
            .eliminated
            .as_ref()
            .expect("eliminated before next round");
        for (to, n) in &next.transfers {
            moves.row(vec![
                (next.round_index as u64).into(),
                from.as_str().into(),
                to.as_str().into(),
                (*n).into(),
            ]);
        }
        moves.row(vec![
            (next.round_index as u64).into(),
            from.as_str().into(),
            "exhausted".into(),
            next.exhausted_this_round.into(),
        ]);
    }

    let mut summary = ReportDocument::new("IRV result", ["key", "value"]);
    summary.row(vec!["winner".into(), outcome.winner.as_str().into()]);
    summary.row(vec!["rounds".into(), (outcome.rounds.len() as u64).into()]);
    summary.row(vec![
        "invalid_overvotes".into(),
        outcome.invalid_overvotes.into(),
    ]);
    for r in &outcome.rounds {
        if let Some(c) = &r.eliminated {
            summary.row(vec![
                format!("eliminated_round_{}", r.round_index).into(),
                c.as_str().into(),
            ]);
        }
    }
    Ok(vec![rounds, moves, summary])
}

fn pairwise_report(p: &CondensedProfile, basis: Basis) -> ReportDocument {
    let t = condorcet::pairwise_tallies(p, basis);
    let mut doc = ReportDocument::new(
        format!("Pairwise tallies ({})", basis.label()),
        [
            "a",
            "b",
            "prefers_a",
            "prefers_b",
            "no_preference",
            "pct_a",
            "pct_b",
        ],
    );
    for m in condorcet::pair_margins(&t) {
        doc.row(vec![
            m.a.as_str().into(),
            m.b.as_str().into(),
            m.a_votes.into(),
            m.b_votes.into(),
            m.no_preference.into(),
            Cell::exact(m.a_share),
            Cell::exact(m.b_share),
        ]);
    }
    doc
}

fn condorcet_report(p: &CondensedProfile, basis: Basis) -> Vec<ReportDocument> {
    let t = condorcet::pairwise_tallies(p, basis);
    let report = condorcet::condorcet_winner_loser(&t);
    let mut doc = ReportDocument::new(format!("Condorcet ({})", basis.label()), ["key", "value"]);
    let name =
        |c: &Option<crate::CandidateId>| c.as_ref().map_or("none".to_string(), |c| c.to_string());
    doc.row(vec!["winner".into(), name(&report.winner).into()]);
    doc.row(vec!["loser".into(), name(&report.loser).into()]);
    vec![pairwise_report(p, basis), doc]
}

fn squeeze_report(p: &CondensedProfile) -> Result<ReportDocument> {
    let s = condorcet::detect_center_squeeze(p)?;
    let mut doc = ReportDocument::new("Center squeeze", ["key", "value"]);
    let cw = s
        .condorcet_winner
        .as_ref()
        .map_or("none".to_string(), |c| c.to_string());
    doc.row(vec!["condorcet_winner".into(), cw.into()]);
    doc.row(vec!["irv_winner".into(), s.irv_winner.as_str().into()]);
    let round = s
        .irv_elimination_round
        .map_or("none".to_string(), |r| r.to_string());
    doc.row(vec![
        "condorcet_winner_eliminated_round".into(),
        round.into(),
    ]);
    doc.row(vec!["squeezed".into(), s.squeezed.to_string().into()]);
    Ok(doc)
}

fn range_report(
    title: &str,
    unit: &str,
    min: &crate::PerCandidate<u64>,
    max: &crate::PerCandidate<u64>,
) -> ReportDocument {
    let mut doc = ReportDocument::new(title, ["candidate", "min", "max"]);
    for ((c, lo), (_, hi)) in min.iter().zip(max.iter()) {
        doc.row(vec![c.as_str().into(), (*lo).into(), (*hi).into()]);
    }
    doc.note(format!("min and max {unit} under the behavioral model"));
    doc
}

fn winner_cell(w: &Winner) -> Cell {
    w.label().into()
}

fn approval_eval_report(p: &CondensedProfile, s: &ApprovalScenario) -> Result<Vec<ReportDocument>> {
    let out = approval::evaluate_approval(p, s)?;
    let mut scores = ReportDocument::new("Approval scores", ["candidate", "score"]);
    for (c, v) in out.scores.iter() {
        scores.row(vec![c.as_str().into(), Cell::exact(v.clone())]);
    }
    let mut summary = ReportDocument::new("Approval result", ["key", "value"]);
    summary.row(vec!["winner".into(), winner_cell(&out.winner)]);
    if let Some(m) = &out.mean_approvals_rankers {
        summary.row(vec![
            "mean_approvals_rankers".into(),
            Cell::exact_places(m.clone(), 3),
        ]);
    }
    if let Some(m) = &out.mean_approvals_all {
        summary.row(vec![
            "mean_approvals_all".into(),
            Cell::exact_places(m.clone(), 3),
        ]);
    }
    Ok(vec![scores, summary])
}

fn approval_threshold_report(
    p: &CondensedProfile,
    riser: &str,
    leader: &str,
) -> Result<ReportDocument> {
    let threshold = approval::uniform_threshold(p, riser, leader)?.ok_or_else(|| {
        Error::Unattainable(format!(
            "{} never catches {} for uniform p in [0, 1]",
            riser.trim(),
            leader.trim()
        ))
    })?;
    let at = approval::evaluate_approval(p, &ApprovalScenario::uniform(threshold.clone()))?;
    let mut doc = ReportDocument::new("Approval threshold", ["key", "value"]);
    doc.row(vec!["riser".into(), riser.trim().into()]);
    doc.row(vec!["leader".into(), leader.trim().into()]);
    doc.row(vec![
        "p_star".into(),
        Cell::exact_places(threshold.clone(), 4),
    ]);
    let mut line = format!(
        "p* = {} ≈ {}",
        crate::exact::exact_string(&threshold),
        to_decimal(&threshold, 4)
    );
    if let Some(m) = &at.mean_approvals_rankers {
        doc.row(vec![
            "mean_approvals_rankers".into(),
            Cell::exact_places(m.clone(), 3),
        ]);
        line.push_str(&format!(
            " (≈ {} approvals per ranking voter)",
            to_decimal(m, 3)
        ));
    }
    if let Some(m) = &at.mean_approvals_all {
        doc.row(vec![
            "mean_approvals_all".into(),
            Cell::exact_places(m.clone(), 3),
        ]);
    }
    doc.note(line);
    Ok(doc)
}

fn approval_sweep_report(p: &CondensedProfile, points: &[Rational]) -> Result<ReportDocument> {
    let roster = p.roster();
    let mut columns = vec!["p".to_string()];
    columns.extend(roster.iter().map(|c| c.to_string()));
    columns.push("winner".into());
    let mut doc = ReportDocument::new("Approval sweep", columns);
    for point in points {
        let out = approval::evaluate_approval(p, &ApprovalScenario::uniform(point.clone()))?;
        let mut row = vec![Cell::exact(point.clone())];
        row.extend(out.scores.values().iter().map(|v| Cell::exact(v.clone())));
        row.push(winner_cell(&out.winner));
        doc.row(row);
    }
    Ok(doc)
}

fn star_eval_report(p: &CondensedProfile, s: &StarScenario) -> Result<Vec<ReportDocument>> {
    let out = star::evaluate_star(p, s)?;
    let mut scores = ReportDocument::new("STAR scores", ["candidate", "score"]);
    for (c, v) in out.scores.iter() {
        scores.row(vec![c.as_str().into(), Cell::exact(v.clone())]);
    }
    let mut runoff = ReportDocument::new("STAR runoff", ["candidate", "votes"]);
    runoff.row(vec![
        out.runoff.a.as_str().into(),
        out.runoff.a_votes.into(),
    ]);
    runoff.row(vec![
        out.runoff.b.as_str().into(),
        out.runoff.b_votes.into(),
    ]);
    runoff.row(vec![
        "no_preference".into(),
        out.runoff.no_preference.into(),
    ]);
    let mut summary = ReportDocument::new("STAR result", ["key", "value"]);
    summary.row(vec!["winner".into(), winner_cell(&out.winner)]);
    Ok(vec![scores, runoff, summary])
}

fn star_threshold_report(
    p: &CondensedProfile,
    guaranteed: &str,
    rival: &str,
) -> Result<ReportDocument> {
    let t = star::uniform_star_threshold(p, guaranteed, rival)?;
    let mut doc = ReportDocument::new("STAR threshold", ["key", "value"]);
    doc.row(vec!["guaranteed".into(), guaranteed.trim().into()]);
    doc.row(vec!["rival".into(), rival.trim().into()]);
    doc.row(vec!["stars".into(), Cell::exact(t.stars.clone())]);
    doc.row(vec!["score".into(), Cell::exact(t.score.clone())]);
    doc.row(vec!["rival_max".into(), t.rival_max.into()]);
    doc.note(format!(
        "s = {} gives {} a score of {}, above {}'s maximum of {}",
        to_decimal(&t.stars, 2),
        guaranteed.trim(),
        to_decimal(&t.score, 2),
        rival.trim(),
        t.rival_max
    ));
    Ok(doc)
}

fn star_sweep_report(p: &CondensedProfile, points: &[Rational]) -> Result<ReportDocument> {
    let roster = p.roster();
    let mut columns = vec!["s".to_string()];
    columns.extend(roster.iter().map(|c| c.to_string()));
    columns.extend(["finalists".to_string(), "winner".to_string()]);
    let mut doc = ReportDocument::new("STAR sweep", columns);
    for point in points {
        let out = star::evaluate_star(p, &StarScenario::uniform(point.clone()))?;
        let mut row = vec![Cell::exact(point.clone())];
        row.extend(out.scores.values().iter().map(|v| Cell::exact(v.clone())));
        row.push(format!("{}+{}", out.finalists.0, out.finalists.1).into());
        row.push(winner_cell(&out.winner));
        doc.row(row);
    }
    Ok(doc)
}
