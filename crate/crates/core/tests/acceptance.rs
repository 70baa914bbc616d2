//! Acceptance checks on the Alaska fixture. Prints one PASS/FAIL line per
//! criterion and fails if any criterion fails.

mod common;

use ballotlab::approval::{
    approval_range, evaluate_approval, min_second_votes_to_clinch, sweep_uniform,
    uniform_threshold, ApprovalScenario,
};
use ballotlab::cli::run;
use ballotlab::condorcet::{
    condorcet_winner_loser, detect_center_squeeze, pair_margins, pairwise_tallies, Basis,
};
use ballotlab::exact::{int, ratio, to_decimal, Rational};
use ballotlab::ingest::{parse_condensed, write_condensed};
use ballotlab::irv::{irv_percentages, tabulate_irv, tabulate_irv_with, TiePolicy};
use ballotlab::star::{
    evaluate_star, star_range, sweep_star, uniform_star_threshold, StarScenario,
};
use ballotlab::{Error, GroupParams};
use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Check {
    ensure!(got == want, "{what}: got {got:?}, want {want:?}");
    Ok(())
}

fn approval_range_exact() -> Check {
    let r = approval_range(&alaska()).map_err(|e| e.to_string())?;
    eq("min", r.min.values(), &[54_157, 59_055, 75_895])?;
    eq("max", r.max.values(), &[135_703, 91_040, 95_150])
}

fn star_range_exact() -> Check {
    let r = star_range(&alaska()).map_err(|e| e.to_string())?;
    eq("min", r.min.values(), &[352_331, 327_260, 398_730])?;
    eq("max", r.max.values(), &[596_969, 423_215, 456_495])
}

fn pairwise_exact() -> Check {
    let t = pairwise_tallies(&alaska(), Basis::RankedOnly);
    let margins = pair_margins(&t);
    let tallies: Vec<(u64, u64)> = margins.iter().map(|m| (m.a_votes, m.b_votes)).collect();
    eq(
        "tallies",
        tallies,
        vec![(101_438, 63_666), (88_126, 79_486), (86_197, 91_375)],
    )?;
    let shown: Vec<String> = margins
        .iter()
        .map(|m| {
            to_decimal(
                if m.a_votes > m.b_votes {
                    &m.a_share
                } else {
                    &m.b_share
                },
                2,
            )
        })
        .collect();
    eq(
        "percentages",
        shown,
        vec!["61.44".into(), "52.58".into(), "51.46".into()],
    )?;
    let r = condorcet_winner_loser(&t);
    eq(
        "winner",
        r.winner.map(|c| c.to_string()),
        Some("Begich".into()),
    )?;
    eq(
        "loser",
        r.loser.map(|c| c.to_string()),
        Some("Palin".into()),
    )
}

fn irv_exact() -> Check {
    let out = tabulate_irv(&alaska()).map_err(|e| e.to_string())?;
    eq("rounds", out.rounds.len(), 2)?;
    let r1 = &out.rounds[0];
    eq(
        "round 1",
        [r1.tally("Begich"), r1.tally("Palin"), r1.tally("Peltola")],
        [Some(54_009), Some(58_939), Some(75_803)],
    )?;
    eq(
        "eliminated",
        r1.eliminated.as_ref().map(|c| c.to_string()),
        Some("Begich".into()),
    )?;
    let r2 = &out.rounds[1];
    eq(
        "transfers",
        [r2.transfer("Palin"), r2.transfer("Peltola")],
        [Some(27_258), Some(15_572)],
    )?;
    eq("exhausted", r2.exhausted_this_round, 11_179)?;
    eq(
        "final",
        [r2.tally("Palin"), r2.tally("Peltola")],
        [Some(86_197), Some(91_375)],
    )?;
    eq("winner", out.winner.as_str(), "Peltola")?;
    let shares = irv_percentages(&out);
    let peltola = shares[1]
        .shares
        .iter()
        .find(|(c, _, _)| c.as_str() == "Peltola")
        .ok_or("no Peltola share")?;
    eq("final share", to_decimal(&peltola.1, 2), "51.46".into())
}

fn approval_threshold() -> Check {
    let p = alaska();
    let t = uniform_threshold(&p, "Begich", "Peltola")
        .map_err(|e| e.to_string())?
        .ok_or("no threshold")?;
    eq("p*", t.clone(), ratio(21_738, 62_291))?;
    let tol = |x: &Rational, want: Rational, eps: Rational| {
        let d = x - &want;
        (if d < int(0) { -d } else { d }) <= eps
    };
    ensure!(
        tol(&t, ratio(3490, 10_000), ratio(1, 10_000)),
        "p* decimal {}",
        to_decimal(&t, 6)
    );
    let at = evaluate_approval(&p, &ApprovalScenario::uniform(t)).map_err(|e| e.to_string())?;
    let mean = at.mean_approvals_rankers.ok_or("no rankers")?;
    ensure!(
        tol(&mean, ratio(1349, 1000), ratio(1, 1000)),
        "mean approvals {}",
        to_decimal(&mean, 6)
    );
    let sweep = sweep_uniform(&p, &ratio(1, 100)).map_err(|e| e.to_string())?;
    ensure!(sweep.len() == 101, "sweep has {} points", sweep.len());
    ensure!(
        sweep.iter().all(|(_, w)| !w.is("Palin")),
        "Palin wins somewhere in the sweep"
    );
    Ok(())
}

fn clinch_bound() -> Check {
    let k =
        min_second_votes_to_clinch(&alaska(), "Begich", "Peltola").map_err(|e| e.to_string())?;
    eq("required votes", k, 40_994)
}

fn star_threshold() -> Check {
    let p = alaska();
    let t = uniform_star_threshold(&p, "Begich", "Palin").map_err(|e| e.to_string())?;
    eq("stars", t.stars.clone(), ratio(187, 100))?;
    ensure!(
        t.score > int(423_215),
        "score {} not above 423215",
        to_decimal(&t.score, 2)
    );
    let out = evaluate_star(&p, &StarScenario::uniform(int(1))).map_err(|e| e.to_string())?;
    eq(
        "finalists",
        (out.finalists.0.to_string(), out.finalists.1.to_string()),
        ("Begich".into(), "Peltola".into()),
    )?;
    ensure!(
        out.winner.is("Begich"),
        "runoff winner {}",
        out.winner.label()
    );
    let sweep = sweep_star(&p, &ratio(1, 100)).map_err(|e| e.to_string())?;
    ensure!(sweep.len() == 301, "sweep has {} points", sweep.len());
    if let Some((s, w)) = sweep.iter().find(|(_, w)| !w.is("Begich")) {
        return Err(format!("s = {} elects {}", to_decimal(s, 2), w.label()));
    }
    Ok(())
}

fn center_squeeze() -> Check {
    let s = detect_center_squeeze(&alaska()).map_err(|e| e.to_string())?;
    ensure!(s.squeezed, "not squeezed");
    eq(
        "Condorcet winner",
        s.condorcet_winner.map(|c| c.to_string()),
        Some("Begich".into()),
    )?;
    eq("elimination round", s.irv_elimination_round, Some(1))?;
    eq("IRV winner", s.irv_winner.as_str(), "Peltola")
}

fn uniform_table<T: Copy>(t: &[[T; 3]; 3], to: impl Fn(T) -> Rational) -> GroupParams {
    let mut g = GroupParams::uniform(to(t[0][1]));
    for a in 0..3 {
        for b in (0..3).filter(|&b| b != a) {
            g = g.with_group(NAMES[a], NAMES[b], to(t[a][b])).unwrap();
        }
    }
    g
}

fn config(cases: u32) -> Config {
    Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    }
}

fn fail<T: std::fmt::Debug>(name: &str, e: proptest::test_runner::TestError<T>) -> String {
    format!("{name}: {e}")
}

fn property_suites() -> Check {
    let mut runner = TestRunner::new(config(1000));

    let tables = (
        intents(100, true),
        prop::array::uniform3(prop::array::uniform3(any::<bool>())),
        prop::array::uniform3(prop::array::uniform3(1u64..=4)),
    );
    runner
        .run(&tables, |(v, approve, stars)| {
            let p = profile_of(&v);
            for (basis, ties) in [(Basis::RankedOnly, false), (Basis::IncludeTopTies, true)] {
                let t = pairwise_tallies(&p, basis);
                for (a, b) in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)] {
                    prop_assert_eq!(t.prefers_idx(a, b), oracle_prefers(&v, a, b, ties));
                }
            }
            let ap = evaluate_approval(
                &p,
                &ApprovalScenario(uniform_table(&approve, |x| int(x as u64))),
            )
            .unwrap();
            let want = oracle_approval(&v, &approve);
            for (c, &n) in want.iter().enumerate() {
                prop_assert_eq!(ap.scores.at(c), &int(n));
            }
            let want = oracle_star_scores(&v, &stars);
            match evaluate_star(&p, &StarScenario(uniform_table(&stars, int))) {
                Ok(out) => {
                    for (c, &n) in want.iter().enumerate() {
                        prop_assert_eq!(out.scores.at(c), &int(n));
                    }
                    let fa = p.roster().require(out.finalists.0.as_str()).unwrap();
                    let fb = p.roster().require(out.finalists.1.as_str()).unwrap();
                    let (x, y, _) = oracle_star_runoff(&v, &stars, fa, fb);
                    prop_assert_eq!((out.runoff.a_votes, out.runoff.b_votes), (x, y));
                }
                Err(Error::FinalistTie { .. }) => {}
                Err(e) => prop_assert!(false, "{}", e),
            }
            Ok(())
        })
        .map_err(|e| fail("oracle equivalence", e))?;

    let mut runner = TestRunner::new(config(300));
    runner
        .run(
            &(intents(100, true), 0u64..=100, 0u64..=100),
            |(v, a, b)| {
                let p = profile_of(&v);
                let (lo, hi) = (a.min(b), a.max(b));
                let ap = |x: u64| {
                    evaluate_approval(&p, &ApprovalScenario::uniform(ratio(x, 100)))
                        .unwrap()
                        .scores
                };
                let (s_lo, s_hi, s_zero) = (ap(lo), ap(hi), ap(0));
                let s_sum = (lo + hi <= 100).then(|| ap(lo + hi));
                let star = |x: u64| {
                    evaluate_star(&p, &StarScenario::uniform(ratio(100 + 3 * x, 100)))
                        .map(|o| o.scores)
                };
                for c in 0..3 {
                    prop_assert!(s_lo.at(c) <= s_hi.at(c));
                    if let Some(sum) = &s_sum {
                        // Affine: f(lo + hi) + f(0) = f(lo) + f(hi).
                        prop_assert_eq!(sum.at(c) + s_zero.at(c), s_lo.at(c) + s_hi.at(c));
                    }
                }
                if let (Ok(t_lo), Ok(t_hi)) = (star(lo), star(hi)) {
                    for c in 0..3 {
                        prop_assert!(t_lo.at(c) <= t_hi.at(c));
                    }
                }
                Ok(())
            },
        )
        .map_err(|e| fail("linearity/monotonicity", e))?;

    runner
        .run(&intents(100, true), |v| {
            let p = profile_of(&v);
            let text = write_condensed(&p);
            prop_assert_eq!(parse_condensed(text.as_bytes()).unwrap(), p);
            Ok(())
        })
        .map_err(|e| fail("round trip", e))?;

    runner
        .run(&intents(100, false), |v| {
            if v.is_empty() {
                return Ok(());
            }
            let p = profile_of(&v);
            let out = tabulate_irv_with(&p, TiePolicy::LastInRoster).unwrap();
            let last = out.final_round();
            if let [(a, na), (b, nb)] = last.tallies.as_slice() {
                let ia = p.roster().require(a.as_str()).unwrap();
                let ib = p.roster().require(b.as_str()).unwrap();
                prop_assert_eq!(*na, oracle_prefers(&v, ia, ib, false));
                prop_assert_eq!(*nb, oracle_prefers(&v, ib, ia, false));
            }
            Ok(())
        })
        .map_err(|e| fail("IRV final round", e))?;

    runner
        .run(&(intents(100, false), 100u64..=400), |(v, s)| {
            let p = profile_of(&v);
            if let Some(l) = oracle_condorcet_loser(&v) {
                if let Ok(out) = evaluate_star(&p, &StarScenario::uniform(ratio(s, 100))) {
                    prop_assert!(!out.winner.is(NAMES[l]));
                }
            }
            Ok(())
        })
        .map_err(|e| fail("STAR vs Condorcet loser", e))?;
    Ok(())
}

fn machine_outputs(fixture: &str) -> Vec<Vec<String>> {
    let commands: &[&[&str]] = &[
        &["ingest"],
        &["irv"],
        &["pairwise"],
        &["pairwise", "--basis", "include-ties"],
        &["condorcet"],
        &["squeeze"],
        &["approval", "range"],
        &["approval", "range", "--plot-data"],
        &["approval", "eval", "--p", "0.35"],
        &[
            "approval",
            "threshold",
            "--riser",
            "Begich",
            "--leader",
            "Peltola",
        ],
        &[
            "approval",
            "clinch",
            "--candidate",
            "Begich",
            "--from",
            "Peltola",
        ],
        &["approval", "sweep"],
        &["star", "range"],
        &["star", "range", "--plot-data"],
        &["star", "eval", "--s", "1"],
        &[
            "star",
            "threshold",
            "--guaranteed",
            "Begich",
            "--rival",
            "Palin",
        ],
        &["star", "sweep"],
    ];
    let mut all = Vec::new();
    for cmd in commands {
        for format in ["csv", "json-lines"] {
            let mut argv = vec!["ballotlab"];
            argv.extend_from_slice(cmd);
            argv.extend([fixture, "--format", format]);
            all.push(argv.iter().map(|s| s.to_string()).collect());
        }
    }
    all
}

fn determinism() -> Check {
    let fixture = fixture_path().to_string_lossy().into_owned();
    for argv in machine_outputs(&fixture) {
        let once = || {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = run(argv.clone(), &mut out, &mut err);
            (code, out)
        };
        let (c1, o1) = once();
        let (c2, o2) = once();
        ensure!(c1 == 0, "{} exited {c1}", argv.join(" "));
        ensure!(
            c1 == c2 && o1 == o2,
            "{} differs between runs",
            argv.join(" ")
        );
        ensure!(!o1.is_empty(), "{} produced no output", argv.join(" "));
    }
    let bin = env!("CARGO_BIN_EXE_ballotlab");
    let args = ["approval", "sweep", fixture.as_str(), "--format", "csv"];
    let a = std::process::Command::new(bin)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let b = std::process::Command::new(bin)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        a.status.success() && a.stdout == b.stdout,
        "binary output differs between runs"
    );
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("approval range exact", approval_range_exact),
        ("STAR range exact", star_range_exact),
        (
            "pairwise tallies and Condorcet winner/loser",
            pairwise_exact,
        ),
        ("IRV rounds, transfers and winner", irv_exact),
        ("approval threshold p* and sweep", approval_threshold),
        ("approval clinch bound", clinch_bound),
        ("STAR threshold, runoff and sweep", star_threshold),
        ("center squeeze diagnostic", center_squeeze),
        ("property suites", property_suites),
        ("deterministic machine output", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
