//! Subcommand definitions and their text/JSON renderings.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use misere_core::exploit::{
    self, best_first_guesses, dominance_check, limit_2a, monotonicity_check, path_tables,
    rank_order_report, spread_report, star_PQ, PathTables, TableMode,
};
use misere_core::optimal;
use misere_core::rational::{fraction_string, to_f64};
use misere_core::recurrence::{all_cases, hyper_case, verify, RationalPolynomial};
use misere_core::session::{GameSession, NewSession, SessionStore, Status};
use misere_core::simulate::{exhaustive_value, monte_carlo, StrategySpec};
use misere_core::spider::{coupling_report, SpiderSolver, SpiderState};
use misere_core::{parse_tree, Rational};

#[derive(Debug, Parser)]
#[command(name = "misere", version, about = "Solvers, tables and a game server for the misère tree search game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    All,
    Monotonicity,
    Rank,
    Bounds,
    Guesses,
    Stars,
    Dominance,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal-vs-optimal value and best moves.
    Solve {
        /// Tree spec: path:N, star:N, spider:a,b,c or edges:1-2,2-3,...
        tree: String,
        #[arg(long)]
        json: bool,
    },
    /// Exploiter-vs-random values P, Q and best first moves.
    Exploit {
        tree: String,
        #[arg(long)]
        json: bool,
    },
    /// Path tables p_n, q_n, s_n, a_n for n = 1..N.
    Tables {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Estimate of the limiting win probability 2a with its error bound.
    Limit {
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Verifies the table properties and prints one line per check.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        what: CheckKind,
        /// Table length for the monotonicity and rank checks.
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Hypergeometric casework for the homogenized path recurrence.
    Hyper {
        /// Factor pair such as `n+2,n-1` or `1,1`.
        #[arg(long, conflicts_with_all = ["all", "verify"])]
        case: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        verify: bool,
    },
    /// Monte Carlo (or exact) first-player win probability for two strategies.
    Simulate {
        tree: String,
        #[arg(long, default_value = "optimal")]
        first: String,
        #[arg(long, default_value = "optimal")]
        second: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also sum every evolution exactly (at most 12 vertices).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        json: bool,
    },
    /// Spider values through the leg-multiset game.
    Spider {
        /// Leg lengths, e.g. 3,2,2.
        #[arg(long, value_delimiter = ',', required = true)]
        legs: Vec<usize>,
        /// Compare against the tree solvers on the same spider.
        #[arg(long)]
        couple: bool,
        #[arg(long)]
        json: bool,
    },
    /// Play against the engine in the terminal.
    Play {
        tree: String,
        #[arg(long, default_value = "optimal")]
        engine: String,
        #[arg(long)]
        engine_first: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        hints: bool,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory for per-session JSON-lines event logs.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
}

fn show(x: &Rational) -> String {
    format!("{} ≈ {:.12}", fraction_string(x), to_f64(x))
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn list(set: &BTreeSet<usize>) -> String {
    set.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn strategy(name: &str) -> Result<StrategySpec> {
    Ok(name.parse()?)
}

/// Runs one subcommand, writing its report to `out`. Interactive play reads
/// from standard input.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Solve { tree, json } => solve(&tree, json, out),
        Command::Exploit { tree, json } => exploit_cmd(&tree, json, out),
        Command::Tables { n, mode, format } => tables(n, &mode, format, out),
        Command::Limit { n, json } => limit(n, json, out),
        Command::Check { what, n } => check(what, n, out),
        Command::Hyper { case, all, verify } => hyper(case, all, verify, out),
        Command::Simulate {
            tree,
            first,
            second,
            trials,
            seed,
            exact,
            json,
        } => simulate(&tree, &first, &second, trials, seed, exact, json, out),
        Command::Spider { legs, couple, json } => spider(&legs, couple, json, out),
        Command::Play {
            tree,
            engine,
            engine_first,
            seed,
            hints,
        } => {
            let req = NewSession {
                tree,
                engine: strategy(&engine)?,
                human_first: !engine_first,
                seed,
            };
            let stdin = std::io::stdin();
            play(&req, hints, &mut stdin.lock(), out)
        }
        Command::Serve { port, log_dir } => {
            let store = match log_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    SessionStore::with_log_dir(dir)
                }
                None => SessionStore::new(),
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::api::serve(port, Arc::new(store)))
        }
    }
}

fn solve(spec: &str, json: bool, out: &mut dyn Write) -> Result<()> {
    let t = parse_tree(spec)?;
    let report = optimal::optimal_moves(&t)?;
    if json {
        return json_line(out, &report);
    }
    writeln!(out, "tree: {spec} (n = {})", t.n())?;
    writeln!(out, "first-player value: {}", show(&report.value))?;
    writeln!(out, "best moves: {}", list(&report.best_moves))?;
    for (v, value) in &report.per_move_values {
        writeln!(out, "  {v:>4}  {}", show(value))?;
    }
    Ok(())
}

fn exploit_cmd(spec: &str, json: bool, out: &mut dyn Write) -> Result<()> {
    let t = parse_tree(spec)?;
    let report = exploit::exploit_values(&t)?;
    if json {
        return json_line(out, &report);
    }
    writeln!(out, "tree: {spec} (n = {})", t.n())?;
    writeln!(out, "P (exploiter first):  {}", show(&report.p))?;
    writeln!(out, "Q (exploiter second): {}", show(&report.q))?;
    writeln!(out, "best first moves: {}", list(&report.best_first_moves))?;
    for (v, value) in &report.per_move {
        writeln!(out, "  {v:>4}  {}", show(value))?;
    }
    Ok(())
}

fn tables(n: usize, mode: &str, format: Format, out: &mut dyn Write) -> Result<()> {
    let mode: TableMode = mode.parse()?;
    let t = path_tables(n, mode)?;
    match format {
        Format::Json => json_line(out, &t.rows()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "p_n", "q_n", "s_n", "a_n"])?;
            for row in t.rows() {
                w.write_record([
                    row.n.to_string(),
                    format!("{:.17}", row.p.decimal),
                    format!("{:.17}", row.q.decimal),
                    format!("{:.17}", row.s.decimal),
                    format!("{:.17}", row.a.decimal),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn limit(n: usize, json: bool, out: &mut dyn Write) -> Result<()> {
    let est = limit_2a(n)?;
    if json {
        return json_line(out, &est);
    }
    writeln!(out, "N = {}", est.n)?;
    writeln!(out, "a_N  = {:.17}", est.a_n)?;
    writeln!(out, "2a_N = {:.17}", est.estimate)?;
    writeln!(out, "|2a - 2a_N| <= {:.3e} ({} spread)", est.error_bound, est.certificate)?;
    Ok(())
}

fn line(out: &mut dyn Write, ok: bool, name: &str, detail: &str) -> Result<bool> {
    writeln!(out, "[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" })?;
    Ok(ok)
}

fn check(what: CheckKind, n: usize, out: &mut dyn Write) -> Result<()> {
    let wants = |k: CheckKind| what == CheckKind::All || what == k;
    let mut ok = true;
    if wants(CheckKind::Monotonicity) || wants(CheckKind::Rank) {
        let t: PathTables<f64> = PathTables::build(n)?;
        if wants(CheckKind::Monotonicity) {
            let r = monotonicity_check(&t)?;
            ok &= line(
                out,
                r.passed(),
                "p_n, q_n strictly increasing",
                &format!("{} <= n <= {}; first failures p: {:?}, q: {:?}", r.from, r.to, r.p_violation, r.q_violation),
            )?;
        }
        if wants(CheckKind::Rank) {
            let r = rank_order_report(&t)?;
            ok &= line(out, r.passed(), "rank order of q_n", &format!("{r:?}"))?;
        }
    }
    if wants(CheckKind::Bounds) {
        let t: PathTables<Rational> = PathTables::build(n.min(exploit::EXACT_TABLE_CAP))?;
        let r = spread_report(&t);
        ok &= line(
            out,
            r.passed(),
            "spread bounds and weighted averages",
            &format!("k <= {}; {}", r.n_max, r.low_spreads.join(", ")),
        )?;
        for d in &r.discrepancies {
            writeln!(out, "  note: {} computed {} vs published {}: {}", d.quantity, d.computed, d.published, d.note)?;
        }
    }
    if wants(CheckKind::Guesses) {
        let bad: Vec<usize> = (3..=30)
            .filter(|&m| best_first_guesses(m) != BTreeSet::from([2, m - 1]))
            .collect();
        ok &= line(out, bad.is_empty(), "best first guesses {2, n-1}", &format!("3 <= n <= 30; failures {bad:?}"))?;
    }
    if wants(CheckKind::Stars) {
        let mut bad = Vec::new();
        for m in 1..=12 {
            let r = exploit::exploit_values_general(&misere_core::make_star(m)?)?;
            if (r.p, r.q) != star_PQ(m) {
                bad.push(m);
            }
        }
        ok &= line(out, bad.is_empty(), "star closed forms", &format!("n <= 12; failures {bad:?}"))?;
    }
    if wants(CheckKind::Dominance) {
        let r = dominance_check(8)?;
        let classes: usize = r.classes.iter().map(|c| c.1).sum();
        ok &= line(out, r.passed(), "stars dominate", &format!("{classes} trees with n <= 8"))?;
    }
    if !ok {
        bail!("some checks failed");
    }
    Ok(())
}

fn parse_case(text: &str) -> Result<(RationalPolynomial, RationalPolynomial)> {
    let (a, b) = text
        .split_once(',')
        .context("expected a factor pair such as n+2,n-1")?;
    Ok((a.parse()?, b.parse()?))
}

fn hyper(case: Option<String>, all: bool, verify_flag: bool, out: &mut dyn Write) -> Result<()> {
    if verify_flag {
        let r = verify();
        for c in &r.checks {
            line(out, c.passed, &c.name, &c.detail)?;
        }
        for e in &r.errata {
            writeln!(out, "erratum: {e}")?;
        }
        if !r.passed() {
            bail!("casework verification failed");
        }
        return Ok(());
    }
    if all {
        return json_line(out, &all_cases());
    }
    let Some(case) = case else {
        bail!("pass --case A,B, --all or --verify");
    };
    let (a, b) = parse_case(&case)?;
    json_line(out, &hyper_case(&a, &b)?)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    spec: &str,
    first: &str,
    second: &str,
    trials: u64,
    seed: u64,
    exact: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let t = parse_tree(spec)?;
    let (first, second) = (strategy(first)?, strategy(second)?);
    let result = monte_carlo(&t, first, second, trials, seed)?;
    let exact_value = if exact { Some(exhaustive_value(&t, first, second)?) } else { None };
    if json {
        let value = serde_json::json!({
            "result": result,
            "exact": exact_value.as_ref().map(misere_core::Prob::from),
        });
        return json_line(out, &value);
    }
    writeln!(out, "{first} vs {second} on {spec}, {trials} trials, seed {seed}")?;
    writeln!(out, "first player wins: {} ({:.6} ± {:.6})", result.wins, result.mean, result.stderr)?;
    if let Some(v) = exact_value {
        writeln!(out, "exact: {} ({:.2} standard errors away)", show(&v), result.z_score(to_f64(&v)))?;
    }
    Ok(())
}

fn spider(legs: &[usize], couple: bool, json: bool, out: &mut dyn Write) -> Result<()> {
    let state = SpiderState::rooted(legs)?;
    let values = SpiderSolver::new().values(&state)?;
    let coupling = if couple { Some(coupling_report(legs)?) } else { None };
    if json {
        let value = serde_json::json!({
            "state": state,
            "values": values,
            "coupling": coupling.as_ref().map(|c| serde_json::json!({"agrees": c.agrees(), "tree": c.tree})),
        });
        return json_line(out, &value);
    }
    writeln!(out, "state {state} ({} vertices)", state.size())?;
    writeln!(out, "optimal: {}", show(&values.optimal))?;
    writeln!(out, "P:       {}", show(&values.p))?;
    writeln!(out, "Q:       {}", show(&values.q))?;
    if let Some(c) = coupling {
        let verdict = if c.agrees() { "agree" } else { "DISAGREE" };
        writeln!(out, "tree solvers {verdict}")?;
        if !c.agrees() {
            bail!("coupling failed for legs {legs:?}");
        }
    }
    Ok(())
}

/// Terminal game loop: one vertex label per line, `q` to quit.
pub fn play(req: &NewSession, hints: bool, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<()> {
    let mut session = GameSession::new("terminal".into(), req)?;
    writeln!(out, "tree {} vs {} engine; guess a vertex, q to quit", req.tree, req.engine)?;
    for m in session.history() {
        writeln!(out, "engine guessed {}", m.vertex)?;
    }
    loop {
        if session.status() != Status::Active {
            break;
        }
        let view = session.view(hints)?;
        let live: Vec<String> = view.live.iter().map(ToString::to_string).collect();
        writeln!(out, "live: {}", live.join(" "))?;
        if let Some(h) = &view.hints {
            for (v, p) in &h.values {
                writeln!(out, "  {v:>4}  {} ≈ {:.6}", p.fraction, p.decimal)?;
            }
        }
        write!(out, "> ")?;
        out.flush()?;
        let mut text = String::new();
        if input.read_line(&mut text)? == 0 || text.trim() == "q" {
            writeln!(out)?;
            return Ok(());
        }
        let Ok(vertex) = text.trim().parse::<usize>() else {
            writeln!(out, "enter a vertex label")?;
            continue;
        };
        match session.guess(vertex, false) {
            Ok(outcome) => {
                if outcome.hit_mine {
                    writeln!(out, "{vertex} was the mine")?;
                } else if let Some(reply) = outcome.engine_reply {
                    writeln!(out, "engine guessed {}", reply.vertex)?;
                }
            }
            Err(e) => writeln!(out, "{e}")?,
        }
    }
    let view = session.view(false)?;
    let verdict = if view.status == Status::HumanWon { "you win" } else { "you lose" };
    writeln!(out, "{verdict}; the mine was {}", view.mine.unwrap_or_default())?;
    Ok(())
}
