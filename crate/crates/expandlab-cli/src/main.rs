//! Batch command-line front end for the expandlab engine.
//!
//! One command per invocation: eval, verify, trace, or search. The three
//! output formats (json, csv, text) carry the same data field-for-field,
//! and all randomized commands are bit-reproducible for a fixed --seed and
//! --budget regardless of --threads.

use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use expandlab::bounds::{self, AsymptoticBound, BoundReport, ConvexPreset, ExactBound, RhsValue, Verdict};
use expandlab::expanders::{self, ChainBranch, ChainKind, GrowthChain};
use expandlab::expr;
use expandlab::finset::SetEnv;
use expandlab::search::{self, FamilySpec, SearchResult};
use expandlab::slopes::{self, ClusterTrace};
use expandlab::{Budget, FiniteSet, Rational};

#[derive(Parser)]
#[command(name = "expandlab", version, about = "Exact finite-set sum-product workbench")]
struct Cli {
    /// Cap on the elements any single set operation may produce
    /// (default 10000000; the EXPANDLAB_BUDGET variable overrides it).
    #[arg(long, global = true, value_name = "N")]
    budget: Option<usize>,

    /// Worker threads for set operations (default: one per core).
    /// Results are identical for every thread count.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Output format; all three carry the same data.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized commands (trace slopes, search local).
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,

    /// Bind a set name to a set file (one scalar per line, '#' comments).
    /// Repeatable.
    #[arg(long = "set", global = true, value_name = "NAME=FILE")]
    sets: Vec<String>,

    /// Generate the set A from a family shorthand: ap:start:step:n,
    /// gp:start:ratio:n, rand:n:lo:hi:seed, or randq:n:lo:hi:seed.
    #[arg(long, global = true, value_name = "SPEC")]
    family: Option<String>,

    /// Write the evaluated set to FILE in set-file format (eval only).
    #[arg(long, global = true, value_name = "FILE")]
    dump: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a set expression over the bound sets and print its
    /// cardinality.
    Eval {
        /// Expression over named sets, e.g. "(A-A)/(A-A)" or "R(A)".
        expr: String,
    },
    /// Check a bound suite and print one report row per bound. Exit code
    /// is 0 iff no row errored and no exact bound failed.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Left fold count for the iterated-sumset bound.
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Right fold count for the iterated-sumset bound.
        #[arg(long, default_value_t = 1)]
        l: u32,
        /// Shift parameter for the shifted asymptotic bounds (rational).
        #[arg(long, value_name = "RAT")]
        alpha: Option<String>,
        /// Convex preset for the convexity bound: reciprocal or square.
        #[arg(long, value_name = "PRESET")]
        f: Option<String>,
    },
    /// Emit a trace of one growth computation.
    Trace {
        #[arg(value_enum)]
        kind: TraceKind,
        /// Steps for thm2-chain, folds for kfold.
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Collision tuning constant for slope traces (positive rational).
        #[arg(long, default_value = "1/1000000", value_name = "RAT")]
        c: String,
        /// Record every cluster instead of only the first.
        #[arg(long)]
        all_clusters: bool,
    },
    /// Search for a set minimizing an expression's cardinality.
    Search {
        #[command(subcommand)]
        mode: SearchMode,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Exact,
    Asymptotic,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceKind {
    /// Difference-product identity chain: D, DD, DDD, R, R*R, R*(R-1).
    Thm1,
    /// Greedy ratio-set growth chain from (A-A)/(A-A).
    Thm2Chain,
    /// Iterated products of the difference set.
    Kfold,
    /// Slope decomposition, dyadic bucket, and cluster construction.
    Slopes,
}

#[derive(Subcommand)]
enum SearchMode {
    /// Exact minimum over all m-subsets of an integer universe.
    Exhaustive {
        expr: String,
        /// Subset size.
        #[arg(long)]
        m: usize,
        /// Inclusive integer interval, e.g. 1..6.
        #[arg(long, value_name = "LO..HI")]
        universe: String,
    },
    /// Seeded strict-descent search over m-subsets of an integer range.
    Local {
        expr: String,
        /// Subset size.
        #[arg(long)]
        m: usize,
        /// Inclusive integer interval, e.g. 1..100.
        #[arg(long, value_name = "LO..HI")]
        range: String,
        /// Descent steps per restart.
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        /// Independent restarts; the best result wins, ties to the
        /// earliest restart.
        #[arg(long, default_value_t = 4)]
        restarts: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the thread pool")?;
    }
    let budget = resolve_budget(cli.budget)?;
    let env = load_sets(&cli.sets, cli.family.as_deref())?;
    match cli.command {
        Command::Eval { expr } => {
            cmd_eval(&expr, &env, &budget, cli.format, cli.dump.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, k, l, alpha, f } => {
            cmd_verify(suite, k, l, alpha.as_deref(), f.as_deref(), &env, &budget, cli.format)
        }
        Command::Trace { kind, k, c, all_clusters } => {
            cmd_trace(kind, k, &c, all_clusters, cli.seed, &env, &budget, cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Search { mode } => {
            cmd_search(mode, cli.seed, &budget, cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn resolve_budget(flag: Option<usize>) -> Result<Budget> {
    if let Some(n) = flag {
        return Ok(Budget::new(n));
    }
    if let Ok(text) = std::env::var("EXPANDLAB_BUDGET") {
        let n: usize = text
            .trim()
            .parse()
            .with_context(|| format!("EXPANDLAB_BUDGET must be an integer, got {text:?}"))?;
        return Ok(Budget::new(n));
    }
    Ok(Budget::default())
}

fn load_sets(bindings: &[String], family: Option<&str>) -> Result<SetEnv> {
    let mut env = SetEnv::new();
    for binding in bindings {
        let (name, path) = binding
            .split_once('=')
            .ok_or_else(|| anyhow!("--set wants NAME=FILE, got {binding:?}"))?;
        let name = name.trim();
        let mut chars = name.chars();
        let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
        if !head_ok || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            bail!("set name {name:?} is not an identifier");
        }
        if env.contains_key(name) {
            bail!("set {name} is bound twice");
        }
        let text =
            fs::read_to_string(path).with_context(|| format!("reading set file {path}"))?;
        let set = FiniteSet::parse_text(&text)
            .with_context(|| format!("parsing set file {path}"))?;
        env.insert(name.to_owned(), set);
    }
    if let Some(spec) = family {
        if env.contains_key("A") {
            bail!("--family also binds A; drop --set A=... or the family");
        }
        let set = search::generate(&parse_family(spec)?)
            .with_context(|| format!("generating family {spec}"))?;
        env.insert("A".to_owned(), set);
    }
    Ok(env)
}

fn parse_family(spec: &str) -> Result<FamilySpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    let scalar = |text: &str| {
        Rational::parse_scalar(text).with_context(|| format!("in family {spec:?}"))
    };
    match parts.as_slice() {
        ["ap", start, step, n] => Ok(FamilySpec::Ap {
            start: scalar(start)?,
            step: scalar(step)?,
            n: parse_int(n, spec)?,
        }),
        ["gp", start, ratio, n] => Ok(FamilySpec::Gp {
            start: scalar(start)?,
            ratio: scalar(ratio)?,
            n: parse_int(n, spec)?,
        }),
        ["rand", n, lo, hi, seed] => Ok(FamilySpec::RandomInt {
            n: parse_int(n, spec)?,
            lo: parse_int(lo, spec)?,
            hi: parse_int(hi, spec)?,
            seed: parse_int(seed, spec)?,
        }),
        ["randq", n, lo, hi, seed] => Ok(FamilySpec::RandomRat {
            n: parse_int(n, spec)?,
            lo: parse_int(lo, spec)?,
            hi: parse_int(hi, spec)?,
            seed: parse_int(seed, spec)?,
        }),
        _ => bail!(
            "family {spec:?} wants ap:start:step:n, gp:start:ratio:n, \
             rand:n:lo:hi:seed, or randq:n:lo:hi:seed"
        ),
    }
}

fn parse_int<T: std::str::FromStr>(text: &str, ctx: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    text.parse().with_context(|| format!("bad integer {text:?} in {ctx:?}"))
}

/// Inclusive integer interval "LO..HI".
fn parse_range(text: &str) -> Result<(i64, i64)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("interval wants LO..HI, got {text:?}"))?;
    let lo: i64 = parse_int(lo, text)?;
    let hi: i64 = parse_int(hi, text)?;
    if lo > hi {
        bail!("empty interval {text:?}");
    }
    Ok((lo, hi))
}

fn require_a(env: &SetEnv) -> Result<&FiniteSet> {
    env.get("A").ok_or_else(|| anyhow!("bind A with --set A=FILE or --family SPEC"))
}

fn cmd_eval(
    expr_text: &str,
    env: &SetEnv,
    budget: &Budget,
    format: Format,
    dump: Option<&std::path::Path>,
) -> Result<()> {
    let parsed = expr::parse(expr_text)?;
    let value = expr::eval(&parsed, env, budget)?;
    if let Some(path) = dump {
        fs::write(path, value.to_text())
            .with_context(|| format!("writing dump file {}", path.display()))?;
    }
    match format {
        Format::Text => println!("{}", value.len()),
        Format::Json => {
            // json! orders keys alphabetically, which is stable.
            let doc = serde_json::json!({ "cardinality": value.len(), "expr": expr_text });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(["expr", "cardinality"])?;
            w.write_record([expr_text, &value.len().to_string()])?;
            w.flush()?;
        }
    }
    Ok(())
}

/// One verify row. Errored bounds keep their row with empty measurements
/// and the message in the verdict cell, so a suite never dies half-printed.
#[derive(Serialize)]
struct VerifyRow {
    bound_id: String,
    lhs: Option<u64>,
    rhs: Option<RhsValue>,
    ratio: Option<f64>,
    verdict: String,
    input: String,
}

impl From<BoundReport> for VerifyRow {
    fn from(r: BoundReport) -> VerifyRow {
        VerifyRow {
            bound_id: r.bound_id,
            lhs: Some(r.lhs),
            rhs: Some(r.rhs),
            ratio: Some(r.ratio),
            verdict: r.verdict.to_string(),
            input: r.input,
        }
    }
}

fn error_row(bound_id: &str, message: String, env: &SetEnv) -> VerifyRow {
    let input = env.get("A").map(|a| a.digest("A")).unwrap_or_default();
    VerifyRow {
        bound_id: bound_id.to_owned(),
        lhs: None,
        rhs: None,
        ratio: None,
        verdict: format!("ERROR: {message}"),
        input,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Suite,
    k: u32,
    l: u32,
    alpha: Option<&str>,
    f: Option<&str>,
    env: &SetEnv,
    budget: &Budget,
    format: Format,
) -> Result<ExitCode> {
    let alpha = match alpha {
        Some(text) => Rational::parse_scalar(text).context("parsing --alpha")?,
        None => Rational::ONE,
    };
    let f = match f {
        Some(id) => ConvexPreset::from_cli_id(id)
            .ok_or_else(|| anyhow!("--f wants reciprocal or square, got {id:?}"))?,
        None => ConvexPreset::Reciprocal,
    };

    let mut rows = Vec::new();
    let mut exact_fail = false;
    let mut errored = false;

    if matches!(suite, Suite::Exact | Suite::All) {
        let exact = [
            ExactBound::Ungar,
            ExactBound::RatioSum,
            ExactBound::RuzsaTriangle,
            ExactBound::Plunnecke { k, l },
        ];
        for bound in exact {
            match bounds::check_exact(bound, env, budget) {
                Ok(report) => {
                    exact_fail |= report.verdict == Verdict::Fail;
                    rows.push(VerifyRow::from(report));
                }
                Err(e) => {
                    errored = true;
                    rows.push(error_row(bound.cli_id(), e.to_string(), env));
                }
            }
        }
    }
    if matches!(suite, Suite::Asymptotic | Suite::All) {
        let asymptotic = vec![
            AsymptoticBound::Ddd,
            AsymptoticBound::RatioSum,
            AsymptoticBound::AaSumRatio,
            AsymptoticBound::AaaRatio,
            AsymptoticBound::FiveVar,
            AsymptoticBound::DiffProd,
            AsymptoticBound::ShiftedProd,
            AsymptoticBound::RTriple,
            AsymptoticBound::Gs { alpha: alpha.clone() },
            AsymptoticBound::Gs1 { alpha: alpha.clone() },
            AsymptoticBound::Gs2 { alpha: alpha.clone() },
            AsymptoticBound::Enr { f },
            AsymptoticBound::Lund,
            AsymptoticBound::LundTwoSets,
            AsymptoticBound::Jorn { alpha },
        ];
        for bound in asymptotic {
            match bounds::report_asymptotic(&bound, env, budget) {
                Ok(report) => rows.push(VerifyRow::from(report)),
                Err(e) => {
                    errored = true;
                    rows.push(error_row(bound.cli_id(), e.to_string(), env));
                }
            }
        }
    }

    emit_verify(&rows, format)?;
    if errored || exact_fail {
        Ok(ExitCode::FAILURE)
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn emit_verify(rows: &[VerifyRow], format: Format) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(rows)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Text => {
            let header = ["bound_id", "lhs", "rhs", "ratio", "verdict", "input"];
            let cells: Vec<[String; 6]> = rows
                .iter()
                .map(|r| {
                    [
                        r.bound_id.clone(),
                        r.lhs.map_or_else(|| "-".to_owned(), |v| v.to_string()),
                        r.rhs.as_ref().map_or_else(|| "-".to_owned(), |v| v.to_string()),
                        r.ratio.map_or_else(|| "-".to_owned(), |v| v.to_string()),
                        r.verdict.clone(),
                        r.input.clone(),
                    ]
                })
                .collect();
            print_table(&header, &cells);
        }
    }
    Ok(())
}

fn print_table<const W: usize>(header: &[&str; W], rows: &[[String; W]]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = io::stdout().lock();
    let mut line = String::new();
    for (w, cell) in widths.iter().zip(header.iter()) {
        if !line.is_empty() {
            line.push_str("  ");
        }
        line.push_str(&format!("{cell:<w$}"));
    }
    let _ = writeln!(out, "{}", line.trim_end());
    for row in rows {
        line.clear();
        for (w, cell) in widths.iter().zip(row.iter()) {
            if !line.is_empty() {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:<w$}"));
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    kind: TraceKind,
    k: u32,
    c: &str,
    all_clusters: bool,
    seed: u64,
    env: &SetEnv,
    budget: &Budget,
    format: Format,
) -> Result<()> {
    let a = require_a(env)?;
    match kind {
        TraceKind::Thm1 => {
            let trace = expanders::diff_product_trace(a, budget)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&trace)?),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout());
                    w.serialize(&trace)?;
                    w.flush()?;
                }
                Format::Text => {
                    let pairs = [
                        ("A", trace.input.to_string()),
                        ("D", trace.d.to_string()),
                        ("DD", trace.dd.to_string()),
                        ("DDD", trace.ddd.to_string()),
                        ("DD_over_DD", trace.dd_over_dd.to_string()),
                        ("R", trace.r.to_string()),
                        ("R_times_R", trace.r_times_r.to_string()),
                        ("R_times_R_minus_1", trace.r_times_r_minus_one.to_string()),
                        ("r_products_equal", trace.r_products_equal.to_string()),
                    ];
                    for (key, value) in pairs {
                        println!("{key}: {value}");
                    }
                }
            }
        }
        TraceKind::Thm2Chain => {
            let chain = expanders::greedy_ratio_chain(a, k, budget)?;
            emit_chain(&chain, format)?;
        }
        TraceKind::Kfold => {
            let chain = expanders::kfold_difference_growth(a, k, budget)?;
            emit_chain(&chain, format)?;
        }
        TraceKind::Slopes => {
            let c = Rational::parse_scalar(c).context("parsing --c")?;
            let trace = slopes::cluster_trace(a, &c, seed, all_clusters, budget)?;
            emit_slopes(&trace, format)?;
        }
    }
    Ok(())
}

fn chain_kind_name(kind: ChainKind) -> &'static str {
    match kind {
        ChainKind::GreedyRatio => "GreedyRatio",
        ChainKind::KfoldDifference => "KfoldDifference",
    }
}

fn emit_chain(chain: &GrowthChain, format: Format) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(chain)?),
        Format::Csv | Format::Text => {
            let header = [
                "kind",
                "index",
                "cardinality",
                "times_r",
                "times_r_minus_one",
                "picked",
                "tie",
                "exponent",
                "truncated",
            ];
            let opt = |v: Option<String>| v.unwrap_or_default();
            let rows: Vec<[String; 9]> = chain
                .sizes
                .iter()
                .map(|s| {
                    [
                        chain_kind_name(chain.kind).to_owned(),
                        s.index.to_string(),
                        s.cardinality.to_string(),
                        opt(s.times_r.map(|v| v.to_string())),
                        opt(s.times_r_minus_one.map(|v| v.to_string())),
                        opt(s.picked.map(|p| {
                            match p {
                                ChainBranch::TimesR => "R".to_owned(),
                                ChainBranch::TimesRMinusOne => "R-1".to_owned(),
                            }
                        })),
                        s.tie.to_string(),
                        opt(s.exponent.map(|v| v.to_string())),
                        chain.truncated.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            if format == Format::Csv {
                let mut w = csv::Writer::from_writer(io::stdout());
                w.write_record(header)?;
                for row in &rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            } else {
                print_table(&header, &rows);
            }
        }
    }
    Ok(())
}

fn emit_slopes(trace: &ClusterTrace, format: Format) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(trace)?),
        Format::Csv => {
            let header = [
                "input",
                "n",
                "total_mass",
                "tau",
                "S_tau",
                "mass",
                "basic_bound",
                "M",
                "degraded",
                "seed",
                "B",
                "n_events",
                "degree",
                "p",
                "lll_feasible",
                "cluster_bound",
                "t",
                "E_max",
                "E_sum",
                "r_q",
                "within_threshold",
            ];
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(header)?;
            let summary = slope_summary_cells(trace);
            let cluster_rows: Vec<[String; 5]> = if trace.clusters.is_empty() {
                vec![Default::default()]
            } else {
                trace
                    .clusters
                    .iter()
                    .map(|r| {
                        [
                            r.t.to_string(),
                            r.e_max.to_string(),
                            r.e_sum.to_string(),
                            r.r_q.to_string(),
                            r.within_threshold.to_string(),
                        ]
                    })
                    .collect()
            };
            for cluster in &cluster_rows {
                let mut record = summary.to_vec();
                record.extend(cluster.iter().cloned());
                w.write_record(&record)?;
            }
            w.flush()?;
        }
        Format::Text => {
            let summary = slope_summary_cells(trace);
            let keys = [
                "input",
                "n",
                "total_mass",
                "tau",
                "S_tau",
                "mass",
                "basic_bound",
                "M",
                "degraded",
                "seed",
                "B",
                "n_events",
                "degree",
                "p",
                "lll_feasible",
                "cluster_bound",
            ];
            for (key, value) in keys.iter().zip(summary.iter()) {
                if !value.is_empty() {
                    println!("{key}: {value}");
                }
            }
            for r in &trace.clusters {
                println!(
                    "cluster t={}: E_max={} E_sum={} r_q={} within_threshold={}",
                    r.t, r.e_max, r.e_sum, r.r_q, r.within_threshold
                );
            }
        }
    }
    Ok(())
}

fn slope_summary_cells(trace: &ClusterTrace) -> [String; 16] {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let s_tau = trace
        .s_tau
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    [
        trace.input.clone(),
        trace.n.to_string(),
        trace.total_mass.to_string(),
        trace.tau.to_string(),
        s_tau,
        trace.mass.to_string(),
        trace.basic_bound.to_string(),
        trace.m.to_string(),
        trace.degraded.clone().unwrap_or_default(),
        trace.seed.to_string(),
        opt(trace.b.as_ref().map(|v| v.to_string())),
        opt(trace.n_events.map(|v| v.to_string())),
        opt(trace.degree.map(|v| v.to_string())),
        opt(trace.p.as_ref().map(|v| v.to_string())),
        opt(trace.lll_feasible.map(|v| v.to_string())),
        opt(trace.cluster_bound.as_ref().map(|v| v.to_string())),
    ]
}

fn cmd_search(mode: SearchMode, seed: u64, budget: &Budget, format: Format) -> Result<()> {
    let result = match mode {
        SearchMode::Exhaustive { expr: expr_text, m, universe } => {
            let parsed = expr::parse(&expr_text)?;
            let (lo, hi) = parse_range(&universe)?;
            let universe = FiniteSet::from_values((lo..=hi).map(Rational::from));
            search::exhaustive_min(&parsed, m, &universe, budget)?
        }
        SearchMode::Local { expr: expr_text, m, range, iters, restarts } => {
            let parsed = expr::parse(&expr_text)?;
            let (lo, hi) = parse_range(&range)?;
            search::local_search_min(&parsed, m, lo, hi, iters, restarts, seed, budget)?
        }
    };
    emit_search(&result, format)
}

fn emit_search(result: &SearchResult, format: Format) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(result)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(["best_set", "objective", "evaluations", "method", "seed"])?;
            let best = result
                .best_set
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            w.write_record([
                best,
                result.objective.to_string(),
                result.evaluations.to_string(),
                result.method.clone(),
                result.seed.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
            w.flush()?;
        }
        Format::Text => {
            println!("best_set: {}", result.best_set);
            println!("objective: {}", result.objective);
            println!("evaluations: {}", result.evaluations);
            println!("method: {}", result.method);
            if let Some(seed) = result.seed {
                println!("seed: {seed}");
            }
        }
    }
    Ok(())
}
