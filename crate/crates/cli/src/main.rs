//! `arv`: robustness monitoring from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use arv_core::automaton::{translate, translate_negation, AutomatonError};
use arv_core::distance::{vpd, vpd_unchecked, DistanceError, PointwiseDistance};
use arv_core::exec::Execution;
use arv_core::fixtures::{expected_table, value_table};
use arv_core::monitor::{MonitorError, RobustnessMonitor, RobustnessVerdict};
use arv_core::predicate::{to_dnf, wedge_minimize, PredicateError, Valuation};
use arv_core::semiring::{format_extended, Semiring};
use arv_core::spec::{Spec, SpecError, Trace, TraceError};
use arv_core::suites::{self, SuiteReport};
use arv_core::syntax::{parse_predicate, parse_spec, ParseError};

#[derive(Parser)]
#[command(name = "arv", version, about = "Quantitative runtime verification with weighted automata")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Final,
    PrefixSeries,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Discrete,
    Abs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Robustness of one or more CSV traces.
    Monitor {
        /// Specification file (`#lang stl` or `#lang sre` on the first line).
        #[arg(long)]
        spec: PathBuf,
        /// Trace CSV with a header row; repeat for a batch.
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, default_value = "minmax")]
        semiring: Semiring,
        /// Pointwise distance; defaults to discrete for boolean, abs otherwise.
        #[arg(long)]
        distance: Option<Dist>,
        #[arg(long, value_enum, default_value = "final")]
        mode: Mode,
        /// Write the prefix series as CSV (`t,rho,satisfied`). With several
        /// traces this is a directory holding one `<trace>.csv` per trace.
        #[arg(long)]
        prefix_series: Option<PathBuf>,
        /// Print one JSON object per trace instead of text.
        #[arg(long)]
        json: bool,
        /// Process the batch on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Translate a specification to a symbolic automaton.
    Translate {
        #[arg(long)]
        spec: PathBuf,
        /// Translate the negation (the complement for expressions).
        #[arg(long)]
        negate: bool,
        /// Write Graphviz DOT here; without --dot or --json, DOT goes to stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the randomized oracle suites and report mismatches.
    Oracle {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Divide every suite size by this factor.
        #[arg(long, default_value_t = 1)]
        shrink: usize,
        #[arg(long)]
        sequential: bool,
    },
    /// Value tables of the three-location example automaton.
    Fixtures,
    /// Distance from a valuation to a predicate.
    Vpd {
        /// `x=6,y=2`
        #[arg(long)]
        valuation: String,
        #[arg(long)]
        predicate: String,
        #[arg(long, default_value = "tropical")]
        semiring: Semiring,
        #[arg(long)]
        distance: Option<Dist>,
        /// Skip ∧-minimization and the tropical check.
        #[arg(long)]
        raw: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 parse error, 3 unbound variable, 4 untranslatable past operator, 1 other.
fn exit_code(e: &anyhow::Error) -> u8 {
    fn predicate(_: &PredicateError) -> u8 {
        3
    }
    fn automaton(e: &AutomatonError) -> u8 {
        match e {
            AutomatonError::Spec(SpecError::PastFragment) => 4,
            AutomatonError::Parse(_) => 2,
            _ => 1,
        }
    }
    fn distance(e: &DistanceError) -> u8 {
        match e {
            DistanceError::Predicate(p) => predicate(p),
            DistanceError::NotWedgeMinimal => 1,
        }
    }
    for cause in e.chain() {
        if cause.is::<ParseError>() {
            return 2;
        }
        if let Some(t) = cause.downcast_ref::<TraceError>() {
            return match t {
                TraceError::Io(_) => 1,
                _ => 2,
            };
        }
        if let Some(p) = cause.downcast_ref::<PredicateError>() {
            return predicate(p);
        }
        if cause.is::<SpecError>() {
            return 4;
        }
        if let Some(a) = cause.downcast_ref::<AutomatonError>() {
            return automaton(a);
        }
        if let Some(d) = cause.downcast_ref::<DistanceError>() {
            return distance(d);
        }
        if let Some(m) = cause.downcast_ref::<MonitorError>() {
            return match m {
                MonitorError::Distance(d) => distance(d),
                MonitorError::Predicate(p) => predicate(p),
                MonitorError::Automaton(a) => automaton(a),
                _ => 1,
            };
        }
    }
    1
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Monitor { spec, traces, semiring, distance, mode, prefix_series, json, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let mode = if prefix_series.is_some() { Mode::PrefixSeries } else { mode };
            monitor(&spec, &traces, semiring, distance, mode, prefix_series.as_deref(), json, exec)
        }
        Cmd::Translate { spec, negate, dot, json } => {
            let spec = load_spec(&spec)?;
            let a = if negate { translate_negation(&spec)? } else { translate(&spec)? };
            if dot.is_none() && json.is_none() {
                print!("{}", a.to_dot());
            }
            if let Some(p) = dot {
                write_atomic(&p, a.to_dot().as_bytes())?;
            }
            if let Some(p) = json {
                write_atomic(&p, a.to_json().as_bytes())?;
            }
            eprintln!(
                "{} locations, {} transitions, {} initial, {} final",
                a.num_locations,
                a.transitions.len(),
                a.initial.len(),
                a.finals.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Oracle { seed, shrink, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let n = |k: usize| (k / shrink.max(1)).max(1);
            let mut reps: Vec<SuiteReport> = vec![suites::vpd_suite(n(1000), seed, exec)];
            for s in Semiring::ALL {
                reps.push(suites::path_suite(n(500), seed, s, exec));
            }
            reps.push(suites::trace_distance_suite(n(200), seed, exec));
            for s in Semiring::ALL {
                reps.push(suites::soundness_suite(n(500), seed, s, exec));
            }
            reps.push(suites::perturbation_suite(n(200), seed, exec));
            reps.push(suites::translation_suite(n(60), n(60), seed, exec));
            let mut bad = 0;
            for r in &reps {
                println!("{r}");
                bad += r.failures;
            }
            println!("total mismatches: {bad}");
            Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Fixtures => fixtures(),
        Cmd::Vpd { valuation, predicate, semiring, distance, raw } => {
            let v = parse_valuation(&valuation)?;
            let d = to_dnf(&parse_predicate(&predicate)?);
            let pd = pointwise(distance, semiring);
            let x = if raw {
                vpd_unchecked(&v, &d, semiring, pd)?
            } else {
                vpd(&v, &wedge_minimize(&d), semiring, pd)?
            };
            println!("{}", format_extended(x));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pointwise(d: Option<Dist>, s: Semiring) -> PointwiseDistance {
    match d {
        Some(Dist::Discrete) => PointwiseDistance::Discrete01,
        Some(Dist::Abs) => PointwiseDistance::AbsDiff,
        None => PointwiseDistance::default_for(s),
    }
}

fn load_spec(path: &Path) -> Result<Spec> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = parse_spec(&src).with_context(|| format!("parsing {}", path.display()))?;
    if let Spec::Stl(f) = &spec {
        if let Some(op) = f.past_operator() {
            return Err(anyhow!(SpecError::PastFragment)
                .context(format!("operator `{op}` in {} is a past operator", path.display())));
        }
    }
    Ok(spec)
}

fn parse_valuation(s: &str) -> Result<Valuation> {
    let mut v = Valuation::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, x) = part.split_once('=').ok_or_else(|| ParseError {
            pos: 0,
            msg: format!("expected `name=value`, found `{part}`"),
        })?;
        let x: f64 = x.trim().parse().map_err(|_| ParseError { pos: 0, msg: format!("bad number in `{part}`") })?;
        v = v.with(k.trim(), x);
    }
    Ok(v)
}

/// Write to a sibling temporary file, then rename over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().ok_or_else(|| anyhow!("not a file path: {}", path.display()))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn series_csv(series: &[RobustnessVerdict]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "rho", "satisfied"])?;
    for (t, v) in series.iter().enumerate() {
        w.write_record([t.to_string(), format_extended(v.rho), v.satisfied.to_string()])?;
    }
    Ok(w.into_inner()?)
}

fn extended(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_extended(x))
    }
}

fn verdict_json(path: &Path, s: Semiring, v: &RobustnessVerdict) -> Value {
    json!({
        "trace": path.display().to_string(),
        "semiring": s.name(),
        "rho": extended(v.rho),
        "satisfied": v.satisfied,
        "d_phi": extended(v.v_pos),
        "d_not_phi": extended(v.v_neg),
    })
}

#[allow(clippy::too_many_arguments)]
fn monitor(
    spec_path: &Path,
    paths: &[PathBuf],
    s: Semiring,
    d: Option<Dist>,
    mode: Mode,
    out: Option<&Path>,
    as_json: bool,
    exec: Execution,
) -> Result<ExitCode> {
    let spec = load_spec(spec_path)?;
    let traces = paths
        .iter()
        .map(|p| {
            let t = Trace::from_csv_path(p).with_context(|| format!("reading trace {}", p.display()))?;
            for v in spec.variables() {
                if !t.variables.contains(&v) {
                    return Err(anyhow!(PredicateError::UnboundVariable(v.clone()))
                        .context(format!("trace {} has columns {:?}", p.display(), t.variables)));
                }
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = RobustnessMonitor::with_distance(spec, s, pointwise(d, s))?;
    if let (Some(dir), true) = (out, paths.len() > 1) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let target = |p: &Path| -> Option<PathBuf> {
        let o = out?;
        if paths.len() == 1 {
            return Some(o.to_path_buf());
        }
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
        Some(o.join(format!("{stem}.csv")))
    };
    let results = exec.map(&traces, |t| -> Result<Vec<RobustnessVerdict>> {
        Ok(match mode {
            Mode::Final => vec![m.evaluate(t)?],
            Mode::PrefixSeries => m.prefix_series(t)?,
        })
    });
    let mut stdout = std::io::stdout().lock();
    for (p, r) in paths.iter().zip(results) {
        let series = r.with_context(|| format!("monitoring {}", p.display()))?;
        let last = *series.last().expect("at least one verdict");
        if let Some(f) = target(p) {
            write_atomic(&f, &series_csv(&series)?)?;
        } else if matches!(mode, Mode::PrefixSeries) && !as_json {
            stdout.write_all(&series_csv(&series)?)?;
            continue;
        }
        if as_json {
            writeln!(stdout, "{}", verdict_json(p, s, &last))?;
        } else {
            writeln!(
                stdout,
                "{}: rho = {} ({}), d_phi = {}, d_not_phi = {}",
                p.display(),
                format_extended(last.rho),
                if last.satisfied { "satisfied" } else { "violated" },
                format_extended(last.v_pos),
                format_extended(last.v_neg),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn fixtures() -> Result<ExitCode> {
    let mut all = true;
    for s in Semiring::ALL {
        let got = value_table(s)?;
        let want = expected_table(s);
        println!("{s}");
        println!("  {:<4} {:>12} {:>12} {:>12} {:>12} {:>12}", "", "t=0", "t=1", "t=2", "t=3", "t=4");
        for (q, (g, w)) in got.iter().zip(&want).enumerate() {
            let cells: Vec<String> = g
                .iter()
                .zip(w)
                .map(|(a, b)| format!("{:>7} {}", format_extended(*a), if a == b { "PASS" } else { "FAIL" }))
                .collect();
            all &= g == w;
            println!("  q{q:<3} {}", cells.join(" "));
        }
    }
    if !all {
        bail!("value table mismatch");
    }
    Ok(ExitCode::SUCCESS)
}
