//! Acceptance criteria, one PASS/FAIL line each. Thresholds are pinned
//! below. Run with `cargo test -p arv-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use arv_core::automaton::decorate;
use arv_core::distance::{vpd, vpd_unchecked, PointwiseDistance};
use arv_core::exec::Execution;
use arv_core::fixtures::{self, expected_table, psi, tau_ex, value_table, w_ex};
use arv_core::gen;
use arv_core::monitor::{path_oracle, val, RobustnessMonitor, ValStream};
use arv_core::predicate::{to_dnf, wedge_minimize, Valuation};
use arv_core::semiring::Semiring;
use arv_core::spec::Trace;
use arv_core::suites::{self, SuiteReport};
use arv_core::syntax::{parse_predicate, parse_spec};
use rand::Rng;

const SEED: u64 = 2024;

const C1_LIMIT: Duration = Duration::from_millis(1);
const C2_LIMIT: Duration = Duration::from_millis(10);
const C3_TRACES: usize = 20;
const C4_TRACES: usize = 100;
const C4_MAX_LEN: usize = 50;
const C5_CASES: usize = 1000;
const C5_LIMIT: Duration = Duration::from_secs(30);
const C6_PATH_CASES: usize = 500;
const C6_DIST_CASES: usize = 200;
const C6_LIMIT: Duration = Duration::from_secs(120);
const C7_CASES: usize = 1000;
const C7_PERTURB: usize = 200;
const C8_STL: usize = 120;
const C8_SRE: usize = 120;
const C9_SAMPLES: usize = 100_000;
const C9_SHORT: usize = 1_000;
const C9_LIMIT: Duration = Duration::from_secs(2);
const C9_RATIO: f64 = 2.0;

/// Criteria expected to fail, with the reason printed next to them.
const KNOWN: &[(u32, &str)] = &[(
    8,
    "the STL formula and the regular expression of the worked example do not \
     denote the same language under discrete-time semantics (see README)",
)];

struct Outcome {
    id: u32,
    pass: bool,
    line: String,
    details: Vec<String>,
}

fn report(id: u32, pass: bool, line: String) -> Outcome {
    Outcome { id, pass, line, details: Vec::new() }
}

fn suites_line(reps: &[SuiteReport]) -> (bool, Vec<String>) {
    (reps.iter().all(SuiteReport::passed), reps.iter().map(ToString::to_string).collect())
}

fn c1() -> Outcome {
    let v = Valuation::new().with("x", 6.0);
    let raw = to_dnf(&parse_predicate("x <= 3 && x <= 5").unwrap());
    let d = PointwiseDistance::AbsDiff;
    let t = Instant::now();
    let a = vpd_unchecked(&v, &raw, Semiring::Tropical, d).unwrap();
    let b = vpd(&v, &wedge_minimize(&raw), Semiring::Tropical, d).unwrap();
    let el = t.elapsed();
    let pass = a == 4.0 && b == 3.0 && el < C1_LIMIT;
    report(1, pass, format!("wedge-minimality example: raw {a} (want 4), minimized {b} (want 3), {el:?} < {C1_LIMIT:?}"))
}

fn c2() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for s in Semiring::ALL {
        let got = value_table(s).unwrap();
        let want = expected_table(s);
        let w = decorate(&w_ex(), s, PointwiseDistance::default_for(s));
        let v = val(&w, &tau_ex().samples).unwrap();
        let o = path_oracle(&w, &tau_ex().samples).unwrap();
        let cells = got.iter().flatten().zip(want.iter().flatten()).filter(|(a, b)| a == b).count();
        let this = got == want && v == o && v == fixtures::expected_final(s);
        ok &= this;
        details.push(format!("{s}: {cells}/15 cells, val {v}, path oracle {o}"));
    }
    let el = t.elapsed();
    let mut r = report(2, ok && el < C2_LIMIT, format!("value table of the three-location automaton, {el:?} < {C2_LIMIT:?}"));
    r.details = details;
    r
}

fn random_a_trace(r: &mut gen::Rng8, max_len: usize) -> Trace {
    let len = r.gen_range(1..=max_len);
    gen::int_trace(r, &["a".to_string()], len, -60, 80)
}

fn c3() -> Outcome {
    let mut r = gen::rng(SEED + 3);
    let traces: Vec<Trace> = (0..C3_TRACES).map(|_| random_a_trace(&mut r, 20)).collect();
    let mut ok = true;
    for i in [5, 6] {
        for s in Semiring::ALL {
            let m = RobustnessMonitor::new(parse_spec(psi(i)).unwrap(), s).unwrap();
            ok &= traces.iter().all(|t| m.evaluate(t).unwrap().rho == f64::NEG_INFINITY);
        }
    }
    report(3, ok, format!("unsatisfiable psi5, psi6: rho = -inf on {C3_TRACES} traces, all semirings"))
}

fn c4() -> Outcome {
    let mut r = gen::rng(SEED + 4);
    let traces: Vec<Trace> = (0..C4_TRACES).map(|_| random_a_trace(&mut r, C4_MAX_LEN)).collect();
    let mut ok = true;
    let mut details = Vec::new();
    for (a, b) in [(1, 2), (3, 4)] {
        for s in [Semiring::MinMax, Semiring::Tropical] {
            let ma = RobustnessMonitor::new(parse_spec(psi(a)).unwrap(), s).unwrap();
            let mb = RobustnessMonitor::new(parse_spec(psi(b)).unwrap(), s).unwrap();
            let diff = traces
                .iter()
                .filter(|t| ma.evaluate(t).unwrap().rho != mb.evaluate(t).unwrap().rho)
                .count();
            ok &= diff == 0;
            details.push(format!("psi{a} vs psi{b}, {s}: {diff} differences"));
        }
    }
    let mut o = report(4, ok, format!("semantic invariance on {C4_TRACES} traces of length <= {C4_MAX_LEN}"));
    o.details = details;
    o
}

fn c5() -> Outcome {
    let t = Instant::now();
    let rep = suites::vpd_suite(C5_CASES, SEED, Execution::Parallel);
    let el = t.elapsed();
    let mut o = report(5, rep.passed() && rep.cases >= C5_CASES && el < C5_LIMIT, format!("vpd oracle suite, {el:.2?} < {C5_LIMIT:?}"));
    o.details = vec![rep.to_string()];
    o
}

fn c6() -> Outcome {
    let t = Instant::now();
    let mut reps: Vec<SuiteReport> =
        Semiring::ALL.iter().map(|&s| suites::path_suite(C6_PATH_CASES, SEED, s, Execution::Parallel)).collect();
    reps.push(suites::trace_distance_suite(C6_DIST_CASES, SEED, Execution::Parallel));
    let el = t.elapsed();
    let (ok, details) = suites_line(&reps);
    let enough = reps[..3].iter().all(|r| r.cases >= C6_PATH_CASES) && reps[3].cases >= C6_DIST_CASES;
    let mut o = report(6, ok && enough && el < C6_LIMIT, format!("trace value vs path and trace-distance oracles, {el:.2?} < {C6_LIMIT:?}"));
    o.details = details;
    o
}

fn c7() -> Outcome {
    let mut reps: Vec<SuiteReport> =
        Semiring::ALL.iter().map(|&s| suites::soundness_suite(C7_CASES, SEED, s, Execution::Parallel)).collect();
    reps.push(suites::perturbation_suite(C7_PERTURB, SEED, Execution::Parallel));
    let (ok, details) = suites_line(&reps);
    let enough = reps[..3].iter().all(|r| r.cases >= C7_CASES) && reps[3].cases >= C7_PERTURB;
    let mut o = report(7, ok && enough, "robustness sign, disjunction and perturbation".to_string());
    o.details = details;
    o
}

fn c8() -> Outcome {
    let rep = suites::translation_suite(C8_STL, C8_SRE, SEED, Execution::Parallel);
    let phi = suites::phi_comparison();
    let mut details = vec![rep.to_string()];
    let show = |d: &suites::LanguageDiff| match &d.witness {
        Some((t, stl_side)) => {
            let rows: Vec<String> = t
                .samples
                .iter()
                .map(|v| format!("({},{})", v.get("x").unwrap(), v.get("y").unwrap()))
                .collect();
            let side = if *stl_side { "phi1 only" } else { "phi2 only" };
            format!("{} of {} traces differ, e.g. {} in {side}", d.mismatches, d.traces, rows.join(" "))
        }
        None => format!("0 of {} traces differ", d.traces),
    };
    details.push(format!("phi1 vs phi2 automata: {}", show(&phi.automata)));
    details.push(format!("phi1 vs phi2, split i <= k < j: {}", show(&phi.right_open)));
    details.push(format!("phi1 with y >= 6 vs phi2: {}", show(&phi.same_atom)));
    let ok = rep.passed() && phi.automata.mismatches == 0;
    let mut o = report(8, ok, "translation equals the evaluators on the exhaustive family; phi1 vs phi2".to_string());
    o.details = details;
    o
}

fn c9() -> Outcome {
    let spec = parse_spec("G(w <= 4500 && v <= 120)").unwrap();
    let m = RobustnessMonitor::new(spec, Semiring::MinMax).unwrap();
    let mut r = gen::rng(SEED + 9);
    let (mut w, mut v) = (3000.0f64, 80.0f64);
    let samples: Vec<Valuation> = (0..C9_SAMPLES)
        .map(|_| {
            w = (w + r.gen_range(-20.0..20.0)).clamp(0.0, 6000.0);
            v = (v + r.gen_range(-1.0..1.0)).clamp(0.0, 160.0);
            Valuation::new().with("w", w).with("v", v)
        })
        .collect();
    let run = |xs: &[Valuation]| {
        let mut st = ValStream::new(m.positive()).unwrap();
        let t = Instant::now();
        for x in xs {
            st.push(x).unwrap();
        }
        (t.elapsed(), st.close())
    };
    let (long, _) = run(&samples);
    let reps = C9_SAMPLES / C9_SHORT;
    let short: Duration = (0..reps).map(|k| run(&samples[k * C9_SHORT..(k + 1) * C9_SHORT]).0).sum();
    let rate_long = C9_SAMPLES as f64 / long.as_secs_f64();
    let rate_short = C9_SAMPLES as f64 / short.as_secs_f64();
    let ratio = (rate_long / rate_short).max(rate_short / rate_long);
    let pass = long < C9_LIMIT && ratio <= C9_RATIO;
    report(
        9,
        pass,
        format!(
            "val_stream on {C9_SAMPLES} samples in {long:.2?} < {C9_LIMIT:?}; {rate_short:.0} vs {rate_long:.0} steps/s at {C9_SHORT} vs {C9_SAMPLES} (ratio {ratio:.2} <= {C9_RATIO})"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 9] = [c1, c2, c3, c4, c5, c6, c7, c8, c9];
    let mut unexpected = 0;
    for c in criteria {
        let o = c();
        let known = KNOWN.iter().find(|(id, _)| *id == o.id);
        println!("{} {}. {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.line);
        for d in &o.details {
            println!("       {d}");
        }
        match (o.pass, known) {
            (false, Some((_, why))) => println!("       known failure: {why}"),
            (false, None) => unexpected += 1,
            _ => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
