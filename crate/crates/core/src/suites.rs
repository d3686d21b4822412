//! Randomized and exhaustive cross-checks against brute-force oracles.
//!
//! Every case is seeded from `(seed, case index)` so results do not depend on
//! the execution mode.

use std::fmt;

use rand::Rng;

use crate::automaton::{complement, decorate, translate, translate_negation, SymbolicAutomaton};
use crate::distance::{vpd, vpd_oracle, Grid, PointwiseDistance};
use crate::exec::Execution;
use crate::fixtures::{PHI1, PHI2};
use crate::gen::{self, AtomGen, Rng8, SreGen, StlGen};
use crate::monitor::{path_oracle, satisfies, trace_distance_oracle, val, RobustnessMonitor};
use crate::predicate::{wedge_minimize, Valuation};
use crate::semiring::Semiring;
use crate::spec::{sre_matches_with, ConcatSplit, Spec, Trace};
use crate::syntax::parse_spec;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Description of the first failing case.
    pub witness: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn collect(name: impl Into<String>, results: Vec<Result<usize, String>>) -> Self {
        let mut r = SuiteReport { name: name.into(), cases: 0, failures: 0, witness: None };
        for x in results {
            match x {
                Ok(n) => r.cases += n,
                Err(w) => {
                    r.cases += 1;
                    r.failures += 1;
                    r.witness.get_or_insert(w);
                }
            }
        }
        r
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} cases, {} mismatches", self.name, self.cases, self.failures)?;
        if let Some(w) = &self.witness {
            write!(f, " (first: {w})")?;
        }
        Ok(())
    }
}

fn case_rng(seed: u64, i: usize) -> Rng8 {
    gen::rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64))
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn show(t: &Trace) -> String {
    let rows: Vec<String> = t
        .samples
        .iter()
        .map(|v| {
            let xs: Vec<String> = v.iter().map(|(k, x)| format!("{k}={x}")).collect();
            format!("({})", xs.join(","))
        })
        .collect();
    rows.join(" ")
}

/// Valuation-to-predicate distance against grid search: MinMax on raw DNFs,
/// Tropical and Boolean on ∧-minimized ones. Non-strict literals, constants
/// in `[-8, 8]`, valuations and grid in `[-12, 12]`.
pub fn vpd_suite(cases: usize, seed: u64, exec: Execution) -> SuiteReport {
    let res = exec.map_range(cases, |i| {
        let mut r = case_rng(seed, i);
        let names: &[&str] = if r.gen_bool(0.3) { &["x", "y", "z"] } else { &["x", "y"] };
        let atoms = AtomGen::new(names, -8, 8, true);
        let raw = atoms.dnf(&mut r, 3, 4);
        let v = gen::int_valuation(&mut r, &atoms.vars, -12, 12);
        let grid = Grid::new(-12, 12);
        let min = wedge_minimize(&raw);
        let checks = [
            (Semiring::MinMax, &raw, PointwiseDistance::AbsDiff),
            (Semiring::Tropical, &min, PointwiseDistance::AbsDiff),
            (Semiring::Boolean, &min, PointwiseDistance::Discrete01),
        ];
        for (s, d, dist) in checks {
            let got = vpd(&v, d, s, dist).map_err(|e| e.to_string())?;
            let want = vpd_oracle(&v, &raw, s, dist, grid).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("{s}: vpd({v:?}, {raw}) = {got}, oracle {want}"));
            }
        }
        Ok(1)
    });
    SuiteReport::collect("vpd vs grid oracle", res)
}

/// Forward value against run enumeration on random automata with up to
/// five locations and traces of up to five samples.
pub fn path_suite(cases: usize, seed: u64, s: Semiring, exec: Execution) -> SuiteReport {
    let res = exec.map_range(cases, |i| {
        let mut r = case_rng(seed ^ s as u64, i);
        let atoms = AtomGen::new(&["x", "y"], -3, 3, false);
        let a = gen::automaton(&mut r, &atoms, 5);
        let len = r.gen_range(1..=5);
        let t = gen::int_trace(&mut r, &atoms.vars, len, -5, 5);
        let w = decorate(&a, s, PointwiseDistance::default_for(s));
        let got = val(&w, &t.samples).map_err(|e| e.to_string())?;
        let want = path_oracle(&w, &t.samples).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("{s}: val {got}, oracle {want} on {}", show(&t)));
        }
        Ok(1)
    });
    SuiteReport::collect(format!("val vs path oracle ({s})"), res)
}

/// Value of the translated formula against the distance to the nearest
/// satisfying grid trace. One variable, closed atoms in negation normal
/// form, grid `0..=4`, traces of up to three samples. Each case checks all
/// three semirings.
pub fn trace_distance_suite(cases: usize, seed: u64, exec: Execution) -> SuiteReport {
    let res = exec.map_range(cases, |i| {
        let mut r = case_rng(seed, i);
        let g = StlGen { atoms: AtomGen::new(&["x"], 0, 4, true), depth: 2, max_bound: 2, nnf: true };
        let f = g.formula(&mut r);
        let len = r.gen_range(1..=3);
        let t = gen::int_trace(&mut r, &g.atoms.vars, len, 0, 4);
        let spec = Spec::Stl(f);
        let a = translate(&spec).map_err(|e| e.to_string())?;
        for s in Semiring::ALL {
            let d = PointwiseDistance::default_for(s);
            let got = val(&decorate(&a, s, d), &t.samples).map_err(|e| e.to_string())?;
            let want = trace_distance_oracle(&spec, &t, s, d, Grid::new(0, 4), Execution::Sequential)
                .map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("{s}: {spec} on {}: val {got}, oracle {want}", show(&t)));
            }
        }
        Ok(3)
    });
    SuiteReport::collect("val vs trace-distance oracle", res)
}

fn random_spec(r: &mut Rng8) -> Spec {
    let atoms = AtomGen::new(&["x", "y"], 0, 4, false);
    if r.gen_bool(0.7) {
        Spec::Stl(StlGen { atoms, depth: 2, max_bound: 2, nnf: false }.formula(r))
    } else {
        Spec::Sre(SreGen { atoms, depth: 3, max_bound: 2 }.expr(r))
    }
}

/// Sign soundness of the robustness degree and the disjunction
/// `v_pos = one || v_neg = one`.
pub fn soundness_suite(cases: usize, seed: u64, s: Semiring, exec: Execution) -> SuiteReport {
    let res = exec.map_range(cases, |i| {
        let mut r = case_rng(seed ^ ((s as u64) << 8), i);
        let spec = random_spec(&mut r);
        let len = r.gen_range(1..=6);
        let t = gen::int_trace(&mut r, &vars(&["x", "y"]), len, 0, 5);
        let m = RobustnessMonitor::new(spec.clone(), s).map_err(|e| e.to_string())?;
        let v = m.evaluate(&t).map_err(|e| e.to_string())?;
        let bad_sign = (v.rho > 0.0 && !v.satisfied) || (v.rho < 0.0 && v.satisfied);
        let one = s.one();
        if bad_sign || (v.v_pos != one && v.v_neg != one) {
            return Err(format!("{s}: {spec} on {}: {v:?}", show(&t)));
        }
        Ok(1)
    });
    SuiteReport::collect(format!("robustness sign and disjunction ({s})"), res)
}

/// Traces closer to a satisfying trace than its robustness still satisfy.
/// MinMax and Tropical alternate; each case draws until it finds a
/// satisfying pair with positive robustness and checks five perturbations.
pub fn perturbation_suite(cases: usize, seed: u64, exec: Execution) -> SuiteReport {
    let res = exec.map_range(cases, |i| {
        let s = if i % 2 == 0 { Semiring::MinMax } else { Semiring::Tropical };
        let mut r = case_rng(seed, i);
        let names = vars(&["x", "y"]);
        for _ in 0..200 {
            let spec = random_spec(&mut r);
            let len = r.gen_range(1..=5);
            let t = gen::int_trace(&mut r, &names, len, 0, 5);
            let m = RobustnessMonitor::new(spec.clone(), s).map_err(|e| e.to_string())?;
            let v = m.evaluate(&t).map_err(|e| e.to_string())?;
            if !(v.satisfied && v.rho > 0.0) {
                continue;
            }
            let budget = if v.rho.is_finite() { 0.9 * v.rho } else { 10.0 };
            for _ in 0..5 {
                let p = perturb(&mut r, &t, s, budget);
                if !satisfies(&spec, &p).map_err(|e| e.to_string())? {
                    return Err(format!("{s}: {spec}, rho {} on {}, perturbed {}", v.rho, show(&t), show(&p)));
                }
            }
            return Ok(1);
        }
        Err(format!("case {i}: no satisfying pair found"))
    });
    SuiteReport::collect("perturbation within robustness", res)
}

/// Random perturbation whose distance to `t` is at most `budget`.
fn perturb(r: &mut Rng8, t: &Trace, s: Semiring, budget: f64) -> Trace {
    let cells = t.len() * t.variables.len();
    let weights: Vec<f64> = match s {
        Semiring::Tropical => {
            let w: Vec<f64> = (0..cells).map(|_| r.gen_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum::<f64>().max(1e-9);
            w.into_iter().map(|x| x / total).collect()
        }
        _ => (0..cells).map(|_| r.gen_range(0.0..1.0)).collect(),
    };
    let mut out = Trace::new(t.variables.clone());
    let mut k = 0;
    for v in &t.samples {
        let mut w = Valuation::new();
        for (name, x) in v.iter() {
            let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            w.insert(name, x + sign * budget * weights[k]);
            k += 1;
        }
        out.push(w);
    }
    out
}

/// Feed every trace of each length in `lens` over `grid` to `check`.
fn exhaustive(
    names: &[String],
    grid: &[f64],
    lens: std::ops::RangeInclusive<usize>,
    mut check: impl FnMut(&Trace) -> Result<(), String>,
) -> Result<usize, String> {
    let mut n = 0;
    for len in lens {
        for t in gen::all_traces(names, grid, len) {
            check(&t)?;
            n += 1;
        }
    }
    Ok(n)
}

/// Acceptance of the translated automata against the direct evaluators on
/// every trace of length `1..=4` over `{0..3}` per variable. STL formulas
/// have temporal depth up to 3 and bounds up to 2; the negation automaton is
/// checked too. SRE automata are checked together with their complement.
pub fn translation_suite(stl: usize, sre: usize, seed: u64, exec: Execution) -> SuiteReport {
    let grid = [0.0, 1.0, 2.0, 3.0];
    let res = exec.map_range(stl + sre, |i| {
        let mut r = case_rng(seed, i);
        // every third formula is over two variables
        let names: &[&str] = if i % 3 == 2 { &["x", "y"] } else { &["x"] };
        let atoms = AtomGen::new(names, 0, 3, false);
        let spec = if i < stl {
            Spec::Stl(StlGen { atoms: atoms.clone(), depth: 3, max_bound: 2, nnf: false }.formula(&mut r))
        } else {
            Spec::Sre(SreGen { atoms: atoms.clone(), depth: 3, max_bound: 2 }.expr(&mut r))
        };
        let pos = translate(&spec).map_err(|e| e.to_string())?;
        let neg = match &spec {
            Spec::Stl(_) => translate_negation(&spec).map_err(|e| e.to_string())?,
            Spec::Sre(_) => complement(&pos),
        };
        let checked = exhaustive(&atoms.vars, &grid, 1..=4, |t| {
            let want = satisfies(&spec, t).map_err(|e| e.to_string())?;
            let a = pos.accepts(&t.samples).map_err(|e| e.to_string())?;
            let b = neg.accepts(&t.samples).map_err(|e| e.to_string())?;
            if a != want || b == want {
                return Err(format!("{spec} on {}: eval {want}, automaton {a}, negation {b}", show(t)));
            }
            Ok(())
        })?;
        Ok(checked)
    });
    SuiteReport::collect("translation vs evaluator (traces)", res)
}

/// Result of comparing two trace languages on a finite grid.
#[derive(Debug, Clone)]
pub struct LanguageDiff {
    pub traces: usize,
    pub mismatches: usize,
    /// First trace in exactly one language, and whether it is the left one.
    pub witness: Option<(Trace, bool)>,
}

/// Compare two membership tests on every trace of length `1..=max_len`
/// whose samples range over the product of `grid_per_var`.
pub fn language_diff(
    names: &[String],
    grid_per_var: &[Vec<f64>],
    max_len: usize,
    left: impl Fn(&Trace) -> bool,
    right: impl Fn(&Trace) -> bool,
) -> LanguageDiff {
    let mut d = LanguageDiff { traces: 0, mismatches: 0, witness: None };
    let mut points: Vec<Valuation> = vec![Valuation::new()];
    for (n, g) in names.iter().zip(grid_per_var) {
        points = points.iter().flat_map(|p| g.iter().map(move |x| p.clone().with(n, *x))).collect();
    }
    let idx: Vec<f64> = (0..points.len()).map(|i| i as f64).collect();
    let key = vec!["#".to_string()];
    for len in 1..=max_len {
        for t in gen::all_traces(&key, &idx, len) {
            let samples = t.samples.iter().map(|v| points[v.get("#").expect("index") as usize].clone()).collect();
            let t = Trace { variables: names.to_vec(), samples };
            let (x, y) = (left(&t), right(&t));
            d.traces += 1;
            if x != y {
                d.mismatches += 1;
                if d.witness.is_none() {
                    d.witness = Some((t, x));
                }
            }
        }
    }
    d
}

/// Comparisons of the STL formula [`PHI1`] with its regular-expression
/// rendering [`PHI2`] over `{2..6} x {5,6,7}`, traces of length up to 4.
#[derive(Debug, Clone)]
pub struct PhiComparison {
    /// Translated automata.
    pub automata: LanguageDiff,
    /// Evaluators, concatenation split `i <= k < j`.
    pub right_open: LanguageDiff,
    /// Automata, with `y >= 6` in place of `y > 6` in the STL formula.
    pub same_atom: LanguageDiff,
}

pub fn phi_comparison() -> PhiComparison {
    let names = vars(&["x", "y"]);
    let grid = vec![vec![2.0, 3.0, 4.0, 5.0, 6.0], vec![5.0, 6.0, 7.0]];
    let sre_spec = parse_spec(&format!("#lang sre\n{PHI2}")).expect("fixture parses");
    let stl_spec = parse_spec(PHI1).expect("fixture parses");
    let alt_spec = parse_spec(&PHI1.replace("y > 6", "y >= 6")).expect("fixture parses");
    let sre = translate(&sre_spec).expect("sre translates");
    let stl = translate(&stl_spec).expect("stl translates");
    let alt = translate(&alt_spec).expect("stl translates");
    let acc = |a: &SymbolicAutomaton, t: &Trace| a.accepts(&t.samples).expect("grid binds all variables");
    let Spec::Sre(e) = &sre_spec else { unreachable!("sre header") };
    PhiComparison {
        automata: language_diff(&names, &grid, 4, |t| acc(&stl, t), |t| acc(&sre, t)),
        right_open: language_diff(
            &names,
            &grid,
            4,
            |t| satisfies(&stl_spec, t).expect("bound"),
            |t| sre_matches_with(t, e, ConcatSplit::RightOpen).expect("bound").get(0, t.len()),
        ),
        same_atom: language_diff(&names, &grid, 4, |t| acc(&alt, t), |t| acc(&sre, t)),
    }
}
