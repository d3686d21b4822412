//! Worked examples: the three-location weighted automaton with its value
//! table, and the specification pairs used for invariance checks.

use crate::automaton::{decorate, SymbolicAutomaton};
use crate::distance::PointwiseDistance;
use crate::monitor::{MonitorError, ValStream};
use crate::predicate::{to_dnf, Atom, Predicate};
use crate::semiring::{Semiring, Weight};
use crate::spec::Trace;

/// `F(x <= 5 && G[0,1](x <= 3 && y > 6))`
pub const PHI1: &str = "F(x <= 5 && G[0,1](x <= 3 && y > 6))";
/// The regular-expression rendering of [`PHI1`].
pub const PHI2: &str = "T ; ((x <= 5 ; T) & <x <= 3 && y >= 6>[1,1]) ; T";

/// Specifications over a single variable `a`: two equivalent pairs and two
/// unsatisfiable formulas.
pub const PSI: [(&str, &str); 6] = [
    ("psi1", "a >= -30 && a <= 30"),
    ("psi2", "(a >= -30 && a < 0) || (a >= 0 && a <= 30)"),
    ("psi3", "F(a >= -10)"),
    ("psi4", "F((a >= -10 && a <= 60) || a >= 55)"),
    ("psi5", "G(a >= 5 && a < 5)"),
    ("psi6", "!(F(a >= -30 && a <= 30) || F(a < -30 || a > 30))"),
];

pub fn psi(i: usize) -> &'static str {
    PSI[i - 1].1
}

/// Guard of both middle edges: `x <= 3 && !(y < 6)`.
pub fn guard() -> Predicate {
    Predicate::and(Predicate::atom(Atom::le("x", 3.0)), Predicate::not(Predicate::atom(Atom::lt("y", 6.0))))
}

/// q0 loops on true; q0 -> q1 -> q2 on [`guard`]; q2 loops on true.
pub fn w_ex() -> SymbolicAutomaton {
    let mut a = SymbolicAutomaton::new(vec!["x".into(), "y".into()], 3);
    a.initial.insert(0);
    a.finals.insert(2);
    let g = to_dnf(&guard());
    a.add_transition(0, to_dnf(&Predicate::True), 0);
    a.add_transition(0, g.clone(), 1);
    a.add_transition(1, g, 2);
    a.add_transition(2, to_dnf(&Predicate::True), 2);
    a
}

/// `(4,2), (5,3), (2,5), (3,5)` over `(x, y)`.
pub fn tau_ex() -> Trace {
    Trace::from_rows(&["x", "y"], &[vec![4.0, 2.0], vec![5.0, 3.0], vec![2.0, 5.0], vec![3.0, 5.0]])
}

/// Per-location costs: one row per location, one column per prefix length
/// `0..=4`.
pub fn value_table(s: Semiring) -> Result<Vec<Vec<Weight>>, MonitorError> {
    let w = decorate(&w_ex(), s, PointwiseDistance::default_for(s));
    let mut st = ValStream::new(&w)?;
    let mut cols = vec![st.costs().to_vec()];
    for v in &tau_ex().samples {
        st.push(v)?;
        cols.push(st.costs().to_vec());
    }
    Ok((0..3).map(|q| cols.iter().map(|c| c[q]).collect()).collect())
}

const INF: f64 = f64::INFINITY;

/// Expected table. Boolean and MinMax rows are the reference values; the
/// tropical rows are derived by enumerating the accepting runs.
pub fn expected_table(s: Semiring) -> Vec<Vec<Weight>> {
    match s {
        Semiring::Boolean => vec![vec![0.0; 5], vec![1.0; 5], vec![1.0; 5]],
        Semiring::MinMax => {
            vec![vec![0.0; 5], vec![INF, 4.0, 3.0, 1.0, 1.0], vec![INF, INF, 4.0, 3.0, 1.0]]
        }
        Semiring::Tropical => {
            vec![vec![0.0; 5], vec![INF, 5.0, 5.0, 1.0, 1.0], vec![INF, INF, 10.0, 6.0, 2.0]]
        }
    }
}

pub fn expected_final(s: Semiring) -> Weight {
    match s {
        Semiring::Boolean | Semiring::MinMax => 1.0,
        Semiring::Tropical => 2.0,
    }
}
