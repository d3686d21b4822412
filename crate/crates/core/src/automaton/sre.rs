//! Compositional translation of symbolic regular expressions.

use std::collections::{BTreeMap, VecDeque};

use super::{Loc, SymbolicAutomaton};
use crate::predicate::{to_dnf, Dnf};
use crate::spec::{Sre, TimeInterval};

/// Automaton accepting the (non-empty) traces matched as a whole by `e`.
pub fn translate_sre(e: &Sre) -> SymbolicAutomaton {
    let vars: Vec<String> = e.variables().into_iter().collect();
    let mut a = build(e, &vars);
    a.variables = vars;
    a.trim()
}

fn build(e: &Sre, vars: &[String]) -> SymbolicAutomaton {
    match e {
        Sre::Epsilon => {
            let mut a = SymbolicAutomaton::new(vars.to_vec(), 1);
            a.initial.insert(0);
            a.finals.insert(0);
            a
        }
        Sre::Pred(p) => {
            let mut a = SymbolicAutomaton::new(vars.to_vec(), 1);
            a.initial.insert(0);
            a.finals.insert(0);
            a.add_transition(0, to_dnf(p), 0);
            a
        }
        Sre::Concat(x, y) => {
            let (a, b) = (build(x, vars), build(y, vars));
            let off = a.num_locations;
            let mut u = a.union(&b);
            u.initial = a.initial.clone();
            u.finals = b.finals.iter().map(|q| q + off).collect();
            for &f in &a.finals {
                for &i in &b.initial {
                    u.epsilon.push((f, i + off));
                }
            }
            u
        }
        Sre::Union(x, y) => build(x, vars).union(&build(y, vars)),
        Sre::Inter(x, y) => build(x, vars).product(&build(y, vars)),
        Sre::Star(x) => {
            let a = build(x, vars);
            let mut s = a.clone();
            let hub = s.add_location();
            s.initial = [hub].into();
            s.finals = [hub].into();
            for &i in &a.initial {
                s.epsilon.push((hub, i));
            }
            for &f in &a.finals {
                s.epsilon.push((f, hub));
            }
            s
        }
        Sre::Duration(iv, x) => with_duration(&build(x, vars), *iv),
    }
}

/// Product with a sample counter; the counter stops at `hi` (edges beyond
/// it are dropped) or saturates at `lo` when the interval is unbounded.
fn with_duration(a: &SymbolicAutomaton, iv: TimeInterval) -> SymbolicAutomaton {
    let a = a.eps_eliminate();
    let step = |c: u64| -> Option<u64> {
        match iv.hi {
            Some(h) => (c < h).then_some(c + 1),
            None => Some((c + 1).min(iv.lo)),
        }
    };
    let mut out = SymbolicAutomaton::new(a.variables.clone(), 0);
    let mut ids: BTreeMap<(Loc, u64), Loc> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut guards: Vec<(Loc, Dnf, (Loc, u64))> = Vec::new();
    for &i in &a.initial {
        let q = out.add_location();
        ids.insert((i, 0), q);
        out.initial.insert(q);
        queue.push_back((i, 0));
    }
    while let Some((p, c)) = queue.pop_front() {
        let src = ids[&(p, c)];
        if a.finals.contains(&p) && iv.contains(c) {
            out.finals.insert(src);
        }
        let Some(c2) = step(c) else { continue };
        for t in a.outgoing(p) {
            let key = (t.dst, c2);
            if let std::collections::btree_map::Entry::Vacant(e) = ids.entry(key) {
                let q = out.add_location();
                e.insert(q);
                queue.push_back(key);
            }
            guards.push((src, t.guard.clone(), key));
        }
    }
    for (src, g, key) in guards {
        out.add_transition(src, g, ids[&key]);
    }
    out
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::spec::{sre_accepts, Trace};
    use crate::syntax::parse_sre;

    fn xs(v: &[f64]) -> Trace {
        Trace::from_rows(&["x"], &v.iter().map(|&x| vec![x]).collect::<Vec<_>>())
    }

    fn agree(src: &str, traces: &[&[f64]]) {
        let e = parse_sre(src).unwrap();
        let a = translate_sre(&e);
        for t in traces {
            let t = xs(t);
            assert_eq!(a.accepts(&t.samples).unwrap(), sre_accepts(&t, &e).unwrap(), "{src} on {t:?}");
        }
    }

    #[test]
    fn predicate_concat_star() {
        let ts: &[&[f64]] = &[&[0.0], &[3.0], &[0.0, 3.0], &[3.0, 0.0], &[0.0, 0.0, 3.0, 3.0], &[3.0, 3.0, 3.0]];
        agree("x <= 1", ts);
        agree("x <= 1 ; x >= 2", ts);
        agree("(x <= 1 ; x >= 2)*", ts);
        agree("(x <= 1 | x >= 3) & <T>[2,3]", ts);
        agree("<x >= 2>[2,inf) ; eps", ts);
        agree("<T>[0,0]", ts);
    }

    #[test]
    fn duration_counts_samples() {
        let a = translate_sre(&parse_sre("<T>[2,3]").unwrap());
        let n = |k: usize| a.accepts(&xs(&vec![0.0; k]).samples).unwrap();
        assert!(!n(1));
        assert!(n(2));
        assert!(n(3));
        assert!(!n(4));
    }

    #[test]
    fn empty_language_is_trimmed() {
        let a = translate_sre(&parse_sre("<x <= 1 && x > 1>[1,1]").unwrap());
        assert!(a.is_language_empty());
    }
}
