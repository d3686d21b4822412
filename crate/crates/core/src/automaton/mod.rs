//! Symbolic automata with interval-predicate guards.

mod io;
mod minterm;
mod sre;
mod stl;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::distance::{vpd, DistanceError, PointwiseDistance};
use crate::predicate::{is_sat, prune_unsat, wedge_minimize, Dnf, Valuation};
use crate::semiring::{Semiring, Weight};
use crate::spec::{negate, Spec, SpecError};
use crate::syntax::ParseError;

pub use minterm::{complement, determinize, mintermize};
pub use sre::translate_sre;
pub use stl::translate_stl;

pub type Loc = usize;

#[derive(Debug, thiserror::Error)]
pub enum AutomatonError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid automaton json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid automaton: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub src: Loc,
    pub guard: Dnf,
    pub dst: Loc,
}

/// Locations are `0..num_locations`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicAutomaton {
    pub variables: Vec<String>,
    pub num_locations: usize,
    pub initial: BTreeSet<Loc>,
    pub finals: BTreeSet<Loc>,
    pub transitions: Vec<Transition>,
    pub epsilon: Vec<(Loc, Loc)>,
}

impl SymbolicAutomaton {
    pub fn new(variables: Vec<String>, num_locations: usize) -> Self {
        SymbolicAutomaton {
            variables,
            num_locations,
            initial: BTreeSet::new(),
            finals: BTreeSet::new(),
            transitions: Vec::new(),
            epsilon: Vec::new(),
        }
    }

    /// Automaton with the empty language.
    pub fn empty(variables: Vec<String>) -> Self {
        let mut a = SymbolicAutomaton::new(variables, 1);
        a.initial.insert(0);
        a
    }

    pub fn add_location(&mut self) -> Loc {
        self.num_locations += 1;
        self.num_locations - 1
    }

    pub fn add_transition(&mut self, src: Loc, guard: Dnf, dst: Loc) {
        self.transitions.push(Transition { src, guard, dst });
    }

    pub fn outgoing(&self, q: Loc) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.src == q)
    }

    /// Exact (qualitative) acceptance of a trace.
    pub fn accepts(&self, samples: &[Valuation]) -> Result<bool, crate::predicate::PredicateError> {
        let elim;
        let a = if self.epsilon.is_empty() {
            self
        } else {
            elim = self.eps_eliminate();
            &elim
        };
        let mut cur: BTreeSet<Loc> = a.initial.clone();
        for v in samples {
            let mut next = BTreeSet::new();
            for t in &a.transitions {
                if cur.contains(&t.src) && t.guard.holds(v)? {
                    next.insert(t.dst);
                }
            }
            cur = next;
        }
        Ok(cur.iter().any(|q| a.finals.contains(q)))
    }

    fn eps_closure(&self, q: Loc) -> BTreeSet<Loc> {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for &(s, d) in &self.epsilon {
                if s == p && seen.insert(d) {
                    stack.push(d);
                }
            }
        }
        seen
    }

    /// Equivalent automaton without epsilon moves (same locations).
    pub fn eps_eliminate(&self) -> SymbolicAutomaton {
        if self.epsilon.is_empty() {
            return self.clone();
        }
        let mut out = SymbolicAutomaton::new(self.variables.clone(), self.num_locations);
        out.initial = self.initial.clone();
        for q in 0..self.num_locations {
            let closure = self.eps_closure(q);
            if closure.iter().any(|p| self.finals.contains(p)) {
                out.finals.insert(q);
            }
            for p in &closure {
                for t in self.outgoing(*p) {
                    out.add_transition(q, t.guard.clone(), t.dst);
                }
            }
        }
        out
    }

    /// Drop unsatisfiable edges and useless locations, then renumber in BFS
    /// order from the initial locations and merge parallel edges.
    pub fn trim(&self) -> SymbolicAutomaton {
        let a = self.eps_eliminate();
        let transitions: Vec<&Transition> = a.transitions.iter().filter(|t| is_sat(&t.guard)).collect();
        let mut fwd = vec![false; a.num_locations];
        let mut stack: Vec<Loc> = a.initial.iter().copied().collect();
        for &q in &stack {
            fwd[q] = true;
        }
        while let Some(q) = stack.pop() {
            for t in transitions.iter().filter(|t| t.src == q) {
                if !fwd[t.dst] {
                    fwd[t.dst] = true;
                    stack.push(t.dst);
                }
            }
        }
        let mut bwd = vec![false; a.num_locations];
        let mut stack: Vec<Loc> = a.finals.iter().copied().collect();
        for &q in &stack {
            bwd[q] = true;
        }
        while let Some(q) = stack.pop() {
            for t in transitions.iter().filter(|t| t.dst == q) {
                if !bwd[t.src] {
                    bwd[t.src] = true;
                    stack.push(t.src);
                }
            }
        }
        let live: Vec<bool> = (0..a.num_locations).map(|q| fwd[q] && bwd[q]).collect();
        if !a.initial.iter().any(|&q| live[q]) {
            return SymbolicAutomaton::empty(a.variables.clone());
        }
        let mut b = SymbolicAutomaton::new(a.variables.clone(), a.num_locations);
        b.initial = a.initial.iter().copied().filter(|&q| live[q]).collect();
        b.finals = a.finals.iter().copied().filter(|&q| live[q]).collect();
        b.transitions = transitions
            .into_iter()
            .filter(|t| live[t.src] && live[t.dst])
            .map(|t| Transition { src: t.src, guard: prune_unsat(&t.guard), dst: t.dst })
            .collect();
        b.canonicalize(true)
    }

    /// BFS renumbering; unreachable locations are dropped. With `merge`,
    /// parallel edges become one edge whose guard is the disjunction.
    pub fn canonicalize(&self, merge: bool) -> SymbolicAutomaton {
        let mut id: Vec<Option<Loc>> = vec![None; self.num_locations];
        let mut order = Vec::new();
        let mut queue: VecDeque<Loc> = VecDeque::new();
        for &q in &self.initial {
            id[q] = Some(order.len());
            order.push(q);
            queue.push_back(q);
        }
        let mut by_src: BTreeMap<Loc, Vec<&Transition>> = BTreeMap::new();
        for t in &self.transitions {
            by_src.entry(t.src).or_default().push(t);
        }
        let mut eps_by_src: BTreeMap<Loc, Vec<Loc>> = BTreeMap::new();
        for &(s, d) in &self.epsilon {
            eps_by_src.entry(s).or_default().push(d);
        }
        while let Some(q) = queue.pop_front() {
            let dsts = by_src
                .get(&q)
                .into_iter()
                .flatten()
                .map(|t| t.dst)
                .chain(eps_by_src.get(&q).into_iter().flatten().copied());
            for d in dsts {
                if id[d].is_none() {
                    id[d] = Some(order.len());
                    order.push(d);
                    queue.push_back(d);
                }
            }
        }
        let mut out = SymbolicAutomaton::new(self.variables.clone(), order.len());
        out.initial = self.initial.iter().filter_map(|&q| id[q]).collect();
        out.finals = self.finals.iter().filter_map(|&q| id[q]).collect();
        let mut ts: Vec<Transition> = self
            .transitions
            .iter()
            .filter_map(|t| {
                Some(Transition { src: id[t.src]?, guard: t.guard.clone(), dst: id[t.dst]? })
            })
            .collect();
        ts.sort_by_key(|t| (t.src, t.dst));
        if merge {
            let mut merged: Vec<Transition> = Vec::new();
            for t in ts {
                match merged.last_mut() {
                    Some(m) if m.src == t.src && m.dst == t.dst => {
                        for c in t.guard.clauses {
                            if !m.guard.clauses.contains(&c) {
                                m.guard.clauses.push(c);
                            }
                        }
                        m.guard.wedge_minimal &= t.guard.wedge_minimal;
                    }
                    _ => merged.push(t),
                }
            }
            ts = merged;
        }
        out.transitions = ts;
        let mut eps: Vec<(Loc, Loc)> =
            self.epsilon.iter().filter_map(|&(s, d)| Some((id[s]?, id[d]?))).collect();
        eps.sort();
        eps.dedup();
        out.epsilon = eps;
        out
    }

    /// Disjoint union.
    pub fn union(&self, other: &SymbolicAutomaton) -> SymbolicAutomaton {
        let off = self.num_locations;
        let mut out = self.clone();
        out.variables = merge_vars(&self.variables, &other.variables);
        out.num_locations += other.num_locations;
        out.initial.extend(other.initial.iter().map(|q| q + off));
        out.finals.extend(other.finals.iter().map(|q| q + off));
        out.transitions.extend(other.transitions.iter().map(|t| Transition {
            src: t.src + off,
            guard: t.guard.clone(),
            dst: t.dst + off,
        }));
        out.epsilon.extend(other.epsilon.iter().map(|&(s, d)| (s + off, d + off)));
        out
    }

    /// Synchronous product (language intersection); reachable part only.
    pub fn product(&self, other: &SymbolicAutomaton) -> SymbolicAutomaton {
        let a = self.eps_eliminate();
        let b = other.eps_eliminate();
        let mut out = SymbolicAutomaton::new(merge_vars(&a.variables, &b.variables), 0);
        let mut ids: BTreeMap<(Loc, Loc), Loc> = BTreeMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |p: (Loc, Loc), out: &mut SymbolicAutomaton, queue: &mut VecDeque<(Loc, Loc)>| {
            *ids.entry(p).or_insert_with(|| {
                queue.push_back(p);
                let q = out.add_location();
                if a.finals.contains(&p.0) && b.finals.contains(&p.1) {
                    out.finals.insert(q);
                }
                q
            })
        };
        for &i in &a.initial {
            for &j in &b.initial {
                let q = intern((i, j), &mut out, &mut queue);
                out.initial.insert(q);
            }
        }
        while let Some((p, r)) = queue.pop_front() {
            let src = intern((p, r), &mut out, &mut queue);
            for t1 in a.outgoing(p) {
                for t2 in b.outgoing(r) {
                    let g = prune_unsat(&t1.guard.and(&t2.guard));
                    if !is_sat(&g) {
                        continue;
                    }
                    let dst = intern((t1.dst, t2.dst), &mut out, &mut queue);
                    out.add_transition(src, g, dst);
                }
            }
        }
        out
    }

    pub fn is_language_empty(&self) -> bool {
        let t = self.trim();
        t.finals.is_empty()
    }
}

fn merge_vars(a: &[String], b: &[String]) -> Vec<String> {
    let s: BTreeSet<&String> = a.iter().chain(b).collect();
    s.into_iter().cloned().collect()
}

/// Translate either specification language.
pub fn translate(spec: &Spec) -> Result<SymbolicAutomaton, AutomatonError> {
    match spec {
        Spec::Stl(f) => translate_stl(f),
        Spec::Sre(e) => Ok(translate_sre(e)),
    }
}

/// Automaton for the negation: syntactic negation for STL, complement of
/// the determinized automaton for SRE.
pub fn translate_negation(spec: &Spec) -> Result<SymbolicAutomaton, AutomatonError> {
    match spec {
        Spec::Stl(f) => translate_stl(&negate(f)),
        Spec::Sre(e) => Ok(complement(&translate_sre(e))),
    }
}

/// Symbolic weighted automaton: guards in ∧-minimal DNF with unsatisfiable
/// clauses removed, weighted by [`vpd`] at run time.
#[derive(Debug, Clone, PartialEq)]
pub struct Swa {
    pub automaton: SymbolicAutomaton,
    pub semiring: Semiring,
    pub distance: PointwiseDistance,
}

pub fn decorate(a: &SymbolicAutomaton, s: Semiring, d: PointwiseDistance) -> Swa {
    let mut a = a.eps_eliminate();
    a.transitions = a
        .transitions
        .into_iter()
        .filter_map(|t| {
            let g = prune_unsat(&wedge_minimize(&t.guard));
            is_sat(&g).then_some(Transition { src: t.src, guard: g, dst: t.dst })
        })
        .collect();
    Swa { automaton: a, semiring: s, distance: d }
}

impl Swa {
    pub fn weight(&self, t: &Transition, v: &Valuation) -> Result<Weight, DistanceError> {
        vpd(v, &t.guard, self.semiring, self.distance)
    }
}

#[cfg(test)]
pub(crate) mod test {
    use super::*;
    use crate::predicate::to_dnf;
    use crate::syntax::parse_predicate;

    pub(crate) fn g(s: &str) -> Dnf {
        to_dnf(&parse_predicate(s).unwrap())
    }

    fn vals(xs: &[f64]) -> Vec<Valuation> {
        xs.iter().map(|&x| Valuation::new().with("x", x)).collect()
    }

    #[test]
    fn eps_elimination_keeps_language() {
        let mut a = SymbolicAutomaton::new(vec!["x".into()], 3);
        a.initial.insert(0);
        a.finals.insert(2);
        a.epsilon.push((0, 1));
        a.add_transition(1, g("x <= 1"), 2);
        a.epsilon.push((2, 0));
        let b = a.eps_eliminate();
        assert!(b.epsilon.is_empty());
        for xs in [vec![1.0], vec![1.0, 0.0], vec![2.0], vec![]] {
            assert_eq!(a.accepts(&vals(&xs)).unwrap(), b.accepts(&vals(&xs)).unwrap(), "{xs:?}");
        }
        assert!(b.accepts(&vals(&[0.0, 1.0, -3.0])).unwrap());
        assert!(!b.accepts(&vals(&[0.0, 2.0])).unwrap());
    }

    #[test]
    fn trim_removes_dead_parts() {
        let mut a = SymbolicAutomaton::new(vec!["x".into()], 4);
        a.initial.insert(0);
        a.finals.insert(1);
        a.add_transition(0, g("x <= 1"), 1);
        a.add_transition(0, g("x <= 1"), 2); // no way to a final from 2
        a.add_transition(3, g("x <= 1"), 1); // unreachable
        a.add_transition(1, g("x < 0 && !(x < 0)"), 1); // unsat
        let t = a.trim();
        assert_eq!(t.num_locations, 2);
        assert_eq!(t.transitions.len(), 1);
    }

    #[test]
    fn product_intersects() {
        let mut a = SymbolicAutomaton::new(vec!["x".into()], 1);
        a.initial.insert(0);
        a.finals.insert(0);
        a.add_transition(0, g("x <= 3"), 0);
        let mut b = SymbolicAutomaton::new(vec!["x".into()], 1);
        b.initial.insert(0);
        b.finals.insert(0);
        b.add_transition(0, g("x >= 1"), 0);
        let p = a.product(&b);
        assert!(p.accepts(&vals(&[1.0, 3.0])).unwrap());
        assert!(!p.accepts(&vals(&[0.0])).unwrap());
        assert!(!p.accepts(&vals(&[4.0])).unwrap());
        let u = a.union(&b);
        assert!(u.accepts(&vals(&[0.0, 2.0])).unwrap());
        assert!(u.accepts(&vals(&[4.0])).unwrap());
        assert!(!u.accepts(&vals(&[4.0, 0.0])).unwrap());
    }

    #[test]
    fn decorate_minimizes_and_prunes() {
        let mut a = SymbolicAutomaton::new(vec!["x".into()], 2);
        a.initial.insert(0);
        a.finals.insert(1);
        a.add_transition(0, g("x <= 3 && x <= 5 || x < 0 && !(x < 0)"), 1);
        a.add_transition(0, g("false"), 1);
        let w = decorate(&a, Semiring::Tropical, PointwiseDistance::AbsDiff);
        assert_eq!(w.automaton.transitions.len(), 1);
        assert_eq!(w.automaton.transitions[0].guard.to_string(), "x <= 3");
        assert!(w.automaton.transitions[0].guard.wedge_minimal);
    }
}
