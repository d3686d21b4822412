//! Finite-trace tableau for the future fragment of STL.
//!
//! After unfolding, a formula only uses atoms, boolean connectives, strong
//! next and unbounded until. It is put in negation normal form over
//! {lit, and, or, X, weak X, U, R}. A location is the set of obligations
//! for the remaining suffix plus a flag telling whether any of them came
//! from a strong next; only locations without strong obligations accept.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{AutomatonError, SymbolicAutomaton};
use crate::predicate::{clause_is_sat, Atom, Dnf, Literal};
use crate::spec::{unfold_bounded, Stl};

type Id = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(Literal),
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    WeakNext(Id),
    /// Non-strict: `b` now, or `a` now and the until again at the next sample.
    Until(Id, Id),
    /// Dual of [`Node::Until`].
    Release(Id, Id),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
}

impl Arena {
    fn mk(&mut self, n: Node) -> Id {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        self.nodes.push(n.clone());
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn lit(&mut self, a: &Atom, pos: bool) -> Id {
        self.mk(Node::Lit(if pos { Literal::Pos(a.clone()) } else { Literal::Neg(a.clone()) }))
    }

    fn and(&mut self, a: Id, b: Id) -> Id {
        match (&self.nodes[a], &self.nodes[b]) {
            (Node::True, _) => b,
            (_, Node::True) => a,
            (Node::False, _) | (_, Node::False) => self.mk(Node::False),
            _ => self.mk(Node::And(a, b)),
        }
    }

    fn or(&mut self, a: Id, b: Id) -> Id {
        match (&self.nodes[a], &self.nodes[b]) {
            (Node::False, _) => b,
            (_, Node::False) => a,
            (Node::True, _) | (_, Node::True) => self.mk(Node::True),
            _ => self.mk(Node::Or(a, b)),
        }
    }

    /// NNF of an unfolded formula, negated when `pos` is false.
    fn nnf(&mut self, f: &Stl, pos: bool) -> Id {
        match f {
            Stl::True => self.mk(if pos { Node::True } else { Node::False }),
            Stl::False => self.mk(if pos { Node::False } else { Node::True }),
            Stl::Atom(a) => self.lit(a, pos),
            Stl::Not(g) => self.nnf(g, !pos),
            Stl::And(a, b) | Stl::Or(a, b) => {
                let (x, y) = (self.nnf(a, pos), self.nnf(b, pos));
                if matches!(f, Stl::And(..)) == pos {
                    self.and(x, y)
                } else {
                    self.or(x, y)
                }
            }
            Stl::Next(g) => {
                let x = self.nnf(g, pos);
                self.mk(if pos { Node::Next(x) } else { Node::WeakNext(x) })
            }
            Stl::Until(_, a, b) => {
                // strict until: b now, or the non-strict until from the next sample
                let (x, y) = (self.nnf(a, pos), self.nnf(b, pos));
                let left_true = **a == Stl::True;
                if pos {
                    let u = self.mk(Node::Until(x, y));
                    if left_true {
                        return u;
                    }
                    let n = self.mk(Node::Next(u));
                    self.or(y, n)
                } else {
                    let r = self.mk(Node::Release(x, y));
                    if left_true {
                        return r;
                    }
                    let n = self.mk(Node::WeakNext(r));
                    self.and(y, n)
                }
            }
            other => unreachable!("not produced by unfolding: {other:?}"),
        }
    }
}

#[derive(Clone, Default)]
struct Cover {
    lits: Vec<Literal>,
    strong: BTreeSet<Id>,
    weak: BTreeSet<Id>,
}

fn expand(arena: &mut Arena, todo: Vec<Id>, cover: Cover, out: &mut Vec<Cover>) {
    let mut todo = todo;
    let mut cover = cover;
    while let Some(id) = todo.pop() {
        match arena.nodes[id].clone() {
            Node::True => {}
            Node::False => return,
            Node::Lit(l) => {
                if !cover.lits.contains(&l) {
                    cover.lits.push(l);
                    if !clause_is_sat(&cover.lits) {
                        return;
                    }
                }
            }
            Node::And(a, b) => {
                todo.push(b);
                todo.push(a);
            }
            Node::Or(a, b) => {
                let mut t2 = todo.clone();
                t2.push(b);
                todo.push(a);
                expand(arena, t2, cover.clone(), out);
            }
            Node::Next(a) => {
                cover.strong.insert(a);
            }
            Node::WeakNext(a) => {
                cover.weak.insert(a);
            }
            Node::Until(a, b) => {
                let again = arena.mk(Node::Next(id));
                let mut t2 = todo.clone();
                t2.push(again);
                t2.push(a);
                todo.push(b);
                expand(arena, t2, cover.clone(), out);
            }
            Node::Release(a, b) => {
                todo.push(b);
                let again = arena.mk(Node::WeakNext(id));
                let mut t2 = todo.clone();
                t2.push(again);
                todo.push(a);
                expand(arena, t2, cover.clone(), out);
            }
        }
    }
    out.push(cover);
}

/// Symbolic automaton accepting exactly the non-empty traces `t` with
/// `(t, 0) |= f`.
pub fn translate_stl(f: &Stl) -> Result<SymbolicAutomaton, AutomatonError> {
    let unfolded = unfold_bounded(f)?;
    let variables: Vec<String> = f.variables().into_iter().collect();
    let mut arena = Arena::default();
    let root = arena.nnf(&unfolded, true);

    // location key: pending obligations and whether any is strong
    type Key = (BTreeSet<Id>, bool);
    let mut ids: BTreeMap<Key, usize> = BTreeMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut queue = VecDeque::new();
    let start: Key = (BTreeSet::from([root]), true);
    ids.insert(start.clone(), 0);
    keys.push(start);
    queue.push_back(0);
    let mut edges: Vec<(usize, Vec<Literal>, usize)> = Vec::new();
    while let Some(q) = queue.pop_front() {
        let (obl, _) = keys[q].clone();
        let mut covers = Vec::new();
        expand(&mut arena, obl.into_iter().rev().collect(), Cover::default(), &mut covers);
        for c in covers {
            let strong = !c.strong.is_empty();
            let mut next = c.strong;
            next.extend(c.weak);
            let key: Key = (next, strong);
            let dst = *ids.entry(key.clone()).or_insert_with(|| {
                keys.push(key);
                queue.push_back(keys.len() - 1);
                keys.len() - 1
            });
            let lits = if c.lits.is_empty() { vec![Literal::True] } else { c.lits };
            edges.push((q, lits, dst));
        }
    }

    let mut a = SymbolicAutomaton::new(variables, keys.len());
    a.initial.insert(0);
    for (q, (_, strong)) in keys.iter().enumerate() {
        if !strong {
            a.finals.insert(q);
        }
    }
    for (src, lits, dst) in edges {
        a.add_transition(src, Dnf::new(vec![lits]), dst);
    }
    Ok(a.trim())
}
