//! Seeded random generators for formulas, predicates, automata and traces.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::automaton::SymbolicAutomaton;
use crate::predicate::{Atom, Cmp, Dnf, Literal, Predicate, Valuation};
use crate::spec::{Sre, Stl, TimeInterval, Trace};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of random atoms.
#[derive(Debug, Clone)]
pub struct AtomGen {
    pub vars: Vec<String>,
    pub lo: i64,
    pub hi: i64,
    /// Only `x <= k` and `x >= k`.
    pub closed: bool,
}

impl AtomGen {
    pub fn new(vars: &[&str], lo: i64, hi: i64, closed: bool) -> Self {
        AtomGen { vars: vars.iter().map(|s| s.to_string()).collect(), lo, hi, closed }
    }

    pub fn literal(&self, r: &mut Rng8) -> Literal {
        let var = self.vars.choose(r).expect("at least one variable").clone();
        let k = r.gen_range(self.lo..=self.hi) as f64;
        if self.closed {
            if r.gen_bool(0.5) {
                Literal::Pos(Atom::le(var, k))
            } else {
                Literal::Neg(Atom::lt(var, k))
            }
        } else {
            let cmp = if r.gen_bool(0.5) { Cmp::Le } else { Cmp::Lt };
            let a = Atom::new(var, cmp, k);
            if r.gen_bool(0.5) {
                Literal::Pos(a)
            } else {
                Literal::Neg(a)
            }
        }
    }

    pub fn predicate_literal(&self, r: &mut Rng8) -> Predicate {
        match self.literal(r) {
            Literal::Pos(a) => Predicate::Atom(a),
            Literal::Neg(a) => Predicate::not(Predicate::Atom(a)),
            Literal::True => Predicate::True,
            Literal::False => Predicate::False,
        }
    }

    /// Raw DNF with `1..=max_clauses` clauses of `1..=max_lits` literals.
    pub fn dnf(&self, r: &mut Rng8, max_clauses: usize, max_lits: usize) -> Dnf {
        let n = r.gen_range(1..=max_clauses);
        let clauses = (0..n)
            .map(|_| (0..r.gen_range(1..=max_lits)).map(|_| self.literal(r)).collect())
            .collect();
        Dnf::new(clauses)
    }

    /// Small predicate: a literal, or a conjunction/disjunction of two.
    pub fn predicate(&self, r: &mut Rng8) -> Predicate {
        let a = self.predicate_literal(r);
        match r.gen_range(0..4) {
            0 => Predicate::and(a, self.predicate_literal(r)),
            1 => Predicate::or(a, self.predicate_literal(r)),
            _ => a,
        }
    }
}

/// Random future STL.
#[derive(Debug, Clone)]
pub struct StlGen {
    pub atoms: AtomGen,
    /// Temporal nesting depth bound.
    pub depth: usize,
    pub max_bound: u64,
    /// Negation normal form only (no `!`, no `->`); with closed atoms every
    /// guard of the translated automaton is a closed box.
    pub nnf: bool,
}

impl StlGen {
    fn interval(&self, r: &mut Rng8) -> TimeInterval {
        let lo = r.gen_range(0..=self.max_bound);
        if r.gen_bool(0.25) {
            TimeInterval::from(lo)
        } else {
            TimeInterval::new(lo, r.gen_range(lo..=self.max_bound))
        }
    }

    fn atom(&self, r: &mut Rng8) -> Stl {
        Stl::from_predicate(&self.atoms.predicate_literal(r))
    }

    pub fn formula(&self, r: &mut Rng8) -> Stl {
        self.gen(r, self.depth, 3)
    }

    /// `t` bounds temporal nesting, `b` bounds boolean nesting in between.
    fn gen(&self, r: &mut Rng8, t: usize, b: usize) -> Stl {
        if (t == 0 && b == 0) || r.gen_bool(0.2) {
            return self.atom(r);
        }
        let temporal = t > 0 && (b == 0 || r.gen_bool(0.6));
        if temporal {
            let i = self.interval(r);
            match r.gen_range(0..4) {
                0 => Stl::eventually(i, self.gen(r, t - 1, 2)),
                1 => Stl::always(i, self.gen(r, t - 1, 2)),
                2 => Stl::next(self.gen(r, t - 1, 2)),
                _ => Stl::until(i, self.gen(r, t - 1, 1), self.gen(r, t - 1, 1)),
            }
        } else {
            let ops = if self.nnf { 2 } else { 4 };
            match r.gen_range(0..ops) {
                0 => Stl::and(self.gen(r, t, b - 1), self.gen(r, t, b - 1)),
                1 => Stl::or(self.gen(r, t, b - 1), self.gen(r, t, b - 1)),
                2 => Stl::not(self.gen(r, t, b - 1)),
                _ => Stl::Implies(Box::new(self.gen(r, t, b - 1)), Box::new(self.gen(r, t, b - 1))),
            }
        }
    }
}

/// Random symbolic regular expressions; stars are never nested.
#[derive(Debug, Clone)]
pub struct SreGen {
    pub atoms: AtomGen,
    pub depth: usize,
    pub max_bound: u64,
}

impl SreGen {
    pub fn expr(&self, r: &mut Rng8) -> Sre {
        self.gen(r, self.depth, false)
    }

    fn gen(&self, r: &mut Rng8, d: usize, in_star: bool) -> Sre {
        if d == 0 || r.gen_bool(0.2) {
            return if r.gen_bool(0.1) { Sre::Epsilon } else { Sre::pred(self.atoms.predicate(r)) };
        }
        let k = if in_star { 5 } else { 6 };
        match r.gen_range(0..k) {
            0 | 1 => Sre::concat(self.gen(r, d - 1, in_star), self.gen(r, d - 1, in_star)),
            2 => Sre::union(self.gen(r, d - 1, in_star), self.gen(r, d - 1, in_star)),
            3 => Sre::inter(self.gen(r, d - 1, in_star), self.gen(r, d - 1, in_star)),
            4 => {
                let lo = r.gen_range(0..=self.max_bound);
                let i = if r.gen_bool(0.25) {
                    TimeInterval::from(lo)
                } else {
                    TimeInterval::new(lo, r.gen_range(lo..=self.max_bound))
                };
                Sre::duration(i, self.gen(r, d - 1, in_star))
            }
            _ => Sre::star(self.gen(r, d - 1, true)),
        }
    }
}

/// Trace of `len` samples with integer values in `lo..=hi`.
pub fn int_trace(r: &mut Rng8, vars: &[String], len: usize, lo: i64, hi: i64) -> Trace {
    let mut t = Trace::new(vars.to_vec());
    for _ in 0..len {
        t.push(int_valuation(r, vars, lo, hi));
    }
    t
}

pub fn int_valuation(r: &mut Rng8, vars: &[String], lo: i64, hi: i64) -> Valuation {
    vars.iter().map(|v| (v.as_str(), r.gen_range(lo..=hi) as f64)).collect()
}

/// Random automaton with up to `max_locs` locations and raw DNF guards.
pub fn automaton(r: &mut Rng8, atoms: &AtomGen, max_locs: usize) -> SymbolicAutomaton {
    let n = r.gen_range(1..=max_locs);
    let mut a = SymbolicAutomaton::new(atoms.vars.clone(), n);
    a.initial.insert(r.gen_range(0..n));
    for q in 0..n {
        if r.gen_bool(0.2) {
            a.initial.insert(q);
        }
        if r.gen_bool(0.4) {
            a.finals.insert(q);
        }
    }
    for _ in 0..r.gen_range(1..=2 * n + 2) {
        let g = if r.gen_bool(0.15) { Dnf::top() } else { atoms.dnf(r, 2, 3) };
        a.add_transition(r.gen_range(0..n), g, r.gen_range(0..n));
    }
    a
}

/// Every trace of length `len` over `vars` with values in `grid`, in
/// lexicographic order.
pub fn all_traces<'a>(vars: &'a [String], grid: &'a [f64], len: usize) -> impl Iterator<Item = Trace> + 'a {
    let cells = vars.len() * len;
    let total = grid.len().pow(cells as u32);
    (0..total).map(move |mut idx| {
        let mut vals = vec![0.0; cells];
        for c in (0..cells).rev() {
            vals[c] = grid[idx % grid.len()];
            idx /= grid.len();
        }
        let mut t = Trace::new(vars.to_vec());
        for row in vals.chunks(vars.len().max(1)).take(len) {
            t.push(vars.iter().zip(row).map(|(v, x)| (v.as_str(), *x)).collect());
        }
        t
    })
}

#[cfg(test)]
mod test {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let g = StlGen { atoms: AtomGen::new(&["x", "y"], 0, 3, false), depth: 3, max_bound: 2, nnf: false };
        let draw = |seed| {
            let mut r = rng(seed);
            (0..5).map(|_| g.formula(&mut r).to_string()).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        let mut r = rng(1);
        for _ in 0..50 {
            assert!(g.formula(&mut r).depth() <= 3);
        }
    }

    #[test]
    fn closed_nnf_formulas_have_no_negation_above_atoms() {
        fn ok(f: &Stl) -> bool {
            match f {
                Stl::Not(g) => matches!(**g, Stl::Atom(_)),
                Stl::Implies(..) => false,
                Stl::And(a, b) | Stl::Or(a, b) | Stl::Until(_, a, b) => ok(a) && ok(b),
                Stl::Eventually(_, g) | Stl::Always(_, g) | Stl::Next(g) => ok(g),
                _ => true,
            }
        }
        let g = StlGen { atoms: AtomGen::new(&["x"], 0, 4, true), depth: 2, max_bound: 2, nnf: true };
        let mut r = rng(3);
        for _ in 0..100 {
            assert!(ok(&g.formula(&mut r)));
        }
    }

    #[test]
    fn enumerates_all_traces() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let ts: Vec<Trace> = all_traces(&vars, &[0.0, 1.0, 2.0], 2).collect();
        assert_eq!(ts.len(), 81);
        assert_eq!(ts[1].samples[1].get("y").unwrap(), 1.0);
        assert_eq!(ts[80].samples[0].get("x").unwrap(), 2.0);
    }
}
