//! Interval predicates over real-valued variables and their DNF forms.

mod interval;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

pub use interval::{
    boxes_to_dnf, comp_int_vec, conj_to_box, dnf_to_boxes, literal_interval, minimal_dnf, Interval,
    IntervalVector,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PredicateError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// A sample: one real value per variable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Valuation {
    values: BTreeMap<String, f64>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, value: f64) -> Self {
        self.insert(var, value);
        self
    }

    pub fn insert(&mut self, var: &str, value: f64) {
        self.values.insert(var.to_string(), value);
    }

    pub fn get(&self, var: &str) -> Result<f64, PredicateError> {
        self.values
            .get(var)
            .copied()
            .ok_or_else(|| PredicateError::UnboundVariable(var.to_string()))
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<(S, f64)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        Valuation {
            values: iter.into_iter().map(|(k, v)| (k.as_ref().to_string(), v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Lt,
    Le,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
        }
    }
}

/// `var < k` or `var <= k`.
#[derive(Debug, Clone)]
pub struct Atom {
    pub var: String,
    pub cmp: Cmp,
    pub k: f64,
}

impl Atom {
    pub fn new(var: impl Into<String>, cmp: Cmp, k: f64) -> Self {
        // fold -0.0 so that bit-level equality agrees with numeric equality
        let k = if k == 0.0 { 0.0 } else { k };
        Atom { var: var.into(), cmp, k }
    }

    pub fn lt(var: impl Into<String>, k: f64) -> Self {
        Atom::new(var, Cmp::Lt, k)
    }

    pub fn le(var: impl Into<String>, k: f64) -> Self {
        Atom::new(var, Cmp::Le, k)
    }

    pub fn holds_at(&self, x: f64) -> bool {
        match self.cmp {
            Cmp::Lt => x < self.k,
            Cmp::Le => x <= self.k,
        }
    }

    pub fn holds(&self, v: &Valuation) -> Result<bool, PredicateError> {
        Ok(self.holds_at(v.get(&self.var)?))
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var && self.cmp == other.cmp && self.k.to_bits() == other.k.to_bits()
    }
}

impl Eq for Atom {}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.var.hash(state);
        self.cmp.hash(state);
        self.k.to_bits().hash(state);
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.var, self.cmp)
            .cmp(&(&other.var, other.cmp))
            .then(self.k.total_cmp(&other.k))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.var, self.cmp.symbol(), self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    False,
    True,
    Atom(Atom),
    Not(Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub fn atom(a: Atom) -> Self {
        Predicate::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Predicate) -> Self {
        Predicate::Not(Box::new(p))
    }

    pub fn and(a: Predicate, b: Predicate) -> Self {
        Predicate::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Predicate, b: Predicate) -> Self {
        Predicate::Or(Box::new(a), Box::new(b))
    }

    pub fn holds(&self, v: &Valuation) -> Result<bool, PredicateError> {
        Ok(match self {
            Predicate::False => false,
            Predicate::True => true,
            Predicate::Atom(a) => a.holds(v)?,
            Predicate::Not(p) => !p.holds(v)?,
            Predicate::Or(a, b) => a.holds(v)? || b.holds(v)?,
            Predicate::And(a, b) => a.holds(v)? && b.holds(v)?,
        })
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Predicate::Atom(a) => {
                out.insert(a.var.clone());
            }
            Predicate::Not(p) => p.collect_vars(out),
            Predicate::Or(a, b) | Predicate::And(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Predicate::True | Predicate::False => {}
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Predicate::Or(..) => 0,
            Predicate::And(..) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, p: &Predicate, min: u8| {
            if p.prec() < min {
                write!(f, "({p})")
            } else {
                write!(f, "{p}")
            }
        };
        match self {
            Predicate::False => f.write_str("false"),
            Predicate::True => f.write_str("true"),
            Predicate::Atom(a) => write!(f, "{a}"),
            Predicate::Not(p) => write!(f, "!({p})"),
            Predicate::Or(a, b) => {
                child(f, a, 0)?;
                f.write_str(" || ")?;
                child(f, b, 1)
            }
            Predicate::And(a, b) => {
                child(f, a, 1)?;
                f.write_str(" && ")?;
                child(f, b, 2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    True,
    False,
    Pos(Atom),
    Neg(Atom),
}

impl Literal {
    pub fn holds(&self, v: &Valuation) -> Result<bool, PredicateError> {
        Ok(match self {
            Literal::True => true,
            Literal::False => false,
            Literal::Pos(a) => a.holds(v)?,
            Literal::Neg(a) => !a.holds(v)?,
        })
    }

    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => Some(a),
            _ => None,
        }
    }

    /// `self -> other`, decided on the intervals of the two literals.
    pub fn implies(&self, other: &Literal) -> bool {
        match (self, other) {
            (_, Literal::True) | (Literal::False, _) => true,
            (Literal::True, _) | (_, Literal::False) => false,
            (a, b) => {
                let (va, ia) = literal_interval(a).expect("atomic literal");
                let (vb, ib) = literal_interval(b).expect("atomic literal");
                va == vb && ia.subset_of(&ib)
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::True => f.write_str("true"),
            Literal::False => f.write_str("false"),
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "!({a})"),
        }
    }
}

/// Disjunction of conjunctions of literals. Clause and literal order are
/// preserved by every transformation except [`minimal_dnf`].
#[derive(Debug, Clone)]
pub struct Dnf {
    pub clauses: Vec<Vec<Literal>>,
    /// Set only by [`wedge_minimize`] and [`minimal_dnf`] (or when a loaded
    /// guard is already in that form).
    pub wedge_minimal: bool,
}

impl PartialEq for Dnf {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}

impl Eq for Dnf {}

impl Hash for Dnf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.clauses.hash(state);
    }
}

impl Dnf {
    pub fn new(clauses: Vec<Vec<Literal>>) -> Self {
        Dnf { clauses, wedge_minimal: false }
    }

    pub fn top() -> Self {
        Dnf::new(vec![vec![Literal::True]])
    }

    pub fn bottom() -> Self {
        Dnf::new(vec![vec![Literal::False]])
    }

    pub fn holds(&self, v: &Valuation) -> Result<bool, PredicateError> {
        for c in &self.clauses {
            let mut all = true;
            for l in c {
                if !l.holds(v)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn variables(&self) -> Vec<String> {
        let set: BTreeSet<String> = self
            .clauses
            .iter()
            .flatten()
            .filter_map(|l| l.atom().map(|a| a.var.clone()))
            .collect();
        set.into_iter().collect()
    }

    /// Conjunction, distributing clause-wise.
    pub fn and(&self, other: &Dnf) -> Dnf {
        Dnf::new(cross(&self.clauses, &other.clauses))
    }

    pub fn or(&self, other: &Dnf) -> Dnf {
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        Dnf::new(clauses)
    }

    pub fn to_predicate(&self) -> Predicate {
        let clause = |c: &Vec<Literal>| {
            c.iter()
                .map(|l| match l {
                    Literal::True => Predicate::True,
                    Literal::False => Predicate::False,
                    Literal::Pos(a) => Predicate::Atom(a.clone()),
                    Literal::Neg(a) => Predicate::not(Predicate::Atom(a.clone())),
                })
                .reduce(Predicate::and)
                .unwrap_or(Predicate::True)
        };
        self.clauses
            .iter()
            .map(clause)
            .reduce(Predicate::or)
            .unwrap_or(Predicate::False)
    }

    /// Whether no literal of a clause implies another one of the same clause.
    pub fn check_wedge_minimal(&self) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().enumerate().all(|(i, a)| {
                c.iter().enumerate().all(|(j, b)| i == j || !a.implies(b))
            })
        })
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("false");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            if c.is_empty() {
                f.write_str("true")?;
            }
            for (j, l) in c.iter().enumerate() {
                if j > 0 {
                    f.write_str(" && ")?;
                }
                write!(f, "{l}")?;
            }
        }
        Ok(())
    }
}

fn cross(a: &[Vec<Literal>], b: &[Vec<Literal>]) -> Vec<Vec<Literal>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            out.push(c);
        }
    }
    out
}

/// Negation normal form pushed to literals, then distributed.
pub fn to_dnf(p: &Predicate) -> Dnf {
    fn go(p: &Predicate, neg: bool) -> Vec<Vec<Literal>> {
        match (p, neg) {
            (Predicate::True, false) | (Predicate::False, true) => vec![vec![Literal::True]],
            (Predicate::False, false) | (Predicate::True, true) => vec![vec![Literal::False]],
            (Predicate::Atom(a), false) => vec![vec![Literal::Pos(a.clone())]],
            (Predicate::Atom(a), true) => vec![vec![Literal::Neg(a.clone())]],
            (Predicate::Not(q), _) => go(q, !neg),
            (Predicate::Or(a, b), false) | (Predicate::And(a, b), true) => {
                let mut l = go(a, neg);
                l.extend(go(b, neg));
                l
            }
            (Predicate::And(a, b), false) | (Predicate::Or(a, b), true) => {
                cross(&go(a, neg), &go(b, neg))
            }
        }
    }
    Dnf::new(go(p, false))
}

/// Remove literals implied by another literal of the same clause.
///
/// For literals with the same interval only the first occurrence survives.
/// Clauses containing `false` are dropped and `true` is removed from clauses
/// that have other literals.
pub fn wedge_minimize(d: &Dnf) -> Dnf {
    let mut clauses = Vec::new();
    for c in &d.clauses {
        if c.contains(&Literal::False) {
            continue;
        }
        let lits: Vec<&Literal> = c.iter().filter(|l| **l != Literal::True).collect();
        if lits.is_empty() {
            clauses.push(vec![Literal::True]);
            continue;
        }
        let mut kept = Vec::new();
        for (j, lj) in lits.iter().enumerate() {
            let removed = lits.iter().enumerate().any(|(i, li)| {
                i != j && li.implies(lj) && (!lj.implies(li) || i < j)
            });
            if !removed {
                kept.push((*lj).clone());
            }
        }
        clauses.push(kept);
    }
    if clauses.is_empty() {
        clauses.push(vec![Literal::False]);
    }
    Dnf { clauses, wedge_minimal: true }
}

/// Per-variable interval of a single clause; `None` if the clause is empty.
pub fn clause_box(clause: &[Literal]) -> Option<BTreeMap<&str, Interval>> {
    let mut b: BTreeMap<&str, Interval> = BTreeMap::new();
    for l in clause {
        match l {
            Literal::True => {}
            Literal::False => return None,
            Literal::Pos(a) | Literal::Neg(a) => {
                let (_, i) = literal_interval(l).expect("atomic literal");
                let slot = b.entry(a.var.as_str()).or_insert(Interval::FULL);
                *slot = slot.intersect(&i);
                if slot.is_empty() {
                    return None;
                }
            }
        }
    }
    Some(b)
}

pub fn clause_is_sat(clause: &[Literal]) -> bool {
    clause_box(clause).is_some()
}

pub fn is_sat(d: &Dnf) -> bool {
    d.clauses.iter().any(|c| clause_is_sat(c))
}

/// Drop unsatisfiable clauses; an all-unsatisfiable guard becomes `false`.
pub fn prune_unsat(d: &Dnf) -> Dnf {
    let clauses: Vec<_> = d.clauses.iter().filter(|c| clause_is_sat(c)).cloned().collect();
    if clauses.is_empty() {
        Dnf { clauses: vec![vec![Literal::False]], wedge_minimal: d.wedge_minimal }
    } else {
        Dnf { clauses, wedge_minimal: d.wedge_minimal }
    }
}
