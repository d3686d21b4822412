//! Specification languages: discrete-time STL and symbolic regular expressions.

mod eval;
mod trace;

use std::fmt;

use crate::predicate::{Atom, Predicate};

pub use eval::{
    eval_sre, eval_stl, sre_accepts, sre_matches, sre_matches_with, stl_satisfaction, ConcatSplit, MatchMatrix,
};
pub use trace::{Trace, TraceError};

/// `[lo, hi]` over sample indices; `hi == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeInterval {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl TimeInterval {
    pub const UNBOUNDED: TimeInterval = TimeInterval { lo: 0, hi: None };

    pub fn new(lo: u64, hi: u64) -> Self {
        assert!(lo <= hi, "empty time interval");
        TimeInterval { lo, hi: Some(hi) }
    }

    pub fn from(lo: u64) -> Self {
        TimeInterval { lo, hi: None }
    }

    pub fn contains(&self, d: u64) -> bool {
        d >= self.lo && self.hi.is_none_or(|h| d <= h)
    }

    pub fn is_unbounded(&self) -> bool {
        self.hi.is_none()
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{},{}]", self.lo, h),
            None => write!(f, "[{},inf)", self.lo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stl {
    True,
    False,
    Atom(Atom),
    Not(Box<Stl>),
    And(Box<Stl>, Box<Stl>),
    Or(Box<Stl>, Box<Stl>),
    Implies(Box<Stl>, Box<Stl>),
    Until(TimeInterval, Box<Stl>, Box<Stl>),
    Since(TimeInterval, Box<Stl>, Box<Stl>),
    Eventually(TimeInterval, Box<Stl>),
    Always(TimeInterval, Box<Stl>),
    Once(TimeInterval, Box<Stl>),
    Historically(TimeInterval, Box<Stl>),
    Next(Box<Stl>),
    Prev(Box<Stl>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("past fragment not translatable")]
    PastFragment,
}

fn bx(f: Stl) -> Box<Stl> {
    Box::new(f)
}

impl Stl {
    pub fn atom(a: Atom) -> Stl {
        Stl::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Stl) -> Stl {
        Stl::Not(bx(f))
    }

    pub fn and(a: Stl, b: Stl) -> Stl {
        Stl::And(bx(a), bx(b))
    }

    pub fn or(a: Stl, b: Stl) -> Stl {
        Stl::Or(bx(a), bx(b))
    }

    pub fn until(i: TimeInterval, a: Stl, b: Stl) -> Stl {
        Stl::Until(i, bx(a), bx(b))
    }

    pub fn since(i: TimeInterval, a: Stl, b: Stl) -> Stl {
        Stl::Since(i, bx(a), bx(b))
    }

    pub fn eventually(i: TimeInterval, f: Stl) -> Stl {
        Stl::Eventually(i, bx(f))
    }

    pub fn always(i: TimeInterval, f: Stl) -> Stl {
        Stl::Always(i, bx(f))
    }

    pub fn next(f: Stl) -> Stl {
        Stl::Next(bx(f))
    }

    pub fn from_predicate(p: &Predicate) -> Stl {
        match p {
            Predicate::True => Stl::True,
            Predicate::False => Stl::False,
            Predicate::Atom(a) => Stl::Atom(a.clone()),
            Predicate::Not(q) => Stl::not(Stl::from_predicate(q)),
            Predicate::And(a, b) => Stl::and(Stl::from_predicate(a), Stl::from_predicate(b)),
            Predicate::Or(a, b) => Stl::or(Stl::from_predicate(a), Stl::from_predicate(b)),
        }
    }

    /// Whether any past operator occurs.
    pub fn has_past(&self) -> bool {
        match self {
            Stl::Since(..) | Stl::Once(..) | Stl::Historically(..) | Stl::Prev(..) => true,
            Stl::True | Stl::False | Stl::Atom(_) => false,
            Stl::Not(f) | Stl::Eventually(_, f) | Stl::Always(_, f) | Stl::Next(f) => f.has_past(),
            Stl::And(a, b) | Stl::Or(a, b) | Stl::Implies(a, b) | Stl::Until(_, a, b) => {
                a.has_past() || b.has_past()
            }
        }
    }

    /// Name of the first past operator in pre-order, if any.
    pub fn past_operator(&self) -> Option<&'static str> {
        let mut found = None;
        self.visit(&mut |f| {
            let op = match f {
                Stl::Since(..) => "S",
                Stl::Once(..) => "P",
                Stl::Historically(..) => "H",
                Stl::Prev(..) => "Y",
                _ => return,
            };
            found.get_or_insert(op);
        });
        found
    }

    pub fn variables(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |f| {
            if let Stl::Atom(a) = f {
                out.insert(a.var.clone());
            }
        });
        out
    }

    fn visit(&self, g: &mut dyn FnMut(&Stl)) {
        g(self);
        match self {
            Stl::True | Stl::False | Stl::Atom(_) => {}
            Stl::Not(f)
            | Stl::Eventually(_, f)
            | Stl::Always(_, f)
            | Stl::Once(_, f)
            | Stl::Historically(_, f)
            | Stl::Next(f)
            | Stl::Prev(f) => f.visit(g),
            Stl::And(a, b)
            | Stl::Or(a, b)
            | Stl::Implies(a, b)
            | Stl::Until(_, a, b)
            | Stl::Since(_, a, b) => {
                a.visit(g);
                b.visit(g);
            }
        }
    }

    /// Temporal nesting depth (boolean connectives do not count).
    pub fn depth(&self) -> usize {
        match self {
            Stl::True | Stl::False | Stl::Atom(_) => 0,
            Stl::Not(f) => f.depth(),
            Stl::And(a, b) | Stl::Or(a, b) | Stl::Implies(a, b) => a.depth().max(b.depth()),
            Stl::Until(_, a, b) | Stl::Since(_, a, b) => 1 + a.depth().max(b.depth()),
            Stl::Eventually(_, f)
            | Stl::Always(_, f)
            | Stl::Once(_, f)
            | Stl::Historically(_, f)
            | Stl::Next(f)
            | Stl::Prev(f) => 1 + f.depth(),
        }
    }
}

/// Rewrite into the core operators: atoms, constants, not, and, or, U, S.
pub fn desugar(f: &Stl) -> Stl {
    match f {
        Stl::True | Stl::False | Stl::Atom(_) => f.clone(),
        Stl::Not(g) => Stl::not(desugar(g)),
        Stl::And(a, b) => Stl::and(desugar(a), desugar(b)),
        Stl::Or(a, b) => Stl::or(desugar(a), desugar(b)),
        Stl::Implies(a, b) => Stl::or(Stl::not(desugar(a)), desugar(b)),
        Stl::Until(i, a, b) => Stl::until(*i, desugar(a), desugar(b)),
        Stl::Since(i, a, b) => Stl::since(*i, desugar(a), desugar(b)),
        Stl::Eventually(i, g) => Stl::until(*i, Stl::True, desugar(g)),
        Stl::Always(i, g) => Stl::not(Stl::until(*i, Stl::True, Stl::not(desugar(g)))),
        Stl::Once(i, g) => Stl::since(*i, Stl::True, desugar(g)),
        Stl::Historically(i, g) => Stl::not(Stl::since(*i, Stl::True, Stl::not(desugar(g)))),
        Stl::Next(g) => Stl::until(TimeInterval::new(1, 1), Stl::False, desugar(g)),
        Stl::Prev(g) => Stl::since(TimeInterval::new(1, 1), Stl::False, desugar(g)),
    }
}

/// Syntactic negation, dropping a double negation.
pub fn negate(f: &Stl) -> Stl {
    match f {
        Stl::Not(g) => (**g).clone(),
        _ => Stl::not(f.clone()),
    }
}

fn mk_and(a: Stl, b: Stl) -> Stl {
    match (a, b) {
        (Stl::True, x) | (x, Stl::True) => x,
        (Stl::False, _) | (_, Stl::False) => Stl::False,
        (a, b) => Stl::and(a, b),
    }
}

fn mk_or(a: Stl, b: Stl) -> Stl {
    match (a, b) {
        (Stl::False, x) | (x, Stl::False) => x,
        (Stl::True, _) | (_, Stl::True) => Stl::True,
        (a, b) => Stl::or(a, b),
    }
}

fn mk_next(a: Stl) -> Stl {
    match a {
        Stl::False => Stl::False,
        a => Stl::next(a),
    }
}

/// Expand every bounded temporal operator into nested `X` (strong next).
///
/// The result only uses atoms, constants, not, and, or, `X` and `U[0,inf)`.
/// Unbounded intervals `[a,inf)` become `a` nested nexts around an
/// unbounded until.
pub fn unfold_bounded(f: &Stl) -> Result<Stl, SpecError> {
    if f.has_past() {
        return Err(SpecError::PastFragment);
    }
    Ok(unfold(&desugar(f)))
}

fn unfold(f: &Stl) -> Stl {
    match f {
        Stl::True | Stl::False | Stl::Atom(_) => f.clone(),
        Stl::Not(g) => match unfold(g) {
            Stl::True => Stl::False,
            Stl::False => Stl::True,
            Stl::Not(h) => *h,
            h => Stl::not(h),
        },
        Stl::And(a, b) => mk_and(unfold(a), unfold(b)),
        Stl::Or(a, b) => mk_or(unfold(a), unfold(b)),
        Stl::Next(g) => mk_next(unfold(g)),
        Stl::Until(i, a, b) => strict_until(*i, &unfold(a), &unfold(b)),
        // desugar removed the rest; past operators were rejected above
        other => unreachable!("not in the desugared future fragment: {other:?}"),
    }
}

fn dec(h: Option<u64>) -> Option<u64> {
    h.map(|h| h - 1)
}

/// `a U_I b` with the left argument required strictly between now and the
/// witness.
fn strict_until(i: TimeInterval, a: &Stl, b: &Stl) -> Stl {
    if i.lo == 0 {
        match i.hi {
            Some(0) => b.clone(),
            Some(h) => mk_or(b.clone(), mk_next(weak_left_until(0, Some(h - 1), a, b))),
            None => {
                if *b == Stl::False {
                    Stl::False
                } else {
                    Stl::until(TimeInterval::UNBOUNDED, a.clone(), b.clone())
                }
            }
        }
    } else {
        mk_next(weak_left_until(i.lo - 1, dec(i.hi), a, b))
    }
}

/// Exists `j` in `[i+lo, i+hi]` with `b` at `j` and `a` on `[i, j)`.
fn weak_left_until(lo: u64, hi: Option<u64>, a: &Stl, b: &Stl) -> Stl {
    if lo > 0 {
        return mk_and(a.clone(), mk_next(weak_left_until(lo - 1, dec(hi), a, b)));
    }
    match hi {
        Some(0) => b.clone(),
        Some(h) => mk_or(b.clone(), mk_and(a.clone(), mk_next(weak_left_until(0, Some(h - 1), a, b)))),
        None => mk_or(b.clone(), mk_and(a.clone(), strict_until(TimeInterval::UNBOUNDED, a, b))),
    }
}

impl Stl {
    fn is_unary(&self) -> bool {
        !matches!(
            self,
            Stl::And(..) | Stl::Or(..) | Stl::Implies(..) | Stl::Until(..) | Stl::Since(..)
        )
    }
}

impl fmt::Display for Stl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = |f: &mut fmt::Formatter<'_>, g: &Stl| {
            if matches!(g, Stl::Atom(_)) || !g.is_unary() {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        match self {
            Stl::True => f.write_str("true"),
            Stl::False => f.write_str("false"),
            Stl::Atom(a) => write!(f, "{a}"),
            Stl::Not(g) => {
                f.write_str("!")?;
                arg(f, g)
            }
            Stl::And(a, b) => write!(f, "({a} && {b})"),
            Stl::Or(a, b) => write!(f, "({a} || {b})"),
            Stl::Implies(a, b) => write!(f, "({a} -> {b})"),
            Stl::Until(i, a, b) => write!(f, "({a} U{i} {b})"),
            Stl::Since(i, a, b) => write!(f, "({a} S{i} {b})"),
            Stl::Eventually(i, g) | Stl::Always(i, g) | Stl::Once(i, g) | Stl::Historically(i, g) => {
                let op = match self {
                    Stl::Eventually(..) => "F",
                    Stl::Always(..) => "G",
                    Stl::Once(..) => "P",
                    _ => "H",
                };
                write!(f, "{op}{i} ")?;
                arg(f, g)
            }
            Stl::Next(g) => {
                f.write_str("X ")?;
                arg(f, g)
            }
            Stl::Prev(g) => {
                f.write_str("Y ")?;
                arg(f, g)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sre {
    Epsilon,
    /// A state predicate; matches every segment (empty included) on which it
    /// holds at every sample.
    Pred(Predicate),
    Concat(Box<Sre>, Box<Sre>),
    Union(Box<Sre>, Box<Sre>),
    Inter(Box<Sre>, Box<Sre>),
    Star(Box<Sre>),
    Duration(TimeInterval, Box<Sre>),
}

impl Sre {
    pub fn pred(p: Predicate) -> Sre {
        Sre::Pred(p)
    }

    pub fn concat(a: Sre, b: Sre) -> Sre {
        Sre::Concat(Box::new(a), Box::new(b))
    }

    pub fn union(a: Sre, b: Sre) -> Sre {
        Sre::Union(Box::new(a), Box::new(b))
    }

    pub fn inter(a: Sre, b: Sre) -> Sre {
        Sre::Inter(Box::new(a), Box::new(b))
    }

    pub fn star(a: Sre) -> Sre {
        Sre::Star(Box::new(a))
    }

    pub fn duration(i: TimeInterval, a: Sre) -> Sre {
        Sre::Duration(i, Box::new(a))
    }

    pub fn variables(&self) -> std::collections::BTreeSet<String> {
        match self {
            Sre::Epsilon => Default::default(),
            Sre::Pred(p) => p.variables(),
            Sre::Concat(a, b) | Sre::Union(a, b) | Sre::Inter(a, b) => {
                let mut s = a.variables();
                s.extend(b.variables());
                s
            }
            Sre::Star(a) | Sre::Duration(_, a) => a.variables(),
        }
    }
}

impl fmt::Display for Sre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sre::Epsilon => f.write_str("eps"),
            Sre::Pred(p) => write!(f, "({p})"),
            Sre::Concat(a, b) => write!(f, "({a} ; {b})"),
            Sre::Union(a, b) => write!(f, "({a} | {b})"),
            Sre::Inter(a, b) => write!(f, "({a} & {b})"),
            Sre::Star(a) => write!(f, "{a}*"),
            Sre::Duration(i, a) => write!(f, "<{a}>{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    Stl(Stl),
    Sre(Sre),
}

impl Spec {
    pub fn variables(&self) -> std::collections::BTreeSet<String> {
        match self {
            Spec::Stl(f) => f.variables(),
            Spec::Sre(e) => e.variables(),
        }
    }
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spec::Stl(s) => write!(f, "{s}"),
            Spec::Sre(e) => write!(f, "{e}"),
        }
    }
}
