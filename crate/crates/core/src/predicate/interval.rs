//! Interval vectors and the minimal-DNF round trip.

use std::fmt;

use super::{Atom, Dnf, Literal, PredicateError};

/// Real interval. Infinite ends are always open; every empty interval is
/// stored as [`Interval::EMPTY`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 0.0, lo_closed: false, hi: 0.0, hi_closed: false };
    pub const FULL: Interval =
        Interval { lo: f64::NEG_INFINITY, lo_closed: false, hi: f64::INFINITY, hi_closed: false };

    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Interval {
        let i = Interval {
            lo,
            lo_closed: lo_closed && lo.is_finite(),
            hi,
            hi_closed: hi_closed && hi.is_finite(),
        };
        if i.is_empty_raw() {
            Interval::EMPTY
        } else {
            i
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, true, hi, true)
    }

    pub fn open(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, false, hi, false)
    }

    fn is_empty_raw(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_empty(&self) -> bool {
        *self == Interval::EMPTY || self.is_empty_raw()
    }

    pub fn is_full(&self) -> bool {
        *self == Interval::FULL
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        let lo_ok = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let hi_ok = if self.hi_closed { x <= self.hi } else { x < self.hi };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let lo_ok = other.lo < self.lo || (other.lo == self.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = other.hi > self.hi || (other.hi == self.hi && (other.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }

    /// Non-empty pieces of the complement, left to right.
    pub fn complement(&self) -> Vec<Interval> {
        if self.is_empty() {
            return vec![Interval::FULL];
        }
        let mut out = Vec::new();
        let left = Interval::new(f64::NEG_INFINITY, false, self.lo, !self.lo_closed);
        if self.lo.is_finite() && !left.is_empty() {
            out.push(left);
        }
        let right = Interval::new(self.hi, !self.hi_closed, f64::INFINITY, false);
        if self.hi.is_finite() && !right.is_empty() {
            out.push(right);
        }
        out
    }

    /// Distance from `x` to the closure of the interval.
    pub fn distance(&self, x: f64) -> f64 {
        if self.is_empty() {
            f64::INFINITY
        } else if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let lo = if self.lo.is_finite() { self.lo.to_string() } else { "-inf".into() };
        let hi = if self.hi.is_finite() { self.hi.to_string() } else { "+inf".into() };
        write!(
            f,
            "{}{lo},{hi}{}",
            if self.lo_closed { '[' } else { '(' },
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Interval of an atomic literal, keyed by its variable.
pub fn literal_interval(l: &Literal) -> Option<(&str, Interval)> {
    let (a, pos): (&Atom, bool) = match l {
        Literal::Pos(a) => (a, true),
        Literal::Neg(a) => (a, false),
        _ => return None,
    };
    let i = match (a.cmp, pos) {
        (super::Cmp::Lt, true) => Interval::new(f64::NEG_INFINITY, false, a.k, false),
        (super::Cmp::Le, true) => Interval::new(f64::NEG_INFINITY, false, a.k, true),
        (super::Cmp::Lt, false) => Interval::new(a.k, true, f64::INFINITY, false),
        (super::Cmp::Le, false) => Interval::new(a.k, false, f64::INFINITY, false),
    };
    Some((a.var.as_str(), i))
}

/// One interval per variable of a fixed order. Empty boxes are always
/// represented with every component empty.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalVector {
    pub comps: Vec<Interval>,
}

impl IntervalVector {
    pub fn full(n: usize) -> Self {
        IntervalVector { comps: vec![Interval::FULL; n] }
    }

    pub fn empty(n: usize) -> Self {
        IntervalVector { comps: vec![Interval::EMPTY; n] }
    }

    pub fn new(comps: Vec<Interval>) -> Self {
        let v = IntervalVector { comps };
        if v.comps.iter().any(|c| c.is_empty()) {
            IntervalVector::empty(v.comps.len())
        } else {
            v
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.iter().any(|c| c.is_empty())
    }

    pub fn is_full(&self) -> bool {
        self.comps.iter().all(|c| c.is_full())
    }

    pub fn intersect(&self, other: &IntervalVector) -> IntervalVector {
        IntervalVector::new(
            self.comps.iter().zip(&other.comps).map(|(a, b)| a.intersect(b)).collect(),
        )
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        self.comps.iter().zip(point).all(|(c, x)| c.contains(*x))
    }
}

impl fmt::Display for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn var_index(vars: &[String], v: &str) -> Result<usize, PredicateError> {
    vars.iter()
        .position(|x| x == v)
        .ok_or_else(|| PredicateError::UnboundVariable(v.to_string()))
}

/// Intersect `x` with the interval of every literal of `clause`.
pub fn conj_to_box(
    x: &IntervalVector,
    vars: &[String],
    clause: &[Literal],
) -> Result<IntervalVector, PredicateError> {
    let mut comps = x.comps.clone();
    for l in clause {
        match l {
            Literal::True => {}
            Literal::False => return Ok(IntervalVector::empty(x.dim())),
            _ => {
                let (v, i) = literal_interval(l).expect("atomic literal");
                let idx = var_index(vars, v)?;
                comps[idx] = comps[idx].intersect(&i);
            }
        }
    }
    Ok(IntervalVector::new(comps))
}

/// Disjoint boxes covering the complement of `x`.
///
/// Each component contributes either itself or one piece of its complement;
/// the combination that picks `x` everywhere is left out.
pub fn comp_int_vec(x: &IntervalVector) -> Vec<IntervalVector> {
    let n = x.dim();
    if x.is_empty() {
        return vec![IntervalVector::full(n)];
    }
    let options: Vec<Vec<Interval>> = x
        .comps
        .iter()
        .map(|c| {
            let mut o = vec![*c];
            o.extend(c.complement());
            o
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        if idx.iter().any(|&i| i != 0) {
            out.push(IntervalVector {
                comps: idx.iter().enumerate().map(|(d, &i)| options[d][i]).collect(),
            });
        }
        // odometer
        let mut d = n;
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < options[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Disjoint boxes whose union is the set denoted by `d`.
pub fn dnf_to_boxes(d: &Dnf, vars: &[String]) -> Result<Vec<IntervalVector>, PredicateError> {
    let full = IntervalVector::full(vars.len());
    let mut set: Vec<IntervalVector> = Vec::new();
    for c in &d.clauses {
        let x = conj_to_box(&full, vars, c)?;
        if x.is_empty() {
            continue;
        }
        if x.is_full() {
            return Ok(vec![x]);
        }
        let comp = comp_int_vec(&x);
        let mut next = vec![x];
        for y in &set {
            for c in &comp {
                let z = y.intersect(c);
                if !z.is_empty() {
                    next.push(z);
                }
            }
        }
        set = next;
    }
    Ok(set)
}

/// One clause per non-empty box, lower bound literal before upper bound.
pub fn boxes_to_dnf(boxes: &[IntervalVector], vars: &[String]) -> Dnf {
    let mut clauses = Vec::new();
    for b in boxes {
        if b.is_empty() {
            continue;
        }
        let mut c = Vec::new();
        for (v, i) in vars.iter().zip(&b.comps) {
            if i.lo.is_finite() {
                let cmp = if i.lo_closed { super::Cmp::Lt } else { super::Cmp::Le };
                c.push(Literal::Neg(Atom::new(v.clone(), cmp, i.lo)));
            }
            if i.hi.is_finite() {
                let cmp = if i.hi_closed { super::Cmp::Le } else { super::Cmp::Lt };
                c.push(Literal::Pos(Atom::new(v.clone(), cmp, i.hi)));
            }
        }
        if c.is_empty() {
            c.push(Literal::True);
        }
        clauses.push(c);
    }
    if clauses.is_empty() {
        clauses.push(vec![Literal::False]);
    }
    Dnf { clauses, wedge_minimal: true }
}

/// Equivalent DNF with pairwise disjoint clauses, each a box.
pub fn minimal_dnf(d: &Dnf, vars: &[String]) -> Result<Dnf, PredicateError> {
    Ok(boxes_to_dnf(&dnf_to_boxes(d, vars)?, vars))
}
