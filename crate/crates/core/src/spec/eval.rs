//! Qualitative semantics over finite traces.
//!
//! Both evaluators work bottom-up over all positions (resp. segments) so
//! they stay linear (resp. cubic) in the trace length.

use super::{Sre, Stl, TimeInterval, Trace};
use crate::predicate::PredicateError;

/// Satisfaction of `f` at every position of `trace`.
pub fn stl_satisfaction(trace: &Trace, f: &Stl) -> Result<Vec<bool>, PredicateError> {
    let n = trace.len();
    Ok(match f {
        Stl::True => vec![true; n],
        Stl::False => vec![false; n],
        Stl::Atom(a) => trace.samples.iter().map(|v| a.holds(v)).collect::<Result<_, _>>()?,
        Stl::Not(g) => stl_satisfaction(trace, g)?.into_iter().map(|b| !b).collect(),
        Stl::And(a, b) => zip(stl_satisfaction(trace, a)?, stl_satisfaction(trace, b)?, |x, y| x && y),
        Stl::Or(a, b) => zip(stl_satisfaction(trace, a)?, stl_satisfaction(trace, b)?, |x, y| x || y),
        Stl::Implies(a, b) => {
            zip(stl_satisfaction(trace, a)?, stl_satisfaction(trace, b)?, |x, y| !x || y)
        }
        Stl::Until(i, a, b) => until(*i, &stl_satisfaction(trace, a)?, &stl_satisfaction(trace, b)?),
        Stl::Since(i, a, b) => since(*i, &stl_satisfaction(trace, a)?, &stl_satisfaction(trace, b)?),
        Stl::Eventually(i, g) => until(*i, &vec![true; n], &stl_satisfaction(trace, g)?),
        Stl::Always(i, g) => {
            let ng: Vec<bool> = stl_satisfaction(trace, g)?.into_iter().map(|b| !b).collect();
            until(*i, &vec![true; n], &ng).into_iter().map(|b| !b).collect()
        }
        Stl::Once(i, g) => since(*i, &vec![true; n], &stl_satisfaction(trace, g)?),
        Stl::Historically(i, g) => {
            let ng: Vec<bool> = stl_satisfaction(trace, g)?.into_iter().map(|b| !b).collect();
            since(*i, &vec![true; n], &ng).into_iter().map(|b| !b).collect()
        }
        Stl::Next(g) => until(TimeInterval::new(1, 1), &vec![false; n], &stl_satisfaction(trace, g)?),
        Stl::Prev(g) => since(TimeInterval::new(1, 1), &vec![false; n], &stl_satisfaction(trace, g)?),
    })
}

/// `(trace, i) |= f`. Positions outside the trace satisfy nothing.
pub fn eval_stl(trace: &Trace, i: usize, f: &Stl) -> Result<bool, PredicateError> {
    if i >= trace.len() {
        // still surface unbound variables
        stl_satisfaction(trace, f)?;
        return Ok(false);
    }
    Ok(stl_satisfaction(trace, f)?[i])
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

fn prefix_counts(b: &[bool]) -> Vec<usize> {
    let mut p = Vec::with_capacity(b.len() + 1);
    p.push(0);
    for (k, &x) in b.iter().enumerate() {
        p.push(p[k] + usize::from(x));
    }
    p
}

fn sat_u(x: u64) -> usize {
    usize::try_from(x).unwrap_or(usize::MAX)
}

/// Exists `j` in `(i + I)` within the trace with `b(j)` and `a(k)` for all
/// `i < k < j`.
fn until(iv: TimeInterval, a: &[bool], b: &[bool]) -> Vec<bool> {
    let n = a.len();
    // next_fail[k]: first index >= k where `a` fails, n if none
    let mut next_fail = vec![n; n + 1];
    for k in (0..n).rev() {
        next_fail[k] = if a[k] { next_fail[k + 1] } else { k };
    }
    let pb = prefix_counts(b);
    (0..n)
        .map(|i| {
            let lo = i.saturating_add(sat_u(iv.lo));
            let mut hi = match iv.hi {
                Some(h) => i.saturating_add(sat_u(h)),
                None => usize::MAX,
            };
            hi = hi.min(n - 1).min(next_fail[(i + 1).min(n)]);
            lo <= hi && pb[hi + 1] > pb[lo]
        })
        .collect()
}

/// Exists `j` in `(i - I)` within the trace with `b(j)` and `a(k)` for all
/// `j < k < i`.
fn since(iv: TimeInterval, a: &[bool], b: &[bool]) -> Vec<bool> {
    let n = a.len();
    // prev_fail[k + 1]: last index <= k where `a` fails, 0 meaning none
    let mut prev_fail = vec![0usize; n + 1];
    for k in 0..n {
        prev_fail[k + 1] = if a[k] { prev_fail[k] } else { k + 1 };
    }
    let pb = prefix_counts(b);
    (0..n)
        .map(|i| {
            let lo_off = sat_u(iv.lo);
            if i < lo_off {
                return false;
            }
            let hi = i - lo_off;
            let mut lo = match iv.hi {
                Some(h) => i.saturating_sub(sat_u(h)),
                None => 0,
            };
            // last failure strictly before i, shifted by one
            let pf = prev_fail[i];
            if pf > 0 {
                lo = lo.max(pf - 1);
            }
            lo <= hi && pb[hi + 1] > pb[lo]
        })
        .collect()
}

/// `M[i][j]` for `0 <= i <= j <= n`: whether the segment `[i, j)` matches.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl MatchMatrix {
    fn new(n: usize) -> Self {
        MatchMatrix { n, bits: vec![false; (n + 1) * (n + 1)] }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        i <= self.n && j <= self.n && self.bits[i * (self.n + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * (self.n + 1) + j] = v;
    }
}

/// Range of the split point of a concatenation matching `[i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConcatSplit {
    /// `i <= k <= j`: either side may match the empty segment.
    #[default]
    Closed,
    /// `i <= k < j`: the right operand matches a non-empty segment. Only
    /// used to compare readings; stars always use the closed range.
    RightOpen,
}

pub fn sre_matches(trace: &Trace, e: &Sre) -> Result<MatchMatrix, PredicateError> {
    sre_matches_with(trace, e, ConcatSplit::Closed)
}

pub fn sre_matches_with(trace: &Trace, e: &Sre, split: ConcatSplit) -> Result<MatchMatrix, PredicateError> {
    let sre_matches = |t: &Trace, e: &Sre| sre_matches_with(t, e, split);
    let n = trace.len();
    let mut m = MatchMatrix::new(n);
    match e {
        Sre::Epsilon => {
            for i in 0..=n {
                m.set(i, i, true);
            }
        }
        Sre::Pred(p) => {
            let s: Vec<bool> = trace.samples.iter().map(|v| p.holds(v)).collect::<Result<_, _>>()?;
            for i in 0..=n {
                m.set(i, i, true);
                for j in i + 1..=n {
                    if !s[j - 1] {
                        break;
                    }
                    m.set(i, j, true);
                }
            }
        }
        Sre::Union(a, b) | Sre::Inter(a, b) => {
            let (ma, mb) = (sre_matches(trace, a)?, sre_matches(trace, b)?);
            let union = matches!(e, Sre::Union(..));
            for (k, bit) in m.bits.iter_mut().enumerate() {
                *bit = if union { ma.bits[k] || mb.bits[k] } else { ma.bits[k] && mb.bits[k] };
            }
        }
        Sre::Concat(a, b) => {
            let (ma, mb) = (sre_matches(trace, a)?, sre_matches(trace, b)?);
            for i in 0..=n {
                for j in i..=n {
                    let top = if split == ConcatSplit::Closed { j + 1 } else { j };
                    m.set(i, j, (i..top).any(|k| ma.get(i, k) && mb.get(k, j)));
                }
            }
        }
        Sre::Star(a) => {
            let ma = sre_matches(trace, a)?;
            for i in (0..=n).rev() {
                m.set(i, i, true);
                for j in i + 1..=n {
                    m.set(i, j, (i + 1..=j).any(|k| ma.get(i, k) && m.get(k, j)));
                }
            }
        }
        Sre::Duration(iv, a) => {
            let ma = sre_matches(trace, a)?;
            for i in 0..=n {
                for j in i..=n {
                    m.set(i, j, ma.get(i, j) && iv.contains((j - i) as u64));
                }
            }
        }
    }
    Ok(m)
}

/// Whether the segment `[i, j)` of `trace` matches `e`.
pub fn eval_sre(trace: &Trace, i: usize, j: usize, e: &Sre) -> Result<bool, PredicateError> {
    Ok(sre_matches(trace, e)?.get(i, j))
}

/// Language membership: the whole trace matches.
pub fn sre_accepts(trace: &Trace, e: &Sre) -> Result<bool, PredicateError> {
    eval_sre(trace, 0, trace.len(), e)
}
