//! Pointwise distances and the valuation-to-predicate distance.

use std::fmt;
use std::str::FromStr;

use crate::predicate::{clause_is_sat, is_sat, Dnf, Literal, PredicateError, Valuation};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointwiseDistance {
    /// 0 on equal values, 1 otherwise.
    Discrete01,
    /// `|a - b|`.
    AbsDiff,
}

impl PointwiseDistance {
    pub fn default_for(s: Semiring) -> Self {
        match s {
            Semiring::Boolean => PointwiseDistance::Discrete01,
            Semiring::MinMax | Semiring::Tropical => PointwiseDistance::AbsDiff,
        }
    }

    #[inline]
    pub fn eval(self, a: f64, b: f64) -> Weight {
        match self {
            PointwiseDistance::Discrete01 => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            PointwiseDistance::AbsDiff => (a - b).abs(),
        }
    }
}

pub fn point_dist(d: PointwiseDistance, a: f64, b: f64) -> Weight {
    d.eval(a, b)
}

impl fmt::Display for PointwiseDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointwiseDistance::Discrete01 => "discrete",
            PointwiseDistance::AbsDiff => "abs",
        })
    }
}

impl FromStr for PointwiseDistance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discrete" | "discrete01" | "hamming" => Ok(PointwiseDistance::Discrete01),
            "abs" | "absdiff" | "euclid" => Ok(PointwiseDistance::AbsDiff),
            _ => Err(format!("unknown distance `{s}` (expected discrete or abs)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistanceError {
    #[error("tropical semiring requires ∧-minimal DNF")]
    NotWedgeMinimal,
    #[error(transparent)]
    Predicate(#[from] PredicateError),
}

/// Distance from `v` to the set of valuations satisfying `d`.
///
/// Under the tropical semiring the guard must carry the ∧-minimal flag,
/// otherwise literals implied by others would be counted twice.
pub fn vpd(
    v: &Valuation,
    d: &Dnf,
    s: Semiring,
    dist: PointwiseDistance,
) -> Result<Weight, DistanceError> {
    if s == Semiring::Tropical && !d.wedge_minimal {
        return Err(DistanceError::NotWedgeMinimal);
    }
    vpd_unchecked(v, d, s, dist)
}

/// [`vpd`] without the ∧-minimality requirement. Useful to show the
/// over-counting on raw DNFs; results under tropical may then be too large.
pub fn vpd_unchecked(
    v: &Valuation,
    d: &Dnf,
    s: Semiring,
    dist: PointwiseDistance,
) -> Result<Weight, DistanceError> {
    if !is_sat(d) {
        return Ok(s.zero());
    }
    let mut acc = s.zero();
    for c in &d.clauses {
        if !clause_is_sat(c) {
            continue;
        }
        acc = s.oplus(acc, clause_distance(v, c, s, dist)?);
    }
    Ok(acc)
}

/// Product of literal distances; the clause is assumed satisfiable.
pub(crate) fn clause_distance(
    v: &Valuation,
    c: &[Literal],
    s: Semiring,
    dist: PointwiseDistance,
) -> Result<Weight, PredicateError> {
    let mut w = s.one();
    for l in c {
        w = s.otimes(w, literal_distance(v, l, s, dist)?);
    }
    Ok(w)
}

pub(crate) fn literal_distance(
    v: &Valuation,
    l: &Literal,
    s: Semiring,
    dist: PointwiseDistance,
) -> Result<Weight, PredicateError> {
    Ok(match l {
        Literal::True => s.one(),
        Literal::False => s.zero(),
        Literal::Pos(a) | Literal::Neg(a) => {
            let x = v.get(&a.var)?;
            let holds = a.holds_at(x) == matches!(l, Literal::Pos(_));
            if holds {
                s.one()
            } else {
                dist.eval(x, a.k)
            }
        }
    })
}

/// Inclusive integer grid used by the brute-force oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub lo: i64,
    pub hi: i64,
}

impl Grid {
    pub fn new(lo: i64, hi: i64) -> Self {
        Grid { lo, hi }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + Clone {
        (self.lo..=self.hi).map(|x| x as f64)
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Brute force: (+) over satisfying grid points of (x) over the variables
/// of `v` of the pointwise distance.
pub fn vpd_oracle(
    v: &Valuation,
    d: &Dnf,
    s: Semiring,
    dist: PointwiseDistance,
    grid: Grid,
) -> Result<Weight, DistanceError> {
    let vars: Vec<(String, f64)> = v.iter().map(|(k, x)| (k.to_string(), x)).collect();
    let n = vars.len();
    let pts: Vec<f64> = grid.points().collect();
    if pts.is_empty() {
        return Ok(s.zero());
    }
    let mut idx = vec![0usize; n];
    let mut cand = v.clone();
    let mut best = s.zero();
    loop {
        let mut w = s.one();
        for (i, (name, x)) in vars.iter().enumerate() {
            let p = pts[idx[i]];
            cand.insert(name, p);
            w = s.otimes(w, dist.eval(*x, p));
        }
        if d.holds(&cand)? {
            best = s.oplus(best, w);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(best);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < pts.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::predicate::{to_dnf, wedge_minimize};
    use crate::syntax::parse_predicate;
    use proptest::prelude::*;

    fn dnf(s: &str) -> Dnf {
        to_dnf(&parse_predicate(s).unwrap())
    }

    #[test]
    fn pointwise() {
        assert_eq!(point_dist(PointwiseDistance::Discrete01, 2.0, 2.0), 0.0);
        assert_eq!(point_dist(PointwiseDistance::Discrete01, 2.0, 3.0), 1.0);
        assert_eq!(point_dist(PointwiseDistance::AbsDiff, 2.0, -3.0), 5.0);
    }

    #[test]
    fn redundant_conjunct_overcounts_under_tropical() {
        let v = Valuation::new().with("x", 6.0);
        let raw = dnf("x <= 3 && x <= 5");
        let d = PointwiseDistance::AbsDiff;
        assert_eq!(vpd_unchecked(&v, &raw, Semiring::Tropical, d).unwrap(), 4.0);
        assert_eq!(vpd(&v, &raw, Semiring::Tropical, d), Err(DistanceError::NotWedgeMinimal));
        assert_eq!(vpd(&v, &wedge_minimize(&raw), Semiring::Tropical, d).unwrap(), 3.0);
        assert_eq!(vpd(&v, &raw, Semiring::MinMax, d).unwrap(), 3.0);
    }

    #[test]
    fn guard_of_table_fixture() {
        // x <= 3 && y >= 6 against the four samples of the fixture trace
        let g = wedge_minimize(&dnf("x <= 3 && !(y < 6)"));
        let samples = [(4.0, 2.0), (5.0, 3.0), (2.0, 5.0), (3.0, 5.0)];
        let minmax = [4.0, 3.0, 1.0, 1.0];
        let trop = [5.0, 5.0, 1.0, 1.0];
        for (i, (x, y)) in samples.iter().enumerate() {
            let v = Valuation::new().with("x", *x).with("y", *y);
            let a = PointwiseDistance::AbsDiff;
            assert_eq!(vpd(&v, &g, Semiring::MinMax, a).unwrap(), minmax[i]);
            assert_eq!(vpd(&v, &g, Semiring::Tropical, a).unwrap(), trop[i]);
            let b = vpd(&v, &g, Semiring::Boolean, PointwiseDistance::Discrete01).unwrap();
            assert_eq!(b, 1.0);
        }
    }

    #[test]
    fn unsat_and_constants() {
        let v = Valuation::new().with("x", 1.0);
        let d = PointwiseDistance::AbsDiff;
        assert_eq!(vpd(&v, &dnf("x < 0 && !(x < 0)"), Semiring::MinMax, d).unwrap(), f64::INFINITY);
        assert_eq!(vpd(&v, &dnf("false"), Semiring::Boolean, d).unwrap(), 1.0);
        assert_eq!(vpd(&v, &dnf("true"), Semiring::MinMax, d).unwrap(), 0.0);
        // unsat clause contributes nothing
        assert_eq!(vpd(&v, &dnf("x < 0 && !(x < 0) || x <= -2"), Semiring::MinMax, d).unwrap(), 3.0);
        // strict literal: infimum, reached at the boundary
        assert_eq!(vpd(&v, &dnf("x < 1"), Semiring::MinMax, d).unwrap(), 0.0);
    }

    #[test]
    fn unbound_variable() {
        let v = Valuation::new().with("x", 1.0);
        let r = vpd(&v, &dnf("y <= 1"), Semiring::MinMax, PointwiseDistance::AbsDiff);
        assert!(matches!(r, Err(DistanceError::Predicate(_))));
    }

    #[test]
    fn oracle_small() {
        let v = Valuation::new().with("x", 6.0).with("y", 0.0);
        let d = dnf("x <= 3 && !(y < 2) || x <= -1");
        let a = PointwiseDistance::AbsDiff;
        let g = Grid::new(-5, 8);
        assert_eq!(vpd_oracle(&v, &d, Semiring::Tropical, a, g).unwrap(), 5.0);
        assert_eq!(vpd_oracle(&v, &d, Semiring::MinMax, a, g).unwrap(), 3.0);
    }

    fn lit() -> impl Strategy<Value = String> {
        // non-strict literals only: x <= k or x >= k
        (0usize..2, any::<bool>(), -4i32..=4)
            .prop_map(|(v, up, k)| format!("{} {} {k}", ["x", "y"][v], if up { "<=" } else { ">=" }))
    }

    proptest! {
        #[test]
        fn vpd_matches_oracle(
            clauses in prop::collection::vec(prop::collection::vec(lit(), 1..4), 1..3),
            x in -6i32..=6, y in -6i32..=6,
        ) {
            let src = clauses.iter().map(|c| c.join(" && ")).collect::<Vec<_>>().join(" || ");
            let raw = dnf(&src);
            let v = Valuation::new().with("x", x as f64).with("y", y as f64);
            let a = PointwiseDistance::AbsDiff;
            let g = Grid::new(-8, 8);
            prop_assert_eq!(
                vpd(&v, &raw, Semiring::MinMax, a).unwrap(),
                vpd_oracle(&v, &raw, Semiring::MinMax, a, g).unwrap()
            );
            let m = wedge_minimize(&raw);
            prop_assert_eq!(
                vpd(&v, &m, Semiring::Tropical, a).unwrap(),
                vpd_oracle(&v, &raw, Semiring::Tropical, a, g).unwrap()
            );
            prop_assert_eq!(
                vpd(&v, &m, Semiring::Boolean, PointwiseDistance::Discrete01).unwrap(),
                vpd_oracle(&v, &raw, Semiring::Boolean, PointwiseDistance::Discrete01, g).unwrap()
            );
        }
    }
}
