//! Idempotent semirings over the extended non-negative reals.
//!
//! All three instances share one carrier: `f64` restricted to `[0, +inf]`.
//! Boolean only ever produces `0.0` (true) and `1.0` (false).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Element of the shared carrier. Non-negative, `f64::INFINITY` allowed.
pub type Weight = f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semiring {
    /// `({0,1}, and, or, 1, 0)` with 0 read as true.
    Boolean,
    /// `(R+ u {inf}, min, max, inf, 0)`.
    MinMax,
    /// `(R+ u {inf}, min, +, inf, 0)`.
    Tropical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub additively_idempotent: bool,
    pub multiplicatively_idempotent: bool,
    pub bounded: bool,
}

impl Semiring {
    pub const ALL: [Semiring; 3] = [Semiring::Boolean, Semiring::MinMax, Semiring::Tropical];

    pub fn name(self) -> &'static str {
        match self {
            Semiring::Boolean => "boolean",
            Semiring::MinMax => "minmax",
            Semiring::Tropical => "tropical",
        }
    }

    #[inline]
    pub fn oplus(self, a: Weight, b: Weight) -> Weight {
        // every instance uses min (Boolean and = min on {0,1} with 0 = true)
        a.min(b)
    }

    #[inline]
    pub fn otimes(self, a: Weight, b: Weight) -> Weight {
        match self {
            Semiring::Boolean | Semiring::MinMax => a.max(b),
            Semiring::Tropical => a + b,
        }
    }

    /// Additive identity.
    #[inline]
    pub fn zero(self) -> Weight {
        match self {
            Semiring::Boolean => 1.0,
            Semiring::MinMax | Semiring::Tropical => f64::INFINITY,
        }
    }

    /// Multiplicative identity.
    #[inline]
    pub fn one(self) -> Weight {
        0.0
    }

    pub fn flags(self) -> Flags {
        Flags {
            additively_idempotent: true,
            multiplicatively_idempotent: !matches!(self, Semiring::Tropical),
            bounded: true,
        }
    }

    /// Natural order: `a <= b` iff `a (+) b == a`.
    #[inline]
    pub fn nat_leq(self, a: Weight, b: Weight) -> bool {
        self.oplus(a, b) == a
    }

    /// Strict natural order.
    #[inline]
    pub fn nat_lt(self, a: Weight, b: Weight) -> bool {
        self.nat_leq(a, b) && a != b
    }

    pub fn sum<I: IntoIterator<Item = Weight>>(self, it: I) -> Weight {
        it.into_iter().fold(self.zero(), |acc, w| self.oplus(acc, w))
    }

    pub fn product<I: IntoIterator<Item = Weight>>(self, it: I) -> Weight {
        it.into_iter().fold(self.one(), |acc, w| self.otimes(acc, w))
    }

    /// Whether `w` belongs to the carrier of this instance.
    pub fn contains(self, w: Weight) -> bool {
        match self {
            Semiring::Boolean => w == 0.0 || w == 1.0,
            _ => w >= 0.0 && !w.is_nan(),
        }
    }
}

/// Map a carrier element into the signed extended reals.
pub fn to_signed(a: Weight, negate: bool) -> f64 {
    if negate {
        -a
    } else {
        a
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown semiring `{0}` (expected boolean, minmax or tropical)")]
pub struct UnknownSemiring(pub String);

impl FromStr for Semiring {
    type Err = UnknownSemiring;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "boolean" | "bool" => Ok(Semiring::Boolean),
            "minmax" | "min-max" => Ok(Semiring::MinMax),
            "tropical" | "trop" => Ok(Semiring::Tropical),
            _ => Err(UnknownSemiring(s.to_string())),
        }
    }
}

/// Render an extended real the way the JSON and CSV outputs expect.
pub fn format_extended(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn identities() {
        assert_eq!(Semiring::Tropical.oplus(3.0, INF), 3.0);
        assert_eq!(Semiring::Tropical.otimes(2.0, 0.0), 2.0);
        assert_eq!(Semiring::MinMax.otimes(3.0, INF), INF);
        assert_eq!(Semiring::Boolean.oplus(0.0, 1.0), 0.0);
        assert_eq!(Semiring::Boolean.otimes(0.0, 1.0), 1.0);
        assert_eq!(Semiring::Tropical.otimes(INF, 4.0), INF);
    }

    #[test]
    fn flags() {
        let t = Semiring::Tropical.flags();
        assert!(t.additively_idempotent && !t.multiplicatively_idempotent && t.bounded);
        for s in [Semiring::Boolean, Semiring::MinMax] {
            let f = s.flags();
            assert!(f.additively_idempotent && f.multiplicatively_idempotent && f.bounded);
        }
    }

    #[test]
    fn natural_order_is_numeric() {
        assert!(Semiring::Tropical.nat_leq(2.0, 5.0));
        assert!(!Semiring::Tropical.nat_leq(5.0, 2.0));
        assert!(Semiring::MinMax.nat_leq(0.0, INF));
        assert!(Semiring::Boolean.nat_lt(0.0, 1.0));
    }

    #[test]
    fn signed() {
        assert_eq!(to_signed(INF, true), f64::NEG_INFINITY);
        assert_eq!(to_signed(2.0, false), 2.0);
        assert_eq!(to_signed(1.0, true), -1.0);
    }

    #[test]
    fn parse_names() {
        assert_eq!("Tropical".parse::<Semiring>().unwrap(), Semiring::Tropical);
        assert!("max-plus".parse::<Semiring>().is_err());
    }

    fn elem(s: Semiring) -> BoxedStrategy<f64> {
        match s {
            Semiring::Boolean => prop_oneof![Just(0.0), Just(1.0)].boxed(),
            _ => prop_oneof![Just(INF), (0u32..50).prop_map(|x| x as f64 / 2.0)].boxed(),
        }
    }

    fn triple() -> impl Strategy<Value = (Semiring, f64, f64, f64)> {
        prop_oneof![
            Just(Semiring::Boolean),
            Just(Semiring::MinMax),
            Just(Semiring::Tropical)
        ]
        .prop_flat_map(|s| (Just(s), elem(s), elem(s), elem(s)))
    }

    proptest! {
        #[test]
        fn semiring_axioms((s, a, b, c) in triple()) {
            prop_assert_eq!(s.oplus(a, s.oplus(b, c)), s.oplus(s.oplus(a, b), c));
            prop_assert_eq!(s.otimes(a, s.otimes(b, c)), s.otimes(s.otimes(a, b), c));
            prop_assert_eq!(s.oplus(a, b), s.oplus(b, a));
            prop_assert_eq!(s.otimes(a, b), s.otimes(b, a));
            prop_assert_eq!(s.oplus(a, s.zero()), a);
            prop_assert_eq!(s.otimes(a, s.one()), a);
            prop_assert_eq!(s.otimes(a, s.zero()), s.zero());
            prop_assert_eq!(s.otimes(a, s.oplus(b, c)), s.oplus(s.otimes(a, b), s.otimes(a, c)));
            // idempotent + bounded
            prop_assert_eq!(s.oplus(a, a), a);
            prop_assert_eq!(s.oplus(s.one(), a), s.one());
            if s.flags().multiplicatively_idempotent {
                prop_assert_eq!(s.otimes(a, a), a);
            }
            prop_assert!(s.contains(s.otimes(a, b)));
        }

        #[test]
        fn order_is_monotone((s, a, b, c) in triple()) {
            if s.nat_leq(a, b) {
                prop_assert!(s.nat_leq(s.otimes(a, c), s.otimes(b, c)));
                prop_assert!(s.nat_leq(s.oplus(a, c), s.oplus(b, c)));
            }
        }
    }
}
