use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

/// A closed rational subinterval of `[0,1]`, or the empty set.
///
/// `Empty` has a single representation; a `Closed` value always satisfies
/// `0 <= lower <= upper <= 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Interval {
    Empty,
    Closed { lower: Rational, upper: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("bound {0} lies outside [0,1]")]
    OutOfRange(Rational),
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    Inverted { lower: Rational, upper: Rational },
}

impl Interval {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self, IntervalError> {
        for b in [&lower, &upper] {
            if !b.is_probability() {
                return Err(IntervalError::OutOfRange(b.clone()));
            }
        }
        if lower > upper {
            return Err(IntervalError::Inverted { lower, upper });
        }
        Ok(Interval::Closed { lower, upper })
    }

    /// Builds `[lower, upper]`, collapsing to `Empty` when `lower > upper`.
    /// Both bounds must already lie in `[0,1]`.
    pub fn clamped(lower: Rational, upper: Rational) -> Self {
        debug_assert!(lower.is_probability() && upper.is_probability());
        if lower > upper {
            Interval::Empty
        } else {
            Interval::Closed { lower, upper }
        }
    }

    pub fn unit() -> Self {
        Interval::Closed { lower: Rational::zero(), upper: Rational::one() }
    }

    pub fn point(p: Rational) -> Self {
        Interval::Closed { lower: p.clone(), upper: p }
    }

    /// Shorthand for tests and examples: `Interval::ratio((1, 2), (7, 10))`.
    pub fn ratio(lower: (i64, i64), upper: (i64, i64)) -> Self {
        Interval::new(Rational::new(lower.0, lower.1), Rational::new(upper.0, upper.1))
            .expect("valid interval literal")
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interval::Empty)
    }

    pub fn lower(&self) -> Option<&Rational> {
        match self {
            Interval::Closed { lower, .. } => Some(lower),
            Interval::Empty => None,
        }
    }

    pub fn upper(&self) -> Option<&Rational> {
        match self {
            Interval::Closed { upper, .. } => Some(upper),
            Interval::Empty => None,
        }
    }

    pub fn bounds(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Interval::Closed { lower, upper } => Some((lower, upper)),
            Interval::Empty => None,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        match (self, other) {
            (Interval::Closed { lower: a, upper: b }, Interval::Closed { lower: c, upper: d }) => {
                Interval::clamped(Rational::max_of(a, c), Rational::min_of(b, d))
            }
            _ => Interval::Empty,
        }
    }

    /// `inner ⊆ self` as sets. The empty interval is contained in everything.
    pub fn contains(&self, inner: &Interval) -> bool {
        match (self, inner) {
            (_, Interval::Empty) => true,
            (Interval::Empty, _) => false,
            (Interval::Closed { lower: a, upper: b }, Interval::Closed { lower: c, upper: d }) => {
                a <= c && d <= b
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Empty => f.write_str("empty"),
            Interval::Closed { lower, upper } => write!(f, "[{lower},{upper}]"),
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::ratio(lo, hi)
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(iv((1, 5), (3, 5)).intersect(&iv((2, 5), (9, 10))), iv((2, 5), (3, 5)));
        assert_eq!(iv((0, 1), (0, 1)).intersect(&iv((1, 1), (1, 1))), Interval::Empty);
        let x = iv((1, 3), (1, 2));
        assert_eq!(x.intersect(&Interval::unit()), x);
    }

    #[test]
    fn contains_examples() {
        assert!(iv((1, 2), (1, 1)).contains(&iv((1, 2), (7, 10))));
        assert!(!iv((1, 2), (1, 1)).contains(&iv((0, 1), (3, 5))));
        assert!(iv((1, 2), (1, 1)).contains(&Interval::Empty));
        assert!(!Interval::Empty.contains(&Interval::unit()));
    }

    #[test]
    fn constructor_validates() {
        assert!(matches!(
            Interval::new(Rational::new(7, 10), Rational::new(1, 5)),
            Err(IntervalError::Inverted { .. })
        ));
        assert!(matches!(
            Interval::new(Rational::zero(), Rational::new(3, 2)),
            Err(IntervalError::OutOfRange(_))
        ));
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (1i64..=24, 0i64..=24, 0i64..=24).prop_map(|(d, a, b)| {
            let (a, b) = (a.min(d), b.min(d));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            Interval::new(Rational::new(a, d), Rational::new(b, d)).unwrap()
        })
    }

    fn arb_maybe_empty() -> impl Strategy<Value = Interval> {
        prop_oneof![4 => arb_interval(), 1 => Just(Interval::Empty)]
    }

    proptest! {
        #[test]
        fn intersection_is_a_semilattice(x in arb_maybe_empty(), y in arb_maybe_empty(), z in arb_maybe_empty()) {
            prop_assert_eq!(x.intersect(&y), y.intersect(&x));
            prop_assert_eq!(x.intersect(&y).intersect(&z), x.intersect(&y.intersect(&z)));
            prop_assert_eq!(x.intersect(&x), x.clone());
            prop_assert_eq!(x.intersect(&Interval::unit()), x.clone());
        }

        #[test]
        fn intersection_is_the_greatest_lower_bound(x in arb_maybe_empty(), y in arb_maybe_empty()) {
            let m = x.intersect(&y);
            prop_assert!(x.contains(&m) && y.contains(&m));
        }

        #[test]
        fn render_parse_round_trip(x in arb_interval()) {
            let (lo, hi) = x.bounds().unwrap();
            let lo2: Rational = lo.to_string().parse().unwrap();
            let hi2: Rational = hi.to_string().parse().unwrap();
            prop_assert_eq!(Interval::new(lo2, hi2).unwrap(), x);
        }
    }
}
