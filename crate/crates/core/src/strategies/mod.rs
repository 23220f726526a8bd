//! Probabilistic strategies: composition functions and max-interval functions.
//!
//! A strategy is represented by its two bound functions `c¹` (lower) and `c²`
//! (upper), so composition always acts on lower and upper bounds separately.
//! The max-interval function is fixed by the strategy's kind.

mod axioms;
mod builtin;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{StrategyId, StrategyKind};
use crate::interval::Interval;
use crate::rational::Rational;

pub use axioms::{validate_strategy, Axiom, AxiomReport};
pub use builtin::{Builtin, BuiltinStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("composition over an empty interval is undefined")]
    EmptyInput,
    #[error("composition needs at least one operand")]
    NoOperands,
    #[error("unknown strategy `{0}`")]
    Unknown(String),
    #[error("strategy `{name}` is {actual:?}, not {expected:?}")]
    WrongKind { name: String, expected: StrategyKind, actual: StrategyKind },
    #[error("strategy `{0}` is already registered")]
    Duplicate(String),
}

/// The contract every p-strategy implements.
///
/// Both bound functions must be pure and map `[0,1]²` into `[0,1]`; the
/// remaining axioms are checked by [`validate_strategy`].
pub trait PStrategy: Send + Sync {
    fn id(&self) -> &StrategyId;

    /// `c¹(a, c)`
    fn compose_lower(&self, a: &Rational, c: &Rational) -> Rational;

    /// `c²(b, d)`
    fn compose_upper(&self, b: &Rational, d: &Rational) -> Rational;

    fn kind(&self) -> StrategyKind {
        self.id().kind
    }

    /// n-ary fold of `c¹`; a single operand is returned unchanged.
    fn fold_lower(&self, values: &[Rational]) -> Option<Rational> {
        let (first, rest) = values.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, v| self.compose_lower(&acc, v)))
    }

    /// n-ary fold of `c²`; a single operand is returned unchanged.
    fn fold_upper(&self, values: &[Rational]) -> Option<Rational> {
        let (first, rest) = values.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, v| self.compose_upper(&acc, v)))
    }
}

impl fmt::Debug for dyn PStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PStrategy({})", self.id().name)
    }
}

pub(crate) fn clamp_unit(r: Rational) -> Rational {
    if r.is_negative() {
        Rational::zero()
    } else if r > Rational::one() {
        Rational::one()
    } else {
        r
    }
}

/// `c(µ1, ..., µn)`. Returns `Empty` if the composed lower bound exceeds the
/// composed upper bound.
pub fn compose(s: &dyn PStrategy, intervals: &[Interval]) -> Result<Interval, StrategyError> {
    if intervals.is_empty() {
        return Err(StrategyError::NoOperands);
    }
    let mut lows = Vec::with_capacity(intervals.len());
    let mut highs = Vec::with_capacity(intervals.len());
    for iv in intervals {
        let (lo, hi) = iv.bounds().ok_or(StrategyError::EmptyInput)?;
        lows.push(lo.clone());
        highs.push(hi.clone());
    }
    let lo = clamp_unit(s.fold_lower(&lows).expect("nonempty"));
    let hi = clamp_unit(s.fold_upper(&highs).expect("nonempty"));
    Ok(Interval::clamped(lo, hi))
}

/// Binary composition.
pub fn compose2(s: &dyn PStrategy, x: &Interval, y: &Interval) -> Result<Interval, StrategyError> {
    let ((a, b), (c, d)) = match (x.bounds(), y.bounds()) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(StrategyError::EmptyInput),
    };
    let lo = clamp_unit(s.compose_lower(a, c));
    let hi = clamp_unit(s.compose_upper(b, d));
    Ok(Interval::clamped(lo, hi))
}

/// `md(µ)`: `[a,1]` for conjunctive strategies, `[0,b]` for disjunctive ones.
pub fn max_interval(kind: StrategyKind, mu: &Interval) -> Result<Interval, StrategyError> {
    let (lo, hi) = mu.bounds().ok_or(StrategyError::EmptyInput)?;
    Ok(match kind {
        StrategyKind::Conjunctive => Interval::Closed { lower: lo.clone(), upper: Rational::one() },
        StrategyKind::Disjunctive => Interval::Closed { lower: Rational::zero(), upper: hi.clone() },
    })
}

/// Name-indexed set of strategies available to parsers and evaluators.
#[derive(Clone)]
pub struct StrategyRegistry {
    by_name: BTreeMap<String, Arc<dyn PStrategy>>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl fmt::Debug for StrategyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.by_name.keys()).finish()
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { by_name: BTreeMap::new() }
    }

    /// `inc`, `igc`, `pcc` (conjunctive) and `ind`, `igd`, `pcd`, `ncd` (disjunctive).
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        for b in Builtin::ALL {
            r.register(Arc::new(BuiltinStrategy::new(b))).expect("builtin names are distinct");
        }
        r
    }

    pub fn register(&mut self, s: Arc<dyn PStrategy>) -> Result<(), StrategyError> {
        let name = s.id().name.clone();
        if self.by_name.contains_key(&name) {
            return Err(StrategyError::Duplicate(name));
        }
        self.by_name.insert(name, s);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn PStrategy>> {
        self.by_name.get(name)
    }

    pub fn lookup(&self, name: &str) -> Result<&dyn PStrategy, StrategyError> {
        self.by_name.get(name).map(|s| s.as_ref()).ok_or_else(|| StrategyError::Unknown(name.to_string()))
    }

    /// Looks up `id` and checks that the registered kind agrees.
    pub fn resolve(&self, id: &StrategyId) -> Result<&dyn PStrategy, StrategyError> {
        let s = self.lookup(&id.name)?;
        if s.kind() != id.kind {
            return Err(StrategyError::WrongKind { name: id.name.clone(), expected: id.kind, actual: s.kind() });
        }
        Ok(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn PStrategy>> {
        self.by_name.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.by_name.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> StrategyRegistry {
        StrategyRegistry::builtin()
    }

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::ratio(lo, hi)
    }

    #[test]
    fn compose_examples() {
        let r = reg();
        let inc = r.lookup("inc").unwrap();
        assert_eq!(compose(inc, &[iv((1, 2), (7, 10)), iv((1, 2), (3, 5))]).unwrap(), iv((1, 4), (21, 50)));
        let ncd = r.lookup("ncd").unwrap();
        assert_eq!(compose(ncd, &[iv((1, 2), (1, 2)), iv((7, 10), (4, 5))]).unwrap(), iv((1, 1), (1, 1)));
        let pcc = r.lookup("pcc").unwrap();
        assert_eq!(compose(pcc, &[iv((2, 5), (3, 5)), iv((3, 10), (1, 2))]).unwrap(), iv((3, 10), (1, 2)));
        let igc = r.lookup("igc").unwrap();
        let x = iv((1, 3), (5, 7));
        assert_eq!(compose(igc, &[x.clone(), iv((1, 1), (1, 1))]).unwrap(), x);
    }

    #[test]
    fn singleton_and_empty_operands() {
        let r = reg();
        let ind = r.lookup("ind").unwrap();
        let x = iv((1, 5), (2, 5));
        assert_eq!(compose(ind, &[x.clone()]).unwrap(), x);
        assert_eq!(compose(ind, &[]), Err(StrategyError::NoOperands));
        assert_eq!(compose(ind, &[x, Interval::Empty]), Err(StrategyError::EmptyInput));
    }

    #[test]
    fn max_interval_by_kind() {
        let mu = iv((3, 10), (2, 5));
        assert_eq!(max_interval(StrategyKind::Conjunctive, &mu).unwrap(), iv((3, 10), (1, 1)));
        assert_eq!(max_interval(StrategyKind::Disjunctive, &mu).unwrap(), iv((0, 1), (2, 5)));
        assert_eq!(max_interval(StrategyKind::Conjunctive, &Interval::unit()).unwrap(), Interval::unit());
        assert_eq!(max_interval(StrategyKind::Conjunctive, &Interval::Empty), Err(StrategyError::EmptyInput));
    }

    #[test]
    fn registry_resolves_kinds() {
        let r = reg();
        assert_eq!(r.names().count(), 7);
        assert!(r.resolve(&StrategyId::conjunctive("igc")).is_ok());
        assert!(matches!(r.resolve(&StrategyId::conjunctive("igd")), Err(StrategyError::WrongKind { .. })));
        assert!(matches!(r.lookup("nope"), Err(StrategyError::Unknown(_))));
        let mut r2 = r.clone();
        assert!(matches!(
            r2.register(Arc::new(BuiltinStrategy::new(Builtin::Inc))),
            Err(StrategyError::Duplicate(_))
        ));
    }
}
