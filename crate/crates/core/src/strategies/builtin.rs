use crate::formula::StrategyId;
use crate::rational::Rational;

use super::PStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// independence, conjunctive: `[ac, bd]`
    Inc,
    /// ignorance, conjunctive: `[max(0, a+c-1), min(b, d)]`
    Igc,
    /// positive correlation, conjunctive: `[min(a, c), min(b, d)]`
    Pcc,
    /// independence, disjunctive: `[a+c-ac, b+d-bd]`
    Ind,
    /// ignorance, disjunctive: `[max(a, c), min(1, b+d)]`
    Igd,
    /// positive correlation, disjunctive: `[max(a, c), max(b, d)]`
    Pcd,
    /// negative correlation, disjunctive: `[min(a+c, 1), min(b+d, 1)]`
    Ncd,
}

impl Builtin {
    pub const ALL: [Builtin; 7] =
        [Builtin::Inc, Builtin::Igc, Builtin::Pcc, Builtin::Ind, Builtin::Igd, Builtin::Pcd, Builtin::Ncd];

    pub fn id(self) -> StrategyId {
        match self {
            Builtin::Inc => StrategyId::conjunctive("inc"),
            Builtin::Igc => StrategyId::conjunctive("igc"),
            Builtin::Pcc => StrategyId::conjunctive("pcc"),
            Builtin::Ind => StrategyId::disjunctive("ind"),
            Builtin::Igd => StrategyId::disjunctive("igd"),
            Builtin::Pcd => StrategyId::disjunctive("pcd"),
            Builtin::Ncd => StrategyId::disjunctive("ncd"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuiltinStrategy {
    which: Builtin,
    id: StrategyId,
}

impl BuiltinStrategy {
    pub fn new(which: Builtin) -> Self {
        BuiltinStrategy { which, id: which.id() }
    }
}

fn sum_capped(x: &Rational, y: &Rational) -> Rational {
    Rational::min_of(&(x + y), &Rational::one())
}

fn noisy_or(x: &Rational, y: &Rational) -> Rational {
    &(x + y) - &(x * y)
}

impl PStrategy for BuiltinStrategy {
    fn id(&self) -> &StrategyId {
        &self.id
    }

    fn compose_lower(&self, a: &Rational, c: &Rational) -> Rational {
        match self.which {
            Builtin::Inc => a * c,
            Builtin::Igc => Rational::max_of(&Rational::zero(), &(&(a + c) - &Rational::one())),
            Builtin::Pcc => Rational::min_of(a, c),
            Builtin::Ind => noisy_or(a, c),
            Builtin::Igd | Builtin::Pcd => Rational::max_of(a, c),
            Builtin::Ncd => sum_capped(a, c),
        }
    }

    fn compose_upper(&self, b: &Rational, d: &Rational) -> Rational {
        match self.which {
            Builtin::Inc => b * d,
            Builtin::Igc | Builtin::Pcc => Rational::min_of(b, d),
            Builtin::Ind => noisy_or(b, d),
            Builtin::Igd | Builtin::Ncd => sum_capped(b, d),
            Builtin::Pcd => Rational::max_of(b, d),
        }
    }
}
