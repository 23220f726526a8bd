//! Sampling harness for the composition-function and strategy-kind axioms.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{StrategyId, StrategyKind};
use crate::interval::Interval;
use crate::rational::Rational;

use super::{max_interval, PStrategy};

const MAX_DENOMINATOR: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `c` maps intervals in `[0,1]` to a valid interval in `[0,1]`.
    Range,
    Commutativity,
    Associativity,
    Monotonicity,
    Separation,
    Bottomline,
    Identity,
    Annihilator,
    MaxInterval,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::Range,
        Axiom::Commutativity,
        Axiom::Associativity,
        Axiom::Monotonicity,
        Axiom::Separation,
        Axiom::Bottomline,
        Axiom::Identity,
        Axiom::Annihilator,
        Axiom::MaxInterval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Range => "range",
            Axiom::Commutativity => "commutativity",
            Axiom::Associativity => "associativity",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Separation => "separation",
            Axiom::Bottomline => "bottomline",
            Axiom::Identity => "identity",
            Axiom::Annihilator => "annihilator",
            Axiom::MaxInterval => "max-interval",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub strategy: StrategyId,
    pub axiom: Axiom,
    pub samples_tested: usize,
    /// The interval tuple that violated the axiom, if any.
    pub counterexample: Option<Vec<Interval>>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn random_interval(rng: &mut ChaCha8Rng) -> Interval {
    let d = rng.gen_range(1..=MAX_DENOMINATOR);
    let x = rng.gen_range(0..=d);
    let y = rng.gen_range(0..=d);
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    Interval::new(Rational::new(lo, d), Rational::new(hi, d)).expect("in range")
}

/// A random interval containing `x`.
fn random_superset(rng: &mut ChaCha8Rng, x: &Interval) -> Interval {
    let (lo, hi) = x.bounds().expect("nonempty sample");
    let d = rng.gen_range(1..=MAX_DENOMINATOR);
    let below = Rational::new(rng.gen_range(0..=d), d);
    let above = Rational::new(rng.gen_range(0..=d), d);
    let lo2 = if below < *lo { below } else { lo.clone() };
    let hi2 = if above > *hi { above } else { hi.clone() };
    Interval::new(lo2, hi2).expect("in range")
}

fn boundaries() -> [Interval; 3] {
    [Interval::point(Rational::zero()), Interval::point(Rational::one()), Interval::unit()]
}

fn b(iv: &Interval) -> (&Rational, &Rational) {
    iv.bounds().expect("samples are nonempty")
}

struct Checker<'a> {
    s: &'a dyn PStrategy,
    reports: Vec<AxiomReport>,
}

impl Checker<'_> {
    fn record(&mut self, axiom: Axiom, ok: bool, witness: &[&Interval]) {
        let r = self.reports.iter_mut().find(|r| r.axiom == axiom).expect("all axioms seeded");
        if r.counterexample.is_some() {
            return;
        }
        r.samples_tested += 1;
        if !ok {
            r.counterexample = Some(witness.iter().map(|i| (*i).clone()).collect());
        }
    }

    fn lo(&self, x: &Rational, y: &Rational) -> Rational {
        self.s.compose_lower(x, y)
    }

    fn hi(&self, x: &Rational, y: &Rational) -> Rational {
        self.s.compose_upper(x, y)
    }

    fn check(&mut self, x: &Interval, y: &Interval, z: &Interval, wider: &Interval) {
        let ((a1, b1), (a2, b2), (a3, b3)) = (b(x), b(y), b(z));
        let (lo, hi) = (self.lo(a1, a2), self.hi(b1, b2));

        let in_range = lo.is_probability() && hi.is_probability() && lo <= hi;
        self.record(Axiom::Range, in_range, &[x, y]);

        let comm = lo == self.lo(a2, a1) && hi == self.hi(b2, b1);
        self.record(Axiom::Commutativity, comm, &[x, y]);

        let assoc = self.lo(&lo, a3) == self.lo(a1, &self.lo(a2, a3))
            && self.hi(&hi, b3) == self.hi(b1, &self.hi(b2, b3));
        self.record(Axiom::Associativity, assoc, &[x, y, z]);

        // x ⊆ wider  ⇒  c(x, y) ⊆ c(wider, y)
        let (wa, wb) = b(wider);
        let mono = self.lo(wa, a2) <= lo && hi <= self.hi(wb, b2);
        self.record(Axiom::Monotonicity, mono, &[x, wider, y]);

        // Bound functions only ever see one side, so this holds by construction.
        self.record(Axiom::Separation, true, &[x, y]);

        let zero = Rational::zero();
        let one = Rational::one();
        let (bottom, identity, annihilator, md_expected) = match self.s.kind() {
            StrategyKind::Conjunctive => (
                lo <= Rational::min_of(a1, a2) && hi <= Rational::min_of(b1, b2),
                self.lo(a1, &one) == *a1 && self.hi(b1, &one) == *b1,
                self.lo(a1, &zero).is_zero() && self.hi(b1, &zero).is_zero(),
                Interval::Closed { lower: a1.clone(), upper: one.clone() },
            ),
            StrategyKind::Disjunctive => (
                lo >= Rational::max_of(a1, a2) && hi >= Rational::max_of(b1, b2),
                self.lo(a1, &zero) == *a1 && self.hi(b1, &zero) == *b1,
                self.lo(a1, &one).is_one() && self.hi(b1, &one).is_one(),
                Interval::Closed { lower: zero.clone(), upper: b1.clone() },
            ),
        };
        self.record(Axiom::Bottomline, bottom, &[x, y]);
        self.record(Axiom::Identity, identity, &[x]);
        self.record(Axiom::Annihilator, annihilator, &[x]);
        let md_ok = max_interval(self.s.kind(), x).map(|m| m == md_expected).unwrap_or(false);
        self.record(Axiom::MaxInterval, md_ok, &[x]);
    }
}

/// Checks every axiom against `sample_count` seeded random interval triples.
///
/// The boundary intervals `[0,0]`, `[1,1]` and `[0,1]` are always exercised in
/// every combination before random samples are drawn. Returns one report per
/// [`Axiom`]; a failing axiom carries its first counterexample.
pub fn validate_strategy(s: &dyn PStrategy, sample_count: usize, seed: u64) -> Vec<AxiomReport> {
    let mut checker = Checker {
        s,
        reports: Axiom::ALL
            .iter()
            .map(|&axiom| AxiomReport { strategy: s.id().clone(), axiom, samples_tested: 0, counterexample: None })
            .collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = boundaries();
    for x in &edges {
        for y in &edges {
            for z in &edges {
                let w = random_superset(&mut rng, x);
                checker.check(x, y, z, &w);
            }
        }
    }
    for _ in 0..sample_count.max(1) {
        let x = random_interval(&mut rng);
        let y = random_interval(&mut rng);
        let z = random_interval(&mut rng);
        let w = random_superset(&mut rng, &x);
        checker.check(&x, &y, &z, &w);
    }
    checker.reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{Builtin, BuiltinStrategy};

    /// Conjunctive strategy whose lower bound is an uncapped sum.
    struct Broken(StrategyId);

    impl PStrategy for Broken {
        fn id(&self) -> &StrategyId {
            &self.0
        }
        fn compose_lower(&self, a: &Rational, c: &Rational) -> Rational {
            a + c
        }
        fn compose_upper(&self, b: &Rational, d: &Rational) -> Rational {
            Rational::min_of(b, d)
        }
    }

    #[test]
    fn builtins_pass_every_axiom() {
        for which in Builtin::ALL {
            let s = BuiltinStrategy::new(which);
            for r in validate_strategy(&s, 200, 7) {
                assert!(r.passed(), "{} fails {}: {:?}", r.strategy, r.axiom, r.counterexample);
                assert!(r.samples_tested >= 200);
            }
        }
    }

    #[test]
    fn igd_annihilator_at_one() {
        let s = BuiltinStrategy::new(Builtin::Igd);
        let a = Rational::new(3, 10);
        let b = Rational::new(1, 2);
        assert!(s.compose_lower(&a, &Rational::one()).is_one());
        assert!(s.compose_upper(&b, &Rational::one()).is_one());
    }

    #[test]
    fn broken_control_is_flagged() {
        let s = Broken(StrategyId::conjunctive("broken"));
        let reports = validate_strategy(&s, 50, 1);
        let failed: Vec<Axiom> = reports.iter().filter(|r| !r.passed()).map(|r| r.axiom).collect();
        assert!(failed.contains(&Axiom::Range));
        assert!(failed.contains(&Axiom::Bottomline));
        assert!(!failed.contains(&Axiom::Commutativity));
    }

    #[test]
    fn same_seed_same_reports() {
        let s = BuiltinStrategy::new(Builtin::Ncd);
        assert_eq!(validate_strategy(&s, 30, 99), validate_strategy(&s, 30, 99));
    }
}
