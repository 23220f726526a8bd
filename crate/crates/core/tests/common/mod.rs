//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use hpp::formula::{AnnotatedFormula, Atom, BasicFormula, Clause, Program, StrategyId};
use hpp::interval::Interval;
use hpp::rational::Rational;
use hpp::strategies::Builtin;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Limits for [`program`]; every count is an inclusive maximum.
#[derive(Debug, Clone)]
pub struct Shape {
    pub min_atoms: usize,
    pub atoms: usize,
    pub clauses: usize,
    pub head_width: usize,
    pub body_width: usize,
    pub body_len: usize,
    /// Chance that a clause has a body.
    pub rule_share: f64,
    pub strategies: Vec<StrategyId>,
    /// Annotation endpoints are multiples of `1/denominator`.
    pub denominator: i64,
}

impl Shape {
    pub fn mixed(atoms: usize, clauses: usize, width: usize) -> Shape {
        Shape {
            min_atoms: 1,
            atoms,
            clauses,
            head_width: width,
            body_width: width,
            body_len: 2,
            rule_share: 0.5,
            strategies: all_strategies(),
            denominator: 10,
        }
    }

    pub fn facts(self) -> Shape {
        Shape { rule_share: 0.0, ..self }
    }

    pub fn atomic_heads(self) -> Shape {
        Shape { head_width: 1, ..self }
    }
}

pub fn all_strategies() -> Vec<StrategyId> {
    Builtin::ALL.iter().map(|b| b.id()).collect()
}

pub fn atoms(n: usize) -> Vec<Atom> {
    (0..n).map(|i| Atom::prop(format!("p{i}"))).collect()
}

pub fn interval(rng: &mut ChaCha8Rng, d: i64) -> Interval {
    let x = rng.gen_range(0..=d);
    let y = rng.gen_range(0..=d);
    Interval::new(Rational::new(x.min(y), d), Rational::new(x.max(y), d)).unwrap()
}

/// Wide annotations so that bodies hold often enough for rules to fire.
pub fn body_interval(rng: &mut ChaCha8Rng, d: i64) -> Interval {
    let k = rng.gen_range(0..=d);
    match rng.gen_range(0..4) {
        0 => Interval::unit(),
        1 => Interval::new(Rational::new(k, d), Rational::one()).unwrap(),
        2 => Interval::new(Rational::zero(), Rational::new(k, d)).unwrap(),
        _ => interval(rng, d),
    }
}

/// Facts with a fair chance of overlapping each other.
pub fn head_interval(rng: &mut ChaCha8Rng, d: i64) -> Interval {
    let lo = rng.gen_range(0..=d / 2);
    let hi = rng.gen_range(d / 2..=d);
    if rng.gen_bool(0.7) {
        Interval::new(Rational::new(lo, d), Rational::new(hi, d)).unwrap()
    } else {
        interval(rng, d)
    }
}

pub fn formula(rng: &mut ChaCha8Rng, atoms: &[Atom], max_width: usize, strategies: &[StrategyId]) -> BasicFormula {
    let w = rng.gen_range(1..=max_width.min(atoms.len()));
    let picked: Vec<Atom> = atoms.choose_multiple(rng, w).cloned().collect();
    let s = strategies.choose(rng).expect("at least one strategy").clone();
    BasicFormula::with_strategy_if_compound(&s, picked).unwrap()
}

pub fn program(rng: &mut ChaCha8Rng, shape: &Shape) -> Program {
    let n = rng.gen_range(shape.min_atoms..=shape.atoms);
    let atoms = atoms(n);
    let m = rng.gen_range(1..=shape.clauses);
    let d = shape.denominator;
    let clauses = (0..m)
        .map(|_| {
            let head = formula(rng, &atoms, shape.head_width, &shape.strategies);
            let ann = head_interval(rng, d);
            if rng.gen_bool(shape.rule_share) {
                let len = rng.gen_range(1..=shape.body_len);
                let body = (0..len)
                    .map(|_| {
                        let f = formula(rng, &atoms, shape.body_width, &shape.strategies);
                        AnnotatedFormula::new(f, body_interval(rng, d))
                    })
                    .collect();
                Clause::rule(head, ann, body)
            } else {
                Clause::fact(head, ann)
            }
        })
        .collect();
    Program::new(clauses)
}

/// Every basic formula over `atoms` of width at most `max_width`.
pub fn all_formulas(atoms: &[Atom], max_width: usize, strategies: &[StrategyId]) -> Vec<BasicFormula> {
    let mut out: Vec<BasicFormula> = atoms.iter().cloned().map(BasicFormula::atom).collect();
    let n = atoms.len();
    for mask in 1u32..(1 << n) {
        let w = mask.count_ones() as usize;
        if w < 2 || w > max_width {
            continue;
        }
        let picked: Vec<Atom> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| atoms[i].clone()).collect();
        for s in strategies {
            out.push(BasicFormula::canonicalize(Some(s.clone()), picked.clone()).unwrap());
        }
    }
    out
}
