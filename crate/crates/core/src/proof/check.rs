use std::fmt;

use crate::formula::{AnnotatedFormula, Atom, BasicFormula, Program, StrategyId};
use crate::interval::Interval;
use crate::strategies::{compose2, max_interval, StrategyRegistry};

use super::{Derivation, ProofStep, RuleData, RuleTag};

/// First step that does not follow from its premises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckError {
    /// 1-based; 0 for a derivation-level failure.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.step == 0 {
            f.write_str(&self.reason)
        } else {
            write!(f, "step {}: {}", self.step, self.reason)
        }
    }
}

impl std::error::Error for CheckError {}

fn arity(rule: RuleTag, p: &Program, data: &RuleData) -> Option<usize> {
    Some(match rule {
        RuleTag::Axiom => 0,
        RuleTag::Program => match data {
            RuleData::Clause(c) => p.clause(*c)?.body.len(),
            _ => return None,
        },
        RuleTag::AComposition | RuleTag::FComposition | RuleTag::Clarification => 2,
        RuleTag::Decomposition | RuleTag::Exchange | RuleTag::IntervalWeakening => 1,
    })
}

struct Checker<'a> {
    program: &'a Program,
    registry: &'a StrategyRegistry,
    steps: &'a [ProofStep],
}

type StepResult = Result<(), String>;

impl Checker<'_> {
    fn premise(&self, i: usize) -> &AnnotatedFormula {
        &self.steps[i - 1].conclusion
    }

    fn strategy(&self, data: &RuleData) -> Result<StrategyId, String> {
        match data {
            RuleData::Strategy(s) => {
                self.registry.resolve(s).map_err(|e| e.to_string())?;
                Ok(s.clone())
            }
            _ => Err("missing strat=<name>".into()),
        }
    }

    fn step(&self, s: &ProofStep) -> StepResult {
        let expected_data = match s.rule {
            RuleTag::Program => matches!(s.data, RuleData::Clause(_)),
            RuleTag::AComposition | RuleTag::FComposition | RuleTag::Decomposition => {
                matches!(s.data, RuleData::Strategy(_))
            }
            _ => s.data == RuleData::None,
        };
        if !expected_data {
            return Err(format!("rule data does not fit {}", s.rule));
        }
        let want = arity(s.rule, self.program, &s.data).ok_or("cited clause does not exist")?;
        if s.premises.len() != want {
            return Err(format!("{} takes {want} premises, found {}", s.rule, s.premises.len()));
        }
        if let Some(bad) = s.premises.iter().find(|&&q| q == 0 || q >= s.index) {
            return Err(format!("premise {bad} is not an earlier step"));
        }
        if s.conclusion.annotation.is_empty() {
            return Err("empty annotation".into());
        }
        let c = &s.conclusion;
        match s.rule {
            RuleTag::Axiom => {
                if !c.formula.is_atomic() || c.annotation != Interval::unit() {
                    return Err("axioms have the form A : [0,1]".into());
                }
            }
            RuleTag::Program => {
                let RuleData::Clause(id) = s.data else { unreachable!() };
                let clause = self.program.clause(id).expect("arity checked the clause");
                if c.formula != clause.head || c.annotation != clause.head_annotation {
                    return Err(format!("conclusion is not the head of clause {id}"));
                }
                for (k, (q, b)) in s.premises.iter().zip(&clause.body).enumerate() {
                    if self.premise(*q) != b {
                        return Err(format!("premise {} does not match body item {} of clause {id}", q, k + 1));
                    }
                }
            }
            RuleTag::AComposition | RuleTag::FComposition => {
                let strat = self.strategy(&s.data)?;
                let (x, y) = (self.premise(s.premises[0]), self.premise(s.premises[1]));
                let compound = !x.formula.is_atomic() || !y.formula.is_atomic();
                if compound != (s.rule == RuleTag::FComposition) {
                    return Err(if compound {
                        "AComposition joins two atoms".into()
                    } else {
                        "FComposition needs a compound premise".into()
                    });
                }
                for f in [&x.formula, &y.formula] {
                    if !f.is_atomic() && f.strategy() != Some(&strat) {
                        return Err(format!("premise {f} does not use strategy {}", strat.name));
                    }
                }
                let atoms: Vec<Atom> = x.formula.atoms().iter().chain(y.formula.atoms()).cloned().collect();
                let joined = BasicFormula::canonicalize(Some(strat.clone()), atoms)
                    .map_err(|_| "premises share an atom".to_string())?;
                if c.formula != joined {
                    return Err(format!("conclusion formula should be {joined}"));
                }
                let s_impl = self.registry.resolve(&strat).expect("resolved above");
                let v = compose2(s_impl, &x.annotation, &y.annotation).map_err(|e| e.to_string())?;
                if c.annotation != v {
                    return Err(format!("composition gives {v}"));
                }
            }
            RuleTag::Decomposition => {
                let strat = self.strategy(&s.data)?;
                let x = self.premise(s.premises[0]);
                if x.formula.strategy() != Some(&strat) {
                    return Err(format!("premise does not use strategy {}", strat.name));
                }
                if c.formula.width() >= x.formula.width() || !x.formula.includes_atoms_of(&c.formula) {
                    return Err("conclusion is not a proper subformula of the premise".into());
                }
                if !c.formula.is_atomic() && c.formula.strategy() != Some(&strat) {
                    return Err("conclusion changes strategy".into());
                }
                let md = max_interval(strat.kind, &x.annotation).map_err(|e| e.to_string())?;
                if c.annotation != md {
                    return Err(format!("max-interval gives {md}"));
                }
            }
            RuleTag::Clarification => {
                let (x, y) = (self.premise(s.premises[0]), self.premise(s.premises[1]));
                if x.formula != c.formula || y.formula != c.formula {
                    return Err("premises are about a different formula".into());
                }
                let v = x.annotation.intersect(&y.annotation);
                if c.annotation != v {
                    return Err(format!("intersection gives {v}"));
                }
            }
            RuleTag::Exchange => {
                if self.premise(s.premises[0]) != c {
                    return Err("exchange must keep formula and annotation".into());
                }
            }
            RuleTag::IntervalWeakening => {
                let x = self.premise(s.premises[0]);
                if x.formula != c.formula {
                    return Err("premise is about a different formula".into());
                }
                if !c.annotation.contains(&x.annotation) {
                    return Err(format!("{} is not contained in {}", x.annotation, c.annotation));
                }
            }
        }
        Ok(())
    }
}

/// Checks every step of `d` against `p`.
pub fn check_derivation(p: &Program, registry: &StrategyRegistry, d: &Derivation) -> Result<(), CheckError> {
    if d.steps.is_empty() {
        return Err(CheckError { step: 0, reason: "empty derivation".into() });
    }
    let checker = Checker { program: p, registry, steps: &d.steps };
    for (i, s) in d.steps.iter().enumerate() {
        if s.index != i + 1 {
            return Err(CheckError { step: i + 1, reason: format!("step is numbered {}", s.index) });
        }
        checker.step(s).map_err(|reason| CheckError { step: s.index, reason })?;
    }
    Ok(())
}

/// [`check_derivation`], and the result must be `goal`.
pub fn check_derivation_for(
    p: &Program,
    registry: &StrategyRegistry,
    d: &Derivation,
    goal: &AnnotatedFormula,
) -> Result<(), CheckError> {
    check_derivation(p, registry, d)?;
    match d.result() {
        Some(r) if r == goal => Ok(()),
        Some(r) => Err(CheckError { step: 0, reason: format!("derivation proves {r}, not {goal}") }),
        None => unreachable!("checked nonempty"),
    }
}
