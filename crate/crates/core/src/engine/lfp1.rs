use std::collections::BTreeMap;

use crate::formula::{Atom, BasicFormula, ClauseId, Program};
use crate::interval::Interval;
use crate::strategies::{compose, StrategyRegistry};

use super::trace::{FiringTrace, Iteration, TraceScope, Update, UpdateCause};
use super::{classify, Engine, EngineError};

/// Fixpoint of a program whose heads are all atoms.
#[derive(Debug, Clone)]
pub struct AtomFixpoint {
    atoms: BTreeMap<Atom, Interval>,
    registry: StrategyRegistry,
}

impl AtomFixpoint {
    /// Program atoms and their values.
    pub fn atoms(&self) -> &BTreeMap<Atom, Interval> {
        &self.atoms
    }

    /// `[0,1]` for atoms outside the program.
    pub fn atom(&self, a: &Atom) -> Interval {
        self.atoms.get(a).cloned().unwrap_or_else(Interval::unit)
    }

    /// Value of any formula: the n-ary composition of its atoms' values, or
    /// `Empty` when one of them is empty.
    pub fn value(&self, f: &BasicFormula) -> Result<Interval, EngineError> {
        value_of(&self.atoms, &self.registry, f)
    }

    pub fn is_fully_defined(&self) -> bool {
        self.atoms.values().all(|v| !v.is_empty())
    }
}

fn value_of(
    atoms: &BTreeMap<Atom, Interval>,
    registry: &StrategyRegistry,
    f: &BasicFormula,
) -> Result<Interval, EngineError> {
    let values: Vec<Interval> = f.atoms().iter().map(|a| atoms.get(a).cloned().unwrap_or_else(Interval::unit)).collect();
    if values.iter().any(Interval::is_empty) {
        return Ok(Interval::Empty);
    }
    match f.strategy() {
        None => Ok(values.into_iter().next().expect("nonempty formula")),
        Some(s) => Ok(compose(registry.resolve(s)?, &values)?),
    }
}

impl Engine {
    /// Atom-only fixpoint for programs of head width at most one.
    pub fn lfp1(&self, p: &Program) -> Result<(AtomFixpoint, FiringTrace), EngineError> {
        let sig = classify(p);
        if !sig.is_hpp1() {
            return Err(EngineError::NotHpp1(sig.head_width));
        }
        for s in p.strategies() {
            self.registry.resolve(s)?;
        }
        let mut atoms: BTreeMap<Atom, Interval> = p.atoms().into_iter().map(|a| (a, Interval::unit())).collect();
        let mut pending: Vec<usize> = (0..p.len()).collect();
        let mut trace = FiringTrace::new(TraceScope::Atoms);

        for index in 0..2 * p.len() {
            let mut fired = Vec::new();
            let mut rest = Vec::new();
            for &ci in &pending {
                let c = &p.clauses()[ci];
                let mut holds = true;
                for b in &c.body {
                    if !b.annotation.contains(&value_of(&atoms, &self.registry, &b.formula)?) {
                        holds = false;
                        break;
                    }
                }
                if holds { fired.push(ci) } else { rest.push(ci) }
            }
            pending = rest;
            if fired.is_empty() {
                break;
            }
            let mut updates = Vec::new();
            for &ci in &fired {
                let c = &p.clauses()[ci];
                let a = &c.head.atoms()[0];
                let old = atoms[a].clone();
                let new = old.intersect(&c.head_annotation);
                if new != old {
                    updates.push(Update {
                        formula: c.head.clone(),
                        old,
                        new: new.clone(),
                        cause: UpdateCause::ProgramClause(ClauseId(ci + 1)),
                    });
                    atoms.insert(a.clone(), new);
                }
            }
            trace.iterations.push(Iteration {
                index,
                fired: fired.iter().map(|&ci| ClauseId(ci + 1)).collect(),
                updates,
            });
        }
        Ok((AtomFixpoint { atoms, registry: self.registry.clone() }, trace))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::StrategyId;

    #[test]
    fn empty_program_leaves_atoms_open() {
        let (fix, trace) = Engine::default().lfp1(&Program::default()).unwrap();
        assert_eq!(fix.atom(&Atom::prop("a")), Interval::unit());
        let f = BasicFormula::canonicalize(Some(StrategyId::conjunctive("inc")), vec![Atom::prop("a"), Atom::prop("b")])
            .unwrap();
        assert_eq!(fix.value(&f).unwrap(), Interval::unit());
        assert!(trace.iterations.is_empty());
    }

    #[test]
    fn rejects_compound_heads() {
        let f = BasicFormula::canonicalize(Some(StrategyId::conjunctive("inc")), vec![Atom::prop("a"), Atom::prop("b")])
            .unwrap();
        let p = Program::new(vec![crate::formula::Clause::fact(f, Interval::unit())]);
        assert_eq!(Engine::default().lfp1(&p).unwrap_err(), EngineError::NotHpp1(2));
    }
}
