use std::collections::BTreeSet;

use crate::formula::{BasicFormula, ClauseId, Program};
use crate::interval::Interval;
use crate::strategies::{compose2, max_interval, PStrategy, StrategyRegistry};

use super::table::{dense_size, FormulaTable, Universe, UNTAGGED};
use super::trace::{FiringTrace, Iteration, TraceScope, Update, UpdateCause};
use super::{classify, Engine, EngineError, Scope};

struct Compiled<'p> {
    id: ClauseId,
    head: usize,
    annotation: &'p Interval,
    body: Vec<(usize, &'p Interval)>,
}

fn compile<'p>(p: &'p Program, u: &Universe) -> Vec<Compiled<'p>> {
    let idx = |f: &BasicFormula| u.index_of(f).expect("universe covers every program formula");
    p.clause_ids()
        .zip(p.clauses())
        .map(|(id, c)| Compiled {
            id,
            head: idx(&c.head),
            annotation: &c.head_annotation,
            body: c.body.iter().map(|b| (idx(&b.formula), &b.annotation)).collect(),
        })
        .collect()
}

fn resolve_all<'r>(u: &Universe, registry: &'r StrategyRegistry) -> Result<Vec<&'r dyn PStrategy>, EngineError> {
    Ok(u.strategies.iter().map(|s| registry.resolve(s)).collect::<Result<Vec<_>, _>>()?)
}

struct Run<'a> {
    table: FormulaTable,
    strategies: Vec<&'a dyn PStrategy>,
    dirty: Vec<bool>,
    updates: Option<Vec<Update>>,
}

impl Run<'_> {
    fn set(&mut self, i: usize, with: &Interval, cause: impl FnOnce(&Universe) -> UpdateCause) {
        let old = &self.table.values[i];
        let new = old.intersect(with);
        if &new == old {
            return;
        }
        if let Some(log) = &mut self.updates {
            let u = &self.table.universe;
            log.push(Update { formula: u.formula(i), old: old.clone(), new: new.clone(), cause: cause(u) });
        }
        self.table.values[i] = new;
        for &p in &self.table.universe.parents[i] {
            self.dirty[p as usize] = true;
        }
    }

    fn fire(&mut self, c: &Compiled<'_>) -> Result<(), EngineError> {
        let id = c.id;
        self.set(c.head, c.annotation, |_| UpdateCause::ProgramClause(id));
        if let Some(s) = self.table.universe.strategy_of(c.head) {
            let md = max_interval(s.kind, c.annotation)?;
            let head = c.head;
            let parts: Vec<(u32, u32)> = self.table.universe.splits[head].clone();
            for (g, h) in parts {
                for part in [g, h] {
                    self.set(part as usize, &md, |u| UpdateCause::Decomposition { clause: id, head: u.formula(head) });
                }
            }
        }
        Ok(())
    }

    /// Composition closure in ascending width. Every parent of a changed
    /// entry has a larger index, so one pass reaches a closed table.
    fn close(&mut self, all: bool) -> Result<(), EngineError> {
        for i in 0..self.table.values.len() {
            if !(all || self.dirty[i]) {
                continue;
            }
            self.dirty[i] = false;
            let slot = self.table.universe.keys[i].slot;
            if slot == UNTAGGED {
                continue;
            }
            let s = self.strategies[slot as usize];
            for k in 0..self.table.universe.splits[i].len() {
                let (g, h) = self.table.universe.splits[i][k];
                let (x, y) = (&self.table.values[g as usize], &self.table.values[h as usize]);
                let c = if x.is_empty() || y.is_empty() { Interval::Empty } else { compose2(s, x, y)? };
                self.set(i, &c, |u| UpdateCause::Composition {
                    left: u.formula(g as usize),
                    right: u.formula(h as usize),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn run_lfp(
    p: &Program,
    universe: Universe,
    registry: &StrategyRegistry,
    record: bool,
) -> Result<(FormulaTable, FiringTrace), EngineError> {
    let strategies = resolve_all(&universe, registry)?;
    let n = universe.len();
    let mut run = Run { table: FormulaTable::new(universe), strategies, dirty: vec![false; n], updates: None };
    let clauses = compile(p, &run.table.universe);
    let mut pending: Vec<&Compiled<'_>> = clauses.iter().collect();
    let mut trace = FiringTrace::new(TraceScope::Formulas);

    for index in 0..2 * p.len() {
        let (fired, rest): (Vec<_>, Vec<_>) = pending
            .into_iter()
            .partition(|c| c.body.iter().all(|(f, mu)| mu.contains(&run.table.values[*f])));
        pending = rest;
        if fired.is_empty() {
            break;
        }
        run.updates = record.then(Vec::new);
        for c in &fired {
            run.fire(c)?;
        }
        run.close(false)?;
        trace.iterations.push(Iteration {
            index,
            fired: fired.iter().map(|c| c.id).collect(),
            updates: run.updates.take().unwrap_or_default(),
        });
    }
    Ok((run.table, trace))
}

/// One application of the immediate-consequence operator to `table`: every
/// clause whose body holds in `table` fires, then the whole table is closed
/// under composition. A least fixpoint is returned unchanged.
pub fn apply_tp(table: &FormulaTable, p: &Program, registry: &StrategyRegistry) -> Result<FormulaTable, EngineError> {
    let strategies = resolve_all(&table.universe, registry)?;
    let n = table.len();
    let mut run = Run { table: table.clone(), strategies, dirty: vec![false; n], updates: None };
    let clauses = compile(p, &table.universe);
    for c in &clauses {
        if c.body.iter().all(|(f, mu)| mu.contains(&table.values[*f])) {
            run.fire(c)?;
        }
    }
    run.close(true)?;
    Ok(run.table)
}

impl Engine {
    /// Least fixpoint on every formula of width at most `width_bound` over the
    /// program's atoms and strategies.
    pub fn lfp(&self, p: &Program, width_bound: usize) -> Result<(FormulaTable, FiringTrace), EngineError> {
        self.lfp_in_scope(p, width_bound, &Scope::new())
    }

    /// As [`Engine::lfp`], with the table widened to `scope`.
    pub fn lfp_in_scope(
        &self,
        p: &Program,
        width_bound: usize,
        scope: &Scope,
    ) -> Result<(FormulaTable, FiringTrace), EngineError> {
        let sig = classify(p);
        let required = sig.head_width.max(sig.body_width);
        if width_bound < required || width_bound == 0 {
            return Err(EngineError::WidthBoundTooSmall { given: width_bound, required: required.max(1) });
        }
        let mut atoms = p.atoms();
        atoms.extend(scope.atoms.iter().cloned());
        let mut strategies: BTreeSet<_> = p.strategies().clone();
        strategies.extend(scope.strategies.iter().cloned());
        self.check_size(dense_size(atoms.len(), atoms.len(), strategies.len(), width_bound))?;
        let dense = atoms.clone();
        let universe = Universe::build(atoms, strategies, &dense, width_bound, &[]);
        run_lfp(p, universe, &self.registry, true)
    }

    pub(crate) fn check_size(&self, entries: u128) -> Result<(), EngineError> {
        if entries > self.limits.table_cap as u128 {
            return Err(EngineError::WidthExplosion { entries, cap: self.limits.table_cap });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Atom, StrategyId};
    use crate::syntax::{ground, parse_program, GroundOptions};

    fn program(src: &str) -> Program {
        ground(&parse_program(src, &StrategyRegistry::builtin()).unwrap(), GroundOptions::default()).unwrap()
    }

    fn f(strategy: &str, atoms: &[&str]) -> BasicFormula {
        let atoms: Vec<Atom> = atoms.iter().map(|a| Atom::prop(*a)).collect();
        if atoms.len() == 1 {
            return BasicFormula::atom(atoms.into_iter().next().unwrap());
        }
        let reg = StrategyRegistry::builtin();
        let id = reg.lookup(strategy).unwrap().id().clone();
        BasicFormula::canonicalize(Some(id), atoms).unwrap()
    }

    #[test]
    fn pcc_composition_of_two_facts() {
        let p = program("p : [2/5,3/5].  q : [3/10,1/2].");
        let scope = Scope::new().with_strategy(StrategyId::conjunctive("pcc"));
        let (t, _) = Engine::default().lfp_in_scope(&p, 2, &scope).unwrap();
        assert_eq!(t.get(&f("pcc", &["p", "q"])), Some(&Interval::ratio((3, 10), (1, 2))));
    }

    #[test]
    fn head_decomposes_onto_atoms() {
        let p = program("(a &igc b) : [3/10,2/5].");
        let (t, trace) = Engine::default().lfp(&p, 2).unwrap();
        assert_eq!(t.get(&f("", &["a"])), Some(&Interval::ratio((3, 10), (1, 1))));
        assert_eq!(t.get(&f("", &["b"])), Some(&Interval::ratio((3, 10), (1, 1))));
        assert_eq!(t.get(&f("igc", &["a", "b"])), Some(&Interval::ratio((3, 10), (2, 5))));
        assert_eq!(trace.iterations.len(), 1);
    }

    #[test]
    fn clashing_facts_empty_the_atom() {
        let p = program("a : [0,0].  a : [1,1].");
        let (t, _) = Engine::default().lfp(&p, 1).unwrap();
        assert_eq!(t.get(&f("", &["a"])), Some(&Interval::Empty));
        assert!(!t.is_fully_defined());
    }

    #[test]
    fn width_bound_is_checked() {
        let p = program("(a &inc b &inc c) : [1,1].");
        assert_eq!(
            Engine::default().lfp(&p, 2).unwrap_err(),
            EngineError::WidthBoundTooSmall { given: 2, required: 3 }
        );
    }

    #[test]
    fn rules_fire_once_in_order() {
        let p = program("p : [1,1].  q : [1/2,1] <- p : [1,1].  r : [1/2,1/2] <- q : [1/2,1].");
        let (t, trace) = Engine::default().lfp(&p, 1).unwrap();
        assert_eq!(t.get(&f("", &["r"])), Some(&Interval::ratio((1, 2), (1, 2))));
        let fired: Vec<Vec<usize>> =
            trace.iterations.iter().map(|it| it.fired.iter().map(|c| c.0).collect()).collect();
        assert_eq!(fired, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(apply_tp(&t, &p, &StrategyRegistry::builtin()).unwrap(), t);
    }

    #[test]
    fn empty_program_is_unconstrained() {
        let p = Program::default();
        let scope = Scope::new().with_atom(Atom::prop("a"));
        let (t, trace) = Engine::default().lfp_in_scope(&p, 1, &scope).unwrap();
        assert_eq!(t.get(&f("", &["a"])), Some(&Interval::unit()));
        assert!(trace.iterations.is_empty());
    }
}
