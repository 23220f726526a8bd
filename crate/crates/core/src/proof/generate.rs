use std::collections::{BTreeMap, HashMap};

use crate::engine::{Engine, FiringTrace, TraceScope, UpdateCause};
use crate::formula::{AnnotatedFormula, BasicFormula, ClauseId, Program};
use crate::interval::Interval;
use crate::strategies::{compose2, max_interval, StrategyRegistry};

use super::{Derivation, ProofError, ProofStep, RuleData, RuleTag};

struct Builder<'a> {
    program: &'a Program,
    registry: &'a StrategyRegistry,
    scope: TraceScope,
    steps: Vec<ProofStep>,
    known: HashMap<AnnotatedFormula, usize>,
    /// Step holding the tightest annotation derived so far for a formula.
    current: HashMap<BasicFormula, usize>,
    fired: BTreeMap<ClauseId, usize>,
}

impl Builder<'_> {
    fn value(&self, step: usize) -> &Interval {
        &self.steps[step].conclusion.annotation
    }

    fn add(&mut self, conclusion: AnnotatedFormula, rule: RuleTag, premises: Vec<usize>, data: RuleData) -> usize {
        if let Some(&i) = self.known.get(&conclusion) {
            return i;
        }
        let i = self.steps.len();
        self.steps.push(ProofStep { index: i + 1, conclusion: conclusion.clone(), rule, premises, data });
        self.known.insert(conclusion, i);
        i
    }

    fn compose(&mut self, f: &BasicFormula, left: usize, right: usize) -> Result<usize, ProofError> {
        let strat = f.strategy().expect("compound formula").clone();
        let s = self.registry.resolve(&strat).map_err(crate::engine::EngineError::from)?;
        let v = compose2(s, self.value(left), self.value(right)).map_err(|_| ProofError::InconsistentProgram)?;
        let atomic = self.steps[left].conclusion.formula.is_atomic() && self.steps[right].conclusion.formula.is_atomic();
        let rule = if atomic { RuleTag::AComposition } else { RuleTag::FComposition };
        Ok(self.add(AnnotatedFormula::new(f.clone(), v), rule, vec![left, right], RuleData::Strategy(strat)))
    }

    /// Step for the current value of `f`, derived on demand when nothing has
    /// been recorded for it.
    fn current_step(&mut self, f: &BasicFormula) -> Result<usize, ProofError> {
        let tracked = f.is_atomic() || self.scope == TraceScope::Formulas;
        if tracked {
            if let Some(&i) = self.current.get(f) {
                return Ok(i);
            }
        }
        let i = if f.is_atomic() {
            self.add(AnnotatedFormula::new(f.clone(), Interval::unit()), RuleTag::Axiom, vec![], RuleData::None)
        } else {
            let strat = f.strategy().expect("compound formula");
            let (first, rest) = f.atoms().split_first().expect("nonempty");
            let head = BasicFormula::atom(first.clone());
            let tail = BasicFormula::with_strategy_if_compound(strat, rest.to_vec()).expect("distinct atoms");
            let l = self.current_step(&head)?;
            let r = self.current_step(&tail)?;
            self.compose(f, l, r)?
        };
        if tracked {
            self.current.insert(f.clone(), i);
        }
        Ok(i)
    }

    /// Narrows the current value of `f` with the conclusion of step `via`.
    fn refine(&mut self, f: &BasicFormula, via: usize) -> Result<(), ProofError> {
        let Some(&cur) = self.current.get(f) else {
            self.current.insert(f.clone(), via);
            return Ok(());
        };
        let v = self.value(cur).intersect(self.value(via));
        if v.is_empty() {
            return Err(ProofError::InconsistentProgram);
        }
        let next = if &v == self.value(cur) {
            cur
        } else if &v == self.value(via) {
            via
        } else {
            self.add(AnnotatedFormula::new(f.clone(), v), RuleTag::Clarification, vec![cur, via], RuleData::None)
        };
        self.current.insert(f.clone(), next);
        Ok(())
    }

    fn weaken_to(&mut self, step: usize, target: &Interval) -> usize {
        if self.value(step) == target {
            return step;
        }
        let f = self.steps[step].conclusion.formula.clone();
        self.add(AnnotatedFormula::new(f, target.clone()), RuleTag::IntervalWeakening, vec![step], RuleData::None)
    }

    fn program_step(&mut self, id: ClauseId) -> Result<usize, ProofError> {
        let clause = self.program.clause(id).expect("trace cites program clauses");
        let mut premises = Vec::with_capacity(clause.body.len());
        for b in &clause.body {
            let s = self.current_step(&b.formula)?;
            if !b.annotation.contains(self.value(s)) {
                return Err(ProofError::InconsistentProgram);
            }
            premises.push(self.weaken_to(s, &b.annotation));
        }
        let conclusion = AnnotatedFormula::new(clause.head.clone(), clause.head_annotation.clone());
        Ok(self.add(conclusion, RuleTag::Program, premises, RuleData::Clause(id)))
    }

    /// Keeps only the steps `last` depends on, renumbered in order.
    fn prune(self, last: usize) -> Derivation {
        let mut keep = vec![false; self.steps.len()];
        let mut stack = vec![last];
        while let Some(i) = stack.pop() {
            if !keep[i] {
                keep[i] = true;
                stack.extend(self.steps[i].premises.iter().copied());
            }
        }
        let mut renumber = vec![0usize; self.steps.len()];
        let mut out = Vec::new();
        for (i, mut s) in self.steps.into_iter().enumerate() {
            if !keep[i] {
                continue;
            }
            renumber[i] = out.len() + 1;
            s.index = out.len() + 1;
            s.premises = s.premises.iter().map(|&q| renumber[q]).collect();
            out.push(s);
        }
        Derivation { steps: out }
    }
}

/// Replays `trace` as a derivation of `goal`.
///
/// Fired clauses become Program steps, max-interval updates become
/// Decomposition steps and closure updates become compositions, each
/// followed by a Clarification when it narrows an existing annotation. A
/// final weakening reaches the goal's annotation.
pub fn generate_proof(
    p: &Program,
    registry: &StrategyRegistry,
    trace: &FiringTrace,
    goal: &AnnotatedFormula,
) -> Result<Derivation, ProofError> {
    let mut b = Builder {
        program: p,
        registry,
        scope: trace.scope,
        steps: Vec::new(),
        known: HashMap::new(),
        current: HashMap::new(),
        fired: BTreeMap::new(),
    };
    if goal.formula.is_atomic() && goal.annotation == Interval::unit() {
        let last = b.current_step(&goal.formula)?;
        return Ok(b.prune(last));
    }
    for it in &trace.iterations {
        for &id in &it.fired {
            let s = b.program_step(id)?;
            b.fired.insert(id, s);
        }
        for u in &it.updates {
            let via = match &u.cause {
                UpdateCause::ProgramClause(id) => b.fired[id],
                UpdateCause::Decomposition { clause, head } => {
                    let whole = b.fired[clause];
                    let strat = head.strategy().expect("compound head").clone();
                    let md = max_interval(strat.kind, b.value(whole)).map_err(|_| ProofError::InconsistentProgram)?;
                    b.add(
                        AnnotatedFormula::new(u.formula.clone(), md),
                        RuleTag::Decomposition,
                        vec![whole],
                        RuleData::Strategy(strat),
                    )
                }
                UpdateCause::Composition { left, right } => {
                    let l = b.current_step(left)?;
                    let r = b.current_step(right)?;
                    b.compose(&u.formula, l, r)?
                }
            };
            b.refine(&u.formula, via)?;
            debug_assert_eq!(b.value(b.current[&u.formula]), &u.new, "replay diverged on {}", u.formula);
        }
    }
    let s = b.current_step(&goal.formula)?;
    if !goal.annotation.contains(b.value(s)) {
        return Err(ProofError::NotEntailed { computed: b.value(s).clone() });
    }
    let last = b.weaken_to(s, &goal.annotation);
    Ok(b.prune(last))
}

impl Engine {
    /// Derivation of `goal` from a consistent program that entails it.
    pub fn prove(&self, p: &Program, goal: &AnnotatedFormula) -> Result<Derivation, ProofError> {
        let verdict = match self.entails(p, goal) {
            Err(crate::engine::EngineError::InconsistentProgram { .. }) => return Err(ProofError::InconsistentProgram),
            other => other?,
        };
        if !verdict.entailed {
            return Err(ProofError::NotEntailed { computed: verdict.computed });
        }
        generate_proof(p, self.registry(), &verdict.trace, goal)
    }
}
