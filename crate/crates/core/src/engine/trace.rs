use std::collections::BTreeSet;
use std::fmt;

use crate::formula::{BasicFormula, ClauseId};
use crate::interval::Interval;

/// Why an entry shrank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateCause {
    /// The entry is the head of a fired clause.
    ProgramClause(ClauseId),
    /// The entry is a proper subformula of a fired clause's head.
    Decomposition { clause: ClauseId, head: BasicFormula },
    /// The entry was intersected with the composition of one of its splits.
    Composition { left: BasicFormula, right: BasicFormula },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    pub formula: BasicFormula,
    pub old: Interval,
    pub new: Interval,
    pub cause: UpdateCause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iteration {
    pub index: usize,
    pub fired: BTreeSet<ClauseId>,
    /// Strict changes in the order they were applied.
    pub updates: Vec<Update>,
}

/// What the recorded updates cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceScope {
    /// Every table entry, including composition closure.
    Formulas,
    /// Atoms only; compound values are compositions of current atom values.
    Atoms,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringTrace {
    pub scope: TraceScope,
    pub iterations: Vec<Iteration>,
}

impl FiringTrace {
    pub(crate) fn new(scope: TraceScope) -> Self {
        FiringTrace { scope, iterations: Vec::new() }
    }

    pub fn fired(&self) -> impl Iterator<Item = ClauseId> + '_ {
        self.iterations.iter().flat_map(|it| it.fired.iter().copied())
    }

    pub fn update_count(&self) -> usize {
        self.iterations.iter().map(|it| it.updates.len()).sum()
    }
}

impl fmt::Display for UpdateCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateCause::ProgramClause(c) => write!(f, "clause {c}"),
            UpdateCause::Decomposition { clause, head } => write!(f, "md of clause {clause} head {head}"),
            UpdateCause::Composition { left, right } => write!(f, "composition of {left} and {right}"),
        }
    }
}

impl fmt::Display for FiringTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for it in &self.iterations {
            let fired: Vec<String> = it.fired.iter().map(|c| c.to_string()).collect();
            writeln!(f, "iteration {} fired {{{}}}", it.index, fired.join(","))?;
            for u in &it.updates {
                writeln!(f, "  {} : {} -> {} by {}", u.formula, u.old, u.new, u.cause)?;
            }
        }
        Ok(())
    }
}
