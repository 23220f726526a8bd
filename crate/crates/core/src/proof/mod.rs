//! Derivations in the HGR_P proof system, an independent checker, and a
//! generator that turns firing traces into short derivations.

mod check;
mod generate;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::engine::EngineError;
use crate::formula::{AnnotatedFormula, ClauseId, StrategyId};
use crate::interval::Interval;

pub use check::{check_derivation, check_derivation_for, CheckError};
pub use generate::generate_proof;
pub use text::parse_derivation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    /// `A : [0,1]`
    Axiom,
    /// A clause of the program, from premises matching its body exactly.
    Program,
    /// Composition of two atoms.
    AComposition,
    /// Composition of two disjoint formulas, at least one compound.
    FComposition,
    /// A proper subformula receives the max-interval of the whole.
    Decomposition,
    /// Intersection of two annotations of the same formula.
    Clarification,
    /// Reordering of atoms; identity on canonical formulas.
    Exchange,
    IntervalWeakening,
}

impl RuleTag {
    pub const ALL: [RuleTag; 8] = [
        RuleTag::Axiom,
        RuleTag::Program,
        RuleTag::AComposition,
        RuleTag::FComposition,
        RuleTag::Decomposition,
        RuleTag::Clarification,
        RuleTag::Exchange,
        RuleTag::IntervalWeakening,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleTag::Axiom => "Axiom",
            RuleTag::Program => "Program",
            RuleTag::AComposition => "AComposition",
            RuleTag::FComposition => "FComposition",
            RuleTag::Decomposition => "Decomposition",
            RuleTag::Clarification => "Clarification",
            RuleTag::Exchange => "Exchange",
            RuleTag::IntervalWeakening => "IntervalWeakening",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleTag> {
        RuleTag::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleData {
    None,
    Clause(ClauseId),
    Strategy(StrategyId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    /// 1-based position in the derivation.
    pub index: usize,
    pub conclusion: AnnotatedFormula,
    pub rule: RuleTag,
    /// Indices of earlier steps.
    pub premises: Vec<usize>,
    pub data: RuleData,
}

/// A numbered sequence of steps; the last conclusion is the result.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStats {
    pub length: usize,
    pub histogram: BTreeMap<RuleTag, usize>,
}

impl Derivation {
    pub fn result(&self) -> Option<&AnnotatedFormula> {
        self.steps.last().map(|s| &s.conclusion)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn stats(&self) -> ProofStats {
        let mut histogram = BTreeMap::new();
        for s in &self.steps {
            *histogram.entry(s.rule).or_insert(0) += 1;
        }
        ProofStats { length: self.steps.len(), histogram }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("query is not entailed: computed {computed}")]
    NotEntailed { computed: Interval },
    #[error("program is inconsistent")]
    InconsistentProgram,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        write!(f, "{}. {}  {}({})", self.index, self.conclusion, self.rule, premises.join(","))?;
        match &self.data {
            RuleData::None => Ok(()),
            RuleData::Clause(c) => write!(f, " clause={c}"),
            RuleData::Strategy(s) => write!(f, " strat={}", s.name),
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
