//! Fixpoint evaluation, entailment and consistency.
//!
//! The least fixpoint `h_P` of a program is computed on a finite
//! [`FormulaTable`]. Programs whose heads are all atoms take a cheaper path
//! ([`Engine::lfp1`]) that only tracks atoms and composes compound formulas on
//! demand.

mod consistency;
mod entail;
mod lfp;
mod lfp1;
mod table;
mod trace;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{Atom, BasicFormula, Program, StrategyId};
use crate::strategies::{StrategyError, StrategyRegistry};

pub use consistency::{ConsistencyVerdict, InConCertificate};
pub use entail::EntailmentVerdict;
pub use lfp::apply_tp;
pub use lfp1::AtomFixpoint;
pub use table::FormulaTable;
pub use trace::{FiringTrace, Iteration, TraceScope, Update, UpdateCause};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("width bound {given} is below max(head width, body width) = {required}")]
    WidthBoundTooSmall { given: usize, required: usize },
    #[error("program has head width {0}; the atom-only evaluator needs head width at most 1")]
    NotHpp1(usize),
    #[error("program is inconsistent{}", witness.as_ref().map(|w| format!(" (witness {w})")).unwrap_or_default())]
    InconsistentProgram { witness: Option<BasicFormula> },
    #[error("formula table would hold {entries} entries, above the cap of {cap}")]
    WidthExplosion { entries: u128, cap: usize },
    #[error("program has rules; only fact-only programs are accepted here")]
    NonFactProgram,
    #[error("{atoms} head atoms exceed the consistency cap of {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Widths and counts that place a program in the class hierarchy `HPP_{k,r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassSignature {
    /// `k`, the largest head width.
    pub head_width: usize,
    /// `r`, the largest body formula width; 0 for fact-only programs.
    pub body_width: usize,
    /// `m`
    pub clauses: usize,
    /// `a`
    pub atoms: usize,
    /// `s`
    pub strategies: usize,
}

impl ClassSignature {
    pub fn is_hpp1(&self) -> bool {
        self.head_width <= 1
    }
}

pub fn classify(p: &Program) -> ClassSignature {
    let head_width = p.clauses().iter().map(|c| c.head.width()).max().unwrap_or(0);
    let body_width = p.clauses().iter().flat_map(|c| c.body.iter()).map(|b| b.formula.width()).max().unwrap_or(0);
    ClassSignature {
        head_width,
        body_width,
        clauses: p.len(),
        atoms: p.atoms().len(),
        strategies: p.strategies().len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of head atoms `consistent` will expand.
    pub atom_cap: usize,
    /// Largest formula table any evaluation may allocate.
    pub table_cap: usize,
}

pub const DEFAULT_ATOM_CAP: usize = 12;
pub const DEFAULT_TABLE_CAP: usize = 400_000;

impl Default for Limits {
    fn default() -> Self {
        Limits { atom_cap: DEFAULT_ATOM_CAP, table_cap: DEFAULT_TABLE_CAP }
    }
}

/// Extra atoms and strategies a table should cover beyond the program's own.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub atoms: BTreeSet<Atom>,
    pub strategies: BTreeSet<StrategyId>,
}

impl Scope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_strategy(mut self, s: StrategyId) -> Self {
        self.strategies.insert(s);
        self
    }

    pub fn with_atom(mut self, a: Atom) -> Self {
        self.atoms.insert(a);
        self
    }

    /// Atoms and strategy of `f`.
    pub fn with_formula(mut self, f: &BasicFormula) -> Self {
        self.atoms.extend(f.atoms().iter().cloned());
        self.strategies.extend(f.strategy().cloned());
        self
    }
}

/// Evaluator over a fixed strategy registry.
#[derive(Debug, Clone, Default)]
pub struct Engine {
    registry: StrategyRegistry,
    limits: Limits,
}

impl Engine {
    pub fn new(registry: StrategyRegistry) -> Self {
        Engine { registry, limits: Limits::default() }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn registry(&self) -> &StrategyRegistry {
        &self.registry
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }
}
