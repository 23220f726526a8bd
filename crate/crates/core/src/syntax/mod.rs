//! Concrete syntax for hybrid probabilistic programs.
//!
//! ```text
//! clause   := formula ":" interval ( "<-" item ( "," item )* )? "."
//! item     := formula ":" interval | Var "!=" term
//! formula  := unit ( connective unit )*
//! unit     := atom | "(" formula ")"
//! connective := "&" name | "|" name
//! interval := "[" rational "," rational "]"
//! ```
//!
//! `&` introduces a conjunctive strategy and `|` a disjunctive one. Rationals
//! are integers, decimals or `p/q` fractions and are kept exact. Comments run
//! from `%` to the end of the line.

mod ground;
mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{FormulaError, StrategyId, StrategyKind};
use crate::interval::Interval;

pub use ground::{ground, GroundError, GroundOptions, DEFAULT_INSTANCE_CAP};
pub use parser::{parse_program, parse_query};
pub(crate) use lexer::Tok;
pub(crate) use parser::Parser;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: expected {expected}, found {found}")]
    Syntax { pos: Position, expected: String, found: String },
    #[error("{pos}: annotation out of range: {detail}")]
    AnnotationRange { pos: Position, detail: String },
    #[error("{pos}: unknown strategy `{name}`")]
    UnknownStrategy { pos: Position, name: String },
    #[error("{pos}: strategy `{name}` is {actual:?} and cannot be used with `{connective}`")]
    ConnectiveKind { pos: Position, name: String, connective: char, actual: StrategyKind },
    #[error("{pos}: a basic formula may use only one connective and strategy")]
    MixedConnective { pos: Position },
    #[error("{pos}: {source}")]
    Formula { pos: Position, source: FormulaError },
    #[error("query must be ground, found variables {0:?}")]
    NonGroundQuery(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceTerm {
    Constant(String),
    Variable(String),
}

impl fmt::Display for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceTerm::Constant(c) | SourceTerm::Variable(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceAtom {
    pub predicate: String,
    pub args: Vec<SourceTerm>,
}

impl fmt::Display for SourceAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

/// A basic formula that may still contain variables. Atoms keep source order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceFormula {
    pub strategy: Option<StrategyId>,
    pub atoms: Vec<SourceAtom>,
}

impl SourceFormula {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().flat_map(|a| a.args.iter()).filter_map(|t| match t {
            SourceTerm::Variable(v) => Some(v.as_str()),
            SourceTerm::Constant(_) => None,
        })
    }

    pub fn is_ground(&self) -> bool {
        self.variables().next().is_none()
    }
}

impl fmt::Display for SourceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.strategy {
            None => write!(f, "{}", self.atoms[0]),
            Some(s) => {
                let sep = format!(" {}{} ", s.kind.connective(), s.name);
                let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
                write!(f, "({})", parts.join(&sep))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceAnnotated {
    pub formula: SourceFormula,
    pub annotation: Interval,
}

/// `var != other`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub var: String,
    pub other: SourceTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceClause {
    pub head: SourceFormula,
    pub head_annotation: Interval,
    pub body: Vec<SourceAnnotated>,
    pub constraints: Vec<Constraint>,
}

impl SourceClause {
    /// Distinct variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        let formulas = std::iter::once(&self.head).chain(self.body.iter().map(|b| &b.formula));
        let from_formulas = formulas.flat_map(|f| f.variables().map(str::to_string));
        let from_constraints = self.constraints.iter().flat_map(|c| {
            let other = match &c.other {
                SourceTerm::Variable(v) => Some(v.clone()),
                SourceTerm::Constant(_) => None,
            };
            std::iter::once(c.var.clone()).chain(other)
        });
        for v in from_formulas.chain(from_constraints) {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }
}

impl fmt::Display for SourceClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.head, self.head_annotation)?;
        let mut items: Vec<String> =
            self.body.iter().map(|b| format!("{} : {}", b.formula, b.annotation)).collect();
        items.extend(self.constraints.iter().map(|c| format!("{} != {}", c.var, c.other)));
        if !items.is_empty() {
            write!(f, " <- {}", items.join(", "))?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceProgram {
    pub clauses: Vec<SourceClause>,
}

impl SourceProgram {
    /// Every constant occurring in an atom argument or constraint.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            let formulas = std::iter::once(&c.head).chain(c.body.iter().map(|b| &b.formula));
            for t in formulas.flat_map(|f| f.atoms.iter().flat_map(|a| a.args.iter())) {
                if let SourceTerm::Constant(k) = t {
                    out.insert(k.clone());
                }
            }
            for k in &c.constraints {
                if let SourceTerm::Constant(x) = &k.other {
                    out.insert(x.clone());
                }
            }
        }
        out
    }
}

impl From<&crate::formula::Program> for SourceProgram {
    fn from(p: &crate::formula::Program) -> Self {
        use crate::formula::BasicFormula;
        let conv = |f: &BasicFormula| SourceFormula {
            strategy: f.strategy().cloned(),
            atoms: f
                .atoms()
                .iter()
                .map(|a| SourceAtom {
                    predicate: a.predicate.clone(),
                    args: a.args.iter().cloned().map(SourceTerm::Constant).collect(),
                })
                .collect(),
        };
        SourceProgram {
            clauses: p
                .clauses()
                .iter()
                .map(|c| SourceClause {
                    head: conv(&c.head),
                    head_annotation: c.head_annotation.clone(),
                    body: c
                        .body
                        .iter()
                        .map(|b| SourceAnnotated { formula: conv(&b.formula), annotation: b.annotation.clone() })
                        .collect(),
                    constraints: Vec::new(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for SourceProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
