//! Naive Herbrand instantiation of source programs.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{AnnotatedFormula, Atom, BasicFormula, Clause, FormulaError, Program};

use super::{SourceClause, SourceFormula, SourceProgram, SourceTerm};

pub const DEFAULT_INSTANCE_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundOptions {
    /// Upper bound on raw substitutions tried across the whole program.
    pub instance_cap: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { instance_cap: DEFAULT_INSTANCE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("clause {clause}: variable {variable} occurs only in `!=` constraints")]
    RangeRestriction { clause: usize, variable: String },
    #[error("grounding needs {needed} instances, above the cap of {cap}")]
    Explosion { needed: u128, cap: usize },
}

type Subst<'a> = HashMap<&'a str, &'a str>;

fn resolve<'a>(t: &'a SourceTerm, s: &Subst<'a>) -> &'a str {
    match t {
        SourceTerm::Constant(c) => c,
        SourceTerm::Variable(v) => s[v.as_str()],
    }
}

/// `None` when the substitution makes two atoms of the formula coincide.
fn instantiate(f: &SourceFormula, s: &Subst<'_>) -> Option<BasicFormula> {
    let atoms: Vec<Atom> = f
        .atoms
        .iter()
        .map(|a| Atom::new(a.predicate.clone(), a.args.iter().map(|t| resolve(t, s).to_string())))
        .collect();
    match BasicFormula::canonicalize(f.strategy.clone(), atoms) {
        Ok(b) => Some(b),
        Err(FormulaError::DuplicateAtom(_)) => None,
        Err(e) => unreachable!("parser produced an ill-formed formula: {e}"),
    }
}

fn instantiate_clause(c: &SourceClause, s: &Subst<'_>) -> Option<Clause> {
    for k in &c.constraints {
        if s[k.var.as_str()] == resolve(&k.other, s) {
            return None;
        }
    }
    let head = instantiate(&c.head, s)?;
    let body = c
        .body
        .iter()
        .map(|b| instantiate(&b.formula, s).map(|f| AnnotatedFormula::new(f, b.annotation.clone())))
        .collect::<Option<Vec<_>>>()?;
    Some(Clause::rule(head, c.head_annotation.clone(), body))
}

/// Replaces every clause by all of its instances over the program's constants.
///
/// Instances that violate a `!=` constraint, or that would repeat an atom
/// inside one basic formula, are dropped.
pub fn ground(sp: &SourceProgram, opts: GroundOptions) -> Result<Program, GroundError> {
    let constants: Vec<String> = sp.constants().into_iter().collect();

    let mut plans = Vec::with_capacity(sp.clauses.len());
    let mut needed: u128 = 0;
    for (i, c) in sp.clauses.iter().enumerate() {
        let vars = c.variables();
        let anchored: Vec<&str> = std::iter::once(&c.head)
            .chain(c.body.iter().map(|b| &b.formula))
            .flat_map(|f| f.variables())
            .collect();
        if let Some(v) = vars.iter().find(|v| !anchored.contains(&v.as_str())) {
            return Err(GroundError::RangeRestriction { clause: i + 1, variable: v.clone() });
        }
        let count = (constants.len() as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
        needed = needed.saturating_add(count);
        plans.push(vars);
    }
    if needed > opts.instance_cap as u128 {
        return Err(GroundError::Explosion { needed, cap: opts.instance_cap });
    }

    let mut clauses = Vec::new();
    for (c, vars) in sp.clauses.iter().zip(&plans) {
        if vars.is_empty() {
            clauses.extend(instantiate_clause(c, &Subst::new()));
            continue;
        }
        if constants.is_empty() {
            continue;
        }
        let mut digits = vec![0usize; vars.len()];
        'odometer: loop {
            let s: Subst<'_> =
                vars.iter().zip(&digits).map(|(v, &d)| (v.as_str(), constants[d].as_str())).collect();
            clauses.extend(instantiate_clause(c, &s));
            // last variable varies fastest
            let mut k = digits.len();
            loop {
                if k == 0 {
                    break 'odometer;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < constants.len() {
                    break;
                }
                digits[k] = 0;
            }
        }
    }
    Ok(Program::new(clauses))
}
