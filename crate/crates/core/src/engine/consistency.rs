use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Atom, BasicFormula, Program, StrategyId};
use crate::interval::Interval;
use crate::rational::Rational;
use crate::strategies::{clamp_unit, compose};

use super::lfp::run_lfp;
use super::table::{dense_size, Universe};
use super::{classify, Engine, EngineError, Scope};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyVerdict {
    pub consistent: bool,
    /// A minimal-width formula whose least-fixpoint value is empty.
    pub witness: Option<BasicFormula>,
    /// Value of the formula joining every head atom, one per program strategy.
    pub full_width_values: BTreeMap<StrategyId, Interval>,
    /// Every evaluated entry is nonempty.
    pub all_entries_nonempty: bool,
    /// Every value in `full_width_values` is nonempty.
    pub full_width_nonempty: bool,
}

/// A claim that `formula`'s probability is squeezed below its own lower
/// bound: each `upper_parts` entry `(G, x)` asserts `P |= G : [0,x]`, each
/// `lower_parts` entry `(H, y)` asserts `P |= H : [y,1]`, and the composed
/// lower bound of the `y`s exceeds the composed upper bound of the `x`s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InConCertificate {
    pub formula: BasicFormula,
    pub upper_parts: Vec<(BasicFormula, Rational)>,
    pub lower_parts: Vec<(BasicFormula, Rational)>,
}

impl Engine {
    /// Decides consistency from the least fixpoint.
    ///
    /// Atom-headed programs are checked on their atoms. Other programs are
    /// evaluated on every formula over head atoms, plus the subformulas of
    /// rule bodies; formulas mentioning an atom that heads no clause keep a
    /// `[0,1]` factor and cannot become empty.
    pub fn consistent(&self, p: &Program) -> Result<ConsistencyVerdict, EngineError> {
        let head_atoms: Vec<Atom> = p.head_atoms().into_iter().collect();
        let sig = classify(p);
        let (witness, full_width_values) = if sig.is_hpp1() {
            let (fix, _) = self.lfp1(p)?;
            let witness = fix.atoms().iter().find(|(_, v)| v.is_empty()).map(|(a, _)| BasicFormula::atom(a.clone()));
            let mut full = BTreeMap::new();
            // Without compound formulas any strategy joins the atoms; an
            // empty atom empties the join under each of them.
            let fallback: BTreeSet<StrategyId> = self.registry.iter().take(1).map(|s| s.id().clone()).collect();
            let strategies = if p.strategies().is_empty() { &fallback } else { p.strategies() };
            for s in strategies {
                let values: Vec<Interval> = head_atoms.iter().map(|a| fix.atom(a)).collect();
                let v = if values.is_empty() {
                    continue;
                } else if values.iter().any(Interval::is_empty) {
                    Interval::Empty
                } else {
                    compose(self.registry.resolve(s)?, &values)?
                };
                full.insert(s.clone(), v);
            }
            (witness, full)
        } else {
            if head_atoms.len() > self.limits.atom_cap {
                return Err(EngineError::TooManyAtoms { atoms: head_atoms.len(), cap: self.limits.atom_cap });
            }
            let n = head_atoms.len();
            let strategies = p.strategies().clone();
            self.check_size(dense_size(p.atoms().len(), n, strategies.len(), n))?;
            let bodies: Vec<&BasicFormula> = p.clauses().iter().flat_map(|c| c.body.iter().map(|b| &b.formula)).collect();
            let dense: BTreeSet<Atom> = head_atoms.iter().cloned().collect();
            let universe = Universe::build(p.atoms(), strategies, &dense, n, &bodies);
            let (table, _) = run_lfp(p, universe, &self.registry, false)?;
            let mut full = BTreeMap::new();
            for s in p.strategies() {
                let f = BasicFormula::with_strategy_if_compound(s, head_atoms.clone()).expect("distinct head atoms");
                full.insert(s.clone(), table.get(&f).expect("full-width formula in universe").clone());
            }
            (table.first_empty(), full)
        };
        let all_entries_nonempty = witness.is_none();
        let full_width_nonempty = full_width_values.values().all(|v| !v.is_empty());
        Ok(ConsistencyVerdict {
            consistent: all_entries_nonempty,
            witness,
            full_width_values,
            all_entries_nonempty,
            full_width_nonempty,
        })
    }

    /// Least-fixpoint values of `formulas`, without a consistency check.
    pub fn values_unchecked(&self, p: &Program, formulas: &[&BasicFormula]) -> Result<Vec<Interval>, EngineError> {
        let sig = classify(p);
        if sig.is_hpp1() {
            let (fix, _) = self.lfp1(p)?;
            return formulas.iter().map(|f| fix.value(f)).collect();
        }
        let mut scope = Scope::new();
        for f in formulas {
            scope = scope.with_formula(f);
        }
        let n = formulas.iter().map(|f| f.width()).chain([sig.head_width, sig.body_width]).max().unwrap_or(1);
        let (table, _) = self.lfp_in_scope(p, n, &scope)?;
        Ok(formulas.iter().map(|f| table.get(f).expect("formula in scope").clone()).collect())
    }

    /// True when the certificate proves `p` inconsistent.
    pub fn check_incon_certificate(&self, p: &Program, cert: &InConCertificate) -> Result<bool, EngineError> {
        let f = &cert.formula;
        for (name, parts) in [("upper", &cert.upper_parts), ("lower", &cert.lower_parts)] {
            let mut covered: Vec<&Atom> = Vec::new();
            for (g, bound) in parts {
                if !bound.is_probability() {
                    return Err(EngineError::MalformedCertificate(format!("{name} bound {bound} is outside [0,1]")));
                }
                if !f.includes_atoms_of(g) || (!g.is_atomic() && g.strategy() != f.strategy()) {
                    return Err(EngineError::MalformedCertificate(format!("{g} is not a subformula of {f}")));
                }
                covered.extend(g.atoms());
            }
            covered.sort();
            if covered.len() != f.width() || covered.windows(2).any(|w| w[0] == w[1]) {
                return Err(EngineError::MalformedCertificate(format!("{name} parts do not partition {f}")));
            }
        }

        let formulas: Vec<&BasicFormula> =
            cert.upper_parts.iter().map(|(g, _)| g).chain(cert.lower_parts.iter().map(|(h, _)| h)).collect();
        let values = self.values_unchecked(p, &formulas)?;
        let (upper_vals, lower_vals) = values.split_at(cert.upper_parts.len());
        let upper_ok = cert.upper_parts.iter().zip(upper_vals).all(|((_, x), v)| {
            Interval::new(Rational::zero(), x.clone()).expect("bound checked").contains(v)
        });
        let lower_ok = cert.lower_parts.iter().zip(lower_vals).all(|((_, y), v)| {
            Interval::new(y.clone(), Rational::one()).expect("bound checked").contains(v)
        });
        if !(upper_ok && lower_ok) {
            return Ok(false);
        }

        let xs: Vec<Rational> = cert.upper_parts.iter().map(|(_, x)| x.clone()).collect();
        let ys: Vec<Rational> = cert.lower_parts.iter().map(|(_, y)| y.clone()).collect();
        let (upper, lower) = match f.strategy() {
            None => (xs[0].clone(), ys[0].clone()),
            Some(s) => {
                let s = self.registry.resolve(s)?;
                (clamp_unit(s.fold_upper(&xs).expect("nonempty")), clamp_unit(s.fold_lower(&ys).expect("nonempty")))
            }
        };
        Ok(lower > upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::StrategyRegistry;
    use crate::syntax::{ground, parse_program, GroundOptions};

    fn program(src: &str) -> Program {
        ground(&parse_program(src, &StrategyRegistry::builtin()).unwrap(), GroundOptions::default()).unwrap()
    }

    fn igc(atoms: &[&str]) -> BasicFormula {
        BasicFormula::with_strategy_if_compound(
            &StrategyId::conjunctive("igc"),
            atoms.iter().map(|a| Atom::prop(*a)).collect(),
        )
        .unwrap()
    }

    const CLASH: &str = "a : [4/5,4/5].  b : [4/5,4/5].  (a &igc b) : [9/10,1].";

    #[test]
    fn contradictory_facts() {
        let v = Engine::default().consistent(&program("a : [0,0].  a : [1,1].")).unwrap();
        assert!(!v.consistent);
        assert_eq!(v.witness, Some(igc(&["a"])));
    }

    #[test]
    fn empty_program_is_consistent() {
        let v = Engine::default().consistent(&Program::default()).unwrap();
        assert!(v.consistent && v.full_width_nonempty && v.witness.is_none());
    }

    #[test]
    fn igc_clash() {
        let v = Engine::default().consistent(&program(CLASH)).unwrap();
        assert!(!v.consistent);
        assert!(!v.full_width_nonempty);
        assert_eq!(v.witness.as_ref().map(BasicFormula::width), Some(1));
    }

    #[test]
    fn certificate_for_the_clash() {
        let cert = InConCertificate {
            formula: igc(&["a", "b"]),
            lower_parts: vec![(igc(&["a", "b"]), Rational::new(9, 10))],
            upper_parts: vec![(igc(&["a"]), Rational::new(4, 5)), (igc(&["b"]), Rational::new(4, 5))],
        };
        let e = Engine::default();
        assert!(e.check_incon_certificate(&program(CLASH), &cert).unwrap());
        assert!(!e.check_incon_certificate(&Program::default(), &cert).unwrap());

        let bad = InConCertificate { upper_parts: vec![(igc(&["a"]), Rational::new(4, 5))], ..cert };
        assert!(matches!(e.check_incon_certificate(&program(CLASH), &bad), Err(EngineError::MalformedCertificate(_))));
    }
}
