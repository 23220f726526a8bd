//! Ground atoms, canonical hybrid basic formulas, clauses and programs.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::interval::Interval;

/// Whether a p-strategy combines events conjunctively or disjunctively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrategyKind {
    Conjunctive,
    Disjunctive,
}

impl StrategyKind {
    /// Connective symbol used in source text.
    pub fn connective(self) -> char {
        match self {
            StrategyKind::Conjunctive => '&',
            StrategyKind::Disjunctive => '|',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyId {
    pub name: String,
    pub kind: StrategyKind,
}

impl StrategyId {
    pub fn new(name: impl Into<String>, kind: StrategyKind) -> Self {
        StrategyId { name: name.into(), kind }
    }

    pub fn conjunctive(name: impl Into<String>) -> Self {
        Self::new(name, StrategyKind::Conjunctive)
    }

    pub fn disjunctive(name: impl Into<String>) -> Self {
        Self::new(name, StrategyKind::Disjunctive)
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A ground atom `p(c1, ..., cn)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Atom { predicate: predicate.into(), args: args.into_iter().map(Into::into).collect() }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Atom { predicate: predicate.into(), args: Vec::new() }
    }
}

// Canonical order: predicate, then arity, then the argument tuple.
impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.predicate
            .cmp(&other.predicate)
            .then(self.args.len().cmp(&other.args.len()))
            .then_with(|| self.args.cmp(&other.args))
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("a basic formula needs at least one atom")]
    NoAtoms,
    #[error("atom {0} occurs more than once in a basic formula")]
    DuplicateAtom(Atom),
    #[error("a formula of width {0} needs a strategy")]
    MissingStrategy(usize),
    #[error("a single atom cannot carry strategy {0}")]
    SpuriousStrategy(String),
    #[error("formula {0} has width one and cannot be split")]
    WidthOne(String),
}

/// A hybrid basic formula: distinct atoms joined by one strategy's connective.
///
/// Atoms are kept sorted in the canonical atom order, so permuted inputs
/// produce equal values. Width-one formulas carry no strategy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicFormula {
    strategy: Option<StrategyId>,
    atoms: Vec<Atom>,
}

impl BasicFormula {
    pub fn canonicalize(strategy: Option<StrategyId>, atoms: Vec<Atom>) -> Result<Self, FormulaError> {
        let mut atoms = atoms;
        if atoms.is_empty() {
            return Err(FormulaError::NoAtoms);
        }
        atoms.sort();
        if let Some(w) = atoms.windows(2).find(|w| w[0] == w[1]) {
            return Err(FormulaError::DuplicateAtom(w[0].clone()));
        }
        match (&strategy, atoms.len()) {
            (Some(s), 1) => Err(FormulaError::SpuriousStrategy(s.name.clone())),
            (None, n) if n > 1 => Err(FormulaError::MissingStrategy(n)),
            _ => Ok(BasicFormula { strategy, atoms }),
        }
    }

    pub fn atom(atom: Atom) -> Self {
        BasicFormula { strategy: None, atoms: vec![atom] }
    }

    /// Builds the formula over `atoms`, attaching `strategy` only when the
    /// width is at least two. Used for split parts and subformulas.
    pub fn with_strategy_if_compound(strategy: &StrategyId, atoms: Vec<Atom>) -> Result<Self, FormulaError> {
        let tag = if atoms.len() > 1 { Some(strategy.clone()) } else { None };
        Self::canonicalize(tag, atoms)
    }

    pub fn strategy(&self) -> Option<&StrategyId> {
        self.strategy.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn width(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_atomic(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Every unordered pair `(G, H)` of disjoint nonempty parts whose union is
    /// this formula. A formula of width `n` has `2^(n-1) - 1` splits.
    pub fn splits(&self) -> Result<Vec<(BasicFormula, BasicFormula)>, FormulaError> {
        let n = self.width();
        let strategy = match (&self.strategy, n) {
            (Some(s), n) if n >= 2 => s,
            _ => return Err(FormulaError::WidthOne(self.to_string())),
        };
        assert!(n < 64, "formula too wide to split");
        let full: u64 = (1u64 << n) - 1;
        let mut out = Vec::with_capacity((1usize << (n - 1)) - 1);
        // The part not containing the first atom ranges over nonempty proper subsets.
        let rest = full & !1;
        let mut sub = rest;
        while sub != 0 {
            let left = full & !sub;
            let pick = |mask: u64| -> Vec<Atom> {
                (0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.atoms[i].clone()).collect()
            };
            let g = BasicFormula::with_strategy_if_compound(strategy, pick(sub)).expect("distinct atoms");
            let h = BasicFormula::with_strategy_if_compound(strategy, pick(left)).expect("distinct atoms");
            out.push((g, h));
            sub = (sub - 1) & rest;
        }
        out.sort();
        Ok(out)
    }

    /// True when `other`'s atoms are a subset of this formula's atoms.
    pub fn includes_atoms_of(&self, other: &BasicFormula) -> bool {
        other.atoms.iter().all(|a| self.atoms.binary_search(a).is_ok())
    }
}

impl fmt::Display for BasicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.strategy {
            None => write!(f, "{}", self.atoms[0]),
            Some(s) => {
                f.write_str("(")?;
                for (i, a) in self.atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {}{} ", s.kind.connective(), s.name)?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotatedFormula {
    pub formula: BasicFormula,
    pub annotation: Interval,
}

impl AnnotatedFormula {
    pub fn new(formula: BasicFormula, annotation: Interval) -> Self {
        AnnotatedFormula { formula, annotation }
    }
}

impl fmt::Display for AnnotatedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.formula, self.annotation)
    }
}

/// One-based position of a clause in its program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseId(pub usize);

impl ClauseId {
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: BasicFormula,
    pub head_annotation: Interval,
    pub body: Vec<AnnotatedFormula>,
}

impl Clause {
    pub fn fact(head: BasicFormula, annotation: Interval) -> Self {
        Clause { head, head_annotation: annotation, body: Vec::new() }
    }

    pub fn rule(head: BasicFormula, annotation: Interval, body: Vec<AnnotatedFormula>) -> Self {
        Clause { head, head_annotation: annotation, body }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &BasicFormula> {
        std::iter::once(&self.head).chain(self.body.iter().map(|b| &b.formula))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.head, self.head_annotation)?;
        if !self.body.is_empty() {
            f.write_str(" <- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        f.write_str(".")
    }
}

/// A finite ground hp-program. The strategy set is derived from the clauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    strategies: BTreeSet<StrategyId>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Self {
        let strategies = clauses
            .iter()
            .flat_map(|c| c.formulas())
            .filter_map(|f| f.strategy().cloned())
            .collect();
        Program { clauses, strategies }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        id.0.checked_sub(1).and_then(|i| self.clauses.get(i))
    }

    pub fn clause_ids(&self) -> impl Iterator<Item = ClauseId> {
        (1..=self.clauses.len()).map(ClauseId)
    }

    pub fn strategies(&self) -> &BTreeSet<StrategyId> {
        &self.strategies
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.clauses.iter().flat_map(|c| c.formulas()).flat_map(|f| f.atoms().iter().cloned()).collect()
    }

    /// Atoms that occur in some clause head.
    pub fn head_atoms(&self) -> BTreeSet<Atom> {
        self.clauses.iter().flat_map(|c| c.head.atoms().iter().cloned()).collect()
    }

    pub fn is_fact_only(&self) -> bool {
        self.clauses.iter().all(Clause::is_fact)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pcc() -> StrategyId {
        StrategyId::conjunctive("pcc")
    }

    fn a(name: &str) -> Atom {
        Atom::prop(name)
    }

    #[test]
    fn canonicalize_is_permutation_invariant() {
        let f1 = BasicFormula::canonicalize(Some(pcc()), vec![a("b"), a("a")]).unwrap();
        let f2 = BasicFormula::canonicalize(Some(pcc()), vec![a("a"), a("b")]).unwrap();
        assert_eq!(f1, f2);
        assert_eq!(f1.to_string(), "(a &pcc b)");
    }

    #[test]
    fn canonicalize_errors() {
        assert_eq!(
            BasicFormula::canonicalize(Some(StrategyId::conjunctive("inc")), vec![a("a"), a("a")]),
            Err(FormulaError::DuplicateAtom(a("a")))
        );
        assert_eq!(BasicFormula::canonicalize(None, vec![a("a"), a("b")]), Err(FormulaError::MissingStrategy(2)));
        assert!(matches!(
            BasicFormula::canonicalize(Some(pcc()), vec![a("p")]),
            Err(FormulaError::SpuriousStrategy(_))
        ));
        assert_eq!(BasicFormula::canonicalize(None, vec![]), Err(FormulaError::NoAtoms));
        let p = BasicFormula::canonicalize(None, vec![a("p")]).unwrap();
        assert_eq!(p.width(), 1);
        assert!(p.strategy().is_none());
    }

    #[test]
    fn atom_order_is_predicate_arity_args() {
        let mut v = vec![Atom::new("p", ["b"]), Atom::prop("q"), Atom::new("p", ["a", "z"]), Atom::new("p", ["c"])];
        v.sort();
        let shown: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, ["p(b)", "p(c)", "p(a,z)", "q"]);
    }

    #[test]
    fn splits_of_small_formulas() {
        let ab = BasicFormula::canonicalize(Some(pcc()), vec![a("a"), a("b")]).unwrap();
        let s = ab.splits().unwrap();
        assert_eq!(s.len(), 1);
        let abc = BasicFormula::canonicalize(Some(pcc()), vec![a("a"), a("b"), a("c")]).unwrap();
        let s = abc.splits().unwrap();
        assert_eq!(s.len(), 3);
        let singles: BTreeSet<String> = s
            .iter()
            .map(|(g, h)| if g.is_atomic() { g.to_string() } else { h.to_string() })
            .collect();
        assert_eq!(singles, ["a", "b", "c"].iter().map(|x| x.to_string()).collect());
        let p = BasicFormula::atom(a("p"));
        assert!(matches!(p.splits(), Err(FormulaError::WidthOne(_))));
    }

    proptest! {
        #[test]
        fn splits_partition_the_formula(n in 2usize..7, seed in any::<u64>()) {
            let mut atoms: Vec<Atom> = (0..n).map(|i| Atom::new("x", [i.to_string()])).collect();
            // deterministic shuffle
            let mut s = seed;
            for i in (1..atoms.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                atoms.swap(i, (s >> 33) as usize % (i + 1));
            }
            let f = BasicFormula::canonicalize(Some(StrategyId::disjunctive("ncd")), atoms.clone()).unwrap();
            let g = BasicFormula::canonicalize(Some(StrategyId::disjunctive("ncd")), { let mut r = atoms; r.reverse(); r }).unwrap();
            prop_assert_eq!(&f, &g);
            let splits = f.splits().unwrap();
            prop_assert_eq!(splits.len(), (1 << (n - 1)) - 1);
            for (l, r) in &splits {
                let mut all: Vec<Atom> = l.atoms().iter().chain(r.atoms()).cloned().collect();
                all.sort();
                prop_assert_eq!(all.as_slice(), f.atoms());
                prop_assert!(l.atoms().iter().all(|x| !r.atoms().contains(x)));
            }
        }
    }
}
