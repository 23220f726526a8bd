//! The finite universe of basic formulas an evaluation ranges over, and the
//! interval table indexed by it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;

use crate::formula::{Atom, BasicFormula, StrategyId};
use crate::interval::Interval;

/// Strategy slot of a width-one entry.
pub(crate) const UNTAGGED: u16 = u16::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Key {
    pub slot: u16,
    pub atoms: Box<[u32]>,
}

impl Key {
    fn width(&self) -> usize {
        self.atoms.len()
    }
}

/// A downward-closed family of basic formulas with precomputed splits.
///
/// Entries are sorted by width, so every split part of an entry has a smaller
/// index than the entry itself.
#[derive(Debug, Clone)]
pub(crate) struct Universe {
    pub width_bound: usize,
    pub atoms: Vec<Atom>,
    atom_ids: HashMap<Atom, u32>,
    pub strategies: Vec<StrategyId>,
    pub keys: Vec<Key>,
    index: HashMap<Key, usize>,
    /// Unordered splits `(g, h)` of each entry.
    pub splits: Vec<Vec<(u32, u32)>>,
    /// Entries that have this entry as a split part.
    pub parents: Vec<Vec<u32>>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Number of entries in a universe that contains every formula of width at
/// most `n` over `dense` atoms (plus one entry per atom in `atom_count`).
pub(crate) fn dense_size(atom_count: usize, dense: usize, strategies: usize, n: usize) -> u128 {
    let compound: u128 = (2..=n.min(dense)).map(|w| binomial(dense, w)).fold(0u128, |a, b| a.saturating_add(b));
    (atom_count as u128).saturating_add(compound.saturating_mul(strategies as u128))
}

impl Universe {
    /// Builds the universe containing
    /// * every atom of `atoms` as a width-one entry,
    /// * every formula of width `2..=width_bound` over `dense` atoms, once per strategy,
    /// * every subformula of each formula in `extra`.
    pub fn build(
        atoms: BTreeSet<Atom>,
        strategies: BTreeSet<StrategyId>,
        dense: &BTreeSet<Atom>,
        width_bound: usize,
        extra: &[&BasicFormula],
    ) -> Universe {
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        let atom_ids: HashMap<Atom, u32> = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i as u32)).collect();
        let strategies: Vec<StrategyId> = strategies.into_iter().collect();
        let slot_of = |s: &StrategyId| strategies.iter().position(|x| x == s).expect("strategy in scope") as u16;

        let mut keys: BTreeSet<(usize, Key)> = BTreeSet::new();
        let mut push = |k: Key| {
            keys.insert((k.width(), k));
        };
        for i in 0..atoms.len() as u32 {
            push(Key { slot: UNTAGGED, atoms: Box::new([i]) });
        }
        let dense_ids: Vec<u32> = dense.iter().map(|a| atom_ids[a]).collect();
        for w in 2..=width_bound.min(dense_ids.len()) {
            for combo in dense_ids.iter().copied().combinations(w) {
                for slot in 0..strategies.len() as u16 {
                    push(Key { slot, atoms: combo.clone().into_boxed_slice() });
                }
            }
        }
        for f in extra {
            let Some(s) = f.strategy() else { continue };
            let slot = slot_of(s);
            let ids: Vec<u32> = f.atoms().iter().map(|a| atom_ids[a]).collect();
            let n = ids.len();
            for mask in 1u64..(1u64 << n) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let sub: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
                push(Key { slot, atoms: sub.into_boxed_slice() });
            }
        }

        let keys: Vec<Key> = keys.into_iter().map(|(_, k)| k).collect();
        let index: HashMap<Key, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut splits = vec![Vec::new(); keys.len()];
        let mut parents = vec![Vec::new(); keys.len()];
        for (fi, k) in keys.iter().enumerate() {
            let n = k.width();
            if n < 2 {
                continue;
            }
            let part = |mask: u64| -> usize {
                let ids: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| k.atoms[i]).collect();
                let slot = if ids.len() == 1 { UNTAGGED } else { k.slot };
                index[&Key { slot, atoms: ids.into_boxed_slice() }]
            };
            let full = (1u64 << n) - 1;
            let rest = full & !1;
            let mut sub = rest;
            while sub != 0 {
                let (g, h) = (part(full & !sub), part(sub));
                splits[fi].push((g as u32, h as u32));
                parents[g].push(fi as u32);
                parents[h].push(fi as u32);
                sub = (sub - 1) & rest;
            }
        }
        Universe { width_bound, atoms, atom_ids, strategies, keys, index, splits, parents }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn slot_of(&self, s: &StrategyId) -> Option<u16> {
        self.strategies.iter().position(|x| x == s).map(|i| i as u16)
    }

    pub fn index_of(&self, f: &BasicFormula) -> Option<usize> {
        let slot = match f.strategy() {
            None => UNTAGGED,
            Some(s) => self.slot_of(s)?,
        };
        let mut ids = Vec::with_capacity(f.width());
        for a in f.atoms() {
            ids.push(*self.atom_ids.get(a)?);
        }
        ids.sort_unstable();
        self.index.get(&Key { slot, atoms: ids.into_boxed_slice() }).copied()
    }

    pub fn formula(&self, i: usize) -> BasicFormula {
        let k = &self.keys[i];
        let atoms: Vec<Atom> = k.atoms.iter().map(|&a| self.atoms[a as usize].clone()).collect();
        if k.slot == UNTAGGED {
            BasicFormula::atom(atoms.into_iter().next().expect("width one"))
        } else {
            BasicFormula::canonicalize(Some(self.strategies[k.slot as usize].clone()), atoms)
                .expect("universe keys hold distinct atoms")
        }
    }

    pub fn strategy_of(&self, i: usize) -> Option<&StrategyId> {
        let slot = self.keys[i].slot;
        (slot != UNTAGGED).then(|| &self.strategies[slot as usize])
    }

    #[cfg(test)]
    pub fn width_of(&self, i: usize) -> usize {
        self.keys[i].width()
    }
}

/// Interval assigned to every formula of a universe.
#[derive(Debug, Clone)]
pub struct FormulaTable {
    pub(crate) universe: Universe,
    pub(crate) values: Vec<Interval>,
}

impl FormulaTable {
    pub(crate) fn new(universe: Universe) -> Self {
        let values = vec![Interval::unit(); universe.len()];
        FormulaTable { universe, values }
    }

    pub fn width_bound(&self) -> usize {
        self.universe.width_bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.universe.atoms
    }

    pub fn strategies(&self) -> &[StrategyId] {
        &self.universe.strategies
    }

    pub fn get(&self, f: &BasicFormula) -> Option<&Interval> {
        self.universe.index_of(f).map(|i| &self.values[i])
    }

    pub fn contains_formula(&self, f: &BasicFormula) -> bool {
        self.universe.index_of(f).is_some()
    }

    /// Entries in ascending width, then strategy, then atoms.
    pub fn iter(&self) -> impl Iterator<Item = (BasicFormula, &Interval)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.universe.formula(i), v))
    }

    /// No entry is empty.
    pub fn is_fully_defined(&self) -> bool {
        self.values.iter().all(|v| !v.is_empty())
    }

    /// The first empty entry in table order, which has minimal width.
    pub fn first_empty(&self) -> Option<BasicFormula> {
        self.values.iter().position(Interval::is_empty).map(|i| self.universe.formula(i))
    }

    /// Unordered splits of `f` as stored in the table.
    pub fn splits_of(&self, f: &BasicFormula) -> Vec<(BasicFormula, BasicFormula)> {
        match self.universe.index_of(f) {
            None => Vec::new(),
            Some(i) => self.universe.splits[i]
                .iter()
                .map(|&(g, h)| (self.universe.formula(g as usize), self.universe.formula(h as usize)))
                .collect(),
        }
    }
}

impl PartialEq for FormulaTable {
    fn eq(&self, other: &Self) -> bool {
        self.universe.keys == other.universe.keys
            && self.universe.atoms == other.universe.atoms
            && self.universe.strategies == other.universe.strategies
            && self.values == other.values
    }
}

impl fmt::Display for FormulaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (formula, value) in self.iter() {
            writeln!(f, "{formula} : {value}")?;
        }
        Ok(())
    }
}
