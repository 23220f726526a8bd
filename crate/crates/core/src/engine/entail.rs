use crate::formula::{AnnotatedFormula, BasicFormula, Program};
use crate::interval::Interval;
use crate::rational::Rational;
use crate::strategies::{clamp_unit, max_interval};

use super::trace::FiringTrace;
use super::{classify, Engine, EngineError, Scope};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentVerdict {
    pub entailed: bool,
    /// `h_P(F)`
    pub computed: Interval,
    pub trace: FiringTrace,
}

/// All set partitions of `0..n` as lists of blocks.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// Tightest bounds the facts of `p` place on `part` directly: its own heads,
/// and the max-interval of every strictly larger head it is a subformula of.
/// `None` when no fact mentions a compound `part`.
fn fact_bounds(p: &Program, part: &BasicFormula) -> Option<(Rational, Rational)> {
    let mut bounds =
        if part.is_atomic() { Some((Rational::zero(), Rational::one())) } else { None };
    let mut tighten = |iv: &Interval| {
        let Some((lo, hi)) = iv.bounds() else { return };
        let (y, x) = bounds.get_or_insert_with(|| (Rational::zero(), Rational::one()));
        if lo > y {
            *y = lo.clone();
        }
        if hi < x {
            *x = hi.clone();
        }
    };
    for c in p.clauses() {
        if c.head == *part {
            tighten(&c.head_annotation);
        } else if c.head.width() > part.width()
            && c.head.includes_atoms_of(part)
            && (part.is_atomic() || c.head.strategy() == part.strategy())
        {
            let kind = c.head.strategy().expect("compound head").kind;
            if let Ok(md) = max_interval(kind, &c.head_annotation) {
                tighten(&md);
            }
        }
    }
    bounds
}

impl Engine {
    /// Decides `P |= F : µ` for a consistent program.
    pub fn entails(&self, p: &Program, q: &AnnotatedFormula) -> Result<EntailmentVerdict, EngineError> {
        let verdict = self.consistent(p)?;
        if !verdict.consistent {
            return Err(EngineError::InconsistentProgram { witness: verdict.witness });
        }
        self.entails_unchecked(p, q)
    }

    /// [`Engine::entails`] without the consistency check.
    pub fn entails_unchecked(&self, p: &Program, q: &AnnotatedFormula) -> Result<EntailmentVerdict, EngineError> {
        let sig = classify(p);
        let (computed, trace) = if sig.is_hpp1() {
            let (fix, trace) = self.lfp1(p)?;
            (fix.value(&q.formula)?, trace)
        } else {
            let n = sig.head_width.max(sig.body_width).max(q.formula.width());
            let (table, trace) = self.lfp_in_scope(p, n, &Scope::new().with_formula(&q.formula))?;
            (table.get(&q.formula).expect("query in scope").clone(), trace)
        };
        Ok(EntailmentVerdict { entailed: q.annotation.contains(&computed), computed, trace })
    }

    /// Entailment for fact-only programs by exhaustive search over every
    /// partition of the query into parts bounded directly by the facts.
    ///
    /// The query holds iff some partition's composed upper bounds reach the
    /// query's upper bound and some partition's composed lower bounds reach
    /// its lower bound. Each part takes its tightest bound, which is optimal
    /// because composition is monotone.
    pub fn ent_facts_exhaustive(&self, p: &Program, q: &AnnotatedFormula) -> Result<bool, EngineError> {
        if !p.is_fact_only() {
            return Err(EngineError::NonFactProgram);
        }
        let Some((a, b)) = q.annotation.bounds() else { return Ok(false) };
        let f = &q.formula;
        let strategy = f.strategy().map(|s| self.registry.resolve(s)).transpose()?;

        let mut best_upper: Option<Rational> = None;
        let mut best_lower: Option<Rational> = None;
        'partitions: for blocks in set_partitions(f.width()) {
            let mut xs = Vec::with_capacity(blocks.len());
            let mut ys = Vec::with_capacity(blocks.len());
            for block in &blocks {
                let atoms = block.iter().map(|&i| f.atoms()[i].clone()).collect();
                let part = match f.strategy() {
                    None => BasicFormula::canonicalize(None, atoms),
                    Some(s) => BasicFormula::with_strategy_if_compound(s, atoms),
                }
                .expect("distinct atoms");
                let Some((y, x)) = fact_bounds(p, &part) else { continue 'partitions };
                xs.push(x);
                ys.push(y);
            }
            let (upper, lower) = match strategy {
                None => (xs[0].clone(), ys[0].clone()),
                Some(s) => (
                    clamp_unit(s.fold_upper(&xs).expect("nonempty")),
                    clamp_unit(s.fold_lower(&ys).expect("nonempty")),
                ),
            };
            if best_upper.as_ref().is_none_or(|u| upper < *u) {
                best_upper = Some(upper);
            }
            if best_lower.as_ref().is_none_or(|l| lower > *l) {
                best_lower = Some(lower);
            }
        }
        let upper_pass = best_upper.is_some_and(|u| &u <= b);
        let lower_pass = best_lower.is_some_and(|l| &l >= a);
        Ok(upper_pass && lower_pass)
    }
}
