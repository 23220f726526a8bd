//! Generalized weighted matching: find a complete matching whose edge weights,
//! folded by a strategy's bound function, are as large (or small) as possible.
//!
//! Instance text format:
//!
//! ```text
//! gwm <vertexCount> <max|min> <strategy>.<c1|c2> <B>
//! <u> <v> <weight>
//! ...
//! ```
//!
//! Vertices are 1-based; `%` starts a comment.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::StrategyId;
use crate::rational::Rational;
use crate::strategies::{clamp_unit, PStrategy, StrategyError, StrategyRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwmMode {
    Max,
    Min,
}

/// Which bound function of the strategy is the goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSelector {
    /// `c¹`
    Lower,
    /// `c²`
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwmInstance {
    pub vertex_count: usize,
    /// `(u, v, weight)` with 1-based vertices.
    pub edges: Vec<(usize, usize, Rational)>,
    pub strategy: StrategyId,
    pub selector: BoundSelector,
    pub mode: GwmMode,
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwmSolution {
    pub feasible: bool,
    /// Edges `(u, v)` with `u < v`, sorted.
    pub matching: Option<Vec<(usize, usize)>>,
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GwmError {
    #[error("{vertices} vertices exceed the solver cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("invalid edge ({u},{v}): {reason}")]
    InvalidEdge { u: usize, v: usize, reason: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GwmLimits {
    /// Largest vertex count solved by plain enumeration.
    pub enumeration_cap: usize,
    /// Largest vertex count solved by dynamic programming over vertex subsets.
    pub dp_cap: usize,
}

impl Default for GwmLimits {
    fn default() -> Self {
        GwmLimits { enumeration_cap: 16, dp_cap: 20 }
    }
}

struct Goal<'a> {
    s: &'a dyn PStrategy,
    selector: BoundSelector,
    mode: GwmMode,
}

impl Goal<'_> {
    fn fold(&self, acc: Option<&Rational>, w: &Rational) -> Rational {
        match (acc, self.selector) {
            (None, _) => w.clone(),
            (Some(a), BoundSelector::Lower) => self.s.compose_lower(a, w),
            (Some(a), BoundSelector::Upper) => self.s.compose_upper(a, w),
        }
    }

    fn better(&self, x: &Rational, than: &Rational) -> bool {
        match self.mode {
            GwmMode::Max => x > than,
            GwmMode::Min => x < than,
        }
    }
}

type Adjacency = Vec<Vec<(usize, Rational)>>;

impl GwmInstance {
    fn validate(&self) -> Result<Adjacency, GwmError> {
        let mut seen = BTreeSet::new();
        let mut adj: Adjacency = vec![Vec::new(); self.vertex_count];
        for (u, v, w) in &self.edges {
            let bad = |reason: &str| GwmError::InvalidEdge { u: *u, v: *v, reason: reason.into() };
            if *u == 0 || *v == 0 || *u > self.vertex_count || *v > self.vertex_count {
                return Err(bad("vertex out of range"));
            }
            if u == v {
                return Err(bad("self loop"));
            }
            if !w.is_probability() {
                return Err(bad("weight outside [0,1]"));
            }
            if !seen.insert((*u.min(v), *u.max(v))) {
                return Err(bad("duplicate edge"));
            }
            adj[u - 1].push((v - 1, w.clone()));
            adj[v - 1].push((u - 1, w.clone()));
        }
        Ok(adj)
    }
}

struct Search<'a> {
    goal: Goal<'a>,
    adj: &'a Adjacency,
    best: Option<(Rational, Vec<(usize, usize)>)>,
}

impl Search<'_> {
    fn enumerate(&mut self, covered: &mut Vec<bool>, acc: Option<Rational>, picked: &mut Vec<(usize, usize)>) {
        let Some(u) = covered.iter().position(|c| !c) else {
            let value = clamp_unit(acc.expect("at least one edge"));
            if self.best.as_ref().is_none_or(|(b, _)| self.goal.better(&value, b)) {
                self.best = Some((value, picked.clone()));
            }
            return;
        };
        covered[u] = true;
        for (v, w) in &self.adj[u] {
            if covered[*v] {
                continue;
            }
            covered[*v] = true;
            picked.push((u, *v));
            let next = self.goal.fold(acc.as_ref(), w);
            self.enumerate(covered, Some(next), picked);
            picked.pop();
            covered[*v] = false;
        }
        covered[u] = false;
    }
}

/// Optimal fold over the complete matchings of the vertices outside
/// `covered`, pairing the lowest uncovered vertex first.
fn subset_dp(
    goal: &Goal<'_>,
    adj: &Adjacency,
    covered: u64,
    full: u64,
    memo: &mut HashMap<u64, Option<(Rational, usize)>>,
) -> Option<Rational> {
    if covered == full {
        return None;
    }
    if let Some(hit) = memo.get(&covered) {
        return hit.as_ref().map(|(v, _)| v.clone());
    }
    let u = (!covered).trailing_zeros() as usize;
    let mut best: Option<(Rational, usize)> = None;
    for (v, w) in &adj[u] {
        if covered >> v & 1 == 1 {
            continue;
        }
        let next = covered | 1 << u | 1 << v;
        let value = if next == full {
            w.clone()
        } else {
            match subset_dp(goal, adj, next, full, memo) {
                Some(rest) => goal.fold(Some(&rest), w),
                None => continue,
            }
        };
        if best.as_ref().is_none_or(|(b, _)| goal.better(&value, b)) {
            best = Some((value, *v));
        }
    }
    memo.insert(covered, best.clone());
    best.map(|(v, _)| v)
}

/// Optimum of the goal over all complete matchings.
pub fn solve(inst: &GwmInstance, registry: &StrategyRegistry, limits: GwmLimits) -> Result<GwmSolution, GwmError> {
    let adj = inst.validate()?;
    let goal = Goal { s: registry.resolve(&inst.strategy)?, selector: inst.selector, mode: inst.mode };
    let n = inst.vertex_count;
    let infeasible = GwmSolution { feasible: false, matching: None, value: None };
    // No complete matching covers an odd vertex set.
    if n == 0 || n % 2 == 1 {
        return Ok(infeasible);
    }
    let best = if n <= limits.enumeration_cap {
        let mut search = Search { goal, adj: &adj, best: None };
        search.enumerate(&mut vec![false; n], None, &mut Vec::new());
        search.best
    } else if n <= limits.dp_cap.min(63) {
        let full = (1u64 << n) - 1;
        let mut memo = HashMap::new();
        subset_dp(&goal, &adj, 0, full, &mut memo).map(|v| {
            let mut picked = Vec::new();
            let mut covered = 0u64;
            while covered != full {
                let u = (!covered).trailing_zeros() as usize;
                let (_, v) = memo[&covered].clone().expect("optimal path is feasible");
                picked.push((u, v));
                covered |= 1 << u | 1 << v;
            }
            (clamp_unit(v), picked)
        })
    } else {
        return Err(GwmError::TooLarge { vertices: n, cap: limits.dp_cap.max(limits.enumeration_cap) });
    };
    Ok(match best {
        None => infeasible,
        Some((value, picked)) => {
            let mut m: Vec<(usize, usize)> = picked.into_iter().map(|(u, v)| (u.min(v) + 1, u.max(v) + 1)).collect();
            m.sort();
            GwmSolution { feasible: true, matching: Some(m), value: Some(value) }
        }
    })
}

/// Max: optimum at least `B`. Min: optimum at most `B`. False when no
/// complete matching exists.
pub fn decide(inst: &GwmInstance, registry: &StrategyRegistry, limits: GwmLimits) -> Result<bool, GwmError> {
    let sol = solve(inst, registry, limits)?;
    Ok(match (sol.value, inst.mode) {
        (None, _) => false,
        (Some(v), GwmMode::Max) => v >= inst.bound,
        (Some(v), GwmMode::Min) => v <= inst.bound,
    })
}

/// Parses the instance text format.
pub fn parse_instance(src: &str, registry: &StrategyRegistry) -> Result<GwmInstance, GwmError> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('%').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| GwmError::Format { line, message };
    let rational = |line: usize, s: &str| Rational::from_str(s).map_err(|e| err(line, format!("`{s}`: {e}")));

    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing `gwm` header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [tag, n, mode, goal, bound] = fields[..] else {
        return Err(err(hl, "header must be `gwm <vertices> <max|min> <strategy.c1|c2> <B>`".into()));
    };
    if tag != "gwm" {
        return Err(err(hl, format!("expected `gwm`, found `{tag}`")));
    }
    let vertex_count: usize = n.parse().map_err(|_| err(hl, format!("bad vertex count `{n}`")))?;
    let mode = match mode {
        "max" => GwmMode::Max,
        "min" => GwmMode::Min,
        other => return Err(err(hl, format!("mode must be max or min, found `{other}`"))),
    };
    let (name, sel) = goal.split_once('.').ok_or_else(|| err(hl, format!("goal `{goal}` is not <strategy>.<c1|c2>")))?;
    let selector = match sel {
        "c1" => BoundSelector::Lower,
        "c2" => BoundSelector::Upper,
        other => return Err(err(hl, format!("bound selector must be c1 or c2, found `{other}`"))),
    };
    let strategy = registry.lookup(name)?.id().clone();
    let bound = rational(hl, bound)?;
    if !bound.is_probability() {
        return Err(err(hl, format!("bound {bound} is outside [0,1]")));
    }

    let mut edges = Vec::new();
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let [u, v, w] = f[..] else {
            return Err(err(ln, "edge lines are `<u> <v> <weight>`".into()));
        };
        let vertex = |s: &str| s.parse::<usize>().map_err(|_| err(ln, format!("bad vertex `{s}`")));
        edges.push((vertex(u)?, vertex(v)?, rational(ln, w)?));
    }
    let inst = GwmInstance { vertex_count, edges, strategy, selector, mode, bound };
    inst.validate()?;
    Ok(inst)
}

impl fmt::Display for GwmInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            GwmMode::Max => "max",
            GwmMode::Min => "min",
        };
        let sel = match self.selector {
            BoundSelector::Lower => "c1",
            BoundSelector::Upper => "c2",
        };
        writeln!(f, "gwm {} {} {}.{} {}", self.vertex_count, mode, self.strategy.name, sel, self.bound)?;
        for (u, v, w) in &self.edges {
            writeln!(f, "{u} {v} {w}")?;
        }
        Ok(())
    }
}
