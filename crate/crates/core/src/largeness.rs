//! Bounded largeness for pair colorings.
//!
//! `X` is large at `(m, p)` when some `w` forces, for every `ρ: {1..w} → {1..p}`,
//! a set `Y ⊆ (m, w] ∩ X` with `|Y| >= φ(w)` that is homogeneous for both
//! `f` and `ρ`. Only `ρ` on `C = (m, w] ∩ X` matters and `ρ`-homogeneity
//! means `ρ` is constant on `Y`, so the adversary looks for a partition of `C`
//! into `p` classes none of which holds an `f`-homogeneous `φ(w)`-set.

use std::collections::BTreeMap;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::coloring::{Color, ColoringError, ColoringRule, PairColoring};
use crate::growth::GrowthFunction;
use crate::ramsey::{find_homogeneous_subset_within, SearchStats};
use crate::set::{NumberSet, Point};

/// Largest helper palette the adversary supports.
pub const MAX_PALETTE: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LargenessError {
    #[error("largeness is defined here for pair colorings only (got exponent {0})")]
    NotPairs(u32),
    #[error("helper palette must lie in 1..={MAX_PALETTE}, got {0}")]
    BadPalette(u32),
    #[error("need m < w_max <= horizon, got m = {m}, w_max = {w_max}, horizon = {horizon}")]
    BadBounds { m: Point, w_max: Point, horizon: Point },
    #[error("budget must be >= 1")]
    ZeroBudget,
    #[error("adversary produced a partition that fails re-verification at w = {0}")]
    BadCounterexample(Point),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LargenessVerdict {
    /// At this `w` every helper coloring is defeated.
    Large { w: Point, stats: SearchStats },
    /// For each `w` in `(m, w_max]`, a helper coloring `ρ` of `{1..w}`
    /// (`rho[x - 1] = ρ(x)`) admitting no qualifying `Y`.
    SmallUpTo {
        w_max: Point,
        counterexamples: BTreeMap<Point, Vec<Color>>,
        stats: SearchStats,
    },
    /// The budget ran out while deciding this `w`.
    Unknown { w: Point, stats: SearchStats },
}

impl LargenessVerdict {
    pub fn is_large(&self) -> bool {
        matches!(self, LargenessVerdict::Large { .. })
    }

    pub fn is_small(&self) -> bool {
        matches!(self, LargenessVerdict::SmallUpTo { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, LargenessVerdict::Unknown { .. })
    }

    pub fn stats(&self) -> SearchStats {
        match self {
            LargenessVerdict::Large { stats, .. }
            | LargenessVerdict::SmallUpTo { stats, .. }
            | LargenessVerdict::Unknown { stats, .. } => *stats,
        }
    }
}

/// One bounded largeness question. `x` is the member set, read only up to
/// `w_max`.
#[derive(Debug, Clone)]
pub struct LargenessQuery<'a> {
    pub x: &'a NumberSet,
    pub phi: &'a GrowthFunction,
    pub m: Point,
    pub p: u32,
    pub w_max: Point,
    pub budget: u64,
}

/// A pair coloring prepared for repeated largeness queries.
#[derive(Debug, Clone)]
pub struct LargenessOracle {
    f: ColoringRule,
    pairs: PairColoring,
}

impl LargenessOracle {
    pub fn new(f: &ColoringRule) -> Result<Self, LargenessError> {
        if f.exponent() != 2 {
            return Err(LargenessError::NotPairs(f.exponent()));
        }
        Ok(Self {
            f: f.clone(),
            pairs: PairColoring::new(f)?,
        })
    }

    pub fn coloring(&self) -> &ColoringRule {
        &self.f
    }

    pub fn pairs(&self) -> &PairColoring {
        &self.pairs
    }

    pub fn check(&self, q: &LargenessQuery<'_>) -> Result<LargenessVerdict, LargenessError> {
        let horizon = self.f.horizon();
        if q.m >= q.w_max || q.w_max > horizon {
            return Err(LargenessError::BadBounds {
                m: q.m,
                w_max: q.w_max,
                horizon,
            });
        }
        if q.p == 0 || q.p > MAX_PALETTE {
            return Err(LargenessError::BadPalette(q.p));
        }
        if q.budget == 0 {
            return Err(LargenessError::ZeroBudget);
        }
        let start = Instant::now();
        let mut nodes = 0u64;
        let stats = |nodes| SearchStats {
            nodes,
            elapsed: start.elapsed(),
        };
        let mut counterexamples = BTreeMap::new();
        let mut prev: Option<Vec<usize>> = None;
        for w in q.m + 1..=q.w_max {
            let c: Vec<Point> = q.x.within(q.m, w).to_vec();
            let t = q.phi.eval(w) as usize;
            if t == 0 || (t == 1 && !c.is_empty()) {
                return Ok(LargenessVerdict::Large { w, stats: stats(nodes) });
            }
            let classes: Vec<usize> = if c.len() < t {
                vec![0; c.len()]
            } else {
                let warm = prev.as_ref().and_then(|cls| self.warm_start(&c, cls, t, q.p as usize));
                match warm {
                    Some(cls) => cls,
                    None => {
                        let mut adv = Adversary::new(&self.pairs, &c, t, q.p as usize, q.budget, nodes);
                        let found = adv.dfs(0, 0);
                        nodes = adv.nodes;
                        match found {
                            Err(Exhausted) => return Ok(LargenessVerdict::Unknown { w, stats: stats(nodes) }),
                            Ok(false) => return Ok(LargenessVerdict::Large { w, stats: stats(nodes) }),
                            Ok(true) => adv.assign,
                        }
                    }
                }
            };
            let rho = self.rho_from_classes(w, &c, &classes);
            if !self.verify_counterexample(q.x, q.m, w, t, &rho)? {
                return Err(LargenessError::BadCounterexample(w));
            }
            counterexamples.insert(w, rho);
            prev = Some(classes);
        }
        Ok(LargenessVerdict::SmallUpTo {
            w_max: q.w_max,
            counterexamples,
            stats: stats(nodes),
        })
    }

    /// Reuses the previous partition when it still avoids `t`-sets, placing
    /// any new points greedily.
    fn warm_start(&self, c: &[Point], prev: &[usize], t: usize, p: usize) -> Option<Vec<usize>> {
        let mut sets = vec![FixedBitSet::with_capacity(self.pairs.horizon() as usize + 1); p];
        for (i, &cls) in prev.iter().enumerate() {
            sets[cls].insert(c[i] as usize);
        }
        if sets.iter().any(|s| self.class_has_homogeneous(s, t)) {
            return None;
        }
        let mut classes = prev.to_vec();
        for &e in &c[prev.len()..] {
            let j = (0..p).find(|&j| !creates_homogeneous(&self.pairs, &sets[j], e, t))?;
            sets[j].insert(e as usize);
            classes.push(j);
        }
        Some(classes)
    }

    fn class_has_homogeneous(&self, set: &FixedBitSet, t: usize) -> bool {
        (1..=self.pairs.palette()).any(|col| has_clique(&self.pairs, col, set, t))
    }

    fn rho_from_classes(&self, w: Point, c: &[Point], classes: &[usize]) -> Vec<Color> {
        let mut rho = vec![1; w as usize];
        for (&x, &j) in c.iter().zip(classes) {
            rho[x as usize - 1] = j as Color + 1;
        }
        rho
    }

    /// Independent check that no `ρ`-constant class of `(m, w] ∩ X` holds an
    /// `f`-homogeneous `t`-set.
    fn verify_counterexample(
        &self,
        x: &NumberSet,
        m: Point,
        w: Point,
        t: usize,
        rho: &[Color],
    ) -> Result<bool, LargenessError> {
        verify_rho(&self.f, x, m, w, t, rho)
    }
}

/// `true` iff `ρ` (given on `{1..w}`) leaves no `f`- and `ρ`-homogeneous
/// `Y ⊆ (m, w] ∩ X` with `|Y| >= t`.
pub fn verify_rho(
    f: &ColoringRule,
    x: &NumberSet,
    m: Point,
    w: Point,
    t: usize,
    rho: &[Color],
) -> Result<bool, LargenessError> {
    if rho.len() < w as usize {
        return Ok(false);
    }
    let c = x.within(m, w);
    let mut by_class: BTreeMap<Color, Vec<Point>> = BTreeMap::new();
    for &e in c {
        by_class.entry(rho[e as usize - 1]).or_default().push(e);
    }
    for members in by_class.into_values() {
        let set = NumberSet::from_sorted_unchecked(members);
        if find_homogeneous_subset_within(f, &set, t)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience wrapper building a one-off [`LargenessOracle`].
pub fn check_large(f: &ColoringRule, q: &LargenessQuery<'_>) -> Result<LargenessVerdict, LargenessError> {
    LargenessOracle::new(f)?.check(q)
}

/// `{y ∈ X : y > x, f({x, y}) = i}`.
pub fn refine_by_color(x_set: &NumberSet, f: &ColoringRule, x: Point, i: Color) -> Result<NumberSet, ColoringError> {
    f.check_set(x_set)?;
    if x > f.horizon() {
        return Err(ColoringError::OutOfHorizon {
            point: x,
            horizon: f.horizon(),
        });
    }
    Ok(NumberSet::from_sorted_unchecked(
        x_set
            .within(x, f.horizon())
            .iter()
            .copied()
            .filter(|&y| f.color(&[x, y]) == i)
            .collect(),
    ))
}

/// Does `cand` contain a `size`-clique in color `c`?
fn has_clique(pairs: &PairColoring, c: Color, cand: &FixedBitSet, size: usize) -> bool {
    if size == 0 {
        return true;
    }
    let count = cand.count_ones(..);
    if count < size {
        return false;
    }
    if size == 1 {
        return true;
    }
    for (seen, v) in cand.ones().enumerate() {
        if count - seen < size {
            return false;
        }
        let mut next = cand.clone();
        next.intersect_with(pairs.neighbours(c, v as Point));
        next.remove_range(..v + 1);
        if has_clique(pairs, c, &next, size - 1) {
            return true;
        }
    }
    false
}

/// Would adding `e` to `class` create a homogeneous `t`-set through `e`?
fn creates_homogeneous(pairs: &PairColoring, class: &FixedBitSet, e: Point, t: usize) -> bool {
    (1..=pairs.palette()).any(|c| {
        let mut cand = class.clone();
        cand.intersect_with(pairs.neighbours(c, e));
        has_clique(pairs, c, &cand, t - 1)
    })
}

struct Exhausted;

struct Adversary<'a> {
    pairs: &'a PairColoring,
    elems: &'a [Point],
    t: usize,
    p: usize,
    classes: Vec<FixedBitSet>,
    assign: Vec<usize>,
    /// Bit `j` set when element `i` may still join class `j`.
    viable: Vec<u64>,
    nodes: u64,
    budget: u64,
}

impl<'a> Adversary<'a> {
    fn new(pairs: &'a PairColoring, elems: &'a [Point], t: usize, p: usize, budget: u64, nodes: u64) -> Self {
        let all = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
        Self {
            pairs,
            elems,
            t,
            p,
            classes: vec![FixedBitSet::with_capacity(pairs.horizon() as usize + 1); p],
            assign: vec![0; elems.len()],
            viable: vec![all; elems.len()],
            nodes,
            budget,
        }
    }

    /// Classes are interchangeable, so a point only ever opens the next
    /// unused class.
    fn dfs(&mut self, idx: usize, used: usize) -> Result<bool, Exhausted> {
        if idx == self.elems.len() {
            return Ok(true);
        }
        let e = self.elems[idx];
        for j in 0..self.p.min(used + 1) {
            if self.viable[idx] & (1 << j) == 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Exhausted);
            }
            self.classes[j].insert(e as usize);
            self.assign[idx] = j;
            let mut cleared = Vec::new();
            let mut dead = false;
            for later in idx + 1..self.elems.len() {
                if self.viable[later] & (1 << j) != 0
                    && creates_homogeneous(self.pairs, &self.classes[j], self.elems[later], self.t)
                {
                    self.viable[later] &= !(1 << j);
                    cleared.push(later);
                    if self.viable[later] == 0 {
                        dead = true;
                        break;
                    }
                }
            }
            if !dead && self.dfs(idx + 1, used.max(j + 1))? {
                return Ok(true);
            }
            for later in cleared {
                self.viable[later] |= 1 << j;
            }
            self.classes[j].set(e as usize, false);
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::Rule;

    fn query<'a>(x: &'a NumberSet, phi: &'a GrowthFunction, m: Point, p: u32, w_max: Point) -> LargenessQuery<'a> {
        LargenessQuery {
            x,
            phi,
            m,
            p,
            w_max,
            budget: 1_000_000,
        }
    }

    #[test]
    fn constant_pairs_large_at_three() {
        let f = ColoringRule::constant(2, 1, 10, 1).unwrap();
        let x = NumberSet::interval(1, 10);
        let v = check_large(&f, &query(&x, &GrowthFunction::Const(2), 0, 2, 10)).unwrap();
        assert!(matches!(v, LargenessVerdict::Large { w: 3, .. }));
    }

    #[test]
    fn empty_set_is_small() {
        let f = ColoringRule::constant(2, 1, 10, 1).unwrap();
        let x = NumberSet::empty();
        let v = check_large(&f, &query(&x, &GrowthFunction::Const(1), 0, 2, 10)).unwrap();
        match v {
            LargenessVerdict::SmallUpTo {
                w_max, counterexamples, ..
            } => {
                assert_eq!(w_max, 10);
                assert_eq!(counterexamples.len(), 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn balanced_split_defeats_triples() {
        let f = ColoringRule::constant(2, 1, 4, 1).unwrap();
        let x = NumberSet::interval(1, 4);
        let v = check_large(&f, &query(&x, &GrowthFunction::Const(3), 0, 2, 4)).unwrap();
        let LargenessVerdict::SmallUpTo { counterexamples, .. } = v else {
            panic!("{v:?}")
        };
        let rho = &counterexamples[&4];
        let ones = rho.iter().filter(|&&c| c == 1).count();
        assert_eq!(ones, 2);
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let f = ColoringRule::from_tag(2, 2, 30, "hash:3").unwrap();
        let x = NumberSet::interval(1, 30);
        let q = LargenessQuery {
            budget: 3,
            ..query(&x, &GrowthFunction::Const(3), 0, 3, 30)
        };
        assert!(check_large(&f, &q).unwrap().is_unknown());
    }

    #[test]
    fn refinement_examples() {
        let f = ColoringRule::from_rule(2, 2, 20, Rule::MinParity).unwrap();
        let all = NumberSet::interval(1, 20);
        assert_eq!(refine_by_color(&all, &f, 2, 1).unwrap(), NumberSet::interval(3, 20));
        assert!(refine_by_color(&all, &f, 2, 2).unwrap().is_empty());
    }

    #[test]
    fn bad_queries() {
        let f = ColoringRule::constant(2, 1, 10, 1).unwrap();
        let x = NumberSet::interval(1, 10);
        let phi = GrowthFunction::Const(2);
        assert!(matches!(
            check_large(&f, &query(&x, &phi, 5, 2, 5)),
            Err(LargenessError::BadBounds { .. })
        ));
        assert!(matches!(
            check_large(&f, &query(&x, &phi, 0, 2, 11)),
            Err(LargenessError::BadBounds { .. })
        ));
        assert!(matches!(
            check_large(&f, &query(&x, &phi, 0, 0, 10)),
            Err(LargenessError::BadPalette(0))
        ));
        let g = ColoringRule::constant(1, 1, 10, 1).unwrap();
        assert!(matches!(
            check_large(&g, &query(&x, &phi, 0, 2, 10)),
            Err(LargenessError::NotPairs(1))
        ));
    }
}
