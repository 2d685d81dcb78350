//! The exponent-2 pipeline: a helper string grown along the tree of
//! large tail sets, blocks homogeneous for both `f` and the helper, and a
//! majority selection on the induced pair of colors.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::coloring::{Color, ColoringError, ColoringRule, PairColoring};
use crate::growth::GrowthFunction;
use crate::largeness::{refine_by_color, LargenessError, LargenessOracle, LargenessQuery, LargenessVerdict};
use crate::packed::BlockSequence;
use crate::partition::IntervalLadder;
use crate::ramsey::{check_growth_hypothesis, HypothesisReport, RamseyError};
use crate::set::{NumberSet, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Exp2Error {
    #[error("the exponent-2 pipeline needs a pair coloring, got exponent {0}")]
    NotPairs(u32),
    #[error("at least one block is required")]
    NoBlocks,
    #[error("w_max {w_max} exceeds the coloring horizon {horizon}")]
    WmaxBeyondHorizon { w_max: Point, horizon: Point },
    #[error("the whole ground set is small at these bounds")]
    RootSmall,
    #[error("every extension of the helper at length {len} is small at these bounds")]
    AllSmall { len: usize },
    #[error("bounds exhausted: cutoff {cutoff} is not below w_max {w_max}")]
    BoundsExhausted { cutoff: Point, w_max: Point },
    #[error("no block above {m} within w_max {w_max}")]
    NoBlock { m: Point, w_max: Point },
    #[error("between-block color is not single-valued: f({x},{y}) = {got}, expected {expected}")]
    InvariantViolation {
        x: Point,
        y: Point,
        got: Color,
        expected: Color,
    },
    #[error("growth hypothesis fails at w = {0:?}")]
    HypothesisFailures(Vec<Point>),
    #[error(transparent)]
    Largeness(#[from] LargenessError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
}

/// Search bounds for the bounded tree and block searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineBounds {
    /// Largest `w` any largeness or block search may use.
    pub w_max: Point,
    /// Helper palette `p` of the largeness queries.
    pub palette: u32,
    /// Largeness queries for a helper of length `L` use cutoff `L + margin`.
    pub cutoff_margin: Point,
    /// Node budget per largeness query.
    pub budget: u64,
    /// When set, also check `w → (φ(w))^2_{k+1}` up to the last boundary
    /// with this node budget per instance.
    pub hypothesis_budget: Option<u64>,
}

impl PipelineBounds {
    pub fn new(w_max: Point, palette: u32, cutoff_margin: Point, budget: u64) -> Self {
        Self {
            w_max,
            palette,
            cutoff_margin,
            budget,
            hypothesis_budget: None,
        }
    }
}

/// A finite helper string `τ(1), ..., τ(|τ|)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct HelperString(Vec<Color>);

impl HelperString {
    pub fn new(values: Vec<Color>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `τ(x)` for `1 <= x <= |τ|`.
    pub fn get(&self, x: Point) -> Option<Color> {
        (x as usize).checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn values(&self) -> &[Color] {
        &self.0
    }

    /// `self ⪯ other`: `other` extends `self`.
    pub fn is_prefix_of(&self, other: &HelperString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn extended(&self, c: Color) -> Self {
        let mut v = self.0.clone();
        v.push(c);
        Self(v)
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self(self.0[..len].to_vec())
    }
}

/// Bounded tree membership of a helper prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeVerdict {
    Large,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// Every helper step was certified large.
    Certified,
    /// This many helper steps rested on undecided largeness queries.
    Downgraded { unknown_steps: usize },
}

/// `{y > |τ| : f({x, y}) = τ(x) for all x <= |τ|}` within `{1..upto}`.
pub fn tail_set(tau: &HelperString, f: &ColoringRule, upto: Point) -> Result<NumberSet, ColoringError> {
    let mut x = NumberSet::interval(1, upto.min(f.horizon()));
    for (i, &c) in tau.values().iter().enumerate() {
        x = refine_by_color(&x, f, i as Point + 1, c)?;
    }
    Ok(x)
}

fn tail_query(
    oracle: &LargenessOracle,
    tail: &NumberSet,
    len: usize,
    phi: &GrowthFunction,
    bounds: &PipelineBounds,
) -> Result<LargenessVerdict, Exp2Error> {
    let cutoff = len as Point + bounds.cutoff_margin;
    if cutoff >= bounds.w_max {
        return Err(Exp2Error::BoundsExhausted {
            cutoff,
            w_max: bounds.w_max,
        });
    }
    let q = LargenessQuery {
        x: tail,
        phi,
        m: cutoff,
        p: bounds.palette,
        w_max: bounds.w_max,
        budget: bounds.budget,
    };
    Ok(oracle.check(&q)?)
}

/// Bounded verdict on whether the tail set of `τ` is large.
pub fn in_tree(
    tau: &HelperString,
    oracle: &LargenessOracle,
    phi: &GrowthFunction,
    bounds: &PipelineBounds,
) -> Result<LargenessVerdict, Exp2Error> {
    let tail = tail_set(tau, oracle.coloring(), bounds.w_max)?;
    tail_query(oracle, &tail, tau.len(), phi, bounds)
}

/// Picks the extension color for a helper of length `len` whose tail set is
/// `tail`: the smallest color certified large, else the smallest undecided
/// one. Returns the color, the verdict, and the extended tail.
fn choose_extension(
    oracle: &LargenessOracle,
    tail: &NumberSet,
    len: usize,
    phi: &GrowthFunction,
    bounds: &PipelineBounds,
) -> Result<(Color, TreeVerdict, NumberSet), Exp2Error> {
    let f = oracle.coloring();
    let mut fallback = None;
    for c in 1..=f.palette() {
        let next = refine_by_color(tail, f, len as Point + 1, c)?;
        match tail_query(oracle, &next, len + 1, phi, bounds)? {
            LargenessVerdict::Large { .. } => return Ok((c, TreeVerdict::Large, next)),
            LargenessVerdict::Unknown { .. } if fallback.is_none() => fallback = Some((c, next)),
            _ => {}
        }
    }
    match fallback {
        Some((c, next)) => Ok((c, TreeVerdict::Unknown, next)),
        None => Err(Exp2Error::AllSmall { len }),
    }
}

/// `τ⌢i` for the smallest color `i` whose extension is large at the bounds
/// (or the smallest undecided one), together with that extension's verdict.
pub fn extend_path(
    tau: &HelperString,
    oracle: &LargenessOracle,
    phi: &GrowthFunction,
    bounds: &PipelineBounds,
) -> Result<(HelperString, TreeVerdict), Exp2Error> {
    let tail = tail_set(tau, oracle.coloring(), bounds.w_max)?;
    let (c, verdict, _) = choose_extension(oracle, &tail, tau.len(), phi, bounds)?;
    Ok((tau.extended(c), verdict))
}

/// A helper string grown lazily along the bounded tree, with the tail set of
/// every prefix cached.
#[derive(Debug, Clone)]
pub struct HelperPath<'a> {
    oracle: &'a LargenessOracle,
    phi: &'a GrowthFunction,
    bounds: &'a PipelineBounds,
    tau: HelperString,
    /// `tails[L]` is the tail set of `τ|L`.
    tails: Vec<NumberSet>,
    /// `verdicts[L]` is the tree verdict of `τ|L`.
    verdicts: Vec<TreeVerdict>,
}

impl<'a> HelperPath<'a> {
    /// Starts at the empty string, which must not be small.
    pub fn new(
        oracle: &'a LargenessOracle,
        phi: &'a GrowthFunction,
        bounds: &'a PipelineBounds,
    ) -> Result<Self, Exp2Error> {
        let root = NumberSet::interval(1, bounds.w_max);
        let verdict = match tail_query(oracle, &root, 0, phi, bounds)? {
            LargenessVerdict::Large { .. } => TreeVerdict::Large,
            LargenessVerdict::Unknown { .. } => TreeVerdict::Unknown,
            LargenessVerdict::SmallUpTo { .. } => return Err(Exp2Error::RootSmall),
        };
        Ok(Self {
            oracle,
            phi,
            bounds,
            tau: HelperString::default(),
            tails: vec![root],
            verdicts: vec![verdict],
        })
    }

    pub fn helper(&self) -> &HelperString {
        &self.tau
    }

    pub fn verdicts(&self) -> &[TreeVerdict] {
        &self.verdicts
    }

    pub fn unknown_steps(&self) -> usize {
        self.verdicts.iter().filter(|v| **v == TreeVerdict::Unknown).count()
    }

    /// Tail set of the current helper.
    pub fn tail(&self) -> &NumberSet {
        self.tails.last().expect("root tail")
    }

    pub fn extend(&mut self) -> Result<Color, Exp2Error> {
        let (c, verdict, next) = choose_extension(self.oracle, self.tail(), self.tau.len(), self.phi, self.bounds)?;
        self.tau = self.tau.extended(c);
        self.tails.push(next);
        self.verdicts.push(verdict);
        Ok(c)
    }

    pub fn extend_to(&mut self, len: usize) -> Result<(), Exp2Error> {
        while self.tau.len() < len {
            self.extend()?;
        }
        Ok(())
    }
}

/// Least-code `Y ⊆ cands` with `|Y| = size`, homogeneous for `f` and
/// constant under `tau`. Choosing the top element first, in increasing
/// order, and recursing below it visits sets in colex order.
fn least_block(pairs: &PairColoring, tau: &[Color], cands: &[Point], size: usize) -> Option<Vec<Point>> {
    if size == 0 {
        return Some(Vec::new());
    }
    for (i, &top) in cands.iter().enumerate() {
        if i + 1 < size {
            continue;
        }
        let v = tau[top as usize - 1];
        let same: Vec<Point> = cands[..i]
            .iter()
            .copied()
            .filter(|&z| tau[z as usize - 1] == v)
            .collect();
        if size == 1 {
            return Some(vec![top]);
        }
        let mut best: Option<Vec<Point>> = None;
        for col in 1..=pairs.palette() {
            let below: Vec<Point> = same.iter().copied().filter(|&z| pairs.color(z, top) == col).collect();
            if let Some(mut rest) = least_clique(pairs, col, &below, size - 1) {
                rest.push(top);
                let better = match &best {
                    None => true,
                    Some(b) => rest.iter().rev().lt(b.iter().rev()),
                };
                if better {
                    best = Some(rest);
                }
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Least-code `size`-clique of color `col` inside `cands`.
fn least_clique(pairs: &PairColoring, col: Color, cands: &[Point], size: usize) -> Option<Vec<Point>> {
    if size == 0 {
        return Some(Vec::new());
    }
    for (i, &top) in cands.iter().enumerate() {
        if i + 1 < size {
            continue;
        }
        let below: Vec<Point> = cands[..i]
            .iter()
            .copied()
            .filter(|&z| pairs.color(z, top) == col)
            .collect();
        if let Some(mut rest) = least_clique(pairs, col, &below, size - 1) {
            rest.push(top);
            return Some(rest);
        }
    }
    None
}

/// Smallest `w > m`, then least-code `Y ⊆ (m, w] ∩ X` with
/// `|Y| = max(φ(w), 1)`, homogeneous for `f` and the helper. The helper is
/// extended up to `w` as the scan proceeds.
pub fn next_block(path: &mut HelperPath<'_>, x: &NumberSet, m: Point) -> Result<(Point, NumberSet), Exp2Error> {
    let w_max = path.bounds.w_max;
    for w in m + 1..=w_max {
        let cands = x.within(m, w);
        let size = path.phi.eval(w).max(1) as usize;
        // For non-decreasing φ, a block first appearing at w must use w.
        if cands.len() < size || (path.phi.is_nondecreasing() && cands.last() != Some(&w)) {
            continue;
        }
        path.extend_to(w as usize)?;
        if let Some(y) = least_block(path.oracle.pairs(), path.tau.values(), cands, size) {
            return Ok((w, NumberSet::from_sorted_unchecked(y)));
        }
    }
    Err(Exp2Error::NoBlock { m, w_max })
}

/// Outcome of [`build_pipeline`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exp2Pipeline {
    pub helper: HelperString,
    /// All blocks; the ladder is `w_0 = 1 < w_1 < ... < w_N`.
    pub seq: BlockSequence,
    /// `f₁(i)`: the color every pair from block `i` to a later block gets.
    pub induced_between: Vec<Color>,
    /// `f₂(i)`: the color inside block `i` (none for singletons).
    pub induced_within: Vec<Option<Color>>,
    /// 1-based indices of the blocks with the most frequent `(f₁, f₂)`.
    pub selected: Vec<usize>,
    pub result: NumberSet,
    pub confidence: Confidence,
    /// Tree verdict of every prefix of the helper, by length.
    pub helper_verdicts: Vec<TreeVerdict>,
    pub hypothesis: Option<HypothesisReport>,
}

impl Exp2Pipeline {
    pub fn blocks(&self) -> Vec<NumberSet> {
        self.seq.blocks()
    }

    pub fn ladder(&self) -> &IntervalLadder {
        self.seq.ladder()
    }

    pub fn chosen_pair(&self) -> (Color, Option<Color>) {
        let i = self.selected[0];
        (self.induced_between[i - 1], self.induced_within[i - 1])
    }
}

pub fn build_pipeline(
    f: &ColoringRule,
    phi: &GrowthFunction,
    num_blocks: usize,
    bounds: &PipelineBounds,
) -> Result<Exp2Pipeline, Exp2Error> {
    if f.exponent() != 2 {
        return Err(Exp2Error::NotPairs(f.exponent()));
    }
    if num_blocks == 0 {
        return Err(Exp2Error::NoBlocks);
    }
    if bounds.w_max > f.horizon() {
        return Err(Exp2Error::WmaxBeyondHorizon {
            w_max: bounds.w_max,
            horizon: f.horizon(),
        });
    }
    let oracle = LargenessOracle::new(f)?;
    let mut path = HelperPath::new(&oracle, phi, bounds)?;
    let mut ladder = vec![1];
    let mut blocks: Vec<NumberSet> = Vec::with_capacity(num_blocks);
    let mut x = NumberSet::interval(1, bounds.w_max);
    for _ in 0..num_blocks {
        let m = *ladder.last().expect("w_0");
        let (w, y) = next_block(&mut path, &x, m)?;
        path.extend_to(w as usize)?;
        ladder.push(w);
        blocks.push(y);
        x = path.tail().clone();
    }
    let tau = path.helper().clone();
    let pairs = oracle.pairs();
    let induced_between: Vec<Color> = blocks
        .iter()
        .map(|y| tau.get(y.min().expect("nonempty")).expect("helper covers blocks"))
        .collect();
    // Every pair from block i to a later block must get f₁(i).
    for (i, yi) in blocks.iter().enumerate() {
        for yj in &blocks[i + 1..] {
            for xp in yi.iter() {
                for yp in yj.iter() {
                    let got = pairs.color(xp, yp);
                    if got != induced_between[i] {
                        return Err(Exp2Error::InvariantViolation {
                            x: xp,
                            y: yp,
                            got,
                            expected: induced_between[i],
                        });
                    }
                }
            }
        }
    }
    let induced_within: Vec<Option<Color>> = blocks
        .iter()
        .map(|y| (y.len() >= 2).then(|| pairs.color(y.as_slice()[0], y.as_slice()[1])))
        .collect();
    let mut freq: BTreeMap<(Color, Option<Color>), usize> = BTreeMap::new();
    for i in 0..num_blocks {
        *freq.entry((induced_between[i], induced_within[i])).or_default() += 1;
    }
    // Most frequent pair; the map iterates in increasing order, so the first
    // maximum is the smallest pair.
    let best = freq.iter().fold(
        None,
        |acc: Option<(&(Color, Option<Color>), usize)>, (k, &v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((k, v)),
        },
    );
    let chosen = *best.expect("at least one block").0;
    let selected: Vec<usize> = (1..=num_blocks)
        .filter(|&i| (induced_between[i - 1], induced_within[i - 1]) == chosen)
        .collect();
    let mut members = Vec::new();
    for &i in &selected {
        members.extend_from_slice(blocks[i - 1].as_slice());
    }
    let result = NumberSet::from_sorted_unchecked(members);
    let all: Vec<Point> = blocks.iter().flat_map(|b| b.iter()).collect();
    let seq = BlockSequence::new(
        NumberSet::from_sorted_unchecked(all),
        IntervalLadder::new(ladder.clone()).expect("increasing"),
    )
    .expect("blocks lie in their intervals");
    let hypothesis = match bounds.hypothesis_budget {
        Some(budget) => {
            let last = *ladder.last().expect("nonempty");
            let range: RangeInclusive<Point> = 1..=last;
            let report = check_growth_hypothesis(phi, 2, f.palette(), range, budget)?;
            if !report.failures.is_empty() {
                return Err(Exp2Error::HypothesisFailures(report.failures));
            }
            Some(report)
        }
        None => None,
    };
    let unknown_steps = path.unknown_steps();
    Ok(Exp2Pipeline {
        helper: tau,
        seq,
        induced_between,
        induced_within,
        selected,
        result,
        confidence: if unknown_steps == 0 {
            Confidence::Certified
        } else {
            Confidence::Downgraded { unknown_steps }
        },
        helper_verdicts: path.verdicts().to_vec(),
        hypothesis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{colors_used, Rule};

    fn bounds() -> PipelineBounds {
        PipelineBounds::new(60, 2, 2, 200_000)
    }

    #[test]
    fn constant_keeps_every_block() {
        let f = ColoringRule::constant(2, 2, 60, 1).unwrap();
        let phi = GrowthFunction::Const(2);
        let p = build_pipeline(&f, &phi, 4, &bounds()).unwrap();
        assert_eq!(p.selected, vec![1, 2, 3, 4]);
        assert_eq!(
            colors_used(&f, &p.result).unwrap().into_iter().collect::<Vec<_>>(),
            vec![1]
        );
        assert_eq!(p.confidence, Confidence::Certified);
        assert!(p.helper.values().iter().all(|&c| c == 1));
    }

    #[test]
    fn parity_helper_is_forced() {
        let f = ColoringRule::from_rule(2, 2, 60, Rule::MinParity).unwrap();
        let phi = GrowthFunction::Const(2);
        let p = build_pipeline(&f, &phi, 6, &bounds()).unwrap();
        for (i, &c) in p.helper.values().iter().enumerate() {
            assert_eq!(c, 1 + (i as u32 + 1) % 2);
        }
        assert!(colors_used(&f, &p.result).unwrap().len() <= 2);
    }

    #[test]
    fn first_block_for_constant() {
        let f = ColoringRule::constant(2, 2, 60, 1).unwrap();
        let phi = GrowthFunction::Const(2);
        let b = bounds();
        let oracle = LargenessOracle::new(&f).unwrap();
        let mut path = HelperPath::new(&oracle, &phi, &b).unwrap();
        let (w, y) = next_block(&mut path, &NumberSet::interval(1, 60), 0).unwrap();
        assert_eq!((w, y.as_slice()), (2, &[1, 2][..]));
    }

    #[test]
    fn in_tree_examples() {
        let f = ColoringRule::from_rule(2, 2, 60, Rule::MinParity).unwrap();
        let oracle = LargenessOracle::new(&f).unwrap();
        let phi = GrowthFunction::Const(2);
        let b = bounds();
        assert!(in_tree(&HelperString::default(), &oracle, &phi, &b).unwrap().is_large());
        // f({1,y}) = 2 for every y, so τ(1) = 2 keeps the tail and τ(1) = 1 empties it.
        assert!(in_tree(&HelperString::new(vec![2]), &oracle, &phi, &b)
            .unwrap()
            .is_large());
        assert!(in_tree(&HelperString::new(vec![1]), &oracle, &phi, &b)
            .unwrap()
            .is_small());
        let (ext, v) = extend_path(&HelperString::new(vec![2]), &oracle, &phi, &b).unwrap();
        assert_eq!((ext.values(), v), (&[2, 1][..], TreeVerdict::Large));
    }

    #[test]
    fn dead_color_switches_path() {
        // f({3,y}) = 2 for all y, 1 elsewhere.
        let mut colors = Vec::new();
        for y in 2..=60u32 {
            for x in 1..y {
                colors.push(if x == 3 { 2 } else { 1 });
            }
        }
        let f = ColoringRule::from_table(2, 2, 60, colors).unwrap();
        let oracle = LargenessOracle::new(&f).unwrap();
        let phi = GrowthFunction::Const(2);
        let b = bounds();
        let mut path = HelperPath::new(&oracle, &phi, &b).unwrap();
        path.extend_to(4).unwrap();
        assert_eq!(path.helper().values(), &[1, 1, 2, 1]);
    }

    #[test]
    fn empty_tail_errors() {
        let f = ColoringRule::constant(2, 2, 60, 1).unwrap();
        let phi = GrowthFunction::Const(2);
        let b = bounds();
        let oracle = LargenessOracle::new(&f).unwrap();
        let mut path = HelperPath::new(&oracle, &phi, &b).unwrap();
        assert!(matches!(
            next_block(&mut path, &NumberSet::empty(), 0),
            Err(Exp2Error::NoBlock { .. })
        ));
    }

    #[test]
    fn helper_prefix_relation() {
        let a = HelperString::new(vec![1, 2]);
        assert!(a.is_prefix_of(&a.extended(1)));
        assert!(!a.extended(1).is_prefix_of(&a));
        assert_eq!(a.get(2), Some(2));
        assert_eq!(a.get(0), None);
    }
}
