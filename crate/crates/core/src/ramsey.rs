//! Finite arrow relations `w → (m)^n_k`, homogeneous-subset search, and the
//! growth-function helpers derived from them.

use std::collections::BTreeMap;
use std::ops::{ControlFlow, RangeInclusive};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::coloring::{Color, ColoringError, ColoringRule};
use crate::growth::GrowthFunction;
use crate::set::{binomial, for_each_subset, NumberSet, Point};

/// Largest number of `n`-subsets the counterexample search will slot.
pub const MAX_SLOTS: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamseyError {
    #[error("undecided: budget exhausted after {} nodes ({:?})", .0.nodes, .0.elapsed)]
    Undecided(SearchStats),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("{slots} subsets are too many to search")]
    TooLarge { slots: u64 },
    #[error("growth function violates w -> (φ(w))^1_{colors} at w = {w}: φ(w) = {phi} > {bound}")]
    Hypothesis {
        w: Point,
        phi: u32,
        bound: u32,
        colors: u32,
    },
    #[error("no witness above {m} found up to {cap}")]
    ScanCap { m: Point, cap: u64 },
    #[error("certificate failed re-verification")]
    BadCertificate,
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Node count and wall time of a search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed: Duration,
}

/// `w → (m)^n_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArrowQuery {
    pub w: Point,
    pub m: u32,
    pub n: u32,
    pub k: u32,
}

impl ArrowQuery {
    pub fn new(w: Point, m: u32, n: u32, k: u32) -> Self {
        Self { w, m, n, k }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowAnswer {
    pub holds: bool,
    /// A coloring of `[{1..w}]^n` with no homogeneous `m`-set, when the
    /// relation fails.
    pub certificate: Option<ColoringRule>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrowOptions {
    /// Answer `k = 1` and `n = 1` in closed form instead of searching.
    pub fast_paths: bool,
}

impl Default for ArrowOptions {
    fn default() -> Self {
        Self { fast_paths: true }
    }
}

pub fn arrow_holds(q: ArrowQuery, budget: u64) -> Result<ArrowAnswer, RamseyError> {
    arrow_holds_with(q, budget, ArrowOptions::default())
}

pub fn arrow_holds_with(q: ArrowQuery, budget: u64, opts: ArrowOptions) -> Result<ArrowAnswer, RamseyError> {
    let ArrowQuery { w, m, n, k } = q;
    if n == 0 || k == 0 {
        return Err(RamseyError::InvalidQuery("n and k must be >= 1".into()));
    }
    if budget == 0 {
        return Err(RamseyError::InvalidQuery("budget must be >= 1".into()));
    }
    let start = Instant::now();
    let done = |holds: bool, certificate: Option<ColoringRule>, nodes: u64| ArrowAnswer {
        holds,
        certificate,
        stats: SearchStats {
            nodes,
            elapsed: start.elapsed(),
        },
    };
    // Degenerate cases: no m-subsets at all, or every m-subset is trivially
    // homogeneous.
    if m > w {
        return Ok(done(false, Some(ColoringRule::constant(n, k, w, 1)?), 0));
    }
    if m <= n {
        return Ok(done(true, None, 0));
    }
    if opts.fast_paths {
        if k == 1 {
            return Ok(done(true, None, 0));
        }
        if n == 1 {
            let need = u64::from(k) * u64::from(m - 1) + 1;
            if u64::from(w) >= need {
                return Ok(done(true, None, 0));
            }
            let colors = (1..=w).map(|x| (x - 1) % k + 1).collect();
            let cert = ColoringRule::from_table(1, k, w, colors)?;
            return Ok(done(false, Some(cert), 0));
        }
    }
    let mut search = CounterSearch::new(w, m, n, k, budget)?;
    let found = search.run().map_err(|()| {
        RamseyError::Undecided(SearchStats {
            nodes: search.nodes,
            elapsed: start.elapsed(),
        })
    })?;
    if !found {
        return Ok(done(true, None, search.nodes));
    }
    let cert = ColoringRule::from_table(n, k, w, search.colors.clone())?;
    if find_homogeneous_subset(&cert, m as usize).is_some() {
        return Err(RamseyError::BadCertificate);
    }
    Ok(done(false, Some(cert), search.nodes))
}

/// Backtracking search for a coloring of `[{1..w}]^n` without a homogeneous
/// `m`-set. Slots are the `n`-subsets in colex order; an `m`-set is complete
/// exactly when its top `n` points are slotted, so each assignment only has
/// to look for monochromatic sets whose top `n` points are the new slot.
struct CounterSearch {
    n: usize,
    m: usize,
    k: u32,
    slots: Vec<Vec<Point>>,
    /// `binom[a][b] = C(a, b)` for `a <= w`, `b <= n`.
    binom: Vec<Vec<u64>>,
    colors: Vec<Color>,
    nodes: u64,
    budget: u64,
}

impl CounterSearch {
    fn new(w: Point, m: u32, n: u32, k: u32, budget: u64) -> Result<Self, RamseyError> {
        let count = binomial(u64::from(w), u64::from(n)).unwrap_or(u64::MAX);
        if count > MAX_SLOTS {
            return Err(RamseyError::TooLarge { slots: count });
        }
        let ground = NumberSet::interval(1, w);
        let mut slots = Vec::with_capacity(count as usize);
        let _ = for_each_subset::<()>(ground.as_slice(), n as usize, |z| {
            slots.push(z.to_vec());
            ControlFlow::Continue(())
        });
        let binom = (0..=u64::from(w))
            .map(|a| (0..=u64::from(n)).map(|b| binomial(a, b).expect("small")).collect())
            .collect();
        Ok(Self {
            n: n as usize,
            m: m as usize,
            k,
            colors: vec![0; slots.len()],
            slots,
            binom,
            nodes: 0,
            budget,
        })
    }

    fn rank(&self, z: &[Point]) -> usize {
        z.iter()
            .enumerate()
            .map(|(i, &x)| self.binom[x as usize - 1][i + 1])
            .sum::<u64>() as usize
    }

    fn run(&mut self) -> Result<bool, ()> {
        self.dfs(0, 0)
    }

    fn dfs(&mut self, s: usize, max_used: u32) -> Result<bool, ()> {
        if s == self.slots.len() {
            return Ok(true);
        }
        // Colors are interchangeable, so a fresh color is only ever the
        // next unused one.
        for c in 1..=self.k.min(max_used + 1) {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            self.colors[s] = c;
            if !self.closes_mono(s, c) && self.dfs(s + 1, max_used.max(c))? {
                return Ok(true);
            }
        }
        self.colors[s] = 0;
        Ok(false)
    }

    /// Is there `B ⊆ {1..min Z - 1}` with `|B| = m - n` making `B ∪ Z`
    /// monochromatic in color `c`?
    fn closes_mono(&self, s: usize, c: Color) -> bool {
        let z = &self.slots[s];
        let mut b = Vec::with_capacity(self.m - self.n);
        self.extend_b(&mut b, 1, z, c)
    }

    fn extend_b(&self, b: &mut Vec<Point>, from: Point, z: &[Point], c: Color) -> bool {
        let need = self.m - self.n;
        if b.len() == need {
            return true;
        }
        for p in from..z[0] {
            if ((z[0] - p) as usize) < need - b.len() {
                break;
            }
            if self.compatible(b, p, z, c) {
                b.push(p);
                if self.extend_b(b, p + 1, z, c) {
                    return true;
                }
                b.pop();
            }
        }
        false
    }

    /// Every `n`-subset of `b ∪ {p} ∪ z` through `p` has color `c`
    /// (all of `b` lies below `p`, all of `z` above).
    fn compatible(&self, b: &[Point], p: Point, z: &[Point], c: Color) -> bool {
        let pool: Vec<Point> = b.iter().chain(z).copied().collect();
        let mut tuple = vec![0; self.n];
        for_each_subset(&pool, self.n - 1, |t| {
            let below = t.partition_point(|&x| x < p);
            tuple[..below].copy_from_slice(&t[..below]);
            tuple[below] = p;
            tuple[below + 1..].copy_from_slice(&t[below..]);
            if self.colors[self.rank(&tuple)] == c {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        })
        .is_continue()
    }
}

/// An `m`-element `f`-homogeneous subset of `{1..horizon}`, if any.
pub fn find_homogeneous_subset(f: &ColoringRule, m: usize) -> Option<NumberSet> {
    find_homogeneous_subset_within(f, &NumberSet::interval(1, f.horizon()), m)
        .expect("the full interval lies inside the horizon")
}

/// An `m`-element `f`-homogeneous subset of `ground`, if any. The search is
/// exhaustive, one color at a time.
pub fn find_homogeneous_subset_within(
    f: &ColoringRule,
    ground: &NumberSet,
    m: usize,
) -> Result<Option<NumberSet>, ColoringError> {
    f.check_set(ground)?;
    let n = f.exponent() as usize;
    if m <= n {
        return Ok((ground.len() >= m).then(|| NumberSet::from_sorted_unchecked(ground.as_slice()[..m].to_vec())));
    }
    for c in 1..=f.palette() {
        let cands: Vec<Point> = if n == 1 {
            ground.iter().filter(|&x| f.color(&[x]) == c).collect()
        } else {
            ground.as_slice().to_vec()
        };
        let mut cur = Vec::with_capacity(m);
        if grow_homogeneous(f, c, &mut cur, &cands, m) {
            return Ok(Some(NumberSet::from_sorted_unchecked(cur)));
        }
    }
    Ok(None)
}

/// Extends `cur` (all of whose `n`-subsets have color `c`) using `cands`,
/// each of which is compatible with `cur`.
fn grow_homogeneous(f: &ColoringRule, c: Color, cur: &mut Vec<Point>, cands: &[Point], m: usize) -> bool {
    if cur.len() == m {
        return true;
    }
    let n = f.exponent() as usize;
    let mut tuple = vec![0; n];
    for (i, &p) in cands.iter().enumerate() {
        if cur.len() + (cands.len() - i) < m {
            return false;
        }
        cur.push(p);
        let base = &cur[..cur.len() - 1];
        let next: Vec<Point> = if n < 2 || base.len() < n - 2 {
            cands[i + 1..].to_vec()
        } else {
            cands[i + 1..]
                .iter()
                .copied()
                .filter(|&q| {
                    for_each_subset(base, n - 2, |t| {
                        tuple[..n - 2].copy_from_slice(t);
                        tuple[n - 2] = p;
                        tuple[n - 1] = q;
                        if f.color(&tuple) == c {
                            ControlFlow::Continue(())
                        } else {
                            ControlFlow::Break(())
                        }
                    })
                    .is_continue()
                })
                .collect()
        };
        if grow_homogeneous(f, c, cur, &next, m) {
            return true;
        }
        cur.pop();
    }
    false
}

/// Largest `m` with `w → (m)^n_{k+1}`.
pub fn phi_max(w: Point, n: u32, k: u32, budget: u64) -> Result<u32, RamseyError> {
    if n == 0 || w < n {
        return Err(RamseyError::InvalidQuery(format!(
            "need 1 <= n <= w, got n = {n}, w = {w}"
        )));
    }
    if n == 1 {
        return Ok(w.div_ceil(k + 1));
    }
    for m in (n..=w).rev() {
        if arrow_holds(ArrowQuery::new(w, m, n, k + 1), budget)?.holds {
            return Ok(m);
        }
    }
    unreachable!("w -> (n)^n holds whenever w >= n")
}

/// Least `w > m` with `w - m → (φ(w))^1_k`.
///
/// The scan also checks `φ(w) <= ⌈w/(k+1)⌉` at every visited `w`. That bound
/// guarantees a witness by `(k+1)(m+1)`; violations are only fatal when the
/// scan reaches that cap without a witness, in which case the first violating
/// `w` is reported. Violations at small `w` that the scan gets past are
/// harmless. For non-decreasing `φ` the scan skips ahead by the current
/// deficit, which cannot skip a solution because the requirement never
/// shrinks.
pub fn claim16_witness(m: Point, k: u32, phi: &GrowthFunction) -> Result<Point, RamseyError> {
    if k == 0 {
        return Err(RamseyError::InvalidQuery("k must be >= 1".into()));
    }
    let cap = (u64::from(k) + 1) * (u64::from(m) + 1);
    let monotone = phi.is_nondecreasing();
    let mut violation = None;
    let mut w = u64::from(m) + 1;
    while w <= cap {
        let wp = Point::try_from(w).map_err(|_| RamseyError::ScanCap { m, cap })?;
        let v = phi.eval(wp);
        let bound = wp.div_ceil(k + 1);
        if v > bound && violation.is_none() {
            violation = Some(RamseyError::Hypothesis {
                w: wp,
                phi: v,
                bound,
                colors: k + 1,
            });
        }
        let required = if v == 0 { 0 } else { u64::from(k) * u64::from(v - 1) + 1 };
        let have = w - u64::from(m);
        if have >= required {
            return Ok(wp);
        }
        w += if monotone { required - have } else { 1 };
    }
    Err(violation.unwrap_or(RamseyError::ScanCap { m, cap }))
}

/// Outcome of checking `w → (φ(w))^n_{k+1}` over a range of `w`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HypothesisReport {
    /// Values of `w` where the relation was decided false.
    pub failures: Vec<Point>,
    /// Values of `w` where the search ran out of budget.
    pub undecided: Vec<Point>,
}

impl HypothesisReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty() && self.undecided.is_empty()
    }
}

/// Checks `w → (φ(w))^n_{k+1}` for every `w` in `range`, reusing decided
/// instances through monotonicity in `w` and `m`.
pub fn check_growth_hypothesis(
    phi: &GrowthFunction,
    n: u32,
    k: u32,
    range: RangeInclusive<Point>,
    budget: u64,
) -> Result<HypothesisReport, RamseyError> {
    let mut report = HypothesisReport::default();
    // target m -> smallest w known to satisfy w -> (m).
    let mut holds_from: BTreeMap<u32, Point> = BTreeMap::new();
    // target m -> largest w known to fail w -> (m).
    let mut fails_upto: BTreeMap<u32, Point> = BTreeMap::new();
    for w in range {
        let m = phi.eval(w);
        let known_true = holds_from.range(m..).any(|(_, &w0)| w0 <= w);
        let known_false = fails_upto.range(..=m).any(|(_, &w0)| w0 >= w);
        if known_true {
            continue;
        }
        if known_false {
            report.failures.push(w);
            continue;
        }
        match arrow_holds(ArrowQuery::new(w, m, n, k + 1), budget) {
            Ok(a) if a.holds => {
                let e = holds_from.entry(m).or_insert(w);
                *e = (*e).min(w);
            }
            Ok(_) => {
                report.failures.push(w);
                let e = fails_upto.entry(m).or_insert(w);
                *e = (*e).max(w);
            }
            Err(RamseyError::Undecided(_)) => report.undecided.push(w),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 10_000_000;

    fn c5() -> ColoringRule {
        // Pairs at cyclic distance 1 get color 1, distance 2 color 2.
        let mut colors = Vec::new();
        for y in 2..=5u32 {
            for x in 1..y {
                let d = (y - x).min(5 - (y - x));
                colors.push(d);
            }
        }
        ColoringRule::from_table(2, 2, 5, colors).unwrap()
    }

    #[test]
    fn classical_pairs() {
        let yes = arrow_holds(ArrowQuery::new(6, 3, 2, 2), BUDGET).unwrap();
        assert!(yes.holds && yes.certificate.is_none());
        let no = arrow_holds(ArrowQuery::new(5, 3, 2, 2), BUDGET).unwrap();
        assert!(!no.holds);
        assert!(find_homogeneous_subset(&no.certificate.unwrap(), 3).is_none());
    }

    #[test]
    fn pentagon_has_no_triangle() {
        assert!(find_homogeneous_subset(&c5(), 3).is_none());
        assert!(find_homogeneous_subset(&c5(), 2).is_some());
    }

    #[test]
    fn constant_is_fully_homogeneous() {
        let f = ColoringRule::constant(3, 2, 7, 2).unwrap();
        assert_eq!(find_homogeneous_subset(&f, 7), Some(NumberSet::interval(1, 7)));
    }

    #[test]
    fn exhausted_budget_is_loud() {
        let r = arrow_holds(ArrowQuery::new(6, 3, 2, 2), 10);
        assert!(matches!(r, Err(RamseyError::Undecided(SearchStats { nodes: 11, .. }))));
    }

    #[test]
    fn phi_max_examples() {
        assert_eq!(phi_max(9, 1, 2, BUDGET).unwrap(), 3);
        assert_eq!(phi_max(5, 2, 1, BUDGET).unwrap(), 2);
        assert_eq!(phi_max(6, 2, 1, BUDGET).unwrap(), 3);
    }

    #[test]
    fn witness_examples() {
        assert_eq!(claim16_witness(0, 1, &GrowthFunction::CeilDiv(2)).unwrap(), 1);
        assert_eq!(claim16_witness(7, 3, &GrowthFunction::Const(1)).unwrap(), 8);
        // Direct scan for m = 4, k = 2, φ = ⌈w/3⌉.
        let phi = GrowthFunction::CeilDiv(3);
        let expect = (5..).find(|&w: &u32| w - 4 > 2 * (w.div_ceil(3) - 1)).unwrap();
        assert_eq!(claim16_witness(4, 2, &phi).unwrap(), expect);
        let table = GrowthFunction::Table(vec![1, 2, 1, 1, 3, 1]);
        assert_eq!(claim16_witness(2, 1, &table).unwrap(), 3);
        assert!(matches!(
            claim16_witness(2, 2, &GrowthFunction::CeilDiv(2)),
            Err(RamseyError::Hypothesis { w: 3, .. })
        ));
    }

    #[test]
    fn hypothesis_report() {
        // w -> (2)^2_2 needs w >= 2; φ ≡ 2 therefore fails only at w = 1.
        let r = check_growth_hypothesis(&GrowthFunction::Const(2), 2, 1, 1..=8, BUDGET).unwrap();
        assert_eq!(r.failures, vec![1]);
        let r = check_growth_hypothesis(&GrowthFunction::Const(3), 2, 1, 4..=8, BUDGET).unwrap();
        assert_eq!(r.failures, vec![4, 5]);
    }

    #[test]
    fn search_without_fast_paths_matches_pigeonhole() {
        let opts = ArrowOptions { fast_paths: false };
        for k in 1..=3 {
            for m in 1..=4 {
                for w in 1..=9 {
                    let a = arrow_holds_with(ArrowQuery::new(w, m, 1, k), BUDGET, opts).unwrap();
                    assert_eq!(a.holds, w > k * (m - 1), "w={w} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn certificates_reverify_for_triples() {
        let a = arrow_holds(ArrowQuery::new(6, 4, 3, 2), BUDGET).unwrap();
        assert!(!a.holds);
        let cert = a.certificate.unwrap();
        assert!(find_homogeneous_subset(&cert, 4).is_none());
    }
}
