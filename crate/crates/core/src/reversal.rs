//! Partition-type colorings along a ladder, the merged coloring `h`, and
//! extraction of homogeneous sets from packed semi-homogeneous ones.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::coloring::{Color, ColoringError, ColoringRule, Rule};
use crate::growth::GrowthFunction;
use crate::partition::{partition_types, IntervalLadder, PartitionError, PartitionType};
use crate::set::{NumberSet, Point};

/// Largest boundary [`build_sharp_ladder`] will search for.
pub const SHARP_SCAN_CAP: Point = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReversalError {
    #[error("growth function {0} is not an order function")]
    NotOrderFunction(String),
    #[error("growth function never reaches {target} below {cap} (boundary {index})")]
    ScanCap { index: usize, target: u64, cap: Point },
    #[error("growth function decreases between {0} and {1}")]
    Decreasing(Point, Point),
    #[error("exponent mismatch: coloring has {f}, sharp coloring has {g}")]
    ExponentMismatch { f: u32, g: u32 },
    #[error("exponent {0} is out of range")]
    BadExponent(u32),
    #[error("sharp ladders must start at boundary 0")]
    LadderStart,
    #[error("point {point} lies outside the ladder span ({lo}, {hi}]")]
    OutsideSpan { point: Point, lo: Point, hi: Point },
    #[error("partition types {0:?} do not occur in the set")]
    MissingTypes(Vec<String>),
    #[error("all-ones subsets receive two colors: {first} and {second}")]
    ConflictingAllOnesColors { first: Color, second: Color },
    #[error("the set has no all-ones subset")]
    NoAllOnesSubset,
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// The coloring `Z ↦ partition type of Z` along a ladder starting at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharpColoring {
    n: u32,
    ladder: IntervalLadder,
}

impl SharpColoring {
    pub fn new(n: u32, ladder: IntervalLadder) -> Result<Self, ReversalError> {
        if n == 0 || n > 31 {
            return Err(ReversalError::BadExponent(n));
        }
        if ladder.span().0 != 0 {
            return Err(ReversalError::LadderStart);
        }
        Ok(Self { n, ladder })
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn ladder(&self) -> &IntervalLadder {
        &self.ladder
    }

    /// `2^(n-1)`.
    pub fn palette(&self) -> u32 {
        1 << (self.n - 1)
    }

    /// Closed-form rule over the whole span.
    pub fn rule(&self) -> ColoringRule {
        ColoringRule::from_rule(
            self.n,
            self.palette(),
            self.ladder.span().1,
            Rule::Sharp(self.ladder.clone()),
        )
        .expect("validated on construction")
    }

    pub fn type_of(&self, z: &NumberSet) -> Result<PartitionType, ReversalError> {
        if z.len() != self.n as usize {
            return Err(ColoringError::WrongSize {
                expected: self.n,
                got: z.len(),
            }
            .into());
        }
        Ok(crate::partition::partition_type_of(z, &self.ladder)?)
    }
}

/// Serialized color of a partition type under the sharp coloring.
pub fn type_color(t: &PartitionType) -> Color {
    t.index() as Color + 1
}

/// Serialized color of a partition type under a merged coloring whose base
/// palette is `k`; all-ones types have no fixed color.
pub fn merged_type_color(k: u32, t: &PartitionType) -> Option<Color> {
    match t.index() {
        0 => None,
        i => Some(k + i as Color),
    }
}

/// Boundaries `0 < 1 = w_1 < w_2 < ... < w_count` with `w_i` the least
/// `w > w_{i-1}` satisfying `φ(w) >= n·i`.
///
/// The leading 0 makes the first interval `(0, 1]`, so every point of the
/// span lies in some interval.
pub fn build_sharp_ladder(phi: &GrowthFunction, n: u32, count: usize) -> Result<IntervalLadder, ReversalError> {
    if !phi.is_order_function() {
        return Err(ReversalError::NotOrderFunction(phi.to_string()));
    }
    if n == 0 || n > 31 {
        return Err(ReversalError::BadExponent(n));
    }
    let mut bounds: Vec<Point> = vec![0];
    if count >= 1 {
        bounds.push(1);
    }
    for i in 2..=count {
        let prev = *bounds.last().expect("nonempty");
        let target = u64::from(n) * i as u64;
        let reaches = |w: Point| u64::from(phi.eval(w)) >= target;
        // Gallop, then bisect: φ is non-decreasing.
        let mut step = 1u32;
        let mut lo = prev; // reaches(lo) is false or lo is the previous boundary
        let mut hi = prev.checked_add(1).ok_or(ReversalError::ScanCap {
            index: i,
            target,
            cap: SHARP_SCAN_CAP,
        })?;
        while !reaches(hi) {
            lo = hi;
            step = step.saturating_mul(2);
            hi = hi.saturating_add(step);
            if hi > SHARP_SCAN_CAP {
                return Err(ReversalError::ScanCap {
                    index: i,
                    target,
                    cap: SHARP_SCAN_CAP,
                });
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if reaches(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if phi.eval(hi) < phi.eval(prev) {
            return Err(ReversalError::Decreasing(prev, hi));
        }
        bounds.push(hi);
    }
    Ok(IntervalLadder::new(bounds).expect("strictly increasing by construction"))
}

/// The sharp coloring as a [`ColoringRule`] with palette `2^(n-1)`.
pub fn sharp_g(ladder: &IntervalLadder, n: u32) -> Result<ColoringRule, ReversalError> {
    Ok(SharpColoring::new(n, ladder.clone())?.rule())
}

/// `h(Z) = f(Z)` on all-ones types, the merged type color otherwise.
/// Palette `2^(n-1) - 1 + k`; horizon the smaller of `f`'s and the span.
pub fn merge_h(f: &ColoringRule, g: &SharpColoring) -> Result<ColoringRule, ReversalError> {
    if f.exponent() != g.n {
        return Err(ReversalError::ExponentMismatch {
            f: f.exponent(),
            g: g.n,
        });
    }
    let horizon = f.horizon().min(g.ladder.span().1);
    let base = f.with_horizon(horizon)?;
    let k = f.palette() + g.palette() - 1;
    Ok(ColoringRule::from_rule(
        g.n,
        k,
        horizon,
        Rule::Merged {
            ladder: g.ladder.clone(),
            base: Box::new(base),
        },
    )?)
}

/// The least point of `A` in each ladder interval; points outside the span
/// are ignored.
pub fn extract_homogeneous(a: &NumberSet, ladder: &IntervalLadder) -> NumberSet {
    let mut out = Vec::new();
    for i in 1..=ladder.num_intervals() {
        let (lo, hi) = ladder.interval(i);
        if let Some(&x) = a.within(lo, hi).first() {
            out.push(x);
        }
    }
    NumberSet::from_sorted_unchecked(out)
}

fn interval_counts(a: &NumberSet, ladder: &IntervalLadder) -> Result<Vec<usize>, ReversalError> {
    let (lo, hi) = ladder.span();
    if let Some(point) = a.iter().find(|&x| x <= lo || x > hi) {
        return Err(ReversalError::OutsideSpan { point, lo, hi });
    }
    Ok((1..=ladder.num_intervals())
        .map(|i| {
            let (l, h) = ladder.interval(i);
            a.within(l, h).len()
        })
        .collect())
}

/// Does some `n`-subset of a set with these per-interval counts have type `t`?
fn type_occurs(counts: &[usize], t: &PartitionType) -> bool {
    // Greedy: give each part the earliest interval that can hold it.
    let mut parts = t.parts().iter();
    let mut need = parts.next();
    for &c in counts {
        match need {
            Some(&r) if c >= r as usize => need = parts.next(),
            Some(_) => {}
            None => break,
        }
    }
    need.is_none()
}

/// The partition types of exponent `n` realized by some `n`-subset of `A`.
pub fn types_present(a: &NumberSet, ladder: &IntervalLadder, n: u32) -> Result<Vec<PartitionType>, ReversalError> {
    let counts = interval_counts(a, ladder)?;
    Ok(partition_types(n)
        .into_iter()
        .filter(|t| type_occurs(&counts, t))
        .collect())
}

/// The unique `f`-color of the all-ones `n`-subsets of `A`, after checking
/// that every other partition type occurs in `[A]^n`.
pub fn unique_allones_color(f: &ColoringRule, g: &SharpColoring, a: &NumberSet) -> Result<Color, ReversalError> {
    if f.exponent() != g.n {
        return Err(ReversalError::ExponentMismatch {
            f: f.exponent(),
            g: g.n,
        });
    }
    f.check_set(a)?;
    let counts = interval_counts(a, &g.ladder)?;
    let missing: Vec<String> = partition_types(g.n)
        .into_iter()
        .filter(|t| !t.is_all_ones() && !type_occurs(&counts, t))
        .map(|t| t.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ReversalError::MissingTypes(missing));
    }
    // Points tagged with their interval, then every choice of n points from
    // n distinct intervals.
    let tagged: Vec<(usize, Point)> = a
        .iter()
        .map(|x| (g.ladder.locate(x).expect("checked against the span"), x))
        .collect();
    let mut seen: BTreeSet<Color> = BTreeSet::new();
    let mut z = Vec::with_capacity(g.n as usize);
    allones_scan(f, &tagged, 0, 0, g.n as usize, &mut z, &mut seen)?;
    match seen.len() {
        0 => Err(ReversalError::NoAllOnesSubset),
        1 => Ok(*seen.first().expect("one color")),
        _ => {
            let mut it = seen.into_iter();
            Err(ReversalError::ConflictingAllOnesColors {
                first: it.next().expect("two colors"),
                second: it.next().expect("two colors"),
            })
        }
    }
}

fn allones_scan(
    f: &ColoringRule,
    tagged: &[(usize, Point)],
    from: usize,
    last_interval: usize,
    n: usize,
    z: &mut Vec<Point>,
    seen: &mut BTreeSet<Color>,
) -> Result<(), ReversalError> {
    if z.len() == n {
        seen.insert(f.color(z));
        if seen.len() > 1 {
            let mut it = seen.iter();
            return Err(ReversalError::ConflictingAllOnesColors {
                first: *it.next().expect("two"),
                second: *it.next().expect("two"),
            });
        }
        return Ok(());
    }
    for idx in from..tagged.len() {
        let (interval, x) = tagged[idx];
        if interval <= last_interval {
            continue;
        }
        z.push(x);
        allones_scan(f, tagged, idx + 1, interval, n, z, seen)?;
        z.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(p: &[u32]) -> PartitionType {
        PartitionType::new(p.to_vec()).unwrap()
    }

    #[test]
    fn ladder_for_identity() {
        let l = build_sharp_ladder(&GrowthFunction::Id, 2, 5).unwrap();
        assert_eq!(l.boundaries(), &[0, 1, 4, 6, 8, 10]);
    }

    #[test]
    fn ladder_for_log() {
        let l = build_sharp_ladder(&GrowthFunction::CeilLog2Succ, 2, 5).unwrap();
        assert_eq!(l.boundaries(), &[0, 1, 8, 32, 128, 512]);
    }

    #[test]
    fn ladder_for_quarter() {
        let l = build_sharp_ladder(&GrowthFunction::CeilDiv(4), 2, 5).unwrap();
        assert_eq!(l.boundaries(), &[0, 1, 13, 21, 29, 37]);
    }

    #[test]
    fn constant_phi_rejected() {
        assert!(matches!(
            build_sharp_ladder(&GrowthFunction::Const(3), 2, 3),
            Err(ReversalError::NotOrderFunction(_))
        ));
    }

    #[test]
    fn sharp_colors() {
        let ladder = IntervalLadder::new(vec![0, 1, 5, 10]).unwrap();
        let g = SharpColoring::new(3, ladder.clone()).unwrap();
        let rule = g.rule();
        assert_eq!(rule.palette(), 4);
        assert_eq!(rule.color(&[2, 3, 4]), type_color(&ty(&[3])));
        assert_eq!(rule.color(&[1, 2, 6]), type_color(&ty(&[1, 1, 1])));
        assert_eq!(rule.color(&[2, 3, 7]), type_color(&ty(&[2, 1])));
        assert_eq!(g.type_of(&NumberSet::new(vec![2, 3, 7]).unwrap()).unwrap(), ty(&[2, 1]));
    }

    #[test]
    fn merged_palette_and_cases() {
        let ladder = IntervalLadder::new(vec![0, 1, 5, 10]).unwrap();
        let g = SharpColoring::new(2, ladder).unwrap();
        let f = ColoringRule::from_tag(2, 2, 20, "hash:4").unwrap();
        let h = merge_h(&f, &g).unwrap();
        assert_eq!((h.palette(), h.horizon()), (3, 10));
        assert_eq!(h.color(&[2, 7]), f.color(&[2, 7]));
        assert_eq!(h.color(&[2, 3]), 3);
        let one = ColoringRule::constant(1, 2, 20, 1).unwrap();
        assert!(matches!(merge_h(&one, &g), Err(ReversalError::ExponentMismatch { .. })));
    }

    #[test]
    fn extraction() {
        let ladder = IntervalLadder::new(vec![0, 1, 5, 10]).unwrap();
        assert_eq!(
            extract_homogeneous(&NumberSet::interval(1, 10), &ladder).as_slice(),
            &[1, 2, 6]
        );
        let gap = NumberSet::new(vec![1, 7, 8, 30]).unwrap();
        assert_eq!(extract_homogeneous(&gap, &ladder).as_slice(), &[1, 7]);
    }

    #[test]
    fn allones_color_cases() {
        let ladder = IntervalLadder::new(vec![0, 1, 5, 10]).unwrap();
        let g = SharpColoring::new(2, ladder).unwrap();
        let f = ColoringRule::constant(2, 2, 10, 2).unwrap();
        let a = NumberSet::new(vec![1, 2, 3, 6]).unwrap();
        assert_eq!(unique_allones_color(&f, &g, &a).unwrap(), 2);
        let sparse = NumberSet::new(vec![1, 2, 6]).unwrap();
        assert!(matches!(
            unique_allones_color(&f, &g, &sparse),
            Err(ReversalError::MissingTypes(_))
        ));
        let p = ColoringRule::from_tag(2, 2, 10, "sum-parity").unwrap();
        assert!(matches!(
            unique_allones_color(&p, &g, &a),
            Err(ReversalError::ConflictingAllOnesColors { first: 1, second: 2 })
        ));
        let lump = NumberSet::new(vec![2, 3]).unwrap();
        assert!(matches!(
            unique_allones_color(&f, &g, &lump),
            Err(ReversalError::NoAllOnesSubset)
        ));
    }
}
