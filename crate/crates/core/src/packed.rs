//! Packedness at a finite horizon, blocks, and increasing block sequences.

use std::ops::RangeInclusive;

use thiserror::Error;

use crate::coloring::{is_homogeneous, ColoringError, ColoringRule};
use crate::growth::GrowthFunction;
use crate::partition::IntervalLadder;
use crate::set::{NumberSet, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackedError {
    #[error("member {point} lies outside the ladder span ({lo}, {hi}]")]
    Straggler { point: Point, lo: Point, hi: Point },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// A member set together with the ladder cutting it into blocks
/// `Y_i = members ∩ (w_{i-1}, w_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSequence {
    members: NumberSet,
    ladder: IntervalLadder,
}

impl BlockSequence {
    pub fn new(members: NumberSet, ladder: IntervalLadder) -> Result<Self, PackedError> {
        let (lo, hi) = ladder.span();
        if let Some(point) = members.iter().find(|&x| x <= lo || x > hi) {
            return Err(PackedError::Straggler { point, lo, hi });
        }
        Ok(Self { members, ladder })
    }

    pub fn members(&self) -> &NumberSet {
        &self.members
    }

    pub fn ladder(&self) -> &IntervalLadder {
        &self.ladder
    }

    pub fn num_blocks(&self) -> usize {
        self.ladder.num_intervals()
    }

    /// Block `i` (1-based).
    pub fn block(&self, i: usize) -> NumberSet {
        let (lo, hi) = self.ladder.interval(i);
        NumberSet::from_sorted_unchecked(self.members.within(lo, hi).to_vec())
    }

    pub fn blocks(&self) -> Vec<NumberSet> {
        (1..=self.num_blocks()).map(|i| self.block(i)).collect()
    }

    /// Every block is nonempty.
    pub fn is_complete(&self) -> bool {
        (1..=self.num_blocks()).all(|i| {
            let (lo, hi) = self.ladder.interval(i);
            !self.members.within(lo, hi).is_empty()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackedVerdict {
    /// Some witness lies beyond the threshold.
    PackedAtHorizon,
    SparseAtHorizon,
}

/// The `w <= horizon` with `|A ∩ {1..w}| >= φ(w)`, stored as maximal runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedReport {
    pub horizon: Point,
    pub threshold: Point,
    pub witnesses: Vec<RangeInclusive<Point>>,
    pub verdict: PackedVerdict,
}

impl PackedReport {
    pub fn is_witness(&self, w: Point) -> bool {
        let i = self.witnesses.partition_point(|r| *r.end() < w);
        self.witnesses.get(i).is_some_and(|r| r.contains(&w))
    }

    pub fn witness_count(&self) -> u64 {
        self.witnesses.iter().map(|r| u64::from(r.end() - r.start()) + 1).sum()
    }

    pub fn iter_witnesses(&self) -> impl Iterator<Item = Point> + '_ {
        self.witnesses.iter().flat_map(|r| r.clone())
    }
}

/// [`packed_report_with_threshold`] with threshold 0.
pub fn packed_report(a: &NumberSet, phi: &GrowthFunction, horizon: Point) -> PackedReport {
    packed_report_with_threshold(a, phi, horizon, 0)
}

/// Witnesses of `|A ∩ {1..w}| >= φ(w)` up to `horizon`; the verdict is
/// packed when some witness exceeds `threshold`.
pub fn packed_report_with_threshold(
    a: &NumberSet,
    phi: &GrowthFunction,
    horizon: Point,
    threshold: Point,
) -> PackedReport {
    let mut runs: Vec<RangeInclusive<Point>> = Vec::new();
    let mut push = |lo: Point, hi: Point| match runs.last_mut() {
        Some(r) if *r.end() + 1 == lo => *r = *r.start()..=hi,
        _ => runs.push(lo..=hi),
    };
    if phi.is_nondecreasing() {
        // The count is constant on [a_j, a_{j+1}); there the witnesses are
        // the prefix where φ has not yet overtaken it.
        let pts = &a.as_slice()[..a.count_upto(horizon)];
        let mut start = 1;
        for j in 0..=pts.len() {
            let end = if j < pts.len() { pts[j] - 1 } else { horizon };
            if start <= end {
                let count = j as u32;
                if phi.eval(start) <= count {
                    // Last w in [start, end] with φ(w) <= count.
                    let (mut lo, mut hi) = (start, end);
                    while lo < hi {
                        let mid = lo + (hi - lo).div_ceil(2);
                        if phi.eval(mid) <= count {
                            lo = mid;
                        } else {
                            hi = mid - 1;
                        }
                    }
                    push(start, lo);
                }
            }
            if j < pts.len() {
                start = pts[j];
            }
        }
    } else {
        let mut count = 0u32;
        let mut it = a.iter().peekable();
        for w in 1..=horizon {
            while it.next_if(|&x| x <= w).is_some() {
                count += 1;
            }
            if count >= phi.eval(w) {
                push(w, w);
            }
        }
    }
    let verdict = if runs.last().is_some_and(|r| *r.end() > threshold) {
        PackedVerdict::PackedAtHorizon
    } else {
        PackedVerdict::SparseAtHorizon
    };
    PackedReport {
        horizon,
        threshold,
        witnesses: runs,
        verdict,
    }
}

/// `Y` is `f`-homogeneous and `|Y| >= φ(w)` for some `w >= max Y`.
///
/// For non-decreasing `φ` only `w = max Y` matters; otherwise `w` ranges up
/// to the horizon of `f`.
pub fn is_block(y: &NumberSet, f: &ColoringRule, phi: &GrowthFunction) -> Result<bool, ColoringError> {
    let Some(top) = y.max() else {
        return Ok(false);
    };
    if !is_homogeneous(f, y)?.is_homogeneous() {
        return Ok(false);
    }
    let size = y.len() as u64;
    if phi.is_nondecreasing() {
        return Ok(size >= u64::from(phi.eval(top)));
    }
    Ok((top..=f.horizon()).any(|w| size >= u64::from(phi.eval(w))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockDefect {
    NotHomogeneous { index: usize },
    TooSmall { index: usize, size: usize, need: u32 },
}

/// The first block failing homogeneity or `|Y_i| >= φ(w_i)`, if any.
pub fn find_block_defect(
    seq: &BlockSequence,
    f: &ColoringRule,
    phi: &GrowthFunction,
) -> Result<Option<BlockDefect>, ColoringError> {
    for index in 1..=seq.num_blocks() {
        let y = seq.block(index);
        if !is_homogeneous(f, &y)?.is_homogeneous() {
            return Ok(Some(BlockDefect::NotHomogeneous { index }));
        }
        let need = phi.eval(seq.ladder().boundary(index));
        if (y.len() as u64) < u64::from(need) {
            return Ok(Some(BlockDefect::TooSmall {
                index,
                size: y.len(),
                need,
            }));
        }
    }
    Ok(None)
}

pub fn is_increasing_block_sequence(
    seq: &BlockSequence,
    f: &ColoringRule,
    phi: &GrowthFunction,
) -> Result<bool, ColoringError> {
    Ok(find_block_defect(seq, f, phi)?.is_none())
}
