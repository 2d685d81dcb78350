//! Partition types (compositions of `n`), interval ladders, and the
//! "good with W" predicate on helper colorings.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use thiserror::Error;

use crate::coloring::{Color, ColoringError, ColoringRule};
use crate::set::{for_each_subset, NumberSet, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("a partition type needs at least one part")]
    EmptyType,
    #[error("partition type parts must be >= 1")]
    ZeroPart,
    #[error("partition types are limited to exponent {MAX_TYPE_EXPONENT}, got {0}")]
    ExponentTooLarge(u64),
    #[error("malformed partition type {0:?}")]
    Malformed(String),
    #[error("a ladder needs at least one boundary")]
    EmptyLadder,
    #[error("ladder boundaries must be strictly increasing (position {index})")]
    LadderNotIncreasing { index: usize },
    #[error("point {point} lies outside the ladder span ({lo}, {hi}]")]
    OutsideLadder { point: Point, lo: Point, hi: Point },
    #[error("no helper coloring supplied for type {0}")]
    MissingHelper(PartitionType),
    #[error("helper for type {ty} has exponent {got}, expected {expected}")]
    HelperExponent { ty: PartitionType, expected: u32, got: u32 },
    #[error("W must lie entirely below Z")]
    NotSeparated,
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Largest exponent a [`PartitionType`] may have, so that its index fits a
/// machine word.
pub const MAX_TYPE_EXPONENT: u32 = 63;

/// A composition `(r_1, ..., r_l)` of its exponent `r_1 + ... + r_l`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionType(Vec<u32>);

impl PartitionType {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::EmptyType);
        }
        if parts.contains(&0) {
            return Err(PartitionError::ZeroPart);
        }
        let n: u64 = parts.iter().map(|&r| u64::from(r)).sum();
        if n > u64::from(MAX_TYPE_EXPONENT) {
            return Err(PartitionError::ExponentTooLarge(n));
        }
        Ok(Self(parts))
    }

    /// The all-ones type of exponent `n`.
    pub fn all_ones(n: u32) -> Self {
        debug_assert!((1..=MAX_TYPE_EXPONENT).contains(&n));
        Self(vec![1; n as usize])
    }

    /// The single-part type `(n)`.
    pub fn whole(n: u32) -> Self {
        debug_assert!((1..=MAX_TYPE_EXPONENT).contains(&n));
        Self(vec![n])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&r| r == 1)
    }

    /// Position in the lexicographic order of [`partition_types`].
    pub fn index(&self) -> usize {
        let n = self.exponent();
        let mut mask = 0usize;
        let mut pos = 0u32;
        for &r in &self.0[..self.0.len() - 1] {
            pos += r;
            mask |= 1 << (n - 1 - pos);
        }
        full_mask(n) - mask
    }

    /// Inverse of [`PartitionType::index`].
    pub fn from_index(n: u32, index: usize) -> Option<Self> {
        if n == 0 || n > MAX_TYPE_EXPONENT || index > full_mask(n) {
            return None;
        }
        let mask = full_mask(n) - index;
        let mut parts = Vec::new();
        let mut run = 1;
        for pos in 1..n {
            if mask & (1 << (n - 1 - pos)) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        Some(Self(parts))
    }
}

fn full_mask(n: u32) -> usize {
    (1usize << (n - 1)) - 1
}

impl fmt::Display for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for PartitionType {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| PartitionError::Malformed(s.to_owned()))?;
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionError::Malformed(s.to_owned()))?;
        Self::new(parts)
    }
}

/// All compositions of `n` in lexicographic order of their parts; there are
/// `2^(n-1)` of them and the all-ones type comes first. `n = 0` yields none.
pub fn partition_types(n: u32) -> Vec<PartitionType> {
    if n == 0 {
        return Vec::new();
    }
    (0..=full_mask(n))
        .map(|i| PartitionType::from_index(n, i).expect("index in range"))
        .collect()
}

/// Boundaries `w_0 < w_1 < ... < w_t`; interval `i` (1-based) is `(w_{i-1}, w_i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntervalLadder {
    boundaries: Vec<Point>,
}

impl IntervalLadder {
    pub fn new(boundaries: Vec<Point>) -> Result<Self, PartitionError> {
        if boundaries.is_empty() {
            return Err(PartitionError::EmptyLadder);
        }
        if let Some(i) = boundaries.windows(2).position(|w| w[0] >= w[1]) {
            return Err(PartitionError::LadderNotIncreasing { index: i + 1 });
        }
        Ok(Self { boundaries })
    }

    pub fn boundaries(&self) -> &[Point] {
        &self.boundaries
    }

    /// Number of intervals, i.e. boundaries minus one.
    pub fn num_intervals(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// `w_i`.
    pub fn boundary(&self, i: usize) -> Point {
        self.boundaries[i]
    }

    /// `(w_{i-1}, w_i)` for 1-based interval `i`.
    pub fn interval(&self, i: usize) -> (Point, Point) {
        (self.boundaries[i - 1], self.boundaries[i])
    }

    /// The span `(w_0, w_t]` as a pair.
    pub fn span(&self) -> (Point, Point) {
        (self.boundaries[0], *self.boundaries.last().expect("nonempty"))
    }

    /// 1-based index of the interval containing `x`.
    pub fn locate(&self, x: Point) -> Option<usize> {
        let (lo, hi) = self.span();
        if x <= lo || x > hi {
            return None;
        }
        Some(self.boundaries.partition_point(|&b| b < x))
    }

    fn locate_or_err(&self, x: Point) -> Result<usize, PartitionError> {
        self.locate(x).ok_or_else(|| {
            let (lo, hi) = self.span();
            PartitionError::OutsideLadder { point: x, lo, hi }
        })
    }

    /// Index (see [`PartitionType::index`]) of the partition type of an
    /// increasing tuple, without allocating.
    pub(crate) fn type_index_of(&self, z: &[Point]) -> Result<usize, PartitionError> {
        let n = z.len() as u32;
        let mut mask = 0usize;
        let mut prev = self.locate_or_err(z[0])?;
        for (pos, &x) in z.iter().enumerate().skip(1) {
            let cur = self.locate_or_err(x)?;
            if cur != prev {
                mask |= 1 << (n as usize - 1 - pos);
            }
            prev = cur;
        }
        Ok(full_mask(n) - mask)
    }
}

/// The composition of `|Z|` read off from the ladder intervals `Z` meets.
pub fn partition_type_of(z: &NumberSet, ladder: &IntervalLadder) -> Result<PartitionType, PartitionError> {
    if z.is_empty() {
        return Err(PartitionError::EmptyType);
    }
    let mut parts: Vec<u32> = Vec::new();
    let mut prev = None;
    for x in z.iter() {
        let cur = ladder.locate_or_err(x)?;
        if prev == Some(cur) {
            *parts.last_mut().expect("nonempty") += 1;
        } else {
            parts.push(1);
        }
        prev = Some(cur);
    }
    Ok(PartitionType(parts))
}

/// A failed instance of the helper equation
/// `f_{r1,r2,...}(U) = f_{r1+r2,...}(U ∪ V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodViolation {
    pub ty: PartitionType,
    pub u: NumberSet,
    pub v: NumberSet,
    pub left: Color,
    pub right: Color,
}

/// Returns the first violated instance of the helper equation, if any.
///
/// Every key of length `>= 2` is checked; its merged type must also be a key.
pub fn find_good_with_violation(
    helpers: &BTreeMap<PartitionType, ColoringRule>,
    w: &NumberSet,
    z: &NumberSet,
) -> Result<Option<GoodViolation>, PartitionError> {
    if let (Some(a), Some(b)) = (w.max(), z.min()) {
        if a >= b {
            return Err(PartitionError::NotSeparated);
        }
    }
    for (ty, f) in helpers {
        if f.exponent() != ty.parts()[0] {
            return Err(PartitionError::HelperExponent {
                ty: ty.clone(),
                expected: ty.parts()[0],
                got: f.exponent(),
            });
        }
    }
    for (ty, left_f) in helpers {
        let parts = ty.parts();
        if parts.len() < 2 {
            continue;
        }
        let mut merged = vec![parts[0] + parts[1]];
        merged.extend_from_slice(&parts[2..]);
        let merged = PartitionType(merged);
        let right_f = helpers
            .get(&merged)
            .ok_or_else(|| PartitionError::MissingHelper(merged.clone()))?;
        let (r1, r2) = (parts[0] as usize, parts[1] as usize);
        let mut failure: Result<(), PartitionError> = Ok(());
        let found = for_each_subset(w.as_slice(), r1, |u| {
            for_each_subset(z.as_slice(), r2, |v| {
                let joined: Vec<Point> = u.iter().chain(v).copied().collect();
                let pair = left_f.try_color(u).and_then(|l| Ok((l, right_f.try_color(&joined)?)));
                match pair {
                    Err(e) => {
                        failure = Err(e.into());
                        ControlFlow::Break(None)
                    }
                    Ok((l, r)) if l != r => ControlFlow::Break(Some(GoodViolation {
                        ty: ty.clone(),
                        u: NumberSet::from_sorted_unchecked(u.to_vec()),
                        v: NumberSet::from_sorted_unchecked(v.to_vec()),
                        left: l,
                        right: r,
                    })),
                    Ok(_) => ControlFlow::Continue(()),
                }
            })
        });
        failure?;
        if let ControlFlow::Break(Some(v)) = found {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// `true` iff every supplied helper equation holds for `W` and `Z`.
pub fn is_good_with(
    helpers: &BTreeMap<PartitionType, ColoringRule>,
    w: &NumberSet,
    z: &NumberSet,
) -> Result<bool, PartitionError> {
    Ok(find_good_with_violation(helpers, w, z)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(p: &[u32]) -> PartitionType {
        PartitionType::new(p.to_vec()).unwrap()
    }

    #[test]
    fn small_type_lists() {
        assert_eq!(partition_types(1), vec![ty(&[1])]);
        assert_eq!(partition_types(2), vec![ty(&[1, 1]), ty(&[2])]);
        assert_eq!(
            partition_types(3),
            vec![ty(&[1, 1, 1]), ty(&[1, 2]), ty(&[2, 1]), ty(&[3])]
        );
    }

    #[test]
    fn lists_are_sorted_and_indexed() {
        for n in 1..=7 {
            let all = partition_types(n);
            assert_eq!(all.len(), 1 << (n - 1));
            assert!(all.windows(2).all(|w| w[0] < w[1]));
            for (i, t) in all.iter().enumerate() {
                assert_eq!(t.index(), i);
                assert_eq!(t.exponent(), n);
            }
            assert!(all[0].is_all_ones());
        }
    }

    #[test]
    fn type_of_examples() {
        let ladder = IntervalLadder::new(vec![1, 5, 10]).unwrap();
        let z = NumberSet::new(vec![3, 4, 9]).unwrap();
        assert_eq!(partition_type_of(&z, &ladder).unwrap(), ty(&[2, 1]));
        assert_eq!(ladder.type_index_of(z.as_slice()).unwrap(), ty(&[2, 1]).index());
        let single = NumberSet::new(vec![7]).unwrap();
        assert_eq!(partition_type_of(&single, &ladder).unwrap(), ty(&[1]));
        let spread = NumberSet::new(vec![2, 6]).unwrap();
        assert!(partition_type_of(&spread, &ladder).unwrap().is_all_ones());
        let outside = NumberSet::new(vec![1, 3]).unwrap();
        assert!(matches!(
            partition_type_of(&outside, &ladder),
            Err(PartitionError::OutsideLadder { point: 1, .. })
        ));
    }

    #[test]
    fn parse_display_round_trip() {
        let t: PartitionType = "(1,2,1)".parse().unwrap();
        assert_eq!(t.to_string(), "(1,2,1)");
        assert!("(1,0)".parse::<PartitionType>().is_err());
        assert!("1,2".parse::<PartitionType>().is_err());
    }

    #[test]
    fn ladder_rejects_bad_boundaries() {
        assert_eq!(IntervalLadder::new(vec![]), Err(PartitionError::EmptyLadder));
        assert_eq!(
            IntervalLadder::new(vec![1, 3, 3]),
            Err(PartitionError::LadderNotIncreasing { index: 2 })
        );
    }
}
