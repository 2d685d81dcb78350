//! Finite sets of positive integers and colexicographic subset enumeration.
//!
//! Every set in this crate is a [`NumberSet`]: a strictly increasing list of
//! points `>= 1`. Sets are ordered by their canonical code `sum 2^(x-1)`,
//! which is the same thing as colexicographic order (compare the largest
//! differing element), so the ordering never needs to materialize the code.

use std::cmp::Ordering;
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

/// A point of the ground set `{1, 2, ...}`.
pub type Point = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("0 is not a valid point (points start at 1)")]
    ZeroPoint,
    #[error("elements are not strictly increasing at position {index}")]
    NotIncreasing { index: usize },
    #[error("duplicate element {0}")]
    Duplicate(Point),
}

/// A finite set of positive integers, stored in increasing order.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct NumberSet {
    elems: Vec<Point>,
}

impl NumberSet {
    /// Builds a set from an already strictly increasing list.
    pub fn new(elems: Vec<Point>) -> Result<Self, SetError> {
        if elems.first() == Some(&0) {
            return Err(SetError::ZeroPoint);
        }
        if let Some(index) = elems.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SetError::NotIncreasing { index: index + 1 });
        }
        Ok(Self { elems })
    }

    /// Builds a set from points in any order. Duplicates are rejected.
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Result<Self, SetError> {
        let mut elems: Vec<Point> = points.into_iter().collect();
        elems.sort_unstable();
        if elems.first() == Some(&0) {
            return Err(SetError::ZeroPoint);
        }
        if let Some(w) = elems.windows(2).find(|w| w[0] == w[1]) {
            return Err(SetError::Duplicate(w[0]));
        }
        Ok(Self { elems })
    }

    /// Internal constructor for lists known to be valid.
    pub(crate) fn from_sorted_unchecked(elems: Vec<Point>) -> Self {
        debug_assert!(elems.first() != Some(&0));
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        Self { elems }
    }

    /// For sets collected by an increasing scan over points `>= 1`, where
    /// even a debug re-check would dominate the cost of building them.
    pub(crate) fn from_increasing_scan(elems: Vec<Point>) -> Self {
        debug_assert!(elems.first() != Some(&0));
        Self { elems }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The interval `{lo, ..., hi}` (empty when `lo > hi`).
    pub fn interval(lo: Point, hi: Point) -> Self {
        let lo = lo.max(1);
        Self::from_sorted_unchecked(if lo > hi { Vec::new() } else { (lo..=hi).collect() })
    }

    pub fn as_slice(&self) -> &[Point] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<Point> {
        self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Point> + ExactSizeIterator + '_ {
        self.elems.iter().copied()
    }

    pub fn contains(&self, x: Point) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn min(&self) -> Option<Point> {
        self.elems.first().copied()
    }

    pub fn max(&self) -> Option<Point> {
        self.elems.last().copied()
    }

    /// `|self ∩ {1..w}|`.
    pub fn count_upto(&self, w: Point) -> usize {
        self.elems.partition_point(|&x| x <= w)
    }

    /// The elements lying in the half-open interval `(lo, hi]`.
    pub fn within(&self, lo: Point, hi: Point) -> &[Point] {
        let start = self.elems.partition_point(|&x| x <= lo);
        let end = self.elems.partition_point(|&x| x <= hi);
        &self.elems[start..end.max(start)]
    }

    /// Keeps the elements satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(Point) -> bool) -> Self {
        Self::from_sorted_unchecked(self.elems.iter().copied().filter(|&x| keep(x)).collect())
    }

    pub fn is_subset_of(&self, other: &NumberSet) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    pub fn union(&self, other: &NumberSet) -> Self {
        let mut elems = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elems, &other.elems);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    elems.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    elems.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    elems.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        elems.extend_from_slice(&a[i..]);
        elems.extend_from_slice(&b[j..]);
        Self::from_sorted_unchecked(elems)
    }

    /// Canonical code `sum 2^(x-1)`, when it fits in 128 bits.
    pub fn canonical_code(&self) -> Option<u128> {
        match self.max() {
            None => Some(0),
            Some(m) if m <= 128 => Some(self.elems.iter().map(|&x| 1u128 << (x - 1)).sum()),
            Some(_) => None,
        }
    }
}

impl Ord for NumberSet {
    /// Canonical-code order: compare from the largest element down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.elems.iter().rev().cmp(other.elems.iter().rev())
    }
}

impl PartialOrd for NumberSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for NumberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl fmt::Display for NumberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl<'a> IntoIterator for &'a NumberSet {
    type Item = Point;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, Point>>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter().copied()
    }
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// 0-based colexicographic rank of an increasing tuple among the subsets of
/// `{1, 2, ...}` of the same size.
pub fn colex_rank(z: &[Point]) -> Option<u64> {
    let mut rank: u64 = 0;
    for (i, &x) in z.iter().enumerate() {
        let term = binomial(u64::from(x.checked_sub(1)?), i as u64 + 1)?;
        rank = rank.checked_add(term)?;
    }
    Some(rank)
}

/// Visits every `n`-subset of `ground` (which must be increasing) in
/// colexicographic order, stopping early when `visit` breaks.
pub fn for_each_subset<B>(
    ground: &[Point],
    n: usize,
    mut visit: impl FnMut(&[Point]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let len = ground.len();
    if n > len {
        return ControlFlow::Continue(());
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut buf: Vec<Point> = idx.iter().map(|&i| ground[i]).collect();
    loop {
        visit(&buf)?;
        // Colex successor: bump the lowest index that has room.
        let mut i = 0;
        loop {
            if i == n {
                return ControlFlow::Continue(());
            }
            let limit = if i + 1 < n { idx[i + 1] } else { len };
            if idx[i] + 1 < limit {
                break;
            }
            i += 1;
        }
        idx[i] += 1;
        buf[i] = ground[idx[i]];
        for j in 0..i {
            idx[j] = j;
            buf[j] = ground[j];
        }
    }
}

/// All `n`-subsets of `ground`, in colexicographic order.
pub fn enumerate_subsets(ground: &NumberSet, n: usize) -> Vec<NumberSet> {
    let mut out = Vec::new();
    let _ = for_each_subset::<()>(ground.as_slice(), n, |z| {
        out.push(NumberSet::from_sorted_unchecked(z.to_vec()));
        ControlFlow::Continue(())
    });
    out
}
