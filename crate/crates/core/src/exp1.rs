//! The computable exponent-1 solver: a ladder of intervals, one least-code
//! homogeneous block per interval, and a majority color across blocks.

use std::cell::RefCell;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::coloring::{Color, ColoringError, ColoringRule};
use crate::growth::GrowthFunction;
use crate::packed::BlockSequence;
use crate::partition::IntervalLadder;
use crate::ramsey::{claim16_witness, RamseyError};
use crate::set::{NumberSet, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Exp1Error {
    #[error("the exponent-1 solver needs a coloring of singletons, got exponent {0}")]
    NotExponentOne(u32),
    #[error("at least one block is required")]
    NoBlocks,
    #[error(transparent)]
    Ladder(#[from] RamseyError),
    #[error("coloring horizon {horizon} is too small; the ladder needs {need}")]
    HorizonTooSmall { need: Point, horizon: Point },
    #[error("interval ({lo}, {hi}] has no homogeneous block of size {size}")]
    NoBlock { lo: Point, hi: Point, size: u32 },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exp1Solution {
    pub ladder: IntervalLadder,
    /// `blocks[i - 1]` is `Y_i`.
    pub blocks: Vec<NumberSet>,
    /// `induced[i - 1]` is the color of `Y_i`.
    pub induced: Vec<Color>,
    pub chosen_color: Color,
    /// 1-based indices of the blocks with the chosen color.
    pub selected: Vec<usize>,
    pub result: NumberSet,
}

impl Exp1Solution {
    /// The selected blocks as a block sequence on the ladder
    /// `w_{i_1 - 1} < w_{i_1} < w_{i_2} < ...`.
    pub fn selected_sequence(&self) -> BlockSequence {
        let mut bounds = Vec::with_capacity(self.selected.len() + 1);
        match self.selected.first() {
            Some(&i) => bounds.push(self.ladder.boundary(i - 1)),
            None => bounds.push(self.ladder.boundary(0)),
        }
        bounds.extend(self.selected.iter().map(|&i| self.ladder.boundary(i)));
        let ladder = IntervalLadder::new(bounds).expect("subsequence of a ladder");
        BlockSequence::new(self.result.clone(), ladder).expect("selected blocks lie in their intervals")
    }
}

/// `w_0 = 1` followed by `count` boundaries, each the least `w` above the
/// previous one with `w - w_prev → (φ(w))^1_k`.
pub fn build_ladder_exp1(phi: &GrowthFunction, k: u32, count: usize) -> Result<IntervalLadder, Exp1Error> {
    let mut bounds = Vec::with_capacity(count + 1);
    bounds.push(1);
    for _ in 0..count {
        let prev = *bounds.last().expect("nonempty");
        bounds.push(claim16_witness(prev, k, phi)?);
    }
    Ok(IntervalLadder::new(bounds).expect("witnesses increase"))
}

/// Least-code `f`-homogeneous `size`-subset of `(lo, hi]`: the first point
/// at which some color reaches `size` members closes it, and those members
/// are the earliest ones of that color.
fn least_block(
    f: &ColoringRule,
    lo: Point,
    hi: Point,
    size: u32,
    lists: &mut [Vec<Point>],
) -> Option<(Color, Vec<Point>)> {
    for l in lists.iter_mut() {
        l.clear();
    }
    let size = size as usize;
    let found = f.for_each_singleton(lo, hi, move |x, c| {
        let l = &mut lists[c as usize - 1];
        l.push(x);
        if l.len() == size {
            return ControlFlow::Break((c, l.clone()));
        }
        ControlFlow::Continue(())
    });
    match found {
        ControlFlow::Break(hit) => Some(hit),
        ControlFlow::Continue(()) => None,
    }
}

thread_local! {
    // Per-color scratch lists, kept between calls: faulting in fresh pages
    // for them costs about as much as the scan that fills them.
    static SCRATCH: RefCell<Vec<Vec<Point>>> = const { RefCell::new(Vec::new()) };
}

/// Each thread keeps its scratch lists (about `k · φ(w_count)` points) alive
/// between calls.
pub fn solve_exp1(f: &ColoringRule, phi: &GrowthFunction, count: usize) -> Result<Exp1Solution, Exp1Error> {
    if f.exponent() != 1 {
        return Err(Exp1Error::NotExponentOne(f.exponent()));
    }
    if count == 0 {
        return Err(Exp1Error::NoBlocks);
    }
    let k = f.palette();
    let ladder = build_ladder_exp1(phi, k, count)?;
    let need = ladder.span().1;
    if need > f.horizon() {
        return Err(Exp1Error::HorizonTooSmall {
            need,
            horizon: f.horizon(),
        });
    }
    let largest = phi.eval(need).max(1) as usize;
    let (blocks, induced) = SCRATCH.with_borrow_mut(|lists| {
        lists.resize_with(lists.len().max(k as usize), Vec::new);
        for l in lists.iter_mut() {
            l.clear();
            l.reserve(largest);
        }
        let mut blocks = Vec::with_capacity(count);
        let mut induced = Vec::with_capacity(count);
        for i in 1..=count {
            let (lo, hi) = ladder.interval(i);
            // Blocks are kept nonempty so that each carries a color.
            let size = phi.eval(hi).max(1);
            let (c, y) =
                least_block(f, lo, hi, size, &mut lists[..k as usize]).ok_or(Exp1Error::NoBlock { lo, hi, size })?;
            blocks.push(NumberSet::from_increasing_scan(y));
            induced.push(c);
        }
        Ok::<_, Exp1Error>((blocks, induced))
    })?;
    let mut freq = vec![0usize; k as usize + 1];
    for &c in &induced {
        freq[c as usize] += 1;
    }
    // Most frequent color; ties go to the smaller color.
    let chosen_color = (1..=k)
        .max_by_key(|&c| (freq[c as usize], std::cmp::Reverse(c)))
        .expect("k >= 1");
    let selected: Vec<usize> = (1..=count).filter(|&i| induced[i - 1] == chosen_color).collect();
    let mut members = Vec::with_capacity(selected.iter().map(|&i| blocks[i - 1].len()).sum());
    for &i in &selected {
        members.extend_from_slice(blocks[i - 1].as_slice());
    }
    let result = NumberSet::from_increasing_scan(members);
    Ok(Exp1Solution {
        ladder,
        blocks,
        induced,
        chosen_color,
        selected,
        result,
    })
}
