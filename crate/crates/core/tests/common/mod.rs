//! Naive oracles shared by the integration suites. They trade speed for
//! obviousness: plain enumeration, no pruning, no shared code with the
//! library's search kernels.
#![allow(dead_code)]

use packed_ramsey::{ColoringRule, GrowthFunction, NumberSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All `r`-subsets of `items`, in no particular order.
pub fn combinations(items: &[u32], r: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn go(items: &[u32], r: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, r, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, r, 0, &mut cur, &mut out);
    out
}

/// Does `color` (on sorted `n`-tuples) give some `m`-subset of `ground` a
/// single color? For `m < n` every `m`-set is vacuously homogeneous.
pub fn has_homogeneous(ground: &[u32], m: usize, n: usize, color: &dyn Fn(&[u32]) -> u32) -> bool {
    if m > ground.len() {
        return false;
    }
    combinations(ground, m).into_iter().any(|s| {
        let cols: Vec<u32> = combinations(&s, n).iter().map(|z| color(z)).collect();
        cols.windows(2).all(|w| w[0] == w[1])
    })
}

/// `w → (m)^n_k` by running through all `k^C(w,n)` colorings.
pub fn naive_arrow(w: u32, m: u32, n: u32, k: u32) -> bool {
    let ground: Vec<u32> = (1..=w).collect();
    let slots = combinations(&ground, n as usize);
    let total = (k as u64).pow(slots.len() as u32);
    (0..total).all(|mut code| {
        let mut table = Vec::with_capacity(slots.len());
        for _ in 0..slots.len() {
            table.push((code % k as u64) as u32 + 1);
            code /= k as u64;
        }
        let color = |z: &[u32]| table[slots.iter().position(|s| s.as_slice() == z).unwrap()];
        has_homogeneous(&ground, m as usize, n as usize, &color)
    })
}

/// `true` iff every `n`-subset of `a` gets the same color.
pub fn brute_homogeneous(f: &ColoringRule, a: &NumberSet) -> bool {
    let subs = combinations(a.as_slice(), f.exponent() as usize);
    subs.windows(2).all(|w| f.color(&w[0]) == f.color(&w[1]))
}

pub fn brute_colors(f: &ColoringRule, a: &NumberSet) -> std::collections::BTreeSet<u32> {
    combinations(a.as_slice(), f.exponent() as usize)
        .iter()
        .map(|z| f.color(z))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveLarge {
    Large(u32),
    Small,
}

/// Bounded largeness by listing, for every `w`, every way to split
/// `(m, w] ∩ X` into at most `p` labelled-by-first-use classes.
/// Pair colorings only; `(m, w] ∩ X` must stay below 17 points.
pub fn naive_large(f: &ColoringRule, x: &NumberSet, phi: &GrowthFunction, m: u32, p: u32, w_max: u32) -> NaiveLarge {
    assert_eq!(f.exponent(), 2);
    for w in m + 1..=w_max {
        let c: Vec<u32> = x.iter().filter(|&e| e > m && e <= w).collect();
        assert!(c.len() <= 16, "naive oracle out of its depth");
        let t = phi.eval(w) as usize;
        if t > c.len() {
            continue;
        }
        // contains[mask]: the points of `mask` include an f-homogeneous t-set.
        let size = 1usize << c.len();
        let mut contains = vec![false; size];
        for mask in 0..size {
            let bits: Vec<usize> = (0..c.len()).filter(|&i| mask >> i & 1 == 1).collect();
            contains[mask] = if bits.len() == t {
                let cols: Vec<u32> = combinations(&bits.iter().map(|&i| c[i]).collect::<Vec<_>>(), 2)
                    .iter()
                    .map(|z| f.color(z))
                    .collect();
                cols.windows(2).all(|v| v[0] == v[1])
            } else {
                bits.iter().any(|&i| contains[mask & !(1 << i)])
            };
        }
        // Restricted growth strings: class of point i is at most 1 + max so far.
        let mut labels = vec![0usize; c.len()];
        let mut defeated_all = true;
        loop {
            let mut masks = vec![0usize; p as usize];
            for (i, &l) in labels.iter().enumerate() {
                masks[l] |= 1 << i;
            }
            if !masks.iter().any(|&mk| contains[mk]) {
                defeated_all = false;
                break;
            }
            if !next_rgs(&mut labels, p as usize) {
                break;
            }
        }
        if defeated_all {
            return NaiveLarge::Large(w);
        }
    }
    NaiveLarge::Small
}

fn next_rgs(labels: &mut [usize], p: usize) -> bool {
    for i in (1..labels.len()).rev() {
        let max_before = labels[..i].iter().copied().max().unwrap_or(0);
        if labels[i] <= max_before && labels[i] + 1 < p {
            labels[i] += 1;
            for l in &mut labels[i + 1..] {
                *l = 0;
            }
            return true;
        }
    }
    false
}
