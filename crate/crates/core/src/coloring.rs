//! Colorings of the `n`-subsets of `{1..W}` and the homogeneity checks built
//! on them.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::partition::IntervalLadder;
use crate::set::{binomial, colex_rank, for_each_subset, NumberSet, Point};

/// Colors are 1-based: a `k`-coloring uses `1..=k`.
pub type Color = u32;

/// Largest table (in entries) we are willing to materialize.
pub const MAX_TABLE_LEN: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("exponent must be >= 1")]
    ZeroExponent,
    #[error("palette size must be >= 1")]
    ZeroPalette,
    #[error("expected a {expected}-subset, got {got} points")]
    WrongSize { expected: u32, got: usize },
    #[error("subset is not strictly increasing or contains 0")]
    NotIncreasing,
    #[error("point {point} exceeds horizon {horizon}")]
    OutOfHorizon { point: Point, horizon: Point },
    #[error("color table has {got} entries, expected {expected}")]
    TableLength { expected: u64, got: usize },
    #[error("color {color} at position {index} is outside 1..={k}")]
    ColorOutOfRange { index: usize, color: Color, k: u32 },
    #[error("rule {rule} is not usable here: {reason}")]
    RuleUnsupported { rule: String, reason: String },
    #[error("malformed rule tag {0:?}")]
    BadRule(String),
    #[error("a table of {subsets} subsets is too large to materialize")]
    TooLarge { subsets: u128 },
}

/// Closed-form coloring rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Every subset gets the same color.
    Constant(Color),
    /// `1 + (min Z mod 2)`.
    MinParity,
    /// `1 + (sum Z mod 2)`.
    SumParity,
    /// Pseudo-random colors derived from a seed.
    Hashed { seed: u64 },
    /// Mostly determined by `Z \ {max Z}` when `max Z` is far (more than
    /// `window`) above the rest; pseudo-random otherwise.
    Stable { seed: u64, window: u32 },
    /// Color `1 + index` of the partition type of `Z` along the ladder.
    Sharp(IntervalLadder),
    /// `base(Z)` on all-ones types, `base.k + index` on every other type.
    Merged {
        ladder: IntervalLadder,
        base: Box<ColoringRule>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Values {
    Table(Vec<Color>),
    Rule(Rule),
}

/// A total coloring of `[{1..horizon}]^n` into `{1..k}`.
///
/// Equality is structural; use [`same_colors`] to compare values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringRule {
    n: u32,
    k: u32,
    horizon: Point,
    values: Values,
}

const NOISE_SALT: u64 = 0xA076_1D64_78BD_642F;

/// The splitmix64 finalizer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn hash_tuple(seed: u64, z: &[Point]) -> u64 {
    let mut h = mix64(seed ^ (z.len() as u64).rotate_left(32));
    for &x in z {
        h = mix64(h ^ u64::from(x));
    }
    h
}

#[inline]
fn pick(h: u64, k: u32) -> Color {
    // Constant divisors for the common palettes avoid a hardware divide.
    let r = match k {
        1 => 0,
        2 => h % 2,
        3 => h % 3,
        4 => h % 4,
        _ => h % u64::from(k),
    };
    1 + r as Color
}

fn hashed_singletons<const K: u64, B>(
    prefix: u64,
    lo: Point,
    hi: Point,
    mut visit: impl FnMut(Point, Color) -> ControlFlow<B>,
) -> ControlFlow<B> {
    for x in lo..hi {
        let x = x + 1;
        visit(x, 1 + (mix64(prefix ^ u64::from(x)) % K) as Color)?;
    }
    ControlFlow::Continue(())
}

fn hashed_singletons_any<B>(
    prefix: u64,
    k: u32,
    lo: Point,
    hi: Point,
    mut visit: impl FnMut(Point, Color) -> ControlFlow<B>,
) -> ControlFlow<B> {
    for x in lo..hi {
        let x = x + 1;
        visit(x, pick(mix64(prefix ^ u64::from(x)), k))?;
    }
    ControlFlow::Continue(())
}

impl Rule {
    #[inline]
    fn eval(&self, z: &[Point], k: u32) -> Color {
        match self {
            Rule::Constant(c) => *c,
            Rule::MinParity => 1 + z[0] % 2,
            Rule::SumParity => 1 + (z.iter().map(|&x| u64::from(x)).sum::<u64>() % 2) as Color,
            Rule::Hashed { seed } => pick(hash_tuple(*seed, z), k),
            Rule::Stable { seed, window } => match z.split_last() {
                Some((&top, rest)) if !rest.is_empty() => {
                    if top - rest[rest.len() - 1] > *window {
                        pick(hash_tuple(*seed, rest), k)
                    } else {
                        pick(hash_tuple(seed ^ NOISE_SALT, z), k)
                    }
                }
                _ => pick(hash_tuple(*seed, z), k),
            },
            Rule::Sharp(ladder) => 1 + ladder.type_index_of(z).expect("validated against the ladder span") as Color,
            Rule::Merged { ladder, base } => {
                match ladder.type_index_of(z).expect("validated against the ladder span") {
                    0 => base.color(z),
                    i => base.k + i as Color,
                }
            }
        }
    }

    /// The textual tag of this rule, or `None` when it wraps a table.
    pub fn tag(&self) -> Option<String> {
        Some(match self {
            Rule::Constant(c) => format!("const:{c}"),
            Rule::MinParity => "min-parity".to_owned(),
            Rule::SumParity => "sum-parity".to_owned(),
            Rule::Hashed { seed } => format!("hash:{seed}"),
            Rule::Stable { seed, window } => format!("stable:{seed}:{window}"),
            Rule::Sharp(l) => format!("sharp:{}", ladder_tag(l)),
            Rule::Merged { ladder, base } => {
                format!("merge:{}/{}", ladder_tag(ladder), base.rule()?.tag()?)
            }
        })
    }
}

fn ladder_tag(l: &IntervalLadder) -> String {
    l.boundaries()
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_ladder(s: &str, whole: &str) -> Result<IntervalLadder, ColoringError> {
    let bad = || ColoringError::BadRule(whole.to_owned());
    let bounds = s
        .split(',')
        .map(|b| b.trim().parse::<Point>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    IntervalLadder::new(bounds).map_err(|_| bad())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag() {
            Some(t) => f.write_str(&t),
            None => f.write_str("<tabulated>"),
        }
    }
}

fn unsupported(rule: &Rule, reason: impl Into<String>) -> ColoringError {
    ColoringError::RuleUnsupported {
        rule: rule.to_string(),
        reason: reason.into(),
    }
}

/// Number of `n`-subsets of `{1..horizon}`.
pub fn table_len(n: u32, horizon: Point) -> Option<u64> {
    binomial(u64::from(horizon), u64::from(n))
}

impl ColoringRule {
    fn check_shape(n: u32, k: u32) -> Result<(), ColoringError> {
        if n == 0 {
            return Err(ColoringError::ZeroExponent);
        }
        if k == 0 {
            return Err(ColoringError::ZeroPalette);
        }
        Ok(())
    }

    /// A tabulated coloring; `colors` lists the colors of the `n`-subsets of
    /// `{1..horizon}` in colexicographic order.
    pub fn from_table(n: u32, k: u32, horizon: Point, colors: Vec<Color>) -> Result<Self, ColoringError> {
        Self::check_shape(n, k)?;
        let expected = table_len(n, horizon).ok_or(ColoringError::TooLarge { subsets: u128::MAX })?;
        if colors.len() as u64 != expected {
            return Err(ColoringError::TableLength {
                expected,
                got: colors.len(),
            });
        }
        if let Some((index, &color)) = colors.iter().enumerate().find(|(_, &c)| c == 0 || c > k) {
            return Err(ColoringError::ColorOutOfRange { index, color, k });
        }
        Ok(Self {
            n,
            k,
            horizon,
            values: Values::Table(colors),
        })
    }

    /// A closed-form coloring, validated against `n`, `k` and `horizon`.
    pub fn from_rule(n: u32, k: u32, horizon: Point, rule: Rule) -> Result<Self, ColoringError> {
        Self::check_shape(n, k)?;
        match &rule {
            Rule::Constant(c) if *c == 0 || *c > k => {
                return Err(unsupported(&rule, format!("color must lie in 1..={k}")));
            }
            Rule::MinParity | Rule::SumParity if k < 2 => {
                return Err(unsupported(&rule, "parity rules need k >= 2"));
            }
            Rule::Sharp(ladder) => {
                if n > 31 || k != 1 << (n - 1) {
                    return Err(unsupported(
                        &rule,
                        format!("palette must be 2^(n-1) = {}", 1u64 << (n - 1).min(63)),
                    ));
                }
                check_span(&rule, ladder, horizon)?;
            }
            Rule::Merged { ladder, base } => {
                if base.n != n {
                    return Err(unsupported(&rule, "base coloring has a different exponent"));
                }
                if n > 31 || u64::from(k) != u64::from(base.k) + (1u64 << (n - 1)) - 1 {
                    return Err(unsupported(&rule, "palette must be base palette + 2^(n-1) - 1"));
                }
                if horizon > base.horizon {
                    return Err(unsupported(&rule, "horizon exceeds the base coloring"));
                }
                check_span(&rule, ladder, horizon)?;
            }
            _ => {}
        }
        Ok(Self {
            n,
            k,
            horizon,
            values: Values::Rule(rule),
        })
    }

    /// Builds a coloring from a textual rule tag (see [`Rule::tag`]).
    pub fn from_tag(n: u32, k: u32, horizon: Point, tag: &str) -> Result<Self, ColoringError> {
        let bad = || ColoringError::BadRule(tag.to_owned());
        let tag = tag.trim();
        let (head, rest) = tag.split_once(':').unwrap_or((tag, ""));
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        let rule = match head {
            "const" => Rule::Constant(Color::try_from(num(rest)?).map_err(|_| bad())?),
            "min-parity" if rest.is_empty() => Rule::MinParity,
            "sum-parity" if rest.is_empty() => Rule::SumParity,
            "hash" => Rule::Hashed { seed: num(rest)? },
            "stable" => {
                let (s, w) = rest.split_once(':').ok_or_else(bad)?;
                Rule::Stable {
                    seed: num(s)?,
                    window: Point::try_from(num(w)?).map_err(|_| bad())?,
                }
            }
            "sharp" => Rule::Sharp(parse_ladder(rest, tag)?),
            "merge" => {
                let (l, base) = rest.split_once('/').ok_or_else(bad)?;
                let ladder = parse_ladder(l, tag)?;
                let extra = if n > 31 {
                    return Err(bad());
                } else {
                    (1u32 << (n - 1)) - 1
                };
                let base_k = k.checked_sub(extra).filter(|&b| b >= 1).ok_or_else(bad)?;
                let base = Self::from_tag(n, base_k, horizon, base)?;
                Rule::Merged {
                    ladder,
                    base: Box::new(base),
                }
            }
            _ => return Err(bad()),
        };
        Self::from_rule(n, k, horizon, rule)
    }

    pub fn constant(n: u32, k: u32, horizon: Point, c: Color) -> Result<Self, ColoringError> {
        Self::from_rule(n, k, horizon, Rule::Constant(c))
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn palette(&self) -> u32 {
        self.k
    }

    pub fn horizon(&self) -> Point {
        self.horizon
    }

    pub fn rule(&self) -> Option<&Rule> {
        match &self.values {
            Values::Rule(r) => Some(r),
            Values::Table(_) => None,
        }
    }

    pub fn table(&self) -> Option<&[Color]> {
        match &self.values {
            Values::Table(t) => Some(t),
            Values::Rule(_) => None,
        }
    }

    /// Color of an increasing `n`-tuple inside the horizon. Out-of-domain
    /// input is a logic error; use [`ColoringRule::try_color`] for untrusted
    /// input.
    #[inline]
    pub fn color(&self, z: &[Point]) -> Color {
        debug_assert!(self.validate(z).is_ok(), "{:?}", self.validate(z));
        match &self.values {
            Values::Table(t) => t[colex_rank(z).expect("in-horizon rank fits") as usize],
            Values::Rule(r) => r.eval(z, self.k),
        }
    }

    /// Visits `(x, f({x}))` for `x` in `(lo, hi]` in increasing order, for
    /// exponent 1 only. Same values as [`ColoringRule::color`], with the rule
    /// dispatch and seed mixing done once per call.
    pub fn for_each_singleton<B>(
        &self,
        lo: Point,
        hi: Point,
        mut visit: impl FnMut(Point, Color) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        assert_eq!(self.n, 1, "singleton colors need exponent 1");
        let hi = hi.min(self.horizon);
        match &self.values {
            // A singleton never takes the stable branch.
            Values::Rule(Rule::Hashed { seed } | Rule::Stable { seed, .. }) => {
                let prefix = mix64(seed ^ 1u64.rotate_left(32));
                // One loop per common palette, so the reduction is a constant.
                return match self.k {
                    2 => hashed_singletons::<2, B>(prefix, lo, hi, visit),
                    3 => hashed_singletons::<3, B>(prefix, lo, hi, visit),
                    4 => hashed_singletons::<4, B>(prefix, lo, hi, visit),
                    _ => hashed_singletons_any(prefix, self.k, lo, hi, visit),
                };
            }
            Values::Table(t) => {
                for x in lo..hi {
                    let x = x + 1;
                    visit(x, t[x as usize - 1])?;
                }
            }
            _ => {
                for x in lo..hi {
                    let x = x + 1;
                    visit(x, self.color(&[x]))?;
                }
            }
        }
        ControlFlow::Continue(())
    }

    pub fn try_color(&self, z: &[Point]) -> Result<Color, ColoringError> {
        self.validate(z)?;
        Ok(self.color(z))
    }

    fn validate(&self, z: &[Point]) -> Result<(), ColoringError> {
        if z.len() != self.n as usize {
            return Err(ColoringError::WrongSize {
                expected: self.n,
                got: z.len(),
            });
        }
        if z[0] == 0 || z.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ColoringError::NotIncreasing);
        }
        let top = z[z.len() - 1];
        if top > self.horizon {
            return Err(ColoringError::OutOfHorizon {
                point: top,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// Checks that every point of `a` is inside the horizon.
    pub fn check_set(&self, a: &NumberSet) -> Result<(), ColoringError> {
        match a.max() {
            Some(top) if top > self.horizon => Err(ColoringError::OutOfHorizon {
                point: top,
                horizon: self.horizon,
            }),
            _ => Ok(()),
        }
    }

    /// The same coloring with every color listed explicitly.
    pub fn tabulate(&self) -> Result<Self, ColoringError> {
        let len = self.table_len_checked()?;
        let mut colors = Vec::with_capacity(len as usize);
        let ground = NumberSet::interval(1, self.horizon);
        let _ = for_each_subset::<()>(ground.as_slice(), self.n as usize, |z| {
            colors.push(self.color(z));
            ControlFlow::Continue(())
        });
        Self::from_table(self.n, self.k, self.horizon, colors)
    }

    fn table_len_checked(&self) -> Result<u64, ColoringError> {
        match table_len(self.n, self.horizon) {
            Some(l) if l <= MAX_TABLE_LEN => Ok(l),
            Some(l) => Err(ColoringError::TooLarge { subsets: u128::from(l) }),
            None => Err(ColoringError::TooLarge { subsets: u128::MAX }),
        }
    }

    /// The restriction to `[{1..horizon}]^n` for a smaller horizon.
    pub fn with_horizon(&self, horizon: Point) -> Result<Self, ColoringError> {
        if horizon > self.horizon {
            return Err(ColoringError::OutOfHorizon {
                point: horizon,
                horizon: self.horizon,
            });
        }
        match &self.values {
            Values::Rule(r) => Self::from_rule(self.n, self.k, horizon, r.clone()),
            Values::Table(t) => {
                // Colex order is prefix-stable, so the restriction is a prefix.
                let len = table_len(self.n, horizon).expect("smaller than an existing table") as usize;
                Self::from_table(self.n, self.k, horizon, t[..len].to_vec())
            }
        }
    }
}

fn check_span(rule: &Rule, ladder: &IntervalLadder, horizon: Point) -> Result<(), ColoringError> {
    let (lo, hi) = ladder.span();
    if lo != 0 || horizon > hi {
        return Err(unsupported(
            rule,
            format!("ladder span ({lo}, {hi}] must cover 1..={horizon}"),
        ));
    }
    Ok(())
}

/// `true` iff both colorings have the same shape and agree on every subset.
pub fn same_colors(a: &ColoringRule, b: &ColoringRule) -> bool {
    if (a.n, a.k, a.horizon) != (b.n, b.k, b.horizon) {
        return false;
    }
    if a == b {
        return true;
    }
    let ground = NumberSet::interval(1, a.horizon);
    for_each_subset(ground.as_slice(), a.n as usize, |z| {
        if a.color(z) == b.color(z) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    })
    .is_continue()
}

/// The colors `f` assigns to the `n`-subsets of `a`.
pub fn colors_used(f: &ColoringRule, a: &NumberSet) -> Result<BTreeSet<Color>, ColoringError> {
    f.check_set(a)?;
    let mut seen = BTreeSet::new();
    let _ = for_each_subset::<()>(a.as_slice(), f.n as usize, |z| {
        seen.insert(f.color(z));
        ControlFlow::Continue(())
    });
    Ok(seen)
}

/// Counts distinct colors on `[a]^n`, stopping once `limit` is exceeded.
fn count_colors_upto(f: &ColoringRule, a: &NumberSet, limit: usize) -> Result<usize, ColoringError> {
    f.check_set(a)?;
    let mut seen = BTreeSet::new();
    let _ = for_each_subset(a.as_slice(), f.n as usize, |z| {
        seen.insert(f.color(z));
        if seen.len() > limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(seen.len())
}

/// At most `2^(n-1)` colors appear on `[a]^n`.
pub fn is_semi_homogeneous(f: &ColoringRule, a: &NumberSet) -> Result<bool, ColoringError> {
    let limit = 1usize << (f.n - 1).min(62);
    Ok(count_colors_upto(f, a, limit)? <= limit)
}

/// Outcome of a homogeneity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    /// Fewer than `n` points: homogeneous, but no color is witnessed.
    Vacuous,
    /// Every `n`-subset has this color.
    Color(Color),
    /// At least two colors occur.
    Not,
}

impl Homogeneity {
    pub fn color(self) -> Option<Color> {
        match self {
            Homogeneity::Color(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_homogeneous(self) -> bool {
        !matches!(self, Homogeneity::Not)
    }
}

pub fn is_homogeneous(f: &ColoringRule, a: &NumberSet) -> Result<Homogeneity, ColoringError> {
    f.check_set(a)?;
    let mut first = None;
    let mixed = for_each_subset(a.as_slice(), f.n as usize, |z| {
        let c = f.color(z);
        match first {
            None => {
                first = Some(c);
                ControlFlow::Continue(())
            }
            Some(d) if d == c => ControlFlow::Continue(()),
            Some(_) => ControlFlow::Break(()),
        }
    })
    .is_break();
    Ok(match (mixed, first) {
        (true, _) => Homogeneity::Not,
        (false, Some(c)) => Homogeneity::Color(c),
        (false, None) => Homogeneity::Vacuous,
    })
}

/// Dense view of a pair coloring with per-color neighbourhood bitsets, for
/// the clique-style searches.
#[derive(Debug, Clone)]
pub struct PairColoring {
    horizon: usize,
    k: u32,
    colors: Vec<Color>,
    /// `adj[c - 1][x]` holds every `y != x` with `f({x, y}) = c`.
    adj: Vec<Vec<FixedBitSet>>,
}

/// Largest horizon accepted by [`PairColoring::new`].
pub const MAX_PAIR_HORIZON: Point = 4096;

impl PairColoring {
    pub fn new(f: &ColoringRule) -> Result<Self, ColoringError> {
        if f.n != 2 {
            return Err(ColoringError::WrongSize {
                expected: 2,
                got: f.n as usize,
            });
        }
        if f.horizon > MAX_PAIR_HORIZON {
            return Err(ColoringError::TooLarge {
                subsets: u128::from(table_len(2, f.horizon).unwrap_or(u64::MAX)),
            });
        }
        let w = f.horizon as usize;
        let mut colors = vec![0; (w + 1) * (w + 1)];
        let mut adj = vec![vec![FixedBitSet::with_capacity(w + 1); w + 1]; f.k as usize];
        for y in 2..=w {
            for x in 1..y {
                let c = f.color(&[x as Point, y as Point]);
                colors[x * (w + 1) + y] = c;
                colors[y * (w + 1) + x] = c;
                adj[c as usize - 1][x].insert(y);
                adj[c as usize - 1][y].insert(x);
            }
        }
        Ok(Self {
            horizon: w,
            k: f.k,
            colors,
            adj,
        })
    }

    pub fn horizon(&self) -> Point {
        self.horizon as Point
    }

    pub fn palette(&self) -> u32 {
        self.k
    }

    /// `f({x, y})` for distinct in-horizon points (either order).
    pub fn color(&self, x: Point, y: Point) -> Color {
        self.colors[x as usize * (self.horizon + 1) + y as usize]
    }

    /// All `y` with `f({x, y}) = c`.
    pub fn neighbours(&self, c: Color, x: Point) -> &FixedBitSet {
        &self.adj[c as usize - 1][x as usize]
    }
}
