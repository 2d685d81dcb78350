//! Growth functions `φ: ℕ → ℕ` given by a closed-form rule or a table.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::set::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("malformed growth function {0:?}")]
    Malformed(String),
    #[error("ceil-div needs a divisor >= 1")]
    ZeroDivisor,
    #[error("a table growth function needs at least one value")]
    EmptyTable,
}

/// A total function on `w >= 1`.
///
/// Textual forms: `const:C`, `ceil-div:D` (`⌈w/D⌉`), `id`,
/// `ceil-log2-succ` (`⌈log2(w+1)⌉`), `floor-log2:S:M`
/// (`max(M, ⌊log2 w⌋ - S)`), `table:v1,v2,...` (value `v_w`, repeating the
/// last value past the end).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GrowthFunction {
    Const(u32),
    CeilDiv(u32),
    Id,
    CeilLog2Succ,
    FloorLog2 { shift: u32, min: u32 },
    Table(Vec<u32>),
}

impl GrowthFunction {
    pub fn eval(&self, w: Point) -> u32 {
        match self {
            GrowthFunction::Const(c) => *c,
            GrowthFunction::CeilDiv(d) => w.div_ceil(*d),
            GrowthFunction::Id => w,
            GrowthFunction::CeilLog2Succ => 32 - w.leading_zeros(),
            GrowthFunction::FloorLog2 { shift, min } => {
                let lg = if w == 0 { 0 } else { 31 - w.leading_zeros() };
                lg.saturating_sub(*shift).max(*min)
            }
            GrowthFunction::Table(t) => {
                let i = (w.max(1) as usize - 1).min(t.len() - 1);
                t[i]
            }
        }
    }

    /// Whether this is an order function (non-decreasing with unbounded
    /// range). A table counts when it is non-decreasing and not constant;
    /// its range beyond the table is the caller's business.
    pub fn is_order_function(&self) -> bool {
        match self {
            GrowthFunction::Const(_) => false,
            GrowthFunction::CeilDiv(_) | GrowthFunction::Id | GrowthFunction::CeilLog2Succ => true,
            GrowthFunction::FloorLog2 { .. } => true,
            GrowthFunction::Table(t) => t.windows(2).all(|w| w[0] <= w[1]) && t.first() != t.last(),
        }
    }

    /// Non-decreasing everywhere (order functions and constants).
    pub fn is_nondecreasing(&self) -> bool {
        match self {
            GrowthFunction::Table(t) => t.windows(2).all(|w| w[0] <= w[1]),
            _ => true,
        }
    }

    /// Checks non-decreasing on `1..=upto`.
    pub fn is_nondecreasing_upto(&self, upto: Point) -> bool {
        let mut prev = self.eval(1);
        for w in 2..=upto {
            let cur = self.eval(w);
            if cur < prev {
                return false;
            }
            prev = cur;
        }
        true
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::Const(c) => write!(f, "const:{c}"),
            GrowthFunction::CeilDiv(d) => write!(f, "ceil-div:{d}"),
            GrowthFunction::Id => write!(f, "id"),
            GrowthFunction::CeilLog2Succ => write!(f, "ceil-log2-succ"),
            GrowthFunction::FloorLog2 { shift, min } => write!(f, "floor-log2:{shift}:{min}"),
            GrowthFunction::Table(t) => {
                write!(f, "table:")?;
                for (i, v) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for GrowthFunction {
    type Err = GrowthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GrowthError::Malformed(s.to_owned());
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
        let s_trim = s.trim();
        let (head, rest) = match s_trim.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s_trim, None),
        };
        Ok(match (head, rest) {
            ("const", Some(r)) => GrowthFunction::Const(num(r)?),
            ("ceil-div", Some(r)) => match num(r)? {
                0 => return Err(GrowthError::ZeroDivisor),
                d => GrowthFunction::CeilDiv(d),
            },
            ("id", None) => GrowthFunction::Id,
            ("ceil-log2-succ", None) => GrowthFunction::CeilLog2Succ,
            ("floor-log2", Some(r)) => {
                let (a, b) = r.split_once(':').ok_or_else(bad)?;
                GrowthFunction::FloorLog2 {
                    shift: num(a)?,
                    min: num(b)?,
                }
            }
            ("table", Some(r)) => {
                if r.trim().is_empty() {
                    return Err(GrowthError::EmptyTable);
                }
                GrowthFunction::Table(r.split(',').map(num).collect::<Result<_, _>>()?)
            }
            _ => return Err(bad()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(GrowthFunction::CeilDiv(3).eval(9), 3);
        assert_eq!(GrowthFunction::CeilDiv(3).eval(10), 4);
        assert_eq!(GrowthFunction::CeilLog2Succ.eval(1), 1);
        assert_eq!(GrowthFunction::CeilLog2Succ.eval(7), 3);
        assert_eq!(GrowthFunction::CeilLog2Succ.eval(8), 4);
        let f = GrowthFunction::FloorLog2 { shift: 2, min: 2 };
        assert_eq!(f.eval(1), 2);
        assert_eq!(f.eval(31), 2);
        assert_eq!(f.eval(32), 3);
        assert_eq!(f.eval(200), 5);
        let t = GrowthFunction::Table(vec![1, 1, 2]);
        assert_eq!((t.eval(1), t.eval(3), t.eval(100)), (1, 2, 2));
    }

    #[test]
    fn order_flags() {
        assert!(!GrowthFunction::Const(2).is_order_function());
        assert!(GrowthFunction::Id.is_order_function());
        assert!(GrowthFunction::Table(vec![1, 2]).is_order_function());
        assert!(!GrowthFunction::Table(vec![2, 1]).is_order_function());
        assert!(!GrowthFunction::Table(vec![2, 2]).is_order_function());
    }

    #[test]
    fn text_round_trip() {
        for s in [
            "const:2",
            "ceil-div:4",
            "id",
            "ceil-log2-succ",
            "floor-log2:2:2",
            "table:1,2,5",
        ] {
            let g: GrowthFunction = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("ceil-div:0".parse::<GrowthFunction>(), Err(GrowthError::ZeroDivisor));
        assert!("id:3".parse::<GrowthFunction>().is_err());
        assert!("table:".parse::<GrowthFunction>().is_err());
        assert!("nope".parse::<GrowthFunction>().is_err());
    }
}
