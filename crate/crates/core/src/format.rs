//! Line-oriented text formats for colorings, sets and growth tables.
//!
//! The grammars are documented in `docs/FORMATS.md`. In every format a `#`
//! starts a comment running to the end of the line, and blank lines are
//! ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::coloring::{same_colors, table_len, Color, ColoringRule, MAX_TABLE_LEN};
use crate::growth::GrowthFunction;
use crate::set::{NumberSet, Point};

pub const COLORING_HEADER: &str = "prt-coloring 1";

/// Colors per line in written coloring files.
const COLORS_PER_LINE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    /// 1-based; 0 means end of input.
    pub line: usize,
    pub msg: String,
}

impl FormatError {
    pub(crate) fn new(line: usize, msg: impl Into<String>) -> Self {
        Self { line, msg: msg.into() }
    }
}

/// Meaningful lines of a text: comments stripped, blanks skipped.
pub(crate) struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Self { inner: it.peekable() }
    }

    pub(crate) fn next_line(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        self.inner
            .next()
            .ok_or_else(|| FormatError::new(0, format!("unexpected end of input, expected {what}")))
    }

    pub(crate) fn peek_key(&mut self) -> Option<&'a str> {
        self.inner
            .peek()
            .map(|(_, l)| l.split_whitespace().next().unwrap_or(""))
    }

    /// The rest of the next line, which must start with `key`.
    pub(crate) fn keyed(&mut self, key: &str) -> Result<(usize, &'a str), FormatError> {
        let (no, line) = self.next_line(key)?;
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if head != key {
            return Err(FormatError::new(no, format!("expected `{key}`, found `{head}`")));
        }
        Ok((no, rest.trim()))
    }

    pub(crate) fn exact(&mut self, want: &str) -> Result<usize, FormatError> {
        let (no, line) = self.next_line(want)?;
        let norm: Vec<&str> = line.split_whitespace().collect();
        if norm != want.split_whitespace().collect::<Vec<_>>() {
            return Err(FormatError::new(no, format!("expected `{want}`, found `{line}`")));
        }
        Ok(no)
    }

    pub(crate) fn finish(&mut self) -> Result<(), FormatError> {
        match self.inner.next() {
            Some((no, l)) => Err(FormatError::new(no, format!("trailing content `{l}`"))),
            None => Ok(()),
        }
    }
}

pub(crate) fn parse_u32(no: usize, tok: &str, what: &str) -> Result<u32, FormatError> {
    tok.parse()
        .map_err(|_| FormatError::new(no, format!("bad {what} `{tok}`")))
}

pub(crate) fn parse_single_u32(no: usize, rest: &str, what: &str) -> Result<u32, FormatError> {
    let mut toks = rest.split_whitespace();
    match (toks.next(), toks.next()) {
        (Some(t), None) => parse_u32(no, t, what),
        _ => Err(FormatError::new(no, format!("expected one {what}"))),
    }
}

/// Parses a coloring file.
///
/// With both a rule and a colors section the two must agree; the rule form
/// is returned.
pub fn parse_coloring(text: &str) -> Result<ColoringRule, FormatError> {
    let mut lines = Lines::new(text);
    lines.exact(COLORING_HEADER)?;
    let (no, rest) = lines.keyed("n")?;
    let n = parse_single_u32(no, rest, "exponent")?;
    let (no, rest) = lines.keyed("k")?;
    let k = parse_single_u32(no, rest, "palette")?;
    let (hno, rest) = lines.keyed("horizon")?;
    let horizon = parse_single_u32(hno, rest, "horizon")?;
    let rule = match lines.peek_key() {
        Some("rule") => {
            let (no, tag) = lines.keyed("rule")?;
            Some(ColoringRule::from_tag(n, k, horizon, tag).map_err(|e| FormatError::new(no, e.to_string()))?)
        }
        _ => None,
    };
    let table = match lines.peek_key() {
        Some("colors") => {
            let no = lines.exact("colors")?;
            let len = match table_len(n, horizon) {
                Some(l) if l <= MAX_TABLE_LEN => l as usize,
                _ => return Err(FormatError::new(no, "colors section too large")),
            };
            let mut colors: Vec<Color> = Vec::with_capacity(len);
            loop {
                let (no, line) = lines.next_line("`end`")?;
                if line == "end" {
                    break;
                }
                for tok in line.split_whitespace() {
                    if colors.len() == len {
                        return Err(FormatError::new(no, format!("more than {len} colors")));
                    }
                    colors.push(parse_u32(no, tok, "color")?);
                }
            }
            Some(ColoringRule::from_table(n, k, horizon, colors).map_err(|e| FormatError::new(no, e.to_string()))?)
        }
        _ => {
            lines.exact("end")?;
            None
        }
    };
    lines.finish()?;
    match (rule, table) {
        (Some(r), Some(t)) => {
            if !same_colors(&r, &t) {
                return Err(FormatError::new(hno, "rule and colors section disagree"));
            }
            Ok(r)
        }
        (Some(r), None) => Ok(r),
        (None, Some(t)) => Ok(t),
        (None, None) => Err(FormatError::new(hno, "neither a rule nor a colors section")),
    }
}

/// Writes a coloring file: the rule tag when there is one, otherwise the
/// full colors section.
pub fn write_coloring(f: &ColoringRule) -> Result<String, crate::coloring::ColoringError> {
    let mut out = String::new();
    let _ = writeln!(out, "{COLORING_HEADER}");
    let _ = writeln!(out, "n {}", f.exponent());
    let _ = writeln!(out, "k {}", f.palette());
    let _ = writeln!(out, "horizon {}", f.horizon());
    if let Some(tag) = f.rule().and_then(|r| r.tag()) {
        let _ = writeln!(out, "rule {tag}");
    } else {
        let tab;
        let colors = match f.table() {
            Some(t) => t,
            None => {
                tab = f.tabulate()?;
                tab.table().expect("tabulated")
            }
        };
        out.push_str("colors\n");
        for chunk in colors.chunks(COLORS_PER_LINE) {
            let line: Vec<String> = chunk.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    out.push_str("end\n");
    Ok(out)
}

/// Parses a set file: one positive integer per line, no duplicates.
pub fn parse_set(text: &str) -> Result<NumberSet, FormatError> {
    let mut points: Vec<(Point, usize)> = Vec::new();
    let mut lines = Lines::new(text);
    for (no, line) in lines.inner.by_ref() {
        let x = parse_single_u32(no, line, "point")?;
        if x == 0 {
            return Err(FormatError::new(no, "points are positive"));
        }
        points.push((x, no));
    }
    points.sort_unstable();
    if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(FormatError::new(
            w[0].1.max(w[1].1),
            format!("duplicate point {}", w[0].0),
        ));
    }
    Ok(NumberSet::from_sorted_unchecked(
        points.into_iter().map(|(x, _)| x).collect(),
    ))
}

/// One point per line, ascending.
pub fn write_set(a: &NumberSet) -> String {
    let mut out = String::new();
    for x in a {
        let _ = writeln!(out, "{x}");
    }
    out
}

/// Parses a growth table file: whitespace-separated values `φ(1), φ(2), …`;
/// the last value is held for every larger `w`.
pub fn parse_growth_table(text: &str) -> Result<GrowthFunction, FormatError> {
    let mut values = Vec::new();
    let mut lines = Lines::new(text);
    for (no, line) in lines.inner.by_ref() {
        for tok in line.split_whitespace() {
            values.push(parse_u32(no, tok, "value")?);
        }
    }
    if values.is_empty() {
        return Err(FormatError::new(0, "empty growth table"));
    }
    Ok(GrowthFunction::Table(values))
}

pub fn write_growth_table(values: &[u32]) -> String {
    let mut out = String::new();
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}
