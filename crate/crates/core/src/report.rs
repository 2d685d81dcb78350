//! The solver report shared by the exponent-1 and exponent-2 solvers, its
//! text form, and an audit against a coloring and growth function.

use std::fmt::{self, Write as _};

use crate::coloring::{colors_used, is_homogeneous, Color, ColoringError, ColoringRule, Homogeneity};
use crate::exp1::Exp1Solution;
use crate::exp2::{Confidence, Exp2Pipeline, HelperString};
use crate::format::{parse_single_u32, parse_u32, FormatError, Lines};
use crate::growth::GrowthFunction;
use crate::packed::packed_report;
use crate::partition::IntervalLadder;
use crate::set::{NumberSet, Point};

pub const REPORT_HEADER: &str = "prt-report 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Exp1,
    Exp2,
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportKind::Exp1 => "exp1",
            ReportKind::Exp2 => "exp2",
        })
    }
}

/// Everything a solver run produced, in a solver-independent shape.
///
/// Exponent-1 reports have no between-block colors and no helper; their
/// within-block color is the color of the block's points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverReport {
    pub kind: ReportKind,
    pub ladder: IntervalLadder,
    pub blocks: Vec<NumberSet>,
    pub color_across: Option<Vec<Color>>,
    pub color_within: Vec<Option<Color>>,
    pub chosen: (Option<Color>, Option<Color>),
    pub helper: Option<HelperString>,
    /// 1-based block indices.
    pub selected: Vec<usize>,
    pub result: NumberSet,
    pub confidence: Confidence,
}

impl SolverReport {
    pub fn from_exp1(s: &Exp1Solution) -> Self {
        Self {
            kind: ReportKind::Exp1,
            ladder: s.ladder.clone(),
            blocks: s.blocks.clone(),
            color_across: None,
            color_within: s.induced.iter().map(|&c| Some(c)).collect(),
            chosen: (None, Some(s.chosen_color)),
            helper: None,
            selected: s.selected.clone(),
            result: s.result.clone(),
            confidence: Confidence::Certified,
        }
    }

    pub fn from_exp2(p: &Exp2Pipeline) -> Self {
        let (a, w) = p.chosen_pair();
        Self {
            kind: ReportKind::Exp2,
            ladder: p.ladder().clone(),
            blocks: p.blocks(),
            color_across: Some(p.induced_between.clone()),
            color_within: p.induced_within.clone(),
            chosen: (Some(a), w),
            helper: Some(p.helper.clone()),
            selected: p.selected.clone(),
            result: p.result.clone(),
            confidence: p.confidence,
        }
    }

    fn pair(&self, i: usize) -> (Option<Color>, Option<Color>) {
        (self.color_across.as_ref().map(|a| a[i - 1]), self.color_within[i - 1])
    }

    /// Internal consistency, independent of any coloring.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.ladder.num_intervals();
        if n == 0 {
            return Err("ladder has no intervals".into());
        }
        if self.blocks.len() != n {
            return Err(format!("{} blocks for {n} intervals", self.blocks.len()));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            let (lo, hi) = self.ladder.interval(i + 1);
            if b.is_empty() {
                return Err(format!("block {} is empty", i + 1));
            }
            if b.min() <= Some(lo) || b.max() > Some(hi) {
                return Err(format!("block {} leaves ({lo}, {hi}]", i + 1));
            }
        }
        if self.color_within.len() != n {
            return Err("color-within has the wrong length".into());
        }
        if let Some(a) = &self.color_across {
            if a.len() != n {
                return Err("color-across has the wrong length".into());
            }
        }
        match self.kind {
            ReportKind::Exp1 => {
                if self.color_across.is_some() || self.helper.is_some() || self.chosen.0.is_some() {
                    return Err("exp1 reports carry no between-block colors or helper".into());
                }
                if self.color_within.iter().any(Option::is_none) || self.chosen.1.is_none() {
                    return Err("exp1 blocks always carry a color".into());
                }
                if self.confidence != Confidence::Certified {
                    return Err("exp1 reports are always certified".into());
                }
            }
            ReportKind::Exp2 => {
                let (Some(across), Some(helper)) = (&self.color_across, &self.helper) else {
                    return Err("exp2 reports need color-across and a helper".into());
                };
                if self.chosen.0.is_none() {
                    return Err("exp2 reports choose a between-block color".into());
                }
                if (helper.len() as u64) < u64::from(self.ladder.span().1) {
                    return Err("helper is shorter than the ladder".into());
                }
                for (i, b) in self.blocks.iter().enumerate() {
                    if helper.get(b.min().expect("nonempty")) != Some(across[i]) {
                        return Err(format!("color-across of block {} disagrees with the helper", i + 1));
                    }
                    if (b.len() >= 2) != self.color_within[i].is_some() {
                        return Err(format!("color-within of block {} does not match its size", i + 1));
                    }
                }
                if let Confidence::Downgraded { unknown_steps: 0 } = self.confidence {
                    return Err("downgraded with zero unknown steps".into());
                }
            }
        }
        if self.selected.is_empty() || self.selected.windows(2).any(|w| w[0] >= w[1]) {
            return Err("selected must be nonempty and increasing".into());
        }
        if self.selected[0] == 0 || *self.selected.last().expect("nonempty") > n {
            return Err("selected index out of range".into());
        }
        let expect: Vec<usize> = (1..=n).filter(|&i| self.pair(i) == self.chosen).collect();
        if expect != self.selected {
            return Err("selected is not the set of blocks with the chosen colors".into());
        }
        let mut members = Vec::new();
        for &i in &self.selected {
            members.extend_from_slice(self.blocks[i - 1].as_slice());
        }
        if members != self.result.as_slice() {
            return Err("result is not the union of the selected blocks".into());
        }
        Ok(())
    }

    /// Checks the report against `f` and `φ`; returns the failed checks.
    pub fn audit(&self, f: &ColoringRule, phi: &GrowthFunction) -> Result<Vec<String>, ColoringError> {
        let mut failures = Vec::new();
        if let Err(e) = self.validate() {
            failures.push(e);
            return Ok(failures);
        }
        for (i, b) in self.blocks.iter().enumerate() {
            let w = self.ladder.boundary(i + 1);
            if (b.len() as u64) < u64::from(phi.eval(w).max(1)) {
                failures.push(format!("block {} is smaller than φ({w})", i + 1));
            }
            let h = is_homogeneous(f, b)?;
            let ok = match (self.kind, h) {
                (ReportKind::Exp1, Homogeneity::Color(c)) => Some(c) == self.color_within[i],
                (ReportKind::Exp2, Homogeneity::Color(c)) => Some(c) == self.color_within[i],
                (ReportKind::Exp2, Homogeneity::Vacuous) => self.color_within[i].is_none(),
                _ => false,
            };
            if !ok {
                failures.push(format!("block {} is not homogeneous in its recorded color", i + 1));
            }
        }
        if let Some(across) = &self.color_across {
            for (i, bi) in self.blocks.iter().enumerate() {
                for bj in &self.blocks[i + 1..] {
                    let bad = bi.iter().any(|x| bj.iter().any(|y| f.color(&[x, y]) != across[i]));
                    if bad {
                        failures.push(format!(
                            "pairs leaving block {} are not all colored {}",
                            i + 1,
                            across[i]
                        ));
                        break;
                    }
                }
            }
        }
        let used = colors_used(f, &self.result)?;
        let limit = match self.kind {
            ReportKind::Exp1 => 1,
            ReportKind::Exp2 => 2,
        };
        if used.len() > limit {
            failures.push(format!("result uses {} colors", used.len()));
        }
        let top = self.ladder.span().1;
        let packed = packed_report(&self.result, phi, top);
        for &i in &self.selected {
            let w = self.ladder.boundary(i);
            if !packed.is_witness(w) {
                failures.push(format!("no packedness witness at w_{i} = {w}"));
            }
        }
        Ok(failures)
    }
}

fn join<T: fmt::Display>(it: impl IntoIterator<Item = T>) -> String {
    it.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn opt(c: Option<Color>) -> String {
    c.map_or_else(|| "-".to_owned(), |c| c.to_string())
}

pub fn write_report(r: &SolverReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{REPORT_HEADER}");
    let _ = writeln!(out, "kind {}", r.kind);
    let _ = writeln!(out, "ladder {}", join(r.ladder.boundaries()));
    for b in &r.blocks {
        let _ = writeln!(out, "block {}", join(b));
    }
    let _ = writeln!(
        out,
        "color-across {}",
        r.color_across.as_ref().map_or_else(|| "-".to_owned(), join)
    );
    let _ = writeln!(out, "color-within {}", join(r.color_within.iter().map(|&c| opt(c))));
    let _ = writeln!(out, "chosen {} {}", opt(r.chosen.0), opt(r.chosen.1));
    let _ = writeln!(
        out,
        "helper {}",
        r.helper.as_ref().map_or_else(|| "-".to_owned(), |h| join(h.values()))
    );
    let _ = writeln!(out, "selected {}", join(&r.selected));
    let _ = writeln!(out, "result {}", join(&r.result));
    match r.confidence {
        Confidence::Certified => out.push_str("confidence certified\n"),
        Confidence::Downgraded { unknown_steps } => {
            let _ = writeln!(out, "confidence downgraded {unknown_steps}");
        }
    }
    out.push_str("end\n");
    out
}

fn points(no: usize, rest: &str) -> Result<Vec<Point>, FormatError> {
    rest.split_whitespace().map(|t| parse_u32(no, t, "point")).collect()
}

fn color(no: usize, tok: &str) -> Result<Color, FormatError> {
    match parse_u32(no, tok, "color")? {
        0 => Err(FormatError::new(no, "colors are positive")),
        c => Ok(c),
    }
}

fn opt_color(no: usize, tok: &str) -> Result<Option<Color>, FormatError> {
    if tok == "-" {
        Ok(None)
    } else {
        color(no, tok).map(Some)
    }
}

fn colors(no: usize, rest: &str) -> Result<Vec<Color>, FormatError> {
    rest.split_whitespace().map(|t| color(no, t)).collect()
}

fn opt_list(no: usize, rest: &str) -> Result<Option<Vec<Color>>, FormatError> {
    if rest == "-" {
        Ok(None)
    } else {
        colors(no, rest).map(Some)
    }
}

/// Parses a report and checks its internal consistency.
pub fn parse_report(text: &str) -> Result<SolverReport, FormatError> {
    let mut lines = Lines::new(text);
    lines.exact(REPORT_HEADER)?;
    let (no, rest) = lines.keyed("kind")?;
    let kind = match rest {
        "exp1" => ReportKind::Exp1,
        "exp2" => ReportKind::Exp2,
        other => return Err(FormatError::new(no, format!("unknown kind `{other}`"))),
    };
    let (lno, rest) = lines.keyed("ladder")?;
    let ladder = IntervalLadder::new(points(lno, rest)?).map_err(|e| FormatError::new(lno, e.to_string()))?;
    let mut blocks = Vec::new();
    while lines.peek_key() == Some("block") {
        let (no, rest) = lines.keyed("block")?;
        blocks.push(NumberSet::new(points(no, rest)?).map_err(|e| FormatError::new(no, e.to_string()))?);
    }
    let (no, rest) = lines.keyed("color-across")?;
    let color_across = opt_list(no, rest)?;
    let (no, rest) = lines.keyed("color-within")?;
    let color_within = rest
        .split_whitespace()
        .map(|t| opt_color(no, t))
        .collect::<Result<Vec<_>, _>>()?;
    let (no, rest) = lines.keyed("chosen")?;
    let toks: Vec<&str> = rest.split_whitespace().collect();
    let [a, w] = toks[..] else {
        return Err(FormatError::new(no, "chosen takes two fields"));
    };
    let chosen = (opt_color(no, a)?, opt_color(no, w)?);
    let (no, rest) = lines.keyed("helper")?;
    let helper = opt_list(no, rest)?.map(HelperString::new);
    let (no, rest) = lines.keyed("selected")?;
    let selected = rest
        .split_whitespace()
        .map(|t| parse_u32(no, t, "index").map(|i| i as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let (no, rest) = lines.keyed("result")?;
    let result = NumberSet::new(points(no, rest)?).map_err(|e| FormatError::new(no, e.to_string()))?;
    let (cno, rest) = lines.keyed("confidence")?;
    let confidence = match rest.split_once(char::is_whitespace) {
        None if rest == "certified" => Confidence::Certified,
        Some(("downgraded", n)) => Confidence::Downgraded {
            unknown_steps: parse_single_u32(cno, n, "step count")? as usize,
        },
        _ => return Err(FormatError::new(cno, format!("bad confidence `{rest}`"))),
    };
    lines.exact("end")?;
    lines.finish()?;
    let report = SolverReport {
        kind,
        ladder,
        blocks,
        color_across,
        color_within,
        chosen,
        helper,
        selected,
        result,
        confidence,
    };
    report.validate().map_err(|e| FormatError::new(lno, e))?;
    Ok(report)
}
