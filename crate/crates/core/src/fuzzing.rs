//! Round-trip checks driven by the fuzz targets and the corpus test.
//!
//! Each check accepts arbitrary bytes; it returns quietly on input the
//! parser rejects and panics if an accepted input fails to round-trip.

use std::ops::ControlFlow;

use crate::coloring::{same_colors, ColoringRule};
use crate::format::{parse_coloring, parse_growth_table, parse_set, write_coloring, write_growth_table, write_set};
use crate::growth::GrowthFunction;
use crate::partition::PartitionType;
use crate::report::{parse_report, write_report};
use crate::set::for_each_subset;

/// Names accepted by [`run`].
pub const TARGETS: &[&str] = &[
    "coloring",
    "set",
    "growth",
    "growth_table",
    "rule_tag",
    "report",
    "partition_type",
];

pub fn run(target: &str, data: &[u8]) {
    match target {
        "coloring" => coloring(data),
        "set" => set(data),
        "growth" => growth(data),
        "growth_table" => growth_table(data),
        "rule_tag" => rule_tag(data),
        "report" => report(data),
        "partition_type" => partition_type(data),
        other => panic!("unknown fuzz target {other}"),
    }
}

fn text(data: &[u8]) -> Option<&str> {
    std::str::from_utf8(data).ok()
}

pub fn coloring(data: &[u8]) {
    let Some(t) = text(data) else { return };
    let Ok(f) = parse_coloring(t) else { return };
    let out = write_coloring(&f).expect("parsed colorings are writable");
    let g = parse_coloring(&out).expect("written coloring re-parses");
    assert_eq!(f, g);
    assert_eq!(out, write_coloring(&g).expect("writable"));
}

pub fn set(data: &[u8]) {
    let Some(t) = text(data) else { return };
    let Ok(a) = parse_set(t) else { return };
    assert_eq!(parse_set(&write_set(&a)).expect("written set re-parses"), a);
}

pub fn growth(data: &[u8]) {
    let Some(t) = text(data) else { return };
    let Ok(phi) = t.parse::<GrowthFunction>() else { return };
    let back: GrowthFunction = phi.to_string().parse().expect("displayed growth function re-parses");
    assert_eq!(back, phi);
    for w in [0, 1, 2, 3, 1000, u32::MAX] {
        let _ = phi.eval(w);
    }
}

pub fn growth_table(data: &[u8]) {
    let Some(t) = text(data) else { return };
    let Ok(GrowthFunction::Table(values)) = parse_growth_table(t) else {
        return;
    };
    assert_eq!(
        parse_growth_table(&write_growth_table(&values)),
        Ok(GrowthFunction::Table(values))
    );
}

/// The first three bytes pick `n` (1..=4), `k` (1..=8) and the horizon
/// (1..=32); the rest is the rule tag.
pub fn rule_tag(data: &[u8]) {
    let [a, b, c, rest @ ..] = data else { return };
    let n = u32::from(a % 4) + 1;
    let k = u32::from(b % 8) + 1;
    let horizon = u32::from(c % 32) + 1;
    let Some(tag) = text(rest) else { return };
    let Ok(f) = ColoringRule::from_tag(n, k, horizon, tag) else {
        return;
    };
    let canon = f.rule().and_then(|r| r.tag()).expect("tag-built rules have tags");
    let g = ColoringRule::from_tag(n, k, horizon, &canon).expect("canonical tag re-parses");
    assert_eq!(f, g);
    let ground: Vec<u32> = (1..=horizon.min(12)).collect();
    let _ = for_each_subset::<()>(&ground, n as usize, |z| {
        let c = f.try_color(z).expect("in-horizon subsets are colorable");
        assert!((1..=k).contains(&c));
        ControlFlow::Continue(())
    });
    if let Ok(t) = f.tabulate() {
        assert!(same_colors(&f, &t));
    }
}

pub fn report(data: &[u8]) {
    let Some(t) = text(data) else { return };
    let Ok(r) = parse_report(t) else { return };
    let out = write_report(&r);
    assert_eq!(parse_report(&out).expect("written report re-parses"), r);
}

pub fn partition_type(data: &[u8]) {
    let Some(t) = text(data) else { return };
    let Ok(p) = t.parse::<PartitionType>() else { return };
    assert_eq!(
        p.to_string()
            .parse::<PartitionType>()
            .expect("displayed type re-parses"),
        p
    );
    let n = p.exponent();
    assert_eq!(PartitionType::from_index(n, p.index()), Some(p));
}
