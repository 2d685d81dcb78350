//! Replays the checked-in fuzz seeds through the same entry points the
//! fuzz targets call. Seeds named `bad_*` are meant to be rejected; every
//! other seed must get past its parser.

use std::path::PathBuf;

use packed_ramsey::fuzzing::{self, TARGETS};
use packed_ramsey::{
    parse_coloring, parse_growth_table, parse_report, parse_set, ColoringRule, GrowthFunction, PartitionType,
};

fn accepted(target: &str, data: &[u8]) -> bool {
    if target == "rule_tag" {
        let [a, b, c, rest @ ..] = data else { return false };
        let tag = std::str::from_utf8(rest).unwrap();
        return ColoringRule::from_tag(u32::from(a % 4) + 1, u32::from(b % 8) + 1, u32::from(c % 32) + 1, tag).is_ok();
    }
    let t = std::str::from_utf8(data).unwrap();
    match target {
        "coloring" => parse_coloring(t).is_ok(),
        "set" => parse_set(t).is_ok(),
        "growth" => t.parse::<GrowthFunction>().is_ok(),
        "growth_table" => parse_growth_table(t).is_ok(),
        "report" => parse_report(t).is_ok(),
        "partition_type" => t.parse::<PartitionType>().is_ok(),
        other => panic!("no acceptance check for {other}"),
    }
}

#[test]
fn every_target_replays_its_seeds() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    for &target in TARGETS {
        let dir = root.join(target);
        let mut seeds: Vec<_> = std::fs::read_dir(&dir)
            .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
            .map(|e| e.unwrap().path())
            .collect();
        seeds.sort();
        assert!(!seeds.is_empty(), "{target} has no seeds");
        for path in seeds {
            let data = std::fs::read(&path).unwrap();
            fuzzing::run(target, &data);
            let bad = path.file_name().unwrap().to_string_lossy().starts_with("bad_");
            assert_eq!(accepted(target, &data), !bad, "{}", path.display());
        }
    }
}

#[test]
fn garbage_is_harmless() {
    for &target in TARGETS {
        for data in [
            &b""[..],
            b"\xff\xfe",
            b"\x00\x00\x00",
            b"prt-coloring 1\nn 99\n",
            b"((((",
            b"table:,,,",
        ] {
            fuzzing::run(target, data);
        }
    }
}
