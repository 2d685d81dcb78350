//! Invariants as property tests.

mod common;

use std::collections::BTreeSet;

use common::{brute_colors, brute_homogeneous, combinations};
use packed_ramsey::{
    arrow_holds, build_pipeline, build_sharp_ladder, colex_rank, colors_used, enumerate_subsets, extract_homogeneous,
    find_homogeneous_subset, in_tree, is_block, is_homogeneous, is_increasing_block_sequence, is_semi_homogeneous,
    merge_h, packed_report, packed_report_with_threshold, parse_coloring, parse_report, parse_set, partition_type_of,
    partition_types, refine_by_color, same_colors, solve_exp1, types_present, unique_allones_color, write_coloring,
    write_report, write_set, ArrowQuery, ColoringRule, Exp2Error, GrowthFunction, IntervalLadder, LargenessOracle,
    NumberSet, PartitionType, PipelineBounds, SharpColoring, SolverReport, TreeVerdict,
};
use proptest::prelude::*;

const BUDGET: u64 = 20_000_000;

fn small_set(max: u32, len: usize) -> impl Strategy<Value = NumberSet> {
    proptest::collection::btree_set(1..=max, 0..=len).prop_map(|s| NumberSet::from_points(s).unwrap())
}

fn coloring(n: u32, horizon: u32) -> impl Strategy<Value = ColoringRule> {
    (1..=3u32, any::<u32>(), 0..3u32, 0..4u32).prop_map(move |(k, seed, kind, window)| {
        let tag = match kind {
            0 => format!("hash:{seed}"),
            1 => format!("stable:{seed}:{window}"),
            _ => return ColoringRule::from_tag(n, 2, horizon, "min-parity").unwrap(),
        };
        ColoringRule::from_tag(n, k, horizon, &tag).unwrap()
    })
}

fn growth() -> impl Strategy<Value = GrowthFunction> {
    prop_oneof![
        (0..5u32).prop_map(GrowthFunction::Const),
        (1..5u32).prop_map(GrowthFunction::CeilDiv),
        Just(GrowthFunction::Id),
        Just(GrowthFunction::CeilLog2Succ),
        (0..3u32, 0..3u32).prop_map(|(shift, min)| GrowthFunction::FloorLog2 { shift, min }),
        proptest::collection::vec(0..6u32, 1..8).prop_map(GrowthFunction::Table),
    ]
}

fn ladder(max_len: usize) -> impl Strategy<Value = IntervalLadder> {
    proptest::collection::vec(1..5u32, 1..=max_len).prop_map(|gaps| {
        let mut b = vec![0];
        for g in gaps {
            b.push(b.last().unwrap() + g);
        }
        IntervalLadder::new(b).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn subsets_are_distinct_sorted_and_counted(g in small_set(14, 10), n in 0usize..5) {
        let subs = enumerate_subsets(&g, n);
        let expect = combinations(g.as_slice(), n).len();
        prop_assert_eq!(subs.len(), expect);
        for s in &subs {
            prop_assert_eq!(s.len(), n);
            prop_assert!(s.is_subset_of(&g));
        }
        // Colex order is canonical-code order, and the rank counts positions.
        prop_assert!(subs.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(subs.windows(2).all(|w| w[0].canonical_code() < w[1].canonical_code()));
        if g == NumberSet::interval(1, g.len() as u32) {
            for (i, s) in subs.iter().enumerate() {
                prop_assert_eq!(colex_rank(s.as_slice()), Some(i as u64));
            }
        }
    }

    #[test]
    fn canonical_order_is_total(mut v in proptest::collection::vec(small_set(60, 6), 1..20)) {
        v.sort();
        for w in v.windows(2) {
            prop_assert!(w[0] <= w[1]);
            prop_assert_eq!(w[0] == w[1], w[0].canonical_code() == w[1].canonical_code());
            prop_assert!(w[0].canonical_code() <= w[1].canonical_code());
        }
    }

    #[test]
    fn homogeneous_implies_semi_homogeneous(f in coloring(2, 12), a in small_set(12, 6)) {
        let hom = is_homogeneous(&f, &a).unwrap();
        prop_assert_eq!(hom.is_homogeneous(), brute_homogeneous(&f, &a));
        if hom.is_homogeneous() {
            prop_assert!(is_semi_homogeneous(&f, &a).unwrap());
        }
        prop_assert_eq!(colors_used(&f, &a).unwrap(), brute_colors(&f, &a));
    }

    #[test]
    fn prefix_restriction_keeps_colors(f in coloring(3, 10), cut in 3u32..=10) {
        let t = f.tabulate().unwrap();
        prop_assert!(same_colors(&f, &t));
        let small = f.with_horizon(cut).unwrap();
        for z in combinations(&(1..=cut).collect::<Vec<_>>(), 3) {
            prop_assert_eq!(small.color(&z), f.color(&z));
        }
        let st = small.tabulate().unwrap();
        let small_table = st.table().unwrap();
        prop_assert_eq!(&t.table().unwrap()[..small_table.len()], small_table);
    }

    #[test]
    fn partition_types_sum_and_belong(l in ladder(6), picks in proptest::collection::btree_set(1u32..40, 1..6)) {
        let top = l.span().1;
        let z = NumberSet::from_points(picks.into_iter().filter(|&x| x <= top)).unwrap();
        prop_assume!(!z.is_empty());
        let t = partition_type_of(&z, &l).unwrap();
        prop_assert_eq!(t.parts().iter().sum::<u32>() as usize, z.len());
        prop_assert!(partition_types(z.len() as u32).contains(&t));
        prop_assert_eq!(PartitionType::from_index(t.exponent(), t.index()), Some(t.clone()));
        prop_assert_eq!(t.to_string().parse::<PartitionType>().unwrap(), t);
    }

    #[test]
    fn refine_keeps_exactly_the_colored_points(f in coloring(2, 16), x in small_set(16, 12), pivot in 1u32..16, c in 1u32..=3) {
        prop_assume!(c <= f.palette());
        let got = refine_by_color(&x, &f, pivot, c).unwrap();
        let expect: Vec<u32> = x.iter().filter(|&y| y > pivot && f.color(&[pivot, y]) == c).collect();
        prop_assert_eq!(got.as_slice(), &expect[..]);
    }

    #[test]
    fn packed_report_matches_scan_and_is_monotone(a in small_set(40, 15), extra in small_set(40, 5), phi in growth()) {
        let r = packed_report(&a, &phi, 40);
        let scan: Vec<u32> = (1..=40).filter(|&w| a.count_upto(w) as u64 >= u64::from(phi.eval(w))).collect();
        prop_assert_eq!(r.iter_witnesses().collect::<Vec<_>>(), scan);
        // More members never lose a witness.
        let bigger = packed_report(&a.union(&extra), &phi, 40);
        prop_assert!(r.iter_witnesses().all(|w| bigger.is_witness(w)));
        let t = packed_report_with_threshold(&a, &phi, 40, 20);
        prop_assert_eq!(t.witnesses, r.witnesses);
    }

    #[test]
    fn is_block_is_antitone_in_phi(f in coloring(2, 12), y in small_set(12, 5), c in 0u32..5) {
        // φ ≤ ψ pointwise: a ψ-block is a φ-block.
        let lo = GrowthFunction::Const(c);
        let hi = GrowthFunction::Const(c + 1);
        if is_block(&y, &f, &hi).unwrap() {
            prop_assert!(is_block(&y, &f, &lo).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arrow_is_sound_and_monotone(w in 2u32..=7, m in 2u32..=5, k in 1u32..=2) {
        let q = ArrowQuery::new(w, m, 2, k);
        let ans = arrow_holds(q, BUDGET).unwrap();
        if let Some(cert) = &ans.certificate {
            prop_assert!(find_homogeneous_subset(cert, m as usize).is_none());
        }
        if ans.holds {
            // w → (m) implies w+1 → (m) and w → (m-1).
            prop_assert!(arrow_holds(ArrowQuery::new(w + 1, m, 2, k), BUDGET).unwrap().holds);
            prop_assert!(arrow_holds(ArrowQuery::new(w, m - 1, 2, k), BUDGET).unwrap().holds);
        }
    }

    #[test]
    fn exp1_is_deterministic_homogeneous_and_packed(seed in any::<u32>(), k in 1u32..=3, count in 1usize..7) {
        let f = ColoringRule::from_tag(1, k, 1 << 12, &format!("hash:{seed}")).unwrap();
        let phi = GrowthFunction::CeilDiv(2 * k);
        let s = solve_exp1(&f, &phi, count).unwrap();
        prop_assert_eq!(&s, &solve_exp1(&f, &phi, count).unwrap());
        prop_assert!(is_homogeneous(&f, &s.result).unwrap().is_homogeneous());
        let seq = s.selected_sequence();
        prop_assert!(is_increasing_block_sequence(&seq, &f, &phi).unwrap());
        // Every selected boundary is a witness of packedness of the result.
        let r = packed_report(&s.result, &phi, *seq.ladder().boundaries().last().unwrap());
        for &i in &s.selected {
            prop_assert!(r.is_witness(s.ladder.boundary(i)));
        }
        let report = SolverReport::from_exp1(&s);
        prop_assert_eq!(parse_report(&write_report(&report)).unwrap(), report.clone());
        prop_assert!(report.audit(&f, &phi).unwrap().is_empty());
    }

    #[test]
    fn exp2_pipeline_invariants(seed in any::<u32>(), window in 2u32..4) {
        let f = ColoringRule::from_tag(2, 2, 40, &format!("stable:{seed}:{window}")).unwrap();
        let phi = GrowthFunction::Const(2);
        let bounds = PipelineBounds::new(40, 2, 2, BUDGET);
        let p = match build_pipeline(&f, &phi, 3, &bounds) {
            Ok(p) => p,
            // Undecided at these bounds is allowed; a wrong answer is not.
            Err(e) => {
                prop_assert!(!matches!(e, Exp2Error::InvariantViolation { .. }), "{}", e);
                return Ok(());
            }
        };
        let blocks = p.blocks();
        for (i, yi) in blocks.iter().enumerate() {
            prop_assert!(yi.len() >= 2);
            prop_assert!(brute_homogeneous(&f, yi));
            for yj in &blocks[i + 1..] {
                for x in yi.iter() {
                    for y in yj.iter() {
                        prop_assert_eq!(f.color(&[x, y]), p.induced_between[i]);
                    }
                }
            }
        }
        prop_assert!(brute_colors(&f, &p.result).len() <= 2);
        // No prefix of the helper was ever judged small.
        let oracle = LargenessOracle::new(&f).unwrap();
        for len in 0..p.helper.len().min(4) {
            let v = in_tree(&p.helper.prefix(len), &oracle, &phi, &bounds).unwrap();
            prop_assert!(!v.is_small(), "prefix {}", len);
            prop_assert_eq!(v.is_large(), p.helper_verdicts[len] == TreeVerdict::Large);
        }
        let report = SolverReport::from_exp2(&p);
        prop_assert_eq!(parse_report(&write_report(&report)).unwrap(), report.clone());
        prop_assert!(report.audit(&f, &phi).unwrap().is_empty());
    }

    #[test]
    fn sharp_coloring_on_packed_and_sparse_sets(n in 1u32..=3, picks in proptest::collection::vec(any::<u32>(), 12)) {
        let phi = GrowthFunction::Id;
        let l = build_sharp_ladder(&phi, n, 6).unwrap();
        let g = SharpColoring::new(n, l.clone()).unwrap();
        // n points in each of the first n intervals past the first: every type occurs.
        let mut pts = BTreeSet::new();
        for i in 2..=n as usize + 1 {
            let (lo, hi) = l.interval(i);
            let room: Vec<u32> = (lo + 1..=hi).collect();
            for j in 0..n as usize {
                pts.insert(room[(picks[(i * 3 + j) % 12] as usize + j) % room.len()]);
            }
            // Fill up to n distinct points.
            for &x in &room {
                if pts.iter().filter(|&&p| p > lo && p <= hi).count() >= n as usize {
                    break;
                }
                pts.insert(x);
            }
        }
        let a = NumberSet::from_points(pts).unwrap();
        prop_assert_eq!(types_present(&a, &l, n).unwrap(), partition_types(n));
        prop_assert_eq!(colors_used(&g.rule(), &a).unwrap().len() as u32, g.palette());
        // One point per interval: only the all-ones type.
        let sparse = extract_homogeneous(&a, &l);
        let used = colors_used(&g.rule(), &sparse).unwrap();
        prop_assert!(used.len() <= 1);
        if sparse.len() >= n as usize {
            prop_assert_eq!(used.into_iter().collect::<Vec<_>>(), vec![1]);
        }
    }

    #[test]
    fn merged_palette_and_allones_color(n in 1u32..=4, k in 1u32..=4, seed in any::<u32>()) {
        let l = build_sharp_ladder(&GrowthFunction::Id, n, 5).unwrap();
        let g = SharpColoring::new(n, l.clone()).unwrap();
        let span = l.span().1;
        let f = ColoringRule::from_tag(n, k, span, &format!("hash:{seed}")).unwrap();
        let h = merge_h(&f, &g).unwrap();
        prop_assert_eq!(h.palette(), (1 << (n - 1)) - 1 + k);
        // On sets with one point per interval h agrees with f.
        let sparse = NumberSet::from_points(l.boundaries()[1..].iter().copied()).unwrap();
        for z in enumerate_subsets(&sparse, n as usize) {
            prop_assert_eq!(h.color(z.as_slice()), f.color(z.as_slice()));
        }
        if n == 1 {
            // Every 1-set is all-ones.
            prop_assert_eq!(unique_allones_color(&f, &g, &NumberSet::interval(2, 2)).unwrap(), f.color(&[2]));
        }
    }

    #[test]
    fn coloring_and_set_files_round_trip(f in coloring(2, 9), table in any::<bool>(), a in small_set(1000, 20)) {
        let f = if table { f.tabulate().unwrap() } else { f };
        let back = parse_coloring(&write_coloring(&f).unwrap()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(parse_set(&write_set(&a)).unwrap(), a);
    }
}

#[test]
fn partition_type_counts() {
    for n in 1..=6u32 {
        let ts = partition_types(n);
        assert_eq!(ts.len(), 1 << (n - 1));
        assert!(ts.iter().all(|t| t.exponent() == n));
        assert_eq!(ts.iter().collect::<BTreeSet<_>>().len(), ts.len());
    }
}
