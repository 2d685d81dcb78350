//! Packed Ramsey constructions at finite scale: arrow relations, packed and
//! semi-homogeneous sets, the exponent-1 and exponent-2 solvers, bounded
//! largeness, and the partition-type colorings that turn packed
//! semi-homogeneous sets back into homogeneous ones.

pub mod coloring;
pub mod exp1;
pub mod exp2;
pub mod format;
#[doc(hidden)]
pub mod fuzzing;
pub mod growth;
pub mod largeness;
pub mod packed;
pub mod partition;
pub mod ramsey;
pub mod report;
pub mod reversal;
pub mod set;

pub use coloring::{
    colors_used, is_homogeneous, is_semi_homogeneous, same_colors, Color, ColoringError, ColoringRule, Homogeneity,
    PairColoring, Rule,
};
pub use exp1::{build_ladder_exp1, solve_exp1, Exp1Error, Exp1Solution};
pub use exp2::{
    build_pipeline, extend_path, in_tree, next_block, tail_set, Confidence, Exp2Error, Exp2Pipeline, HelperPath,
    HelperString, PipelineBounds, TreeVerdict,
};
pub use format::{
    parse_coloring, parse_growth_table, parse_set, write_coloring, write_growth_table, write_set, FormatError,
};
pub use growth::{GrowthError, GrowthFunction};
pub use largeness::{check_large, refine_by_color, LargenessError, LargenessOracle, LargenessQuery, LargenessVerdict};
pub use packed::{
    is_block, is_increasing_block_sequence, packed_report, packed_report_with_threshold, BlockSequence, PackedReport,
    PackedVerdict,
};
pub use partition::{is_good_with, partition_type_of, partition_types, IntervalLadder, PartitionError, PartitionType};
pub use ramsey::{
    arrow_holds, arrow_holds_with, check_growth_hypothesis, claim16_witness, find_homogeneous_subset, phi_max,
    ArrowAnswer, ArrowOptions, ArrowQuery, HypothesisReport, RamseyError, SearchStats,
};
pub use report::{parse_report, write_report, ReportKind, SolverReport};
pub use reversal::{
    build_sharp_ladder, extract_homogeneous, merge_h, merged_type_color, sharp_g, type_color, types_present,
    unique_allones_color, ReversalError, SharpColoring,
};
pub use set::{colex_rank, enumerate_subsets, NumberSet, Point, SetError};
