//! `prt`: batch front end for the packed-ramsey library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 undecided or out of
//! budget/bounds, 3 bad input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use packed_ramsey::{
    arrow_holds, build_pipeline, build_sharp_ladder, colors_used, extract_homogeneous, is_homogeneous,
    is_semi_homogeneous, merge_h, packed_report_with_threshold, parse_coloring, parse_growth_table, parse_report,
    parse_set, phi_max, solve_exp1, write_coloring, write_report, write_set, ArrowQuery, ColoringRule, Confidence,
    Exp1Error, Exp2Error, GrowthFunction, Homogeneity, LargenessOracle, LargenessQuery, LargenessVerdict, NumberSet,
    PackedVerdict, PipelineBounds, RamseyError, Rule, SharpColoring, SolverReport,
};
use thiserror::Error;

const DEFAULT_BUDGET: &str = "10000000";

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Undecided(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Undecided(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<RamseyError> for CliError {
    fn from(e: RamseyError) -> Self {
        match e {
            RamseyError::Undecided(s) => CliError::Undecided(format!("undecided after {} nodes", s.nodes)),
            other => input(other),
        }
    }
}

impl From<Exp1Error> for CliError {
    fn from(e: Exp1Error) -> Self {
        input(e)
    }
}

impl From<Exp2Error> for CliError {
    fn from(e: Exp2Error) -> Self {
        match e {
            Exp2Error::RootSmall
            | Exp2Error::AllSmall { .. }
            | Exp2Error::BoundsExhausted { .. }
            | Exp2Error::NoBlock { .. } => CliError::Undecided(e.to_string()),
            Exp2Error::InvariantViolation { .. } | Exp2Error::HypothesisFailures(_) => CliError::Failed(e.to_string()),
            Exp2Error::Ramsey(r) => r.into(),
            other => input(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "prt", version, about = "Packed Ramsey constructions at finite scale")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Where a coloring comes from: a coloring file, or `rule:TAG` together
/// with `--n`, `--k` and `--horizon`.
#[derive(Debug, Args)]
struct ColoringArgs {
    /// Coloring file, or `rule:TAG` (e.g. `rule:hash:7`).
    #[arg(long)]
    coloring: String,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    horizon: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Decide w → (m)^n_k; prints `holds`, or `fails` and a certificate.
    Arrow {
        #[arg(long)]
        w: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, env = "PRT_BUDGET", default_value = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest m with w → (m)^n_{k+1}.
    Phimax {
        #[arg(long)]
        w: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, env = "PRT_BUDGET", default_value = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Bounded largeness of a set for a pair coloring.
    Large {
        /// Set file, `all`, or `interval:LO:HI`.
        #[arg(long)]
        set: String,
        #[command(flatten)]
        coloring: ColoringArgs,
        /// Growth function spec, or `@FILE` for a table.
        #[arg(long)]
        phi: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        wmax: u32,
        #[arg(long, env = "PRT_BUDGET", default_value = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Exponent-1 solver.
    Solve1 {
        #[command(flatten)]
        coloring: ColoringArgs,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponent-2 pipeline.
    Solve2 {
        #[command(flatten)]
        coloring: ColoringArgs,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        wmax: u32,
        #[arg(long)]
        p: u32,
        /// Node budget per largeness query.
        #[arg(long, env = "PRT_BUDGET", default_value = DEFAULT_BUDGET)]
        budget: u64,
        /// Largeness cutoff margin above the helper length.
        #[arg(long, default_value_t = 2)]
        margin: u32,
        /// Also check the growth hypothesis with this budget per instance.
        #[arg(long)]
        hypothesis_budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The sharp coloring for an order function, as a coloring file.
    Sharpg {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        n: u32,
        /// Number of ladder boundaries above 0.
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge a coloring with a sharp coloring.
    Mergeh {
        #[command(flatten)]
        coloring: ColoringArgs,
        /// Sharp coloring file (from `sharpg`).
        #[arg(long)]
        sharp: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least point of a set in every interval of a sharp ladder.
    Extract {
        /// Set file; exclusive with `--report`.
        #[arg(long, conflicts_with = "report", required_unless_present = "report")]
        set: Option<PathBuf>,
        /// Solver report whose result set is used.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        sharp: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a property; prints `pass` or `fail: ...`.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Seeded random coloring.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        horizon: u32,
        /// Make colors depend only on all but the top point when the top
        /// point is more than this far above the rest.
        #[arg(long)]
        stable_window: Option<u32>,
        /// Write the full colors table instead of the rule.
        #[arg(long)]
        table: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// At most 2^(n-1) colors on the set.
    Semihom {
        #[command(flatten)]
        coloring: ColoringArgs,
        #[arg(long)]
        set: PathBuf,
    },
    /// One color on the set.
    Hom {
        #[command(flatten)]
        coloring: ColoringArgs,
        #[arg(long)]
        set: PathBuf,
    },
    /// Packedness witnesses up to a horizon.
    Packed {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        horizon: u32,
        #[arg(long, default_value_t = 0)]
        threshold: u32,
    },
    /// Audit a solver report against its coloring and growth function.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[command(flatten)]
        coloring: ColoringArgs,
        #[arg(long)]
        phi: String,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_coloring(a: &ColoringArgs) -> Result<ColoringRule, CliError> {
    if let Some(tag) = a.coloring.strip_prefix("rule:") {
        let (Some(n), Some(k), Some(h)) = (a.n, a.k, a.horizon) else {
            return Err(input("`--coloring rule:TAG` needs --n, --k and --horizon"));
        };
        return ColoringRule::from_tag(n, k, h, tag).map_err(input);
    }
    let path = Path::new(&a.coloring);
    let f = parse_coloring(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    for (flag, given, actual) in [
        ("--n", a.n, f.exponent()),
        ("--k", a.k, f.palette()),
        ("--horizon", a.horizon, f.horizon()),
    ] {
        if given.is_some_and(|g| g != actual) {
            return Err(input(format!("{flag} disagrees with the coloring file ({actual})")));
        }
    }
    Ok(f)
}

fn load_phi(spec: &str) -> Result<GrowthFunction, CliError> {
    match spec.strip_prefix('@') {
        Some(path) => parse_growth_table(&read(Path::new(path))?).map_err(|e| input(format!("{path}: {e}"))),
        None => spec.parse().map_err(input),
    }
}

fn load_set(path: &Path) -> Result<NumberSet, CliError> {
    parse_set(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_sharp(path: &Path) -> Result<SharpColoring, CliError> {
    let g = parse_coloring(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    match g.rule() {
        Some(Rule::Sharp(ladder)) => SharpColoring::new(g.exponent(), ladder.clone()).map_err(input),
        _ => Err(input(format!("{}: not a sharp coloring", path.display()))),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(input),
    }
}

fn verdict(out: &mut dyn Write, failures: &[String]) -> Result<(), CliError> {
    if failures.is_empty() {
        writeln!(out, "pass").map_err(input)?;
        Ok(())
    } else {
        for f in failures {
            writeln!(out, "fail: {f}").map_err(input)?;
        }
        Err(CliError::Failed(format!("{} check(s) failed", failures.len())))
    }
}

fn execute(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(input);
    match cmd {
        Cmd::Arrow {
            w: width,
            m,
            n,
            k,
            budget,
            out: path,
        } => {
            let ans = arrow_holds(ArrowQuery::new(width, m, n, k), budget)?;
            let _ = writeln!(err, "nodes {}", ans.stats.nodes);
            if ans.holds {
                w(out, "holds".into())
            } else {
                w(out, "fails".into())?;
                let cert = ans.certificate.expect("failing answers carry a certificate");
                emit(out, path.as_deref(), &write_coloring(&cert).map_err(input)?)
            }
        }
        Cmd::Phimax { w: width, n, k, budget } => w(out, phi_max(width, n, k, budget)?.to_string()),
        Cmd::Large {
            set,
            coloring,
            phi,
            m,
            p,
            wmax,
            budget,
        } => {
            let f = load_coloring(&coloring)?;
            let phi = load_phi(&phi)?;
            let x = if set == "all" {
                NumberSet::interval(1, wmax)
            } else if let Some(r) = set.strip_prefix("interval:") {
                let (lo, hi) = r.split_once(':').ok_or_else(|| input("expected interval:LO:HI"))?;
                let lo: u32 = lo.parse().map_err(input)?;
                let hi: u32 = hi.parse().map_err(input)?;
                if lo == 0 {
                    return Err(input("intervals start at 1 or above"));
                }
                NumberSet::interval(lo, hi)
            } else {
                load_set(Path::new(&set))?
            };
            let oracle = LargenessOracle::new(&f).map_err(input)?;
            let q = LargenessQuery {
                x: &x,
                phi: &phi,
                m,
                p,
                w_max: wmax,
                budget,
            };
            match oracle.check(&q).map_err(input)? {
                LargenessVerdict::Large { w: at, stats } => {
                    let _ = writeln!(err, "nodes {}", stats.nodes);
                    w(out, format!("large w={at}"))
                }
                LargenessVerdict::SmallUpTo {
                    w_max,
                    counterexamples,
                    stats,
                } => {
                    let _ = writeln!(err, "nodes {}", stats.nodes);
                    w(out, format!("small-up-to w={w_max}"))?;
                    for (at, rho) in counterexamples {
                        let cols: Vec<String> = rho.iter().map(|c| c.to_string()).collect();
                        w(out, format!("rho {at} {}", cols.join(" ")))?;
                    }
                    Ok(())
                }
                LargenessVerdict::Unknown { w: at, stats } => {
                    w(out, format!("unknown w={at}"))?;
                    Err(CliError::Undecided(format!(
                        "budget exhausted at w={at} after {} nodes",
                        stats.nodes
                    )))
                }
            }
        }
        Cmd::Solve1 {
            coloring,
            phi,
            blocks,
            out: path,
        } => {
            let f = load_coloring(&coloring)?;
            let phi = load_phi(&phi)?;
            let s = solve_exp1(&f, &phi, blocks)?;
            emit(out, path.as_deref(), &write_report(&SolverReport::from_exp1(&s)))
        }
        Cmd::Solve2 {
            coloring,
            phi,
            blocks,
            wmax,
            p,
            budget,
            margin,
            hypothesis_budget,
            out: path,
        } => {
            let f = load_coloring(&coloring)?;
            let phi = load_phi(&phi)?;
            let bounds = PipelineBounds {
                hypothesis_budget,
                ..PipelineBounds::new(wmax, p, margin, budget)
            };
            let pipe = build_pipeline(&f, &phi, blocks, &bounds)?;
            if let Confidence::Downgraded { unknown_steps } = pipe.confidence {
                let _ = writeln!(
                    err,
                    "downgraded: {unknown_steps} helper step(s) rest on undecided queries"
                );
            }
            if let Some(h) = &pipe.hypothesis {
                if !h.undecided.is_empty() {
                    let _ = writeln!(err, "hypothesis undecided at w = {:?}", h.undecided);
                }
            }
            emit(out, path.as_deref(), &write_report(&SolverReport::from_exp2(&pipe)))
        }
        Cmd::Sharpg {
            phi,
            n,
            count,
            out: path,
        } => {
            let phi = load_phi(&phi)?;
            let ladder = build_sharp_ladder(&phi, n, count).map_err(input)?;
            let g = SharpColoring::new(n, ladder).map_err(input)?;
            emit(out, path.as_deref(), &write_coloring(&g.rule()).map_err(input)?)
        }
        Cmd::Mergeh {
            coloring,
            sharp,
            out: path,
        } => {
            let f = load_coloring(&coloring)?;
            let g = load_sharp(&sharp)?;
            let h = merge_h(&f, &g).map_err(input)?;
            emit(out, path.as_deref(), &write_coloring(&h).map_err(input)?)
        }
        Cmd::Extract {
            set,
            report,
            sharp,
            out: path,
        } => {
            let a = match (set, report) {
                (Some(s), _) => load_set(&s)?,
                (None, Some(r)) => {
                    parse_report(&read(&r)?)
                        .map_err(|e| input(format!("{}: {e}", r.display())))?
                        .result
                }
                (None, None) => unreachable!("clap requires one of --set and --report"),
            };
            let g = load_sharp(&sharp)?;
            emit(out, path.as_deref(), &write_set(&extract_homogeneous(&a, g.ladder())))
        }
        Cmd::Verify(v) => match v {
            VerifyCmd::Semihom { coloring, set } => {
                let f = load_coloring(&coloring)?;
                let a = load_set(&set)?;
                let fails = if is_semi_homogeneous(&f, &a).map_err(input)? {
                    vec![]
                } else {
                    vec![format!("{} colors used", colors_used(&f, &a).map_err(input)?.len())]
                };
                verdict(out, &fails)
            }
            VerifyCmd::Hom { coloring, set } => {
                let f = load_coloring(&coloring)?;
                let a = load_set(&set)?;
                let fails = match is_homogeneous(&f, &a).map_err(input)? {
                    Homogeneity::Not => vec![format!("{} colors used", colors_used(&f, &a).map_err(input)?.len())],
                    _ => vec![],
                };
                verdict(out, &fails)
            }
            VerifyCmd::Packed {
                set,
                phi,
                horizon,
                threshold,
            } => {
                let a = load_set(&set)?;
                let phi = load_phi(&phi)?;
                let r = packed_report_with_threshold(&a, &phi, horizon, threshold);
                let runs: Vec<String> = r
                    .witnesses
                    .iter()
                    .map(|x| format!("{}-{}", x.start(), x.end()))
                    .collect();
                w(
                    out,
                    format!(
                        "witnesses {}",
                        if runs.is_empty() { "-".into() } else { runs.join(" ") }
                    ),
                )?;
                let fails = match r.verdict {
                    PackedVerdict::PackedAtHorizon => vec![],
                    PackedVerdict::SparseAtHorizon => vec![format!("no witness above {threshold}")],
                };
                verdict(out, &fails)
            }
            VerifyCmd::Report { report, coloring, phi } => {
                let r = parse_report(&read(&report)?).map_err(|e| input(format!("{}: {e}", report.display())))?;
                let f = load_coloring(&coloring)?;
                let phi = load_phi(&phi)?;
                if let Confidence::Downgraded { unknown_steps } = r.confidence {
                    let _ = writeln!(err, "report is downgraded ({unknown_steps} undecided helper steps)");
                }
                verdict(out, &r.audit(&f, &phi).map_err(input)?)
            }
        },
        Cmd::Gen {
            seed,
            n,
            k,
            horizon,
            stable_window,
            table,
            out: path,
        } => {
            let rule = match stable_window {
                Some(window) => Rule::Stable { seed, window },
                None => Rule::Hashed { seed },
            };
            let mut f = ColoringRule::from_rule(n, k, horizon, rule).map_err(input)?;
            if table {
                f = f.tabulate().map_err(input)?;
            }
            emit(out, path.as_deref(), &write_coloring(&f).map_err(input)?)
        }
    }
}

/// Runs `prt` on `argv` (including the program name).
fn run(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.cmd, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "prt: {e}");
            e.code()
        }
    }
}

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(std::env::args().collect(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}
