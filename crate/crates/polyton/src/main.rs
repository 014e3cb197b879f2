//! Command-line front end: thin adapters from JSON files to the library
//! calls, with exact rationals (`"p/q"`) in every output and 12-digit
//! decimal `*_approx` companions for the headline quantities.
//!
//! Exit codes: 0 on success, 2 on validation errors (a JSON error object is
//! printed to stderr), 64 on usage errors.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use polyton::covers::{
    eg_check, extreme_covers, in_integral_cover_hull, HullVerdict, DEFAULT_COVER_CAP,
};
use polyton::cutnorm::{
    cut_distance_blocks, cut_norm, cut_norm_lower_bound, DEFAULT_CUT_DISTANCE_CAP,
    DEFAULT_CUT_NORM_CAP,
};
use polyton::matchings::matching_ratio;
use polyton::rat::Rat;
use polyton::sampling::{convergence_experiment, sample_wrandom};
use polyton::structure::{
    density, is_bipartite, is_k_partite, BipartiteVerdict, FiniteGraph, DEFAULT_KPARTITE_CAP,
    DEFAULT_MOTIF_CAP,
};
use polyton::transfer::transfer_matching;
use polyton::{StepCover, StepGraphon, StepKernel};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "polyton", version, about = "Exact matchings, covers and cut norms of step graphons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matching ratio nu(W) = tau*(W) with optimal witnesses on both sides.
    Ratio(GraphonArg),
    /// Extreme points of the fractional cover polytope.
    CoverVertices {
        #[command(flatten)]
        graphon: GraphonArg,
        /// Include the (half-)integrality class and tight pairs per vertex.
        #[arg(long)]
        classify: bool,
        /// Maximum number of blocks.
        #[arg(long, default_value_t = DEFAULT_COVER_CAP)]
        cap: usize,
        /// Also write the vertices as a flat CSV table.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Is a cover inside the convex hull of the integral covers?
    HullTest {
        #[command(flatten)]
        graphon: GraphonArg,
        /// Fractional cover JSON file.
        #[arg(long, value_name = "FILE")]
        cover: PathBuf,
        /// Maximum number of blocks.
        #[arg(long, default_value_t = DEFAULT_COVER_CAP)]
        cap: usize,
    },
    /// Edge-density lower bound on tau*(W) and its tightness.
    EgCheck(GraphonArg),
    /// Bipartiteness of the support, with a two-sided split or an odd-cycle
    /// witness.
    Bipartite(GraphonArg),
    /// k-partiteness of the support.
    Kpartite {
        #[command(flatten)]
        graphon: GraphonArg,
        /// Number of parts.
        #[arg(short)]
        k: usize,
        /// Maximum number of blocks.
        #[arg(long, default_value_t = DEFAULT_KPARTITE_CAP)]
        cap: usize,
    },
    /// Homomorphism density t(F, W) of a small motif.
    Density {
        #[command(flatten)]
        graphon: GraphonArg,
        /// C<k> (cycle), K<k> (complete), P<k> (path), or an explicit
        /// "<n>:<u>-<v>,..." edge list.
        #[arg(long)]
        motif: String,
        /// Maximum number of motif vertices.
        #[arg(long, default_value_t = DEFAULT_MOTIF_CAP)]
        cap: usize,
    },
    /// Cut norm of a step kernel, exact or by heuristic lower bound.
    Cutnorm {
        /// Step kernel JSON file.
        #[arg(long, value_name = "FILE")]
        kernel: PathBuf,
        /// Exact subset enumeration (the default).
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        /// Alternating-maximization lower bound instead of enumeration.
        #[arg(long)]
        heuristic: bool,
        /// Restarts for the heuristic.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Seed for the heuristic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of coalesced blocks for exact enumeration.
        #[arg(long, default_value_t = DEFAULT_CUT_NORM_CAP)]
        cap: usize,
    },
    /// Cut distance between two step graphons over block relabelings.
    Cutdist {
        /// First graphon JSON file.
        #[arg(long, value_name = "FILE")]
        a: PathBuf,
        /// Second graphon JSON file.
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
        /// Maximum number of blocks.
        #[arg(long, default_value_t = DEFAULT_CUT_DISTANCE_CAP)]
        cap: usize,
    },
    /// Transfer a matching of W onto a nearby graphon U.
    Transfer {
        /// Source graphon JSON file.
        #[arg(long, value_name = "FILE")]
        w: PathBuf,
        /// Matching kernel JSON file.
        #[arg(long, value_name = "FILE")]
        m: PathBuf,
        /// Target graphon JSON file.
        #[arg(long, value_name = "FILE")]
        u: PathBuf,
        /// Error budget, e.g. "1/10" or "0.1".
        #[arg(long)]
        eps: String,
    },
    /// Sample a W-random graph G(n, W).
    Sample {
        #[command(flatten)]
        graphon: GraphonArg,
        /// Number of vertices.
        #[arg(short)]
        n: usize,
        /// PRNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full graph JSON here; stdout then carries a summary.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Sampling convergence experiment over sizes and seeds.
    Converge {
        #[command(flatten)]
        graphon: GraphonArg,
        /// Comma-separated sample sizes, e.g. "50,100,200".
        #[arg(long)]
        ns: String,
        /// Comma-separated seeds or an inclusive range "1..20".
        #[arg(long)]
        seeds: String,
        /// Write rows as CSV (12-digit decimals) to this file.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Worker threads; defaults to POLYTON_THREADS or the number of
        /// available cores.
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct GraphonArg {
    /// Step graphon JSON file.
    #[arg(long, value_name = "FILE")]
    graphon: PathBuf,
}

struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> CliError {
        CliError {
            kind: "parse",
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> CliError {
        CliError {
            kind: "validation",
            message: message.into(),
        }
    }
}

macro_rules! validation_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError::validation(e.to_string())
            }
        }
    )*};
}
validation_from!(
    polyton::covers::CoverError,
    polyton::matchings::MatchingError,
    polyton::structure::StructureError,
    polyton::cutnorm::CutNormError,
    polyton::transfer::TransferError,
    polyton::sampling::SamplingError,
    polyton::step::StepError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError {
            kind: "io",
            message: e.to_string(),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError {
            kind: "io",
            message: format!("{}: {e}", path.display()),
        })?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn approx(r: &Rat) -> String {
    r.decimal_string(12)
}

fn parse_rat(field: &str, s: &str) -> Result<Rat, CliError> {
    Rat::from_str(s).map_err(|e| CliError::parse(format!("{field}: {e}")))
}

fn parse_usize_list(field: &str, s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::parse(format!("{field}: bad integer {p:?}")))
        })
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let err = |p: &str| CliError::parse(format!("--seeds: bad integer {p:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a.trim().parse().map_err(|_| err(a))?;
        let hi: u64 = b.trim().parse().map_err(|_| err(b))?;
        if lo > hi {
            return Err(CliError::parse(format!("--seeds: empty range {s:?}")));
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(|p| p.trim().parse().map_err(|_| err(p))).collect()
    }
}

fn parse_motif(s: &str) -> Result<FiniteGraph, CliError> {
    let bad = || CliError::parse(format!("--motif: unrecognized motif {s:?}"));
    let t = s.trim();
    if let Some((n, edges)) = t.split_once(':') {
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let mut list = Vec::new();
        for part in edges.split(',').filter(|p| !p.trim().is_empty()) {
            let (u, v) = part.split_once('-').ok_or_else(bad)?;
            let u: usize = u.trim().parse().map_err(|_| bad())?;
            let v: usize = v.trim().parse().map_err(|_| bad())?;
            list.push((u, v));
        }
        return Ok(FiniteGraph::new(n, list)?);
    }
    if t.len() < 2 || !t.is_char_boundary(1) {
        return Err(bad());
    }
    let (head, tail) = t.split_at(1);
    let k: usize = tail.parse().map_err(|_| bad())?;
    match head {
        "C" | "c" if k >= 3 => Ok(FiniteGraph::cycle(k)),
        "K" | "k" if k >= 1 => Ok(FiniteGraph::complete(k)),
        "P" | "p" if k >= 1 => Ok(FiniteGraph::path(k)),
        _ => Err(bad()),
    }
}

fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("POLYTON_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
    .max(1)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("library types serialize")
}

fn emit(value: Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("valid JSON"));
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ratio(arg) => {
            let w: StepGraphon = read_json(&arg.graphon)?;
            let matching = matching_ratio(&w)?;
            let cover = polyton::covers::cover_ratio(&w)?;
            emit(json!({
                "nu": to_value(&matching.nu),
                "nu_approx": approx(&matching.nu),
                "tau": to_value(&cover.tau),
                "tau_approx": approx(&cover.tau),
                "witness": {
                    "matching": to_value(&matching.matching),
                    "degrees": to_value(&matching.degrees),
                },
                "cover": to_value(&cover.cover),
            }));
        }
        Command::CoverVertices {
            graphon,
            classify,
            cap,
            csv,
        } => {
            let w: StepGraphon = read_json(&graphon.graphon)?;
            let vertices = extreme_covers(&w, cap)?;
            if let Some(path) = csv {
                let mut out = String::from("index,class");
                for i in 0..w.k() {
                    out.push_str(&format!(",c{i}"));
                }
                out.push('\n');
                for (idx, v) in vertices.iter().enumerate() {
                    out.push_str(&format!("{idx},{}", to_value(&v.class).as_str().unwrap()));
                    for c in v.cover.values() {
                        out.push_str(&format!(",{c}"));
                    }
                    out.push('\n');
                }
                std::fs::write(&path, out)?;
            }
            let listed: Vec<Value> = vertices
                .iter()
                .map(|v| {
                    if classify {
                        to_value(v)
                    } else {
                        to_value(&v.cover)
                    }
                })
                .collect();
            emit(json!({
                "blocks": w.k(),
                "count": vertices.len(),
                "vertices": listed,
            }));
        }
        Command::HullTest { graphon, cover, cap } => {
            let w: StepGraphon = read_json(&graphon.graphon)?;
            let c: StepCover = read_json(&cover)?;
            match in_integral_cover_hull(&c, &w, cap)? {
                HullVerdict::Inside { combination } => emit(json!({
                    "inside": true,
                    "combination": combination
                        .iter()
                        .map(|(blocks, weight)| json!({
                            "blocks": blocks,
                            "weight": to_value(weight),
                        }))
                        .collect::<Vec<_>>(),
                })),
                HullVerdict::Outside { weights, threshold } => emit(json!({
                    "inside": false,
                    "weights": to_value(&weights),
                    "threshold": to_value(&threshold),
                })),
            }
        }
        Command::EgCheck(arg) => {
            let w: StepGraphon = read_json(&arg.graphon)?;
            let report = eg_check(&w)?;
            let mut value = to_value(&report);
            let obj = value.as_object_mut().unwrap();
            obj.insert("tau_approx".into(), approx(&report.tau).into());
            obj.insert("bound_approx".into(), approx(&report.bound.value).into());
            emit(value);
        }
        Command::Bipartite(arg) => {
            let w: StepGraphon = read_json(&arg.graphon)?;
            match is_bipartite(&w) {
                BipartiteVerdict::Bipartite { side_a, side_b } => emit(json!({
                    "bipartite": true,
                    "side_a": side_a,
                    "side_b": side_b,
                })),
                BipartiteVerdict::NotBipartite(witness) => emit(json!({
                    "bipartite": false,
                    "odd_cycle": to_value(&witness),
                })),
            }
        }
        Command::Kpartite { graphon, k, cap } => {
            let w: StepGraphon = read_json(&graphon.graphon)?;
            let verdict = is_k_partite(&w, k, cap)?;
            emit(json!({
                "k": k,
                "partite": verdict.partite,
                "coloring": verdict.coloring,
            }));
        }
        Command::Density { graphon, motif, cap } => {
            let w: StepGraphon = read_json(&graphon.graphon)?;
            let f = parse_motif(&motif)?;
            let d = density(&f, &w, cap)?;
            emit(json!({
                "motif": motif,
                "vertices": f.n,
                "edges": f.edges.len(),
                "density": to_value(&d),
                "density_approx": approx(&d),
            }));
        }
        Command::Cutnorm {
            kernel,
            exact: _,
            heuristic,
            restarts,
            seed,
            cap,
        } => {
            let f: StepKernel = read_json(&kernel)?;
            let (mode, result) = if heuristic {
                ("heuristic", cut_norm_lower_bound(&f, restarts, seed))
            } else {
                ("exact", cut_norm(&f, cap)?)
            };
            let mut value = json!({
                "mode": mode,
                "value": to_value(&result.value),
                "value_approx": approx(&result.value),
                "rows": result.rows,
                "cols": result.cols,
            });
            if heuristic {
                let obj = value.as_object_mut().unwrap();
                obj.insert("restarts".into(), restarts.into());
                obj.insert("seed".into(), seed.into());
            }
            emit(value);
        }
        Command::Cutdist { a, b, cap } => {
            let wa: StepGraphon = read_json(&a)?;
            let wb: StepGraphon = read_json(&b)?;
            let d = cut_distance_blocks(&wa, &wb, cap)?;
            emit(json!({
                "value": to_value(&d.value),
                "value_approx": approx(&d.value),
                "permutation": d.permutation,
            }));
        }
        Command::Transfer { w, m, u, eps } => {
            let w: StepGraphon = read_json(&w)?;
            let m: StepKernel = read_json(&m)?;
            let u: StepGraphon = read_json(&u)?;
            let eps = parse_rat("--eps", &eps)?;
            let result = transfer_matching(&w, &m, &u, &eps)?;
            let mut value = to_value(&result);
            let obj = value.as_object_mut().unwrap();
            obj.insert("distance_approx".into(), approx(&result.distance).into());
            obj.insert(
                "intermediate_error_approx".into(),
                approx(&result.intermediate_error).into(),
            );
            obj.insert("cut_error_approx".into(), approx(&result.cut_error).into());
            obj.insert("delta_approx".into(), approx(&result.plan.delta).into());
            emit(value);
        }
        Command::Sample {
            graphon,
            n,
            seed,
            out,
        } => {
            let w: StepGraphon = read_json(&graphon.graphon)?;
            let g = sample_wrandom(&w, n, seed)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, serde_json::to_string_pretty(&g).expect("valid JSON"))?;
                    let edges: usize = g
                        .adjacency
                        .iter()
                        .enumerate()
                        .map(|(i, row)| row.iter().skip(i + 1).filter(|&&a| a == 1).count())
                        .sum();
                    let mut histogram = vec![0usize; w.k()];
                    for &b in &g.blocks {
                        histogram[b] += 1;
                    }
                    emit(json!({
                        "n": g.n,
                        "seed": g.seed,
                        "edges": edges,
                        "block_histogram": histogram,
                        "out": path.display().to_string(),
                    }));
                }
                None => emit(to_value(&g)),
            }
        }
        Command::Converge {
            graphon,
            ns,
            seeds,
            csv,
            threads,
        } => {
            let w: StepGraphon = read_json(&graphon.graphon)?;
            let ns = parse_usize_list("--ns", &ns)?;
            let seeds = parse_seeds(&seeds)?;
            let threads = resolve_threads(threads);
            let report = convergence_experiment(&w, &ns, &seeds, threads)?;
            if let Some(path) = csv {
                let mut out = String::from("n,seed,nu,tau,abs_error,cover_slack\n");
                for row in &report.rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        row.n,
                        row.seed,
                        approx(&row.nu),
                        approx(&row.tau),
                        approx(&row.abs_error),
                        approx(&row.cover_slack),
                    ));
                }
                std::fs::write(&path, out)?;
            }
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|row| {
                    let mut value = to_value(row);
                    let obj = value.as_object_mut().unwrap();
                    obj.insert("abs_error_approx".into(), approx(&row.abs_error).into());
                    obj.insert("cover_slack_approx".into(), approx(&row.cover_slack).into());
                    value
                })
                .collect();
            emit(json!({
                "nu_w": to_value(&report.nu_w),
                "nu_w_approx": approx(&report.nu_w),
                "threads": threads,
                "rows": rows,
            }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": { "kind": e.kind, "message": e.message } })
            );
            ExitCode::from(2)
        }
    }
}
