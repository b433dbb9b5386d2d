//! Command-line surface. Exit codes: 0 success, 1 verification or bound failure, 2 input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcut_core::decomposition::{heuristic_tree_decomposition, parse_tree_decomposition, TreeDecomposition};
use mcut_core::fractional::{solve_fractional, verify_dual, verify_primal};
use mcut_core::graph::Graph;
use mcut_core::oracle::{brute_force_multicut, verify_multicut, verify_sdd, DEFAULT_MAX_EDGES};
use mcut_core::region::gvy_multicut;
use serde::Serialize;

use crate::bench::{gap_sweep, run_bench, write_reports, GapSweep};
use crate::format::{edge_numbers, parse_cut, parse_graph, serialize_cut, serialize_graph, Instance};
use crate::generator::{generate_partial_ktree, GenParams};
use crate::report::{solve_instance, LengthMode, SolveOptions, F17};

pub const SUCCESS: i32 = 0;
pub const VERIFICATION_FAILURE: i32 = 1;
pub const INPUT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mcut", version, about = "Multicut and small diameter decomposition for bounded-treewidth graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the decomposition pipeline and emit a run report.
    Solve(SolveArgs),
    /// Solve the fractional relaxation only.
    Lp(LpArgs),
    /// Region-growing baseline over terminal pairs.
    Gvy(LpArgs),
    /// Exact minimum multicut by branch and bound (small instances).
    Exact(ExactArgs),
    /// Check a cut file against a graph.
    Verify(VerifyArgs),
    /// Generate random partial k-tree instances.
    Gen(GenArgs),
    /// Solve every instance in a directory.
    Bench(BenchArgs),
    /// Sweep a generated family and tabulate cost ratios as CSV.
    Gap(GapArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Lengths {
    Lp,
    Given,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// PACE .td file; a min-fill decomposition is used when omitted.
    #[arg(long)]
    pub td: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Lengths::Lp)]
    pub lengths: Lengths,
    /// Also run the exact oracle when the instance is small enough.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    pub max_edges: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write the cut as a cut file.
    #[arg(long)]
    pub cut_out: Option<PathBuf>,
    /// Include wall-clock timings (makes the report nondeterministic).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct LpArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    pub max_edges: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub cut: PathBuf,
    /// Check weak diameter < 1 under the graph's edge lengths instead of pair separation.
    #[arg(long)]
    pub sdd: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.8)]
    pub keep_prob: f64,
    #[arg(long, default_value_t = 5)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1)]
    pub cap_min: u32,
    #[arg(long, default_value_t = 10)]
    pub cap_max: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of instances, with consecutive seeds.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "pkt")]
    pub prefix: String,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    /// Worker threads; the MCUT_THREADS environment variable takes precedence.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Lengths::Lp)]
    pub lengths: Lengths,
    #[arg(long)]
    pub exact: bool,
    /// Aggregate report destination.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Directory for one report per instance.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5])]
    pub tree_widths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8])]
    pub pairs: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub per_cell: usize,
    #[arg(long, default_value_t = 0.8)]
    pub keep_prob: f64,
    #[arg(long, default_value_t = 1)]
    pub cap_min: u32,
    #[arg(long, default_value_t = 10)]
    pub cap_max: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

type CmdResult = Result<i32, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<Instance, String> {
    parse_graph(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_td(path: Option<&Path>, g: &Graph) -> Result<TreeDecomposition, String> {
    match path {
        Some(p) => parse_tree_decomposition(&read(p)?).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(heuristic_tree_decomposition(g)),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn threads(flag: usize) -> usize {
    std::env::var("MCUT_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(flag)
        .max(1)
}

fn solve(a: &SolveArgs) -> CmdResult {
    let inst = load_graph(&a.graph)?;
    let td = load_td(a.td.as_deref(), &inst.graph)?;
    let opts = SolveOptions {
        epsilon: a.eps,
        lengths: match a.lengths {
            Lengths::Lp => LengthMode::Lp,
            Lengths::Given => LengthMode::Given,
        },
        exact: a.exact,
        max_edges: a.max_edges,
        timings: a.timings,
        seed: None,
    };
    let name = a.graph.file_stem().unwrap_or_default().to_string_lossy();
    let report = solve_instance(&name, &inst.graph, &td, inst.lengths(), &opts).map_err(|e| e.to_string())?;
    if let Some(p) = &a.cut_out {
        let ids = report
            .algorithm
            .cut_edges
            .iter()
            .map(|&n| inst.graph.edges()[n - 1].id)
            .collect();
        let cut = mcut_core::graph::CutSet::new(&inst.graph, ids).map_err(|e| e.to_string())?;
        fs::write(p, serialize_cut(&inst.graph, &cut)).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    emit(&report.to_json(), a.json.as_deref())?;
    Ok(if report.verification.passed() { SUCCESS } else { VERIFICATION_FAILURE })
}

#[derive(Serialize)]
struct LpReport {
    epsilon: F17,
    f_star: F17,
    flow: F17,
    scale: F17,
    x: Vec<F17>,
    pair_distances: Vec<F17>,
    dropped_pairs: Vec<usize>,
    primal_ok: bool,
    dual_ok: bool,
}

fn lp(a: &LpArgs) -> CmdResult {
    let g = load_graph(&a.graph)?.graph;
    let (fs, fp) = solve_fractional(&g, a.eps).map_err(|e| e.to_string())?;
    let report = LpReport {
        epsilon: F17(fs.epsilon),
        f_star: F17(fs.cost),
        flow: F17(fp.total),
        scale: F17(fs.scale),
        x: fs.x.iter().copied().map(F17).collect(),
        pair_distances: fs.pair_distances.iter().copied().map(F17).collect(),
        dropped_pairs: fs.dropped_pairs.clone(),
        primal_ok: verify_primal(&g, &fs).is_ok(),
        dual_ok: verify_dual(&g, &fp).is_ok() && fp.total <= fs.cost + 1e-6,
    };
    emit(&to_json(&report), a.json.as_deref())?;
    Ok(if report.primal_ok && report.dual_ok { SUCCESS } else { VERIFICATION_FAILURE })
}

#[derive(Serialize)]
struct GvyReport {
    f_star: F17,
    cost: F17,
    cut_edges: Vec<usize>,
    bound: F17,
    multicut_ok: bool,
}

fn gvy(a: &LpArgs) -> CmdResult {
    let g = load_graph(&a.graph)?.graph;
    let (fs, _) = solve_fractional(&g, a.eps).map_err(|e| e.to_string())?;
    let res = gvy_multicut(&g, &fs).map_err(|e| e.to_string())?;
    let bound = 4.0 * ((g.pairs().len() as f64) + 1.0).ln() * fs.cost;
    let report = GvyReport {
        f_star: F17(fs.cost),
        cost: F17(res.cut.cost),
        cut_edges: edge_numbers(&g, &res.cut.edge_ids),
        bound: F17(bound),
        multicut_ok: verify_multicut(&g, &res.cut).is_ok(),
    };
    emit(&to_json(&report), a.json.as_deref())?;
    let ok = report.multicut_ok && res.cut.cost <= bound + 1e-6;
    Ok(if ok { SUCCESS } else { VERIFICATION_FAILURE })
}

#[derive(Serialize)]
struct ExactReport {
    cost: F17,
    cut_edges: Vec<usize>,
}

fn exact(a: &ExactArgs) -> CmdResult {
    let g = load_graph(&a.graph)?.graph;
    let cut = brute_force_multicut(&g, a.max_edges).map_err(|e| e.to_string())?;
    let report = ExactReport {
        cost: F17(cut.cost),
        cut_edges: edge_numbers(&g, &cut.edge_ids),
    };
    emit(&to_json(&report), a.json.as_deref())?;
    Ok(SUCCESS)
}

fn verify(a: &VerifyArgs) -> CmdResult {
    let inst = load_graph(&a.graph)?;
    let cut = parse_cut(&read(&a.cut)?, &inst.graph).map_err(|e| format!("{}: {e}", a.cut.display()))?;
    let g = &inst.graph;
    if a.sdd {
        if !inst.has_lengths {
            return Err("--sdd needs edge lengths in the graph file".into());
        }
        return Ok(match verify_sdd(g, &cut) {
            Ok(()) => {
                println!("ok");
                SUCCESS
            }
            Err(w) => {
                println!("violation: vertices {} and {} share a piece at distance {}", w.u + 1, w.v + 1, w.distance);
                VERIFICATION_FAILURE
            }
        });
    }
    Ok(match verify_multicut(g, &cut) {
        Ok(()) => {
            println!("ok");
            SUCCESS
        }
        Err(w) => {
            let vertices: Vec<String> = w.vertices.iter().map(|v| (v + 1).to_string()).collect();
            let edges: Vec<String> = edge_numbers(g, &w.edges.iter().copied().collect())
                .iter()
                .map(usize::to_string)
                .collect();
            println!(
                "violation: pair {} still connected via vertices {} (edges {})",
                w.pair + 1,
                vertices.join(" "),
                edges.join(" ")
            );
            VERIFICATION_FAILURE
        }
    })
}

fn gen(a: &GenArgs) -> CmdResult {
    fs::create_dir_all(&a.out).map_err(|e| format!("{}: {e}", a.out.display()))?;
    for seed in a.seed..a.seed + a.count {
        let p = GenParams {
            n: a.n,
            k: a.k,
            edge_keep_prob: a.keep_prob,
            num_pairs: a.pairs,
            cap_range: (a.cap_min, a.cap_max),
            seed,
        };
        let g = generate_partial_ktree(&p).map_err(|e| e.to_string())?;
        let name = format!("{}-{seed:04}", a.prefix);
        let header = format!(
            "c partial {}-tree n={} keep={} pairs={} caps={}..={} seed={}\n",
            a.k, a.n, a.keep_prob, a.pairs, a.cap_min, a.cap_max, seed
        );
        let mcg = header + &serialize_graph(&g.graph, false);
        for (ext, text) in [("mcg", mcg), ("td", g.td.to_pace())] {
            let path = a.out.join(format!("{name}.{ext}"));
            fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        }
    }
    Ok(SUCCESS)
}

fn bench(a: &BenchArgs) -> CmdResult {
    let opts = SolveOptions {
        epsilon: a.eps,
        lengths: match a.lengths {
            Lengths::Lp => LengthMode::Lp,
            Lengths::Given => LengthMode::Given,
        },
        exact: a.exact,
        timings: a.timings,
        ..SolveOptions::default()
    };
    let report = run_bench(&a.dir, threads(a.parallel), &opts).map_err(|e| format!("{}: {e}", a.dir.display()))?;
    if let Some(dir) = &a.out_dir {
        write_reports(dir, &report.reports).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    emit(&to_json(&report), a.json.as_deref())?;
    for e in &report.summary.errors {
        eprintln!("error: {e}");
    }
    Ok(if !report.summary.errors.is_empty() {
        INPUT_ERROR
    } else if !report.summary.failed.is_empty() {
        VERIFICATION_FAILURE
    } else {
        SUCCESS
    })
}

fn gap(a: &GapArgs) -> CmdResult {
    let sweep = GapSweep {
        n: a.n,
        tree_widths: a.tree_widths.clone(),
        pair_counts: a.pairs.clone(),
        per_cell: a.per_cell,
        edge_keep_prob: a.keep_prob,
        cap_range: (a.cap_min, a.cap_max),
        seed: a.seed,
        epsilon: a.eps,
    };
    let csv = gap_sweep(&sweep, threads(a.parallel)).map_err(|e| e.to_string())?;
    emit(&csv, a.out.as_deref())?;
    Ok(if csv.lines().skip(1).all(|l| l.ends_with("true")) {
        SUCCESS
    } else {
        VERIFICATION_FAILURE
    })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Lp(a) => lp(a),
        Command::Gvy(a) => gvy(a),
        Command::Exact(a) => exact(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
        Command::Bench(a) => bench(a),
        Command::Gap(a) => gap(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            INPUT_ERROR
        }
    }
}
