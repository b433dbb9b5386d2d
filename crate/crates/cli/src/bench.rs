//! Directory benchmark harness and the gap sweep.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::warn;
use mcut_core::decomposition::{heuristic_tree_decomposition, parse_tree_decomposition, TreeDecomposition};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::parse_graph;
use crate::generator::{generate_partial_ktree, GenError, GenParams};
use crate::report::{solve_instance, RunReport, SolveOptions, F17};

#[derive(Clone, Debug)]
pub struct InstancePaths {
    pub name: String,
    pub graph: PathBuf,
    pub td: Option<PathBuf>,
}

/// `.mcg` files in `dir` sorted by name, each with its `.td` sibling if present.
pub fn discover(dir: &Path) -> io::Result<Vec<InstancePaths>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "mcg") {
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let td = path.with_extension("td");
            out.push(InstancePaths {
                name,
                td: td.exists().then_some(td),
                graph: path,
            });
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

#[derive(Debug)]
pub enum Outcome {
    Report(Box<RunReport>),
    InputError(String),
}

/// Loads and solves one instance file pair.
pub fn run_one(paths: &InstancePaths, opts: &SolveOptions) -> Outcome {
    let load = || -> Result<(mcut_core::graph::Graph, TreeDecomposition, Option<Vec<f64>>), String> {
        let text = fs::read_to_string(&paths.graph).map_err(|e| format!("{}: {e}", paths.graph.display()))?;
        let inst = parse_graph(&text).map_err(|e| format!("{}: {e}", paths.graph.display()))?;
        let td = match &paths.td {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                parse_tree_decomposition(&text).map_err(|e| format!("{}: {e}", p.display()))?
            }
            None => {
                warn!("{}: no .td file, using a heuristic decomposition", paths.name);
                heuristic_tree_decomposition(&inst.graph)
            }
        };
        let lengths = inst.lengths();
        Ok((inst.graph, td, lengths))
    };
    match load() {
        Ok((g, td, lengths)) => match solve_instance(&paths.name, &g, &td, lengths, opts) {
            Ok(r) => Outcome::Report(Box::new(r)),
            Err(e) => Outcome::InputError(format!("{}: {e}", paths.name)),
        },
        Err(e) => Outcome::InputError(e),
    }
}

#[derive(Debug, Serialize)]
pub struct BenchSummary {
    pub instances: usize,
    pub passed: usize,
    pub failed: Vec<String>,
    pub errors: Vec<String>,
    pub max_cost_over_b136: Option<F17>,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub summary: BenchSummary,
    pub reports: Vec<RunReport>,
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool")
}

fn map_parallel<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if threads <= 1 {
        items.iter().map(f).collect()
    } else {
        pool(threads).install(|| items.par_iter().map(f).collect())
    }
}

/// Solves every instance in `dir`; results are ordered by instance name.
pub fn run_bench(dir: &Path, threads: usize, opts: &SolveOptions) -> io::Result<BenchReport> {
    let instances = discover(dir)?;
    let outcomes = map_parallel(&instances, threads, |p| run_one(p, opts));
    let mut summary = BenchSummary {
        instances: instances.len(),
        passed: 0,
        failed: Vec::new(),
        errors: Vec::new(),
        max_cost_over_b136: None,
    };
    let mut reports = Vec::new();
    let mut worst: Option<f64> = None;
    for outcome in outcomes {
        match outcome {
            Outcome::Report(r) => {
                if r.verification.passed() {
                    summary.passed += 1;
                } else {
                    summary.failed.push(r.instance.name.clone());
                }
                if r.bounds.b136.0 > 0.0 {
                    let ratio = r.algorithm.cost.0 / r.bounds.b136.0;
                    worst = Some(worst.map_or(ratio, |w| w.max(ratio)));
                }
                reports.push(*r);
            }
            Outcome::InputError(e) => summary.errors.push(e),
        }
    }
    summary.max_cost_over_b136 = worst.map(F17);
    Ok(BenchReport { summary, reports })
}

/// Writes one `<name>.json` per report into `dir`.
pub fn write_reports(dir: &Path, reports: &[RunReport]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for r in reports {
        fs::write(dir.join(format!("{}.json", r.instance.name)), r.to_json())?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct GapSweep {
    pub n: usize,
    pub tree_widths: Vec<usize>,
    pub pair_counts: Vec<usize>,
    pub per_cell: usize,
    pub edge_keep_prob: f64,
    pub cap_range: (u32, u32),
    pub seed: u64,
    pub epsilon: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Pipeline(#[from] mcut_core::pipeline::PipelineError),
}

/// Tabulates cost/F* of the pipeline and the GVY baseline against ln(r+1) and ln(k+1), as CSV.
pub fn gap_sweep(sweep: &GapSweep, threads: usize) -> Result<String, SweepError> {
    let mut cells = Vec::new();
    for &tw in &sweep.tree_widths {
        for &pairs in &sweep.pair_counts {
            cells.push((tw, pairs));
        }
    }
    let jobs: Vec<(usize, usize, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, &(tw, pairs))| {
            (0..sweep.per_cell).map(move |i| (tw, pairs, sweep.seed + (ci * sweep.per_cell + i) as u64))
        })
        .collect();
    let opts = SolveOptions {
        epsilon: sweep.epsilon,
        ..SolveOptions::default()
    };
    let results = map_parallel(&jobs, threads, |&(tw, pairs, seed)| -> Result<RunReport, SweepError> {
        let gen = generate_partial_ktree(&GenParams {
            n: sweep.n,
            k: tw,
            edge_keep_prob: sweep.edge_keep_prob,
            num_pairs: pairs,
            cap_range: sweep.cap_range,
            seed,
        })?;
        Ok(solve_instance(&format!("gap-{tw}-{pairs}-{seed}"), &gen.graph, &gen.td, None, &opts)?)
    });
    let mut csv = String::from(
        "tree_width,pairs,instances,width_r,ln_r_plus_1,ln_k_plus_1,mean_cost_over_f,max_cost_over_f,mean_gvy_over_f,max_gvy_over_f,verified\n",
    );
    let mut it = results.into_iter();
    for &(tw, pairs) in &cells {
        let reports = it.by_ref().take(sweep.per_cell).collect::<Result<Vec<_>, _>>()?;
        let mut width = 0;
        let mut cost = Vec::new();
        let mut gvy = Vec::new();
        let mut verified = true;
        for r in &reports {
            width = width.max(r.instance.width);
            verified &= r.verification.passed();
            let f = r.lp.f_star.0;
            if f > 0.0 {
                cost.push(r.algorithm.cost.0 / f);
                if let Some(g) = &r.gvy {
                    gvy.push(g.cost.0 / f);
                }
            }
        }
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        writeln!(
            csv,
            "{tw},{pairs},{},{width},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{verified}",
            reports.len(),
            ((width as f64) + 1.0).ln(),
            ((pairs as f64) + 1.0).ln(),
            mean(&cost),
            max(&cost),
            mean(&gvy),
            max(&gvy),
        )
        .unwrap();
    }
    Ok(csv)
}
