//! Running one instance end to end and the JSON report it produces.

use std::time::Instant;

use mcut_core::decomposition::TreeDecomposition;
use mcut_core::graph::Graph;
use mcut_core::oracle::{brute_force_multicut_seeded, verify_multicut, verify_sdd};
use mcut_core::pipeline::{run_pipeline, LengthSource, PipelineError};
use mcut_core::region::gvy_multicut;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::format::edge_numbers;

/// A float written with 17 significant digits; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LengthMode {
    Lp,
    Given,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub epsilon: f64,
    pub lengths: LengthMode,
    /// Run the exact oracle when the instance has at most `max_edges` finite edges.
    pub exact: bool,
    pub max_edges: usize,
    pub timings: bool,
    pub seed: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: 0.1,
            lengths: LengthMode::Lp,
            exact: false,
            max_edges: mcut_core::oracle::DEFAULT_MAX_EDGES,
            timings: false,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceMeta {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Bag bound r of the width decomposition.
    pub width: usize,
    pub treewidth: usize,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpSection {
    pub lengths: &'static str,
    pub epsilon: F17,
    pub f_star: F17,
    pub flow: Option<F17>,
    pub scale: F17,
    pub lengths_feasible: bool,
    pub dropped_pairs: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseCosts {
    pub x2: F17,
    pub x3: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsSection {
    pub max_shadow_count: usize,
    pub max_cores_per_bag: usize,
    pub initial_volume_sum: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgorithmSection {
    pub name: &'static str,
    pub cut_edges: Vec<usize>,
    pub cost: F17,
    pub phase_costs: PhaseCosts,
    pub iterations: usize,
    pub cores: usize,
    pub components: usize,
    pub diagnostics: DiagnosticsSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct GvySection {
    pub cut_edges: Vec<usize>,
    pub cost: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSection {
    pub opt_cost: Option<F17>,
    pub opt_edges: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bounds {
    pub b136: F17,
    pub b128: F17,
    pub b8: F17,
    pub gvy_bound: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    /// `None` when the lengths do not separate every pair.
    pub multicut_ok: Option<bool>,
    pub sdd_ok: bool,
    pub bounds_ok: bool,
    pub lemmas_ok: bool,
    pub oracle_ok: Option<bool>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.multicut_ok != Some(false) && self.sdd_ok && self.bounds_ok && self.lemmas_ok && self.oracle_ok != Some(false)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub lp_and_pipeline: F17,
    pub gvy: F17,
    pub oracle: F17,
    pub verification: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub instance: InstanceMeta,
    pub lp: LpSection,
    pub algorithm: AlgorithmSection,
    pub gvy: Option<GvySection>,
    pub oracle: OracleSection,
    pub bounds: Bounds,
    pub verification: Verification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Timings>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

const SLACK: f64 = 1e-6;

fn ms(start: Instant) -> F17 {
    F17(start.elapsed().as_secs_f64() * 1e3)
}

/// Runs the pipeline, the GVY baseline and (optionally) the exact oracle, and verifies everything.
pub fn solve_instance(
    name: &str,
    g: &Graph,
    td: &TreeDecomposition,
    given: Option<Vec<f64>>,
    opts: &SolveOptions,
) -> Result<RunReport, PipelineError> {
    let t0 = Instant::now();
    let source = match (opts.lengths, given) {
        (LengthMode::Given, Some(x)) => LengthSource::Given(x),
        (LengthMode::Given, None) => {
            return Err(PipelineError::BadConfig(
                "the graph has no edge lengths; use --lengths lp".into(),
            ))
        }
        (LengthMode::Lp, _) => LengthSource::Lp { epsilon: opts.epsilon },
    };
    let res = run_pipeline(g, td, &source)?;
    let t_pipeline = ms(t0);

    let t1 = Instant::now();
    let gvy = if res.lengths_feasible && !g.pairs().is_empty() {
        Some(gvy_multicut(g, &res.fractional)?.cut)
    } else {
        None
    };
    let t_gvy = ms(t1);

    let t2 = Instant::now();
    let finite_edges = g.edges().iter().filter(|e| !e.capacity.is_infinite()).count();
    let opt = if opts.exact && finite_edges <= opts.max_edges && res.lengths_feasible {
        brute_force_multicut_seeded(g, opts.max_edges, Some(&res.cut)).ok()
    } else {
        None
    };
    let t_oracle = ms(t2);

    let t3 = Instant::now();
    let lg = g.with_lengths(&res.fractional.x)?;
    let multicut_ok = res.lengths_feasible.then(|| verify_multicut(g, &res.cut).is_ok());
    let sdd_ok = verify_sdd(&lg, &res.cut).is_ok();
    let unit = res.bound_unit();
    let k = g.pairs().len();
    let gvy_bound = 4.0 * ((k as f64) + 1.0).ln() * res.fractional.cost;
    let bounds = Bounds {
        b136: F17(136.0 * unit),
        b128: F17(128.0 * unit),
        b8: F17(8.0 * unit),
        gvy_bound: F17(gvy_bound),
    };
    let bounds_ok = res.x3.cost <= 8.0 * unit + SLACK
        && res.x2.cost <= 128.0 * unit + SLACK
        && res.cut.cost <= 136.0 * unit + SLACK
        && gvy.as_ref().is_none_or(|c| c.cost <= gvy_bound + SLACK);
    let r = res.width;
    let d = &res.diagnostics;
    let lemmas_ok = d.iterations <= r
        && d.max_cores_per_bag <= r * r
        && d.shadow.max <= 2 * r.pow(3) + 2 * r
        && res
            .phase2
            .growth
            .iter()
            .filter_map(|s| s.radius.as_ref())
            .all(|rc| rc.certificate_holds());
    let flow = res.flow.as_ref().map(|f| f.total);
    let oracle_ok = opt.as_ref().map(|o| {
        o.cost <= res.cut.cost + 1e-9
            && gvy.as_ref().is_none_or(|c| o.cost <= c.cost + 1e-9)
            && flow.is_none_or(|f| f <= o.cost + SLACK)
    });
    let t_verify = ms(t3);

    Ok(RunReport {
        instance: InstanceMeta {
            name: name.to_string(),
            n: g.universe(),
            m: g.edge_count(),
            k,
            width: r,
            treewidth: td.width(),
            seed: opts.seed,
        },
        lp: LpSection {
            lengths: match source {
                LengthSource::Given(_) => "given",
                LengthSource::Lp { .. } => "lp",
            },
            epsilon: F17(res.fractional.epsilon),
            f_star: F17(res.fractional.cost),
            flow: flow.map(F17),
            scale: F17(res.fractional.scale),
            lengths_feasible: res.lengths_feasible,
            dropped_pairs: res.fractional.dropped_pairs.clone(),
        },
        algorithm: AlgorithmSection {
            name: "sdd-pipeline",
            cut_edges: edge_numbers(g, &res.cut.edge_ids),
            cost: F17(res.cut.cost),
            phase_costs: PhaseCosts {
                x2: F17(res.x2.cost),
                x3: F17(res.x3.cost),
            },
            iterations: d.iterations,
            cores: res.phase1.cores.len(),
            components: res.phase2.components.len(),
            diagnostics: DiagnosticsSection {
                max_shadow_count: d.shadow.max,
                max_cores_per_bag: d.max_cores_per_bag,
                initial_volume_sum: F17(d.initial_volume_sum),
            },
        },
        gvy: gvy.as_ref().map(|c| GvySection {
            cut_edges: edge_numbers(g, &c.edge_ids),
            cost: F17(c.cost),
        }),
        oracle: OracleSection {
            opt_cost: opt.as_ref().map(|o| F17(o.cost)),
            opt_edges: opt.as_ref().map(|o| edge_numbers(g, &o.edge_ids)),
        },
        bounds,
        verification: Verification {
            multicut_ok,
            sdd_ok,
            bounds_ok,
            lemmas_ok,
            oracle_ok,
        },
        timings_ms: opts.timings.then_some(Timings {
            lp_and_pipeline: t_pipeline,
            gvy: t_gvy,
            oracle: t_oracle,
            verification: t_verify,
        }),
    })
}
