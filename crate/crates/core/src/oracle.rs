//! Ground truth for small instances: exact multicut, cut verifiers, gap report.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::fractional::{FlowPaths, FractionalSolution};
use crate::graph::{component_diameter_witness, CutSet, EdgeId, Graph, Vertex};

pub const DEFAULT_MAX_EDGES: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{edges} finite-capacity edges exceed the limit of {max}; raise max_edges (at most 63) or use a smaller instance")]
    TooManyEdges { edges: usize, max: usize },
    #[error("pair {index} has source = sink = {vertex}; no multicut exists")]
    DegeneratePair { index: usize, vertex: Vertex },
    #[error("pair {0} is joined by infinite-capacity edges only; no multicut exists")]
    Unbounded(usize),
}

fn same_cost(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

struct Search<'a> {
    g: &'a Graph,
    caps: Vec<f64>,
    cuttable: Vec<bool>,
    bound: f64,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    /// First pair (in index order) still connected avoiding `cut`, with a BFS path of edge positions.
    fn connected_path(&self, cut: u64) -> Option<Vec<usize>> {
        let g = self.g;
        let mut pred = vec![usize::MAX; g.universe()];
        for &(s, t) in g.pairs() {
            pred.fill(usize::MAX);
            let mut seen = vec![false; g.universe()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &pos in g.incident_positions(u) {
                    if cut >> pos & 1 == 1 {
                        continue;
                    }
                    let w = g.edges()[pos].other(u);
                    if !seen[w] {
                        seen[w] = true;
                        pred[w] = pos;
                        queue.push_back(w);
                    }
                }
            }
            if seen[t] {
                let mut path = Vec::new();
                let mut cur = t;
                while cur != s {
                    path.push(pred[cur]);
                    cur = g.edges()[pred[cur]].other(cur);
                }
                path.reverse();
                return Some(path);
            }
        }
        None
    }

    fn is_minimal(&self, cut: u64) -> bool {
        (0..64)
            .filter(|&p| cut >> p & 1 == 1)
            .all(|p| self.connected_path(cut & !(1 << p)).is_some())
    }

    fn offer(&mut self, cost: f64, cut: u64) {
        let positions: Vec<usize> = (0..64).filter(|&p| cut >> p & 1 == 1).collect();
        let better = match &self.best {
            None => true,
            Some((best, set)) => {
                if same_cost(cost, *best) {
                    positions.cmp(set) == Ordering::Less
                } else {
                    cost < *best
                }
            }
        };
        if better {
            self.bound = self.bound.min(cost);
            self.best = Some((cost, positions));
        }
    }

    fn explore(&mut self, cut: u64, kept: u64, cost: f64) {
        if cost > self.bound && !same_cost(cost, self.bound) {
            return;
        }
        let Some(path) = self.connected_path(cut) else {
            if self.is_minimal(cut) {
                self.offer(cost, cut);
            }
            return;
        };
        let mut candidates: Vec<usize> = path
            .into_iter()
            .filter(|&pos| kept >> pos & 1 == 0 && self.cuttable[pos])
            .collect();
        candidates.sort_by(|&x, &y| self.caps[y].total_cmp(&self.caps[x]).then(x.cmp(&y)));
        // every feasible cut contains a first candidate; branch on which one
        let mut kept = kept;
        let mut branches = Vec::new();
        for pos in candidates {
            branches.push((pos, kept));
            kept |= 1 << pos;
        }
        for (pos, kept) in branches {
            self.explore(cut | 1 << pos, kept, cost + self.caps[pos]);
        }
    }
}

/// Minimum-capacity multicut by branch and bound. Among optimal inclusion-minimal
/// cuts, returns the one with the lexicographically smallest sorted edge-id list.
pub fn brute_force_multicut(g: &Graph, max_edges: usize) -> Result<CutSet, OracleError> {
    brute_force_multicut_seeded(g, max_edges, None)
}

/// [`brute_force_multicut`] with an upper bound taken from a known feasible cut.
pub fn brute_force_multicut_seeded(g: &Graph, max_edges: usize, seed: Option<&CutSet>) -> Result<CutSet, OracleError> {
    let finite = g.edges().iter().filter(|e| !e.capacity.is_infinite()).count();
    let max = max_edges.min(63);
    if finite > max || g.edge_count() > 63 {
        return Err(OracleError::TooManyEdges { edges: finite, max });
    }
    for (index, &(s, t)) in g.pairs().iter().enumerate() {
        if s == t {
            return Err(OracleError::DegeneratePair { index, vertex: s });
        }
    }
    let finite_ids: BTreeSet<EdgeId> = g
        .edges()
        .iter()
        .filter(|e| !e.capacity.is_infinite())
        .map(|e| e.id)
        .collect();
    for (index, &(s, t)) in g.pairs().iter().enumerate() {
        if g.reachable(s, &finite_ids)[t] {
            return Err(OracleError::Unbounded(index));
        }
    }
    let seed_cost = seed
        .filter(|c| verify_multicut(g, c).is_ok())
        .map_or(f64::INFINITY, |c| c.cost);
    let mut search = Search {
        g,
        caps: g.edges().iter().map(|e| e.capacity.finite().unwrap_or(f64::INFINITY)).collect(),
        cuttable: g.edges().iter().map(|e| !e.capacity.is_infinite()).collect(),
        bound: seed_cost,
        best: None,
    };
    search.explore(0, 0, 0.0);
    let (_, positions) = search.best.expect("a finite-capacity multicut exists");
    let ids = positions.into_iter().map(|p| g.edges()[p].id).collect();
    Ok(CutSet::new(g, ids).expect("positions refer to finite edges"))
}

/// A terminal pair still connected after the cut.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathWitness {
    pub pair: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
}

/// Checks that removing `cut` disconnects every pair; otherwise returns a surviving path.
pub fn verify_multicut(g: &Graph, cut: &CutSet) -> Result<(), PathWitness> {
    for (pair, &(s, t)) in g.pairs().iter().enumerate() {
        let mut pred: Vec<Option<(Vertex, EdgeId)>> = vec![None; g.universe()];
        let mut seen = vec![false; g.universe()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for e in g.incident(u) {
                if cut.edge_ids.contains(&e.id) {
                    continue;
                }
                let w = e.other(u);
                if !seen[w] {
                    seen[w] = true;
                    pred[w] = Some((u, e.id));
                    queue.push_back(w);
                }
            }
        }
        if seen[t] {
            let mut vertices = vec![t];
            let mut edges = Vec::new();
            let mut cur = t;
            while let Some((p, id)) = pred[cur] {
                vertices.push(p);
                edges.push(id);
                cur = p;
            }
            vertices.reverse();
            edges.reverse();
            return Err(PathWitness { pair, vertices, edges });
        }
    }
    Ok(())
}

/// Two vertices left in one piece at distance ≥ 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairWitness {
    pub u: Vertex,
    pub v: Vertex,
    pub distance: f64,
}

/// Checks that every component of `g_full − cut` has weak diameter `< 1` under `d_{g_full}`.
pub fn verify_sdd(g_full: &Graph, cut: &CutSet) -> Result<(), PairWitness> {
    for comp in g_full.components(&cut.edge_ids) {
        if let Some((u, v, distance)) = component_diameter_witness(g_full, &comp) {
            if distance >= 1.0 || distance.is_nan() {
                return Err(PairWitness { u, v, distance });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ratios {
    pub cost_over_f_star: f64,
    pub cost_over_opt: Option<f64>,
    pub gvy_over_f_star: Option<f64>,
    pub gvy_over_opt: Option<f64>,
}

/// Bound minus measured cost; negative means the bound is violated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Headroom {
    pub x3: f64,
    pub x2: f64,
    pub total: f64,
    pub gvy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub flow_value: f64,
    pub f_star: f64,
    pub integral_opt: Option<f64>,
    pub algorithm_cost: f64,
    pub gvy_cost: Option<f64>,
    pub ratios: Ratios,
    pub headroom: Headroom,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("gap report violates: {}", violations.join("; "))]
pub struct GapViolation {
    pub report: Box<GapReport>,
    pub violations: Vec<String>,
}

/// Cuts compared by [`gap_report`].
#[derive(Clone, Copy, Debug)]
pub struct GapCuts<'a> {
    pub x2: &'a CutSet,
    pub x3: &'a CutSet,
    pub gvy: Option<&'a CutSet>,
    pub opt: Option<&'a CutSet>,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Assembles `flow ≤ F*`, `flow ≤ OPT ≤ cost` and the per-phase cost bounds for width `r`.
pub fn gap_report(
    g: &Graph,
    fs: &FractionalSolution,
    fp: &FlowPaths,
    width: usize,
    cuts: GapCuts<'_>,
) -> Result<GapReport, GapViolation> {
    let unit = (width as f64 + 1.0).ln() * fs.cost;
    let k = g.pairs().len() as f64;
    let gvy_unit = 4.0 * (k + 1.0).ln() * fs.cost;
    let cost = cuts.x2.cost + cuts.x3.cost;
    let opt = cuts.opt.map(|c| c.cost);
    let gvy = cuts.gvy.map(|c| c.cost);
    let report = GapReport {
        flow_value: fp.total,
        f_star: fs.cost,
        integral_opt: opt,
        algorithm_cost: cost,
        gvy_cost: gvy,
        ratios: Ratios {
            cost_over_f_star: ratio(cost, fs.cost),
            cost_over_opt: opt.map(|o| ratio(cost, o)),
            gvy_over_f_star: gvy.map(|c| ratio(c, fs.cost)),
            gvy_over_opt: gvy.zip(opt).map(|(c, o)| ratio(c, o)),
        },
        headroom: Headroom {
            x3: 8.0 * unit - cuts.x3.cost,
            x2: 128.0 * unit - cuts.x2.cost,
            total: 136.0 * unit - cost,
            gvy: gvy.map(|c| gvy_unit - c),
        },
    };
    let mut violations = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            violations.push(what);
        }
    };
    check(report.flow_value <= fs.cost + 1e-6, format!("flow {} > F* {}", report.flow_value, fs.cost));
    if let Some(o) = opt {
        check(report.flow_value <= o + 1e-6, format!("flow {} > OPT {o}", report.flow_value));
        check(o <= cost + 1e-9, format!("OPT {o} > pipeline cost {cost}"));
        if let Some(c) = gvy {
            check(o <= c + 1e-9, format!("OPT {o} > gvy cost {c}"));
        }
    }
    check(report.headroom.x3 >= -1e-6, format!("cost(X3) {} > 8·ln(r+1)·F*", cuts.x3.cost));
    check(report.headroom.x2 >= -1e-6, format!("cost(X2) {} > 128·ln(r+1)·F*", cuts.x2.cost));
    check(report.headroom.total >= -1e-6, format!("cost {cost} > 136·ln(r+1)·F*"));
    if let Some(h) = report.headroom.gvy {
        check(h >= -1e-6, format!("gvy cost > 4·ln(k+1)·F* by {}", -h));
    }
    if violations.is_empty() {
        Ok(report)
    } else {
        Err(GapViolation {
            report: Box::new(report),
            violations,
        })
    }
}
