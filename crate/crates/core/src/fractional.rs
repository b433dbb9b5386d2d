//! Approximate fractional multicut / maximum multicommodity flow.
//!
//! Edge lengths start at `δ/c(e)` and grow multiplicatively along routed
//! paths. Commodities are processed in phases: within a phase a commodity is
//! routed on its current shortest path while that path is shorter than
//! `(1+ε)·α`, where `α` is a lower bound on the shortest pair distance. The
//! length vector with the best ratio `Σ c·l / α` seen at a phase boundary is
//! normalized into the primal solution; the accumulated flow is scaled down by
//! its worst edge congestion to become feasible.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{dijkstra_with, Capacity, EdgeId, Graph, GraphError, Vertex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("epsilon must lie in (0,1), got {0}")]
    BadEpsilon(f64),
    #[error("pair {index} has source = sink = {vertex}; no multicut exists")]
    DegeneratePair { index: usize, vertex: Vertex },
    #[error("pair {0} is joined by a path of infinite-capacity edges; no multicut exists")]
    Unbounded(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Fractional multicut: `x[i]` is the LP length of `g.edges()[i]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FractionalSolution {
    pub x: Vec<f64>,
    /// F* = Σ c(e)·x(e) over finite-capacity edges.
    pub cost: f64,
    /// d(s_i, t_i) under `x`; `+∞` for dropped pairs.
    pub pair_distances: Vec<f64>,
    pub epsilon: f64,
    /// Divisor applied to the raw router lengths.
    pub scale: f64,
    /// Pairs that are disconnected in the input and need no cutting.
    pub dropped_pairs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowPath {
    pub pair: usize,
    pub edges: Vec<EdgeId>,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FlowPaths {
    pub paths: Vec<FlowPath>,
    pub total: f64,
}

impl FractionalSolution {
    /// The all-zero solution used when there is nothing to separate.
    pub fn zero(g: &Graph, epsilon: f64) -> FractionalSolution {
        FractionalSolution {
            x: vec![0.0; g.edge_count()],
            cost: 0.0,
            pair_distances: Vec::new(),
            epsilon,
            scale: 1.0,
            dropped_pairs: Vec::new(),
        }
    }
}

/// Single-pair Dijkstra over per-position lengths; returns distance and edge positions.
fn shortest_path(g: &Graph, lengths: &[f64], s: Vertex, t: Vertex, dist: &mut [f64], pred: &mut [usize]) -> Option<(f64, Vec<usize>)> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Item(f64, Vertex);
    impl Eq for Item {}
    impl Ord for Item {
        fn cmp(&self, o: &Self) -> Ordering {
            o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
        }
    }
    impl PartialOrd for Item {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }

    dist.fill(f64::INFINITY);
    pred.fill(usize::MAX);
    dist[s] = 0.0;
    let mut heap = BinaryHeap::from([Item(0.0, s)]);
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == t {
            break;
        }
        for &pos in g.incident_positions(u) {
            let len = lengths[pos];
            if len.is_infinite() {
                continue;
            }
            let w = g.edges()[pos].other(u);
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = pos;
                heap.push(Item(nd, w));
            }
        }
    }
    if dist[t].is_infinite() {
        return None;
    }
    let mut path = Vec::new();
    let mut cur = t;
    while cur != s {
        let pos = pred[cur];
        path.push(pos);
        cur = g.edges()[pos].other(cur);
    }
    path.reverse();
    Some((dist[t], path))
}

/// Pair distances under per-position `lengths` (`+∞` where unreachable).
pub fn pair_distances(g: &Graph, lengths: &[f64]) -> Result<Vec<f64>, GraphError> {
    let lg = g.with_lengths(&lengths.iter().map(|&l| l.min(f64::MAX)).collect::<Vec<_>>())?;
    let mut by_source: BTreeMap<Vertex, Vec<f64>> = BTreeMap::new();
    Ok(g.pairs()
        .iter()
        .map(|&(s, t)| {
            let dist = by_source
                .entry(s)
                .or_insert_with(|| dijkstra_with(&lg, &[s], |_| true, f64::INFINITY));
            dist[t]
        })
        .collect())
}

/// Divides raw lengths by the smallest distance among `active` pairs, then caps at 1.
/// Returns the normalized lengths and the divisor.
pub fn normalize_lengths(g: &Graph, raw: &[f64], active: &[usize]) -> Result<(Vec<f64>, f64), GraphError> {
    let dists = pair_distances(g, raw)?;
    let scale = active
        .iter()
        .map(|&i| dists[i])
        .fold(f64::INFINITY, f64::min);
    if !(scale.is_finite() && scale > 0.0) {
        return Ok((raw.to_vec(), 1.0));
    }
    let mut x: Vec<f64> = raw.iter().map(|&l| (l / scale).min(1.0)).collect();
    // division can land a hair below 1; nudge until every active pair is separated
    for _ in 0..4 {
        let dists = pair_distances(g, &x)?;
        let min = active.iter().map(|&i| dists[i]).fold(f64::INFINITY, f64::min);
        if min >= 1.0 {
            break;
        }
        for l in x.iter_mut() {
            if *l < 1.0 {
                *l = (*l / min).min(1.0);
            }
        }
    }
    Ok((x, scale))
}

/// Solves the multicut LP approximately; returns primal lengths and a feasible flow.
pub fn solve_fractional(g: &Graph, epsilon: f64) -> Result<(FractionalSolution, FlowPaths), SolverError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SolverError::BadEpsilon(epsilon));
    }
    for (index, &(s, t)) in g.pairs().iter().enumerate() {
        if s == t {
            return Err(SolverError::DegeneratePair { index, vertex: s });
        }
    }
    let k = g.pairs().len();
    if k == 0 {
        return Ok((FractionalSolution::zero(g, epsilon), FlowPaths::default()));
    }
    let none = BTreeSet::new();
    let mut dropped = Vec::new();
    let mut connected = Vec::new();
    for (i, &(s, t)) in g.pairs().iter().enumerate() {
        if g.reachable(s, &none)[t] {
            connected.push(i);
        } else {
            warn!("pair {i} ({s},{t}) is disconnected; dropping it");
            dropped.push(i);
        }
    }

    let edges = g.edges();
    let m_pos = edges
        .iter()
        .filter(|e| matches!(e.capacity, Capacity::Finite(c) if c > 0.0))
        .count()
        .max(1) as f64;
    let delta = (1.0 + epsilon) * ((1.0 + epsilon) * m_pos).powf(-1.0 / epsilon);
    let mut lengths: Vec<f64> = edges
        .iter()
        .map(|e| match e.capacity {
            Capacity::Finite(c) if c > 0.0 => delta / c,
            Capacity::Finite(_) => f64::INFINITY,
            Capacity::Infinite => 0.0,
        })
        .collect();
    let caps: Vec<f64> = edges.iter().map(|e| e.capacity.finite().unwrap_or(f64::INFINITY)).collect();

    let n = g.universe();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];

    // pairs joined only through capacity-0 edges are separated for free
    let mut routable = Vec::new();
    for &i in &connected {
        let (s, t) = g.pairs()[i];
        if let Some((d, _)) = shortest_path(g, &lengths, s, t, &mut dist, &mut pred) {
            if d == 0.0 {
                return Err(SolverError::Unbounded(i));
            }
            routable.push((i, d));
        }
    }

    let mut load = vec![0.0; edges.len()];
    let mut flows: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
    let volume = |lengths: &[f64]| -> f64 {
        lengths
            .iter()
            .zip(&caps)
            .filter(|(l, c)| c.is_finite() && l.is_finite() && **c > 0.0)
            .map(|(l, c)| l * c)
            .sum()
    };

    let mut alpha = routable.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
    let mut best: Option<(f64, Vec<f64>)> = None;
    if alpha.is_finite() {
        best = Some((volume(&lengths) / alpha, lengths.clone()));
    }
    while alpha < 1.0 {
        let threshold = (alpha * (1.0 + epsilon)).min(1.0);
        let mut phase_min = f64::INFINITY;
        for &(i, _) in &routable {
            let (s, t) = g.pairs()[i];
            loop {
                let (d, path) = shortest_path(g, &lengths, s, t, &mut dist, &mut pred)
                    .expect("routable pairs stay connected");
                if d >= threshold {
                    phase_min = phase_min.min(d);
                    break;
                }
                let bottleneck = path.iter().map(|&p| caps[p]).fold(f64::INFINITY, f64::min);
                if bottleneck.is_infinite() {
                    return Err(SolverError::Unbounded(i));
                }
                for &p in &path {
                    if caps[p].is_finite() {
                        load[p] += bottleneck;
                        lengths[p] *= 1.0 + epsilon * bottleneck / caps[p];
                    }
                }
                *flows.entry((i, path)).or_insert(0.0) += bottleneck;
            }
        }
        // lengths only grow, so each commodity's last distance is a lower bound
        alpha = phase_min.max(alpha * (1.0 + epsilon));
        let ratio = volume(&lengths) / phase_min;
        if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
            best = Some((ratio, lengths.clone()));
        }
    }

    let active: Vec<usize> = routable.iter().map(|&(i, _)| i).collect();
    let (x, scale) = match best {
        Some((_, raw)) => {
            let raw: Vec<f64> = raw
                .iter()
                .zip(edges)
                .map(|(&l, e)| match e.capacity {
                    Capacity::Finite(c) if c > 0.0 => l,
                    Capacity::Finite(_) => f64::INFINITY,
                    Capacity::Infinite => 0.0,
                })
                .collect();
            normalize_lengths(g, &raw, &active)?
        }
        // every connected pair is separated by free edges alone
        None => (
            edges
                .iter()
                .map(|e| if e.capacity == Capacity::Finite(0.0) { 1.0 } else { 0.0 })
                .collect(),
            1.0,
        ),
    };
    let x: Vec<f64> = x.into_iter().map(|l| l.min(1.0)).collect();
    let cost = x
        .iter()
        .zip(edges)
        .map(|(&l, e)| l * e.capacity.volume_weight())
        .sum();
    let mut pd = pair_distances(g, &x)?;
    for &i in &dropped {
        pd[i] = f64::INFINITY;
    }

    let congestion = load
        .iter()
        .zip(&caps)
        .filter(|(_, c)| c.is_finite() && **c > 0.0)
        .map(|(l, c)| l / c)
        .fold(0.0, f64::max);
    let mut paths = Vec::with_capacity(flows.len());
    let mut total = 0.0;
    for ((pair, positions), value) in flows {
        let value = if congestion > 0.0 { value / congestion } else { value };
        total += value;
        paths.push(FlowPath {
            pair,
            edges: positions.iter().map(|&p| edges[p].id).collect(),
            value,
        });
    }
    Ok((
        FractionalSolution {
            x,
            cost,
            pair_distances: pd,
            epsilon,
            scale,
            dropped_pairs: dropped,
        },
        FlowPaths { paths, total },
    ))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimalViolation {
    #[error("x has {got} entries, graph has {expected} edges")]
    Length { expected: usize, got: usize },
    #[error("edge {0} has negative or non-finite length {1}")]
    BadLength(EdgeId, f64),
    #[error("infinite-capacity edge {0} has nonzero length {1}")]
    InfiniteEdge(EdgeId, f64),
    #[error("pair {pair} ({s},{t}) is at distance {distance} < 1")]
    ShortPair { pair: usize, s: Vertex, t: Vertex, distance: f64 },
}

/// Recomputes every pair distance under `fs.x` and checks `d(s_i,t_i) ≥ 1 − 1e-9`.
pub fn verify_primal(g: &Graph, fs: &FractionalSolution) -> Result<(), PrimalViolation> {
    if fs.x.len() != g.edge_count() {
        return Err(PrimalViolation::Length {
            expected: g.edge_count(),
            got: fs.x.len(),
        });
    }
    for (e, &x) in g.edges().iter().zip(&fs.x) {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(PrimalViolation::BadLength(e.id, x));
        }
        if e.capacity.is_infinite() && x != 0.0 {
            return Err(PrimalViolation::InfiniteEdge(e.id, x));
        }
    }
    let dists = pair_distances(g, &fs.x).expect("lengths checked above");
    for (pair, (&(s, t), &distance)) in g.pairs().iter().zip(&dists).enumerate() {
        if distance < 1.0 - 1e-9 {
            return Err(PrimalViolation::ShortPair { pair, s, t, distance });
        }
    }
    Ok(())
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualViolation {
    #[error("path {0} has negative or non-finite value")]
    BadValue(usize),
    #[error("path {0} refers to a pair that does not exist")]
    UnknownPair(usize),
    #[error("path {path} is not a walk from its source to its sink")]
    BrokenPath { path: usize },
    #[error("edge {edge} carries {load} > capacity {capacity}")]
    Overloaded { edge: EdgeId, load: f64, capacity: f64 },
}

/// Recomputes edge loads and checks path structure and `Σ_{P∋e} f_P ≤ c(e)·(1+1e-9)`.
pub fn verify_dual(g: &Graph, fp: &FlowPaths) -> Result<(), DualViolation> {
    let mut loads: BTreeMap<EdgeId, f64> = BTreeMap::new();
    for (idx, path) in fp.paths.iter().enumerate() {
        if !(path.value >= 0.0 && path.value.is_finite()) {
            return Err(DualViolation::BadValue(idx));
        }
        let &(s, t) = g.pairs().get(path.pair).ok_or(DualViolation::UnknownPair(idx))?;
        let mut cur = s;
        for &id in &path.edges {
            let e = g.edge(id).ok_or(DualViolation::BrokenPath { path: idx })?;
            if e.u != cur && e.v != cur {
                return Err(DualViolation::BrokenPath { path: idx });
            }
            cur = e.other(cur);
            *loads.entry(id).or_insert(0.0) += path.value;
        }
        if cur != t {
            return Err(DualViolation::BrokenPath { path: idx });
        }
    }
    for (id, load) in loads {
        let e = g.edge(id).expect("checked above");
        if let Capacity::Finite(c) = e.capacity {
            if load > c * (1.0 + 1e-9) {
                return Err(DualViolation::Overloaded {
                    edge: id,
                    load,
                    capacity: c,
                });
            }
        }
    }
    Ok(())
}
