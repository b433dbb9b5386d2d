//! Undirected capacitated graphs with edge lengths and terminal pairs.
//!
//! Vertex ids are dense `usize` indices into a fixed universe. Subgraph
//! operations keep the universe and mark vertices absent, so vertex ids and
//! [`EdgeId`]s stay stable across every derived graph.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// Stable edge identifier: the index of the edge in the list it was built from.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Edge capacity. `Infinite` is a symbolic sentinel for edges that must never be cut.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Infinite,
}

impl Capacity {
    pub fn is_infinite(self) -> bool {
        matches!(self, Capacity::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Infinite => None,
        }
    }

    /// Capacity as it enters volume sums: infinite edges count as zero.
    pub fn volume_weight(self) -> f64 {
        self.finite().unwrap_or(0.0)
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
    pub capacity: Capacity,
    pub length: f64,
}

impl Edge {
    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (universe size {size})")]
    VertexOutOfRange { vertex: Vertex, size: usize },
    #[error("vertex {0} is not present in the graph")]
    VertexAbsent(Vertex),
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("edge {0} has invalid capacity {1}")]
    BadCapacity(EdgeId, f64),
    #[error("edge {0} has invalid length {1}")]
    BadLength(EdgeId, f64),
    #[error("infinite-capacity edge {0} must have length 0")]
    InfiniteEdgeLength(EdgeId),
    #[error("source set is empty")]
    EmptySources,
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("length vector has {got} entries, graph has {expected} edges")]
    LengthCount { expected: usize, got: usize },
}

/// Simple undirected graph over a vertex universe `0..universe`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    present: Vec<bool>,
    edges: Vec<Edge>,
    pairs: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph whose edge ids are positions in `edges`.
    pub fn new(
        vertex_count: usize,
        edges: Vec<(Vertex, Vertex, Capacity, f64)>,
        pairs: Vec<(Vertex, Vertex)>,
    ) -> Result<Graph, GraphError> {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, (u, v, capacity, length))| Edge {
                id: EdgeId(i),
                u,
                v,
                capacity,
                length,
            })
            .collect();
        Graph::from_edges(vec![true; vertex_count], edges, pairs)
    }

    /// Builds a graph from edges carrying explicit ids. Endpoints must be present.
    pub fn from_edges(
        present: Vec<bool>,
        mut edges: Vec<Edge>,
        pairs: Vec<(Vertex, Vertex)>,
    ) -> Result<Graph, GraphError> {
        let size = present.len();
        let check = |w: Vertex| -> Result<(), GraphError> {
            if w >= size {
                Err(GraphError::VertexOutOfRange { vertex: w, size })
            } else if !present[w] {
                Err(GraphError::VertexAbsent(w))
            } else {
                Ok(())
            }
        };
        edges.sort_by_key(|e| e.id);
        let mut seen = BTreeSet::new();
        for (i, e) in edges.iter().enumerate() {
            if i > 0 && edges[i - 1].id == e.id {
                return Err(GraphError::DuplicateEdgeId(e.id));
            }
            check(e.u)?;
            check(e.v)?;
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(GraphError::DuplicateEdge(e.u, e.v));
            }
            match e.capacity {
                Capacity::Finite(c) if !(c.is_finite() && c >= 0.0) => {
                    return Err(GraphError::BadCapacity(e.id, c))
                }
                Capacity::Infinite if e.length != 0.0 => {
                    return Err(GraphError::InfiniteEdgeLength(e.id))
                }
                _ => {}
            }
            if !(e.length.is_finite() && e.length >= 0.0) {
                return Err(GraphError::BadLength(e.id, e.length));
            }
        }
        for &(s, t) in &pairs {
            check(s)?;
            check(t)?;
        }
        let mut adjacency = vec![Vec::new(); size];
        for (pos, e) in edges.iter().enumerate() {
            adjacency[e.u].push(pos);
            adjacency[e.v].push(pos);
        }
        Ok(Graph {
            present,
            edges,
            pairs,
            adjacency,
        })
    }

    /// Size of the vertex universe (present and absent vertices).
    pub fn universe(&self) -> usize {
        self.present.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_present(&self, v: Vertex) -> bool {
        self.present.get(v).copied().unwrap_or(false)
    }

    pub fn present_mask(&self) -> &[bool] {
        &self.present
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(v, _)| v)
    }

    /// Edges in ascending id order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|pos| &self.edges[pos])
    }

    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.pairs
    }

    /// Incident edges of `v` in ascending id order.
    pub fn incident(&self, v: Vertex) -> impl Iterator<Item = &Edge> + '_ {
        self.adjacency
            .get(v)
            .into_iter()
            .flatten()
            .map(move |&pos| &self.edges[pos])
    }

    /// Positions (indices into [`edges`](Self::edges)) of the edges incident to `v`.
    pub fn incident_positions(&self, v: Vertex) -> &[usize] {
        self.adjacency.get(v).map_or(&[], Vec::as_slice)
    }

    pub fn position_of(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency.get(v).map_or(0, Vec::len)
    }

    /// Σ c(e)·l(e) over finite-capacity edges.
    pub fn total_volume(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.capacity.volume_weight() * e.length)
            .sum()
    }

    /// Same graph with lengths replaced; `lengths[i]` belongs to `edges()[i]`.
    pub fn with_lengths(&self, lengths: &[f64]) -> Result<Graph, GraphError> {
        if lengths.len() != self.edges.len() {
            return Err(GraphError::LengthCount {
                expected: self.edges.len(),
                got: lengths.len(),
            });
        }
        let edges = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(e, &length)| Edge {
                length: if e.capacity.is_infinite() { 0.0 } else { length },
                ..e.clone()
            })
            .collect();
        Graph::from_edges(self.present.clone(), edges, self.pairs.clone())
    }

    /// Same graph with capacities multiplied by `factor`.
    pub fn scale_capacities(&self, factor: f64) -> Result<Graph, GraphError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                capacity: match e.capacity {
                    Capacity::Finite(c) => Capacity::Finite(c * factor),
                    Capacity::Infinite => Capacity::Infinite,
                },
                ..e.clone()
            })
            .collect();
        Graph::from_edges(self.present.clone(), edges, self.pairs.clone())
    }

    pub fn with_pairs(&self, pairs: Vec<(Vertex, Vertex)>) -> Result<Graph, GraphError> {
        Graph::from_edges(self.present.clone(), self.edges.clone(), pairs)
    }

    /// `G - vs`: drops the vertices, their incident edges, and pairs touching them.
    pub fn remove_vertices(&self, vs: &BTreeSet<Vertex>) -> Graph {
        let mut present = self.present.clone();
        for &v in vs {
            if v < present.len() {
                present[v] = false;
            }
        }
        self.restrict(present)
    }

    /// `G[vs]`: the subgraph induced by `vs` (absent ids are ignored).
    pub fn induced_subgraph(&self, vs: &BTreeSet<Vertex>) -> Graph {
        let mut present = vec![false; self.present.len()];
        for &v in vs {
            if self.is_present(v) {
                present[v] = true;
            }
        }
        self.restrict(present)
    }

    pub(crate) fn restrict(&self, present: Vec<bool>) -> Graph {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| present[e.u] && present[e.v])
            .cloned()
            .collect();
        let pairs = self
            .pairs
            .iter()
            .copied()
            .filter(|&(s, t)| present[s] && present[t])
            .collect();
        let mut adjacency = vec![Vec::new(); present.len()];
        for (pos, e) in edges.iter().enumerate() {
            adjacency[e.u].push(pos);
            adjacency[e.v].push(pos);
        }
        Graph {
            present,
            edges,
            pairs,
            adjacency,
        }
    }

    /// Adds `extra` fresh vertices (ids `universe()..universe()+extra`) and new edges.
    pub fn extend(&self, extra: usize, new_edges: Vec<Edge>) -> Result<Graph, GraphError> {
        let mut present = self.present.clone();
        present.extend(std::iter::repeat_n(true, extra));
        let mut edges = self.edges.clone();
        edges.extend(new_edges);
        Graph::from_edges(present, edges, self.pairs.clone())
    }

    /// Largest edge id plus one (0 for an edgeless graph).
    pub fn next_edge_id(&self) -> usize {
        self.edges.last().map_or(0, |e| e.id.0 + 1)
    }

    /// Vertices reachable from `start` avoiding edges in `removed`.
    pub fn reachable(&self, start: Vertex, removed: &BTreeSet<EdgeId>) -> Vec<bool> {
        let mut seen = vec![false; self.universe()];
        if !self.is_present(start) {
            return seen;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for e in self.incident(u) {
                if removed.contains(&e.id) {
                    continue;
                }
                let w = e.other(u);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Connected components after deleting `removed`, each sorted, ordered by smallest vertex.
    pub fn components(&self, removed: &BTreeSet<EdgeId>) -> Vec<Vec<Vertex>> {
        let mut label = vec![usize::MAX; self.universe()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            label[s] = id;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for e in self.incident(u) {
                    if removed.contains(&e.id) {
                        continue;
                    }
                    let w = e.other(u);
                    if label[w] == usize::MAX {
                        label[w] = id;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Σ of capacities of the given edges; `None` if any is infinite or missing.
    pub fn cut_cost(&self, ids: &BTreeSet<EdgeId>) -> Option<f64> {
        let mut total = 0.0;
        for &id in ids {
            total += self.edge(id)?.capacity.finite()?;
        }
        Some(total)
    }
}

/// A set of cut edges with their total capacity.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CutSet {
    pub edge_ids: BTreeSet<EdgeId>,
    pub cost: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error("edge {0} is not in the graph")]
    UnknownEdge(EdgeId),
    #[error("edge {0} has infinite capacity and cannot be cut")]
    InfiniteEdge(EdgeId),
}

impl CutSet {
    pub fn empty() -> CutSet {
        CutSet::default()
    }

    /// Builds a cut and computes its cost; rejects infinite or unknown edges.
    pub fn new(g: &Graph, edge_ids: BTreeSet<EdgeId>) -> Result<CutSet, CutError> {
        let mut cost = 0.0;
        for &id in &edge_ids {
            let e = g.edge(id).ok_or(CutError::UnknownEdge(id))?;
            cost += e.capacity.finite().ok_or(CutError::InfiniteEdge(id))?;
        }
        Ok(CutSet { edge_ids, cost })
    }

    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }
}

/// Shortest-path distances from a vertex set. Absent or unreachable vertices are `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    pub sources: Vec<Vertex>,
    pub dist: Vec<f64>,
}

impl DistanceField {
    pub fn get(&self, v: Vertex) -> f64 {
        self.dist.get(v).copied().unwrap_or(f64::INFINITY)
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: Vertex,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra restricted to vertices accepted by `allowed`, stopping once the
/// frontier exceeds `cutoff` (vertices beyond it stay at `+∞`).
pub(crate) fn dijkstra_with(
    g: &Graph,
    sources: &[Vertex],
    allowed: impl Fn(Vertex) -> bool,
    cutoff: f64,
) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.universe()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if g.is_present(s) && allowed(s) && dist[s] > 0.0 {
            dist[s] = 0.0;
            heap.push(HeapItem {
                dist: 0.0,
                vertex: s,
            });
        }
    }
    while let Some(HeapItem { dist: d, vertex: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if d > cutoff {
            dist[u] = f64::INFINITY;
            continue;
        }
        for e in g.incident(u) {
            let w = e.other(u);
            if !allowed(w) {
                continue;
            }
            let nd = d + e.length;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(HeapItem {
                    dist: nd,
                    vertex: w,
                });
            }
        }
    }
    // entries relaxed past the cutoff but never popped
    for d in dist.iter_mut() {
        if *d > cutoff {
            *d = f64::INFINITY;
        }
    }
    dist
}

fn check_sources(g: &Graph, sources: &[Vertex]) -> Result<(), GraphError> {
    if sources.is_empty() {
        return Err(GraphError::EmptySources);
    }
    for &s in sources {
        if s >= g.universe() {
            return Err(GraphError::VertexOutOfRange {
                vertex: s,
                size: g.universe(),
            });
        }
        if !g.is_present(s) {
            return Err(GraphError::VertexAbsent(s));
        }
    }
    Ok(())
}

/// Exact shortest-path distances `d(v, sources)` under the edge lengths.
pub fn multi_source_distances(g: &Graph, sources: &[Vertex]) -> Result<DistanceField, GraphError> {
    check_sources(g, sources)?;
    let mut sources = sources.to_vec();
    sources.sort_unstable();
    sources.dedup();
    let dist = dijkstra_with(g, &sources, |_| true, f64::INFINITY);
    Ok(DistanceField { sources, dist })
}

/// Closed ball `{v : d(v) ≤ t}`, ascending.
pub fn ball(g: &Graph, df: &DistanceField, t: f64) -> Vec<Vertex> {
    g.vertices().filter(|&v| df.get(v) <= t).collect()
}

/// Vol(S,t): `initial` plus c·l of edges inside the ball plus c·(t − d(u)) of crossing edges.
/// Infinite-capacity edges contribute nothing.
pub fn volume(g: &Graph, df: &DistanceField, t: f64, initial: f64) -> Result<f64, GraphError> {
    if t < 0.0 || t.is_nan() {
        return Err(GraphError::NegativeRadius(t));
    }
    let mut vol = initial;
    for e in g.edges() {
        let c = e.capacity.volume_weight();
        let (du, dv) = (df.get(e.u), df.get(e.v));
        let (lo, hi) = if du <= dv { (du, dv) } else { (dv, du) };
        if hi <= t {
            vol += c * e.length;
        } else if lo <= t {
            vol += c * (t - lo);
        }
    }
    Ok(vol)
}

/// C(S,t): total capacity of edges with exactly one endpoint in the ball of radius `t`.
pub fn cut_capacity(g: &Graph, df: &DistanceField, t: f64) -> Capacity {
    let mut total = 0.0;
    for e in g.edges() {
        let inside_u = df.get(e.u) <= t;
        let inside_v = df.get(e.v) <= t;
        if inside_u != inside_v {
            match e.capacity {
                Capacity::Finite(c) => total += c,
                Capacity::Infinite => return Capacity::Infinite,
            }
        }
    }
    Capacity::Finite(total)
}

/// Edges with exactly one endpoint in `inside`.
pub fn boundary_edges(g: &Graph, inside: &[bool]) -> BTreeSet<EdgeId> {
    g.edges()
        .iter()
        .filter(|e| inside[e.u] != inside[e.v])
        .map(|e| e.id)
        .collect()
}

/// Weak diameter of `vertices`: max pairwise distance measured in `full`.
pub fn component_diameter(full: &Graph, vertices: &[Vertex]) -> f64 {
    component_diameter_witness(full, vertices).map_or(0.0, |(_, _, d)| d)
}

/// Farthest pair of `vertices` under `full`'s metric, ties broken by ascending ids.
pub fn component_diameter_witness(full: &Graph, vertices: &[Vertex]) -> Option<(Vertex, Vertex, f64)> {
    let mut best: Option<(Vertex, Vertex, f64)> = None;
    for (i, &u) in vertices.iter().enumerate() {
        if i + 1 == vertices.len() {
            break;
        }
        let dist = dijkstra_with(full, &[u], |_| true, f64::INFINITY);
        for &v in &vertices[i + 1..] {
            let d = dist.get(v).copied().unwrap_or(f64::INFINITY);
            if best.is_none_or(|(_, _, b)| d > b) {
                best = Some((u, v, d));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(c: f64) -> Capacity {
        Capacity::Finite(c)
    }

    fn path3(len: f64) -> Graph {
        Graph::new(3, vec![(0, 1, f(1.0), len), (1, 2, f(1.0), len)], vec![(0, 2)]).unwrap()
    }

    #[test]
    fn distances_on_path() {
        let g = path3(0.5);
        let df = multi_source_distances(&g, &[0]).unwrap();
        assert_eq!(df.dist, vec![0.0, 0.5, 1.0]);
        let df = multi_source_distances(&g, &[0, 2]).unwrap();
        assert_eq!(df.dist, vec![0.0, 0.5, 0.0]);
    }

    #[test]
    fn disconnected_vertex_is_infinite() {
        let g = Graph::new(3, vec![(0, 1, f(1.0), 1.0)], vec![]).unwrap();
        let df = multi_source_distances(&g, &[0]).unwrap();
        assert!(df.get(2).is_infinite());
    }

    #[test]
    fn invalid_sources_rejected() {
        let g = path3(0.5);
        assert!(matches!(
            multi_source_distances(&g, &[7]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert_eq!(multi_source_distances(&g, &[]), Err(GraphError::EmptySources));
    }

    #[test]
    fn ball_is_closed() {
        let g = path3(0.5);
        let df = multi_source_distances(&g, &[0]).unwrap();
        assert_eq!(ball(&g, &df, 0.5), vec![0, 1]);
        assert_eq!(ball(&g, &df, 10.0), vec![0, 1, 2]);
    }

    #[test]
    fn zero_length_edges_collapse_balls() {
        let g = Graph::new(3, vec![(0, 1, f(1.0), 0.0), (1, 2, f(1.0), 1.0)], vec![]).unwrap();
        let df = multi_source_distances(&g, &[0]).unwrap();
        assert_eq!(ball(&g, &df, 0.0), vec![0, 1]);
    }

    #[test]
    fn volume_hand_values() {
        let g = Graph::new(2, vec![(0, 1, f(2.0), 0.5)], vec![]).unwrap();
        let df = multi_source_distances(&g, &[0]).unwrap();
        assert_eq!(volume(&g, &df, 0.25, 1.0).unwrap(), 1.5);
        assert_eq!(volume(&g, &df, 0.0, 3.0).unwrap(), 3.0);
        assert!(volume(&g, &df, -1.0, 0.0).is_err());

        let tri = Graph::new(
            3,
            vec![(0, 1, f(1.0), 1.0), (1, 2, f(1.0), 1.0), (0, 2, f(1.0), 1.0)],
            vec![],
        )
        .unwrap();
        let df = multi_source_distances(&tri, &[0]).unwrap();
        assert_eq!(volume(&tri, &df, 1.0, 0.0).unwrap(), 3.0);
    }

    #[test]
    fn cut_capacity_values() {
        let g = path3(1.0);
        let df = multi_source_distances(&g, &[0]).unwrap();
        assert_eq!(cut_capacity(&g, &df, 0.5), f(1.0));
        assert_eq!(cut_capacity(&g, &df, 2.0), f(0.0));

        let link = Graph::new(3, vec![(0, 1, Capacity::Infinite, 0.0), (1, 2, f(1.0), 1.0)], vec![])
            .unwrap();
        let df = multi_source_distances(&link, &[0]).unwrap();
        for t in [0.0, 0.5, 1.0, 3.0] {
            assert!(!cut_capacity(&link, &df, t).is_infinite());
        }
    }

    #[test]
    fn diameter_is_weak() {
        let g = Graph::new(3, vec![(0, 1, f(1.0), 0.3), (1, 2, f(1.0), 0.3)], vec![]).unwrap();
        assert_eq!(component_diameter(&g, &[1]), 0.0);
        assert!((component_diameter(&g, &[0, 2]) - 0.6).abs() < 1e-12);

        // 4-cycle: 0-1 long, 0-3-2-1 short through vertices outside the set
        let c = Graph::new(
            4,
            vec![
                (0, 1, f(1.0), 5.0),
                (1, 2, f(1.0), 0.1),
                (2, 3, f(1.0), 0.1),
                (3, 0, f(1.0), 0.1),
            ],
            vec![],
        )
        .unwrap();
        assert!((component_diameter(&c, &[0, 1]) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn subgraph_operations_keep_ids() {
        let tri = Graph::new(
            3,
            vec![(0, 1, f(1.0), 1.0), (1, 2, f(1.0), 1.0), (0, 2, f(1.0), 1.0)],
            vec![],
        )
        .unwrap();
        assert_eq!(tri.remove_vertices(&BTreeSet::new()), tri);
        let all: BTreeSet<_> = (0..3).collect();
        let empty = tri.remove_vertices(&all);
        assert_eq!(empty.vertex_count(), 0);
        assert_eq!(empty.edge_count(), 0);
        let minus = tri.remove_vertices(&BTreeSet::from([1]));
        assert_eq!(minus.edge_count(), 1);
        assert_eq!(minus.edges()[0].id, EdgeId(2));
        let induced = tri.induced_subgraph(&BTreeSet::from([0, 2]));
        assert_eq!(induced, minus);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Graph::new(2, vec![(0, 0, f(1.0), 1.0)], vec![]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
        assert!(matches!(
            Graph::new(2, vec![(0, 1, f(1.0), 1.0), (1, 0, f(1.0), 1.0)], vec![]),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(
            Graph::new(2, vec![(0, 1, f(-1.0), 1.0)], vec![]),
            Err(GraphError::BadCapacity(..))
        ));
        assert!(matches!(
            Graph::new(2, vec![(0, 1, Capacity::Infinite, 1.0)], vec![]),
            Err(GraphError::InfiniteEdgeLength(..))
        ));
        assert!(matches!(
            Graph::new(2, vec![(0, 5, f(1.0), 1.0)], vec![]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn adjacency_round_trip() {
        let g = path3(1.0);
        let mut count = 0;
        for v in g.vertices() {
            for e in g.incident(v) {
                assert!(e.u == v || e.v == v);
                count += 1;
            }
        }
        assert_eq!(count, 2 * g.edge_count());
    }

    #[test]
    fn cutset_rejects_infinite() {
        let g = Graph::new(2, vec![(0, 1, Capacity::Infinite, 0.0)], vec![]).unwrap();
        assert_eq!(
            CutSet::new(&g, BTreeSet::from([EdgeId(0)])),
            Err(CutError::InfiniteEdge(EdgeId(0)))
        );
    }
}
