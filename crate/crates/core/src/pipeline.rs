//! Multicut through a small diameter decomposition of a width decomposition.
//!
//! Phase 1 grows cores of radius `a` top-down over the bag tree, Phase 2 grows
//! a component of radius `< b − a` around each core, Phase 3 splits every
//! component with the cover-based decomposition centered at the core's center.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{tree_to_width, DecompositionError, TreeDecomposition, WidthDecomposition};
use crate::fractional::{pair_distances, solve_fractional, FlowPaths, FractionalSolution, SolverError};
use crate::graph::{
    ball, boundary_edges, cut_capacity, dijkstra_with, multi_source_distances, volume, Capacity, CutError, CutSet,
    Edge, EdgeId, Graph, GraphError, Vertex,
};
use crate::region::{choose_radius_from, RadiusChoice, RegionError};

/// Slack allowed on the `d ≤ 1/4` cover precondition for rounding in summed distances.
const COVER_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("pair {index} has source = sink = {vertex}; no multicut exists")]
    DegeneratePair { index: usize, vertex: Vertex },
    #[error("length vector has {got} entries, graph has {expected} edges")]
    LengthCount { expected: usize, got: usize },
    #[error("cover vertex {0} is not in the graph")]
    BadCover(Vertex),
    #[error("vertex {vertex} is at distance {distance} from the cover, more than 1/4")]
    CoverTooFar { vertex: Vertex, distance: f64 },
    #[error("link edge {0} would be cut")]
    LinkCut(EdgeId),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Cut(#[from] CutError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

impl PipelineConfig {
    /// `a = 1/8`, `b = 1/4`, `h = 2r³ + 2r`.
    pub fn for_width(r: usize) -> PipelineConfig {
        let r = r.max(1) as f64;
        PipelineConfig {
            a: 0.125,
            b: 0.25,
            h: 2.0 * r.powi(3) + 2.0 * r,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.a > 0.0 && self.b == 2.0 * self.a) {
            return Err(PipelineError::BadConfig(format!("need a > 0 and b = 2a, got a={} b={}", self.a, self.b)));
        }
        if self.b > 0.25 {
            return Err(PipelineError::BadConfig(format!("b must be at most 1/4, got {}", self.b)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(PipelineError::BadConfig(format!("h must be positive, got {}", self.h)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Core {
    pub id: usize,
    pub vertices: Vec<Vertex>,
    /// Uncovered part of the center-bag when the core was grown.
    pub center: Vec<Vertex>,
    pub center_bag: usize,
    /// Iteration that created the core, from 1.
    pub rank: usize,
    /// Vertex set of the graph the ball was grown in.
    pub growth_domain: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phase1Result {
    pub cores: Vec<Core>,
    /// Core ids attached to each bag.
    pub attachments: Vec<Vec<usize>>,
    pub iterations: usize,
}

/// Grows cores until every vertex is covered.
pub fn phase1_grow_cores(wd: &WidthDecomposition, cfg: &PipelineConfig) -> Result<Phase1Result, PipelineError> {
    let g = &wd.graph;
    let nb = wd.bags.len();
    let mut order: Vec<usize> = (0..nb).collect();
    order.sort_by_key(|&b| (wd.level[b], b));
    let mut covered = vec![false; g.universe()];
    let mut cores: Vec<Core> = Vec::new();
    let mut attachments: Vec<Vec<usize>> = vec![Vec::new(); nb];
    let mut iterations = 0;
    loop {
        let uncovered: Vec<bool> = wd.bags.iter().map(|bag| bag.iter().any(|&v| !covered[v])).collect();
        if !uncovered.contains(&true) {
            break;
        }
        iterations += 1;
        if iterations > g.universe() {
            return Err(PipelineError::Internal("phase 1 does not terminate".into()));
        }
        // label the forest of uncovered bags; parents come first in `order`
        let mut forest = vec![usize::MAX; nb];
        let mut roots = Vec::new();
        for &b in &order {
            if !uncovered[b] {
                continue;
            }
            match wd.parent[b] {
                Some(p) if uncovered[p] => forest[b] = forest[p],
                _ => {
                    forest[b] = roots.len();
                    roots.push(b);
                }
            }
        }
        for (tree, &root) in roots.iter().enumerate() {
            let mut visited = vec![false; nb];
            for &bag in order.iter().filter(|&&b| forest[b] == tree) {
                if visited[bag] {
                    continue;
                }
                let mut allowed = vec![false; g.universe()];
                let mut stack = vec![bag];
                while let Some(s) = stack.pop() {
                    for &v in &wd.bags[s] {
                        allowed[v] |= !covered[v];
                    }
                    for &c in &attachments[s] {
                        for &v in &cores[c].vertices {
                            allowed[v] = true;
                        }
                    }
                    stack.extend(wd.children[s].iter().copied().filter(|&c| forest[c] == tree));
                }
                let center: Vec<Vertex> = wd.bags[bag].iter().copied().filter(|&v| !covered[v]).collect();
                if center.is_empty() {
                    return Err(PipelineError::Internal(format!("unvisited bag {bag} is covered")));
                }
                let dist = dijkstra_with(g, &center, |v| allowed[v], cfg.a);
                let vertices: Vec<Vertex> = (0..g.universe()).filter(|&v| dist[v] <= cfg.a).collect();
                for &v in &vertices {
                    covered[v] = true;
                    if forest[wd.bag_of[v]] == tree {
                        visited[wd.bag_of[v]] = true;
                    }
                }
                let id = cores.len();
                if bag != root {
                    let parent = wd.parent[bag].expect("non-root bag has a parent");
                    attachments[parent].push(id);
                }
                cores.push(Core {
                    id,
                    vertices,
                    center,
                    center_bag: bag,
                    rank: iterations,
                    growth_domain: (0..g.universe()).filter(|&v| allowed[v]).collect(),
                });
            }
        }
    }
    Ok(Phase1Result {
        cores,
        attachments,
        iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub id: usize,
    pub vertices: Vec<Vertex>,
    pub core_id: usize,
    pub center: Vec<Vertex>,
}

/// How one core was processed in Phase 2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoreGrowth {
    pub core_id: usize,
    /// `None` when the core was already absorbed by earlier components.
    pub component: Option<usize>,
    /// `R′_i`.
    pub sources: Vec<Vertex>,
    /// Vertex set of `G_i`.
    pub domain: Vec<Vertex>,
    pub isolated: bool,
    /// `Vol′_{G_i}(R′_i, b−a)`.
    pub vol_prime: f64,
    pub initial_volume: f64,
    pub radius: Option<RadiusChoice>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phase2Result {
    /// Core ids in processing order.
    pub order: Vec<usize>,
    pub components: Vec<Component>,
    pub growth: Vec<CoreGrowth>,
    /// Transformed-graph edges joining different components.
    pub x2: BTreeSet<EdgeId>,
}

/// Partitions the vertices into components grown around the cores, top-down.
pub fn phase2_grow_components(
    wd: &WidthDecomposition,
    cores: &[Core],
    cfg: &PipelineConfig,
) -> Result<Phase2Result, PipelineError> {
    cfg.validate()?;
    let g = &wd.graph;
    let span = cfg.b - cfg.a;
    let mut order: Vec<usize> = (0..cores.len()).collect();
    order.sort_by_key(|&i| (wd.level[cores[i].center_bag], cores[i].center_bag));
    let mut owner = vec![usize::MAX; g.universe()];
    let mut current = g.clone();
    let mut components = Vec::new();
    let mut growth = Vec::new();
    for &ci in &order {
        let core = &cores[ci];
        let sources: Vec<Vertex> = core.vertices.iter().copied().filter(|&v| owner[v] == usize::MAX).collect();
        let domain: Vec<Vertex> = current.vertices().collect();
        if sources.is_empty() {
            growth.push(CoreGrowth {
                core_id: ci,
                component: None,
                sources,
                domain,
                isolated: false,
                vol_prime: 0.0,
                initial_volume: 0.0,
                radius: None,
            });
            continue;
        }
        let mut in_sources = vec![false; g.universe()];
        for &v in &sources {
            in_sources[v] = true;
        }
        let isolated = sources
            .iter()
            .all(|&v| current.incident(v).all(|e| in_sources[e.other(v)]));
        let df = multi_source_distances(&current, &sources)?;
        let vol_prime = volume(&current, &df, span, 0.0)?;
        let initial_volume = vol_prime / cfg.h;
        let (members, radius) = if isolated {
            (sources.clone(), None)
        } else {
            let rc = choose_radius_from(&current, &df, 0.0, span, initial_volume)?;
            if vol_prime == 0.0 && (rc.t != 0.0 || cut_capacity(&current, &df, 0.0) != Capacity::Finite(0.0)) {
                return Err(PipelineError::Internal(format!(
                    "core {ci} has zero volume but a positive cut at radius 0"
                )));
            }
            (ball(&current, &df, rc.t), Some(rc))
        };
        let id = components.len();
        for &v in &members {
            owner[v] = id;
        }
        current = current.remove_vertices(&members.iter().copied().collect());
        components.push(Component {
            id,
            vertices: members,
            core_id: ci,
            center: core.center.clone(),
        });
        growth.push(CoreGrowth {
            core_id: ci,
            component: Some(id),
            sources,
            domain,
            isolated,
            vol_prime,
            initial_volume,
            radius,
        });
    }
    if let Some(v) = g.vertices().find(|&v| owner[v] == usize::MAX) {
        return Err(PipelineError::Internal(format!("vertex {v} is in no component")));
    }
    let x2 = g
        .edges()
        .iter()
        .filter(|e| owner[e.u] != owner[e.v])
        .map(|e| e.id)
        .collect();
    Ok(Phase2Result {
        order,
        components,
        growth,
        x2,
    })
}

/// One ball of the cover-based decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SddBall {
    /// Index into the cover.
    pub center: usize,
    pub radius: RadiusChoice,
    /// Vertices of the input graph swallowed by the ball.
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SddResult {
    pub cut: CutSet,
    pub balls: Vec<SddBall>,
    /// `F = Σ c·l` of the input graph.
    pub volume: f64,
    /// Lower end of the radius interval (1/4 unless rounding pushed a vertex past it).
    pub a: f64,
}

/// Adds a fresh vertex standing in for a cover vertex, joined to every remaining
/// input vertex by a capacity-0 edge as long as its distance in the input graph.
fn add_proxy(h: &Graph, base: usize, dist: &[f64], next_id: &mut usize) -> Result<Graph, GraphError> {
    let proxy = h.universe();
    let mut edges = Vec::new();
    for u in h.vertices().filter(|&u| u < base) {
        if dist[u].is_finite() {
            edges.push(Edge {
                id: EdgeId(*next_id),
                u: proxy,
                v: u,
                capacity: Capacity::Finite(0.0),
                length: dist[u],
            });
            *next_id += 1;
        }
    }
    h.extend(1, edges)
}

/// Splits `g` into pieces of weak diameter `< 1` when every vertex lies within
/// 1/4 of `cover`. Cost at most `8·ln(|cover|+1)·Σ c·l`.
///
/// Balls are grown from fresh proxies of the cover vertices. A proxy keeps
/// capacity-0 shortcuts of length `d_g(s_j,u)` to every remaining vertex, so the
/// vertices near `s_j` stay within 1/4 of it after earlier balls are removed.
pub fn sdd_with_cover(g: &Graph, cover: &[Vertex]) -> Result<SddResult, PipelineError> {
    for &s in cover {
        if s >= g.universe() || !g.is_present(s) {
            return Err(PipelineError::BadCover(s));
        }
    }
    let f = g.total_volume();
    let mut result = SddResult {
        cut: CutSet::empty(),
        balls: Vec::new(),
        volume: f,
        a: 0.25,
    };
    if g.vertex_count() == 0 {
        return Ok(result);
    }
    let dists: Vec<Vec<f64>> = cover
        .iter()
        .map(|&s| dijkstra_with(g, &[s], |_| true, f64::INFINITY))
        .collect();
    for u in g.vertices() {
        let d = dists.iter().map(|d| d[u]).fold(f64::INFINITY, f64::min);
        if d > 0.25 + COVER_SLACK {
            return Err(PipelineError::CoverTooFar { vertex: u, distance: d });
        }
        result.a = result.a.max(d);
    }
    let (a, b) = (result.a, 0.5);
    let base = g.universe();
    let base_ids = g.next_edge_id();
    let initial = f / cover.len() as f64;
    let mut next_id = base_ids;
    let mut h = g.clone();
    let mut proxy = Vec::with_capacity(cover.len());
    for d in &dists {
        h = add_proxy(&h, base, d, &mut next_id)?;
        proxy.push(h.universe() - 1);
    }
    let mut cut = BTreeSet::new();
    for i in 0..cover.len() {
        if !h.vertices().any(|u| u < base) {
            break;
        }
        let df = multi_source_distances(&h, &[proxy[i]])?;
        let rc = choose_radius_from(&h, &df, a, b, initial)?;
        let members = ball(&h, &df, rc.t);
        let mut inside = vec![false; h.universe()];
        for &v in &members {
            inside[v] = true;
        }
        cut.extend(boundary_edges(&h, &inside).into_iter().filter(|id| id.0 < base_ids));
        h = h.remove_vertices(&members.iter().copied().collect());
        for j in i + 1..cover.len() {
            if !h.is_present(proxy[j]) {
                h = add_proxy(&h, base, &dists[j], &mut next_id)?;
                proxy[j] = h.universe() - 1;
            }
        }
        result.balls.push(SddBall {
            center: i,
            radius: rc,
            vertices: members.into_iter().filter(|&v| v < base).collect(),
        });
    }
    if let Some(u) = h.vertices().find(|&u| u < base) {
        return Err(PipelineError::Internal(format!("vertex {u} was not captured by any ball")));
    }
    result.cut = CutSet::new(g, cut)?;
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSplit {
    pub component: usize,
    pub sdd: SddResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phase3Result {
    pub splits: Vec<ComponentSplit>,
    /// Transformed-graph edges cut inside components.
    pub x3: BTreeSet<EdgeId>,
}

/// Runs the cover-based decomposition inside every component, using fresh
/// copies of the component's center joined by capacity-0 edges of length `d_G(y,s)`.
pub fn phase3_decompose(
    g_full: &Graph,
    components: &[Component],
    cfg: &PipelineConfig,
) -> Result<Phase3Result, PipelineError> {
    cfg.validate()?;
    let mut splits = Vec::new();
    let mut x3 = BTreeSet::new();
    let base = g_full.universe();
    for comp in components {
        if comp.vertices.len() <= 1 {
            continue;
        }
        let members: BTreeSet<Vertex> = comp.vertices.iter().copied().collect();
        let sub = g_full.induced_subgraph(&members);
        let mut next_id = g_full.next_edge_id();
        let mut extra = Vec::new();
        for (j, &y) in comp.center.iter().enumerate() {
            let dist = dijkstra_with(g_full, &[y], |_| true, f64::INFINITY);
            for &s in &comp.vertices {
                if dist[s].is_finite() {
                    extra.push(Edge {
                        id: EdgeId(next_id),
                        u: base + j,
                        v: s,
                        capacity: Capacity::Finite(0.0),
                        length: dist[s],
                    });
                    next_id += 1;
                }
            }
        }
        let aux = sub.extend(comp.center.len(), extra)?;
        let cover: Vec<Vertex> = (base..base + comp.center.len()).collect();
        let sdd = sdd_with_cover(&aux, &cover).map_err(|e| match e {
            PipelineError::CoverTooFar { vertex, distance } => PipelineError::Internal(format!(
                "component {} vertex {vertex} is {distance} from its center",
                comp.id
            )),
            other => other,
        })?;
        x3.extend(sdd.cut.edge_ids.iter().copied().filter(|id| g_full.edge(*id).is_some()));
        splits.push(ComponentSplit { component: comp.id, sdd });
    }
    Ok(Phase3Result { splits, x3 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowReport {
    /// Per transformed edge position: cores whose radius-(b−a) ball in `G_i` reaches it.
    pub counts: Vec<usize>,
    pub max: usize,
}

/// Counts, for every edge, the Phase 2 balls `B_{G_i}(R′_i, b−a)` that contain it at least partially.
pub fn shadow_diagnostics(
    wd: &WidthDecomposition,
    phase2: &Phase2Result,
    cfg: &PipelineConfig,
) -> Result<ShadowReport, PipelineError> {
    let g = &wd.graph;
    let span = cfg.b - cfg.a;
    let mut counts = vec![0; g.edge_count()];
    for step in &phase2.growth {
        if step.sources.is_empty() {
            continue;
        }
        let gi = g.induced_subgraph(&step.domain.iter().copied().collect());
        let df = multi_source_distances(&gi, &step.sources)?;
        for e in gi.edges() {
            let (du, dv) = (df.get(e.u), df.get(e.v));
            let (lo, hi) = (du.min(dv), du.max(dv));
            if hi <= span || lo < span {
                counts[g.position_of(e.id).expect("subgraph edge")] += 1;
            }
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    Ok(ShadowReport { counts, max })
}

/// Number of cores meeting each bag.
pub fn cores_per_bag(wd: &WidthDecomposition, cores: &[Core]) -> Vec<usize> {
    let mut counts = vec![0; wd.bags.len()];
    for core in cores {
        let bags: BTreeSet<usize> = core.vertices.iter().map(|&v| wd.bag_of[v]).collect();
        for b in bags {
            counts[b] += 1;
        }
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub shadow: ShadowReport,
    pub cores_per_bag: Vec<usize>,
    pub max_cores_per_bag: usize,
    /// Σ over processed cores of `Vol′_{G_i}(R′_i, b−a)/h`.
    pub initial_volume_sum: f64,
}

/// Where the edge lengths come from.
#[derive(Clone, Debug, PartialEq)]
pub enum LengthSource {
    /// Per-edge lengths in edge order.
    Given(Vec<f64>),
    /// Solve the fractional relaxation with this accuracy.
    Lp { epsilon: f64 },
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub config: PipelineConfig,
    /// Bag bound `r` of the width decomposition.
    pub width: usize,
    pub fractional: FractionalSolution,
    pub flow: Option<FlowPaths>,
    /// Every pair is at distance ≥ 1, so the cut is a multicut.
    pub lengths_feasible: bool,
    pub transformed: WidthDecomposition,
    pub phase1: Phase1Result,
    pub phase2: Phase2Result,
    pub phase3: Phase3Result,
    pub diagnostics: Diagnostics,
    /// Phase 2 cut on the input graph.
    pub x2: CutSet,
    /// Phase 3 cut on the input graph.
    pub x3: CutSet,
    pub cut: CutSet,
}

impl PipelineResult {
    /// `F* = Σ c·x`.
    pub fn volume(&self) -> f64 {
        self.fractional.cost
    }

    /// `ln(r+1)·F*`, the unit of every cost bound.
    pub fn bound_unit(&self) -> f64 {
        ((self.width as f64) + 1.0).ln() * self.fractional.cost
    }
}

fn given_solution(g: &Graph, x: Vec<f64>) -> Result<FractionalSolution, PipelineError> {
    if x.len() != g.edge_count() {
        return Err(PipelineError::LengthCount {
            expected: g.edge_count(),
            got: x.len(),
        });
    }
    let x: Vec<f64> = x
        .into_iter()
        .zip(g.edges())
        .map(|(l, e)| if e.capacity.is_infinite() { 0.0 } else { l })
        .collect();
    g.with_lengths(&x)?;
    let cost = x
        .iter()
        .zip(g.edges())
        .map(|(&l, e)| l * e.capacity.volume_weight())
        .sum();
    let pair_distances = pair_distances(g, &x)?;
    let none = BTreeSet::new();
    let dropped_pairs = g
        .pairs()
        .iter()
        .enumerate()
        .filter(|(_, &(s, t))| !g.reachable(s, &none)[t])
        .map(|(i, _)| i)
        .collect();
    Ok(FractionalSolution {
        x,
        cost,
        pair_distances,
        epsilon: 0.0,
        scale: 1.0,
        dropped_pairs,
    })
}

fn map_back(wd: &WidthDecomposition, g: &Graph, ids: &BTreeSet<EdgeId>) -> Result<CutSet, PipelineError> {
    let mapped = wd.map_cut(ids).map_err(PipelineError::LinkCut)?;
    Ok(CutSet::new(g, mapped)?)
}

/// Full pipeline: lengths, width decomposition, three phases, cut mapped back to `g`.
pub fn run_pipeline(g: &Graph, td: &TreeDecomposition, lengths: &LengthSource) -> Result<PipelineResult, PipelineError> {
    for (index, &(s, t)) in g.pairs().iter().enumerate() {
        if s == t {
            return Err(PipelineError::DegeneratePair { index, vertex: s });
        }
    }
    let (fractional, flow) = match lengths {
        LengthSource::Given(x) => (given_solution(g, x.clone())?, None),
        LengthSource::Lp { epsilon } if g.pairs().is_empty() => (FractionalSolution::zero(g, *epsilon), None),
        LengthSource::Lp { epsilon } => {
            let (fs, fp) = solve_fractional(g, *epsilon)?;
            (fs, Some(fp))
        }
    };
    let lengths_feasible = fractional.pair_distances.iter().all(|&d| d >= 1.0 - 1e-9);
    let lg = g.with_lengths(&fractional.x)?;
    let transformed = tree_to_width(&lg, td)?;
    let width = transformed.width;
    let config = PipelineConfig::for_width(width);

    let phase1 = phase1_grow_cores(&transformed, &config)?;
    let phase2 = phase2_grow_components(&transformed, &phase1.cores, &config)?;
    let phase3 = phase3_decompose(&transformed.graph, &phase2.components, &config)?;
    let shadow = shadow_diagnostics(&transformed, &phase2, &config)?;
    let per_bag = cores_per_bag(&transformed, &phase1.cores);
    let diagnostics = Diagnostics {
        iterations: phase1.iterations,
        shadow,
        max_cores_per_bag: per_bag.iter().copied().max().unwrap_or(0),
        cores_per_bag: per_bag,
        initial_volume_sum: phase2.growth.iter().map(|s| s.initial_volume).sum(),
    };

    let x2 = map_back(&transformed, g, &phase2.x2)?;
    let x3 = map_back(&transformed, g, &phase3.x3)?;
    let cut = CutSet::new(g, x2.edge_ids.union(&x3.edge_ids).copied().collect())?;
    Ok(PipelineResult {
        config,
        width,
        fractional,
        flow,
        lengths_feasible,
        transformed,
        phase1,
        phase2,
        phase3,
        diagnostics,
        x2,
        x3,
        cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::component_diameter;

    fn f(c: f64) -> Capacity {
        Capacity::Finite(c)
    }

    fn path_wd(n: usize, len: f64) -> WidthDecomposition {
        let edges = (0..n - 1).map(|i| (i, i + 1, f(1.0), len)).collect();
        let g = Graph::new(n, edges, vec![]).unwrap();
        let bags = (0..n).map(|i| vec![i]).collect();
        let parent = (0..n).map(|i| i.checked_sub(1)).collect();
        WidthDecomposition::from_parts(g, bags, parent).unwrap()
    }

    #[test]
    fn config_checks() {
        let cfg = PipelineConfig::for_width(2);
        assert_eq!(cfg.h, 20.0);
        cfg.validate().unwrap();
        let bad = PipelineConfig { b: 0.3, ..cfg };
        assert!(bad.validate().is_err());
        let bad = PipelineConfig { a: 0.2, b: 0.4, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_bag_gives_one_core() {
        let g = Graph::new(3, vec![(0, 1, f(1.0), 0.05), (1, 2, f(1.0), 0.05)], vec![]).unwrap();
        let wd = WidthDecomposition::from_parts(g, vec![vec![0, 1, 2]], vec![None]).unwrap();
        let cfg = PipelineConfig::for_width(wd.width);
        let p1 = phase1_grow_cores(&wd, &cfg).unwrap();
        assert_eq!(p1.cores.len(), 1);
        assert_eq!(p1.cores[0].rank, 1);
        assert_eq!(p1.iterations, 1);
        let p2 = phase2_grow_components(&wd, &p1.cores, &cfg).unwrap();
        assert_eq!(p2.components.len(), 1);
        assert!(p2.x2.is_empty());
    }

    #[test]
    fn long_path_gives_singleton_cores() {
        let wd = path_wd(5, 0.3);
        let cfg = PipelineConfig::for_width(wd.width);
        let p1 = phase1_grow_cores(&wd, &cfg).unwrap();
        assert_eq!(p1.cores.len(), 5);
        for (i, core) in p1.cores.iter().enumerate() {
            assert_eq!(core.vertices, vec![i]);
            assert_eq!(core.rank, 1);
        }
        assert_eq!(p1.iterations, 1);
    }

    #[test]
    fn second_iteration_covers_leftovers() {
        // bag 0 = {0}, bag 1 = {1, 2}; vertex 2 is beyond radius a from vertex 0
        let g = Graph::new(
            3,
            vec![(0, 1, f(1.0), 0.1), (1, 2, f(1.0), 0.3), (0, 2, f(1.0), 0.2)],
            vec![],
        )
        .unwrap();
        let wd = WidthDecomposition::from_parts(g, vec![vec![0], vec![1, 2]], vec![None, Some(0)]).unwrap();
        let cfg = PipelineConfig::for_width(wd.width);
        let p1 = phase1_grow_cores(&wd, &cfg).unwrap();
        assert_eq!(p1.cores[0].vertices, vec![0, 1]);
        assert_eq!(p1.cores[1].vertices, vec![2]);
        assert_eq!(p1.cores[1].rank, 2);
        assert_eq!(p1.iterations, 2);
    }

    #[test]
    fn separate_pieces_give_isolated_components() {
        let g = Graph::new(4, vec![(0, 1, f(1.0), 0.01), (2, 3, f(1.0), 0.01)], vec![]).unwrap();
        let wd = WidthDecomposition::from_parts(g, vec![vec![0, 1], vec![2, 3]], vec![None, Some(0)]).unwrap();
        let cfg = PipelineConfig::for_width(wd.width);
        let p1 = phase1_grow_cores(&wd, &cfg).unwrap();
        let p2 = phase2_grow_components(&wd, &p1.cores, &cfg).unwrap();
        assert_eq!(p2.components.len(), 2);
        assert!(p2.x2.is_empty());
        assert!(p2.growth.iter().all(|s| s.isolated));
    }

    #[test]
    fn sdd_on_edgeless_graph() {
        let g = Graph::new(2, vec![], vec![]).unwrap();
        let res = sdd_with_cover(&g, &[0, 1]).unwrap();
        assert!(res.cut.is_empty());
    }

    #[test]
    fn sdd_on_short_path_cuts_nothing() {
        let g = Graph::new(3, vec![(0, 1, f(1.0), 0.1), (1, 2, f(1.0), 0.1)], vec![]).unwrap();
        let res = sdd_with_cover(&g, &[1]).unwrap();
        assert!(res.cut.is_empty());
        assert_eq!(res.balls.len(), 1);
        assert_eq!(res.balls[0].vertices, vec![0, 1, 2]);
        assert!(component_diameter(&g, &[0, 1, 2]) < 1.0);
    }

    #[test]
    fn sdd_rejects_far_vertices() {
        let g = Graph::new(2, vec![(0, 1, f(1.0), 0.3)], vec![]).unwrap();
        assert!(matches!(
            sdd_with_cover(&g, &[0]),
            Err(PipelineError::CoverTooFar { vertex: 1, .. })
        ));
        assert!(matches!(sdd_with_cover(&g, &[5]), Err(PipelineError::BadCover(5))));
    }

    #[test]
    fn sdd_cost_bound_and_diameter() {
        // two centers, a star of spokes of length 1/4 around each, joined by a heavy edge
        let mut edges = Vec::new();
        for leaf in 2..6 {
            edges.push((0, leaf, f(1.0), 0.25));
        }
        for leaf in 6..10 {
            edges.push((1, leaf, f(1.0), 0.25));
        }
        edges.push((5, 6, f(3.0), 0.2));
        let g = Graph::new(10, edges, vec![]).unwrap();
        let res = sdd_with_cover(&g, &[0, 1]).unwrap();
        let f_total = g.total_volume();
        assert!(res.cut.cost <= 8.0 * 3f64.ln() * f_total + 1e-9);
        for ball in &res.balls {
            assert!(ball.radius.certificate_holds());
        }
        for comp in g.components(&res.cut.edge_ids) {
            assert!(component_diameter(&g, &comp) < 1.0);
        }
    }

    #[test]
    fn pipeline_on_path() {
        let g = Graph::new(3, vec![(0, 1, f(1.0), 0.0), (1, 2, f(1.0), 0.0)], vec![(0, 2)]).unwrap();
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]).unwrap();
        let res = run_pipeline(&g, &td, &LengthSource::Lp { epsilon: 0.1 }).unwrap();
        assert!(res.lengths_feasible);
        assert!(res.cut.cost >= 1.0);
        assert!(res.cut.cost <= 136.0 * res.bound_unit() + 1e-6);
        assert!(!g.reachable(0, &res.cut.edge_ids)[2]);
    }

    #[test]
    fn pipeline_without_pairs() {
        let g = Graph::new(3, vec![(0, 1, f(1.0), 0.0), (1, 2, f(0.0), 0.0)], vec![]).unwrap();
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]).unwrap();
        let res = run_pipeline(&g, &td, &LengthSource::Lp { epsilon: 0.1 }).unwrap();
        assert!(res.cut.is_empty());
        assert!(res.flow.is_none());
        assert_eq!(res.fractional.cost, 0.0);
    }

    #[test]
    fn pipeline_rejects_degenerate_pairs() {
        let g = Graph::new(2, vec![(0, 1, f(1.0), 0.0)], vec![(1, 1)]).unwrap();
        let td = TreeDecomposition::new(2, vec![vec![0, 1]], vec![]).unwrap();
        assert!(matches!(
            run_pipeline(&g, &td, &LengthSource::Lp { epsilon: 0.1 }),
            Err(PipelineError::DegeneratePair { index: 0, vertex: 1 })
        ));
    }

    #[test]
    fn given_lengths_must_match_edges() {
        let g = Graph::new(2, vec![(0, 1, f(1.0), 0.0)], vec![(0, 1)]).unwrap();
        let td = TreeDecomposition::new(2, vec![vec![0, 1]], vec![]).unwrap();
        assert!(matches!(
            run_pipeline(&g, &td, &LengthSource::Given(vec![])),
            Err(PipelineError::LengthCount { expected: 1, got: 0 })
        ));
        let res = run_pipeline(&g, &td, &LengthSource::Given(vec![0.5])).unwrap();
        assert!(!res.lengths_feasible);
    }
}
