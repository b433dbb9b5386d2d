//! Tree decompositions (PACE-2017 `.td`) and the disjoint-bag width decomposition.
//!
//! [`tree_to_width`] replaces every appearance of a vertex in a bag with its own
//! copy, links copies in adjacent bags with zero-length [`Capacity::Infinite`]
//! edges, and realizes each original edge once, in the lowest-id bag that holds
//! both endpoints.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{Capacity, Edge, EdgeId, Graph, GraphError, Vertex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("bag id {0} out of range")]
    BagOutOfRange(usize),
    #[error("vertex {vertex} in bag {bag} out of range (n = {n})")]
    VertexOutOfRange { bag: usize, vertex: Vertex, n: usize },
    #[error("tree edges do not form a tree: {0}")]
    NotATree(String),
    #[error("edge {edge} ({u},{v}) is not contained in any bag")]
    EdgeNotCovered { edge: EdgeId, u: Vertex, v: Vertex },
    #[error("vertex {0} is not contained in any bag")]
    VertexNotCovered(Vertex),
    #[error("bags containing vertex {vertex} are not connected (e.g. bags {a} and {b})")]
    DisconnectedOccurrence { vertex: Vertex, a: usize, b: usize },
    #[error("decomposition is for {td} vertices but the graph has {graph}")]
    VertexCountMismatch { td: usize, graph: usize },
    #[error("width decomposition invalid: {0}")]
    InvalidWidth(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Tree decomposition over vertices `0..vertex_count`; bags are sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeDecomposition {
    pub vertex_count: usize,
    pub bags: Vec<Vec<Vertex>>,
    pub tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Builds and checks the tree structure (not graph coverage; see [`validate`](Self::validate)).
    pub fn new(
        vertex_count: usize,
        bags: Vec<Vec<Vertex>>,
        tree_edges: Vec<(usize, usize)>,
    ) -> Result<TreeDecomposition, DecompositionError> {
        let mut bags = bags;
        for (i, bag) in bags.iter_mut().enumerate() {
            bag.sort_unstable();
            bag.dedup();
            if let Some(&v) = bag.iter().find(|&&v| v >= vertex_count) {
                return Err(DecompositionError::VertexOutOfRange {
                    bag: i,
                    vertex: v,
                    n: vertex_count,
                });
            }
        }
        let td = TreeDecomposition {
            vertex_count,
            bags,
            tree_edges,
        };
        td.check_tree()?;
        Ok(td)
    }

    /// Max bag size − 1 (0 for a decomposition with no bags).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    fn check_tree(&self) -> Result<(), DecompositionError> {
        let m = self.bags.len();
        for &(a, b) in &self.tree_edges {
            if a >= m {
                return Err(DecompositionError::BagOutOfRange(a));
            }
            if b >= m {
                return Err(DecompositionError::BagOutOfRange(b));
            }
            if a == b {
                return Err(DecompositionError::NotATree(format!("self-loop on bag {}", a + 1)));
            }
        }
        if m == 0 {
            return if self.tree_edges.is_empty() {
                Ok(())
            } else {
                Err(DecompositionError::NotATree("edges without bags".into()))
            };
        }
        if self.tree_edges.len() != m - 1 {
            return Err(DecompositionError::NotATree(format!(
                "{} bags need {} tree edges, found {}",
                m,
                m - 1,
                self.tree_edges.len()
            )));
        }
        let adj = self.tree_adjacency();
        let mut seen = vec![false; m];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(b) = queue.pop_front() {
            for &c in &adj[b] {
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        if let Some(b) = seen.iter().position(|&s| !s) {
            return Err(DecompositionError::NotATree(format!(
                "bag {} unreachable from bag 1",
                b + 1
            )));
        }
        Ok(())
    }

    /// Checks the decomposition against `g`: every present vertex and every edge is
    /// covered, and each vertex's bags induce a connected subtree.
    pub fn validate(&self, g: &Graph) -> Result<(), DecompositionError> {
        if self.vertex_count != g.universe() {
            return Err(DecompositionError::VertexCountMismatch {
                td: self.vertex_count,
                graph: g.universe(),
            });
        }
        self.check_tree()?;
        let occurrences = self.occurrences();
        for v in g.vertices() {
            if occurrences[v].is_empty() {
                return Err(DecompositionError::VertexNotCovered(v));
            }
        }
        for e in g.edges() {
            if self.lowest_common_bag(&occurrences, e.u, e.v).is_none() {
                return Err(DecompositionError::EdgeNotCovered {
                    edge: e.id,
                    u: e.u,
                    v: e.v,
                });
            }
        }
        let adj = self.tree_adjacency();
        for (v, bags) in occurrences.iter().enumerate() {
            if bags.len() <= 1 {
                continue;
            }
            let holds: BTreeSet<usize> = bags.iter().copied().collect();
            let mut seen = BTreeSet::from([bags[0]]);
            let mut queue = VecDeque::from([bags[0]]);
            while let Some(b) = queue.pop_front() {
                for &c in &adj[b] {
                    if holds.contains(&c) && seen.insert(c) {
                        queue.push_back(c);
                    }
                }
            }
            if let Some(&missing) = bags.iter().find(|b| !seen.contains(b)) {
                return Err(DecompositionError::DisconnectedOccurrence {
                    vertex: v,
                    a: bags[0],
                    b: missing,
                });
            }
        }
        Ok(())
    }

    /// For each vertex, the ascending list of bags containing it.
    pub fn occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.vertex_count];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                occ[v].push(i);
            }
        }
        occ
    }

    fn lowest_common_bag(&self, occ: &[Vec<usize>], u: Vertex, v: Vertex) -> Option<usize> {
        occ[u]
            .iter()
            .copied()
            .find(|&b| self.bags[b].binary_search(&v).is_ok())
    }

    /// PACE-2017 text, 1-indexed.
    pub fn to_pace(&self) -> String {
        let mut out = format!(
            "s td {} {} {}\n",
            self.bags.len(),
            self.max_bag_size(),
            self.vertex_count
        );
        for (i, bag) in self.bags.iter().enumerate() {
            out.push_str(&format!("b {}", i + 1));
            for &v in bag {
                out.push_str(&format!(" {}", v + 1));
            }
            out.push('\n');
        }
        for &(a, b) in &self.tree_edges {
            out.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        out
    }
}

/// Parses PACE-2017 `.td` text: `s td <bags> <max_bag_size> <n>`, `b <id> <v>...`, `<id> <id>`.
pub fn parse_tree_decomposition(text: &str) -> Result<TreeDecomposition, DecompositionError> {
    let syntax = |line: usize, message: String| DecompositionError::Syntax { line, message };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
    let mut tree_edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() || tokens[0] == "c" {
            continue;
        }
        let num = |tok: &str| -> Result<usize, DecompositionError> {
            tok.parse::<usize>()
                .map_err(|_| syntax(line, format!("expected a non-negative integer, found {tok:?}")))
        };
        match tokens[0] {
            "s" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate solution line".into()));
                }
                if tokens.len() != 5 || tokens[1] != "td" {
                    return Err(syntax(line, "expected `s td <bags> <max_bag_size> <n>`".into()));
                }
                let h = (num(tokens[2])?, num(tokens[3])?, num(tokens[4])?);
                bags = vec![None; h.0];
                header = Some(h);
            }
            "b" => {
                let (count, max_size, n) =
                    header.ok_or_else(|| syntax(line, "bag before solution line".into()))?;
                if tokens.len() < 2 {
                    return Err(syntax(line, "expected `b <id> <vertices>...`".into()));
                }
                let id = num(tokens[1])?;
                if id == 0 || id > count {
                    return Err(syntax(line, format!("bag id {id} out of range 1..={count}")));
                }
                if bags[id - 1].is_some() {
                    return Err(syntax(line, format!("bag {id} listed twice")));
                }
                let mut bag = Vec::with_capacity(tokens.len() - 2);
                for tok in &tokens[2..] {
                    let v = num(tok)?;
                    if v == 0 || v > n {
                        return Err(syntax(line, format!("vertex {v} out of range 1..={n}")));
                    }
                    bag.push(v - 1);
                }
                if bag.len() > max_size {
                    return Err(syntax(
                        line,
                        format!("bag {id} has {} vertices, header allows {max_size}", bag.len()),
                    ));
                }
                bags[id - 1] = Some(bag);
            }
            _ => {
                let (count, _, _) =
                    header.ok_or_else(|| syntax(line, "tree edge before solution line".into()))?;
                if tokens.len() != 2 {
                    return Err(syntax(line, "expected `<bag> <bag>`".into()));
                }
                let (a, b) = (num(tokens[0])?, num(tokens[1])?);
                for id in [a, b] {
                    if id == 0 || id > count {
                        return Err(syntax(line, format!("bag id {id} out of range 1..={count}")));
                    }
                }
                tree_edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, _, n) = header.ok_or_else(|| syntax(0, "missing `s td` line".into()))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| syntax(0, format!("bag {} never defined", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    TreeDecomposition::new(n, bags, tree_edges)
}

/// Where a transformed edge came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EdgeOrigin {
    Original(EdgeId),
    /// Zero-length infinite-capacity edge joining two copies of this original vertex.
    Link(Vertex),
}

/// Rooted tree of disjoint bags partitioning the vertices of `graph`; every edge
/// lies inside a bag or between a bag and its parent.
#[derive(Clone, Debug)]
pub struct WidthDecomposition {
    pub graph: Graph,
    pub bags: Vec<Vec<Vertex>>,
    pub parent: Vec<Option<usize>>,
    pub level: Vec<usize>,
    pub children: Vec<Vec<usize>>,
    /// Bag index of every transformed vertex (`usize::MAX` for absent ids).
    pub bag_of: Vec<usize>,
    /// Maximum bag size.
    pub width: usize,
    /// Transformed vertex → original vertex.
    pub copy_map: Vec<Vertex>,
    /// Transformed edge id → origin.
    pub edge_map: BTreeMap<EdgeId, EdgeOrigin>,
}

impl WidthDecomposition {
    /// Wraps a graph that already has a disjoint-bag decomposition (identity maps).
    pub fn from_parts(
        graph: Graph,
        bags: Vec<Vec<Vertex>>,
        parent: Vec<Option<usize>>,
    ) -> Result<WidthDecomposition, DecompositionError> {
        let copy_map = (0..graph.universe()).collect();
        let edge_map = graph
            .edges()
            .iter()
            .map(|e| {
                let origin = if e.capacity.is_infinite() {
                    EdgeOrigin::Link(e.u)
                } else {
                    EdgeOrigin::Original(e.id)
                };
                (e.id, origin)
            })
            .collect();
        let wd = WidthDecomposition::assemble(graph, bags, parent, copy_map, edge_map)?;
        wd.validate()?;
        Ok(wd)
    }

    fn assemble(
        graph: Graph,
        mut bags: Vec<Vec<Vertex>>,
        parent: Vec<Option<usize>>,
        copy_map: Vec<Vertex>,
        edge_map: BTreeMap<EdgeId, EdgeOrigin>,
    ) -> Result<WidthDecomposition, DecompositionError> {
        let invalid = |m: String| DecompositionError::InvalidWidth(m);
        if parent.len() != bags.len() {
            return Err(invalid("parent list length differs from bag count".into()));
        }
        let mut children = vec![Vec::new(); bags.len()];
        let mut roots = Vec::new();
        for (b, p) in parent.iter().enumerate() {
            match *p {
                Some(p) if p >= bags.len() => return Err(invalid(format!("bag {b} has bad parent {p}"))),
                Some(p) => children[p].push(b),
                None => roots.push(b),
            }
        }
        if !bags.is_empty() && roots.len() != 1 {
            return Err(invalid(format!("expected one root, found {}", roots.len())));
        }
        let mut level = vec![usize::MAX; bags.len()];
        if let Some(&root) = roots.first() {
            level[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(b) = queue.pop_front() {
                for &c in &children[b] {
                    level[c] = level[b] + 1;
                    queue.push_back(c);
                }
            }
        }
        if level.contains(&usize::MAX) {
            return Err(invalid("parent pointers contain a cycle".into()));
        }
        let mut bag_of = vec![usize::MAX; graph.universe()];
        for (i, bag) in bags.iter_mut().enumerate() {
            bag.sort_unstable();
            for &v in bag.iter() {
                if v >= bag_of.len() || !graph.is_present(v) {
                    return Err(invalid(format!("bag {i} holds unknown vertex {v}")));
                }
                if bag_of[v] != usize::MAX {
                    return Err(invalid(format!("vertex {v} in bags {} and {i}", bag_of[v])));
                }
                bag_of[v] = i;
            }
        }
        let width = bags.iter().map(Vec::len).max().unwrap_or(0);
        Ok(WidthDecomposition {
            graph,
            bags,
            parent,
            level,
            children,
            bag_of,
            width,
            copy_map,
            edge_map,
        })
    }

    pub fn root(&self) -> Option<usize> {
        self.parent.iter().position(Option::is_none)
    }

    /// Checks every structural invariant of the width decomposition.
    pub fn validate(&self) -> Result<(), DecompositionError> {
        let invalid = |m: String| DecompositionError::InvalidWidth(m);
        for v in self.graph.vertices() {
            if self.bag_of[v] == usize::MAX {
                return Err(invalid(format!("vertex {v} is in no bag")));
            }
        }
        for e in self.graph.edges() {
            let (bu, bv) = (self.bag_of[e.u], self.bag_of[e.v]);
            let ok = bu == bv || self.parent[bu] == Some(bv) || self.parent[bv] == Some(bu);
            if !ok {
                return Err(invalid(format!("edge {} joins non-adjacent bags {bu} and {bv}", e.id)));
            }
            match self.edge_map.get(&e.id) {
                Some(EdgeOrigin::Link(orig)) => {
                    if !e.capacity.is_infinite() || e.length != 0.0 {
                        return Err(invalid(format!("link edge {} is not infinite/zero-length", e.id)));
                    }
                    if self.copy_map[e.u] != *orig || self.copy_map[e.v] != *orig {
                        return Err(invalid(format!("link edge {} joins copies of different vertices", e.id)));
                    }
                }
                Some(EdgeOrigin::Original(_)) => {
                    if e.capacity.is_infinite() {
                        return Err(invalid(format!("original edge {} has infinite capacity", e.id)));
                    }
                }
                None => return Err(invalid(format!("edge {} has no origin", e.id))),
            }
        }
        // copies of one original vertex must be connected through link edges
        let mut copies: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for v in self.graph.vertices() {
            copies.entry(self.copy_map[v]).or_default().push(v);
        }
        let non_links: BTreeSet<EdgeId> = self
            .edge_map
            .iter()
            .filter(|(_, o)| !matches!(o, EdgeOrigin::Link(_)))
            .map(|(&id, _)| id)
            .collect();
        for (orig, list) in &copies {
            if list.len() > 1 {
                let reach = self.graph.reachable(list[0], &non_links);
                if list.iter().any(|&c| !reach[c]) {
                    return Err(invalid(format!("copies of vertex {orig} are not link-connected")));
                }
            }
        }
        Ok(())
    }

    /// Maps a transformed cut back to original edge ids. Fails on link edges.
    pub fn map_cut(&self, cut: &BTreeSet<EdgeId>) -> Result<BTreeSet<EdgeId>, EdgeId> {
        cut.iter()
            .map(|id| match self.edge_map.get(id) {
                Some(EdgeOrigin::Original(orig)) => Ok(*orig),
                _ => Err(*id),
            })
            .collect()
    }

    pub fn is_link(&self, id: EdgeId) -> bool {
        matches!(self.edge_map.get(&id), Some(EdgeOrigin::Link(_)))
    }
}

/// Turns a tree decomposition of `g` into a width decomposition of an equivalent graph.
pub fn tree_to_width(g: &Graph, td: &TreeDecomposition) -> Result<WidthDecomposition, DecompositionError> {
    td.validate(g)?;
    let mut copy_index: BTreeMap<(usize, Vertex), Vertex> = BTreeMap::new();
    let mut copy_map = Vec::new();
    let mut bags = Vec::with_capacity(td.bags.len());
    for (i, bag) in td.bags.iter().enumerate() {
        let mut wbag = Vec::with_capacity(bag.len());
        for &v in bag {
            copy_index.insert((i, v), copy_map.len());
            wbag.push(copy_map.len());
            copy_map.push(v);
        }
        bags.push(wbag);
    }

    // root at bag 0, deterministic BFS
    let adj = td.tree_adjacency();
    let mut parent = vec![None; td.bags.len()];
    if !td.bags.is_empty() {
        let mut seen = vec![false; td.bags.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(b) = queue.pop_front() {
            for &c in &adj[b] {
                if !seen[c] {
                    seen[c] = true;
                    parent[c] = Some(b);
                    queue.push_back(c);
                }
            }
        }
    }

    let occurrences = td.occurrences();
    let mut edges = Vec::new();
    let mut edge_map = BTreeMap::new();
    for e in g.edges() {
        let bag = td
            .lowest_common_bag(&occurrences, e.u, e.v)
            .expect("validated decomposition covers every edge");
        let id = EdgeId(edges.len());
        edges.push(Edge {
            id,
            u: copy_index[&(bag, e.u)],
            v: copy_index[&(bag, e.v)],
            capacity: e.capacity,
            length: e.length,
        });
        edge_map.insert(id, EdgeOrigin::Original(e.id));
    }
    let mut tree_edges: Vec<(usize, usize)> = td
        .tree_edges
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    tree_edges.sort_unstable();
    for (a, b) in tree_edges {
        for &v in &td.bags[a] {
            if td.bags[b].binary_search(&v).is_ok() {
                let id = EdgeId(edges.len());
                edges.push(Edge {
                    id,
                    u: copy_index[&(a, v)],
                    v: copy_index[&(b, v)],
                    capacity: Capacity::Infinite,
                    length: 0.0,
                });
                edge_map.insert(id, EdgeOrigin::Link(v));
            }
        }
    }
    let lift = |v: Vertex| copy_index[&(occurrences[v][0], v)];
    let pairs = g.pairs().iter().map(|&(s, t)| (lift(s), lift(t))).collect();
    let graph = Graph::from_edges(vec![true; copy_map.len()], edges, pairs)?;
    WidthDecomposition::assemble(graph, bags, parent, copy_map, edge_map)
}

/// Tree decomposition by min-fill elimination (ties: fewer neighbors, then lower id).
/// Always valid; no width guarantee.
pub fn heuristic_tree_decomposition(g: &Graph) -> TreeDecomposition {
    let n = g.universe();
    let mut nbrs: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
    for e in g.edges() {
        nbrs[e.u].insert(e.v);
        nbrs[e.v].insert(e.u);
    }
    let mut alive: BTreeSet<Vertex> = g.vertices().collect();
    let mut order = Vec::with_capacity(alive.len());
    let mut bag_nbrs = Vec::with_capacity(alive.len());
    while !alive.is_empty() {
        let fill = |v: Vertex| -> usize {
            let list: Vec<Vertex> = nbrs[v].iter().copied().collect();
            let mut missing = 0;
            for (i, &a) in list.iter().enumerate() {
                for &b in &list[i + 1..] {
                    if !nbrs[a].contains(&b) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let v = *alive
            .iter()
            .min_by_key(|&&v| (fill(v), nbrs[v].len(), v))
            .expect("nonempty");
        let list: Vec<Vertex> = nbrs[v].iter().copied().collect();
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                nbrs[a].insert(b);
                nbrs[b].insert(a);
            }
        }
        for &a in &list {
            nbrs[a].remove(&v);
        }
        nbrs[v].clear();
        alive.remove(&v);
        order.push(v);
        bag_nbrs.push(list);
    }
    let mut position = vec![usize::MAX; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let mut bags = Vec::with_capacity(order.len());
    let mut tree_edges = Vec::new();
    for (p, (&v, list)) in order.iter().zip(&bag_nbrs).enumerate() {
        let mut bag = list.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        let next = list.iter().map(|&w| position[w]).min();
        match next {
            Some(q) => tree_edges.push((p, q)),
            None if p + 1 < order.len() => tree_edges.push((p, p + 1)),
            None => {}
        }
    }
    TreeDecomposition::new(n, bags, tree_edges).expect("elimination tree is a tree")
}
