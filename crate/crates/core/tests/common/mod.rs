#![allow(dead_code)]

use mcut_core::decomposition::{heuristic_tree_decomposition, TreeDecomposition};
use mcut_core::graph::{Capacity, Graph};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Random connected-ish graph: a random tree plus extra chords, random pairs.
pub fn random_graph(rng: &mut impl Rng, n: usize, extra: usize, pairs: usize, max_len: f64) -> Graph {
    let mut seen = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    let mut push = |u: usize, v: usize, rng: &mut dyn rand::RngCore| {
        let key = (u.min(v), u.max(v));
        if u != v && seen.insert(key) {
            let cap = rng.random_range(1..=4) as f64;
            let len = rng.random_range(0.0..=max_len);
            edges.push((u, v, Capacity::Finite(cap), len));
        }
    };
    for v in 1..n {
        let u = rng.random_range(0..v);
        push(u, v, rng);
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        push(u, v, rng);
    }
    let mut ps = Vec::new();
    while ps.len() < pairs && n > 1 {
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        if s != t {
            ps.push((s, t));
        }
    }
    Graph::new(n, edges, ps).unwrap()
}

pub fn with_td(g: Graph) -> (Graph, TreeDecomposition) {
    let td = heuristic_tree_decomposition(&g);
    td.validate(&g).unwrap();
    (g, td)
}

/// Exhaustive minimum multicut over all 2^m edge subsets.
pub fn exhaustive_opt(g: &Graph) -> f64 {
    let m = g.edge_count();
    assert!(m <= 20);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << m) {
        let removed = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e.id)
            .collect();
        let ok = g.pairs().iter().all(|&(s, t)| !g.reachable(s, &removed)[t]);
        if ok {
            best = best.min(g.cut_cost(&removed).unwrap());
        }
    }
    best
}
