//! Random partial k-trees with a known tree decomposition.
//!
//! A k-tree starts from a (k+1)-clique; every further vertex is joined to a
//! uniformly chosen k-clique already present. Each new vertex gets the bag
//! `clique ∪ {v}`, hung below a bag containing the clique. Edges are then kept
//! independently with probability `edge_keep_prob`. Randomness comes from
//! xoshiro256++ seeded through SplitMix64 (`seed_from_u64`), so a seed fixes
//! the instance.

use mcut_core::decomposition::TreeDecomposition;
use mcut_core::graph::{Capacity, Graph};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    pub edge_keep_prob: f64,
    pub num_pairs: usize,
    /// Inclusive range of integer capacities.
    pub cap_range: (u32, u32),
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("need n ≥ k+1, got n={n}, k={k}")]
    TooFewVertices { n: usize, k: usize },
    #[error("k must be at least 1")]
    ZeroWidth,
    #[error("edge keep probability must lie in [0,1], got {0}")]
    BadProbability(f64),
    #[error("capacity range {0}..={1} is empty")]
    BadCapacities(u32, u32),
    #[error("pairs need at least two vertices")]
    NoPairsPossible,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    pub td: TreeDecomposition,
}

pub fn generate_partial_ktree(p: &GenParams) -> Result<Generated, GenError> {
    if p.k == 0 {
        return Err(GenError::ZeroWidth);
    }
    if p.n < p.k + 1 {
        return Err(GenError::TooFewVertices { n: p.n, k: p.k });
    }
    if !(0.0..=1.0).contains(&p.edge_keep_prob) {
        return Err(GenError::BadProbability(p.edge_keep_prob));
    }
    if p.cap_range.0 > p.cap_range.1 {
        return Err(GenError::BadCapacities(p.cap_range.0, p.cap_range.1));
    }
    if p.num_pairs > 0 && p.n < 2 {
        return Err(GenError::NoPairsPossible);
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(p.seed);
    let k = p.k;

    let mut bags: Vec<Vec<usize>> = vec![(0..=k).collect()];
    let mut tree_edges = Vec::new();
    // (clique, bag containing it)
    let mut cliques: Vec<(Vec<usize>, usize)> = (0..=k)
        .map(|skip| ((0..=k).filter(|&v| v != skip).collect(), 0))
        .collect();
    let mut pairs_set = std::collections::BTreeSet::new();
    for u in 0..=k {
        for v in u + 1..=k {
            pairs_set.insert((u, v));
        }
    }
    for v in k + 1..p.n {
        let (clique, host) = cliques[rng.random_range(0..cliques.len())].clone();
        for &u in &clique {
            pairs_set.insert((u, v));
        }
        let bag_id = bags.len();
        let mut bag = clique.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        tree_edges.push((host, bag_id));
        for skip in 0..clique.len() {
            let mut c: Vec<usize> = clique.iter().copied().enumerate().filter(|&(i, _)| i != skip).map(|(_, u)| u).collect();
            c.push(v);
            c.sort_unstable();
            cliques.push((c, bag_id));
        }
    }

    let mut edges = Vec::new();
    for (u, v) in pairs_set {
        if rng.random_bool(p.edge_keep_prob) {
            let cap = rng.random_range(p.cap_range.0..=p.cap_range.1) as f64;
            edges.push((u, v, Capacity::Finite(cap), 0.0));
        }
    }
    let mut pairs = Vec::with_capacity(p.num_pairs);
    while pairs.len() < p.num_pairs {
        let s = rng.random_range(0..p.n);
        let t = rng.random_range(0..p.n);
        if s != t {
            pairs.push((s, t));
        }
    }
    let graph = Graph::new(p.n, edges, pairs).expect("generated graph is simple");
    let td = TreeDecomposition::new(p.n, bags, tree_edges).expect("generated bags form a tree");
    debug_assert!(td.validate(&graph).is_ok());
    Ok(Generated { graph, td })
}
