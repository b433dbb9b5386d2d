//! Deterministic region growing.
//!
//! Inside each half-open interval between consecutive distance values the
//! cut capacity `C(S,t)` is constant and the volume `Vol(S,t)` is linear with
//! slope `C`, so the smallest radius meeting
//! `C(S,t) ≤ ln(Vol(S,b⁻)/Vol(S,a))/(b−a) · Vol(S,t)` is found in closed form.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::fractional::{verify_primal, FractionalSolution, PrimalViolation};
use crate::graph::{boundary_edges, multi_source_distances, CutSet, DistanceField, Graph, GraphError, Vertex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("radius interval must satisfy 0 ≤ a < b, got [{a}, {b})")]
    BadInterval { a: f64, b: f64 },
    #[error("initial volume must be nonnegative and finite, got {0}")]
    BadInitialVolume(f64),
    #[error("initial volume is 0 but the ball has positive volume {0} before b")]
    UnboundedCoefficient(f64),
    #[error("no radius in [{a}, {b}) satisfies the region-growing bound: {dump}")]
    NoFeasibleRadius { a: f64, b: f64, dump: String },
    #[error("fractional solution is not feasible: {0}")]
    Infeasible(#[from] PrimalViolation),
    #[error("infinite-capacity edge would be cut")]
    InfiniteCut,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A radius with its region-growing certificate `cut ≤ bound_coefficient · vol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusChoice {
    pub t: f64,
    pub cut: f64,
    pub vol: f64,
    pub bound_coefficient: f64,
    pub vol_a: f64,
    pub vol_b_minus: f64,
    pub initial_volume: f64,
}

impl RadiusChoice {
    pub fn certificate_holds(&self) -> bool {
        self.cut <= self.bound_coefficient * self.vol + 1e-9 * self.vol
    }
}

struct Item {
    lo: f64,
    hi: f64,
    c: f64,
    cl: f64,
}

/// Sorted edge spans `[lo, hi]` of distance values, infinite-capacity edges removed.
fn spans(g: &Graph, df: &DistanceField) -> Vec<Item> {
    g.edges()
        .iter()
        .filter_map(|e| {
            let c = e.capacity.finite()?;
            let (du, dv) = (df.get(e.u), df.get(e.v));
            if du.is_infinite() || dv.is_infinite() {
                return None;
            }
            Some(Item {
                lo: du.min(dv),
                hi: du.max(dv),
                c,
                cl: c * e.length,
            })
        })
        .collect()
}

/// Vol′(b⁻): balls exclude vertices at distance exactly `b`, crossing mass uses `b`.
fn volume_before(items: &[Item], b: f64) -> f64 {
    items
        .iter()
        .map(|it| {
            if it.hi < b {
                it.cl
            } else if it.lo < b {
                it.c * (b - it.lo)
            } else {
                0.0
            }
        })
        .sum()
}

/// Smallest `t ∈ [a,b)` with `C(S,t) ≤ (1/(b−a))·ln(Vol(S,b⁻)/Vol(S,a))·Vol(S,t)`.
///
/// With `initial_volume = 0` the ratio is taken as 1 when the ball gains no
/// volume before `b` (then the radius must have zero cut); otherwise it is an error.
pub fn choose_radius(
    g: &Graph,
    sources: &[Vertex],
    a: f64,
    b: f64,
    initial_volume: f64,
) -> Result<RadiusChoice, RegionError> {
    let df = multi_source_distances(g, sources)?;
    choose_radius_from(g, &df, a, b, initial_volume)
}

/// [`choose_radius`] with precomputed distances.
pub fn choose_radius_from(
    g: &Graph,
    df: &DistanceField,
    a: f64,
    b: f64,
    initial_volume: f64,
) -> Result<RadiusChoice, RegionError> {
    if !(a >= 0.0 && a < b && b.is_finite()) {
        return Err(RegionError::BadInterval { a, b });
    }
    if !(initial_volume >= 0.0 && initial_volume.is_finite()) {
        return Err(RegionError::BadInitialVolume(initial_volume));
    }
    let items = spans(g, df);
    let vol_b_minus = initial_volume + volume_before(&items, b);

    let mut by_lo: Vec<usize> = (0..items.len()).collect();
    by_lo.sort_by(|&x, &y| items[x].lo.total_cmp(&items[y].lo));
    let mut by_hi = by_lo.clone();
    by_hi.sort_by(|&x, &y| items[x].hi.total_cmp(&items[y].hi));

    let mut points: Vec<f64> = g
        .vertices()
        .map(|v| df.get(v))
        .filter(|&d| d > a && d < b)
        .collect();
    points.push(a);
    points.sort_by(f64::total_cmp);
    points.dedup();

    // sweep state at the current breakpoint
    let (mut i_lo, mut i_hi) = (0, 0);
    let mut inside = 0.0;
    let mut cross_c = 0.0;
    let mut cross_clo = 0.0;
    let mut cross_count = 0usize;
    let mut advance = |p: f64, inside: &mut f64, cross_c: &mut f64, cross_clo: &mut f64, cross_count: &mut usize| {
        while i_lo < by_lo.len() && items[by_lo[i_lo]].lo <= p {
            let it = &items[by_lo[i_lo]];
            if it.hi > it.lo && it.c > 0.0 {
                *cross_c += it.c;
                *cross_clo += it.c * it.lo;
                *cross_count += 1;
            }
            i_lo += 1;
        }
        while i_hi < by_hi.len() && items[by_hi[i_hi]].hi <= p {
            let it = &items[by_hi[i_hi]];
            *inside += it.cl;
            if it.hi > it.lo && it.c > 0.0 {
                *cross_c -= it.c;
                *cross_clo -= it.c * it.lo;
                *cross_count -= 1;
            }
            i_hi += 1;
        }
        if *cross_count == 0 {
            *cross_c = 0.0;
            *cross_clo = 0.0;
        }
    };

    advance(a, &mut inside, &mut cross_c, &mut cross_clo, &mut cross_count);
    let vol_a = initial_volume + inside + cross_c * a - cross_clo;
    let coefficient = if vol_a > 0.0 {
        (vol_b_minus / vol_a).ln() / (b - a)
    } else if vol_b_minus <= 0.0 {
        0.0
    } else {
        return Err(RegionError::UnboundedCoefficient(vol_b_minus));
    };

    let mut intervals = Vec::with_capacity(points.len());
    for (idx, &p) in points.iter().enumerate() {
        if idx > 0 {
            advance(p, &mut inside, &mut cross_c, &mut cross_clo, &mut cross_count);
        }
        let q = points.get(idx + 1).copied().unwrap_or(b);
        let vol_p = initial_volume + inside + cross_c * p - cross_clo;
        intervals.push((p, q, cross_c, vol_p));
    }

    let choice = |t: f64, cut: f64, vol: f64| RadiusChoice {
        t,
        cut,
        vol,
        bound_coefficient: coefficient,
        vol_a,
        vol_b_minus,
        initial_volume,
    };
    for &(p, q, cut, vol_p) in &intervals {
        if cut == 0.0 {
            return Ok(choice(p, 0.0, vol_p));
        }
        if coefficient <= 0.0 {
            continue;
        }
        let t = p + (1.0 / coefficient - vol_p / cut).max(0.0);
        if t < q {
            let vol = vol_p + cut * (t - p);
            if cut <= coefficient * vol * (1.0 + 1e-12) {
                return Ok(choice(t, cut, vol));
            }
        }
    }
    // rounding can push the closed-form point onto the next breakpoint
    for &(p, q, cut, vol_p) in &intervals {
        if coefficient <= 0.0 {
            break;
        }
        let t = if q > p { q.next_down().max(p) } else { p };
        let vol = vol_p + cut * (t - p);
        if cut <= coefficient * vol * (1.0 + 1e-9) {
            return Ok(choice(t, cut, vol));
        }
    }
    let dump = intervals
        .iter()
        .map(|(p, q, c, v)| format!("[{p},{q}) C={c} Vol={v}"))
        .collect::<Vec<_>>()
        .join("; ");
    Err(RegionError::NoFeasibleRadius {
        a,
        b,
        dump: format!("coefficient={coefficient} vol_a={vol_a} vol_b-={vol_b_minus} {dump}"),
    })
}

/// Trace of one GVY ball.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GvyStep {
    pub pair: usize,
    pub choice: RadiusChoice,
    pub ball: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GvyResult {
    pub cut: CutSet,
    pub steps: Vec<GvyStep>,
}

/// Region-growing multicut over pairs in index order: grow a ball of radius
/// in `[0, 1/2)` from each still-connected source with initial volume `F*/k`,
/// cut its boundary, delete it.
pub fn gvy_multicut(g: &Graph, fs: &FractionalSolution) -> Result<GvyResult, RegionError> {
    verify_primal(g, fs)?;
    let k = g.pairs().len();
    if k == 0 {
        return Ok(GvyResult {
            cut: CutSet::empty(),
            steps: Vec::new(),
        });
    }
    let lg = g.with_lengths(&fs.x)?;
    let initial = fs.cost / k as f64;
    let mut current = lg.clone();
    let mut cut = BTreeSet::new();
    let mut steps = Vec::new();
    let none = BTreeSet::new();
    for (i, &(s, t)) in g.pairs().iter().enumerate() {
        if !current.is_present(s) || !current.is_present(t) || !current.reachable(s, &none)[t] {
            continue;
        }
        let df = multi_source_distances(&current, &[s])?;
        let choice = choose_radius_from(&current, &df, 0.0, 0.5, initial)?;
        let mut inside = vec![false; current.universe()];
        let ball: Vec<Vertex> = current.vertices().filter(|&v| df.get(v) <= choice.t).collect();
        for &v in &ball {
            inside[v] = true;
        }
        cut.extend(boundary_edges(&current, &inside));
        current = current.remove_vertices(&ball.iter().copied().collect());
        steps.push(GvyStep { pair: i, choice, ball });
    }
    let cut = CutSet::new(g, cut).map_err(|_| RegionError::InfiniteCut)?;
    Ok(GvyResult { cut, steps })
}
