//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use mcut_cli::format::parse_graph;
use mcut_cli::generator::{generate_partial_ktree, GenParams, Generated};
use mcut_core::decomposition::{parse_tree_decomposition, TreeDecomposition};
use mcut_core::graph::{Capacity, Graph, Vertex};
use mcut_core::oracle::{brute_force_multicut, verify_multicut, verify_sdd};
use mcut_core::pipeline::{run_pipeline, LengthSource, PipelineResult};
use mcut_core::region::{choose_radius, gvy_multicut};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const SLACK: f64 = 1e-6;

fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Instance `i` of a suite: n ≤ 60, k ≤ 5, 1..=10 pairs.
fn instance(suite: u64, i: u64) -> Generated {
    let mut r = rng(suite.wrapping_mul(1_000_003) ^ i);
    let k = 1 + (i % 5) as usize;
    let p = GenParams {
        n: r.random_range(k + 1..=60),
        k,
        edge_keep_prob: r.random_range(0.4..=1.0),
        num_pairs: r.random_range(1..=10),
        cap_range: (1, 10),
        seed: suite * 100_000 + i,
    };
    generate_partial_ktree(&p).unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn load(name: &str) -> (Graph, TreeDecomposition) {
    let dir = fixtures();
    let g = parse_graph(&std::fs::read_to_string(dir.join(format!("{name}.mcg"))).unwrap())
        .unwrap()
        .graph;
    let td = parse_tree_decomposition(&std::fs::read_to_string(dir.join(format!("{name}.td"))).unwrap()).unwrap();
    (g, td)
}

#[derive(PartialEq)]
struct State(f64, Vertex);

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Multi-source shortest paths restricted to `domain`.
fn dijkstra(g: &Graph, domain: &BTreeSet<Vertex>, sources: &[Vertex]) -> BTreeMap<Vertex, f64> {
    let mut adj: BTreeMap<Vertex, Vec<(Vertex, f64)>> = BTreeMap::new();
    for e in g.edges() {
        if domain.contains(&e.u) && domain.contains(&e.v) {
            adj.entry(e.u).or_default().push((e.v, e.length));
            adj.entry(e.v).or_default().push((e.u, e.length));
        }
    }
    let mut dist = BTreeMap::new();
    let mut heap: BinaryHeap<State> = sources.iter().map(|&s| State(0.0, s)).collect();
    while let Some(State(d, v)) = heap.pop() {
        if dist.contains_key(&v) {
            continue;
        }
        dist.insert(v, d);
        for &(w, l) in adj.get(&v).into_iter().flatten() {
            if !dist.contains_key(&w) {
                heap.push(State(d + l, w));
            }
        }
    }
    dist
}

/// Structural invariants recomputed from the pipeline trace.
fn structural(g: &Graph, res: &PipelineResult) -> Vec<String> {
    let mut bad = Vec::new();
    let r = res.width;
    let wd = &res.transformed;
    if res.phase1.iterations > r {
        bad.push(format!("{} Phase 1 iterations > r = {r}", res.phase1.iterations));
    }
    let mut by_rank: BTreeMap<usize, BTreeSet<Vertex>> = BTreeMap::new();
    let mut covered = BTreeSet::new();
    for core in &res.phase1.cores {
        let seen = by_rank.entry(core.rank).or_default();
        for &v in &core.vertices {
            if !seen.insert(v) {
                bad.push(format!("vertex {v} in two cores of rank {}", core.rank));
            }
            covered.insert(v);
        }
    }
    if covered != wd.graph.vertices().collect() {
        bad.push("cores do not cover V".into());
    }
    for (b, bag) in wd.bags.iter().enumerate() {
        let bag: BTreeSet<Vertex> = bag.iter().copied().collect();
        let meeting = res
            .phase1
            .cores
            .iter()
            .filter(|c| c.vertices.iter().any(|v| bag.contains(v)))
            .count();
        if meeting > r * r {
            bad.push(format!("bag {b} meets {meeting} cores > r² = {}", r * r));
        }
    }
    let span = res.config.b - res.config.a;
    let mut shadow = vec![0usize; wd.graph.edge_count()];
    for step in &res.phase2.growth {
        if step.sources.is_empty() {
            continue;
        }
        let domain: BTreeSet<Vertex> = step.domain.iter().copied().collect();
        let dist = dijkstra(&wd.graph, &domain, &step.sources);
        for (pos, e) in wd.graph.edges().iter().enumerate() {
            let (Some(&du), Some(&dv)) = (dist.get(&e.u), dist.get(&e.v)) else {
                continue;
            };
            if du.min(dv) < span || du.max(dv) <= span {
                shadow[pos] += 1;
            }
        }
    }
    let limit = 2 * r.pow(3) + 2 * r;
    if let Some(max) = shadow.iter().copied().max().filter(|&m| m > limit) {
        bad.push(format!("shadow count {max} > 2r³+2r = {limit}"));
    }
    for cut in [&res.cut, &res.x2, &res.x3] {
        for &id in &cut.edge_ids {
            if g.edge(id).is_none_or(|e| e.capacity.is_infinite()) {
                bad.push(format!("edge {id:?} in a cut is infinite or unknown"));
            }
        }
    }
    bad
}

fn bound_violations(res: &PipelineResult) -> Vec<String> {
    let u = res.bound_unit();
    let mut bad = Vec::new();
    for (name, cost, c) in [("X3", res.x3.cost, 8.0), ("X2", res.x2.cost, 128.0), ("total", res.cut.cost, 136.0)] {
        if cost > c * u + SLACK {
            bad.push(format!("{name} cost {cost} > {c}·ln(r+1)·F* = {}", c * u));
        }
    }
    bad
}

type Verdict = Result<String, String>;

fn first_failures(mut fails: Vec<String>, total: usize) -> Verdict {
    if fails.is_empty() {
        return Ok(String::new());
    }
    let n = fails.len();
    fails.truncate(3);
    Err(format!("{n} failures out of {total}: {}", fails.join("; ")))
}

struct Suite1 {
    feasibility: Verdict,
    bounds: Verdict,
    structure: Vec<String>,
}

fn suite_feasibility() -> Suite1 {
    let count = 500;
    let start = Instant::now();
    let mut infeasible = Vec::new();
    let mut over = Vec::new();
    let mut structure = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let inst = instance(1, i);
        let res = match run_pipeline(&inst.graph, &inst.td, &LengthSource::Lp { epsilon: 0.1 }) {
            Ok(res) => res,
            Err(e) => {
                infeasible.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        if verify_multicut(&inst.graph, &res.cut).is_err() {
            infeasible.push(format!("instance {i}: pair left connected"));
        }
        let lg = inst.graph.with_lengths(&res.fractional.x).unwrap();
        if let Err(w) = verify_sdd(&lg, &res.cut) {
            infeasible.push(format!("instance {i}: piece with {} ~ {} at {}", w.u, w.v, w.distance));
        }
        over.extend(bound_violations(&res).into_iter().map(|m| format!("instance {i}: {m}")));
        structure.extend(structural(&inst.graph, &res).into_iter().map(|m| format!("suite 1 instance {i}: {m}")));
        if res.bound_unit() > 0.0 {
            worst = worst.max(res.cut.cost / (136.0 * res.bound_unit()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut feasibility = first_failures(infeasible, count as usize)
        .map(|_| format!("{count} instances feasible and SDD, {secs:.1} s"));
    if feasibility.is_ok() && secs > 60.0 {
        feasibility = Err(format!("{count} instances took {secs:.1} s > 60 s"));
    }
    let bounds = first_failures(over, count as usize)
        .map(|_| format!("{count} instances within 8/128/136·ln(r+1)·F*, worst total/b136 = {worst:.4}"));
    Suite1 {
        feasibility,
        bounds,
        structure,
    }
}

fn suite_arbitrary_lengths(structure: &mut Vec<String>) -> Verdict {
    let count = 200;
    let mut fails = Vec::new();
    for i in 0..count {
        let inst = instance(3, i);
        let mut r = rng(0x3000 + i);
        let x: Vec<f64> = (0..inst.graph.edge_count()).map(|_| r.random_range(0.0..=1.0)).collect();
        let res = match run_pipeline(&inst.graph, &inst.td, &LengthSource::Given(x.clone())) {
            Ok(res) => res,
            Err(e) => {
                fails.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        let lg = inst.graph.with_lengths(&x).unwrap();
        if let Err(w) = verify_sdd(&lg, &res.cut) {
            fails.push(format!("instance {i}: piece with {} ~ {} at {}", w.u, w.v, w.distance));
        }
        let f_star: f64 = inst
            .graph
            .edges()
            .iter()
            .zip(&x)
            .map(|(e, l)| e.capacity.finite().unwrap() * l)
            .sum();
        let bound = 136.0 * ((res.width as f64) + 1.0).ln() * f_star;
        if res.cut.cost > bound + SLACK {
            fails.push(format!("instance {i}: cost {} > {bound}", res.cut.cost));
        }
        structure.extend(structural(&inst.graph, &res).into_iter().map(|m| format!("suite 3 instance {i}: {m}")));
    }
    first_failures(fails, count as usize).map(|_| format!("{count} random-length instances decomposed within 136·ln(r+1)·F*"))
}

/// Minimum multicut by enumerating every subset of at most 18 finite edges.
fn exhaustive(g: &Graph) -> f64 {
    let n = g.universe();
    let m = g.edge_count();
    assert!(m <= 18);
    let mut best = f64::INFINITY;
    let mut parent = vec![0usize; n];
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for mask in 0u32..1 << m {
        let mut cost = 0.0;
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i;
        }
        for (j, e) in g.edges().iter().enumerate() {
            if mask >> j & 1 == 1 {
                match e.capacity {
                    Capacity::Finite(c) => cost += c,
                    Capacity::Infinite => cost = f64::INFINITY,
                }
            } else {
                let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
                parent[a] = b;
            }
        }
        if cost < best && g.pairs().iter().all(|&(s, t)| find(&mut parent, s) != find(&mut parent, t)) {
            best = cost;
        }
    }
    best
}

fn suite_oracle() -> Verdict {
    let want = 100;
    let mut fails = Vec::new();
    let mut ratios = (Vec::new(), Vec::new(), Vec::new());
    let mut done = 0;
    let mut i = 0u64;
    while done < want {
        i += 1;
        let mut r = rng(0x4000 + i);
        let k = r.random_range(1..=3);
        let inst = generate_partial_ktree(&GenParams {
            n: r.random_range(k + 2..=9),
            k,
            edge_keep_prob: 0.8,
            num_pairs: r.random_range(1..=4),
            cap_range: (1, 5),
            seed: 400_000 + i,
        })
        .unwrap();
        let g = &inst.graph;
        if g.edge_count() > 18 {
            continue;
        }
        done += 1;
        let res = run_pipeline(g, &inst.td, &LengthSource::Lp { epsilon: 0.1 }).unwrap();
        let opt = exhaustive(g);
        let bb = brute_force_multicut(g, 18).unwrap();
        let flow = res.flow.as_ref().map_or(0.0, |f| f.total);
        let gvy = gvy_multicut(g, &res.fractional).unwrap().cut.cost;
        let kp = g.pairs().len() as f64;
        let gvy_bound = 4.0 * (kp + 1.0).ln() * res.fractional.cost;
        let checks = [
            ("branch and bound = exhaustive", (bb.cost - opt).abs() <= 1e-9),
            ("flow ≤ OPT", flow <= opt + SLACK),
            ("OPT ≤ pipeline", opt <= res.cut.cost + 1e-9),
            ("OPT ≤ gvy", opt <= gvy + 1e-9),
            ("gvy ≤ 4·ln(k+1)·F*", gvy <= gvy_bound + SLACK),
        ];
        for (what, ok) in checks {
            if !ok {
                fails.push(format!("instance {i}: {what} fails (flow {flow}, OPT {opt}, pipeline {}, gvy {gvy})", res.cut.cost));
            }
        }
        if opt > 0.0 {
            ratios.0.push(res.cut.cost / opt);
            ratios.1.push(gvy / opt);
            ratios.2.push(opt / flow.max(f64::MIN_POSITIVE));
        }
    }
    let stat = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
        let max = v.iter().copied().fold(0.0, f64::max);
        format!("mean {mean:.3} max {max:.3}")
    };
    first_failures(fails, want).map(|_| {
        format!(
            "{want} instances sandwiched; pipeline/OPT {}, gvy/OPT {}, OPT/flow {}",
            stat(&ratios.0),
            stat(&ratios.1),
            stat(&ratios.2)
        )
    })
}

/// Multi-source distances by Bellman–Ford, accumulating each path from its source.
fn bellman_ford(g: &Graph, sources: &[Vertex]) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; g.universe()];
    for &s in sources {
        d[s] = 0.0;
    }
    loop {
        let mut changed = false;
        for e in g.edges() {
            for (x, y) in [(e.u, e.v), (e.v, e.u)] {
                if d[x] + e.length < d[y] {
                    d[y] = d[x] + e.length;
                    changed = true;
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

/// Cut capacity and volume of the closed ball of radius `t`, from the definitions.
struct Raw {
    dist: Vec<f64>,
    edges: Vec<(usize, usize, f64, f64)>,
}

impl Raw {
    fn cut(&self, t: f64) -> f64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _, _)| (self.dist[u] <= t) != (self.dist[v] <= t))
            .map(|e| e.2)
            .sum()
    }

    fn vol(&self, t: f64, v0: f64, strict: bool) -> f64 {
        let within = |d: f64| if strict { d < t } else { d <= t };
        let mut vol = v0;
        for &(u, v, c, l) in &self.edges {
            let (lo, hi) = (self.dist[u].min(self.dist[v]), self.dist[u].max(self.dist[v]));
            if within(hi) {
                vol += c * l;
            } else if within(lo) {
                vol += c * (t - lo);
            }
        }
        vol
    }
}

fn suite_radius() -> Verdict {
    let count = 1000;
    let steps = 10_000;
    let mut fails = Vec::new();
    for i in 0..count {
        let mut r = rng(0x6000 + i);
        let n = r.random_range(2..=12);
        let mut seen = BTreeSet::new();
        let mut edges = Vec::new();
        for v in 1..n {
            let u = r.random_range(0..v);
            seen.insert((u, v));
            edges.push((u, v, Capacity::Finite(r.random_range(1..=5) as f64), r.random_range(0.0..=0.6)));
        }
        for _ in 0..r.random_range(0..=n) {
            let (u, v) = (r.random_range(0..n), r.random_range(0..n));
            if u < v && seen.insert((u, v)) {
                edges.push((u, v, Capacity::Finite(r.random_range(1..=5) as f64), r.random_range(0.0..=0.6)));
            }
        }
        let g = Graph::new(n, edges, Vec::new()).unwrap();
        let sources: Vec<Vertex> = (0..r.random_range(1..=3)).map(|_| r.random_range(0..n)).collect();
        let a = r.random_range(0.0..0.5);
        let b = a + r.random_range(0.05..1.0);
        let v0 = r.random_range(0.01..5.0);
        let rc = match choose_radius(&g, &sources, a, b, v0) {
            Ok(rc) => rc,
            Err(e) => {
                fails.push(format!("tuple {i}: {e}"));
                continue;
            }
        };
        let raw = Raw {
            dist: bellman_ford(&g, &sources),
            edges: g
                .edges()
                .iter()
                .map(|e| (e.u, e.v, e.capacity.finite().unwrap(), e.length))
                .collect(),
        };
        if !(rc.t >= a && rc.t < b) {
            fails.push(format!("tuple {i}: t = {} outside [{a}, {b})", rc.t));
            continue;
        }
        let k = (raw.vol(b, v0, true) / raw.vol(a, v0, false)).ln() / (b - a);
        let (cut, vol) = (raw.cut(rc.t), raw.vol(rc.t, v0, false));
        if cut > k * vol + 1e-9 * vol {
            fails.push(format!("tuple {i}: cut {cut} > {k}·{vol} at t = {}", rc.t));
            continue;
        }
        let h = (b - a) / steps as f64;
        for s in 0..steps {
            let t = a + h * s as f64;
            if t >= rc.t - h {
                break;
            }
            if raw.cut(t) <= k * raw.vol(t, v0, false) * (1.0 - 1e-9) {
                fails.push(format!("tuple {i}: grid radius {t} feasible below {}", rc.t));
                break;
            }
        }
    }
    first_failures(fails, count as usize)
        .map(|_| format!("{count} tuples certified and minimal on a {steps}-point grid"))
}

fn suite_small_cases() -> Verdict {
    let mut fails = Vec::new();
    let mut notes = Vec::new();
    let lp = LengthSource::Lp { epsilon: 0.1 };

    let (g, td) = load("path3");
    let res = run_pipeline(&g, &td, &lp).unwrap();
    let opt = brute_force_multicut(&g, 18).unwrap().cost;
    let ceiling = 136.0 * res.bound_unit();
    if !(res.cut.cost >= 1.0 && res.cut.cost <= ceiling + SLACK) {
        fails.push(format!("path cost {} outside [1, {ceiling}]", res.cut.cost));
    }
    if opt != 1.0 {
        fails.push(format!("path OPT {opt} ≠ 1"));
    }
    notes.push(format!("path cost {}", res.cut.cost));

    let (g, _) = load("star3");
    let opt = brute_force_multicut(&g, 18).unwrap().cost;
    if opt != 2.0 {
        fails.push(format!("star OPT {opt} ≠ 2"));
    }

    let (g, td) = load("nopairs");
    let res = run_pipeline(&g, &td, &lp).unwrap();
    if !res.cut.is_empty() {
        fails.push(format!("k=0 cut has {} edges", res.cut.len()));
    }

    let mut gaps = Vec::new();
    let mut two_pair: Vec<(Graph, TreeDecomposition)> = vec![load("grid-two-pairs")];
    for seed in 0..5 {
        let inst = generate_partial_ktree(&GenParams {
            n: 8,
            k: 2,
            edge_keep_prob: 0.9,
            num_pairs: 2,
            cap_range: (1, 4),
            seed: 700 + seed,
        })
        .unwrap();
        two_pair.push((inst.graph, inst.td));
    }
    for (g, td) in &two_pair {
        let res = run_pipeline(g, td, &lp).unwrap();
        let opt = brute_force_multicut(g, 24).unwrap().cost;
        let flow = res.flow.as_ref().map_or(0.0, |f| f.total);
        if flow > opt + SLACK {
            fails.push(format!("k=2 flow {flow} > OPT {opt}"));
        }
        if opt > 0.0 {
            gaps.push(format!("{:.3}", opt / flow));
        }
    }
    notes.push(format!("k=2 OPT/flow gaps [{}]", gaps.join(", ")));
    if fails.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(fails.join("; "))
    }
}

fn suite_determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let run = |threads: &str, tag: &str| {
        let out = tmp.path().join(tag);
        let status = Command::new(env!("CARGO_BIN_EXE_mcut"))
            .env_remove("MCUT_THREADS")
            .env("RUST_LOG", "error")
            .args(["bench", "--dir"])
            .arg(fixtures())
            .args(["--parallel", threads, "--out-dir"])
            .arg(&out)
            .arg("--json")
            .arg(tmp.path().join(format!("{tag}.json")))
            .status()
            .unwrap();
        (status.code(), out)
    };
    let (c1, seq) = run("1", "seq");
    let (c8, par) = run("8", "par");
    if c1 != Some(0) || c8 != Some(0) {
        return Err(format!("bench exit codes {c1:?} and {c8:?}"));
    }
    let mut names: Vec<_> = std::fs::read_dir(&seq)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let par_count = std::fs::read_dir(&par).unwrap().count();
    if names.is_empty() || par_count != names.len() {
        return Err(format!("{} sequential reports, {par_count} parallel", names.len()));
    }
    for name in &names {
        if std::fs::read(seq.join(name)).unwrap() != std::fs::read(par.join(name)).unwrap() {
            return Err(format!("{} differs", name.to_string_lossy()));
        }
    }
    let agg = |t: &str| std::fs::read(tmp.path().join(format!("{t}.json"))).unwrap();
    if agg("seq") != agg("par") {
        return Err("aggregate reports differ".into());
    }
    Ok(format!("{} per-instance reports byte-identical at 1 and 8 threads", names.len()))
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut structure = Vec::new();
    match catch_unwind(AssertUnwindSafe(suite_feasibility)) {
        Ok(s1) => {
            results.push((1, "feasibility", s1.feasibility));
            results.push((2, "cost bounds", s1.bounds));
            structure = s1.structure;
        }
        Err(_) => {
            results.push((1, "feasibility", Err("panicked".into())));
            results.push((2, "cost bounds", Err("panicked".into())));
            structure.push("suite 1 panicked".into());
        }
    }
    results.push((3, "arbitrary lengths", guarded(|| suite_arbitrary_lengths(&mut structure))));
    results.push((4, "oracle sandwich", guarded(suite_oracle)));
    let total = 700;
    results.push((
        5,
        "structural lemmas",
        first_failures(structure, total).map(|_| format!("all invariants hold on {total} instances of suites 1 and 3")),
    ));
    results.push((6, "region-growing certificate", guarded(suite_radius)));
    results.push((7, "exact small cases", guarded(suite_small_cases)));
    results.push((8, "determinism", guarded(suite_determinism)));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, name, verdict) in &results {
        match verdict {
            Ok(msg) => println!("criterion {n} ({name}): PASS {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
