//! Acceptance checks. Prints one line per criterion. A failed criterion is
//! reported but only makes the process exit non-zero in strict mode.
//!
//! Environment:
//! - `IMOPT_DATA_DIR`: directory holding `email-Eu-core.txt` (SNAP edge
//!   list) and `jazz.txt` (undirected edge list). Criteria on these
//!   datasets are reported as NOT VERIFIED when the files are missing,
//!   together with the outcome on a synthetic stand-in.
//! - `IMOPT_ACCEPTANCE_FULL=1`: run the synthetic experiments at the
//!   dataset's size instead of the reduced default.
//! - `IMOPT_ACCEPTANCE_ONLY=7,9`: run only the listed criteria.
//! - `IMOPT_ACCEPTANCE_STRICT=1`: exit with status 1 if any criterion fails.

mod support;

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use imopt::analysis::{correlation_matrix, hypervolume, subset_hypervolume};
use imopt::baselines::exhaustive_greedy;
use imopt::moea::{fast_nondominated_sort, MoeaConfig, RunHistory};
use imopt::objectives::{jsd, jsd_normalized};
use imopt::{
    celf, gdd, monte_carlo, prefix_sweep, run_nsga2, CommunityAssignment, Evaluator, Graph,
    NormalizationContext, ObjectiveMask, PropagationModel, Tau,
};
use imopt_cli::commands::{preprocess, Problem};
use imopt_cli::config::ExperimentConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    NotVerified,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: impl Into<String>) -> Outcome {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    fn unverified(detail: impl Into<String>) -> Outcome {
        Outcome {
            status: Status::NotVerified,
            detail: detail.into(),
        }
    }
}

fn full_scale() -> bool {
    std::env::var("IMOPT_ACCEPTANCE_FULL").is_ok_and(|v| v == "1")
}

fn data_file(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os("IMOPT_DATA_DIR")?;
    let p = Path::new(&dir).join(name);
    p.is_file().then_some(p)
}

fn mask(mask: &str) -> ObjectiveMask {
    mask.parse().unwrap()
}

// ---------------------------------------------------------------- 1

fn reach(n: usize, live: &[(usize, usize)], seeds: &[usize], tau: Option<u32>) -> usize {
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for &s in seeds {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if tau.is_some_and(|t| dist[u] >= t) {
            continue;
        }
        for &(a, b) in live {
            if a == u && dist[b] == u32::MAX {
                dist[b] = dist[u] + 1;
                queue.push_back(b);
            }
        }
    }
    dist.iter().filter(|&&d| d != u32::MAX).count()
}

/// Mean and variance of the activated count over all live-arc worlds.
fn enumerate_worlds(g: &Graph, model: PropagationModel, seeds: &[usize], tau: Option<u32>) -> (f64, f64) {
    let arcs: Vec<(usize, usize)> = (0..g.node_count())
        .flat_map(|u| g.out_neighbors(u).iter().map(move |&v| (u, v)))
        .collect();
    let prob: Vec<f64> = arcs
        .iter()
        .map(|&(_, v)| match model {
            PropagationModel::IndependentCascade { p } => p,
            _ => 1.0 / g.in_degree(v) as f64,
        })
        .collect();
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut live = Vec::with_capacity(arcs.len());
    for world in 0u32..(1 << arcs.len()) {
        let mut w = 1.0;
        live.clear();
        for (i, &arc) in arcs.iter().enumerate() {
            if world >> i & 1 == 1 {
                w *= prob[i];
                live.push(arc);
            } else {
                w *= 1.0 - prob[i];
            }
        }
        let x = reach(g.node_count(), &live, seeds, tau) as f64;
        m1 += w * x;
        m2 += w * x * x;
    }
    (m1, (m2 - m1 * m1).max(0.0))
}

fn c1_propagation() -> Outcome {
    let start = Instant::now();
    let n_sims = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..50 {
        let nodes = rng.random_range(3..=8);
        let arcs = rng.random_range(1..=12usize);
        let g = support::random_digraph(&mut rng, nodes, arcs);
        let seeds = vec![rng.random_range(0..nodes)];
        let tau = if i % 2 == 0 { None } else { Some(2) };
        let p = rng.random_range(0.1..0.9);
        for model in [PropagationModel::IndependentCascade { p }, PropagationModel::WeightedCascade] {
            let (mean, var) = enumerate_worlds(&g, model, &seeds, tau);
            let t = tau.map_or(Tau::Unbounded, Tau::Steps);
            let mc = monte_carlo(&g, model, &seeds, t, n_sims, 1000 + i, None).mean_influence;
            let se = (var / n_sims as f64).sqrt();
            if se == 0.0 {
                if (mc - mean).abs() > 1e-9 {
                    failures += 1;
                }
                continue;
            }
            let z = (mc - mean).abs() / se;
            worst = worst.max(z);
            if z > 4.0 {
                failures += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::check(
        failures == 0 && secs < 120.0,
        format!("100 cases (50 graphs x IC/WC), max |z| = {worst:.2} (< 4), {failures} outside, {secs:.1} s (< 120 s)"),
    )
}

// ---------------------------------------------------------------- 2

fn entropy2(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// JSD through entropies: H((P+Q)/2) - (H(P) + H(Q)) / 2.
fn jsd_direct(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a + b) / 2.0).collect();
    entropy2(&m) - (entropy2(p) + entropy2(q)) / 2.0
}

fn random_distribution(rng: &mut ChaCha8Rng, c: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..c)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut v = vec![0.0; c];
        v[rng.random_range(0..c)] = 1.0;
        return v;
    }
    raw.iter().map(|x| x / total).collect()
}

fn c2_jsd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let c = rng.random_range(2..=10);
        let p = random_distribution(&mut rng, c);
        let q = random_distribution(&mut rng, c);
        worst = worst.max((jsd(&p, &q).unwrap() - jsd_direct(&p, &q)).abs());
        let u = vec![1.0 / c as f64; c];
        let mut e = vec![0.0; c];
        e[0] = 1.0;
        let expected = jsd_direct(&p, &u) / jsd_direct(&e, &u);
        worst = worst.max((jsd_normalized(&p, c).unwrap() - expected).abs());
    }
    let mut exact = true;
    for c in 2..=10 {
        exact &= jsd_normalized(&vec![1.0 / c as f64; c], c).unwrap() == 0.0;
        for hot in 0..c {
            let mut e = vec![0.0; c];
            e[hot] = 1.0;
            exact &= jsd_normalized(&e, c).unwrap() == 1.0;
        }
    }
    Outcome::check(
        worst <= 1e-9 && exact,
        format!("1000 distributions, max deviation {worst:.1e} (<= 1e-9), boundary cases exact: {exact}"),
    )
}

// ---------------------------------------------------------------- 3

fn brute_force_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let dominates = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y);
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn c3_sorting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for case in 0..1000 {
        let n = rng.random_range(1..=50);
        let m = rng.random_range(2..=6);
        let grid = case % 2 == 0;
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| if grid { rng.random_range(0..4) as f64 } else { rng.random::<f64>() })
                    .collect()
            })
            .collect();
        let mut got = fast_nondominated_sort(&points);
        for f in &mut got {
            f.sort_unstable();
        }
        if got != brute_force_fronts(&points) {
            mismatches += 1;
        }
    }
    Outcome::check(mismatches == 0, format!("1000 instances, {mismatches} mismatches"))
}

// ---------------------------------------------------------------- 4

fn inclusion_exclusion(points: &[Vec<f64>]) -> f64 {
    let m = points[0].len();
    let mut total = 0.0;
    for subset in 1u32..(1 << points.len()) {
        let members: Vec<&Vec<f64>> = (0..points.len()).filter(|i| subset >> i & 1 == 1).map(|i| &points[i]).collect();
        let vol: f64 = (0..m)
            .map(|d| members.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min))
            .product();
        total += if members.len() % 2 == 1 { vol } else { -vol };
    }
    total
}

fn c4_hypervolume() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_ie: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(2..=6);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect();
        worst_ie = worst_ie.max((hypervolume(&pts).unwrap() - inclusion_exclusion(&pts)).abs());
    }
    let samples = 1_000_000;
    let mut worst_z: f64 = 0.0;
    for m in 2..=6 {
        for _ in 0..2 {
            let n = rng.random_range(3..=10);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.random_range(0.3..1.0)).collect())
                .collect();
            let hv = hypervolume(&pts).unwrap();
            let mut x = vec![0.0; m];
            let mut hits = 0u64;
            for _ in 0..samples {
                for xi in x.iter_mut() {
                    *xi = rng.random::<f64>();
                }
                if pts.iter().any(|p| p.iter().zip(&x).all(|(a, b)| b <= a)) {
                    hits += 1;
                }
            }
            let est = hits as f64 / samples as f64;
            let sigma = (hv * (1.0 - hv) / samples as f64).sqrt();
            worst_z = worst_z.max((est - hv).abs() / sigma);
        }
    }
    Outcome::check(
        worst_ie <= 1e-12 && worst_z <= 3.0,
        format!(
            "inclusion-exclusion max deviation {worst_ie:.1e} (<= 1e-12); Monte Carlo max |z| = {worst_z:.2} (<= 3) over m = 2..6"
        ),
    )
}

// ---------------------------------------------------------------- 5

fn c5_celf() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases = 0;
    let mut mismatches = 0;
    let mut lt_mismatches = 0;
    let mut lt_cases = 0;
    for i in 0..60u64 {
        let n = rng.random_range(4..=30);
        let arcs = rng.random_range(n..=4 * n);
        let g = support::random_digraph(&mut rng, n, arcs);
        for model in [
            PropagationModel::IndependentCascade { p: 0.1 },
            PropagationModel::IndependentCascade { p: 0.3 },
            PropagationModel::WeightedCascade,
        ] {
            for k in 1..=3usize.min(n) {
                let tau = if i % 3 == 0 { Tau::Steps(2) } else { Tau::Unbounded };
                let a = celf(&g, model, k, tau, 100, i).unwrap();
                let b = exhaustive_greedy(&g, model, k, tau, 100, i).unwrap();
                cases += 1;
                if a.ordered_seeds != b.ordered_seeds {
                    mismatches += 1;
                }
            }
        }
        let lt = PropagationModel::LinearThreshold { low: 0.3, high: 0.6 };
        let a = celf(&g, lt, 3.min(n), Tau::Unbounded, 100, i).unwrap();
        let b = exhaustive_greedy(&g, lt, 3.min(n), Tau::Unbounded, 100, i).unwrap();
        lt_cases += 1;
        if a.ordered_seeds != b.ordered_seeds {
            lt_mismatches += 1;
        }
    }
    Outcome::check(
        mismatches == 0,
        format!(
            "IC/WC: {cases} cases (60 graphs <= 30 nodes, k = 1..3), {mismatches} mismatches; LT (not submodular, informative): {lt_mismatches}/{lt_cases} differ"
        ),
    )
}

// ---------------------------------------------------------------- shared experiment helpers

struct Setting {
    pop: usize,
    generations: usize,
    n_sims: usize,
}

fn moea_config(k: usize, mask: ObjectiveMask, s: &Setting) -> MoeaConfig {
    let mut cfg = MoeaConfig::new(k, mask);
    cfg.population_size = s.pop;
    cfg.offspring_size = s.pop;
    cfg.generations = s.generations;
    cfg
}

/// Email-like directed stand-in: heavy-tailed degrees, seven blocks.
fn email_like(nodes: usize, arcs: usize) -> (Graph, CommunityAssignment) {
    let (g, a) = support::dc_sbm(nodes, 7, arcs, 0.8, 1);
    support::lwcc(&g, &a)
}

/// Preprocessed real dataset: LWCC, detected communities, small ones
/// dropped.
fn load_dataset(path: &Path, directed: bool, model: &str, k: usize) -> (Graph, Option<CommunityAssignment>, usize) {
    let work = tempfile::tempdir().unwrap();
    let cfg_json = serde_json::json!({
        "schema_version": 1,
        "graph_path": path,
        "directed": directed,
        "community_source": "detect:0",
        "model": model,
        "objectives": "I-S",
        "k": k,
        "tau": 5,
        "n_sims": 100,
        "output_dir": work.path(),
    });
    let cfg_path = work.path().join("config.json");
    std::fs::write(&cfg_path, cfg_json.to_string()).unwrap();
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    preprocess(&cfg, work.path()).unwrap();
    let mut cfg = cfg;
    cfg.graph_path = work.path().join("graph.txt");
    cfg.community_source = Some(format!("file:{}", work.path().join("communities.txt").display()));
    let p = Problem::load(&cfg).unwrap();
    (p.graph, p.communities, p.k)
}

/// Runs where the I-S optimizer beats the degree-discount prefixes on
/// HV_IS, both evaluated with the run's Monte Carlo seed.
fn moeim_vs_gdd(g: &Graph, k: usize, s: &Setting, runs: u64) -> (usize, Vec<(f64, f64)>) {
    let is = mask("I-S");
    let wc = PropagationModel::WeightedCascade;
    let tau = Tau::Steps(5);
    let order = gdd(g, k).unwrap().ordered_seeds;
    let pairs: Vec<(f64, f64)> = (0..runs)
        .into_par_iter()
        .map(|seed| {
            let h = run_nsga2(g, None, wc, tau, s.n_sims, &moea_config(k, is, s), seed).unwrap();
            let ev = Evaluator::new(g, None, wc, tau, s.n_sims, h.evaluation_seed).unwrap();
            let ctx = NormalizationContext::new(g, k, tau, is).unwrap();
            let base = prefix_sweep(&ev, &order, ctx).unwrap();
            (
                subset_hypervolume(&h.archive, is).unwrap(),
                subset_hypervolume(&base, is).unwrap(),
            )
        })
        .collect();
    (pairs.iter().filter(|(a, b)| a > b).count(), pairs)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

// ---------------------------------------------------------------- 6

fn c6_email_is() -> Outcome {
    let paper = Setting { pop: 100, generations: 100, n_sims: 100 };
    if let Some(path) = data_file("email-Eu-core.txt") {
        let start = Instant::now();
        let (g, _, _) = load_dataset(&path, true, "wc", 100);
        let (wins, pairs) = moeim_vs_gdd(&g, 100, &paper, 10);
        let secs = start.elapsed().as_secs_f64();
        return Outcome::check(
            wins >= 7 && secs <= 3600.0,
            format!(
                "email-eu-Core ({} nodes): MOEIM(I-S) beats GDD in {wins}/10 runs (>= 7), mean HV_IS {:.4} vs {:.4}, {secs:.0} s",
                g.node_count(),
                mean(pairs.iter().map(|p| p.0)),
                mean(pairs.iter().map(|p| p.1)),
            ),
        );
    }
    let (nodes, arcs, k, s) = if full_scale() {
        (1005, 25_552, 100, paper)
    } else {
        (400, 8_000, 40, Setting { pop: 100, generations: 50, n_sims: 50 })
    };
    let start = Instant::now();
    let (g, _) = email_like(nodes, arcs);
    let (wins, pairs) = moeim_vs_gdd(&g, k, &s, 10);
    Outcome::unverified(format!(
        "email-eu-Core not found in IMOPT_DATA_DIR; synthetic stand-in ({} nodes, {} arcs, k = {k}, {} generations): MOEIM(I-S) beats GDD in {wins}/10 runs, mean HV_IS {:.4} vs {:.4}, {:.0} s",
        g.node_count(),
        g.arc_count(),
        s.generations,
        mean(pairs.iter().map(|p| p.0)),
        mean(pairs.iter().map(|p| p.1)),
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 7 and 9

/// HV_all of each evaluation-mask configuration for seeds 0..runs, and
/// the "all" archives.
fn six_configurations(
    g: &Graph,
    a: &CommunityAssignment,
    k: usize,
    s: &Setting,
    runs: u64,
) -> (Vec<[f64; 6]>, Vec<RunHistory>) {
    let masks = ObjectiveMask::evaluation_masks();
    let wc = PropagationModel::WeightedCascade;
    let jobs: Vec<(u64, usize)> = (0..runs).flat_map(|seed| (0..6).map(move |m| (seed, m))).collect();
    let results: Vec<(u64, usize, f64, RunHistory)> = jobs
        .into_par_iter()
        .map(|(seed, m)| {
            let h = run_nsga2(g, Some(a), wc, Tau::Steps(5), s.n_sims, &moea_config(k, masks[m], s), seed).unwrap();
            let hv = subset_hypervolume(&h.archive, ObjectiveMask::ALL).unwrap();
            (seed, m, hv, h)
        })
        .collect();
    let mut table = vec![[0.0; 6]; runs as usize];
    let mut all_runs = Vec::new();
    for (seed, m, hv, h) in results {
        table[seed as usize][m] = hv;
        if m == 5 {
            all_runs.push(h);
        }
    }
    (table, all_runs)
}

fn c7_and_c9() -> (Outcome, Outcome) {
    let (nodes, arcs, k, s) = if full_scale() {
        (1005, 25_552, 100, Setting { pop: 100, generations: 100, n_sims: 100 })
    } else {
        (300, 6_000, 30, Setting { pop: 60, generations: 60, n_sims: 30 })
    };
    let start = Instant::now();
    let (g, a) = email_like(nodes, arcs);
    let (table, all_runs) = six_configurations(&g, &a, k, &s, 10);
    let wins = table.iter().filter(|row| row[..5].iter().all(|&x| row[5] >= x)).count();
    let means: Vec<String> = (0..6).map(|m| format!("{:.2e}", mean(table.iter().map(|r| r[m])))).collect();
    let c7 = Outcome::check(
        wins >= 8,
        format!(
            "synthetic WC graph ({} nodes, {} arcs, k = {k}, {} generations): MOEIM(all) has the highest HV_all in {wins}/10 seeds (>= 8); mean HV_all by configuration [I-S, I-S-C, I-S-F, I-S-B, I-S-T, all] = [{}], {:.0} s",
            g.node_count(),
            g.arc_count(),
            s.generations,
            means.join(", "),
            start.elapsed().as_secs_f64()
        ),
    );

    let c9 = if let Some(path) = data_file("email-Eu-core.txt") {
        let (g, a, _) = load_dataset(&path, true, "wc", 100);
        let a = a.expect("detected communities");
        let paper = Setting { pop: 100, generations: 100, n_sims: 100 };
        let fronts: Vec<_> = (0..10u64)
            .into_par_iter()
            .map(|seed| {
                run_nsga2(&g, Some(&a), PropagationModel::WeightedCascade, Tau::Steps(5), 100, &moea_config(100, ObjectiveMask::ALL, &paper), seed)
                    .unwrap()
                    .archive
            })
            .collect();
        let r = correlation_matrix(&fronts).unwrap()[2][3];
        Outcome::check(r > 0.5, format!("email-eu-Core, 10 pooled MOEIM(all) fronts: pearson(C, F) = {r:.3} (> 0.5)"))
    } else {
        let fronts: Vec<_> = all_runs.into_iter().map(|h| h.archive).collect();
        let r = correlation_matrix(&fronts).unwrap()[2][3];
        Outcome::unverified(format!(
            "email-eu-Core not found in IMOPT_DATA_DIR; synthetic stand-in of criterion 7, 10 pooled MOEIM(all) fronts: pearson(C, F) = {r:.3}"
        ))
    };
    (c7, c9)
}

// ---------------------------------------------------------------- 8

/// Best (smallest) seed size reaching 95% of the nodes over 10 I-S runs.
fn jazz_check(g: &Graph, s: &Setting) -> Option<usize> {
    let n = g.node_count();
    let k = ((0.2 * n as f64).round() as usize).max(1);
    let lt = PropagationModel::LinearThreshold { low: 0.3, high: 0.6 };
    (0..10u64)
        .into_par_iter()
        .filter_map(|seed| {
            let h = run_nsga2(g, None, lt, Tau::Steps(5), s.n_sims, &moea_config(k, mask("I-S"), s), seed).unwrap();
            h.archive
                .entries
                .iter()
                .filter(|e| e.objectives.influence >= 0.95 * n as f64)
                .map(|e| e.seeds.len())
                .min()
        })
        .min()
}

fn c8_jazz() -> Outcome {
    let s = Setting { pop: 100, generations: 100, n_sims: 100 };
    let start = Instant::now();
    let describe = |best: Option<usize>, n: usize| match best {
        Some(b) => format!("smallest seed set reaching 95% of {n} nodes has {b} nodes (<= {:.1})", 0.15 * n as f64),
        None => format!("no front member reaches 95% of {n} nodes"),
    };
    if let Some(path) = data_file("jazz.txt") {
        let g = Graph::load_edge_list(&path, false).unwrap().largest_weakly_connected_component();
        let n = g.node_count();
        let best = jazz_check(&g, &s);
        let secs = start.elapsed().as_secs_f64();
        let ok = best.is_some_and(|b| b as f64 <= 0.15 * n as f64) && secs <= 900.0;
        return Outcome::check(ok, format!("jazz, LT [0.3, 0.6], best of 10: {}, {secs:.0} s", describe(best, n)));
    }
    let g = support::jazz_like(3);
    let quick = Setting { pop: 100, generations: if full_scale() { 100 } else { 30 }, n_sims: 100 };
    let best = jazz_check(&g, &quick);
    Outcome::unverified(format!(
        "jazz not found in IMOPT_DATA_DIR; synthetic stand-in ({} nodes, {} edges, {} generations), best of 10: {}, {:.0} s",
        g.node_count(),
        g.edge_count(),
        quick.generations,
        describe(best, g.node_count()),
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 10

fn imopt(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_imopt")).args(args).status().unwrap();
    assert!(status.success(), "imopt {args:?} failed");
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "txt"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c10_determinism() -> Outcome {
    let work = tempfile::tempdir().unwrap();
    let (g, a) = email_like(120, 1_200);
    g.save_edge_list(work.path().join("graph.txt")).unwrap();
    a.save(&g, work.path().join("communities.txt")).unwrap();
    let cfg = serde_json::json!({
        "schema_version": 1,
        "graph_path": "graph.txt",
        "directed": true,
        "community_source": "file:communities.txt",
        "model": "wc",
        "objectives": "all",
        "k": 10,
        "tau": 3,
        "n_sims": 20,
        "moea": {"population_size": 20, "offspring_size": 20, "generations": 5},
        "runs": 2,
        "rng_seed_base": 7,
        "output_dir": "out",
        "min_community_size": 5,
    });
    let cfg_path = work.path().join("config.json");
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let c = cfg_path.to_str().unwrap();
    let mut outputs = Vec::new();
    for (rep, workers) in [(0, "1"), (1, "1"), (2, "4")] {
        let out = work.path().join(format!("rep{rep}"));
        let o = out.to_str().unwrap();
        imopt(&["preprocess", "--config", c, "--output", &format!("{o}/pre")]);
        imopt(&["detect-communities", "--config", c, "--output", &format!("{o}/det"), "--seed", "3"]);
        imopt(&["run", "--config", c, "--output", o, "--workers", workers]);
        imopt(&["baseline", "gdd", "--config", c, "--output", o]);
        imopt(&["baseline", "celf", "--config", c, "--output", o]);
        let mut files = csv_files(&out);
        files.extend(csv_files(&out.join("pre")));
        files.extend(csv_files(&out.join("det")));
        outputs.push(files);
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    Outcome::check(
        identical && !outputs[0].is_empty(),
        format!(
            "preprocess, detect-communities, run (1 and 4 workers) and both baselines repeated 3 times: {} output files, byte-identical: {identical}",
            outputs[0].len()
        ),
    )
}

fn main() {
    let names = [
        "propagation oracle",
        "JSD correctness",
        "sorting oracle",
        "hypervolume geometry",
        "CELF equals greedy",
        "email-eu-Core I-S vs GDD",
        "all-objective dominance",
        "jazz LT seed size",
        "C/F correlation",
        "determinism",
    ];
    println!(
        "acceptance ({} scale)",
        if full_scale() { "full" } else { "reduced" }
    );
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut record = |id: usize, o: Outcome| {
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotVerified => "NOT VERIFIED",
        };
        println!("criterion {id:>2} [{tag}] {}: {}", names[id - 1], o.detail);
        results.push((id, o));
    };
    let only: Option<Vec<usize>> = std::env::var("IMOPT_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |id: usize| only.as_ref().is_none_or(|ids| ids.contains(&id));
    let checks: [(usize, fn() -> Outcome); 8] = [
        (1, c1_propagation),
        (2, c2_jsd),
        (3, c3_sorting),
        (4, c4_hypervolume),
        (5, c5_celf),
        (6, c6_email_is),
        (8, c8_jazz),
        (10, c10_determinism),
    ];
    let mut pending_c9 = None;
    for id in 1..=10 {
        if id == 7 && (wanted(7) || wanted(9)) {
            let (c7, c9) = c7_and_c9();
            if wanted(7) {
                record(7, c7);
            }
            pending_c9 = Some(c9);
        } else if id == 9 {
            if let Some(c9) = pending_c9.take().filter(|_| wanted(9)) {
                record(9, c9);
            }
        } else if let Some(&(_, check)) = checks.iter().find(|(i, _)| *i == id).filter(|_| wanted(id)) {
            record(id, check());
        }
    }
    let failed: Vec<usize> = results.iter().filter(|(_, o)| o.status == Status::Fail).map(|(i, _)| *i).collect();
    let unverified = results.iter().filter(|(_, o)| o.status == Status::NotVerified).count();
    println!(
        "summary: {} passed, {} failed, {unverified} not verified",
        results.len() - failed.len() - unverified,
        failed.len()
    );
    if !failed.is_empty() && std::env::var("IMOPT_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
