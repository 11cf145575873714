//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use imopt::baselines::{celf, gdd, prefix_sweep, GDD_LABEL};
use imopt::community::{detect_communities, modularity, CommunityAssignment};
use imopt::graph::{DegreeStats, LoadReport};
use imopt::moea::run_nsga2;
use imopt::{Evaluator, Graph, NormalizationContext, PropagationModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CommunitySource, ExperimentConfig};
use crate::report::{
    front_rows, mask_hypervolumes, mask_names, mask_stats, read_front, write_correlation, write_front,
    write_hypervolume_table, write_json, FrontRow, RunSummary, Summary,
};
use crate::CliError;

fn core(e: imopt::Error) -> CliError {
    match e {
        imopt::Error::Config(m) => CliError::Config(m),
        other => CliError::Runtime(other.to_string()),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))
}

fn load_graph(cfg: &ExperimentConfig) -> Result<(Graph, LoadReport), CliError> {
    Graph::load_edge_list_with_report(&cfg.graph_path, cfg.directed).map_err(core)
}

fn load_communities(cfg: &ExperimentConfig, g: &Graph) -> Result<Option<CommunityAssignment>, CliError> {
    let a = match cfg.communities()? {
        None => return Ok(None),
        Some(CommunitySource::Detect(seed)) => detect_communities(g, seed),
        Some(CommunitySource::File(path)) => CommunityAssignment::load(path, g).map_err(core)?,
    };
    Ok(Some(a))
}

/// Graph, communities, model and resolved `k` of an experiment.
pub struct Problem {
    pub graph: Graph,
    pub communities: Option<CommunityAssignment>,
    pub model: PropagationModel,
    pub k: usize,
}

impl Problem {
    pub fn load(cfg: &ExperimentConfig) -> Result<Problem, CliError> {
        let model = cfg.model()?;
        let (graph, _) = load_graph(cfg)?;
        let k = cfg.k.resolve(graph.node_count())?;
        let mut communities = load_communities(cfg, &graph)?;
        if communities.as_ref().is_some_and(|a| a.community_count() < 2) {
            let needed = cfg.objectives.iter().any(|o| {
                matches!(o, imopt::Objective::Communities | imopt::Objective::Fairness)
            });
            if needed {
                return Err(CliError::Runtime(
                    "the community objectives need at least two communities".into(),
                ));
            }
            log::warn!("fewer than two communities; community scores are not reported");
            communities = None;
        }
        Ok(Problem {
            graph,
            communities,
            model,
            k,
        })
    }

    fn ctx(&self, cfg: &ExperimentConfig) -> Result<NormalizationContext, CliError> {
        NormalizationContext::new(&self.graph, self.k, cfg.tau, cfg.objectives).map_err(core)
    }
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

/// Output file names of an experiment with label `label`.
pub fn front_path(dir: &Path, label: &str, run_id: usize) -> PathBuf {
    dir.join(format!("{label}_run{run_id:03}.csv"))
}

pub fn summary_path(dir: &Path, label: &str) -> PathBuf {
    dir.join(format!("{label}_summary.json"))
}

/// Label of an optimizer experiment, e.g. `moea_I-S`.
pub fn moea_label(cfg: &ExperimentConfig) -> String {
    format!("moea_{}", cfg.objectives)
}

struct RunOutcome {
    rows: Vec<FrontRow>,
    summary: RunSummary,
}

fn finish(
    cfg: &ExperimentConfig,
    problem: &Problem,
    algorithm: &str,
    label: &str,
    outcomes: Vec<RunOutcome>,
) -> Result<Summary, CliError> {
    create_dir(&cfg.output_dir)?;
    let mut runs = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        write_front(&front_path(&cfg.output_dir, label, o.summary.run_id), &o.rows)?;
        runs.push(o.summary);
    }
    let summary = Summary {
        schema_version: crate::config::SCHEMA_VERSION,
        algorithm: algorithm.to_string(),
        objectives: cfg.objectives.to_string(),
        model: cfg.model.clone(),
        k: problem.k,
        tau: cfg.tau,
        n_sims: cfg.n_sims,
        node_count: problem.graph.node_count(),
        edge_count: problem.graph.edge_count(),
        masks: mask_names(),
        hypervolume: mask_stats(&runs),
        runs,
    };
    write_json(&summary_path(&cfg.output_dir, label), &summary)?;
    Ok(summary)
}

fn run_summary(run_id: usize, rng_seed: u64, rows: &[FrontRow], started: Instant) -> Result<RunSummary, CliError> {
    let refs: Vec<&FrontRow> = rows.iter().collect();
    Ok(RunSummary {
        run_id,
        rng_seed,
        front_size: rows.len(),
        hypervolume: mask_hypervolumes(&refs)?,
        wall_time_secs: started.elapsed().as_secs_f64(),
        ordered_seeds: None,
        evaluations: None,
    })
}

/// `runs` optimizer runs with seeds `rng_seed_base + i`.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary, CliError> {
    let problem = Problem::load(cfg)?;
    let moea = cfg.moea_config(problem.k);
    moea.validate(problem.graph.node_count()).map_err(core)?;
    problem.ctx(cfg)?;
    let seeds: Vec<(usize, u64)> = (0..cfg.runs).map(|i| (i, cfg.rng_seed_base + i as u64)).collect();
    let outcomes = with_workers(cfg.workers, || {
        seeds
            .par_iter()
            .map(|&(run_id, seed)| {
                let started = Instant::now();
                let history = run_nsga2(
                    &problem.graph,
                    problem.communities.as_ref(),
                    problem.model,
                    cfg.tau,
                    cfg.n_sims,
                    &moea,
                    seed,
                )
                .map_err(core)?;
                log::info!("run {run_id}: {} front members", history.archive.len());
                let rows = front_rows(&problem.graph, run_id, &history.archive);
                let mut summary = run_summary(run_id, seed, &rows, started)?;
                summary.evaluations = history.generations.last().map(|g| g.evaluations);
                Ok(RunOutcome { rows, summary })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;
    finish(cfg, &problem, &format!("moeim ({})", cfg.objectives), &moea_label(cfg), outcomes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Baseline {
    Gdd,
    Celf,
}

impl Baseline {
    pub fn label(self) -> &'static str {
        match self {
            Baseline::Gdd => "gdd",
            Baseline::Celf => "celf",
        }
    }
}

/// Runs a greedy baseline and sweeps its prefixes.
pub fn baseline(cfg: &ExperimentConfig, which: Baseline) -> Result<Summary, CliError> {
    let problem = Problem::load(cfg)?;
    let ctx = problem.ctx(cfg)?;
    let g = &problem.graph;
    let seeds: Vec<(usize, u64)> = (0..cfg.runs).map(|i| (i, cfg.rng_seed_base + i as u64)).collect();
    let outcomes = with_workers(cfg.workers, || {
        seeds
            .par_iter()
            .map(|&(run_id, seed)| {
                let started = Instant::now();
                let trace = match which {
                    Baseline::Gdd => gdd(g, problem.k),
                    Baseline::Celf => celf(g, problem.model, problem.k, cfg.tau, cfg.n_sims, seed),
                }
                .map_err(core)?;
                let evaluator = Evaluator::new(
                    g,
                    problem.communities.as_ref(),
                    problem.model,
                    cfg.tau,
                    cfg.n_sims,
                    seed,
                )
                .map_err(core)?;
                let front = prefix_sweep(&evaluator, &trace.ordered_seeds, ctx).map_err(core)?;
                let rows = front_rows(g, run_id, &front);
                let mut summary = run_summary(run_id, seed, &rows, started)?;
                summary.ordered_seeds = Some(trace.ordered_seeds.iter().map(|&v| g.label(v)).collect());
                summary.evaluations = Some(trace.evaluations_used);
                Ok(RunOutcome { rows, summary })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;
    let algorithm = match which {
        Baseline::Gdd => GDD_LABEL,
        Baseline::Celf => "celf",
    };
    finish(cfg, &problem, algorithm, which.label(), outcomes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub out_degree: DegreeStats,
    /// In plus out degree for directed graphs.
    pub total_degree: DegreeStats,
}

impl GraphSummary {
    fn of(g: &Graph) -> GraphSummary {
        GraphSummary {
            nodes: g.node_count(),
            edges: g.edge_count(),
            out_degree: g.degree_summary(),
            total_degree: g.total_degree_summary(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub directed: bool,
    pub input: GraphSummary,
    pub load: LoadReport,
    pub removed_outside_largest_component: usize,
    pub removed_small_communities: usize,
    pub removed_final_component: usize,
    pub output: GraphSummary,
    pub communities: Option<usize>,
    pub community_sizes: Option<Vec<usize>>,
    pub modularity: Option<f64>,
}

/// Largest weakly connected component, then community filtering, then the
/// largest component again.
pub fn preprocess(cfg: &ExperimentConfig, out: &Path) -> Result<PreprocessReport, CliError> {
    let (raw, load) = load_graph(cfg)?;
    let lwcc = raw.largest_weakly_connected_component();
    let source = cfg.communities()?;
    let assignment = match &source {
        None => None,
        Some(CommunitySource::Detect(seed)) => Some(detect_communities(&lwcc, *seed)),
        Some(CommunitySource::File(path)) => {
            let full = CommunityAssignment::load(path, &raw).map_err(core)?;
            Some(full.restrict(&raw, &lwcc).map_err(core)?)
        }
    };
    let (filtered, small) = match &assignment {
        Some(a) => {
            let small = a.nodes_in_small_communities(cfg.min_community_size);
            let g = if small.is_empty() { lwcc.clone() } else { lwcc.remove_nodes(&small).map_err(core)? };
            (g, small.len())
        }
        None => (lwcc.clone(), 0),
    };
    let graph = filtered.largest_weakly_connected_component();
    let assignment = match assignment {
        Some(a) => Some(a.restrict(&lwcc, &graph).map_err(core)?),
        None => None,
    };
    create_dir(out)?;
    graph.save_edge_list(out.join("graph.txt")).map_err(core)?;
    if let Some(a) = &assignment {
        a.save(&graph, out.join("communities.txt")).map_err(core)?;
    }
    let report = PreprocessReport {
        directed: cfg.directed,
        input: GraphSummary::of(&raw),
        load,
        removed_outside_largest_component: raw.node_count() - lwcc.node_count(),
        removed_small_communities: small,
        removed_final_component: filtered.node_count() - graph.node_count(),
        output: GraphSummary::of(&graph),
        communities: assignment.as_ref().map(|a| a.community_count()),
        community_sizes: assignment.as_ref().map(|a| a.sizes().to_vec()),
        modularity: assignment.as_ref().map(|a| modularity(&graph, a)),
    };
    write_json(&out.join("preprocess_report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub seed: u64,
    pub communities: usize,
    pub community_sizes: Vec<usize>,
    pub modularity: f64,
}

/// Detects communities on the configured graph and writes the assignment.
pub fn detect(cfg: &ExperimentConfig, seed: Option<u64>, out: &Path) -> Result<DetectionReport, CliError> {
    let (g, _) = load_graph(cfg)?;
    let seed = match (seed, cfg.communities()?) {
        (Some(s), _) => s,
        (None, Some(CommunitySource::Detect(s))) => s,
        _ => 0,
    };
    let a = detect_communities(&g, seed);
    create_dir(out)?;
    a.save(&g, out.join("communities.txt")).map_err(core)?;
    let report = DetectionReport {
        seed,
        communities: a.community_count(),
        community_sizes: a.sizes().to_vec(),
        modularity: modularity(&g, &a),
    };
    write_json(&out.join("detection_report.json"), &report)?;
    Ok(report)
}

/// Correlation matrix of the pooled fronts and the per-run hypervolume
/// table.
pub fn analyze(files: &[PathBuf], out: &Path) -> Result<[[f64; 6]; 6], CliError> {
    if files.is_empty() {
        return Err(CliError::Config("analyze needs at least one front file".into()));
    }
    let mut fronts = Vec::new();
    let mut pooled = Vec::new();
    for f in files {
        let rows = read_front(f)?;
        pooled.extend(rows.iter().cloned());
        let name = f
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| f.display().to_string());
        fronts.push((name, rows));
    }
    create_dir(out)?;
    write_hypervolume_table(&out.join("hypervolume_table.csv"), &fronts)?;
    write_correlation(&out.join("correlation.csv"), &pooled)
}
