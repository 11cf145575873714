//! Front CSVs, run summaries and analysis tables.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use imopt::analysis::{correlation_matrix_of_points, hypervolume, objective_names, ParetoFront};
use imopt::{Graph, ObjectiveMask};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One line of a front CSV: raw objective values, then normalized ones.
/// Missing values are empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub run_id: usize,
    /// Original labels joined by `;`.
    pub seed_nodes: String,
    pub influence: f64,
    pub seed_size: usize,
    pub communities: Option<f64>,
    pub fairness: Option<f64>,
    pub budget: usize,
    pub time: f64,
    pub n_influence: Option<f64>,
    pub n_seed_size: Option<f64>,
    pub n_communities: Option<f64>,
    pub n_fairness: Option<f64>,
    pub n_budget: Option<f64>,
    pub n_time: Option<f64>,
}

impl FrontRow {
    pub fn normalized(&self) -> [Option<f64>; 6] {
        [
            self.n_influence,
            self.n_seed_size,
            self.n_communities,
            self.n_fairness,
            self.n_budget,
            self.n_time,
        ]
    }

    /// Normalized coordinates on `mask`; `None` if any is missing.
    pub fn project(&self, mask: ObjectiveMask) -> Option<Vec<f64>> {
        let all = self.normalized();
        mask.iter()
            .map(|o| all[imopt::Objective::ALL.iter().position(|&x| x == o).expect("listed")])
            .collect()
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Rows for every entry of `front`, in the front's order.
pub fn front_rows(g: &Graph, run_id: usize, front: &ParetoFront) -> Vec<FrontRow> {
    front
        .entries
        .iter()
        .map(|e| {
            let v = &e.objectives;
            let [ni, ns, nc, nf, nb, nt] = front.ctx.normalize_all(v);
            FrontRow {
                run_id,
                seed_nodes: e
                    .seeds
                    .iter()
                    .map(|&s| g.label(s).to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                influence: v.influence,
                seed_size: v.seed_size,
                communities: finite(v.communities_score),
                fairness: finite(v.fairness_score),
                budget: v.budget,
                time: v.time,
                n_influence: ni,
                n_seed_size: ns,
                n_communities: nc,
                n_fairness: nf,
                n_budget: nb,
                n_time: nt,
            }
        })
        .collect()
}

pub fn write_front(path: &Path, rows: &[FrontRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    if rows.is_empty() {
        // keep the header even for empty fronts
        w.write_record([
            "run_id", "seed_nodes", "influence", "seed_size", "communities", "fairness", "budget", "time",
            "n_influence", "n_seed_size", "n_communities", "n_fairness", "n_budget", "n_time",
        ])
        .map_err(io)?;
    }
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn read_front(path: &Path) -> Result<Vec<FrontRow>, CliError> {
    let io = |e: csv::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    r.deserialize().map(|row| row.map_err(io)).collect()
}

/// Hypervolume of the rows of one run on `mask`; `None` when a coordinate
/// is unavailable.
pub fn rows_hypervolume(rows: &[&FrontRow], mask: ObjectiveMask) -> Result<Option<f64>, CliError> {
    let Some(points) = rows.iter().map(|r| r.project(mask)).collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    hypervolume(&points)
        .map(Some)
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Per-mask hypervolumes of one run, in the order of
/// [`ObjectiveMask::evaluation_masks`].
pub fn mask_hypervolumes(rows: &[&FrontRow]) -> Result<Vec<Option<f64>>, CliError> {
    ObjectiveMask::evaluation_masks()
        .into_iter()
        .map(|m| rows_hypervolume(rows, m))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: usize,
    pub rng_seed: u64,
    pub front_size: usize,
    /// Aligned with the summary's `masks`.
    pub hypervolume: Vec<Option<f64>>,
    pub wall_time_secs: f64,
    /// Baseline selection order (original labels).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordered_seeds: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskStats {
    pub mask: String,
    pub mean: Option<f64>,
    /// Population standard deviation across runs.
    pub std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub algorithm: String,
    pub objectives: String,
    pub model: String,
    pub k: usize,
    pub tau: imopt::Tau,
    pub n_sims: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub masks: Vec<String>,
    pub runs: Vec<RunSummary>,
    pub hypervolume: Vec<MaskStats>,
}

/// Mean and population standard deviation; `None` if any value is missing.
pub fn mean_std(values: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let Some(xs) = values.iter().copied().collect::<Option<Vec<f64>>>() else {
        return (None, None);
    };
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

pub fn mask_stats(runs: &[RunSummary]) -> Vec<MaskStats> {
    ObjectiveMask::evaluation_masks()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let values: Vec<Option<f64>> = runs.iter().map(|r| r.hypervolume[i]).collect();
            let (mean, std) = mean_std(&values);
            MaskStats {
                mask: m.to_string(),
                mean,
                std,
            }
        })
        .collect()
}

pub fn mask_names() -> Vec<String> {
    ObjectiveMask::evaluation_masks().iter().map(|m| m.to_string()).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Pearson matrix of the pooled normalized objectives of `rows`.
pub fn write_correlation(path: &Path, rows: &[FrontRow]) -> Result<[[f64; 6]; 6], CliError> {
    let points: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.project(ObjectiveMask::ALL))
        .collect::<Option<_>>()
        .ok_or_else(|| {
            CliError::Config("correlation needs all six normalized objectives on every row".into())
        })?;
    let m = correlation_matrix_of_points(&points).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut f = File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let names = objective_names();
    let mut text = format!("objective,{}\n", names.join(","));
    for (i, row) in m.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        text += &format!("{},{}\n", names[i], cells.join(","));
    }
    f.write_all(text.as_bytes())
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(m)
}

/// One line per (file, run) with the hypervolume of every evaluation mask.
pub fn write_hypervolume_table(path: &Path, fronts: &[(String, Vec<FrontRow>)]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let mut header = vec!["file".to_string(), "run_id".to_string()];
    header.extend(mask_names());
    w.write_record(&header).map_err(io)?;
    for (name, rows) in fronts {
        let mut ids: Vec<usize> = rows.iter().map(|r| r.run_id).collect();
        ids.sort_unstable();
        ids.dedup();
        for id in ids {
            let run: Vec<&FrontRow> = rows.iter().filter(|r| r.run_id == id).collect();
            let mut record = vec![name.clone(), id.to_string()];
            record.extend(mask_hypervolumes(&run)?.into_iter().map(fmt_opt));
            w.write_record(&record).map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}
