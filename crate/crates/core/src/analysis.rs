//! Front quality and objective relationships: hypervolume in 2 to 6
//! dimensions, projections of fronts onto objective subsets, Pearson
//! correlation between objectives, and the Holm–Bonferroni step-down test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moea::sorting::{dominates, non_dominated_indices};
use crate::objectives::{NormalizationContext, Objective, ObjectiveMask, ObjectiveVector};

/// One member of a front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub seeds: Vec<usize>,
    pub objectives: ObjectiveVector,
    /// Coordinates in maximize space for `ctx.active`.
    pub point: Vec<f64>,
}

/// Mutually non-dominated seed sets with the context that normalized them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub entries: Vec<FrontEntry>,
    pub ctx: NormalizationContext,
}

impl ParetoFront {
    /// Keeps the candidates not dominated on `ctx.active`. Duplicate seed
    /// sets are kept once.
    pub fn from_candidates(
        candidates: impl IntoIterator<Item = (Vec<usize>, ObjectiveVector)>,
        ctx: NormalizationContext,
    ) -> Result<ParetoFront> {
        let mut seen = std::collections::HashSet::new();
        let mut entries = Vec::new();
        for (mut seeds, objectives) in candidates {
            seeds.sort_unstable();
            if !seen.insert(seeds.clone()) {
                continue;
            }
            let point = ctx.to_maximize_space(&objectives)?;
            entries.push(FrontEntry {
                seeds,
                objectives,
                point,
            });
        }
        let points: Vec<Vec<f64>> = entries.iter().map(|e| e.point.clone()).collect();
        let keep = non_dominated_indices(&points);
        let mut flags = vec![false; entries.len()];
        for i in keep {
            flags[i] = true;
        }
        let entries = entries
            .into_iter()
            .zip(flags)
            .filter_map(|(e, k)| k.then_some(e))
            .collect();
        Ok(ParetoFront { entries, ctx })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|e| e.point.clone()).collect()
    }

    /// Hypervolume over the active objectives.
    pub fn hypervolume(&self) -> Result<f64> {
        hypervolume(&self.points())
    }

    /// Normalized coordinates of every entry on `dims`.
    pub fn project(&self, dims: ObjectiveMask) -> Result<Vec<Vec<f64>>> {
        self.entries
            .iter()
            .map(|e| {
                dims.iter()
                    .map(|o| {
                        self.ctx.normalize(&e.objectives, o).ok_or_else(|| {
                            Error::Analysis(format!("objective {} not available on this front", o.name()))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Ok(0);
    };
    let m = first.len();
    if !(2..=6).contains(&m) {
        return Err(Error::Hypervolume(format!("dimension {m} outside 2..=6")));
    }
    for p in points {
        if p.len() != m {
            return Err(Error::Hypervolume("points of mixed dimension".into()));
        }
        if p.iter().any(|&x| !(-1e-12..=1.0 + 1e-12).contains(&x)) {
            return Err(Error::Hypervolume(format!("point {p:?} outside the unit box")));
        }
    }
    Ok(m)
}

/// Volume of the union of boxes `[0, p]` (reference point at the origin of
/// maximize space).
pub fn hypervolume(points: &[Vec<f64>]) -> Result<f64> {
    let m = check_points(points)?;
    if m == 0 {
        return Ok(0.0);
    }
    let clamped: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().map(|x| x.clamp(0.0, 1.0)).collect())
        .collect();
    let keep = non_dominated_indices(&clamped);
    let front: Vec<Vec<f64>> = keep.into_iter().map(|i| clamped[i].clone()).collect();
    Ok(wfg(front, m).clamp(0.0, 1.0))
}

fn box_volume(p: &[f64], m: usize) -> f64 {
    p[..m].iter().product()
}

/// WFG-style exclusive-volume recursion with slicing on the last coordinate.
/// Points are sorted ascending on coordinate `m - 1`; every later point then
/// reaches at least as far along that axis, so the limit set of point `i`
/// is flat in it and the recursion drops one dimension.
fn wfg(mut pts: Vec<Vec<f64>>, m: usize) -> f64 {
    match (pts.len(), m) {
        (0, _) => return 0.0,
        (_, 1) => return pts.iter().map(|p| p[0]).fold(0.0, f64::max),
        (1, _) => return box_volume(&pts[0], m),
        (_, 2) => return sweep_2d(&mut pts),
        _ => {}
    }
    let last = m - 1;
    pts.sort_by(|a, b| a[last].total_cmp(&b[last]));
    let mut total = 0.0;
    for i in 0..pts.len() {
        let p = &pts[i];
        if p[last] == 0.0 {
            continue;
        }
        let limited: Vec<Vec<f64>> = pts[i + 1..]
            .iter()
            .map(|q| (0..last).map(|j| q[j].min(p[j])).collect())
            .collect();
        let limited = reduce(limited, last);
        total += p[last] * (box_volume(p, last) - wfg(limited, last));
    }
    total
}

fn sweep_2d(pts: &mut [Vec<f64>]) -> f64 {
    pts.sort_by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
    let mut area = 0.0;
    let mut best_y = 0.0;
    for p in pts.iter() {
        if p[1] > best_y {
            area += p[0] * (p[1] - best_y);
            best_y = p[1];
        }
    }
    area
}

/// Drops dominated and zero-volume points of the first `m` coordinates.
fn reduce(pts: Vec<Vec<f64>>, m: usize) -> Vec<Vec<f64>> {
    let pts: Vec<Vec<f64>> = pts
        .into_iter()
        .filter(|p| p[..m].iter().all(|&x| x > 0.0))
        .collect();
    let mut keep = vec![true; pts.len()];
    for i in 0..pts.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..pts.len() {
            if i != j && keep[j] && weakly_dominates(&pts[j][..m], &pts[i][..m]) && (j < i || pts[j][..m] != pts[i][..m]) {
                keep[i] = false;
                break;
            }
        }
    }
    pts.into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Hypervolume of `front` projected onto `dims`, after re-extracting the
/// non-dominated subset of the projection.
pub fn subset_hypervolume(front: &ParetoFront, dims: ObjectiveMask) -> Result<f64> {
    hypervolume(&front.project(dims)?)
}

/// Sample Pearson correlation. `NaN` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Analysis(format!(
            "pearson needs two equal-length samples of size >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(f64::NAN);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation between every pair of the six normalized objectives,
/// pooling the entries of all fronts.
pub fn correlation_matrix(fronts: &[ParetoFront]) -> Result<[[f64; 6]; 6]> {
    let mut rows = Vec::new();
    for f in fronts {
        rows.extend(f.project(ObjectiveMask::ALL)?);
    }
    correlation_matrix_of_points(&rows)
}

/// Pearson matrix of pooled six-dimensional points.
pub fn correlation_matrix_of_points(rows: &[Vec<f64>]) -> Result<[[f64; 6]; 6]> {
    if rows.len() < 2 {
        return Err(Error::Analysis(format!(
            "correlation needs at least 2 pooled entries, got {}",
            rows.len()
        )));
    }
    if rows.iter().any(|r| r.len() != 6) {
        return Err(Error::Analysis("correlation needs six objectives".into()));
    }
    let cols: Vec<Vec<f64>> = (0..6).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        out[i][i] = 1.0;
        for j in i + 1..6 {
            let r = pearson(&cols[i], &cols[j])?;
            out[i][j] = r;
            out[j][i] = r;
        }
    }
    Ok(out)
}

/// Outcome of the step-down test for one hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolmDecision {
    pub label: String,
    pub p_value: f64,
    /// `alpha / (n - rank)` with 0-based rank in ascending p order.
    pub threshold: f64,
    pub reject: bool,
}

/// Holm–Bonferroni step-down procedure. Decisions are returned in ascending
/// p-value order.
pub fn holm_bonferroni(p_values: &[(String, f64)], alpha: f64) -> Result<Vec<HolmDecision>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Analysis(format!("alpha {alpha} outside (0, 1)")));
    }
    if let Some((l, p)) = p_values.iter().find(|(_, p)| !(0.0..=1.0).contains(p)) {
        return Err(Error::Analysis(format!("p-value {p} of {l} outside [0, 1]")));
    }
    let mut sorted: Vec<&(String, f64)> = p_values.iter().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let n = sorted.len();
    let mut still_rejecting = true;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, (label, p))| {
            let threshold = alpha / (n - i) as f64;
            still_rejecting = still_rejecting && *p <= threshold;
            HolmDecision {
                label: label.clone(),
                p_value: *p,
                threshold,
                reject: still_rejecting,
            }
        })
        .collect())
}

/// Whether any entry of `front` dominates another on its active objectives.
pub fn is_mutually_non_dominated(front: &ParetoFront) -> bool {
    let pts = front.points();
    !pts.iter()
        .enumerate()
        .any(|(i, a)| pts.iter().enumerate().any(|(j, b)| i != j && dominates(a, b)))
}

/// Names of the six objectives in correlation-matrix order.
pub fn objective_names() -> [&'static str; 6] {
    Objective::ALL.map(|o| o.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::Tau;

    #[test]
    fn hypervolume_reference_values() {
        assert_eq!(hypervolume(&[vec![1.0; 4]]).unwrap(), 1.0);
        assert_eq!(hypervolume(&[vec![0.0; 3]]).unwrap(), 0.0);
        let hv = hypervolume(&[vec![0.5, 0.5], vec![0.75, 0.25]]).unwrap();
        assert!((hv - 0.3125).abs() < 1e-15);
        assert_eq!(hypervolume(&[]).unwrap(), 0.0);
    }

    #[test]
    fn hypervolume_rejects_bad_input() {
        assert!(hypervolume(&[vec![0.5]]).is_err());
        assert!(hypervolume(&[vec![0.5; 7]]).is_err());
        assert!(hypervolume(&[vec![0.5, 1.5]]).is_err());
        assert!(hypervolume(&[vec![0.5, 0.5], vec![0.5, 0.5, 0.5]]).is_err());
    }

    #[test]
    fn three_dimensional_known_volume() {
        // boxes (1,.5,.5), (.5,1,.5), (.5,.5,1): each 0.25, pairwise overlaps 0.125,
        // triple overlap 0.125
        let pts = vec![vec![1.0, 0.5, 0.5], vec![0.5, 1.0, 0.5], vec![0.5, 0.5, 1.0]];
        let hv = hypervolume(&pts).unwrap();
        assert!((hv - (0.75 - 0.375 + 0.125)).abs() < 1e-15);
    }

    #[test]
    fn dominated_and_duplicate_points_do_not_count() {
        let base = vec![vec![0.3, 0.6, 0.5], vec![0.6, 0.2, 0.9]];
        let hv = hypervolume(&base).unwrap();
        let mut more = base.clone();
        more.push(vec![0.2, 0.1, 0.4]);
        more.push(vec![0.3, 0.6, 0.5]);
        assert!((hypervolume(&more).unwrap() - hv).abs() < 1e-15);
    }

    fn vector(influence: f64, seed_size: usize) -> ObjectiveVector {
        ObjectiveVector {
            influence,
            seed_size,
            communities_score: 0.5,
            fairness_score: 0.5,
            budget: seed_size,
            time: 1.0,
        }
    }

    fn ctx(active: ObjectiveMask) -> NormalizationContext {
        NormalizationContext {
            node_count: 10,
            max_seed_size: 4,
            budget_cap: 8,
            tau: Tau::Steps(2),
            active,
        }
    }

    #[test]
    fn front_construction_filters_dominated() {
        let f = ParetoFront::from_candidates(
            vec![
                (vec![1], vector(5.0, 1)),
                (vec![2, 1], vector(8.0, 2)),
                (vec![3, 4], vector(4.0, 2)),
                (vec![1, 2], vector(8.0, 2)),
            ],
            ctx("I-S".parse().unwrap()),
        )
        .unwrap();
        assert_eq!(f.len(), 2);
        assert!(is_mutually_non_dominated(&f));
        assert_eq!(f.entries[1].seeds, vec![1, 2]);
    }

    #[test]
    fn subset_hypervolume_projection() {
        let f = ParetoFront::from_candidates(
            vec![(vec![1], vector(5.0, 1)), (vec![2, 3], vector(8.0, 2))],
            ctx(ObjectiveMask::ALL),
        )
        .unwrap();
        let full = subset_hypervolume(&f, ObjectiveMask::ALL).unwrap();
        assert!((full - f.hypervolume().unwrap()).abs() < 1e-15);
        // on (C, F) both points collapse to (0.5, 0.5)
        let cf = subset_hypervolume(&f, "C-F".parse().unwrap()).unwrap();
        assert!((cf - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pearson_reference_values() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(pearson(&[1.0, 1.0], &[2.0, 3.0]).unwrap().is_nan());
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn holm_step_down() {
        let lab = |ps: &[f64]| -> Vec<(String, f64)> {
            ps.iter().enumerate().map(|(i, &p)| (format!("h{i}"), p)).collect()
        };
        let all_one = holm_bonferroni(&lab(&[1.0, 1.0]), 0.05).unwrap();
        assert!(all_one.iter().all(|d| !d.reject));

        let d = holm_bonferroni(&lab(&[0.04, 0.001, 0.02]), 0.05).unwrap();
        assert_eq!(d.iter().map(|d| d.label.as_str()).collect::<Vec<_>>(), vec!["h1", "h2", "h0"]);
        assert!(d.iter().all(|d| d.reject));
        assert!((d[0].threshold - 0.05 / 3.0).abs() < 1e-15);
        assert!((d[1].threshold - 0.025).abs() < 1e-15);

        let d = holm_bonferroni(&lab(&[0.03, 0.04]), 0.05).unwrap();
        assert!(d.iter().all(|d| !d.reject));
        assert!(holm_bonferroni(&lab(&[0.5]), 1.5).is_err());
    }
}
