//! DBSCAN over the percept history of one modality.
//!
//! A point is core when at least `min_samples` points (itself included) lie
//! within `eps`. Clusters are numbered in the order their first core point
//! appears in the input; a border point reachable from several clusters joins
//! the lowest id. Noise points are not dropped: each gets a fresh singleton id
//! after the core clusters, so every percept has a symbol.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::ScenarioConfig;
use crate::types::{FeatureVector, Modality, PerceptSymbol};

pub const DEFAULT_MIN_SAMPLES: usize = 2;
pub const DEFAULT_EPS_NOISE_MULTIPLE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanParams {
    pub eps: f64,
    pub min_samples: usize,
}

impl DbscanParams {
    pub fn new(eps: f64, min_samples: usize) -> Result<Self> {
        let p = Self { eps, min_samples };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if self.min_samples == 0 {
            return Err(Error::Config("min_samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// `eps = 3 * noise_scale * sqrt(dim)`, `min_samples = 2`.
pub fn default_params(modality: Modality, cfg: &ScenarioConfig) -> Result<DbscanParams> {
    let dim = cfg.dim(modality).ok_or(Error::NotPerceptual(modality))?;
    DbscanParams::new(
        DEFAULT_EPS_NOISE_MULTIPLE * cfg.noise_scale * (dim as f64).sqrt(),
        DEFAULT_MIN_SAMPLES,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// One label per input point; ids `>= n_core_clusters` are noise singletons.
    pub labels: Vec<usize>,
    pub n_core_clusters: usize,
}

impl ClusterAssignment {
    pub fn n_labels(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_noise(&self, point: usize) -> bool {
        self.labels[point] >= self.n_core_clusters
    }
}

fn check_dims(points: &[FeatureVector]) -> Result<()> {
    if let Some(first) = points.first() {
        let expected = first.dim();
        for (index, p) in points.iter().enumerate() {
            if p.dim() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: p.dim(),
                    index,
                });
            }
        }
    }
    Ok(())
}

pub fn dbscan(points: &[FeatureVector], params: &DbscanParams) -> Result<ClusterAssignment> {
    params.validate()?;
    check_dims(points)?;
    let n = points.len();
    let eps2 = params.eps * params.eps;

    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        neighbors[i].push(i);
        for j in i + 1..n {
            if points[i].squared_distance(&points[j]) <= eps2 {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    let is_core: Vec<bool> = neighbors
        .iter()
        .map(|nb| nb.len() >= params.min_samples)
        .collect();

    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut n_core_clusters = 0;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if !is_core[seed] || label[seed].is_some() {
            continue;
        }
        let cluster = n_core_clusters;
        n_core_clusters += 1;
        label[seed] = Some(cluster);
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            for &q in &neighbors[p] {
                if label[q].is_none() {
                    label[q] = Some(cluster);
                    if is_core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
    }

    let mut next_singleton = n_core_clusters;
    let labels = label
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                next_singleton += 1;
                next_singleton - 1
            })
        })
        .collect();
    Ok(ClusterAssignment {
        labels,
        n_core_clusters,
    })
}

/// Cluster the full history of one modality and wrap labels as symbols.
pub fn recluster_all(
    history: &[FeatureVector],
    modality: Modality,
    params: &DbscanParams,
) -> Result<Vec<PerceptSymbol>> {
    if !modality.is_perceptual() {
        return Err(Error::NotPerceptual(modality));
    }
    let assignment = dbscan(history, params)?;
    Ok(assignment
        .labels
        .into_iter()
        .map(|id| PerceptSymbol::new(modality, id))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn coincident_points_form_one_cluster() {
        let pts = vec![fv(&[1.0, 1.0]); 3];
        let a = dbscan(&pts, &DbscanParams::new(0.1, 2).unwrap()).unwrap();
        assert_eq!(a.labels, [0, 0, 0]);
        assert_eq!(a.n_core_clusters, 1);
    }

    #[test]
    fn isolated_point_gets_singleton() {
        let mut pts = vec![fv(&[0.0, 0.0]), fv(&[0.01, 0.0]), fv(&[0.0, 0.01])];
        pts.push(fv(&[50.0, 50.0]));
        let a = dbscan(&pts, &DbscanParams::new(0.1, 2).unwrap()).unwrap();
        assert_eq!(a.labels, [0, 0, 0, 1]);
        assert_eq!(a.n_core_clusters, 1);
        assert!(a.is_noise(3));
    }

    #[test]
    fn noise_ids_follow_core_ids_in_input_order() {
        let pts = vec![
            fv(&[10.0, 0.0]),
            fv(&[0.0, 0.0]),
            fv(&[0.0, 0.05]),
            fv(&[-10.0, 0.0]),
        ];
        let a = dbscan(&pts, &DbscanParams::new(0.1, 2).unwrap()).unwrap();
        assert_eq!(a.labels, [1, 0, 0, 2]);
    }

    #[test]
    fn border_point_goes_to_lowest_cluster() {
        // Cores at 0.0 and 2.0 each see four points; the point at 1.0 sees only
        // three and borders both clusters.
        let pts: Vec<FeatureVector> = [-1.0, -0.5, 0.0, 2.0, 2.5, 3.0, 1.0]
            .iter()
            .map(|&x| fv(&[x]))
            .collect();
        let a = dbscan(&pts, &DbscanParams::new(1.0, 4).unwrap()).unwrap();
        assert_eq!(a.labels, [0, 0, 0, 1, 1, 1, 0]);
        assert_eq!(a.n_core_clusters, 2);
    }

    #[test]
    fn single_point_history_is_singleton_zero() {
        let syms = recluster_all(
            &[fv(&[0.3, 0.2])],
            Modality::Color,
            &DbscanParams::new(0.5, 4).unwrap(),
        )
        .unwrap();
        assert_eq!(syms, [PerceptSymbol::new(Modality::Color, 0)]);
    }

    #[test]
    fn empty_input_is_empty_assignment() {
        let a = dbscan(&[], &DbscanParams::new(0.5, 4).unwrap()).unwrap();
        assert!(a.labels.is_empty());
        assert_eq!(a.n_core_clusters, 0);
    }

    #[test]
    fn mismatched_dimensions_error() {
        let err = dbscan(&[fv(&[0.0, 1.0]), fv(&[0.0])], &DbscanParams::new(1.0, 1).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { index: 1, .. })));
    }

    #[test]
    fn default_params_follow_noise_rule() {
        let cfg = ScenarioConfig::default();
        let s = default_params(Modality::Shape, &cfg).unwrap();
        assert!((s.eps - 3.0 * 0.05 * 8f64.sqrt()).abs() < 1e-12);
        let a = default_params(Modality::Action, &cfg).unwrap();
        assert!((a.eps - 3.0 * 0.05 * 30f64.sqrt()).abs() < 1e-12);
        for m in Modality::PERCEPTUAL {
            assert_eq!(default_params(m, &cfg).unwrap().min_samples, 2);
        }
        assert!(default_params(Modality::Auxiliary, &cfg).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(DbscanParams::new(0.0, 3).is_err());
        assert!(DbscanParams::new(1.0, 0).is_err());
    }
}
