use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::metrics::{Metrics, ModelKind, SplitSpec};
use crate::types::Modality;

/// Mean and population standard deviation over `n` runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Some(Self {
            mean,
            std: var.sqrt(),
            n: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// Number of training situations observed so far.
    pub situations: usize,
    pub correct: Stat,
    #[serde(rename = "false")]
    pub false_mappings: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub n_runs: usize,
    pub per_word: BTreeMap<String, Stat>,
    pub per_modality: BTreeMap<Modality, Stat>,
    pub sentence: Option<Stat>,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

fn collect<K: Ord + Clone>(maps: impl Iterator<Item = impl IntoIterator<Item = (K, f64)>>) -> BTreeMap<K, Stat> {
    let mut values: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for map in maps {
        for (k, v) in map {
            values.entry(k).or_default().push(v);
        }
    }
    values
        .into_iter()
        .filter_map(|(k, v)| Stat::of(&v).map(|s| (k, s)))
        .collect()
}

/// Elementwise mean/std across runs; a run without an entry does not count
/// towards that entry. `None` for an empty slice.
pub fn aggregate(runs: &[Metrics]) -> Option<ModelSummary> {
    if runs.is_empty() {
        return None;
    }
    let per_word = collect(runs.iter().map(|r| r.evaluation.per_word_accuracy.clone()));
    let per_modality = collect(runs.iter().map(|r| r.evaluation.per_modality_accuracy.clone()));
    let sentences: Vec<f64> = runs.iter().filter_map(|r| r.evaluation.sentence_accuracy).collect();

    let trajectories: Vec<&Vec<(usize, usize)>> =
        runs.iter().filter_map(|r| r.mapping_trajectory.as_ref()).collect();
    let trajectory = (!trajectories.is_empty()).then(|| {
        let len = trajectories.iter().map(|t| t.len()).max().unwrap_or(0);
        (0..len)
            .filter_map(|i| {
                let at: Vec<(usize, usize)> = trajectories.iter().filter_map(|t| t.get(i).copied()).collect();
                let correct: Vec<f64> = at.iter().map(|p| p.0 as f64).collect();
                let wrong: Vec<f64> = at.iter().map(|p| p.1 as f64).collect();
                Some(TrajectoryPoint {
                    situations: i + 1,
                    correct: Stat::of(&correct)?,
                    false_mappings: Stat::of(&wrong)?,
                })
            })
            .collect()
    });

    Some(ModelSummary {
        n_runs: runs.len(),
        per_word,
        per_modality,
        sentence: Stat::of(&sentences),
        trajectory,
    })
}

/// Occurrence statistics of one lexeme across sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordRow {
    pub word: String,
    pub modality: Modality,
    pub train_count: Stat,
    pub test_count: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub n_sequences: usize,
    pub split: SplitSpec,
    /// Every lexicon entry, in lexicon order.
    pub words: Vec<WordRow>,
    pub models: BTreeMap<ModelKind, ModelSummary>,
    pub runs: Vec<Metrics>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::metrics::Evaluation;

    fn run(acc: f64, traj: Vec<(usize, usize)>) -> Metrics {
        Metrics {
            model: ModelKind::Csl,
            scenario_seed: 0,
            sequence: 0,
            split: SplitSpec::train_eq_test(),
            evaluation: Evaluation {
                per_word_accuracy: [("soda".to_string(), acc)].into(),
                per_modality_accuracy: [(Modality::Shape, acc)].into(),
                sentence_accuracy: Some(acc),
                test_counts: BTreeMap::new(),
            },
            train_counts: BTreeMap::new(),
            mapping_trajectory: Some(traj),
            auxiliary_words: None,
        }
    }

    #[test]
    fn single_run_has_zero_std() {
        let s = aggregate(&[run(0.75, vec![(1, 0), (2, 1)])]).unwrap();
        assert_eq!(s.per_word["soda"], Stat { mean: 0.75, std: 0.0, n: 1 });
        assert_eq!(s.sentence.unwrap().std, 0.0);
        assert_eq!(s.trajectory.unwrap()[1].false_mappings.mean, 1.0);
    }

    #[test]
    fn identical_runs_reproduce_the_single_value() {
        let runs = vec![run(0.4, vec![(3, 0)]); 10];
        let s = aggregate(&runs).unwrap();
        assert!((s.per_modality[&Modality::Shape].mean - 0.4).abs() < 1e-12);
        assert!(s.per_modality[&Modality::Shape].std < 1e-12);
        assert_eq!(s.n_runs, 10);
    }

    #[test]
    fn population_std_and_missing_entries() {
        let mut b = run(1.0, vec![]);
        b.evaluation.per_word_accuracy.clear();
        let s = aggregate(&[run(0.0, vec![]), run(1.0, vec![]), b]).unwrap();
        assert_eq!(s.per_word["soda"], Stat { mean: 0.5, std: 0.5, n: 2 });
        assert_eq!(s.per_modality[&Modality::Shape].n, 3);
        assert!(aggregate(&[]).is_none());
    }
}
