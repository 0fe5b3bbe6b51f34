//! End-to-end protocol: generate (or load) a scenario, shuffle it into
//! sequences, split each one, train and score both learners, then aggregate
//! and write reports.

mod config;
mod metrics;
mod reports;
mod summary;

use rayon::prelude::*;

pub use config::{BayesConfig, ClusteringConfig, EpsConfig, ModelSelection, RunConfig};
pub use metrics::{evaluate, occurrence_counts, Evaluation, Metrics, ModelKind, SplitMode, SplitSpec};
pub use reports::{emit_reports, load_summary, REPORT_FILES};
pub use summary::{aggregate, ModelSummary, Stat, Summary, TrajectoryPoint, WordRow};

use crate::bayes::{fit, score_baseline, Corpus, Hyperparams};
use crate::csl::{CslConfig, GroundingState, ModalityParams};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, SimRng};
use crate::sim::{build_lexicon, generate_scenario, shuffle_sequences, Scenario};
use crate::types::{Modality, Situation};

const SEQUENCE_STREAM: u64 = 1;
const CHAIN_STREAM: u64 = 1_000;

/// Train the online learner on the training part (recording the mapping
/// counts after every observation), freeze it, and score the test part.
pub fn run_csl(
    sequence: &[Situation],
    split: SplitSpec,
    params: ModalityParams,
    config: &CslConfig,
) -> Result<Metrics> {
    let (train, test) = split.partition(sequence);
    let mut state = GroundingState::new(params, config.clone());
    let mut trajectory = Vec::with_capacity(train.len());
    for s in train {
        state.observe(s)?;
        trajectory.push(state.mapping_counts());
    }
    state.freeze();
    Ok(Metrics {
        model: ModelKind::Csl,
        scenario_seed: 0,
        sequence: 0,
        split,
        evaluation: evaluate(test, |w| state.word_correct(w)),
        train_counts: occurrence_counts(train),
        mapping_trajectory: Some(trajectory),
        auxiliary_words: Some(state.auxiliary().iter().map(|l| l.surface.clone()).collect()),
    })
}

/// Fit the batch baseline on the training part and score the test part.
pub fn run_baseline(
    sequence: &[Situation],
    split: SplitSpec,
    hyper: &Hyperparams,
    iterations: usize,
    rng: &mut SimRng,
) -> Result<Metrics> {
    let (train, test) = split.partition(sequence);
    let state = fit(Corpus::from_situations(train)?, hyper, iterations, rng)?;
    Ok(Metrics {
        model: ModelKind::Baseline,
        scenario_seed: 0,
        sequence: 0,
        split,
        evaluation: score_baseline(&state, test),
        train_counts: occurrence_counts(train),
        mapping_trajectory: None,
        auxiliary_words: None,
    })
}

/// Scenario for `cfg`, generated from its seed.
pub fn build_scenario(cfg: &RunConfig) -> Result<Scenario> {
    let sc = cfg.scenario_config();
    sc.validate()?;
    generate_scenario(&sc, &build_lexicon(), &mut seeded(sc.seed))
}

pub fn sequences(cfg: &RunConfig, scenario: &Scenario) -> Vec<Vec<Situation>> {
    let mut rng = seeded(derive_seed(cfg.seed, SEQUENCE_STREAM));
    shuffle_sequences(&scenario.situations, cfg.n_sequences, &mut rng)
}

/// Run every selected (model, sequence) pair in parallel and summarise.
pub fn run_experiment(cfg: &RunConfig, scenario: &Scenario) -> Result<Summary> {
    cfg.validate()?;
    if scenario.situations.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let split = cfg.split_spec()?;
    let params = cfg.clustering.resolve(&scenario.config)?;
    let hyper = cfg.bayes.hyperparams();
    let seqs = sequences(cfg, scenario);

    let mut jobs = Vec::new();
    for (model, wanted) in [
        (ModelKind::Csl, cfg.model.includes_csl()),
        (ModelKind::Baseline, cfg.model.includes_baseline()),
    ] {
        if wanted {
            jobs.extend((0..seqs.len()).map(|i| (model, i)));
        }
    }
    let runs: Vec<Metrics> = jobs
        .into_par_iter()
        .map(|(model, i)| {
            let mut m = match model {
                ModelKind::Csl => run_csl(&seqs[i], split, params, &cfg.csl)?,
                ModelKind::Baseline => {
                    let mut rng = seeded(derive_seed(cfg.seed, CHAIN_STREAM + i as u64));
                    run_baseline(&seqs[i], split, &hyper, cfg.bayes.iterations, &mut rng)?
                }
            };
            m.scenario_seed = cfg.seed;
            m.sequence = i;
            Ok(m)
        })
        .collect::<Result<_>>()?;

    let mut models = std::collections::BTreeMap::new();
    for kind in [ModelKind::Csl, ModelKind::Baseline] {
        let of_kind: Vec<Metrics> = runs.iter().filter(|r| r.model == kind).cloned().collect();
        if let Some(s) = aggregate(&of_kind) {
            models.insert(kind, s);
        }
    }

    let words = scenario
        .lexicon
        .all_lexemes()
        .map(|l| {
            let counts = |test: bool| -> Vec<f64> {
                seqs.iter()
                    .map(|seq| {
                        let (train, tst) = split.partition(seq);
                        let part = if test { tst } else { train };
                        part.iter()
                            .flat_map(|s| &s.tokens)
                            .filter(|t| t.surface == l.surface)
                            .count() as f64
                    })
                    .collect()
            };
            WordRow {
                word: l.surface.clone(),
                modality: l.truth.map_or(Modality::Auxiliary, |c| c.modality),
                train_count: Stat::of(&counts(false)).expect("at least one sequence"),
                test_count: Stat::of(&counts(true)).expect("at least one sequence"),
            }
        })
        .collect();

    Ok(Summary {
        seed: cfg.seed,
        n_sequences: cfg.n_sequences,
        split,
        words,
        models,
        runs,
    })
}
