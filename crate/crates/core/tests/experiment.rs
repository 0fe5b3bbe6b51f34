use std::collections::BTreeMap;

use csl_core::experiment::{
    build_scenario, emit_reports, load_summary, run_baseline, run_csl, run_experiment, sequences, ModelKind,
    ModelSelection, RunConfig, SplitSpec, REPORT_FILES,
};
use csl_core::rng::seeded;
use csl_core::Modality;

fn small(split: f64, model: ModelSelection) -> RunConfig {
    RunConfig {
        n_sequences: 2,
        split,
        model,
        ..RunConfig::default()
    }
}

#[test]
fn reports_are_complete_and_reproducible() {
    let cfg = small(0.6, ModelSelection::Both);
    let scenario = build_scenario(&cfg).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let out_a = a.path().join("nested/reports");
    let written = emit_reports(&run_experiment(&cfg, &scenario).unwrap(), &out_a).unwrap();
    assert_eq!(written.len(), 5);
    emit_reports(&run_experiment(&cfg, &scenario).unwrap(), b.path()).unwrap();
    for f in REPORT_FILES {
        let x = std::fs::read(out_a.join(f)).unwrap();
        assert!(!x.contains(&b'\r'), "{f} has CR line endings");
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
    let loaded = load_summary(&out_a.join("summary.json")).unwrap();
    assert_eq!(loaded.runs.len(), 4);
}

#[test]
fn occurrence_report_matches_a_direct_count() {
    let cfg = small(0.6, ModelSelection::Csl);
    let scenario = build_scenario(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_reports(&run_experiment(&cfg, &scenario).unwrap(), dir.path()).unwrap();

    let mut expected: BTreeMap<String, usize> = BTreeMap::new();
    for t in scenario.situations.iter().flat_map(|s| &s.tokens) {
        *expected.entry(t.surface.clone()).or_default() += 1;
    }
    let mut rdr = csv::Reader::from_path(dir.path().join("word_occurrences.csv")).unwrap();
    let mut content_total = 0.0;
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let total: f64 = rec[2].parse::<f64>().unwrap() + rec[4].parse::<f64>().unwrap();
        let want = expected.get(&rec[0]).copied().unwrap_or(0) as f64;
        assert!((total - want).abs() < 1e-9, "{}: {total} vs {want}", &rec[0]);
        if &rec[1] != "auxiliary" {
            content_total += total;
        }
        rows += 1;
    }
    assert_eq!(rows, 47);
    assert_eq!(content_total, 375.0);
    assert_eq!(expected["the"], 125);
}

#[test]
fn csl_and_baseline_follow_the_split() {
    let cfg = small(0.6, ModelSelection::Both);
    let scenario = build_scenario(&cfg).unwrap();
    let seq = &sequences(&cfg, &scenario)[0];
    let split = SplitSpec::holdout(0.6).unwrap();
    let params = cfg.clustering.resolve(&scenario.config).unwrap();

    let csl = run_csl(seq, split, params, &cfg.csl).unwrap();
    assert_eq!(csl.mapping_trajectory.as_ref().unwrap().len(), 75);
    assert_eq!(csl.train_counts.values().sum::<usize>() + csl.evaluation.test_counts.values().sum::<usize>(),
        seq.iter().map(|s| s.tokens.len()).sum::<usize>());

    // Words that never occur in training cannot be grounded.
    for (w, _) in csl.evaluation.test_counts.iter().filter(|(w, _)| !csl.train_counts.contains_key(*w)) {
        assert_eq!(csl.evaluation.per_word_accuracy[w], 0.0, "{w}");
    }

    let base = run_baseline(seq, split, &cfg.bayes.hyperparams(), 20, &mut seeded(1)).unwrap();
    assert_eq!(base.model, ModelKind::Baseline);
    assert!(base.mapping_trajectory.is_none());
    for (w, _) in base.evaluation.test_counts.iter().filter(|(w, _)| !base.train_counts.contains_key(*w)) {
        assert_eq!(base.evaluation.per_word_accuracy[w], 0.0, "{w}");
    }
}

#[test]
fn full_scenario_csl_is_perfect_and_aggregates_to_45() {
    let cfg = small(1.0, ModelSelection::Csl);
    let scenario = build_scenario(&cfg).unwrap();
    let summary = run_experiment(&cfg, &scenario).unwrap();
    let csl = &summary.models[&ModelKind::Csl];
    for m in Modality::ALL {
        assert_eq!(csl.per_modality[&m].mean, 1.0);
    }
    let last = csl.trajectory.as_ref().unwrap().last().unwrap();
    assert_eq!((last.correct.mean, last.false_mappings.mean), (45.0, 0.0));
    assert!(!summary.models.contains_key(&ModelKind::Baseline));
}
