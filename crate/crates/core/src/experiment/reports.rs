use std::fs;
use std::path::{Path, PathBuf};

use csv::{Terminator, WriterBuilder};

use super::metrics::ModelKind;
use super::summary::{Stat, Summary};
use crate::error::{Error, Result};
use crate::types::Modality;

pub const REPORT_FILES: [&str; 5] = [
    "word_accuracy.csv",
    "modality_accuracy.csv",
    "mapping_trajectory.csv",
    "word_occurrences.csv",
    "summary.json",
];

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn mean_std(s: Option<&Stat>) -> [String; 3] {
    match s {
        Some(s) => [num(s.mean), num(s.std), s.n.to_string()],
        None => [String::new(), String::new(), "0".into()],
    }
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Serde(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serde(e.to_string()))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Write the five report files into `out_dir` (created if missing) and
/// return their paths.
pub fn emit_reports(summary: &Summary, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = |name: &str| out_dir.join(name);

    let mut rows = Vec::new();
    for (kind, model) in &summary.models {
        for w in &summary.words {
            let [mean, std, n] = mean_std(model.per_word.get(&w.word));
            rows.push(vec![
                kind.name().into(),
                w.word.clone(),
                w.modality.name().into(),
                mean,
                std,
                n,
                num(w.train_count.mean),
                num(w.test_count.mean),
            ]);
        }
    }
    write_csv(
        &path(REPORT_FILES[0]),
        &["model", "word", "modality", "mean", "std", "n_runs", "train_count", "test_count"],
        rows,
    )?;

    let mut rows = Vec::new();
    for (kind, model) in &summary.models {
        for m in Modality::ALL {
            let [mean, std, n] = mean_std(model.per_modality.get(&m));
            rows.push(vec![kind.name().into(), m.name().into(), mean, std, n]);
        }
        let [mean, std, n] = mean_std(model.sentence.as_ref());
        rows.push(vec![kind.name().into(), "sentence".into(), mean, std, n]);
    }
    write_csv(
        &path(REPORT_FILES[1]),
        &["model", "modality", "mean", "std", "n_runs"],
        rows,
    )?;

    let mut rows = Vec::new();
    if let Some(traj) = summary
        .models
        .get(&ModelKind::Csl)
        .and_then(|m| m.trajectory.as_ref())
    {
        for p in traj {
            rows.push(vec![
                p.situations.to_string(),
                num(p.correct.mean),
                num(p.correct.std),
                num(p.false_mappings.mean),
                num(p.false_mappings.std),
            ]);
        }
    }
    write_csv(
        &path(REPORT_FILES[2]),
        &["situations", "correct_mean", "correct_std", "false_mean", "false_std"],
        rows,
    )?;

    let rows = summary
        .words
        .iter()
        .map(|w| {
            vec![
                w.word.clone(),
                w.modality.name().into(),
                num(w.train_count.mean),
                num(w.train_count.std),
                num(w.test_count.mean),
                num(w.test_count.std),
            ]
        })
        .collect();
    write_csv(
        &path(REPORT_FILES[3]),
        &["word", "modality", "train_mean", "train_std", "test_mean", "test_std"],
        rows,
    )?;

    let json_path = path(REPORT_FILES[4]);
    let mut json = serde_json::to_string_pretty(summary).map_err(|e| Error::Serde(e.to_string()))?;
    json.push('\n');
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;

    Ok(REPORT_FILES.iter().map(|f| path(f)).collect())
}

/// Read back a `summary.json` written by [`emit_reports`].
pub fn load_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serde(format!("{}: {e}", path.display())))
}
