use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Lexeme, Modality, Situation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    TrainEqTest,
    Holdout,
}

/// How a sequence is divided into training and test situations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub mode: SplitMode,
}

impl SplitSpec {
    /// Train on everything, then re-present everything for testing.
    pub fn train_eq_test() -> Self {
        Self {
            train_fraction: 1.0,
            mode: SplitMode::TrainEqTest,
        }
    }

    /// Train on a prefix of the sequence, test on the rest.
    pub fn holdout(train_fraction: f64) -> Result<Self> {
        let s = Self {
            train_fraction,
            mode: SplitMode::Holdout,
        };
        s.validate()?;
        Ok(s)
    }

    /// `1.0` means train = test; anything in (0, 1) is a holdout prefix.
    pub fn from_fraction(f: f64) -> Result<Self> {
        if f == 1.0 {
            Ok(Self::train_eq_test())
        } else {
            Self::holdout(f)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "train fraction must lie in (0, 1], got {}",
                self.train_fraction
            )));
        }
        if self.mode == SplitMode::TrainEqTest && self.train_fraction != 1.0 {
            return Err(Error::Config("train_eq_test requires train fraction 1.0".into()));
        }
        Ok(())
    }

    /// Number of training situations: ⌈fraction · n⌉.
    pub fn n_train(&self, n: usize) -> usize {
        // The small offset keeps 0.6 * 125 from rounding up to 76.
        ((self.train_fraction * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
    }

    pub fn partition<'a>(&self, sequence: &'a [Situation]) -> (&'a [Situation], &'a [Situation]) {
        match self.mode {
            SplitMode::TrainEqTest => (sequence, sequence),
            SplitMode::Holdout => sequence.split_at(self.n_train(sequence.len())),
        }
    }

    pub fn label(&self) -> String {
        match self.mode {
            SplitMode::TrainEqTest => "train_eq_test".into(),
            SplitMode::Holdout => format!("holdout_{}", self.train_fraction),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Csl,
    Baseline,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Csl => "csl",
            ModelKind::Baseline => "baseline",
        }
    }
}

/// Accuracies over one test portion. Entries without any test occurrence are
/// absent rather than zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub per_word_accuracy: BTreeMap<String, f64>,
    /// Occurrence-weighted accuracy of the words whose true modality this is.
    pub per_modality_accuracy: BTreeMap<Modality, f64>,
    /// Fraction of test sentences whose every token is correct.
    pub sentence_accuracy: Option<f64>,
    pub test_counts: BTreeMap<String, usize>,
}

/// Score every token of `test` with `judge`. The judge is queried once per
/// distinct lexeme, so it must not depend on context.
pub fn evaluate(test: &[Situation], judge: impl Fn(&Lexeme) -> bool) -> Evaluation {
    let mut verdicts: BTreeMap<&Lexeme, bool> = BTreeMap::new();
    let mut words: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut modalities: BTreeMap<Modality, (usize, usize)> = BTreeMap::new();
    let mut sentences_ok = 0;
    for s in test {
        let mut all = true;
        for tok in &s.tokens {
            let ok = *verdicts.entry(tok).or_insert_with(|| judge(tok));
            all &= ok;
            let e = words.entry(tok.surface.clone()).or_default();
            e.0 += usize::from(ok);
            e.1 += 1;
            if let Some(cat) = tok.truth {
                let e = modalities.entry(cat.modality).or_default();
                e.0 += usize::from(ok);
                e.1 += 1;
            }
        }
        sentences_ok += usize::from(all);
    }
    let ratio = |(c, n): (usize, usize)| c as f64 / n as f64;
    Evaluation {
        per_word_accuracy: words.iter().map(|(w, &cn)| (w.clone(), ratio(cn))).collect(),
        per_modality_accuracy: modalities.into_iter().map(|(m, cn)| (m, ratio(cn))).collect(),
        sentence_accuracy: (!test.is_empty()).then(|| ratio((sentences_ok, test.len()))),
        test_counts: words.into_iter().map(|(w, (_, n))| (w, n)).collect(),
    }
}

/// Token counts per surface form.
pub fn occurrence_counts(situations: &[Situation]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for tok in situations.iter().flat_map(|s| &s.tokens) {
        *out.entry(tok.surface.clone()).or_insert(0) += 1;
    }
    out
}

/// Result of one (model, sequence) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub model: ModelKind,
    pub scenario_seed: u64,
    pub sequence: usize,
    pub split: SplitSpec,
    #[serde(flatten)]
    pub evaluation: Evaluation,
    pub train_counts: BTreeMap<String, usize>,
    /// (correct, false) content mappings after each training situation; CSL only.
    pub mapping_trajectory: Option<Vec<(usize, usize)>>,
    /// Auxiliary set at the end of training; CSL only.
    pub auxiliary_words: Option<Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Category, FeatureVector, TruthLabels};

    fn situation(words: &[(&str, Modality)]) -> Situation {
        let f = FeatureVector::new(vec![0.0]).unwrap();
        Situation {
            index: 0,
            tokens: words
                .iter()
                .map(|&(w, m)| Lexeme::with_truth(w, Category::new(m, 0)))
                .collect(),
            shape: f.clone(),
            color: f.clone(),
            action: f,
            truth: TruthLabels {
                shape: 0,
                color: 0,
                action: 0,
            },
        }
    }

    #[test]
    fn holdout_prefix_is_ceil_of_fraction() {
        let s = SplitSpec::holdout(0.6).unwrap();
        assert_eq!(s.n_train(125), 75);
        assert_eq!(s.n_train(10), 6);
        assert_eq!(s.n_train(11), 7);
        assert_eq!(SplitSpec::holdout(0.01).unwrap().n_train(3), 1);
    }

    #[test]
    fn split_validation() {
        assert!(SplitSpec::holdout(0.0).is_err());
        assert!(SplitSpec::holdout(1.5).is_err());
        assert!(SplitSpec {
            train_fraction: 0.5,
            mode: SplitMode::TrainEqTest
        }
        .validate()
        .is_err());
        assert_eq!(SplitSpec::from_fraction(1.0).unwrap().mode, SplitMode::TrainEqTest);
    }

    #[test]
    fn empty_test_set_reports_nothing() {
        let e = evaluate(&[], |_| true);
        assert!(e.per_word_accuracy.is_empty());
        assert!(e.per_modality_accuracy.is_empty());
        assert_eq!(e.sentence_accuracy, None);
    }

    #[test]
    fn accuracies_count_occurrences() {
        let test = [
            situation(&[("the", Modality::Auxiliary), ("soda", Modality::Shape)]),
            situation(&[("the", Modality::Auxiliary), ("milk", Modality::Shape)]),
            situation(&[("red", Modality::Color)]),
        ];
        let e = evaluate(&test, |w| w.as_str() != "milk");
        assert_eq!(e.per_word_accuracy["the"], 1.0);
        assert_eq!(e.per_word_accuracy["milk"], 0.0);
        assert_eq!(e.per_modality_accuracy[&Modality::Shape], 0.5);
        assert_eq!(e.per_modality_accuracy[&Modality::Color], 1.0);
        assert!((e.sentence_accuracy.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(e.test_counts["the"], 2);
    }
}
