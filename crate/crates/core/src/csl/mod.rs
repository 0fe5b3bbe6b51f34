//! The online cross-situational learner.
//!
//! Every [`GroundingState::observe`] call reclusters the whole percept
//! history, replays all situations under the fresh cluster labels to rebuild
//! the co-occurrence tables, updates the auxiliary-word set and regrounds the
//! full vocabulary seen so far. Cluster ids are not stable between DBSCAN
//! runs, so counts are never carried across clusterings.

mod auxiliary;
mod grounding;
mod tables;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use auxiliary::{detect_auxiliary, DEFAULT_AUX_FACTOR};
pub use grounding::{greedy_assign, ground, Assignment, Grounding};
pub use tables::CooccurrenceTables;

use crate::clustering::{recluster_all, DbscanParams};
use crate::error::{Error, Result};
use crate::types::{FeatureVector, Lexeme, Modality, PerceptSymbol, Situation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CslConfig {
    /// Multiplier on `max(PO)` in the auxiliary-word test.
    pub aux_factor: f64,
    /// Stop learning after this many observations.
    pub freeze_after: Option<usize>,
}

impl Default for CslConfig {
    fn default() -> Self {
        Self {
            aux_factor: DEFAULT_AUX_FACTOR,
            freeze_after: None,
        }
    }
}

/// Clustering parameters for shape, color and action, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalityParams(pub [DbscanParams; 3]);

impl ModalityParams {
    pub fn get(&self, modality: Modality) -> Result<&DbscanParams> {
        self.0
            .get(modality.index())
            .filter(|_| modality.is_perceptual())
            .ok_or(Error::NotPerceptual(modality))
    }
}

/// Replace runs of tokens matching a permanent phrase by one combined lexeme.
pub fn substitute_phrases(tokens: &[Lexeme], phrases: &[Vec<Lexeme>]) -> Vec<Lexeme> {
    if phrases.is_empty() {
        return tokens.to_vec();
    }
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    'scan: while i < tokens.len() {
        for phrase in phrases {
            let n = phrase.len();
            if n > 0 && tokens[i..].starts_with(phrase) {
                let surface = phrase
                    .iter()
                    .map(Lexeme::as_str)
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push(Lexeme::new(surface));
                i += n;
                continue 'scan;
            }
        }
        out.push(tokens[i].clone());
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingRecord {
    pub lexeme: String,
    pub percept: Option<PerceptSymbol>,
    pub count: usize,
    pub correct: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingSnapshot {
    pub situations_seen: usize,
    pub records: Vec<MappingRecord>,
}

impl MappingSnapshot {
    /// (correct, false) grounded content words. Auxiliary words and records
    /// without a truth tag are not counted.
    pub fn content_counts(&self, content: impl Fn(&str) -> bool) -> (usize, usize) {
        self.records
            .iter()
            .filter(|r| r.percept.is_some() && content(&r.lexeme))
            .fold((0, 0), |(ok, bad), r| match r.correct {
                Some(true) => (ok + 1, bad),
                Some(false) => (ok, bad + 1),
                None => (ok, bad),
            })
    }
}

#[derive(Debug, Clone)]
pub struct GroundingState {
    config: CslConfig,
    params: ModalityParams,
    phrases: Vec<Vec<Lexeme>>,
    history: Vec<Situation>,
    /// Current cluster symbol of every historical percept, per modality.
    labels: [Vec<PerceptSymbol>; 3],
    tables: CooccurrenceTables,
    auxiliary: BTreeSet<Lexeme>,
    grounding: Grounding,
    frozen: bool,
}

impl GroundingState {
    pub fn new(params: ModalityParams, config: CslConfig) -> Self {
        Self {
            config,
            params,
            phrases: Vec::new(),
            history: Vec::new(),
            labels: Default::default(),
            tables: CooccurrenceTables::new(),
            auxiliary: BTreeSet::new(),
            grounding: Grounding::default(),
            frozen: false,
        }
    }

    pub fn with_phrases(mut self, phrases: Vec<Vec<Lexeme>>) -> Self {
        self.phrases = phrases;
        self
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Stop learning; later `observe` calls leave the state untouched.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn history(&self) -> &[Situation] {
        &self.history
    }

    pub fn tables(&self) -> &CooccurrenceTables {
        &self.tables
    }

    pub fn auxiliary(&self) -> &BTreeSet<Lexeme> {
        &self.auxiliary
    }

    pub fn grounded_words(&self) -> &BTreeMap<Lexeme, PerceptSymbol> {
        &self.grounding.gw
    }

    pub fn grounded_percepts(&self) -> &BTreeMap<PerceptSymbol, Lexeme> {
        &self.grounding.gp
    }

    /// Symbols of the current clustering for one modality, by history index.
    pub fn labels(&self, modality: Modality) -> &[PerceptSymbol] {
        if modality.is_perceptual() {
            &self.labels[modality.index()]
        } else {
            &[]
        }
    }

    /// Learn from one more situation. A frozen state ignores the call.
    pub fn observe(&mut self, situation: &Situation) -> Result<()> {
        if self.frozen {
            return Ok(());
        }
        self.history.push(situation.clone());

        for m in Modality::PERCEPTUAL {
            let feats: Vec<FeatureVector> = self
                .history
                .iter()
                .filter_map(|s| s.percept(m).cloned())
                .collect();
            self.labels[m.index()] = recluster_all(&feats, m, self.params.get(m)?)?;
        }

        self.tables = self.rebuild_tables();
        self.auxiliary = detect_auxiliary(&self.tables, &self.auxiliary, self.config.aux_factor);
        let scope: BTreeSet<Lexeme> = self
            .tables
            .words()
            .filter(|w| !self.auxiliary.contains(*w))
            .cloned()
            .collect();
        self.grounding = ground(&scope, &self.tables);

        if self
            .config
            .freeze_after
            .is_some_and(|n| self.history.len() >= n)
        {
            self.frozen = true;
        }
        Ok(())
    }

    /// Replay the history under the current cluster labels.
    pub fn rebuild_tables(&self) -> CooccurrenceTables {
        let mut tables = CooccurrenceTables::new();
        for (k, situation) in self.history.iter().enumerate() {
            let words = substitute_phrases(&situation.tokens, &self.phrases);
            let percepts: Vec<PerceptSymbol> =
                self.labels.iter().map(|labels| labels[k]).collect();
            tables.add_situation(&words, &percepts);
        }
        tables
    }

    /// Most common truth category among the history percepts carrying `percept`.
    /// Ties go to the lower category index.
    pub fn majority_truth(&self, percept: &PerceptSymbol) -> Option<usize> {
        let labels = self.labels(percept.modality);
        let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
        for (sym, situation) in labels.iter().zip(&self.history) {
            if sym == percept {
                if let Some(c) = situation.truth.get(percept.modality) {
                    *votes.entry(c).or_default() += 1;
                }
            }
        }
        votes
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(c, _)| c)
    }

    /// Whether `word -> percept` matches the simulation truth. `None` when the
    /// word carries no truth tag.
    pub fn mapping_correct(&self, word: &Lexeme, percept: &PerceptSymbol) -> Option<bool> {
        let truth = word.truth?;
        if !truth.modality.is_perceptual() {
            return Some(false);
        }
        Some(truth.modality == percept.modality && self.majority_truth(percept) == Some(truth.index))
    }

    /// Scoring rule for one word occurrence under the current state: content
    /// words need a correct grounding, auxiliary words need to be in AW.
    pub fn word_correct(&self, word: &Lexeme) -> bool {
        match word.truth {
            Some(t) if !t.modality.is_perceptual() => self.auxiliary.contains(word),
            Some(_) => self
                .grounding
                .gw
                .get(word)
                .and_then(|p| self.mapping_correct(word, p))
                .unwrap_or(false),
            None => false,
        }
    }

    pub fn snapshot_mappings(&self) -> MappingSnapshot {
        let mut records: Vec<MappingRecord> = self
            .grounding
            .gw
            .iter()
            .map(|(w, p)| MappingRecord {
                lexeme: w.surface.clone(),
                percept: Some(*p),
                count: self.tables.wp_count(w, p),
                correct: self.mapping_correct(w, p),
            })
            .collect();
        records.extend(self.auxiliary.iter().map(|w| MappingRecord {
            lexeme: w.surface.clone(),
            percept: None,
            count: self.tables.wo.get(w).copied().unwrap_or(0),
            correct: w.truth.map(|t| !t.modality.is_perceptual()),
        }));
        MappingSnapshot {
            situations_seen: self.history.len(),
            records,
        }
    }

    /// (correct, false) content-word mappings in GW.
    pub fn mapping_counts(&self) -> (usize, usize) {
        self.grounding
            .gw
            .iter()
            .filter(|(w, _)| w.truth.is_some_and(|t| t.modality.is_perceptual()))
            .fold((0, 0), |(ok, bad), (w, p)| {
                if self.mapping_correct(w, p) == Some(true) {
                    (ok + 1, bad)
                } else {
                    (ok, bad + 1)
                }
            })
    }
}
