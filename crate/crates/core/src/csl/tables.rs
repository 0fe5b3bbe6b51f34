use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::types::{Lexeme, PerceptSymbol};

/// Co-occurrence evidence. `wp` and `pw` are two views of the same counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CooccurrenceTables {
    pub wp: BTreeMap<Lexeme, BTreeMap<PerceptSymbol, usize>>,
    pub pw: BTreeMap<PerceptSymbol, BTreeMap<Lexeme, usize>>,
    /// Sentence occurrences per word.
    pub wo: BTreeMap<Lexeme, usize>,
    /// Situations each percept symbol appeared in.
    pub po: BTreeMap<PerceptSymbol, usize>,
}

impl CooccurrenceTables {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one situation. Pair counts are per situation, so a word repeated
    /// within a sentence still adds one co-occurrence.
    pub fn add_situation(&mut self, words: &[Lexeme], percepts: &[PerceptSymbol]) {
        for w in words {
            *self.wo.entry(w.clone()).or_default() += 1;
        }
        let distinct_words: BTreeSet<&Lexeme> = words.iter().collect();
        let distinct_percepts: BTreeSet<&PerceptSymbol> = percepts.iter().collect();
        for &p in &distinct_percepts {
            *self.po.entry(*p).or_default() += 1;
        }
        for &w in &distinct_words {
            for &p in &distinct_percepts {
                *self
                    .wp
                    .entry(w.clone())
                    .or_default()
                    .entry(*p)
                    .or_default() += 1;
                *self
                    .pw
                    .entry(*p)
                    .or_default()
                    .entry(w.clone())
                    .or_default() += 1;
            }
        }
    }

    pub fn max_po(&self) -> usize {
        self.po.values().copied().max().unwrap_or(0)
    }

    pub fn wp_count(&self, word: &Lexeme, percept: &PerceptSymbol) -> usize {
        self.wp
            .get(word)
            .and_then(|row| row.get(percept))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.wo.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &Lexeme> {
        self.wo.keys()
    }

    pub fn percepts(&self) -> impl Iterator<Item = &PerceptSymbol> {
        self.po.keys()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Modality;

    #[test]
    fn views_agree() {
        let mut t = CooccurrenceTables::new();
        let w = |s: &str| Lexeme::new(s);
        let p = |m, i| PerceptSymbol::new(m, i);
        t.add_situation(
            &[w("raise"), w("the"), w("red"), w("soda")],
            &[p(Modality::Shape, 0), p(Modality::Color, 1), p(Modality::Action, 0)],
        );
        t.add_situation(
            &[w("take"), w("the"), w("red"), w("milk")],
            &[p(Modality::Shape, 1), p(Modality::Color, 1), p(Modality::Action, 2)],
        );
        for (word, row) in &t.wp {
            for (perc, n) in row {
                assert_eq!(t.pw[perc][word], *n);
            }
        }
        assert_eq!(t.wo[&w("the")], 2);
        assert_eq!(t.wp_count(&w("red"), &p(Modality::Color, 1)), 2);
        assert_eq!(t.max_po(), 2);
    }
}
