//! Longest-match-first segmentation of template sentences into lexemes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::types::Lexeme;

/// Lookup table over a fixed vocabulary. Multi-word lexemes are matched
/// greedily, so "lord of the rings" is never split around its inner "the".
#[derive(Debug, Clone)]
pub struct Tokenizer {
    entries: HashMap<String, Lexeme>,
    max_width: usize,
}

impl Tokenizer {
    pub fn new<'a>(lexicon: impl IntoIterator<Item = &'a Lexeme>) -> Self {
        let mut entries = HashMap::new();
        let mut max_width = 1;
        for lex in lexicon {
            let key = normalize(&lex.surface);
            max_width = max_width.max(lex.width());
            entries.insert(key, lex.clone());
        }
        Self { entries, max_width }
    }

    pub fn tokenize(&self, sentence: &str) -> Result<Vec<Lexeme>> {
        let words: Vec<&str> = sentence.split_whitespace().collect();
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < words.len() {
            let longest = self.max_width.min(words.len() - pos);
            let hit = (1..=longest).rev().find_map(|width| {
                let key = words[pos..pos + width].join(" ");
                self.entries.get(&key).map(|lex| (width, lex))
            });
            match hit {
                Some((width, lex)) => {
                    out.push(lex.clone());
                    pos += width;
                }
                None => {
                    return Err(Error::UnknownToken {
                        span: words[pos].to_string(),
                        position: pos,
                    })
                }
            }
        }
        Ok(out)
    }
}

fn normalize(surface: &str) -> String {
    surface.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Convenience wrapper building a throwaway [`Tokenizer`].
pub fn tokenize<'a>(
    sentence: &str,
    lexicon: impl IntoIterator<Item = &'a Lexeme>,
) -> Result<Vec<Lexeme>> {
    Tokenizer::new(lexicon).tokenize(sentence)
}
