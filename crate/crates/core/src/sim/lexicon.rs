use serde::{Deserialize, Serialize};

use crate::types::{Category, Lexeme, Modality};

/// Synonyms for one (modality, category) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryEntry {
    pub category: Category,
    pub name: String,
    pub synonyms: Vec<Lexeme>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub categories: Vec<CategoryEntry>,
    pub auxiliary: Vec<Lexeme>,
}

const SHAPES: [(&str, [&str; 5]); 5] = [
    ("bottle", ["coca cola", "soda", "pepsi", "coke", "lemonade"]),
    ("cup", ["latte", "milk", "milk tea", "coffee", "espresso"]),
    (
        "box",
        ["candy", "chocolate", "confection", "sweets", "dark chocolate"],
    ),
    ("car", ["audi", "toyota", "mercedes", "bmw", "honda"]),
    (
        "book",
        [
            "harry potter",
            "narnia",
            "lord of the rings",
            "dracula",
            "frankenstein",
        ],
    ),
];

const COLORS: [(&str, [&str; 2]); 5] = [
    ("yellow", ["yellow", "yellowish"]),
    ("pink", ["pink", "pinkish"]),
    ("brown", ["brown", "brownish"]),
    ("red", ["red", "reddish"]),
    ("white", ["white", "whitish"]),
];

const ACTIONS: [(&str, [&str; 2]); 5] = [
    ("lift up", ["lift up", "raise"]),
    ("grab", ["grab", "take"]),
    ("push", ["push", "poke"]),
    ("pull", ["pull", "drag"]),
    ("move", ["move", "shift"]),
];

const AUXILIARY: [&str; 2] = ["the", "please"];

/// The tutoring vocabulary: 5 shapes x 5 synonyms, 5 colors x 2, 5 actions x 2,
/// plus the auxiliaries "the" and "please".
pub fn build_lexicon() -> Lexicon {
    fn entries<const N: usize>(
        modality: Modality,
        table: &'static [(&'static str, [&'static str; N])],
    ) -> impl Iterator<Item = CategoryEntry> {
        table.iter().enumerate().map(move |(index, (name, syns))| {
            let category = Category::new(modality, index);
            CategoryEntry {
                category,
                name: name.to_string(),
                synonyms: syns
                    .iter()
                    .map(|s| Lexeme::with_truth(*s, category))
                    .collect(),
            }
        })
    }

    let categories = entries(Modality::Shape, &SHAPES)
        .chain(entries(Modality::Color, &COLORS))
        .chain(entries(Modality::Action, &ACTIONS))
        .collect();
    let auxiliary = AUXILIARY
        .iter()
        .enumerate()
        .map(|(i, s)| Lexeme::with_truth(*s, Category::new(Modality::Auxiliary, i)))
        .collect();
    Lexicon {
        categories,
        auxiliary,
    }
}

impl Lexicon {
    pub fn entries(&self, modality: Modality) -> impl Iterator<Item = &CategoryEntry> {
        self.categories
            .iter()
            .filter(move |e| e.category.modality == modality)
    }

    pub fn n_categories(&self, modality: Modality) -> usize {
        self.entries(modality).count()
    }

    pub fn synonyms(&self, modality: Modality, index: usize) -> &[Lexeme] {
        self.entries(modality)
            .find(|e| e.category.index == index)
            .map(|e| e.synonyms.as_slice())
            .unwrap_or(&[])
    }

    pub fn content_lexemes(&self) -> impl Iterator<Item = &Lexeme> {
        self.categories.iter().flat_map(|e| e.synonyms.iter())
    }

    pub fn all_lexemes(&self) -> impl Iterator<Item = &Lexeme> {
        self.content_lexemes().chain(self.auxiliary.iter())
    }

    pub fn auxiliary(&self, surface: &str) -> Option<&Lexeme> {
        self.auxiliary.iter().find(|l| l.surface == surface)
    }

    /// Looks up a surface form and returns the lexeme with its truth tag.
    pub fn lookup(&self, surface: &str) -> Option<&Lexeme> {
        self.all_lexemes().find(|l| l.surface == surface)
    }
}
