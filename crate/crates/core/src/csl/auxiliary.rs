use std::collections::BTreeSet;

use super::tables::CooccurrenceTables;
use crate::types::Lexeme;

pub const DEFAULT_AUX_FACTOR: f64 = 2.0;

/// Add every word occurring more than `factor` times as often as the most
/// frequent percept. The set only grows.
pub fn detect_auxiliary(
    tables: &CooccurrenceTables,
    auxiliary: &BTreeSet<Lexeme>,
    factor: f64,
) -> BTreeSet<Lexeme> {
    let threshold = tables.max_po() as f64 * factor;
    let mut out = auxiliary.clone();
    out.extend(
        tables
            .wo
            .iter()
            .filter(|(_, &n)| n as f64 > threshold)
            .map(|(w, _)| w.clone()),
    );
    out
}
