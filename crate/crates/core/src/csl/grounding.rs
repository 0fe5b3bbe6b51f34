//! Greedy, synonym-aware assignment of words to percepts and back.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::tables::CooccurrenceTables;
use crate::types::{Lexeme, PerceptSymbol};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Grounding {
    /// Grounded words.
    pub gw: BTreeMap<Lexeme, PerceptSymbol>,
    /// Grounded percepts.
    pub gp: BTreeMap<PerceptSymbol, Lexeme>,
}

/// Selections made by [`greedy_assign`], in order, with a marker for where the
/// mutually exclusive cycle ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment<A, B> {
    pub picks: Vec<(A, B, usize)>,
    pub exclusive_len: usize,
}

/// Two-stage greedy matching of `items` to `targets` by pair count.
///
/// Stage one repeatedly takes the highest pair among unassigned items and
/// unused targets, ordered by (count desc, item asc, target asc), and blocks
/// both ends. It stops once every target has been used or no pair is left.
/// Stage two releases all targets: each still-unassigned item takes its own
/// best target under the same order. Items without any pair stay unassigned.
pub fn greedy_assign<'c, A, B>(
    items: &BTreeSet<A>,
    targets: &BTreeSet<B>,
    counts: impl Fn(&A) -> Option<&'c BTreeMap<B, usize>>,
) -> Assignment<A, B>
where
    A: Ord + Clone,
    B: Ord + Clone + 'c,
{
    let mut pending: BTreeSet<&A> = items.iter().collect();
    let mut free: BTreeSet<&B> = targets.iter().collect();
    let mut picks = Vec::new();

    while !free.is_empty() {
        let best = pending
            .iter()
            .filter_map(|&a| {
                counts(a)?
                    .iter()
                    .filter(|(b, &n)| n > 0 && free.contains(b))
                    .map(|(b, &n)| (Reverse(n), a, b))
                    .min()
            })
            .min();
        let Some((Reverse(n), a, b)) = best else { break };
        pending.remove(a);
        free.remove(b);
        picks.push((a.clone(), b.clone(), n));
    }
    let exclusive_len = picks.len();

    for a in pending {
        let best = counts(a).and_then(|row| {
            row.iter()
                .filter(|(b, &n)| n > 0 && targets.contains(b))
                .map(|(b, &n)| (Reverse(n), b))
                .min()
        });
        if let Some((Reverse(n), b)) = best {
            picks.push((a.clone(), b.clone(), n));
        }
    }
    Assignment {
        picks,
        exclusive_len,
    }
}

/// Ground every word in `words` (phase one, word -> percept) and every percept
/// seen in `tables` (phase two, percept -> word, restricted to `words`).
pub fn ground(words: &BTreeSet<Lexeme>, tables: &CooccurrenceTables) -> Grounding {
    let percepts: BTreeSet<PerceptSymbol> = tables.percepts().copied().collect();

    let word_phase = greedy_assign(words, &percepts, |w| tables.wp.get(w));
    let gw = word_phase
        .picks
        .into_iter()
        .map(|(w, p, _)| (w, p))
        .collect();

    let percept_phase = greedy_assign(&percepts, words, |p| tables.pw.get(p));
    let gp = percept_phase
        .picks
        .into_iter()
        .map(|(p, w, _)| (p, w))
        .collect();

    Grounding { gw, gp }
}
