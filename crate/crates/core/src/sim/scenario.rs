use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::lexicon::Lexicon;
use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::types::{FeatureVector, Lexeme, Modality, Situation, TruthLabels};

/// Categories per perceptual modality.
pub const N_CATEGORIES: usize = 5;

/// Prototype draws are rejected until every pair within a modality is at
/// least this fraction of the sphere radius apart.
const MIN_PAIRWISE_FRACTION: f64 = 0.75;
const MAX_PROTOTYPE_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub shape_dim: usize,
    pub color_dim: usize,
    /// Defaults to 30, a flattened 6 x 5 subaction matrix.
    pub action_dim: usize,
    pub noise_scale: f64,
    pub separation_factor: f64,
    pub sentence_template_prob_please: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            shape_dim: 8,
            color_dim: 8,
            action_dim: 30,
            noise_scale: 0.05,
            separation_factor: 10.0,
            sentence_template_prob_please: 0.5,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn dim(&self, modality: Modality) -> Option<usize> {
        match modality {
            Modality::Shape => Some(self.shape_dim),
            Modality::Color => Some(self.color_dim),
            Modality::Action => Some(self.action_dim),
            Modality::Auxiliary => None,
        }
    }

    /// Radius of the sphere prototypes are drawn on. Scaled by `sqrt(dim)` so
    /// that the gap between categories grows with the expected noise norm.
    pub fn prototype_radius(&self, modality: Modality) -> Option<f64> {
        self.dim(modality)
            .map(|d| self.separation_factor * self.noise_scale * (d as f64).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        for m in Modality::PERCEPTUAL {
            let d = self.dim(m).unwrap_or(0);
            if d < 2 {
                return Err(Error::Config(format!("{m} dimension must be >= 2, got {d}")));
            }
        }
        if !(self.noise_scale.is_finite() && self.noise_scale > 0.0) {
            return Err(Error::Config(format!(
                "noise_scale must be positive, got {}",
                self.noise_scale
            )));
        }
        if !(self.separation_factor.is_finite() && self.separation_factor > 0.0) {
            return Err(Error::Config(format!(
                "separation_factor must be positive, got {}",
                self.separation_factor
            )));
        }
        if !(0.0..=1.0).contains(&self.sentence_template_prob_please) {
            return Err(Error::Config(format!(
                "sentence_template_prob_please must lie in [0, 1], got {}",
                self.sentence_template_prob_please
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryPrototype {
    pub modality: Modality,
    pub category_index: usize,
    pub mean: FeatureVector,
    pub noise_scale: f64,
}

/// A generated scenario: config echo, lexicon, prototypes and the 125 situations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub lexicon: Lexicon,
    pub prototypes: Vec<CategoryPrototype>,
    pub situations: Vec<Situation>,
}

impl Scenario {
    pub fn prototypes_of(&self, modality: Modality) -> impl Iterator<Item = &CategoryPrototype> {
        self.prototypes
            .iter()
            .filter(move |p| p.modality == modality)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))
    }
}

fn draw_prototypes(
    cfg: &ScenarioConfig,
    modality: Modality,
    rng: &mut SimRng,
) -> Result<Vec<CategoryPrototype>> {
    let dim = cfg.dim(modality).ok_or(Error::NotPerceptual(modality))?;
    let radius = cfg.prototype_radius(modality).unwrap_or_default();
    let min_gap = (MIN_PAIRWISE_FRACTION * radius).max(cfg.separation_factor * cfg.noise_scale);

    for _ in 0..MAX_PROTOTYPE_ATTEMPTS {
        let means: Vec<Vec<f64>> = (0..N_CATEGORIES)
            .map(|_| {
                let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / norm * radius).collect()
            })
            .collect();
        let separated = (0..N_CATEGORIES).all(|i| {
            (i + 1..N_CATEGORIES).all(|j| {
                let d2: f64 = means[i]
                    .iter()
                    .zip(&means[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                d2.sqrt() >= min_gap
            })
        });
        if separated {
            return Ok(means
                .into_iter()
                .enumerate()
                .map(|(category_index, mean)| CategoryPrototype {
                    modality,
                    category_index,
                    mean: FeatureVector::new(mean).expect("finite prototype"),
                    noise_scale: cfg.noise_scale,
                })
                .collect());
        }
    }
    Err(Error::Config(format!(
        "could not place {N_CATEGORIES} separated {modality} prototypes in {dim} dimensions"
    )))
}

fn noisy(proto: &CategoryPrototype, noise: &Normal<f64>, rng: &mut SimRng) -> FeatureVector {
    let values = proto
        .mean
        .values()
        .iter()
        .map(|m| m + noise.sample(rng))
        .collect();
    FeatureVector::new(values).expect("finite feature")
}

fn pick(options: &[Lexeme], rng: &mut SimRng) -> Lexeme {
    options[rng.random_range(0..options.len())].clone()
}

/// One situation per (shape, color, action) triple, in lexicographic triple
/// order. Synonyms are drawn uniformly per slot.
pub fn generate_scenario(cfg: &ScenarioConfig, lexicon: &Lexicon, rng: &mut SimRng) -> Result<Scenario> {
    cfg.validate()?;
    for m in Modality::PERCEPTUAL {
        if lexicon.n_categories(m) != N_CATEGORIES {
            return Err(Error::Config(format!(
                "lexicon must have {N_CATEGORIES} {m} categories"
            )));
        }
    }
    let the = lexicon
        .auxiliary("the")
        .ok_or_else(|| Error::Config("lexicon lacks \"the\"".into()))?
        .clone();
    let please = lexicon
        .auxiliary("please")
        .ok_or_else(|| Error::Config("lexicon lacks \"please\"".into()))?
        .clone();

    let mut prototypes = Vec::with_capacity(3 * N_CATEGORIES);
    for m in Modality::PERCEPTUAL {
        prototypes.extend(draw_prototypes(cfg, m, rng)?);
    }
    let proto = |m: Modality, i: usize| {
        prototypes
            .iter()
            .find(|p| p.modality == m && p.category_index == i)
            .expect("prototype exists")
    };
    let noise = Normal::new(0.0, cfg.noise_scale).map_err(|e| Error::Config(e.to_string()))?;

    let mut situations = Vec::with_capacity(N_CATEGORIES.pow(3));
    for shape in 0..N_CATEGORIES {
        for color in 0..N_CATEGORIES {
            for action in 0..N_CATEGORIES {
                let polite = rng.random_bool(cfg.sentence_template_prob_please);
                let action_word = pick(lexicon.synonyms(Modality::Action, action), rng);
                let color_word = pick(lexicon.synonyms(Modality::Color, color), rng);
                let shape_word = pick(lexicon.synonyms(Modality::Shape, shape), rng);

                let mut tokens = Vec::with_capacity(5);
                if polite {
                    tokens.push(please.clone());
                }
                tokens.extend([action_word, the.clone(), color_word, shape_word]);

                let situation = Situation {
                    index: situations.len(),
                    tokens,
                    shape: noisy(proto(Modality::Shape, shape), &noise, rng),
                    color: noisy(proto(Modality::Color, color), &noise, rng),
                    action: noisy(proto(Modality::Action, action), &noise, rng),
                    truth: TruthLabels {
                        shape,
                        color,
                        action,
                    },
                };
                situations.push(situation);
            }
        }
    }

    Ok(Scenario {
        config: cfg.clone(),
        lexicon: lexicon.clone(),
        prototypes,
        situations,
    })
}

/// Independent random orderings of the same situations.
pub fn shuffle_sequences<R: Rng + ?Sized>(
    situations: &[Situation],
    n_sequences: usize,
    rng: &mut R,
) -> Vec<Vec<Situation>> {
    (0..n_sequences)
        .map(|_| {
            let mut seq = situations.to_vec();
            seq.shuffle(rng);
            seq
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::sim::build_lexicon;
    use crate::tokenize::Tokenizer;
    use rand::RngCore;
    use std::collections::BTreeMap;

    fn default_scenario(seed: u64) -> Scenario {
        let cfg = ScenarioConfig::with_seed(seed);
        generate_scenario(&cfg, &build_lexicon(), &mut seeded(seed)).unwrap()
    }

    #[test]
    fn one_situation_per_triple() {
        let sc = default_scenario(0);
        assert_eq!(sc.situations.len(), 125);
        let mut seen = std::collections::HashSet::new();
        for s in &sc.situations {
            assert!(seen.insert((s.truth.shape, s.truth.color, s.truth.action)));
        }
    }

    #[test]
    fn occurrence_counts() {
        let sc = default_scenario(0);
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for s in &sc.situations {
            for t in &s.tokens {
                *counts.entry(t.surface.clone()).or_default() += 1;
            }
        }
        assert_eq!(counts["the"], 125);
        let content: usize = sc
            .lexicon
            .content_lexemes()
            .map(|l| counts.get(&l.surface).copied().unwrap_or(0))
            .sum();
        assert_eq!(content, 375);
    }

    #[test]
    fn sentences_follow_templates_and_round_trip() {
        let sc = default_scenario(3);
        let tok = Tokenizer::new(sc.lexicon.all_lexemes());
        for s in &sc.situations {
            let body = if s.tokens[0].surface == "please" {
                &s.tokens[1..]
            } else {
                &s.tokens[..]
            };
            assert_eq!(body.len(), 4);
            assert_eq!(body[1].surface, "the");
            let kinds: Vec<Modality> = body.iter().map(|t| t.truth.unwrap().modality).collect();
            assert_eq!(
                kinds,
                [Modality::Action, Modality::Auxiliary, Modality::Color, Modality::Shape]
            );
            let sentence = s.sentence();
            assert_eq!(tok.tokenize(&sentence).unwrap(), s.tokens);
            assert_eq!(
                tok.tokenize(&sentence)
                    .unwrap()
                    .iter()
                    .map(|l| l.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
                sentence
            );
        }
    }

    #[test]
    fn prototypes_are_separated_and_features_classify_by_nearest_prototype() {
        for seed in 0..5 {
            let sc = default_scenario(seed);
            for m in Modality::PERCEPTUAL {
                let protos: Vec<_> = sc.prototypes_of(m).collect();
                for i in 0..protos.len() {
                    for j in i + 1..protos.len() {
                        let d = protos[i].mean.distance(&protos[j].mean);
                        assert!(d >= sc.config.separation_factor * sc.config.noise_scale);
                    }
                }
                for s in &sc.situations {
                    let x = s.percept(m).unwrap();
                    let nearest = protos
                        .iter()
                        .min_by(|a, b| {
                            x.distance(&a.mean).partial_cmp(&x.distance(&b.mean)).unwrap()
                        })
                        .unwrap();
                    assert_eq!(Some(nearest.category_index), s.truth.get(m));
                }
            }
        }
    }

    #[test]
    fn seeds_vary_word_counts() {
        let count = |sc: &Scenario, w: &str| {
            sc.situations
                .iter()
                .flat_map(|s| &s.tokens)
                .filter(|t| t.surface == w)
                .count()
        };
        let a = default_scenario(0);
        let b = default_scenario(1);
        let differs = a
            .lexicon
            .content_lexemes()
            .any(|l| count(&a, &l.surface) != count(&b, &l.surface));
        assert!(differs);
    }

    #[test]
    fn rejects_bad_config() {
        let lex = build_lexicon();
        let mut cfg = ScenarioConfig::default();
        cfg.color_dim = 1;
        assert!(generate_scenario(&cfg, &lex, &mut seeded(0)).is_err());
        let mut cfg = ScenarioConfig::default();
        cfg.sentence_template_prob_please = 1.5;
        assert!(generate_scenario(&cfg, &lex, &mut seeded(0)).is_err());
    }

    #[test]
    fn two_dimensional_prototypes_still_place() {
        let cfg = ScenarioConfig {
            shape_dim: 2,
            color_dim: 2,
            action_dim: 2,
            ..ScenarioConfig::default()
        };
        assert!(generate_scenario(&cfg, &build_lexicon(), &mut seeded(9)).is_ok());
    }

    #[test]
    fn shuffles_are_permutations() {
        let sc = default_scenario(0);
        let seqs = shuffle_sequences(&sc.situations, 10, &mut seeded(5));
        assert_eq!(seqs.len(), 10);
        for seq in &seqs {
            let mut idx: Vec<usize> = seq.iter().map(|s| s.index).collect();
            idx.sort_unstable();
            assert_eq!(idx, (0..125).collect::<Vec<_>>());
        }
        assert_ne!(
            seqs[0].iter().map(|s| s.index).collect::<Vec<_>>(),
            seqs[1].iter().map(|s| s.index).collect::<Vec<_>>()
        );
    }

    /// Always answers the top of every range, which turns Fisher-Yates into
    /// the identity permutation.
    struct TopOfRange;

    impl RngCore for TopOfRange {
        fn next_u32(&mut self) -> u32 {
            u32::MAX
        }
        fn next_u64(&mut self) -> u64 {
            u64::MAX
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            dst.fill(0xff)
        }
    }

    #[test]
    fn identity_stub_preserves_order() {
        let sc = default_scenario(0);
        let seqs = shuffle_sequences(&sc.situations, 1, &mut TopOfRange);
        assert_eq!(seqs.len(), 1);
        assert_eq!(seqs[0], sc.situations);
    }
}
