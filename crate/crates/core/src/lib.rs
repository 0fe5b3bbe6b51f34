//! Online cross-situational grounding of words through clustered percepts,
//! a Gibbs-sampled Bayesian baseline, and a seeded harness that replays the
//! 125-situation tutoring scenario against both.

pub mod bayes;
pub mod clustering;
pub mod csl;
pub mod error;
pub mod experiment;
pub mod rng;
pub mod sim;
pub mod tokenize;
pub mod types;

pub use error::{Error, Result};
pub use types::{Category, FeatureVector, Lexeme, Modality, PerceptSymbol, Situation, TruthLabels};
