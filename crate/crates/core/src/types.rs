//! Domain types shared by the simulator, the learners and the harness.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

/// The four word modalities. `Auxiliary` words have no percept feature space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Shape,
    Color,
    Action,
    Auxiliary,
}

impl Modality {
    pub const ALL: [Modality; 4] = [
        Modality::Shape,
        Modality::Color,
        Modality::Action,
        Modality::Auxiliary,
    ];

    /// Modalities that carry a percept.
    pub const PERCEPTUAL: [Modality; 3] = [Modality::Shape, Modality::Color, Modality::Action];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Modality::Shape => "shape",
            Modality::Color => "color",
            Modality::Action => "action",
            Modality::Auxiliary => "auxiliary",
        }
    }

    pub fn is_perceptual(self) -> bool {
        self != Modality::Auxiliary
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ground-truth category of a lexeme or percept: modality plus category index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Category {
    pub modality: Modality,
    pub index: usize,
}

impl Category {
    pub fn new(modality: Modality, index: usize) -> Self {
        Self { modality, index }
    }
}

/// An atomic vocabulary token. Surfaces may contain spaces ("lift up").
///
/// Equality, ordering and hashing look only at the surface text; the truth
/// tag is simulation metadata and never influences learning.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lexeme {
    pub surface: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Category>,
}

impl Lexeme {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        assert!(!surface.is_empty(), "lexeme surface must be non-empty");
        Self {
            surface,
            truth: None,
        }
    }

    pub fn with_truth(surface: impl Into<String>, truth: Category) -> Self {
        Self {
            truth: Some(truth),
            ..Self::new(surface)
        }
    }

    pub fn as_str(&self) -> &str {
        &self.surface
    }

    /// Number of whitespace-separated words in the surface.
    pub fn width(&self) -> usize {
        self.surface.split_whitespace().count()
    }
}

impl PartialEq for Lexeme {
    fn eq(&self, other: &Self) -> bool {
        self.surface == other.surface
    }
}

impl Eq for Lexeme {}

impl Hash for Lexeme {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.surface.hash(state);
    }
}

impl PartialOrd for Lexeme {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Lexeme {
    fn cmp(&self, other: &Self) -> Ordering {
        self.surface.cmp(&other.surface)
    }
}

impl fmt::Display for Lexeme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

/// A fixed-length real feature vector with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    /// Returns `None` for empty or non-finite input.
    pub fn new(values: Vec<f64>) -> Option<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn distance(&self, other: &FeatureVector) -> f64 {
        self.squared_distance(other).sqrt()
    }
}

/// Hidden ground-truth labels of one situation, one category index per modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruthLabels {
    pub shape: usize,
    pub color: usize,
    pub action: usize,
}

impl TruthLabels {
    pub fn get(&self, modality: Modality) -> Option<usize> {
        match modality {
            Modality::Shape => Some(self.shape),
            Modality::Color => Some(self.color),
            Modality::Action => Some(self.action),
            Modality::Auxiliary => None,
        }
    }
}

/// One tutor interaction: an instruction plus the three observed percepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Situation {
    pub index: usize,
    pub tokens: Vec<Lexeme>,
    pub shape: FeatureVector,
    pub color: FeatureVector,
    pub action: FeatureVector,
    pub truth: TruthLabels,
}

impl Situation {
    /// Feature vector for a perceptual modality.
    pub fn percept(&self, modality: Modality) -> Option<&FeatureVector> {
        match modality {
            Modality::Shape => Some(&self.shape),
            Modality::Color => Some(&self.color),
            Modality::Action => Some(&self.action),
            Modality::Auxiliary => None,
        }
    }

    pub fn sentence(&self) -> String {
        self.tokens
            .iter()
            .map(Lexeme::as_str)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Abstract percept: a cluster id within one modality's current clustering.
///
/// Ids are only meaningful relative to the clustering run that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PerceptSymbol {
    pub modality: Modality,
    pub cluster_id: usize,
}

impl PerceptSymbol {
    pub fn new(modality: Modality, cluster_id: usize) -> Self {
        debug_assert!(modality.is_perceptual());
        Self {
            modality,
            cluster_id,
        }
    }
}

impl fmt::Display for PerceptSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.modality, self.cluster_id)
    }
}
