//! Batch baseline: a multimodal mixture where every word token picks a
//! modality, every situation picks one component per perceptual modality, and
//! words are emitted from per-(modality, component) categoricals. Inference is
//! plain (uncollapsed) Gibbs sampling; the last sample is the estimate.

mod dist;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use dist::{
    ln_floor, sample_dirichlet, sample_inverse_wishart, sample_log_categorical, Gaussian, GiwParams,
};

use crate::error::{Error, Result};
use crate::types::{Lexeme, Modality, Situation, TruthLabels};

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_ITERATIONS: usize = 100;
/// Small enough that a component's ~25 tokens outweigh the pseudo-counts
/// spread over the whole vocabulary.
pub const DEFAULT_GAMMA: f64 = 0.1;
/// With ν₀ = dim + 2 the posterior variance in directions the data do not
/// span is about psi_scale / (n + 1); 0.05 keeps that near the percept noise
/// level for ~25 points per component.
pub const DEFAULT_PSI_SCALE: f64 = 0.05;

const PERCEPTUAL: [Modality; 3] = Modality::PERCEPTUAL;

/// Prior bundle for one modality's component Gaussians.
///
/// `mu0 = None` centres the prior on the data mean; `nu0 = None` means dim + 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GiwConfig {
    pub mu0: Option<Vec<f64>>,
    pub kappa0: f64,
    /// Ψ = psi_scale · I.
    pub psi_scale: f64,
    pub nu0: Option<f64>,
}

impl Default for GiwConfig {
    fn default() -> Self {
        Self {
            mu0: None,
            kappa0: 0.01,
            psi_scale: DEFAULT_PSI_SCALE,
            nu0: None,
        }
    }
}

impl GiwConfig {
    fn resolve(&self, modality: Modality, data: &[&DVector<f64>]) -> Result<GiwParams> {
        let d = data.first().map_or(0, |x| x.len());
        let mean = match &self.mu0 {
            Some(mu) if mu.len() != d => {
                return Err(Error::Config(format!(
                    "{modality} prior mean has {} entries, features have {d}",
                    mu.len()
                )))
            }
            Some(mu) => DVector::from_column_slice(mu),
            None => data.iter().fold(DVector::zeros(d), |acc, x| acc + *x) / data.len() as f64,
        };
        let params = GiwParams {
            mean,
            kappa: self.kappa0,
            psi: DMatrix::identity(d, d) * self.psi_scale,
            nu: self.nu0.unwrap_or(d as f64 + 2.0),
        };
        params
            .validate()
            .map_err(|e| Error::Config(format!("{modality} prior: {e}")))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    /// Concentration of π_w over the four modalities.
    pub lambda: f64,
    pub alpha_s: f64,
    pub alpha_c: f64,
    pub alpha_a: f64,
    /// Concentration of every word distribution θ.
    pub gamma: f64,
    pub beta_s: GiwConfig,
    pub beta_c: GiwConfig,
    pub beta_a: GiwConfig,
    #[serde(rename = "K_s")]
    pub k_s: usize,
    #[serde(rename = "K_c")]
    pub k_c: usize,
    #[serde(rename = "K_a")]
    pub k_a: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            alpha_s: 1.0,
            alpha_c: 1.0,
            alpha_a: 1.0,
            gamma: DEFAULT_GAMMA,
            beta_s: GiwConfig::default(),
            beta_c: GiwConfig::default(),
            beta_a: GiwConfig::default(),
            k_s: DEFAULT_K,
            k_c: DEFAULT_K,
            k_a: DEFAULT_K,
        }
    }
}

impl Hyperparams {
    pub fn with_k(k: usize) -> Self {
        Self {
            k_s: k,
            k_c: k,
            k_a: k,
            ..Self::default()
        }
    }

    fn pick<T>(modality: Modality, s: T, c: T, a: T) -> T {
        match modality {
            Modality::Shape => s,
            Modality::Color => c,
            Modality::Action => a,
            Modality::Auxiliary => unreachable!("auxiliary modality has no components"),
        }
    }

    pub fn alpha(&self, modality: Modality) -> f64 {
        Self::pick(modality, self.alpha_s, self.alpha_c, self.alpha_a)
    }

    pub fn k(&self, modality: Modality) -> usize {
        Self::pick(modality, self.k_s, self.k_c, self.k_a)
    }

    pub fn beta(&self, modality: Modality) -> &GiwConfig {
        Self::pick(modality, &self.beta_s, &self.beta_c, &self.beta_a)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("alpha_s", self.alpha_s)?;
        positive("alpha_c", self.alpha_c)?;
        positive("alpha_a", self.alpha_a)?;
        positive("gamma", self.gamma)?;
        for m in PERCEPTUAL {
            if self.k(m) == 0 {
                return Err(Error::Config(format!("K for {m} must be >= 1")));
            }
            let b = self.beta(m);
            positive(&format!("{m} kappa0"), b.kappa0)?;
            positive(&format!("{m} psi_scale"), b.psi_scale)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    /// w_i: indices into the corpus vocabulary.
    pub words: Vec<usize>,
    /// s, c, a.
    pub features: [DVector<f64>; 3],
    /// Hidden category labels; only used for scoring, never for inference.
    pub truth: TruthLabels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    /// Distinct lexemes in order of first appearance.
    pub vocabulary: Vec<Lexeme>,
    pub documents: Vec<Document>,
    index: BTreeMap<Lexeme, usize>,
}

impl Corpus {
    pub fn from_situations(situations: &[Situation]) -> Result<Self> {
        if situations.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut vocabulary = Vec::new();
        let mut index = BTreeMap::new();
        let mut documents = Vec::with_capacity(situations.len());
        let dims = PERCEPTUAL.map(|m| situations[0].percept(m).map_or(0, |f| f.dim()));
        for (i, s) in situations.iter().enumerate() {
            let words = s
                .tokens
                .iter()
                .map(|t| {
                    *index.entry(t.clone()).or_insert_with(|| {
                        vocabulary.push(t.clone());
                        vocabulary.len() - 1
                    })
                })
                .collect();
            let mut features = PERCEPTUAL.map(|_| DVector::zeros(0));
            for (k, m) in PERCEPTUAL.into_iter().enumerate() {
                let f = s.percept(m).expect("perceptual modality");
                if f.dim() != dims[k] {
                    return Err(Error::DimensionMismatch {
                        expected: dims[k],
                        found: f.dim(),
                        index: i,
                    });
                }
                features[k] = DVector::from_column_slice(f.values());
            }
            documents.push(Document {
                words,
                features,
                truth: s.truth,
            });
        }
        Ok(Self {
            vocabulary,
            documents,
            index,
        })
    }

    pub fn word_index(&self, lexeme: &Lexeme) -> Option<usize> {
        self.index.get(lexeme).copied()
    }

    pub fn n_tokens(&self) -> usize {
        self.documents.iter().map(|d| d.words.len()).sum()
    }

    pub fn dim(&self, modality: Modality) -> usize {
        self.documents[0].features[modality.index()].len()
    }
}

/// Full sampler state. Hyperparameters live in [`Hyperparams`]; the resolved
/// GIW priors are kept here because they depend on the data.
#[derive(Debug, Clone)]
pub struct BayesModelState {
    pub corpus: Corpus,
    pub priors: [GiwParams; 3],
    /// θ_{m,Z}: word distribution per perceptual modality and component.
    pub theta: [Vec<Vec<f64>>; 3],
    /// θ for the auxiliary modality.
    pub theta_aux: Vec<f64>,
    /// φ: component Gaussians per perceptual modality.
    pub phi: [Vec<Gaussian>; 3],
    /// π_w, indexed by `Modality::index`.
    pub pi_w: [f64; 4],
    /// π_s, π_c, π_a.
    pub pi: [Vec<f64>; 3],
    /// m_i per token, grouped by document.
    pub m: Vec<Vec<Modality>>,
    /// Z_s, Z_c, Z_a per document.
    pub z: Vec<[usize; 3]>,
}

/// Outcome of [`BayesModelState::predict_grounding`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub modality: Modality,
    /// `None` for the auxiliary modality.
    pub component: Option<usize>,
}

fn numerical(modality: Modality, component: usize) -> impl FnOnce(String) -> Error {
    move |reason| Error::Numerical {
        modality,
        component,
        reason,
    }
}

pub fn init<R: Rng + ?Sized>(corpus: Corpus, hyper: &Hyperparams, rng: &mut R) -> Result<BayesModelState> {
    hyper.validate()?;
    if corpus.documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let v = corpus.vocabulary.len();
    let mut priors = Vec::with_capacity(3);
    for m in PERCEPTUAL {
        let data: Vec<&DVector<f64>> = corpus.documents.iter().map(|d| &d.features[m.index()]).collect();
        priors.push(hyper.beta(m).resolve(m, &data)?);
    }
    let priors: [GiwParams; 3] = priors.try_into().expect("three modalities");

    let mut phi: [Vec<Gaussian>; 3] = Default::default();
    for m in PERCEPTUAL {
        for k in 0..hyper.k(m) {
            phi[m.index()].push(priors[m.index()].sample(rng).map_err(numerical(m, k))?);
        }
    }
    let pi_w: [f64; 4] = sample_dirichlet(&[hyper.lambda; 4], rng)
        .try_into()
        .expect("four modalities");
    let pi = PERCEPTUAL.map(|m| sample_dirichlet(&vec![hyper.alpha(m); hyper.k(m)], rng));
    let theta = PERCEPTUAL.map(|m| {
        (0..hyper.k(m))
            .map(|_| sample_dirichlet(&vec![hyper.gamma; v], rng))
            .collect()
    });
    let theta_aux = sample_dirichlet(&vec![hyper.gamma; v], rng);
    let z = corpus
        .documents
        .iter()
        .map(|_| PERCEPTUAL.map(|m| rng.random_range(0..hyper.k(m))))
        .collect();
    let m = corpus
        .documents
        .iter()
        .map(|d| {
            d.words
                .iter()
                .map(|_| Modality::ALL[rng.random_range(0..4)])
                .collect()
        })
        .collect();

    Ok(BayesModelState {
        corpus,
        priors,
        theta,
        theta_aux,
        phi,
        pi_w,
        pi,
        m,
        z,
    })
}

impl BayesModelState {
    pub fn k(&self, modality: Modality) -> usize {
        self.phi[modality.index()].len()
    }

    /// θ row used by token modality `modality` in document `doc`.
    fn theta_row(&self, modality: Modality, doc: usize) -> &[f64] {
        match modality {
            Modality::Auxiliary => &self.theta_aux,
            m => &self.theta[m.index()][self.z[doc][m.index()]],
        }
    }

    pub fn gibbs_sweep<R: Rng + ?Sized>(&mut self, hyper: &Hyperparams, rng: &mut R) -> Result<()> {
        let docs = &self.corpus.documents;

        // φ_s, φ_c, φ_a
        for m in PERCEPTUAL {
            let mi = m.index();
            for k in 0..self.k(m) {
                let data = docs
                    .iter()
                    .zip(&self.z)
                    .filter(|(_, z)| z[mi] == k)
                    .map(|(d, _)| &d.features[mi]);
                let post = self.priors[mi].posterior(data);
                self.phi[mi][k] = post.sample(rng).map_err(numerical(m, k))?;
            }
        }

        // π_w
        let mut counts = [0.0; 4];
        for mm in self.m.iter().flatten() {
            counts[mm.index()] += 1.0;
        }
        let alpha: Vec<f64> = counts.iter().map(|c| hyper.lambda + c).collect();
        self.pi_w = sample_dirichlet(&alpha, rng).try_into().expect("four modalities");

        // π_s, π_c, π_a
        for m in PERCEPTUAL {
            let mi = m.index();
            let mut alpha = vec![hyper.alpha(m); self.k(m)];
            for z in &self.z {
                alpha[z[mi]] += 1.0;
            }
            self.pi[mi] = sample_dirichlet(&alpha, rng);
        }

        // Z_s, Z_c, Z_a
        for m in PERCEPTUAL {
            let mi = m.index();
            let log_pi: Vec<f64> = self.pi[mi].iter().map(|&p| ln_floor(p)).collect();
            for (d, doc) in docs.iter().enumerate() {
                let log_w: Vec<f64> = (0..self.k(m))
                    .map(|k| {
                        let theta = &self.theta[mi][k];
                        let words: f64 = doc
                            .words
                            .iter()
                            .zip(&self.m[d])
                            .filter(|(_, &mm)| mm == m)
                            .map(|(&w, _)| ln_floor(theta[w]))
                            .sum();
                        log_pi[k] + self.phi[mi][k].log_density(&doc.features[mi]) + words
                    })
                    .collect();
                self.z[d][mi] = sample_log_categorical(&log_w, rng);
            }
        }

        // θ_{m,Z} and θ_AW
        let v = self.corpus.vocabulary.len();
        let mut theta_counts: [Vec<Vec<f64>>; 3] =
            PERCEPTUAL.map(|m| vec![vec![hyper.gamma; v]; self.k(m)]);
        let mut aux_counts = vec![hyper.gamma; v];
        for (d, doc) in docs.iter().enumerate() {
            for (&w, &mm) in doc.words.iter().zip(&self.m[d]) {
                match mm {
                    Modality::Auxiliary => aux_counts[w] += 1.0,
                    m => theta_counts[m.index()][self.z[d][m.index()]][w] += 1.0,
                }
            }
        }
        for (rows, counts) in self.theta.iter_mut().zip(&theta_counts) {
            for (row, alpha) in rows.iter_mut().zip(counts) {
                *row = sample_dirichlet(alpha, rng);
            }
        }
        self.theta_aux = sample_dirichlet(&aux_counts, rng);

        // m_i
        let log_pi_w = self.pi_w.map(ln_floor);
        for (d, doc) in docs.iter().enumerate() {
            for (i, &w) in doc.words.iter().enumerate() {
                let log_w: Vec<f64> = Modality::ALL
                    .iter()
                    .map(|&mm| log_pi_w[mm.index()] + ln_floor(self.theta_row(mm, d)[w]))
                    .collect();
                self.m[d][i] = Modality::ALL[sample_log_categorical(&log_w, rng)];
            }
        }
        Ok(())
    }

    /// Complete-data log-likelihood of the current sample: Gaussian and
    /// component-prior terms per situation plus modality-prior and word terms
    /// per token.
    pub fn log_likelihood(&self) -> f64 {
        let mut ll = 0.0;
        for (d, doc) in self.corpus.documents.iter().enumerate() {
            for m in PERCEPTUAL {
                let (mi, k) = (m.index(), self.z[d][m.index()]);
                ll += ln_floor(self.pi[mi][k]) + self.phi[mi][k].log_density(&doc.features[mi]);
            }
            for (&w, &mm) in doc.words.iter().zip(&self.m[d]) {
                ll += ln_floor(self.pi_w[mm.index()]) + ln_floor(self.theta_row(mm, d)[w]);
            }
        }
        ll
    }

    /// Argmax over (m, Z) of π_w(m) · θ_{m,Z}(w) · π_m(Z), with the auxiliary
    /// modality scored as π_w(AW) · θ_AW(w). Ties go to the earlier modality
    /// (shape, color, action, auxiliary), then the lower component.
    pub fn predict_grounding(&self, word: usize) -> Prediction {
        let mut best = (f64::NEG_INFINITY, None);
        for m in PERCEPTUAL {
            let mi = m.index();
            for k in 0..self.k(m) {
                let score = self.pi_w[mi] * self.theta[mi][k][word] * self.pi[mi][k];
                if best.1.is_none() || score > best.0 {
                    best = (
                        score,
                        Some(Prediction {
                            modality: m,
                            component: Some(k),
                        }),
                    );
                }
            }
        }
        let aux = self.pi_w[Modality::Auxiliary.index()] * self.theta_aux[word];
        if aux > best.0 {
            return Prediction {
                modality: Modality::Auxiliary,
                component: None,
            };
        }
        best.1.expect("at least one component")
    }

    /// Majority hidden label among training situations assigned to each
    /// component; ties go to the lower label, empty components get `None`.
    pub fn component_majority(&self) -> [Vec<Option<usize>>; 3] {
        PERCEPTUAL.map(|m| {
            let mi = m.index();
            let mut tallies: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); self.k(m)];
            for (doc, z) in self.corpus.documents.iter().zip(&self.z) {
                let label = doc.truth.get(m).expect("perceptual modality");
                *tallies[z[mi]].entry(label).or_default() += 1;
            }
            tallies
                .iter()
                .map(|t| {
                    t.iter()
                        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                        .map(|(&label, _)| label)
                })
                .collect()
        })
    }

    /// Relabel the components of `modality`: old component `k` becomes `perm[k]`.
    pub fn permute_components(&mut self, modality: Modality, perm: &[usize]) {
        let mi = modality.index();
        let k = self.k(modality);
        assert_eq!(perm.len(), k, "permutation length");
        let mut seen = vec![false; k];
        for &p in perm {
            assert!(p < k && !std::mem::replace(&mut seen[p], true), "not a permutation");
        }
        fn apply<T: Clone>(v: &mut [T], perm: &[usize]) {
            let old = v.to_vec();
            for (k, x) in old.into_iter().enumerate() {
                v[perm[k]] = x;
            }
        }
        apply(&mut self.theta[mi], perm);
        apply(&mut self.phi[mi], perm);
        apply(&mut self.pi[mi], perm);
        for z in &mut self.z {
            z[mi] = perm[z[mi]];
        }
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let row_ok = |row: &[f64]| (row.iter().sum::<f64>() - 1.0).abs() < 1e-9 && row.iter().all(|&x| x >= 0.0);
        if !row_ok(&self.pi_w) || !row_ok(&self.theta_aux) {
            return Err("pi_w or theta_aux is not a distribution".into());
        }
        for m in PERCEPTUAL {
            let mi = m.index();
            if !row_ok(&self.pi[mi]) || !self.theta[mi].iter().all(|r| row_ok(r)) {
                return Err(format!("{m} categorical not normalised"));
            }
            for (k, g) in self.phi[mi].iter().enumerate() {
                if g.cov != g.cov.transpose() || nalgebra::Cholesky::new(g.cov.clone()).is_none() {
                    return Err(format!("{m} component {k} covariance not SPD"));
                }
            }
        }
        if self.m.len() != self.corpus.documents.len() || self.z.len() != self.m.len() {
            return Err("assignment arrays do not match the corpus".into());
        }
        Ok(())
    }

    pub fn dump(&self) -> StateDump {
        let gaussians = |m: Modality| {
            self.phi[m.index()]
                .iter()
                .map(|g| ComponentDump {
                    mean: g.mean.iter().copied().collect(),
                    cov: g.cov.row_iter().map(|r| r.iter().copied().collect()).collect(),
                })
                .collect()
        };
        StateDump {
            vocabulary: self.corpus.vocabulary.iter().map(|l| l.surface.clone()).collect(),
            pi_w: self.pi_w,
            pi: PERCEPTUAL.map(|m| self.pi[m.index()].clone()),
            theta: PERCEPTUAL.map(|m| self.theta[m.index()].clone()),
            theta_aux: self.theta_aux.clone(),
            phi: PERCEPTUAL.map(gaussians),
            m: self.m.clone(),
            z: self.z.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentDump {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

/// JSON-friendly view of a fitted state. Per-modality arrays are ordered
/// shape, color, action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDump {
    pub vocabulary: Vec<String>,
    pub pi_w: [f64; 4],
    pub pi: [Vec<f64>; 3],
    pub theta: [Vec<Vec<f64>>; 3],
    pub theta_aux: Vec<f64>,
    pub phi: [Vec<ComponentDump>; 3],
    pub m: Vec<Vec<Modality>>,
    pub z: Vec<[usize; 3]>,
}

/// `init` followed by `n_iter` sweeps; returns the last sample.
pub fn fit<R: Rng + ?Sized>(
    corpus: Corpus,
    hyper: &Hyperparams,
    n_iter: usize,
    rng: &mut R,
) -> Result<BayesModelState> {
    let mut state = init(corpus, hyper, rng)?;
    for _ in 0..n_iter {
        state.gibbs_sweep(hyper, rng)?;
    }
    Ok(state)
}

/// A fitted model together with the component-to-label alignment used for
/// scoring.
#[derive(Debug, Clone)]
pub struct BaselineJudge<'a> {
    state: &'a BayesModelState,
    majority: [Vec<Option<usize>>; 3],
}

impl<'a> BaselineJudge<'a> {
    pub fn new(state: &'a BayesModelState) -> Self {
        Self {
            state,
            majority: state.component_majority(),
        }
    }

    /// Unknown words, words without a truth tag, and predictions landing on an
    /// unaligned component all count as wrong.
    pub fn word_correct(&self, word: &Lexeme) -> bool {
        let (Some(idx), Some(truth)) = (self.state.corpus.word_index(word), word.truth) else {
            return false;
        };
        let pred = self.state.predict_grounding(idx);
        match (truth.modality, pred.component) {
            (Modality::Auxiliary, _) => pred.modality == Modality::Auxiliary,
            (m, Some(k)) if pred.modality == m => self.majority[m.index()][k] == Some(truth.index),
            _ => false,
        }
    }
}

/// Score a fitted state on held-out situations.
pub fn score_baseline(state: &BayesModelState, test: &[Situation]) -> crate::experiment::Evaluation {
    let judge = BaselineJudge::new(state);
    crate::experiment::evaluate(test, |w| judge.word_correct(w))
}
