//! Risk profiles from synthetic supervised data.
//!
//! Hypotheses are fixed predictors (affine maps, softmax-affine classifiers
//! or explicit lookup tables) with a supplied norm for regularization. Data
//! comes from seeded per-environment generators, so every profile cell can be
//! recomputed from `(spec, seed)`.

use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::RiskError;
use crate::model::RiskProfile;

/// Tolerance on the total mass of a probability prediction.
pub const PROB_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Class(usize),
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Class,
    Real,
}

impl Label {
    pub fn kind(&self) -> LabelKind {
        match self {
            Label::Class(_) => LabelKind::Class,
            Label::Real(_) => LabelKind::Real,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Scalar(f64),
    Probabilities(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub input: Vec<f64>,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDataset {
    examples: Vec<Example>,
    label_kind: LabelKind,
}

impl SyntheticDataset {
    pub fn new(examples: Vec<Example>) -> Result<Self, RiskError> {
        let first = examples.first().ok_or(RiskError::EmptyDataset)?;
        let label_kind = first.label.kind();
        if examples.iter().any(|e| e.label.kind() != label_kind) {
            return Err(RiskError::MalformedSpec("labels of mixed kinds".into()));
        }
        Ok(Self { examples, label_kind })
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn label_kind(&self) -> LabelKind {
        self.label_kind
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    /// Always false; datasets are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    CrossEntropy,
    Hinge,
    Square,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Class count for cross-entropy; predictions must have this length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
}

impl LossSpec {
    pub fn new(kind: LossKind) -> Self {
        Self { kind, classes: None }
    }

    pub fn cross_entropy(classes: usize) -> Self {
        Self { kind: LossKind::CrossEntropy, classes: Some(classes) }
    }

    fn name(&self) -> &'static str {
        match self.kind {
            LossKind::CrossEntropy => "cross_entropy",
            LossKind::Hinge => "hinge",
            LossKind::Square => "square",
            LossKind::Absolute => "absolute",
        }
    }
}

/// Loss of one prediction against one label.
pub fn loss_eval(spec: &LossSpec, prediction: &Prediction, label: &Label) -> Result<f64, RiskError> {
    let loss = spec.name();
    let bad_label = |reason| RiskError::LabelDomain { loss, label: format!("{label:?}"), reason };
    let bad_pred = |reason| RiskError::PredictionDomain {
        loss,
        prediction: format!("{prediction:?}"),
        reason,
    };
    match spec.kind {
        LossKind::CrossEntropy => {
            let Prediction::Probabilities(p) = prediction else {
                return Err(bad_pred("expected a probability vector"));
            };
            if spec.classes.is_some_and(|k| k != p.len()) {
                return Err(bad_pred("length differs from the class count"));
            }
            if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(bad_pred("entries must lie in [0, 1]"));
            }
            if (p.iter().sum::<f64>() - 1.0).abs() > PROB_TOLERANCE {
                return Err(bad_pred("entries must sum to 1"));
            }
            let Label::Class(k) = *label else {
                return Err(bad_label("expected a class index"));
            };
            let pk = *p.get(k).ok_or_else(|| bad_label("class index out of range"))?;
            if pk == 0.0 {
                return Err(bad_pred("zero probability on the observed class"));
            }
            Ok(-pk.ln())
        }
        LossKind::Hinge => {
            let Prediction::Scalar(s) = *prediction else {
                return Err(bad_pred("expected a scalar score"));
            };
            let Label::Real(y) = *label else {
                return Err(bad_label("expected a label in {-1, +1}"));
            };
            if y != 1.0 && y != -1.0 {
                return Err(bad_label("expected a label in {-1, +1}"));
            }
            Ok((1.0 - y * s).max(0.0))
        }
        LossKind::Square | LossKind::Absolute => {
            let Prediction::Scalar(s) = *prediction else {
                return Err(bad_pred("expected a scalar prediction"));
            };
            let Label::Real(y) = *label else {
                return Err(bad_label("expected a real label"));
            };
            Ok(if spec.kind == LossKind::Square { (y - s) * (y - s) } else { (y - s).abs() })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    Identity,
    Square,
}

/// `λ Ω(norm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizerSpec {
    pub penalty: Penalty,
    pub lambda: f64,
}

impl RegularizerSpec {
    pub fn new(penalty: Penalty, lambda: f64) -> Result<Self, RiskError> {
        if lambda < 0.0 || !lambda.is_finite() {
            return Err(RiskError::NegativeStrength(lambda));
        }
        Ok(Self { penalty, lambda })
    }

    pub fn none() -> Self {
        Self { penalty: Penalty::Identity, lambda: 0.0 }
    }

    pub fn apply(&self, norm: f64) -> f64 {
        if self.lambda == 0.0 {
            return 0.0;
        }
        let omega = match self.penalty {
            Penalty::Identity => norm,
            Penalty::Square => norm * norm,
        };
        self.lambda * omega
    }
}

impl Default for RegularizerSpec {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predictor {
    /// `w . x + b`.
    Affine { weights: Vec<f64>, bias: f64 },
    /// Softmax of `W x + b`, one row per class.
    Softmax { weights: Vec<Vec<f64>>, biases: Vec<f64> },
    /// Exact-match lookup on inputs.
    Table { entries: Vec<(Vec<f64>, Prediction)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularHypothesis {
    pub id: String,
    pub predictor: Predictor,
    #[serde(default)]
    pub norm: f64,
}

impl TabularHypothesis {
    pub fn new(id: impl Into<String>, predictor: Predictor, norm: f64) -> Result<Self, RiskError> {
        let id = id.into();
        if norm < 0.0 || !norm.is_finite() {
            return Err(RiskError::MalformedSpec(format!("norm of {id} must be finite and nonnegative")));
        }
        if let Predictor::Softmax { weights, biases } = &predictor {
            if weights.is_empty() || weights.len() != biases.len() {
                return Err(RiskError::MalformedSpec(format!("{id}: one bias per softmax row")));
            }
        }
        Ok(Self { id, predictor, norm })
    }

    pub fn affine(id: impl Into<String>, weights: Vec<f64>, bias: f64) -> Self {
        Self { id: id.into(), predictor: Predictor::Affine { weights, bias }, norm: 0.0 }
    }

    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = norm;
        self
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, RiskError> {
        let arity = |w: &[f64]| {
            if w.len() == x.len() {
                Ok(())
            } else {
                Err(RiskError::InputArity { hypothesis: self.id.clone(), expected: w.len(), found: x.len() })
            }
        };
        let dot = |w: &[f64]| w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        match &self.predictor {
            Predictor::Affine { weights, bias } => {
                arity(weights)?;
                Ok(Prediction::Scalar(dot(weights) + bias))
            }
            Predictor::Softmax { weights, biases } => {
                let mut logits = Vec::with_capacity(weights.len());
                for (w, b) in weights.iter().zip(biases) {
                    arity(w)?;
                    logits.push(dot(w) + b);
                }
                let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
                let z: f64 = exps.iter().sum();
                Ok(Prediction::Probabilities(exps.iter().map(|e| e / z).collect()))
            }
            Predictor::Table { entries } => entries
                .iter()
                .find(|(input, _)| input.as_slice() == x)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| RiskError::NotTotal { hypothesis: self.id.clone(), input: x.to_vec() }),
        }
    }
}

/// Mean loss over the dataset plus the regularization term.
pub fn empirical_risk(
    h: &TabularHypothesis,
    d: &SyntheticDataset,
    loss: &LossSpec,
    reg: &RegularizerSpec,
) -> Result<f64, RiskError> {
    let mut total = 0.0;
    for e in d.examples() {
        total += loss_eval(loss, &h.predict(&e.input)?, &e.label)?;
    }
    Ok(total / d.len() as f64 + reg.apply(h.norm))
}

fn profile_from_rows(rows: Vec<Vec<f64>>) -> Result<RiskProfile, RiskError> {
    Ok(RiskProfile::new(rows)?)
}

/// One environment per dataset; entry `(i, h)` is the empirical risk of
/// `hyps[h]` on `envs[i]`.
pub fn build_profile_multisource(
    hyps: &[TabularHypothesis],
    envs: &[SyntheticDataset],
    loss: &LossSpec,
    reg: &RegularizerSpec,
) -> Result<RiskProfile, RiskError> {
    if hyps.is_empty() {
        return Err(RiskError::MalformedSpec("no hypotheses".into()));
    }
    let rows = envs
        .par_iter()
        .map(|d| hyps.iter().map(|h| empirical_risk(h, d, loss, reg)).collect())
        .collect::<Result<Vec<Vec<f64>>, RiskError>>()?;
    profile_from_rows(rows)
}

/// Every example is its own environment; row `i` holds each hypothesis's
/// loss on example `i`.
pub fn build_profile_per_example(
    hyps: &[TabularHypothesis],
    d: &SyntheticDataset,
    loss: &LossSpec,
) -> Result<RiskProfile, RiskError> {
    let rows = d
        .examples()
        .iter()
        .map(|e| hyps.iter().map(|h| loss_eval(loss, &h.predict(&e.input)?, &e.label)).collect())
        .collect::<Result<Vec<Vec<f64>>, RiskError>>()?;
    profile_from_rows(rows)
}

/// Multi-task profile over hypothesis tuples: entry `(i, t)` is the
/// unregularized risk of component `t[i]` on environment `i` alone.
pub fn build_profile_block(
    tuples: &[Vec<TabularHypothesis>],
    envs: &[SyntheticDataset],
    loss: &LossSpec,
) -> Result<RiskProfile, RiskError> {
    if let Some(t) = tuples.iter().find(|t| t.len() != envs.len()) {
        return Err(RiskError::TupleLength { expected: envs.len(), found: t.len() });
    }
    let reg = RegularizerSpec::none();
    let rows = envs
        .par_iter()
        .enumerate()
        .map(|(i, d)| tuples.iter().map(|t| empirical_risk(&t[i], d, loss, &reg)).collect())
        .collect::<Result<Vec<Vec<f64>>, RiskError>>()?;
    profile_from_rows(rows)
}

/// Block profile from black-box per-environment scores: `scores[i][j]` is
/// environment `i`'s score of its `j`-th component candidate, and a tuple
/// picks one candidate index per environment.
pub fn build_profile_block_scores(
    tuples: &[Vec<usize>],
    scores: &[Vec<f64>],
) -> Result<RiskProfile, RiskError> {
    let mut rows = vec![Vec::with_capacity(tuples.len()); scores.len()];
    for t in tuples {
        if t.len() != scores.len() {
            return Err(RiskError::TupleLength { expected: scores.len(), found: t.len() });
        }
        for (i, (&j, row)) in t.iter().zip(&mut rows).enumerate() {
            let s = *scores[i]
                .get(j)
                .ok_or_else(|| RiskError::MalformedSpec(format!("no score {j} for environment {i}")))?;
            row.push(s);
        }
    }
    profile_from_rows(rows)
}

/// The federated objective `Σ_i w_i r_i(h)` for each hypothesis, summed in
/// environment order.
pub fn weighted_objective(p: &RiskProfile, weights: &[f64]) -> Result<Vec<f64>, RiskError> {
    if weights.len() != p.envs() {
        return Err(RiskError::TupleLength { expected: p.envs(), found: weights.len() });
    }
    Ok((0..p.hyps())
        .map(|h| weights.iter().enumerate().map(|(e, w)| w * p.get(e, h)).sum())
        .collect())
}

// ---------------------------------------------------------------------------
// Generators

fn default_one() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

/// One environment's data distribution. Inputs are i.i.d. Gaussian with
/// standard deviation `input_std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvGenerator {
    /// `y = w . x + b + N(0, noise_std^2)`.
    LinearGaussian {
        samples: usize,
        weights: Vec<f64>,
        #[serde(default)]
        bias: f64,
        noise_std: f64,
        #[serde(default = "default_one")]
        input_std: f64,
        /// Stream id; defaults to the environment's position.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `y = sign(w . x + b)`, flipped with probability `flip_rate`. Labels
    /// are `±1` reals when `signed`, class indices `0/1` otherwise.
    LabelFlip {
        samples: usize,
        weights: Vec<f64>,
        #[serde(default)]
        bias: f64,
        flip_rate: f64,
        #[serde(default = "default_one")]
        input_std: f64,
        #[serde(default = "default_true")]
        signed: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl EnvGenerator {
    fn validate(&self) -> Result<(), RiskError> {
        let bad = |s: &str| Err(RiskError::MalformedSpec(s.into()));
        let (samples, weights, bias, input_std) = match self {
            EnvGenerator::LinearGaussian { samples, weights, bias, noise_std, input_std, .. } => {
                if *noise_std < 0.0 || !noise_std.is_finite() {
                    return bad("noise_std must be finite and nonnegative");
                }
                (samples, weights, bias, input_std)
            }
            EnvGenerator::LabelFlip { samples, weights, bias, flip_rate, input_std, .. } => {
                if !(0.0..=1.0).contains(flip_rate) {
                    return bad("flip_rate must lie in [0, 1]");
                }
                (samples, weights, bias, input_std)
            }
        };
        if *samples == 0 {
            return bad("samples must be at least 1");
        }
        if weights.is_empty() || weights.iter().chain([bias]).any(|v| !v.is_finite()) {
            return bad("weights must be a nonempty vector of finite values");
        }
        if *input_std <= 0.0 || !input_std.is_finite() {
            return bad("input_std must be finite and positive");
        }
        Ok(())
    }

    fn stream(&self) -> Option<u64> {
        match self {
            EnvGenerator::LinearGaussian { seed, .. } | EnvGenerator::LabelFlip { seed, .. } => *seed,
        }
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<SyntheticDataset, RiskError> {
        let draw_input = |rng: &mut ChaCha8Rng, d: usize, std: f64| -> Vec<f64> {
            let normal = Normal::new(0.0, std).expect("validated");
            (0..d).map(|_| normal.sample(rng)).collect()
        };
        let examples = match self {
            EnvGenerator::LinearGaussian { samples, weights, bias, noise_std, input_std, .. } => {
                let noise = Normal::new(0.0, *noise_std).expect("validated");
                (0..*samples)
                    .map(|_| {
                        let input = draw_input(rng, weights.len(), *input_std);
                        let mean: f64 = weights.iter().zip(&input).map(|(w, x)| w * x).sum::<f64>() + bias;
                        Example { label: Label::Real(mean + noise.sample(rng)), input }
                    })
                    .collect()
            }
            EnvGenerator::LabelFlip { samples, weights, bias, flip_rate, input_std, signed, .. } => (0..*samples)
                .map(|_| {
                    let input = draw_input(rng, weights.len(), *input_std);
                    let score: f64 = weights.iter().zip(&input).map(|(w, x)| w * x).sum::<f64>() + bias;
                    let mut positive = score >= 0.0;
                    if rng.gen_bool(*flip_rate) {
                        positive = !positive;
                    }
                    let label = match (signed, positive) {
                        (true, true) => Label::Real(1.0),
                        (true, false) => Label::Real(-1.0),
                        (false, p) => Label::Class(usize::from(p)),
                    };
                    Example { input, label }
                })
                .collect(),
        };
        SyntheticDataset::new(examples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub environments: Vec<EnvGenerator>,
}

/// One dataset per environment. Environment `i` draws from the ChaCha
/// stream `seed` / `stream`, where `stream` is its own seed field or `i`.
pub fn synth_generate(spec: &GeneratorSpec, seed: u64) -> Result<Vec<SyntheticDataset>, RiskError> {
    if spec.environments.is_empty() {
        return Err(RiskError::MalformedSpec("no environments".into()));
    }
    spec.environments
        .iter()
        .enumerate()
        .map(|(i, g)| {
            g.validate()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(g.stream().unwrap_or(i as u64));
            g.generate(&mut rng)
        })
        .collect()
}

/// Everything needed to build a multisource profile from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub generator: GeneratorSpec,
    pub hypotheses: Vec<TabularHypothesis>,
    pub loss: LossSpec,
    #[serde(default)]
    pub regularizer: RegularizerSpec,
}

impl ProfileSpec {
    pub fn build(&self, seed: u64) -> Result<RiskProfile, RiskError> {
        for h in &self.hypotheses {
            TabularHypothesis::new(h.id.clone(), h.predictor.clone(), h.norm)?;
        }
        RegularizerSpec::new(self.regularizer.penalty, self.regularizer.lambda)?;
        let envs = synth_generate(&self.generator, seed)?;
        build_profile_multisource(&self.hypotheses, &envs, &self.loss, &self.regularizer)
    }
}
