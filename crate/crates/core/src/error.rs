use thiserror::Error;

use crate::model::HypId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("universe must contain at least one hypothesis")]
    EmptyUniverse,
    #[error("duplicate hypothesis label {0:?}")]
    DuplicateLabel(String),
    #[error("universe of size {0} is outside the supported range 1..=16")]
    UniverseTooLarge(usize),
    #[error("hypothesis {0} is out of range")]
    HypothesisOutOfRange(HypId),
    #[error("menus must be nonempty")]
    EmptyMenu,
    #[error("menu size cap {0} is below 3; every triple must be feasible")]
    MenuCapTooSmall(usize),
    #[error("feasible family lacks required menu {0:?}")]
    MissingRequiredMenu(Vec<HypId>),
    #[error("menu {0:?} listed twice")]
    DuplicateMenu(Vec<HypId>),
    #[error("menu {0:?} is not a subset of the universe")]
    MenuOutsideUniverse(Vec<HypId>),
    #[error("profile must have at least one environment")]
    NoEnvironments,
    #[error("environment {env} has {found} values, expected {expected}")]
    RaggedProfile { env: usize, expected: usize, found: usize },
    #[error("risk of hypothesis {hyp} in environment {env} is not finite")]
    NonFiniteRisk { env: usize, hyp: HypId },
    #[error("tiers of environment {env} are not dense")]
    SparseTiers { env: usize },
    #[error("order of environment {env} is not a partition of the universe")]
    NotAPermutation { env: usize },
    #[error("chosen set {chosen:?} is not a subset of menu {menu:?}")]
    ChoiceNotInMenu { menu: Vec<HypId>, chosen: Vec<HypId> },
    #[error("correspondence is not defined on menu {0:?}")]
    MissingMenu(Vec<HypId>),
    #[error("transform covers {found} environments, profile has {expected}")]
    TransformArity { expected: usize, found: usize },
    #[error("scale {scale} for environment {env} is not strictly positive")]
    NonPositiveScale { env: usize, scale: f64 },
    #[error("transform {0} is not strictly increasing")]
    NotStrictlyIncreasing(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("rule {rule} needs a strict ordinal profile but environment {env} has ties")]
    TiesInStrictDomain { rule: &'static str, env: usize },
    #[error("rule {rule} needs strictly positive risks, got {value} at environment {env}")]
    NonPositiveRisk { rule: &'static str, env: usize, value: f64 },
    #[error("environment index {index} is out of range for {envs} environments")]
    EnvIndexOutOfRange { index: usize, envs: usize },
    #[error("rule expects {expected} environments, profile has {found}")]
    EnvCountMismatch { expected: usize, found: usize },
    #[error("rule expects {expected} hypotheses, profile has {found}")]
    HypCountMismatch { expected: usize, found: usize },
    #[error("weight {weight} for environment {env} is not strictly positive")]
    NonPositiveWeight { env: usize, weight: f64 },
    #[error("social relation has no maximal element on menu {0:?}")]
    NoMaximalElement(Vec<HypId>),
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("bad parameters for rule {rule}: {reason}")]
    BadParameters { rule: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiomError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("enumeration of {size} profiles exceeds the bound {bound}")]
    GuardExceeded { size: u128, bound: u128 },
    #[error("sampler produced ordinally different profiles")]
    SamplerBug,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("environment set must be a nonempty subset of 0..{envs}")]
    BadEnvSet { envs: usize },
    #[error("relation is not a weak order: {0}")]
    NotAWeakOrder(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Axiom(#[from] AxiomError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("domain (m={m}, n={n}) is outside the search guard: {reason}")]
    Guard { m: usize, n: usize, reason: String },
    #[error("searching without PO requires the explicit override")]
    PoRequired,
    #[error("corollary check failed: {0}")]
    CorollaryViolated(String),
    #[error("theorem check failed: {survivors} survivors at n={n}")]
    TheoremViolated { n: usize, survivors: usize },
    #[error("trace step failed validation: {0}")]
    TraceInvalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("loss {loss} cannot score label {label}: {reason}")]
    LabelDomain { loss: &'static str, label: String, reason: &'static str },
    #[error("loss {loss} cannot score prediction {prediction}: {reason}")]
    PredictionDomain { loss: &'static str, prediction: String, reason: &'static str },
    #[error("hypothesis {hypothesis} has no prediction for input {input:?}")]
    NotTotal { hypothesis: String, input: Vec<f64> },
    #[error("hypothesis {hypothesis} expects {expected} input features, got {found}")]
    InputArity { hypothesis: String, expected: usize, found: usize },
    #[error("hypothesis tuple has {found} components, expected {expected}")]
    TupleLength { expected: usize, found: usize },
    #[error("regularization strength must be nonnegative, got {0}")]
    NegativeStrength(f64),
    #[error("malformed generator spec: {0}")]
    MalformedSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
