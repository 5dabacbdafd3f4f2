//! Reference aggregation rules and the one-shot axiom auditor.
//!
//! No rule breaks ties: equally good hypotheses are all chosen.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::axioms::{
    check_alpha, check_beta, check_ci, check_iih_as, check_ir, check_pareto, random_ordinal,
    rescore, Axiom, IihSampler, Verdict,
};
use crate::error::{AxiomError, RuleError};
use crate::model::{FeasibleFamily, HypId, Menu, ProfileRef, RiskProfile, Universe};
use crate::rule::{
    argmin_by, induce, numeric_view, ordinal_view, prefers_second, AggregationRule, DomainKind,
    Outcome, PairwiseRule,
};

/// Empirical risk minimization on a single environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErmSingle {
    env: usize,
}

impl ErmSingle {
    /// `env` is 0-based.
    pub fn new(env: usize) -> Self {
        Self { env }
    }

    pub fn env(&self) -> usize {
        self.env
    }
}

impl AggregationRule for ErmSingle {
    fn name(&self) -> &'static str {
        "erm_single"
    }

    fn params(&self) -> serde_json::Value {
        json!({ "env_index": self.env + 1 })
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Numeric
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        if self.env >= profile.envs() {
            return Err(RuleError::EnvIndexOutOfRange { index: self.env, envs: profile.envs() });
        }
        let p = numeric_view(profile);
        Ok(argmin_by(menu, |h| p.get(self.env, h)))
    }

    fn pairwise(&self) -> Option<&dyn PairwiseRule> {
        Some(self)
    }
}

impl PairwiseRule for ErmSingle {
    fn pair_outcome(&self, _a: HypId, _b: HypId, direction: usize, n: usize) -> Outcome {
        if prefers_second(direction, self.env, n) {
            Outcome::Second
        } else {
            Outcome::First
        }
    }
}

/// Minimizer of a single risk functional.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskMin {
    /// A fixed functional over the universe; the profile is ignored.
    Fixed(Vec<f64>),
    /// The mean of the profile's environments (ERM on pooled data).
    Pooled,
}

impl RiskMin {
    pub fn fixed(risk: Vec<f64>) -> Result<Self, RuleError> {
        if risk.is_empty() || risk.iter().any(|v| !v.is_finite()) {
            return Err(RuleError::BadParameters {
                rule: "risk_min".into(),
                reason: "risk must be a nonempty vector of finite values".into(),
            });
        }
        Ok(Self::Fixed(risk))
    }

    pub fn pooled() -> Self {
        Self::Pooled
    }
}

impl AggregationRule for RiskMin {
    fn name(&self) -> &'static str {
        match self {
            RiskMin::Fixed(_) => "risk_min",
            RiskMin::Pooled => "pooled_erm",
        }
    }

    fn params(&self) -> serde_json::Value {
        match self {
            RiskMin::Fixed(r) => json!({ "risk": r }),
            RiskMin::Pooled => serde_json::Value::Null,
        }
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Numeric
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        match self {
            RiskMin::Fixed(r) => {
                if menu.span() > r.len() {
                    return Err(RuleError::HypCountMismatch { expected: r.len(), found: menu.span() });
                }
                Ok(argmin_by(menu, |h| r[h]))
            }
            RiskMin::Pooled => {
                let p = numeric_view(profile);
                let n = p.envs() as f64;
                Ok(argmin_by(menu, |h| p.column(h).iter().sum::<f64>() / n))
            }
        }
    }
}

/// Argmin of a positively weighted sum of environment risks.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSum {
    weights: Vec<f64>,
}

impl WeightedSum {
    pub fn new(weights: Vec<f64>) -> Result<Self, RuleError> {
        if weights.is_empty() {
            return Err(RuleError::BadParameters {
                rule: "weighted_sum".into(),
                reason: "need one weight per environment".into(),
            });
        }
        if let Some((env, &weight)) =
            weights.iter().enumerate().find(|(_, w)| **w <= 0.0 || !w.is_finite())
        {
            return Err(RuleError::NonPositiveWeight { env, weight });
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i r_i(h)` in environment order.
    pub fn objective(&self, p: &RiskProfile, h: HypId) -> f64 {
        self.weights.iter().enumerate().map(|(e, w)| w * p.get(e, h)).sum()
    }
}

impl AggregationRule for WeightedSum {
    fn name(&self) -> &'static str {
        "weighted_sum"
    }

    fn params(&self) -> serde_json::Value {
        json!({ "weights": self.weights })
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Numeric
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        if profile.envs() != self.weights.len() {
            return Err(RuleError::EnvCountMismatch {
                expected: self.weights.len(),
                found: profile.envs(),
            });
        }
        let p = numeric_view(profile);
        Ok(argmin_by(menu, |h| self.objective(&p, h)))
    }
}

/// Lexicographic minimization of the worst-case risk vector. Each
/// hypothesis's risks are sorted in descending order (risks are costs, so
/// the worst environment comes first) and compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Leximin;

impl AggregationRule for Leximin {
    fn name(&self) -> &'static str {
        "leximin"
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Numeric
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        let p = numeric_view(profile);
        let worst_first = |h: HypId| {
            let mut v = p.column(h);
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        let scored: Vec<(HypId, Vec<f64>)> = menu.members().map(|h| (h, worst_first(h))).collect();
        let cmp = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        };
        let best = scored
            .iter()
            .map(|(_, v)| v)
            .min_by(|a, b| cmp(a, b))
            .expect("menus are nonempty");
        Ok(Menu::new(
            scored.iter().filter(|(_, v)| cmp(v, best) == Ordering::Equal).map(|(h, _)| *h),
        )?)
    }
}

/// Menu elements not strictly dominated in every environment by another
/// menu element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParetoFront;

impl AggregationRule for ParetoFront {
    fn name(&self) -> &'static str {
        "pareto_front"
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Numeric
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        let p = numeric_view(profile);
        Ok(Menu::new(
            menu.members()
                .filter(|&g| !menu.members().any(|f| f != g && p.strictly_dominates(f, g))),
        )?)
    }
}

/// Borda count restricted to the menu: in each environment a hypothesis
/// scores `|menu| - position` (position 1 is best); maximal totals win.
/// Strict profiles only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Borda;

impl AggregationRule for Borda {
    fn name(&self) -> &'static str {
        "borda"
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Ordinal
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        let o = ordinal_view(profile);
        if let Some(env) = (0..o.envs()).find(|&e| o.groups(e).len() != o.hyps()) {
            return Err(RuleError::TiesInStrictDomain { rule: "borda", env });
        }
        let k = menu.len();
        let score = |h: HypId| -> usize {
            (0..o.envs())
                .map(|e| {
                    let above = menu.members().filter(|&g| o.better(e, g, h)).count();
                    k - (above + 1)
                })
                .sum()
        };
        let best = menu.members().map(score).max().expect("menus are nonempty");
        Ok(Menu::new(menu.members().filter(|&h| score(h) == best))?)
    }
}

/// Argmin of the product of environment risks. Strictly positive risks only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NashProduct;

impl AggregationRule for NashProduct {
    fn name(&self) -> &'static str {
        "nash_product"
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Numeric
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        let p = numeric_view(profile);
        for e in 0..p.envs() {
            if let Some(&value) = p.row(e).iter().find(|v| **v <= 0.0) {
                return Err(RuleError::NonPositiveRisk { rule: "nash_product", env: e, value });
            }
        }
        Ok(argmin_by(menu, |h| p.column(h).iter().product()))
    }
}

/// Serializable rule selection, as used on the command line and in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum RuleSpec {
    /// `env_index` is 1-based.
    ErmSingle { env_index: usize },
    RiskMin { risk: Vec<f64> },
    PooledErm,
    WeightedSum { weights: Vec<f64> },
    Leximin,
    ParetoFront,
    Borda,
    NashProduct,
}

impl RuleSpec {
    pub const NAMES: [&'static str; 8] = [
        "erm_single",
        "risk_min",
        "pooled_erm",
        "weighted_sum",
        "leximin",
        "pareto_front",
        "borda",
        "nash_product",
    ];

    /// Builds the rule and validates its parameters against `n` environments
    /// and `m` hypotheses.
    pub fn build(&self, m: usize, n: usize) -> Result<Box<dyn AggregationRule>, RuleError> {
        Ok(match self {
            RuleSpec::ErmSingle { env_index } => {
                if *env_index == 0 || *env_index > n {
                    return Err(RuleError::EnvIndexOutOfRange { index: *env_index, envs: n });
                }
                Box::new(ErmSingle::new(env_index - 1))
            }
            RuleSpec::RiskMin { risk } => {
                if risk.len() != m {
                    return Err(RuleError::HypCountMismatch { expected: m, found: risk.len() });
                }
                Box::new(RiskMin::fixed(risk.clone())?)
            }
            RuleSpec::PooledErm => Box::new(RiskMin::pooled()),
            RuleSpec::WeightedSum { weights } => {
                if weights.len() != n {
                    return Err(RuleError::EnvCountMismatch { expected: weights.len(), found: n });
                }
                Box::new(WeightedSum::new(weights.clone())?)
            }
            RuleSpec::Leximin => Box::new(Leximin),
            RuleSpec::ParetoFront => Box::new(ParetoFront),
            RuleSpec::Borda => Box::new(Borda),
            RuleSpec::NashProduct => Box::new(NashProduct),
        })
    }
}

/// Sampling budget for [`audit`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    /// Random numeric profiles used for alpha, beta, PO and IR.
    pub profiles: usize,
    pub iih_samples: usize,
    pub ir_samples: usize,
    /// Also run IIH on profiles with ties and report it separately.
    pub include_ties: bool,
}

impl AuditConfig {
    pub fn new(m: usize, n: usize, seed: u64) -> Self {
        Self { m, n, seed, profiles: 50, iih_samples: 100, ir_samples: 100, include_ties: false }
    }
}

/// One rule's axiom compliance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub rule: String,
    pub params: serde_json::Value,
    pub domain: Domain,
    pub config: AuditConfig,
    pub verdicts: Vec<Verdict>,
    /// 1-based dictator, if any.
    pub dictator: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub m: usize,
    pub n: usize,
}

impl AxiomReport {
    pub fn verdict(&self, axiom: Axiom) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.axiom == axiom)
    }

    pub fn passed(&self, axiom: Axiom) -> Option<bool> {
        self.verdict(axiom).map(|v| v.passed)
    }
}

/// Random tie-free positive profiles for auditing.
pub fn audit_profiles(m: usize, n: usize, count: usize, seed: u64) -> Vec<RiskProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let o = random_ordinal(&mut rng, m, n, false);
            rescore(&mut rng, &o)
        })
        .collect()
}

/// Audits a rule on seeded random profiles over the full menu family.
pub fn audit(rule: &dyn AggregationRule, cfg: &AuditConfig) -> Result<AxiomReport, AxiomError> {
    let profiles = audit_profiles(cfg.m, cfg.n, cfg.profiles, cfg.seed);
    audit_on(rule, cfg, &profiles)
}

/// Audits a rule on caller-supplied profiles (all with `cfg.m` hypotheses and
/// `cfg.n` environments).
pub fn audit_on(
    rule: &dyn AggregationRule,
    cfg: &AuditConfig,
    profiles: &[RiskProfile],
) -> Result<AxiomReport, AxiomError> {
    if profiles.is_empty() || cfg.iih_samples == 0 || cfg.ir_samples == 0 {
        return Err(AxiomError::NoSamples);
    }
    let fam = FeasibleFamily::enumerate(&Universe::of_size(cfg.m)?, None)?;

    let mut alpha = Verdict::pass(Axiom::Alpha, 0);
    let mut beta = Verdict::pass(Axiom::Beta, 0);
    let mut pareto = Verdict::pass(Axiom::Pareto, 0);
    let mut ir = Verdict::pass(Axiom::Ir, 0);
    for (i, p) in profiles.iter().enumerate() {
        let cc = induce(rule, ProfileRef::Numeric(p), &fam)?;
        fold(&mut alpha, check_alpha(&cc, &fam)?);
        fold(&mut beta, check_beta(&cc, &fam)?);
        fold(&mut pareto, check_pareto(rule, p, &fam)?);
        let ir_seed = cfg.seed ^ 0x1A5F_0000 ^ i as u64;
        fold(&mut ir, check_ir(rule, p, &fam, cfg.ir_samples, ir_seed)?);
    }

    let sampler = IihSampler::new(cfg.iih_samples, cfg.seed ^ 0x11B0_0000);
    let iih = check_iih_as(Axiom::Iih, rule, &fam, &sampler.pairs(cfg.m, cfg.n))?;
    let mut verdicts = vec![alpha, beta, pareto, iih];
    if cfg.include_ties {
        let pairs = sampler.with_ties(true).pairs(cfg.m, cfg.n);
        verdicts.push(check_iih_as(Axiom::IihWithTies, rule, &fam, &pairs)?);
    }
    verdicts.push(ir);
    let ci = check_ci(rule, cfg.m, cfg.n)?;
    let dictator = ci.witness.as_ref().and_then(|w| w.environments.first()).map(|e| e + 1);
    verdicts.push(ci);

    Ok(AxiomReport {
        rule: rule.name().to_string(),
        params: rule.params(),
        domain: Domain { m: cfg.m, n: cfg.n },
        config: cfg.clone(),
        verdicts,
        dictator,
    })
}

/// The rules of the reference audit table, over three hypotheses and three
/// environments.
pub fn reference_specs() -> Vec<RuleSpec> {
    let mut specs: Vec<RuleSpec> =
        (1..=3).map(|env_index| RuleSpec::ErmSingle { env_index }).collect();
    specs.extend([
        RuleSpec::RiskMin { risk: vec![0.3, 0.1, 0.2] },
        RuleSpec::PooledErm,
        RuleSpec::WeightedSum { weights: vec![0.5, 0.3, 0.2] },
        RuleSpec::Leximin,
        RuleSpec::ParetoFront,
        RuleSpec::Borda,
        RuleSpec::NashProduct,
    ]);
    specs
}

/// Audit configuration of the reference table.
pub fn reference_config() -> AuditConfig {
    AuditConfig { include_ties: true, ..AuditConfig::new(3, 3, 7) }
}

/// Audits every reference rule.
pub fn reference_audit() -> Result<Vec<AxiomReport>, AxiomError> {
    let cfg = reference_config();
    reference_specs()
        .iter()
        .map(|spec| audit(spec.build(cfg.m, cfg.n)?.as_ref(), &cfg))
        .collect()
}

/// Markdown table of audit results. `pass*` marks a pass by construction.
pub fn render_table(reports: &[AxiomReport]) -> String {
    let columns = [
        Axiom::Alpha,
        Axiom::Beta,
        Axiom::Pareto,
        Axiom::Iih,
        Axiom::IihWithTies,
        Axiom::Ir,
        Axiom::Ci,
    ];
    let mut out = String::from("| rule | params |");
    for c in &columns {
        out.push_str(&format!(" {c} |"));
    }
    out.push_str(" dictator |\n|---|---|");
    out.push_str(&"---|".repeat(columns.len() + 1));
    out.push('\n');
    for r in reports {
        let params = if r.params.is_null() { "-".to_string() } else { format!("`{}`", r.params) };
        out.push_str(&format!("| {} | {} |", r.rule, params));
        for c in &columns {
            let cell = match r.verdict(*c) {
                None => "",
                Some(v) if v.by_construction => "pass*",
                Some(v) if v.passed => "pass",
                Some(_) => "FAIL",
            };
            out.push_str(&format!(" {cell} |"));
        }
        let dictator = r.dictator.map_or_else(|| "none".to_string(), |d| d.to_string());
        out.push_str(&format!(" {dictator} |\n"));
    }
    out
}

/// Keeps the first failure and accumulates case counts.
fn fold(acc: &mut Verdict, next: Verdict) {
    if !acc.passed {
        return;
    }
    let total = acc.checked_count + next.checked_count;
    *acc = Verdict { checked_count: total, ..next };
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// Chooses the highest total risk; violates PO on purpose.
    pub struct Contrarian;

    impl AggregationRule for Contrarian {
        fn name(&self) -> &'static str {
            "contrarian"
        }

        fn domain(&self) -> DomainKind {
            DomainKind::Numeric
        }

        fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
            let p = numeric_view(profile);
            Ok(argmin_by(menu, |h| -p.column(h).iter().sum::<f64>()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OrdinalProfile;
    use proptest::prelude::*;

    fn choose(rule: &dyn AggregationRule, rows: Vec<Vec<f64>>, menu: Menu) -> Result<Menu, RuleError> {
        let p = RiskProfile::new(rows).unwrap();
        rule.choose(ProfileRef::Numeric(&p), menu)
    }

    // Dropping the four-element menu hides Borda's beta failures, while
    // the Pareto front still fails beta on triples.
    #[test]
    fn capped_family_changes_a_verdict() {
        let u = Universe::of_size(4).unwrap();
        let full = FeasibleFamily::enumerate(&u, None).unwrap();
        let capped = FeasibleFamily::enumerate(&u, Some(3)).unwrap();
        let profiles = audit_profiles(4, 3, 200, 5);
        let beta_holds = |rule: &dyn AggregationRule, fam: &FeasibleFamily| {
            profiles.iter().all(|p| {
                let cc = induce(rule, ProfileRef::Numeric(p), fam).unwrap();
                check_beta(&cc, fam).unwrap().passed
            })
        };
        assert!(!beta_holds(&Borda, &full));
        assert!(beta_holds(&Borda, &capped));
        assert!(!beta_holds(&ParetoFront, &full));
        assert!(!beta_holds(&ParetoFront, &capped));
        assert!(beta_holds(&Leximin, &full) && beta_holds(&Leximin, &capped));
    }

    #[test]
    fn erm_single_examples() {
        let full = Menu::full(3);
        assert_eq!(choose(&ErmSingle::new(0), vec![vec![0.1, 0.2, 0.3]], full).unwrap(), Menu::singleton(0));
        assert_eq!(choose(&ErmSingle::new(0), vec![vec![0.1, 0.1, 0.3]], full).unwrap(), Menu::pair(0, 1));
        let rows = vec![vec![0.1, 0.2, 0.3], vec![0.5, 0.4, 0.2]];
        assert_eq!(choose(&ErmSingle::new(1), rows, full).unwrap(), Menu::singleton(2));
        assert!(matches!(
            choose(&ErmSingle::new(3), vec![vec![0.0]], Menu::singleton(0)),
            Err(RuleError::EnvIndexOutOfRange { .. })
        ));
        assert!(RuleSpec::ErmSingle { env_index: 4 }.build(3, 3).is_err());
    }

    #[test]
    fn risk_min_examples() {
        let r = RiskMin::fixed(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(choose(&r, vec![vec![0.0; 3]], Menu::pair(0, 2)).unwrap(), Menu::singleton(2));
        // pooled mean: f = 1.5, g = 0.5
        let rows = vec![vec![0.0, 1.0], vec![3.0, 0.0]];
        assert_eq!(choose(&RiskMin::pooled(), rows, Menu::full(2)).unwrap(), Menu::singleton(1));
        let flat = RiskMin::fixed(vec![1.0; 3]).unwrap();
        assert_eq!(choose(&flat, vec![vec![0.0; 3]], Menu::full(3)).unwrap(), Menu::full(3));
    }

    #[test]
    fn weighted_sum_examples() {
        let rows = vec![vec![0.0, 1.0], vec![3.0, 0.0]];
        let even = WeightedSum::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(choose(&even, rows.clone(), Menu::full(2)).unwrap(), Menu::singleton(1));
        // f: 1*0 + 0.01*3 = 0.03, g: 1*1 + 0 = 1
        let skew = WeightedSum::new(vec![1.0, 0.01]).unwrap();
        assert_eq!(choose(&skew, rows, Menu::full(2)).unwrap(), Menu::singleton(0));
        let sym = vec![vec![0.1, 0.2], vec![0.2, 0.1]];
        assert_eq!(choose(&even, sym, Menu::full(2)).unwrap(), Menu::full(2));
        assert!(matches!(WeightedSum::new(vec![1.0, 0.0]), Err(RuleError::NonPositiveWeight { .. })));
    }

    #[test]
    fn leximin_examples() {
        let rows = vec![vec![0.9, 0.5], vec![0.1, 0.5]];
        assert_eq!(choose(&Leximin, rows, Menu::full(2)).unwrap(), Menu::singleton(1));
        let rows = vec![vec![0.5, 0.5], vec![0.1, 0.5]];
        assert_eq!(choose(&Leximin, rows, Menu::full(2)).unwrap(), Menu::singleton(0));
        let rows = vec![vec![0.3, 0.3], vec![0.7, 0.7]];
        assert_eq!(choose(&Leximin, rows, Menu::full(2)).unwrap(), Menu::full(2));
    }

    #[test]
    fn pareto_front_examples() {
        let rows = vec![vec![0.0, 1.0, 0.5], vec![1.0, 0.3, 0.2]];
        assert_eq!(choose(&ParetoFront, rows, Menu::full(3)).unwrap(), Menu::pair(0, 2));
        let chain = vec![vec![0.1, 0.2, 0.3], vec![0.1, 0.2, 0.3]];
        assert_eq!(choose(&ParetoFront, chain, Menu::full(3)).unwrap(), Menu::singleton(0));
        let anti = vec![vec![0.1, 0.2, 0.3], vec![0.3, 0.2, 0.1]];
        assert_eq!(choose(&ParetoFront, anti, Menu::full(3)).unwrap(), Menu::full(3));
    }

    #[test]
    fn borda_examples() {
        let p = OrdinalProfile::from_strict_orders(&[vec![0, 1, 2], vec![0, 1, 2], vec![2, 1, 0]]).unwrap();
        assert_eq!(Borda.choose(ProfileRef::Ordinal(&p), Menu::full(3)).unwrap(), Menu::singleton(0));
        let same = OrdinalProfile::from_strict_orders(&[vec![1, 0, 2], vec![1, 0, 2]]).unwrap();
        assert_eq!(Borda.choose(ProfileRef::Ordinal(&same), Menu::full(3)).unwrap(), Menu::singleton(1));
        let split = OrdinalProfile::from_strict_orders(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(Borda.choose(ProfileRef::Ordinal(&split), Menu::full(2)).unwrap(), Menu::full(2));
        let tied = OrdinalProfile::from_groups(&[vec![vec![0, 1]]]).unwrap();
        assert!(matches!(
            Borda.choose(ProfileRef::Ordinal(&tied), Menu::full(2)),
            Err(RuleError::TiesInStrictDomain { .. })
        ));
    }

    #[test]
    fn nash_product_examples() {
        let rows = vec![vec![1.0, 2.0], vec![4.0, 2.0]];
        assert_eq!(choose(&NashProduct, rows, Menu::full(2)).unwrap(), Menu::full(2));
        let rows = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert_eq!(choose(&NashProduct, rows, Menu::full(2)).unwrap(), Menu::singleton(0));
        let rows = vec![vec![0.0, 2.0], vec![1.0, 2.0]];
        assert!(matches!(choose(&NashProduct, rows, Menu::full(2)), Err(RuleError::NonPositiveRisk { .. })));
    }

    #[test]
    fn audit_erm_single_is_dictatorial() {
        let report = audit(&ErmSingle::new(0), &AuditConfig::new(3, 3, 11)).unwrap();
        assert_eq!(report.passed(Axiom::Pareto), Some(true));
        assert_eq!(report.passed(Axiom::Iih), Some(true));
        assert_eq!(report.passed(Axiom::Ir), Some(true));
        assert_eq!(report.passed(Axiom::Alpha), Some(true));
        assert_eq!(report.passed(Axiom::Beta), Some(true));
        assert_eq!(report.passed(Axiom::Ci), Some(false));
        assert_eq!(report.dictator, Some(1));
    }

    #[test]
    fn audit_weighted_sum_fails_iih_and_ir() {
        let ws = WeightedSum::new(vec![0.5, 0.5]).unwrap();
        let report = audit(&ws, &AuditConfig::new(3, 2, 7)).unwrap();
        assert_eq!(report.passed(Axiom::Pareto), Some(true));
        assert_eq!(report.passed(Axiom::Iih), Some(false));
        assert_eq!(report.passed(Axiom::Ir), Some(false));
        assert_eq!(report.dictator, None);
    }

    #[test]
    fn audit_pareto_front_fails_beta() {
        let report = audit(&ParetoFront, &AuditConfig::new(3, 2, 7)).unwrap();
        assert_eq!(report.passed(Axiom::Beta), Some(false));
        assert_eq!(report.passed(Axiom::Pareto), Some(true));
    }

    fn zoo() -> Vec<Box<dyn AggregationRule>> {
        vec![
            Box::new(ErmSingle::new(0)),
            Box::new(RiskMin::pooled()),
            Box::new(WeightedSum::new(vec![0.2, 0.3, 0.5]).unwrap()),
            Box::new(Leximin),
            Box::new(ParetoFront),
            Box::new(Borda),
            Box::new(NashProduct),
        ]
    }

    #[test]
    fn erm_single_passes_po_iih_ir() {
        for m in 2..=4 {
            for n in 1..=4 {
                for env in 0..n {
                    let rule = ErmSingle::new(env);
                    let mut cfg = AuditConfig::new(m, n, (m * 10 + n) as u64);
                    cfg.profiles = 5;
                    cfg.iih_samples = 20;
                    cfg.ir_samples = 20;
                    let r = audit(&rule, &cfg).unwrap();
                    for axiom in [Axiom::Pareto, Axiom::Iih, Axiom::Ir, Axiom::Alpha, Axiom::Beta] {
                        assert_eq!(r.passed(axiom), Some(true), "{axiom} m={m} n={n} env={env}");
                    }
                    assert_eq!(r.dictator, Some(env + 1));
                }
            }
        }
    }

    #[test]
    fn decisiveness_is_monotone_and_matches_dictators() {
        use crate::axioms::{decisive_sets, find_dictator, is_globally_decisive, EnvSet};
        for rule in zoo() {
            let sets = decisive_sets(rule.as_ref(), 3, 3).unwrap();
            for s in &sets {
                for bits in 1u32..8 {
                    let sup = EnvSet::new((0..3).filter(|e| bits >> e & 1 == 1), 3).unwrap();
                    if s.is_subset_of(sup) {
                        assert!(sets.contains(&sup), "{} {s:?} {sup:?}", rule.name());
                    }
                }
            }
            let dictator = find_dictator(rule.as_ref(), 3, 3).unwrap();
            for e in 0..3 {
                let single = is_globally_decisive(rule.as_ref(), EnvSet::singleton(e), 3, 3).unwrap();
                assert_eq!(single && dictator.is_none_or(|d| d <= e), dictator == Some(e));
            }
        }
    }

    #[test]
    fn every_witness_replays() {
        use crate::axioms::replay;
        for rule in zoo() {
            let mut cfg = AuditConfig::new(3, 3, 21);
            cfg.include_ties = true;
            let r = audit(rule.as_ref(), &cfg).unwrap();
            for v in r.verdicts.iter().filter(|v| !v.passed) {
                let w = v.witness.as_ref().unwrap();
                assert!(replay(w, Some(rule.as_ref())).unwrap(), "{} {}", rule.name(), v.axiom);
            }
        }
    }

    fn profile_strategy() -> impl Strategy<Value = RiskProfile> {
        (2usize..=4, 1usize..=3).prop_flat_map(|(m, n)| {
            prop::collection::vec(prop::collection::vec(0.01f64..10.0, m), n)
                .prop_map(|rows| RiskProfile::new(rows).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2_500))]

        #[test]
        fn choices_are_nonempty_subsets(p in profile_strategy()) {
            let weights = vec![1.0; p.envs()];
            let mut rules = zoo();
            rules[0] = Box::new(ErmSingle::new(p.envs() - 1));
            rules[2] = Box::new(WeightedSum::new(weights).unwrap());
            for menu in Menu::full(p.hyps()).subsets() {
                for rule in &rules {
                    let chosen = rule.choose(ProfileRef::Numeric(&p), menu).unwrap();
                    prop_assert!(chosen.is_subset_of(menu));
                }
            }
        }

        #[test]
        fn pareto_front_contains_pareto_rules(p in profile_strategy()) {
            let fam = FeasibleFamily::enumerate(&Universe::of_size(p.hyps()).unwrap(), None).unwrap();
            let mut rules = zoo();
            rules[0] = Box::new(ErmSingle::new(p.envs() - 1));
            rules[2] = Box::new(WeightedSum::new(vec![0.5; p.envs()]).unwrap());
            for rule in &rules {
                if !check_pareto(rule.as_ref(), &p, &fam).unwrap().passed {
                    continue;
                }
                for &menu in fam.menus() {
                    let front = ParetoFront.choose(ProfileRef::Numeric(&p), menu).unwrap();
                    let chosen = rule.choose(ProfileRef::Numeric(&p), menu).unwrap();
                    prop_assert!(chosen.is_subset_of(front), "{} on {menu}", rule.name());
                }
            }
        }
    }

    #[test]
    fn spec_json() {
        let spec: RuleSpec = serde_json::from_str(r#"{"name":"weighted_sum","weights":[0.5,0.5]}"#).unwrap();
        assert_eq!(spec, RuleSpec::WeightedSum { weights: vec![0.5, 0.5] });
        assert_eq!(spec.build(3, 2).unwrap().name(), "weighted_sum");
        assert!(spec.build(3, 3).is_err());
    }
}
