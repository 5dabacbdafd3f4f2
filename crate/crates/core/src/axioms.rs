//! Executable axiom checks. Each check returns a [`Verdict`]; failures carry a
//! [`Witness`] that [`replay`] can re-run to reproduce the violation.
//!
//! Menus are scanned in canonical order (small menus first), so the first
//! witness found is already small. IIH and IR witnesses are then shrunk
//! greedily by resetting one environment at a time while the violation
//! persists.
//!
//! Decisiveness is evaluated on strict ordinal profiles. Rules exposing a
//! [`PairwiseRule`] factorization are checked over direction vectors, which is
//! exact for them and scales to large `n`; all other rules are checked by
//! enumerating every strict profile under [`ENUMERATION_BOUND`].

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{AxiomError, RuleError};
use crate::model::{
    apply_affine, ordinalize, AffineTransform, ChoiceCorrespondence, FeasibleFamily, HypId, Menu,
    OrdinalProfile, ProfileData, ProfileRef, RiskProfile,
};
use crate::rule::{prefers_second, AggregationRule, DomainKind, Outcome};

/// Upper bound on the number of strict profiles an enumeration may visit.
pub const ENUMERATION_BOUND: u128 = 10_000_000;

/// Largest environment count the direction-vector path accepts.
pub const PAIRWISE_ENV_BOUND: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Alpha,
    Beta,
    InternalConsistency,
    #[serde(rename = "po")]
    Pareto,
    Iih,
    IihWithTies,
    Ir,
    Ci,
    CompleteTransitive,
    Roundtrip,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Alpha => "alpha",
            Axiom::Beta => "beta",
            Axiom::InternalConsistency => "internal_consistency",
            Axiom::Pareto => "po",
            Axiom::Iih => "iih",
            Axiom::IihWithTies => "iih_with_ties",
            Axiom::Ir => "ir",
            Axiom::Ci => "ci",
            Axiom::CompleteTransitive => "complete_transitive",
            Axiom::Roundtrip => "roundtrip",
        };
        f.write_str(s)
    }
}

/// A self-contained counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub axiom: Axiom,
    pub menus: Vec<Menu>,
    pub profiles: Vec<ProfileData>,
    pub choices: Vec<Menu>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hypotheses: Vec<HypId>,
    /// Environments involved, numbered from 1 in JSON.
    #[serde(
        default,
        skip_serializing_if = "Vec::is_empty",
        serialize_with = "ser_one_based",
        deserialize_with = "de_one_based"
    )]
    pub environments: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<AffineTransform>,
    /// Environment count of the domain, for witnesses without profiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env_count: Option<usize>,
    pub note: String,
}

impl Witness {
    pub(crate) fn new(axiom: Axiom, note: impl Into<String>) -> Self {
        Self {
            axiom,
            menus: Vec::new(),
            profiles: Vec::new(),
            choices: Vec::new(),
            hypotheses: Vec::new(),
            environments: Vec::new(),
            transform: None,
            env_count: None,
            note: note.into(),
        }
    }
}

fn ser_one_based<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e + 1))
}

fn de_one_based<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
    let v = Vec::<usize>::deserialize(d)?;
    v.into_iter()
        .map(|e| e.checked_sub(1).ok_or_else(|| serde::de::Error::custom("environments start at 1")))
        .collect()
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub axiom: Axiom,
    pub passed: bool,
    pub checked_count: u64,
    /// Passed without examining cases because the rule's input cannot carry
    /// the information the axiom forbids using.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub by_construction: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass(axiom: Axiom, checked_count: u64) -> Self {
        Self { axiom, passed: true, checked_count, by_construction: false, witness: None }
    }

    pub fn fail(axiom: Axiom, checked_count: u64, witness: Witness) -> Self {
        Self { axiom, passed: false, checked_count, by_construction: false, witness: Some(witness) }
    }

    pub fn by_construction(axiom: Axiom) -> Self {
        Self { axiom, passed: true, checked_count: 0, by_construction: true, witness: None }
    }
}

/// Nonempty set of environments, stored as a bitmask over `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnvSet(u32);

impl EnvSet {
    pub fn new<I: IntoIterator<Item = usize>>(members: I, n: usize) -> Result<Self, AxiomError> {
        let mut bits = 0u32;
        for e in members {
            if e >= n || e >= 32 {
                return Err(AxiomError::BadEnvSet { envs: n });
            }
            bits |= 1 << e;
        }
        if bits == 0 {
            return Err(AxiomError::BadEnvSet { envs: n });
        }
        Ok(Self(bits))
    }

    pub fn all(n: usize) -> Self {
        Self(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(e: usize) -> Self {
        Self(1 << e)
    }

    pub(crate) fn from_bits(bits: u32) -> Self {
        debug_assert!(bits != 0);
        Self(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        e < 32 && self.0 & (1 << e) != 0
    }

    pub fn is_subset_of(self, other: EnvSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |e| bits & (1 << e) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.members().collect()
    }

    /// Set difference, `None` when empty.
    pub fn minus(self, other: EnvSet) -> Option<EnvSet> {
        let bits = self.0 & !other.0;
        (bits != 0).then_some(EnvSet(bits))
    }

    /// Splits into a first part holding the lowest `ceil(len/2)` members and
    /// the rest. `None` for singletons.
    pub fn halve(self) -> Option<(EnvSet, EnvSet)> {
        if self.len() < 2 {
            return None;
        }
        let take = self.len().div_ceil(2);
        let first = self.members().take(take).fold(0u32, |b, e| b | 1 << e);
        Some((EnvSet(first), EnvSet(self.0 & !first)))
    }
}

impl Ord for EnvSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.members().cmp(other.members()))
    }
}

impl PartialOrd for EnvSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for EnvSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.members().map(|e| e + 1))
    }
}

impl<'de> Deserialize<'de> for EnvSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        let mut bits = 0u32;
        for e in v {
            if e == 0 || e > 32 {
                return Err(serde::de::Error::custom("environments are numbered 1..=32"));
            }
            bits |= 1 << (e - 1);
        }
        if bits == 0 {
            return Err(serde::de::Error::custom("environment set must be nonempty"));
        }
        Ok(EnvSet(bits))
    }
}

// ---------------------------------------------------------------------------
// Internal consistency

/// Contraction consistency: `h ∈ A(F)`, `h ∈ G ⊆ F` implies `h ∈ A(G)`.
pub fn check_alpha(cc: &ChoiceCorrespondence, fam: &FeasibleFamily) -> Result<Verdict, AxiomError> {
    cc.ensure_covers(fam)?;
    let mut checked = 0;
    for &big in fam.menus() {
        let chosen_big = cc.get(big).expect("covered");
        for &small in fam.menus().iter().filter(|s| s.is_subset_of(big) && **s != big) {
            let chosen_small = cc.get(small).expect("covered");
            checked += 1;
            if let Some(lost) = chosen_big.intersect(small).and_then(|c| c.minus(chosen_small)) {
                let h = lost.members().next().expect("nonempty");
                let mut w = Witness::new(Axiom::Alpha, format!("{h} chosen from {big} but not from {small}"));
                w.menus = vec![big, small];
                w.choices = vec![chosen_big, chosen_small];
                w.hypotheses = vec![h];
                return Ok(Verdict::fail(Axiom::Alpha, checked, w));
            }
        }
    }
    Ok(Verdict::pass(Axiom::Alpha, checked))
}

/// Expansion consistency: if `A(G)` and `A(F)` share an element for
/// `G ⊆ F`, then `A(G) ⊆ A(F)`.
pub fn check_beta(cc: &ChoiceCorrespondence, fam: &FeasibleFamily) -> Result<Verdict, AxiomError> {
    cc.ensure_covers(fam)?;
    let mut checked = 0;
    for &big in fam.menus() {
        let chosen_big = cc.get(big).expect("covered");
        for &small in fam.menus().iter().filter(|s| s.is_subset_of(big) && **s != big) {
            let chosen_small = cc.get(small).expect("covered");
            checked += 1;
            let Some(shared) = chosen_small.intersect(chosen_big) else {
                continue;
            };
            if let Some(dropped) = chosen_small.minus(chosen_big) {
                let h = shared.members().next().expect("nonempty");
                let g = dropped.members().next().expect("nonempty");
                let mut w = Witness::new(
                    Axiom::Beta,
                    format!("{h} and {g} chosen from {small}; {h} chosen from {big} but {g} is not"),
                );
                w.menus = vec![big, small];
                w.choices = vec![chosen_big, chosen_small];
                w.hypotheses = vec![h, g];
                return Ok(Verdict::fail(Axiom::Beta, checked, w));
            }
        }
    }
    Ok(Verdict::pass(Axiom::Beta, checked))
}

/// Alpha and beta together; the witness is from whichever fails first.
pub fn check_internal_consistency(
    cc: &ChoiceCorrespondence,
    fam: &FeasibleFamily,
) -> Result<Verdict, AxiomError> {
    let alpha = check_alpha(cc, fam)?;
    if !alpha.passed {
        return Ok(Verdict { axiom: Axiom::InternalConsistency, ..alpha });
    }
    let beta = check_beta(cc, fam)?;
    Ok(Verdict {
        axiom: Axiom::InternalConsistency,
        checked_count: alpha.checked_count + beta.checked_count,
        ..beta
    })
}

// ---------------------------------------------------------------------------
// Rule axioms

/// Unanimous strict improvement forces the pair choice.
pub fn check_pareto(
    rule: &dyn AggregationRule,
    p: &RiskProfile,
    fam: &FeasibleFamily,
) -> Result<Verdict, AxiomError> {
    let mut checked = 0;
    for pair in fam.pairs() {
        let v = pair.to_vec();
        for (f, g) in [(v[0], v[1]), (v[1], v[0])] {
            if !p.strictly_dominates(f, g) {
                continue;
            }
            checked += 1;
            let chosen = rule.choose(ProfileRef::Numeric(p), pair)?;
            if chosen != Menu::singleton(f) {
                let mut w = Witness::new(
                    Axiom::Pareto,
                    format!("{f} beats {g} in every environment but the rule chose {chosen}"),
                );
                w.menus = vec![pair];
                w.profiles = vec![ProfileData::Numeric(p.clone())];
                w.choices = vec![chosen];
                w.hypotheses = vec![f, g];
                return Ok(Verdict::fail(Axiom::Pareto, checked, w));
            }
        }
    }
    Ok(Verdict::pass(Axiom::Pareto, checked))
}

/// Source of ordinally equivalent profile pairs: one random ordinal profile
/// re-scored twice with independent strictly increasing values per
/// environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IihSampler {
    pub samples: usize,
    pub seed: u64,
    pub include_ties: bool,
}

impl IihSampler {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, include_ties: false }
    }

    pub fn with_ties(mut self, include_ties: bool) -> Self {
        self.include_ties = include_ties;
        self
    }

    pub fn pairs(&self, m: usize, n: usize) -> Vec<(RiskProfile, RiskProfile)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.samples)
            .map(|_| {
                let ordinal = random_ordinal(&mut rng, m, n, self.include_ties);
                (rescore(&mut rng, &ordinal), rescore(&mut rng, &ordinal))
            })
            .collect()
    }
}

/// Random ordinal profile; strict unless `ties` is set.
pub fn random_ordinal<R: Rng>(rng: &mut R, m: usize, n: usize, ties: bool) -> OrdinalProfile {
    let tiers = (0..n)
        .map(|_| {
            if ties {
                let k = rng.gen_range(1..=m) as u32;
                let raw: Vec<u32> = (0..m).map(|_| rng.gen_range(0..k)).collect();
                let mut used = raw.clone();
                used.sort_unstable();
                used.dedup();
                raw.iter().map(|t| used.binary_search(t).unwrap() as u32).collect()
            } else {
                let mut perm: Vec<u32> = (0..m as u32).collect();
                perm.shuffle(rng);
                perm
            }
        })
        .collect();
    OrdinalProfile::from_tiers(tiers).expect("dense tiers")
}

/// Strictly increasing positive values per tier, drawn independently per
/// environment.
pub fn rescore<R: Rng>(rng: &mut R, ordinal: &OrdinalProfile) -> RiskProfile {
    let rows = (0..ordinal.envs())
        .map(|e| {
            let k = ordinal.groups(e).len();
            let mut level = rng.gen_range(0.1..5.0);
            let mut values = Vec::with_capacity(k);
            for _ in 0..k {
                values.push(level);
                level += rng.gen_range(0.05..5.0);
            }
            (0..ordinal.hyps()).map(|h| values[ordinal.tier(e, h) as usize]).collect()
        })
        .collect();
    RiskProfile::new(rows).expect("finite values")
}

/// Choices may depend only on per-environment orderings.
///
/// `pairs` must hold ordinally equal profiles; anything else is reported as
/// [`AxiomError::SamplerBug`]. Ordinal-domain rules pass by construction.
pub fn check_iih(
    rule: &dyn AggregationRule,
    fam: &FeasibleFamily,
    pairs: &[(RiskProfile, RiskProfile)],
) -> Result<Verdict, AxiomError> {
    check_iih_as(Axiom::Iih, rule, fam, pairs)
}

pub(crate) fn check_iih_as(
    axiom: Axiom,
    rule: &dyn AggregationRule,
    fam: &FeasibleFamily,
    pairs: &[(RiskProfile, RiskProfile)],
) -> Result<Verdict, AxiomError> {
    if rule.domain() == DomainKind::Ordinal {
        return Ok(Verdict::by_construction(axiom));
    }
    let mut checked = 0;
    for (p, q) in pairs {
        if ordinalize(p) != ordinalize(q) {
            return Err(AxiomError::SamplerBug);
        }
        for &menu in fam.menus() {
            checked += 1;
            let a = rule.choose(ProfileRef::Numeric(p), menu)?;
            let b = rule.choose(ProfileRef::Numeric(q), menu)?;
            if a != b {
                let q = shrink_iih(rule, p, q, menu)?;
                let b = rule.choose(ProfileRef::Numeric(&q), menu)?;
                let mut w = Witness::new(
                    axiom,
                    format!("same orderings, different choices on {menu}: {a} vs {b}"),
                );
                w.environments =
                    (0..p.envs()).filter(|&e| p.row(e) != q.row(e)).collect();
                w.menus = vec![menu];
                w.profiles = vec![ProfileData::Numeric(p.clone()), ProfileData::Numeric(q)];
                w.choices = vec![a, b];
                return Ok(Verdict::fail(axiom, checked, w));
            }
        }
    }
    Ok(Verdict::pass(axiom, checked))
}

fn shrink_iih(
    rule: &dyn AggregationRule,
    p: &RiskProfile,
    q: &RiskProfile,
    menu: Menu,
) -> Result<RiskProfile, AxiomError> {
    let base = rule.choose(ProfileRef::Numeric(p), menu)?;
    let mut rows = q.rows();
    for e in 0..p.envs() {
        let saved = std::mem::replace(&mut rows[e], p.row(e).to_vec());
        let trial = RiskProfile::new(rows.clone())?;
        if rule.choose(ProfileRef::Numeric(&trial), menu)? == base {
            rows[e] = saved;
        }
    }
    Ok(RiskProfile::new(rows)?)
}

/// `k` seeded random positive affine maps: offsets uniform in `[-10, 10]`,
/// scales log-uniform in `[0.01, 100]`.
pub fn random_affine_transforms(n: usize, k: usize, seed: u64) -> Vec<AffineTransform> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| {
            let offsets = (0..n).map(|_| rng.gen_range(-10.0..=10.0)).collect();
            let scales = (0..n)
                .map(|_| 10f64.powf(rng.gen_range(-2.0..=2.0)))
                .collect();
            AffineTransform::new(offsets, scales).expect("positive scales")
        })
        .collect()
}

/// Invariance under independent positive affine rescaling, sampled.
pub fn check_ir(
    rule: &dyn AggregationRule,
    p: &RiskProfile,
    fam: &FeasibleFamily,
    k: usize,
    seed: u64,
) -> Result<Verdict, AxiomError> {
    if k == 0 {
        return Err(AxiomError::NoSamples);
    }
    check_ir_with(rule, p, fam, &random_affine_transforms(p.envs(), k, seed))
}

/// Invariance under the given transforms. Transforms that move the profile
/// outside the rule's domain (e.g. nonpositive risks for a product rule)
/// are skipped and not counted.
pub fn check_ir_with(
    rule: &dyn AggregationRule,
    p: &RiskProfile,
    fam: &FeasibleFamily,
    transforms: &[AffineTransform],
) -> Result<Verdict, AxiomError> {
    if rule.domain() == DomainKind::Ordinal {
        return Ok(Verdict::by_construction(Axiom::Ir));
    }
    let base: Vec<Menu> = fam
        .menus()
        .iter()
        .map(|&menu| rule.choose(ProfileRef::Numeric(p), menu))
        .collect::<Result<_, _>>()?;
    let mut checked = 0;
    for t in transforms {
        let q = apply_affine(p, t)?;
        for (&menu, &expected) in fam.menus().iter().zip(&base) {
            let got = match rule.choose(ProfileRef::Numeric(&q), menu) {
                Ok(c) => c,
                Err(RuleError::NonPositiveRisk { .. }) => break,
                Err(e) => return Err(e.into()),
            };
            checked += 1;
            if got != expected {
                let t = shrink_ir(rule, p, t, menu, expected)?;
                let q = apply_affine(p, &t)?;
                let got = rule.choose(ProfileRef::Numeric(&q), menu)?;
                let mut w = Witness::new(
                    Axiom::Ir,
                    format!("affine rescaling changed the choice on {menu}: {expected} vs {got}"),
                );
                w.environments = (0..p.envs())
                    .filter(|&e| t.offset(e) != 0.0 || t.scale(e) != 1.0)
                    .collect();
                w.menus = vec![menu];
                w.profiles = vec![ProfileData::Numeric(p.clone()), ProfileData::Numeric(q)];
                w.choices = vec![expected, got];
                w.transform = Some(t);
                return Ok(Verdict::fail(Axiom::Ir, checked, w));
            }
        }
    }
    Ok(Verdict::pass(Axiom::Ir, checked))
}

fn shrink_ir(
    rule: &dyn AggregationRule,
    p: &RiskProfile,
    t: &AffineTransform,
    menu: Menu,
    expected: Menu,
) -> Result<AffineTransform, AxiomError> {
    let mut t = t.clone();
    for e in 0..p.envs() {
        let trial = t.with_identity_at(e);
        let q = apply_affine(p, &trial)?;
        if let Ok(c) = rule.choose(ProfileRef::Numeric(&q), menu) {
            if c != expected {
                t = trial;
            }
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Decisiveness

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<HypId>> {
    fn go(prefix: &mut Vec<HypId>, left: &mut Vec<HypId>, out: &mut Vec<Vec<HypId>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let h = left.remove(i);
            prefix.push(h);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, h);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

/// Number of strict profiles, `(m!)^n`, saturating.
pub fn strict_profile_count(m: usize, n: usize) -> u128 {
    let fact: u128 = (1..=m as u128).product();
    (0..n).try_fold(1u128, |acc, _| acc.checked_mul(fact)).unwrap_or(u128::MAX)
}

/// Every strict profile on `m` hypotheses and `n` environments, in
/// lexicographic order of per-environment permutations.
pub fn strict_profiles(m: usize, n: usize) -> Result<Vec<OrdinalProfile>, AxiomError> {
    let size = strict_profile_count(m, n);
    if size > ENUMERATION_BOUND {
        return Err(AxiomError::GuardExceeded { size, bound: ENUMERATION_BOUND });
    }
    let perms = permutations(m);
    let k = perms.len();
    let mut out = Vec::with_capacity(size as usize);
    let mut digits = vec![0usize; n];
    loop {
        let orders: Vec<Vec<HypId>> = digits.iter().map(|&d| perms[d].clone()).collect();
        out.push(OrdinalProfile::from_strict_orders(&orders)?);
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < k {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn check_env_set(set: EnvSet, n: usize) -> Result<(), AxiomError> {
    if n == 0 || set.is_empty() || set.members().any(|e| e >= n) {
        return Err(AxiomError::BadEnvSet { envs: n });
    }
    Ok(())
}

/// Whether `set` forces `{f}` from `{f, g}` whenever all its members rank
/// `f` above `g`, over all strict profiles.
pub fn is_locally_decisive(
    rule: &dyn AggregationRule,
    set: EnvSet,
    f: HypId,
    g: HypId,
    m: usize,
    n: usize,
) -> Result<bool, AxiomError> {
    check_env_set(set, n)?;
    if f == g || f >= m || g >= m {
        return Err(crate::error::ModelError::HypothesisOutOfRange(f.max(g)).into());
    }
    match rule.pairwise() {
        Some(pw) if n <= PAIRWISE_ENV_BOUND => {
            let (a, b) = (f.min(g), f.max(g));
            let want = if f == a { Outcome::First } else { Outcome::Second };
            let f_is_second = f == b;
            Ok((0..1usize << n).all(|d| {
                let unanimous = set.members().all(|e| prefers_second(d, e, n) == f_is_second);
                !unanimous || pw.pair_outcome(a, b, d, n) == want
            }))
        }
        _ => is_locally_decisive_enumerated(rule, set, f, g, m, n),
    }
}

/// [`is_locally_decisive`] by full profile enumeration, ignoring any
/// pairwise factorization.
pub fn is_locally_decisive_enumerated(
    rule: &dyn AggregationRule,
    set: EnvSet,
    f: HypId,
    g: HypId,
    m: usize,
    n: usize,
) -> Result<bool, AxiomError> {
    check_env_set(set, n)?;
    let menu = Menu::pair(f, g);
    for p in strict_profiles(m, n)? {
        if set.members().all(|e| p.better(e, f, g))
            && rule.choose(ProfileRef::Ordinal(&p), menu)? != Menu::singleton(f)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Locally decisive over every ordered pair.
pub fn is_globally_decisive(
    rule: &dyn AggregationRule,
    set: EnvSet,
    m: usize,
    n: usize,
) -> Result<bool, AxiomError> {
    for f in 0..m {
        for g in 0..m {
            if f != g && !is_locally_decisive(rule, set, f, g, m, n)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The lowest-indexed environment whose strict pairwise ranking always
/// dictates the pair choice, if any. CI holds iff this is `None`.
pub fn find_dictator(
    rule: &dyn AggregationRule,
    m: usize,
    n: usize,
) -> Result<Option<usize>, AxiomError> {
    if rule.pairwise().is_none() || n > PAIRWISE_ENV_BOUND {
        let size = strict_profile_count(m, n);
        if size > ENUMERATION_BOUND {
            return Err(AxiomError::GuardExceeded { size, bound: ENUMERATION_BOUND });
        }
    }
    for i in 0..n {
        if is_globally_decisive(rule, EnvSet::singleton(i), m, n)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// CI as a verdict; failure names the dictator.
pub fn check_ci(rule: &dyn AggregationRule, m: usize, n: usize) -> Result<Verdict, AxiomError> {
    match find_dictator(rule, m, n)? {
        None => Ok(Verdict::pass(Axiom::Ci, n as u64)),
        Some(i) => {
            let mut w = Witness::new(
                Axiom::Ci,
                format!("environment {} decides every pair", i + 1),
            );
            w.environments = vec![i];
            w.hypotheses = (0..m).collect();
            w.env_count = Some(n);
            Ok(Verdict::fail(Axiom::Ci, i as u64 + 1, w))
        }
    }
}

/// Every globally decisive set, ordered by size then lexicographically.
pub fn decisive_sets(
    rule: &dyn AggregationRule,
    m: usize,
    n: usize,
) -> Result<Vec<EnvSet>, AxiomError> {
    if n == 0 || n > PAIRWISE_ENV_BOUND {
        return Err(AxiomError::BadEnvSet { envs: n });
    }
    let mut sets: Vec<EnvSet> = (1u32..1 << n).map(EnvSet::from_bits).collect();
    sets.sort();
    let mut out = Vec::new();
    for set in sets {
        if is_globally_decisive(rule, set, m, n)? {
            out.push(set);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Replay

/// Re-runs the predicate a witness violates on exactly the witness data.
/// Returns `true` iff the violation is reproduced. Rule-level axioms need
/// the rule that produced the witness.
pub fn replay(w: &Witness, rule: Option<&dyn AggregationRule>) -> Result<bool, AxiomError> {
    let need_rule = || rule.ok_or(RuleError::BadParameters {
        rule: "<none>".into(),
        reason: format!("replaying a {} witness needs the rule", w.axiom),
    });
    match w.axiom {
        Axiom::Alpha | Axiom::Beta | Axiom::InternalConsistency => {
            let m = w.menus.iter().map(|m| m.span()).max().unwrap_or(1);
            let cc = ChoiceCorrespondence::new(
                m,
                w.menus.iter().copied().zip(w.choices.iter().copied()).collect::<BTreeMap<_, _>>(),
            )?;
            let fam = FeasibleFamily::restricted(m, w.menus.clone())?;
            let v = match w.axiom {
                Axiom::Alpha => check_alpha(&cc, &fam)?,
                Axiom::Beta => check_beta(&cc, &fam)?,
                _ => check_internal_consistency(&cc, &fam)?,
            };
            Ok(!v.passed)
        }
        Axiom::Pareto => {
            let rule = need_rule()?;
            let (Some(ProfileData::Numeric(p)), &[f, g]) = (w.profiles.first(), &w.hypotheses[..]) else {
                return Ok(false);
            };
            Ok(p.strictly_dominates(f, g)
                && rule.choose(ProfileRef::Numeric(p), Menu::pair(f, g))? != Menu::singleton(f))
        }
        Axiom::Iih | Axiom::IihWithTies | Axiom::Ir => {
            let rule = need_rule()?;
            let ([ProfileData::Numeric(p), ProfileData::Numeric(q)], [menu]) =
                (&w.profiles[..], &w.menus[..])
            else {
                return Ok(false);
            };
            let related = if w.axiom == Axiom::Ir {
                match &w.transform {
                    Some(t) => apply_affine(p, t)? == *q,
                    None => false,
                }
            } else {
                ordinalize(p) == ordinalize(q)
            };
            Ok(related
                && rule.choose(ProfileRef::Numeric(p), *menu)?
                    != rule.choose(ProfileRef::Numeric(q), *menu)?)
        }
        Axiom::Ci => {
            let rule = need_rule()?;
            let (Some(&i), Some(n), m) = (w.environments.first(), w.env_count, w.hypotheses.len())
            else {
                return Ok(false);
            };
            Ok(i < n && is_globally_decisive(rule, EnvSet::singleton(i), m, n)?)
        }
        Axiom::CompleteTransitive | Axiom::Roundtrip => crate::revealed::replay_witness(w),
    }
}
