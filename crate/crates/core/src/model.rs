//! Finite domain model: hypothesis universes, menus, risk profiles, ordinal
//! profiles and choice correspondences.
//!
//! Hypotheses are identified by their position in a [`Universe`]
//! (`0..m`). Menus and chosen sets are bitmasks over those positions, so the
//! universe is capped at [`MAX_UNIVERSE`] hypotheses. Environments are indexed
//! `0..n` throughout the Rust API; JSON reports number them from 1.
//!
//! Lower risk is better everywhere. [`OrdinalProfile`] stores tiers where
//! tier 0 is the best (lowest-risk) group.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Largest supported universe.
pub const MAX_UNIVERSE: usize = 16;

/// Position of a hypothesis inside its universe.
pub type HypId = usize;

/// The hypothesis space: an ordered list of distinct labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    /// Builds a universe from distinct labels. Hypothesis `i` is `labels[i]`.
    pub fn new<I, S>(labels: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::EmptyUniverse);
        }
        if labels.len() > MAX_UNIVERSE {
            return Err(ModelError::UniverseTooLarge(labels.len()));
        }
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(ModelError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Universe `{h1, .., hm}`.
    pub fn of_size(m: usize) -> Result<Self, ModelError> {
        Self::new((1..=m).map(|i| format!("h{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, h: HypId) -> &str {
        &self.labels[h]
    }

    pub fn index_of(&self, label: &str) -> Option<HypId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn ids(&self) -> impl Iterator<Item = HypId> {
        0..self.labels.len()
    }

    /// The menu holding every hypothesis.
    pub fn full_menu(&self) -> Menu {
        Menu::full(self.len())
    }
}

impl<'de> Deserialize<'de> for Universe {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(d)?;
        Universe::new(labels).map_err(D::Error::custom)
    }
}

/// A nonempty set of hypotheses, stored as a bitmask.
///
/// Ordering is canonical: by size, then lexicographically by members.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Menu(u32);

impl Menu {
    /// Builds a menu from hypothesis ids. Duplicates collapse.
    pub fn new<I: IntoIterator<Item = HypId>>(members: I) -> Result<Self, ModelError> {
        let mut bits = 0u32;
        for h in members {
            if h >= MAX_UNIVERSE {
                return Err(ModelError::HypothesisOutOfRange(h));
            }
            bits |= 1 << h;
        }
        Self::from_bits(bits)
    }

    pub fn from_bits(bits: u32) -> Result<Self, ModelError> {
        if bits == 0 {
            return Err(ModelError::EmptyMenu);
        }
        if bits >> MAX_UNIVERSE != 0 {
            return Err(ModelError::HypothesisOutOfRange(31 - bits.leading_zeros() as usize));
        }
        Ok(Self(bits))
    }

    pub fn singleton(h: HypId) -> Self {
        Self(1 << h)
    }

    pub fn pair(a: HypId, b: HypId) -> Self {
        debug_assert_ne!(a, b);
        Self((1 << a) | (1 << b))
    }

    pub fn full(m: usize) -> Self {
        Self(((1u64 << m) - 1) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Always false; menus are nonempty by construction.
    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, h: HypId) -> bool {
        h < 32 && self.0 & (1 << h) != 0
    }

    pub fn is_subset_of(self, other: Menu) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest hypothesis id plus one.
    pub fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn members(self) -> impl Iterator<Item = HypId> {
        let bits = self.0;
        (0..MAX_UNIVERSE).filter(move |h| bits & (1 << h) != 0)
    }

    pub fn to_vec(self) -> Vec<HypId> {
        self.members().collect()
    }

    /// Intersection, `None` when empty.
    pub fn intersect(self, other: Menu) -> Option<Menu> {
        let bits = self.0 & other.0;
        (bits != 0).then_some(Menu(bits))
    }

    /// Set difference, `None` when empty.
    pub fn minus(self, other: Menu) -> Option<Menu> {
        let bits = self.0 & !other.0;
        (bits != 0).then_some(Menu(bits))
    }

    pub fn union(self, other: Menu) -> Menu {
        Menu(self.0 | other.0)
    }

    /// Nonempty proper and improper subsets, in canonical order.
    pub fn subsets(self) -> Vec<Menu> {
        let mut out = Vec::new();
        let mut sub = self.0;
        while sub != 0 {
            out.push(Menu(sub));
            sub = (sub - 1) & self.0;
        }
        out.sort();
        out
    }
}

impl Ord for Menu {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl PartialOrd for Menu {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Menu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

impl fmt::Display for Menu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, h) in self.members().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Menu {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.members())
    }
}

impl<'de> Deserialize<'de> for Menu {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ids = Vec::<HypId>::deserialize(d)?;
        let mut seen = BTreeSet::new();
        for &h in &ids {
            if !seen.insert(h) {
                return Err(D::Error::custom(format!("duplicate hypothesis {h} in menu")));
            }
        }
        Menu::new(ids).map_err(D::Error::custom)
    }
}

/// Collection of menus over one universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibleFamily {
    universe_size: usize,
    menus: Vec<Menu>,
}

impl FeasibleFamily {
    /// All nonempty subsets of `u` with at most `max_size` members.
    pub fn enumerate(u: &Universe, max_size: Option<usize>) -> Result<Self, ModelError> {
        if let Some(cap) = max_size {
            if cap < 3 {
                return Err(ModelError::MenuCapTooSmall(cap));
            }
        }
        let m = u.len();
        let cap = max_size.unwrap_or(m);
        let menus = Menu::full(m)
            .subsets()
            .into_iter()
            .filter(|menu| menu.len() <= cap)
            .collect();
        Ok(Self { universe_size: m, menus })
    }

    /// A custom family. Every singleton, pair and triple must be present.
    pub fn from_menus(m: usize, menus: Vec<Menu>) -> Result<Self, ModelError> {
        let fam = Self::restricted(m, menus)?;
        for required in Menu::full(m).subsets().into_iter().filter(|s| s.len() <= 3) {
            if !fam.contains(required) {
                return Err(ModelError::MissingRequiredMenu(required.to_vec()));
            }
        }
        Ok(fam)
    }

    /// A custom family without the singleton/pair/triple coverage requirement.
    /// Used for replaying witnesses and for restricted-domain experiments.
    pub fn restricted(m: usize, mut menus: Vec<Menu>) -> Result<Self, ModelError> {
        if m == 0 || m > MAX_UNIVERSE {
            return Err(ModelError::UniverseTooLarge(m));
        }
        for menu in &menus {
            if menu.span() > m {
                return Err(ModelError::MenuOutsideUniverse(menu.to_vec()));
            }
        }
        menus.sort();
        if let Some(w) = menus.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateMenu(w[0].to_vec()));
        }
        Ok(Self { universe_size: m, menus })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn menus(&self) -> &[Menu] {
        &self.menus
    }

    pub fn len(&self) -> usize {
        self.menus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.menus.is_empty()
    }

    pub fn contains(&self, menu: Menu) -> bool {
        self.menus.binary_search(&menu).is_ok()
    }

    pub fn pairs(&self) -> impl Iterator<Item = Menu> + '_ {
        self.menus.iter().copied().filter(|m| m.len() == 2)
    }
}

/// Numeric risks, one row per environment, one column per hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile {
    n: usize,
    m: usize,
    values: Vec<f64>,
}

impl RiskProfile {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let n = rows.len();
        if n == 0 {
            return Err(ModelError::NoEnvironments);
        }
        let m = rows[0].len();
        if m == 0 || m > MAX_UNIVERSE {
            return Err(ModelError::UniverseTooLarge(m));
        }
        let mut values = Vec::with_capacity(n * m);
        for (env, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::RaggedProfile { env, expected: m, found: row.len() });
            }
            for (hyp, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::NonFiniteRisk { env, hyp });
                }
            }
            values.extend(row);
        }
        Ok(Self { n, m, values })
    }

    /// One environment.
    pub fn single(row: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(vec![row])
    }

    pub fn envs(&self) -> usize {
        self.n
    }

    pub fn hyps(&self) -> usize {
        self.m
    }

    pub fn get(&self, env: usize, hyp: HypId) -> f64 {
        self.values[env * self.m + hyp]
    }

    pub fn row(&self, env: usize) -> &[f64] {
        &self.values[env * self.m..(env + 1) * self.m]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|e| self.row(e).to_vec()).collect()
    }

    /// Risk vector of one hypothesis across environments.
    pub fn column(&self, hyp: HypId) -> Vec<f64> {
        (0..self.n).map(|e| self.get(e, hyp)).collect()
    }

    /// True iff `f` has strictly lower risk than `g` in every environment.
    pub fn strictly_dominates(&self, f: HypId, g: HypId) -> bool {
        (0..self.n).all(|e| self.get(e, f) < self.get(e, g))
    }

    /// Applies `map(env, value)` to every entry.
    pub fn map_entries(&self, mut map: impl FnMut(usize, f64) -> f64) -> Result<Self, ModelError> {
        Self::new(
            (0..self.n)
                .map(|e| self.row(e).iter().map(|&v| map(e, v)).collect())
                .collect(),
        )
    }
}

impl Serialize for RiskProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq((0..self.n).map(|e| self.row(e)))
    }
}

impl<'de> Deserialize<'de> for RiskProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        RiskProfile::new(rows).map_err(D::Error::custom)
    }
}

/// Per-environment weak orders. `tiers[e][h]` is the rank group of `h` in
/// environment `e`; tier 0 is best. Tiers are dense (`0..k` all used).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrdinalProfile {
    m: usize,
    tiers: Vec<Vec<u32>>,
    strict: bool,
}

impl OrdinalProfile {
    pub fn from_tiers(tiers: Vec<Vec<u32>>) -> Result<Self, ModelError> {
        if tiers.is_empty() {
            return Err(ModelError::NoEnvironments);
        }
        let m = tiers[0].len();
        if m == 0 || m > MAX_UNIVERSE {
            return Err(ModelError::UniverseTooLarge(m));
        }
        let mut strict = true;
        for (env, row) in tiers.iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::RaggedProfile { env, expected: m, found: row.len() });
            }
            let used: BTreeSet<u32> = row.iter().copied().collect();
            if used.iter().copied().ne(0..used.len() as u32) {
                return Err(ModelError::SparseTiers { env });
            }
            strict &= used.len() == m;
        }
        Ok(Self { m, tiers, strict })
    }

    /// Strict orders given best-first, one permutation of `0..m` per environment.
    pub fn from_strict_orders(orders: &[Vec<HypId>]) -> Result<Self, ModelError> {
        let tiers = orders
            .iter()
            .enumerate()
            .map(|(env, order)| {
                let mut row = vec![u32::MAX; order.len()];
                for (pos, &h) in order.iter().enumerate() {
                    if h >= order.len() || row[h] != u32::MAX {
                        return Err(ModelError::NotAPermutation { env });
                    }
                    row[h] = pos as u32;
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_tiers(tiers)
    }

    /// Weak orders given best-first as groups of tied hypotheses.
    pub fn from_groups(groups: &[Vec<Vec<HypId>>]) -> Result<Self, ModelError> {
        let tiers = groups
            .iter()
            .enumerate()
            .map(|(env, env_groups)| {
                let m: usize = env_groups.iter().map(Vec::len).sum();
                let mut row = vec![u32::MAX; m];
                for (tier, group) in env_groups.iter().enumerate() {
                    for &h in group {
                        if h >= m || row[h] != u32::MAX {
                            return Err(ModelError::NotAPermutation { env });
                        }
                        row[h] = tier as u32;
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_tiers(tiers)
    }

    pub fn envs(&self) -> usize {
        self.tiers.len()
    }

    pub fn hyps(&self) -> usize {
        self.m
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn tier(&self, env: usize, h: HypId) -> u32 {
        self.tiers[env][h]
    }

    pub fn tiers(&self) -> &[Vec<u32>] {
        &self.tiers
    }

    /// True iff environment `env` ranks `a` strictly above (better than) `b`.
    pub fn better(&self, env: usize, a: HypId, b: HypId) -> bool {
        self.tiers[env][a] < self.tiers[env][b]
    }

    pub fn tied(&self, env: usize, a: HypId, b: HypId) -> bool {
        self.tiers[env][a] == self.tiers[env][b]
    }

    /// Groups of tied hypotheses, best first.
    pub fn groups(&self, env: usize) -> Vec<Vec<HypId>> {
        let row = &self.tiers[env];
        let k = row.iter().max().map_or(0, |t| t + 1) as usize;
        let mut groups = vec![Vec::new(); k];
        for (h, &t) in row.iter().enumerate() {
            groups[t as usize].push(h);
        }
        groups
    }

    /// Re-scores each hypothesis by its rank position (best = 1).
    pub fn rank_scores(&self) -> RiskProfile {
        RiskProfile {
            n: self.envs(),
            m: self.m,
            values: self.tiers.iter().flatten().map(|&t| f64::from(t + 1)).collect(),
        }
    }
}

impl Serialize for OrdinalProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq((0..self.envs()).map(|e| self.groups(e)))
    }
}

impl<'de> Deserialize<'de> for OrdinalProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let groups = Vec::<Vec<Vec<HypId>>>::deserialize(d)?;
        OrdinalProfile::from_groups(&groups).map_err(D::Error::custom)
    }
}

/// Per-environment rankings of a numeric profile. Exact comparison: equal
/// values tie.
pub fn ordinalize(p: &RiskProfile) -> OrdinalProfile {
    let tiers = (0..p.envs())
        .map(|e| {
            let row = p.row(e);
            let mut distinct: Vec<f64> = row.to_vec();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            row.iter()
                .map(|v| distinct.partition_point(|d| d < v) as u32)
                .collect()
        })
        .collect();
    OrdinalProfile::from_tiers(tiers).expect("tiers derived from a valid profile are dense")
}

/// Either kind of profile, as consumed by aggregation rules.
#[derive(Debug, Clone, Copy)]
pub enum ProfileRef<'a> {
    Numeric(&'a RiskProfile),
    Ordinal(&'a OrdinalProfile),
}

impl ProfileRef<'_> {
    pub fn envs(&self) -> usize {
        match self {
            ProfileRef::Numeric(p) => p.envs(),
            ProfileRef::Ordinal(p) => p.envs(),
        }
    }

    pub fn hyps(&self) -> usize {
        match self {
            ProfileRef::Numeric(p) => p.hyps(),
            ProfileRef::Ordinal(p) => p.hyps(),
        }
    }

    pub fn to_owned(&self) -> ProfileData {
        match self {
            ProfileRef::Numeric(p) => ProfileData::Numeric((*p).clone()),
            ProfileRef::Ordinal(p) => ProfileData::Ordinal((*p).clone()),
        }
    }
}

/// Owned profile of either kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileData {
    Numeric(RiskProfile),
    Ordinal(OrdinalProfile),
}

impl ProfileData {
    pub fn as_ref(&self) -> ProfileRef<'_> {
        match self {
            ProfileData::Numeric(p) => ProfileRef::Numeric(p),
            ProfileData::Ordinal(p) => ProfileRef::Ordinal(p),
        }
    }
}

/// A learning algorithm on a family: each menu maps to a nonempty subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceCorrespondence {
    m: usize,
    assignment: BTreeMap<Menu, Menu>,
}

impl ChoiceCorrespondence {
    pub fn new(m: usize, assignment: BTreeMap<Menu, Menu>) -> Result<Self, ModelError> {
        let cc = Self { m, assignment };
        cc.validate()?;
        Ok(cc)
    }

    pub fn from_pairs<I: IntoIterator<Item = (Menu, Menu)>>(
        m: usize,
        pairs: I,
    ) -> Result<Self, ModelError> {
        Self::new(m, pairs.into_iter().collect())
    }

    /// Nonemptiness and containment on every menu.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (&menu, &chosen) in &self.assignment {
            if menu.span() > self.m {
                return Err(ModelError::MenuOutsideUniverse(menu.to_vec()));
            }
            if !chosen.is_subset_of(menu) {
                return Err(ModelError::ChoiceNotInMenu {
                    menu: menu.to_vec(),
                    chosen: chosen.to_vec(),
                });
            }
        }
        Ok(())
    }

    pub fn universe_size(&self) -> usize {
        self.m
    }

    pub fn get(&self, menu: Menu) -> Option<Menu> {
        self.assignment.get(&menu).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Menu, Menu)> + '_ {
        self.assignment.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn menus(&self) -> impl Iterator<Item = Menu> + '_ {
        self.assignment.keys().copied()
    }

    /// Error naming the first menu of `fam` the correspondence does not cover.
    pub fn ensure_covers(&self, fam: &FeasibleFamily) -> Result<(), ModelError> {
        match fam.menus().iter().find(|m| !self.assignment.contains_key(m)) {
            Some(missing) => Err(ModelError::MissingMenu(missing.to_vec())),
            None => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChoiceEntry {
    menu: Menu,
    chosen: Menu,
}

#[derive(Serialize, Deserialize)]
struct ChoiceDoc {
    universe_size: usize,
    entries: Vec<ChoiceEntry>,
}

impl Serialize for ChoiceCorrespondence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ChoiceDoc {
            universe_size: self.m,
            entries: self.iter().map(|(menu, chosen)| ChoiceEntry { menu, chosen }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChoiceCorrespondence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ChoiceDoc::deserialize(d)?;
        let mut assignment = BTreeMap::new();
        for e in doc.entries {
            if assignment.insert(e.menu, e.chosen).is_some() {
                return Err(D::Error::custom(format!("menu {} listed twice", e.menu)));
            }
        }
        ChoiceCorrespondence::new(doc.universe_size, assignment).map_err(D::Error::custom)
    }
}

/// Per-environment positive affine map `r -> offset + scale * r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineTransform {
    offsets: Vec<f64>,
    scales: Vec<f64>,
}

impl AffineTransform {
    pub fn new(offsets: Vec<f64>, scales: Vec<f64>) -> Result<Self, ModelError> {
        if offsets.len() != scales.len() {
            return Err(ModelError::TransformArity {
                expected: offsets.len(),
                found: scales.len(),
            });
        }
        for (env, (&a, &b)) in offsets.iter().zip(&scales).enumerate() {
            if b <= 0.0 || !b.is_finite() || !a.is_finite() {
                return Err(ModelError::NonPositiveScale { env, scale: b });
            }
        }
        Ok(Self { offsets, scales })
    }

    pub fn identity(n: usize) -> Self {
        Self { offsets: vec![0.0; n], scales: vec![1.0; n] }
    }

    pub fn envs(&self) -> usize {
        self.offsets.len()
    }

    pub fn offset(&self, env: usize) -> f64 {
        self.offsets[env]
    }

    pub fn scale(&self, env: usize) -> f64 {
        self.scales[env]
    }

    /// Copy with environment `env` reset to the identity map.
    pub fn with_identity_at(&self, env: usize) -> Self {
        let mut t = self.clone();
        t.offsets[env] = 0.0;
        t.scales[env] = 1.0;
        t
    }
}

/// Entry-wise `offset_i + scale_i * r_i(h)`.
pub fn apply_affine(p: &RiskProfile, t: &AffineTransform) -> Result<RiskProfile, ModelError> {
    if t.envs() != p.envs() {
        return Err(ModelError::TransformArity { expected: p.envs(), found: t.envs() });
    }
    p.map_entries(|e, v| t.offset(e) + t.scale(e) * v)
}

/// Strictly increasing maps from a closed catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneTransform {
    /// `intercept + slope * x`, slope > 0.
    Affine { slope: f64, intercept: f64 },
    /// `cubic * x^3 + linear * x`, cubic >= 0, linear > 0.
    CubicPlusLinear { cubic: f64, linear: f64 },
    /// `scale * exp(rate * x)`, scale > 0, rate > 0.
    Exponential { scale: f64, rate: f64 },
    /// `amplitude * atan(x) + linear * x`, amplitude >= 0, linear > 0.
    ArctanPlusLinear { amplitude: f64, linear: f64 },
}

impl MonotoneTransform {
    pub fn affine(slope: f64, intercept: f64) -> Result<Self, ModelError> {
        Self::Affine { slope, intercept }.validated()
    }

    pub fn cubic_plus_linear(cubic: f64, linear: f64) -> Result<Self, ModelError> {
        Self::CubicPlusLinear { cubic, linear }.validated()
    }

    pub fn exponential(scale: f64, rate: f64) -> Result<Self, ModelError> {
        Self::Exponential { scale, rate }.validated()
    }

    pub fn arctan_plus_linear(amplitude: f64, linear: f64) -> Result<Self, ModelError> {
        Self::ArctanPlusLinear { amplitude, linear }.validated()
    }

    /// One representative of each catalogue entry.
    pub fn catalogue() -> Vec<Self> {
        vec![
            Self::Affine { slope: 2.5, intercept: -1.0 },
            Self::CubicPlusLinear { cubic: 1.0, linear: 0.5 },
            Self::Exponential { scale: 1.0, rate: 1.0 },
            Self::ArctanPlusLinear { amplitude: 3.0, linear: 0.1 },
        ]
    }

    fn validated(self) -> Result<Self, ModelError> {
        let ok = match self {
            Self::Affine { slope, intercept } => slope > 0.0 && intercept.is_finite(),
            Self::CubicPlusLinear { cubic, linear } => cubic >= 0.0 && linear > 0.0,
            Self::Exponential { scale, rate } => scale > 0.0 && rate > 0.0,
            Self::ArctanPlusLinear { amplitude, linear } => amplitude >= 0.0 && linear > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(ModelError::NotStrictlyIncreasing(format!("{self:?}")))
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Self::Affine { slope, intercept } => intercept + slope * x,
            Self::CubicPlusLinear { cubic, linear } => cubic * x * x * x + linear * x,
            Self::Exponential { scale, rate } => scale * (rate * x).exp(),
            Self::ArctanPlusLinear { amplitude, linear } => amplitude * x.atan() + linear * x,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_construction() {
        let u = Universe::new(["f", "g", "h"]).unwrap();
        assert_eq!(u.len(), 3);
        assert_eq!(
            Universe::new(["f", "f"]).unwrap_err(),
            ModelError::DuplicateLabel("f".into())
        );
        assert_eq!(Universe::new(Vec::<String>::new()).unwrap_err(), ModelError::EmptyUniverse);
    }

    #[test]
    fn menu_counts() {
        let u3 = Universe::of_size(3).unwrap();
        assert_eq!(FeasibleFamily::enumerate(&u3, None).unwrap().len(), 7);
        let u4 = Universe::of_size(4).unwrap();
        let fam = FeasibleFamily::enumerate(&u4, Some(3)).unwrap();
        // C(4,1) + C(4,2) + C(4,3)
        let brute = (1u32..16).filter(|b| b.count_ones() <= 3).count();
        assert_eq!(brute, 14);
        assert_eq!(fam.len(), brute);
        assert_eq!(
            FeasibleFamily::enumerate(&u3, Some(2)).unwrap_err(),
            ModelError::MenuCapTooSmall(2)
        );
    }

    #[test]
    fn menus_are_canonically_ordered() {
        let fam = FeasibleFamily::enumerate(&Universe::of_size(3).unwrap(), None).unwrap();
        let listed: Vec<Vec<usize>> = fam.menus().iter().map(|m| m.to_vec()).collect();
        assert_eq!(
            listed,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn custom_family_needs_small_menus() {
        let err = FeasibleFamily::from_menus(3, vec![Menu::full(3)]).unwrap_err();
        assert!(matches!(err, ModelError::MissingRequiredMenu(_)));
    }

    #[test]
    fn ordinalize_examples() {
        let p = RiskProfile::single(vec![0.1, 0.2, 0.3]).unwrap();
        let o = ordinalize(&p);
        assert!(o.is_strict());
        assert_eq!(o.groups(0), vec![vec![0], vec![1], vec![2]]);

        let tie = ordinalize(&RiskProfile::single(vec![0.5, 0.5]).unwrap());
        assert!(!tie.is_strict());
        assert!(tie.tied(0, 0, 1));

        let opposite = ordinalize(&RiskProfile::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap());
        assert!(opposite.better(0, 0, 1));
        assert!(opposite.better(1, 1, 0));
    }

    #[test]
    fn affine_examples() {
        let p = RiskProfile::single(vec![1.0, 2.0]).unwrap();
        let t = AffineTransform::new(vec![3.0], vec![2.0]).unwrap();
        assert_eq!(apply_affine(&p, &t).unwrap().row(0), &[5.0, 7.0]);
        assert_eq!(apply_affine(&p, &AffineTransform::identity(1)).unwrap(), p);
        assert!(matches!(
            AffineTransform::new(vec![0.0], vec![-1.0]),
            Err(ModelError::NonPositiveScale { .. })
        ));
    }

    #[test]
    fn choice_must_stay_in_menu() {
        let err = ChoiceCorrespondence::from_pairs(
            3,
            [(Menu::pair(0, 1), Menu::singleton(2))],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::ChoiceNotInMenu { .. }));
        assert_eq!(Menu::new([]).unwrap_err(), ModelError::EmptyMenu);
    }

    #[test]
    fn json_shapes() {
        let u = Universe::new(["f", "g"]).unwrap();
        assert_eq!(serde_json::to_string(&u).unwrap(), r#"["f","g"]"#);
        let p = RiskProfile::new(vec![vec![0.0, 1.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[0.0,1.0],[3.0,0.0]]");
        let o = OrdinalProfile::from_groups(&[vec![vec![1], vec![0, 2]]]).unwrap();
        let text = serde_json::to_string(&o).unwrap();
        assert_eq!(text, "[[[1],[0,2]]]");
        assert_eq!(serde_json::from_str::<OrdinalProfile>(&text).unwrap(), o);
        let cc = ChoiceCorrespondence::from_pairs(
            2,
            [(Menu::pair(0, 1), Menu::singleton(1)), (Menu::singleton(0), Menu::singleton(0))],
        )
        .unwrap();
        let text = serde_json::to_string(&cc).unwrap();
        assert_eq!(
            text,
            r#"{"universe_size":2,"entries":[{"menu":[0],"chosen":[0]},{"menu":[0,1],"chosen":[1]}]}"#
        );
        assert_eq!(serde_json::from_str::<ChoiceCorrespondence>(&text).unwrap(), cc);
        assert!(serde_json::from_str::<Menu>("[1,1]").is_err());
    }

    #[test]
    fn catalogue_rejects_decreasing() {
        assert!(MonotoneTransform::affine(-1.0, 0.0).is_err());
        assert!(MonotoneTransform::exponential(1.0, 0.0).is_err());
        for c in MonotoneTransform::catalogue() {
            assert!(c.apply(-1.0) < c.apply(0.0) && c.apply(0.0) < c.apply(1.5), "{c:?}");
        }
    }
}
