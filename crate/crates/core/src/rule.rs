//! Aggregation rules: maps from a risk profile to a choice on each menu.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::error::RuleError;
use crate::model::{
    ordinalize, ChoiceCorrespondence, FeasibleFamily, HypId, Menu, OrdinalProfile, ProfileRef,
    RiskProfile,
};

/// Which profile content a rule consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Numeric,
    Ordinal,
}

/// Social outcome on a pair `(a, b)` with `a < b`.
/// Ordered like its digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    First,
    Second,
    Indifferent,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::First, Outcome::Second, Outcome::Indifferent];

    /// Base-3 digit used in canonical table encodings.
    pub fn digit(self) -> u8 {
        match self {
            Outcome::First => 0,
            Outcome::Second => 1,
            Outcome::Indifferent => 2,
        }
    }

    pub fn from_digit(d: u8) -> Option<Self> {
        Self::ALL.get(d as usize).copied()
    }

    /// Chosen subset of the pair menu `{a, b}`.
    pub fn chosen(self, a: HypId, b: HypId) -> Menu {
        match self {
            Outcome::First => Menu::singleton(a),
            Outcome::Second => Menu::singleton(b),
            Outcome::Indifferent => Menu::pair(a, b),
        }
    }

    /// Outcome as seen from the reversed pair `(b, a)`.
    pub fn flipped(self) -> Self {
        match self {
            Outcome::First => Outcome::Second,
            Outcome::Second => Outcome::First,
            Outcome::Indifferent => Outcome::Indifferent,
        }
    }
}

/// Canonical index of the direction vector of pair `(a, b)`, `a < b`.
///
/// Environment 0 is the most significant bit; a set bit means the
/// environment ranks `b` above `a`. Index 0 is "every environment prefers
/// `a`", index `2^n - 1` is "every environment prefers `b`".
pub fn direction_index(p: &OrdinalProfile, a: HypId, b: HypId) -> usize {
    let n = p.envs();
    (0..n).fold(0, |acc, e| (acc << 1) | usize::from(p.better(e, b, a)))
}

/// True iff environment `env` prefers the second hypothesis in direction `idx`.
pub fn prefers_second(idx: usize, env: usize, n: usize) -> bool {
    idx >> (n - 1 - env) & 1 == 1
}

/// A rule whose pair choices depend only on each environment's ranking of
/// that pair (the IIH factorization on strict profiles).
pub trait PairwiseRule: Send + Sync {
    /// Outcome on pair `(a, b)`, `a < b`, given the canonical direction index
    /// over `n` environments.
    fn pair_outcome(&self, a: HypId, b: HypId, direction: usize, n: usize) -> Outcome;
}

/// An aggregation rule `F`. Implementations return a nonempty subset of the
/// menu for every profile in their domain.
pub trait AggregationRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// Rule parameters as JSON, for reports.
    fn params(&self) -> serde_json::Value {
        serde_json::Value::Null
    }

    fn domain(&self) -> DomainKind;

    /// Choice on `menu`. Numeric rules handed an ordinal profile score it by
    /// rank position; ordinal rules handed a numeric profile ordinalize it.
    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError>;

    /// The pairwise factorization, if the rule has one.
    fn pairwise(&self) -> Option<&dyn PairwiseRule> {
        None
    }
}

/// Numeric content of a profile; ordinal profiles are scored by tier.
pub fn numeric_view<'a>(profile: ProfileRef<'a>) -> Cow<'a, RiskProfile> {
    match profile {
        ProfileRef::Numeric(p) => Cow::Borrowed(p),
        ProfileRef::Ordinal(o) => Cow::Owned(o.rank_scores()),
    }
}

/// Ordinal content of a profile.
pub fn ordinal_view<'a>(profile: ProfileRef<'a>) -> Cow<'a, OrdinalProfile> {
    match profile {
        ProfileRef::Numeric(p) => Cow::Owned(ordinalize(p)),
        ProfileRef::Ordinal(o) => Cow::Borrowed(o),
    }
}

/// The correspondence a rule induces on a family for one profile.
pub fn induce(
    rule: &dyn AggregationRule,
    profile: ProfileRef<'_>,
    fam: &FeasibleFamily,
) -> Result<ChoiceCorrespondence, RuleError> {
    let pairs = fam
        .menus()
        .iter()
        .map(|&menu| Ok((menu, rule.choose(profile, menu)?)))
        .collect::<Result<Vec<_>, RuleError>>()?;
    Ok(ChoiceCorrespondence::from_pairs(fam.universe_size(), pairs)?)
}

/// Argmin set of `score` over `menu`. Exact comparison.
pub fn argmin_by(menu: Menu, score: impl Fn(HypId) -> f64) -> Menu {
    let mut best = f64::INFINITY;
    let mut bits = 0u32;
    for h in menu.members() {
        let s = score(h);
        if s < best {
            best = s;
            bits = 1 << h;
        } else if s == best {
            bits |= 1 << h;
        }
    }
    Menu::from_bits(bits).expect("menus are nonempty")
}

/// Maximal elements of the social weak relation a pairwise rule induces on
/// `menu` for a strict profile.
pub fn choose_pairwise(
    rule: &dyn PairwiseRule,
    rule_name: &'static str,
    profile: &OrdinalProfile,
    menu: Menu,
) -> Result<Menu, RuleError> {
    let n = profile.envs();
    if let Some(env) = (0..n).find(|&e| profile.groups(e).len() != profile.hyps()) {
        return Err(RuleError::TiesInStrictDomain { rule: rule_name, env });
    }
    let members = menu.to_vec();
    let mut bits = 0u32;
    for &h in &members {
        let maximal = members.iter().all(|&g| {
            g == h || {
                let (a, b) = if h < g { (h, g) } else { (g, h) };
                let out = rule.pair_outcome(a, b, direction_index(profile, a, b), n);
                let out = if h == a { out } else { out.flipped() };
                out != Outcome::Second
            }
        });
        if maximal {
            bits |= 1 << h;
        }
    }
    Menu::from_bits(bits).map_err(|_| RuleError::NoMaximalElement(members))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_indices_are_lexicographic() {
        // env 0: f > g; env 1: g > f
        let p = OrdinalProfile::from_strict_orders(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(direction_index(&p, 0, 1), 0b01);
        assert!(!prefers_second(1, 0, 2));
        assert!(prefers_second(1, 1, 2));
    }

    #[test]
    fn argmin_keeps_ties() {
        let r = [0.1, 0.1, 0.3];
        assert_eq!(argmin_by(Menu::full(3), |h| r[h]), Menu::pair(0, 1));
    }
}
