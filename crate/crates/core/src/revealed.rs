//! Revealed preference: the relation read off pair-menu choices, and the
//! correspondence a weak order rationalizes.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::axioms::{Axiom, Verdict, Witness};
use crate::error::{AxiomError, ModelError};
use crate::model::{ChoiceCorrespondence, FeasibleFamily, HypId, Menu, MAX_UNIVERSE};

/// `f ≽ g` for every ordered pair. Reflexive by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevealedPreference {
    m: usize,
    weak: Vec<bool>,
}

impl RevealedPreference {
    /// From an explicit matrix; `matrix[f][g]` is `f ≽ g`. The diagonal is
    /// forced to true.
    pub fn from_relation(matrix: Vec<Vec<bool>>) -> Result<Self, ModelError> {
        let m = matrix.len();
        if m == 0 || m > MAX_UNIVERSE {
            return Err(ModelError::UniverseTooLarge(m));
        }
        let mut weak = Vec::with_capacity(m * m);
        for (f, row) in matrix.into_iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::RaggedProfile { env: f, expected: m, found: row.len() });
            }
            weak.extend(row.into_iter().enumerate().map(|(g, v)| v || f == g));
        }
        Ok(Self { m, weak })
    }

    /// Weak order from tiers (tier 0 best).
    pub fn from_tiers(tiers: &[u32]) -> Result<Self, ModelError> {
        Self::from_relation(
            tiers.iter().map(|&a| tiers.iter().map(|&b| a <= b).collect()).collect(),
        )
    }

    pub fn universe_size(&self) -> usize {
        self.m
    }

    pub fn weakly_prefers(&self, f: HypId, g: HypId) -> bool {
        self.weak[f * self.m + g]
    }

    pub fn strictly_prefers(&self, f: HypId, g: HypId) -> bool {
        self.weakly_prefers(f, g) && !self.weakly_prefers(g, f)
    }

    pub fn indifferent(&self, f: HypId, g: HypId) -> bool {
        self.weakly_prefers(f, g) && self.weakly_prefers(g, f)
    }

    /// `{h ∈ menu : h ≽ g for all g ∈ menu}`; `None` if empty.
    pub fn maximal(&self, menu: Menu) -> Option<Menu> {
        let members = menu.to_vec();
        let best: Vec<HypId> = members
            .iter()
            .copied()
            .filter(|&h| members.iter().all(|&g| self.weakly_prefers(h, g)))
            .collect();
        Menu::new(best).ok()
    }

    pub fn matrix(&self) -> Vec<Vec<bool>> {
        (0..self.m).map(|f| self.weak[f * self.m..(f + 1) * self.m].to_vec()).collect()
    }
}

impl Serialize for RevealedPreference {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RevealedPreference {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let matrix = Vec::<Vec<bool>>::deserialize(d)?;
        RevealedPreference::from_relation(matrix).map_err(D::Error::custom)
    }
}

/// `f ≽ g` iff `f ∈ cc({f, g})`. Needs every pair menu of the universe.
pub fn reveal(cc: &ChoiceCorrespondence) -> Result<RevealedPreference, ModelError> {
    let m = cc.universe_size();
    let mut weak = vec![false; m * m];
    for f in 0..m {
        weak[f * m + f] = true;
        for g in f + 1..m {
            let chosen = cc.get(Menu::pair(f, g)).ok_or(ModelError::MissingMenu(vec![f, g]))?;
            weak[f * m + g] = chosen.contains(f);
            weak[g * m + f] = chosen.contains(g);
        }
    }
    Ok(RevealedPreference { m, weak })
}

fn revealed_pair_choice(r: &RevealedPreference, a: HypId, b: HypId) -> Option<Menu> {
    let mut v = Vec::new();
    if r.weakly_prefers(a, b) {
        v.push(a);
    }
    if r.weakly_prefers(b, a) {
        v.push(b);
    }
    Menu::new(v).ok()
}

/// Completeness over pairs, then transitivity over triples.
pub fn check_complete_transitive(r: &RevealedPreference) -> Verdict {
    let m = r.m;
    let mut checked = 0;
    for f in 0..m {
        for g in f + 1..m {
            checked += 1;
            if !r.weakly_prefers(f, g) && !r.weakly_prefers(g, f) {
                let mut w = Witness::new(
                    Axiom::CompleteTransitive,
                    format!("neither {f} ≽ {g} nor {g} ≽ {f}"),
                );
                w.menus = vec![Menu::pair(f, g)];
                w.hypotheses = vec![f, g];
                return Verdict::fail(Axiom::CompleteTransitive, checked, w);
            }
        }
    }
    for f in 0..m {
        for g in 0..m {
            for h in 0..m {
                if f == g || g == h || f == h {
                    continue;
                }
                checked += 1;
                if r.weakly_prefers(f, g) && r.weakly_prefers(g, h) && !r.weakly_prefers(f, h) {
                    let mut w = Witness::new(
                        Axiom::CompleteTransitive,
                        format!("{f} ≽ {g} and {g} ≽ {h} but not {f} ≽ {h}"),
                    );
                    let pairs = [(f, g), (g, h), (f, h)];
                    w.menus = pairs.iter().map(|&(a, b)| Menu::pair(a, b)).collect();
                    w.choices = pairs
                        .iter()
                        .map(|&(a, b)| revealed_pair_choice(r, a, b).expect("complete"))
                        .collect();
                    w.hypotheses = vec![f, g, h];
                    return Verdict::fail(Axiom::CompleteTransitive, checked, w);
                }
            }
        }
    }
    Verdict::pass(Axiom::CompleteTransitive, checked)
}

/// The correspondence choosing the maximal elements of `order` on each menu.
pub fn rationalize(
    order: &RevealedPreference,
    fam: &FeasibleFamily,
) -> Result<ChoiceCorrespondence, AxiomError> {
    let v = check_complete_transitive(order);
    if let Some(w) = v.witness {
        return Err(AxiomError::NotAWeakOrder(w.note));
    }
    if fam.universe_size() != order.m {
        return Err(ModelError::UniverseTooLarge(fam.universe_size()).into());
    }
    let pairs = fam
        .menus()
        .iter()
        .map(|&menu| (menu, order.maximal(menu).expect("finite weak orders have maxima")));
    Ok(ChoiceCorrespondence::from_pairs(order.m, pairs)?)
}

/// Whether `cc` equals the correspondence its own revealed preference
/// rationalizes, on every menu of `fam`.
pub fn roundtrip_check(
    cc: &ChoiceCorrespondence,
    fam: &FeasibleFamily,
) -> Result<Verdict, AxiomError> {
    cc.ensure_covers(fam)?;
    let r = reveal(cc)?;
    let mut checked = 0;
    for &menu in fam.menus() {
        checked += 1;
        let chosen = cc.get(menu).expect("covered");
        let regenerated = r.maximal(menu);
        if regenerated != Some(chosen) {
            let shown = regenerated.map_or_else(|| "{}".to_string(), |m| m.to_string());
            let mut w = Witness::new(
                Axiom::Roundtrip,
                format!("on {menu} the algorithm chose {chosen}, its revealed preference picks {shown}"),
            );
            let members = menu.to_vec();
            w.menus.push(menu);
            w.choices.push(chosen);
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    let pair = Menu::pair(a, b);
                    w.menus.push(pair);
                    w.choices.push(cc.get(pair).expect("revealed"));
                }
            }
            w.hypotheses = members;
            return Ok(Verdict::fail(Axiom::Roundtrip, checked, w));
        }
    }
    Ok(Verdict::pass(Axiom::Roundtrip, checked))
}

pub(crate) fn replay_witness(w: &Witness) -> Result<bool, AxiomError> {
    let m = w.hypotheses.iter().max().map_or(0, |h| h + 1);
    let relation_from_pairs = |pairs: &[(Menu, Menu)]| {
        let mut matrix = vec![vec![false; m]; m];
        for &(menu, chosen) in pairs {
            let v = menu.to_vec();
            let (a, b) = (v[0], v[1]);
            matrix[a][b] = chosen.contains(a);
            matrix[b][a] = chosen.contains(b);
        }
        RevealedPreference::from_relation(matrix)
    };
    match (w.axiom, &w.hypotheses[..]) {
        (Axiom::CompleteTransitive, &[f, g]) => {
            // Incomplete pair: recorded with the menu and no choice.
            Ok(w.menus == [Menu::pair(f, g)] && w.choices.is_empty())
        }
        (Axiom::CompleteTransitive, &[f, g, h]) => {
            let pairs: Vec<(Menu, Menu)> =
                w.menus.iter().copied().zip(w.choices.iter().copied()).collect();
            if pairs.len() != 3 || pairs.iter().any(|(m, _)| m.len() != 2) {
                return Ok(false);
            }
            let r = relation_from_pairs(&pairs)?;
            Ok(r.weakly_prefers(f, g) && r.weakly_prefers(g, h) && !r.weakly_prefers(f, h))
        }
        (Axiom::Roundtrip, _) => {
            let (Some(&menu), Some(&chosen)) = (w.menus.first(), w.choices.first()) else {
                return Ok(false);
            };
            let pairs: Vec<(Menu, Menu)> =
                w.menus.iter().copied().zip(w.choices.iter().copied()).skip(1).collect();
            let r = relation_from_pairs(&pairs)?;
            Ok(r.maximal(menu) != Some(chosen))
        }
        _ => Ok(false),
    }
}
