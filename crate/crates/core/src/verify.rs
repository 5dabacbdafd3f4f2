//! Exhaustive search over pairwise aggregation rules on small ordinal
//! domains, and decisive-set contraction traces.
//!
//! # Search space
//!
//! On strict profiles, a rule satisfying IIH decides each pair `{a, b}` from
//! the environments' directions on that pair alone, so it is a
//! [`PairwiseTable`] per pair: a map from the `2^n` direction vectors to an
//! [`Outcome`]. IR holds automatically because the tables never see
//! magnitudes. PO fixes the two unanimous entries of every table.
//!
//! Internal consistency on the full menu family holds iff the induced social
//! relation is a weak order on every profile, which reduces to transitivity
//! on every triple of hypotheses. Each triple contributes one constraint per
//! combination of per-environment strict rankings of that triple (`6^n`).
//!
//! # Table encoding
//!
//! A table for pair `(a, b)`, `a < b`, is written as a string of `2^n` digits,
//! one per direction vector in lexicographic order: `0` means `a` is chosen,
//! `1` means `b` is chosen, `2` means both. In a direction vector environment
//! 1 is the most significant position and `1` means the environment ranks `b`
//! above `a`. A candidate lists its tables in pair order
//! `(0,1), (0,2), .., (1,2), ..`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axioms::{
    check_internal_consistency, find_dictator, is_globally_decisive, is_locally_decisive,
    strict_profiles, EnvSet,
};
use crate::error::{AxiomError, RuleError, VerifyError};
use crate::model::{
    ChoiceCorrespondence, FeasibleFamily, HypId, Menu, OrdinalProfile, ProfileRef, Universe,
};
use crate::revealed::{check_complete_transitive, reveal, roundtrip_check};
use crate::rule::{
    choose_pairwise, ordinal_view, AggregationRule, DomainKind, Outcome, PairwiseRule,
};
use crate::zoo::ErmSingle;

/// Largest environment count [`enumerate_pairwise_tables`] accepts.
pub const TABLE_ENV_BOUND: usize = 4;

/// Pair outcomes for every direction vector of one hypothesis pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairwiseTable {
    n: usize,
    outcomes: Vec<Outcome>,
}

impl PairwiseTable {
    pub fn new(n: usize, outcomes: Vec<Outcome>) -> Result<Self, VerifyError> {
        if outcomes.len() != 1 << n {
            return Err(VerifyError::TraceInvalid(format!(
                "table over {n} environments needs {} entries, got {}",
                1 << n,
                outcomes.len()
            )));
        }
        Ok(Self { n, outcomes })
    }

    pub fn envs(&self) -> usize {
        self.n
    }

    pub fn outcome(&self, direction: usize) -> Outcome {
        self.outcomes[direction]
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// Unanimous directions produce the unanimous choice.
    pub fn is_po_consistent(&self) -> bool {
        self.outcomes[0] == Outcome::First && self.outcomes[(1 << self.n) - 1] == Outcome::Second
    }

    /// Base-3 digit string, see the module docs.
    pub fn encode(&self) -> String {
        self.outcomes.iter().map(|o| char::from(b'0' + o.digit())).collect()
    }

    /// The environment `i` whose direction this table copies, if any.
    pub fn copies_env(&self) -> Option<usize> {
        (0..self.n).find(|&e| {
            self.outcomes.iter().enumerate().all(|(d, &o)| {
                o == if d >> (self.n - 1 - e) & 1 == 1 { Outcome::Second } else { Outcome::First }
            })
        })
    }
}

impl fmt::Display for PairwiseTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl FromStr for PairwiseTable {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VerifyError::TraceInvalid(format!("bad table encoding {s:?}"));
        let len = s.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(bad());
        }
        let outcomes = s
            .bytes()
            .map(|c| c.checked_sub(b'0').and_then(Outcome::from_digit).ok_or_else(bad))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { n: len.trailing_zeros() as usize, outcomes })
    }
}

impl Serialize for PairwiseTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.encode())
    }
}

impl<'de> Deserialize<'de> for PairwiseTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Every PO-consistent table over `n` environments, in encoding order.
/// There are `3^(2^n - 2)` of them.
pub fn enumerate_pairwise_tables(
    n: usize,
) -> Result<impl Iterator<Item = PairwiseTable>, VerifyError> {
    if n == 0 || n > TABLE_ENV_BOUND {
        return Err(VerifyError::Guard {
            m: 2,
            n,
            reason: format!("table enumeration needs 1 <= n <= {TABLE_ENV_BOUND}"),
        });
    }
    let dirs = 1usize << n;
    let free = dirs - 2;
    let total = 3u64.pow(free as u32);
    Ok((0..total).map(move |mut code| {
        let mut outcomes = vec![Outcome::First; dirs];
        outcomes[dirs - 1] = Outcome::Second;
        for d in (1..=free).rev() {
            outcomes[d] = Outcome::from_digit((code % 3) as u8).expect("base 3");
            code /= 3;
        }
        PairwiseTable { n, outcomes }
    }))
}

/// Canonical pair order `(0,1), (0,2), .., (1,2), ..`.
pub fn pair_list(m: usize) -> Vec<(HypId, HypId)> {
    (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect()
}

fn pair_index(m: usize, a: HypId, b: HypId) -> usize {
    // pairs before row a, then offset inside the row
    a * (2 * m - a - 1) / 2 + (b - a - 1)
}

/// One pairwise table per hypothesis pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidateRule {
    m: usize,
    n: usize,
    tables: Vec<PairwiseTable>,
}

impl CandidateRule {
    pub fn new(m: usize, tables: Vec<PairwiseTable>) -> Result<Self, VerifyError> {
        let pairs = m * m.saturating_sub(1) / 2;
        let n = tables.first().map_or(0, PairwiseTable::envs);
        if m < 2 || tables.len() != pairs || tables.iter().any(|t| t.envs() != n) {
            return Err(VerifyError::TraceInvalid(format!(
                "a candidate over {m} hypotheses needs {pairs} tables of equal width"
            )));
        }
        Ok(Self { m, n, tables })
    }

    /// Every pair copies environment `env`.
    pub fn dictatorship(m: usize, n: usize, env: usize) -> Self {
        let dirs = 1usize << n;
        let table = PairwiseTable {
            n,
            outcomes: (0..dirs)
                .map(|d| {
                    if d >> (n - 1 - env) & 1 == 1 {
                        Outcome::Second
                    } else {
                        Outcome::First
                    }
                })
                .collect(),
        };
        Self { m, n, tables: vec![table; m * (m - 1) / 2] }
    }

    pub fn hyps(&self) -> usize {
        self.m
    }

    pub fn envs(&self) -> usize {
        self.n
    }

    pub fn tables(&self) -> &[PairwiseTable] {
        &self.tables
    }

    pub fn table(&self, a: HypId, b: HypId) -> &PairwiseTable {
        &self.tables[pair_index(self.m, a, b)]
    }

    pub fn encode(&self) -> Vec<String> {
        self.tables.iter().map(PairwiseTable::encode).collect()
    }

    pub fn uses_indifference(&self) -> bool {
        self.tables.iter().any(|t| t.outcomes.contains(&Outcome::Indifferent))
    }

    /// Transitivity of the social relation on every triple and every
    /// combination of strict rankings of that triple.
    pub fn is_transitive(&self) -> bool {
        let ws = WeakOrderTable::new();
        let dirs = triple_directions(self.n);
        triples(self.m).all(|(a, b, c)| {
            let (tab, tac, tbc) = (self.table(a, b), self.table(a, c), self.table(b, c));
            dirs.iter().all(|&[dab, dac, dbc]| {
                ws.valid(tab.outcome(dab), tac.outcome(dac), tbc.outcome(dbc))
            })
        })
    }

    /// Internal consistency by materializing correspondences: for every
    /// strict profile there must be a choice on the full menu that makes the
    /// whole correspondence pass alpha and beta. Three hypotheses only.
    pub fn is_consistent_slow(&self) -> Result<bool, VerifyError> {
        if self.m != 3 {
            return Err(VerifyError::Guard {
                m: self.m,
                n: self.n,
                reason: "the materialized check supports three hypotheses".into(),
            });
        }
        let fam = FeasibleFamily::enumerate(&Universe::of_size(3).map_err(AxiomError::from)?, None)
            .map_err(AxiomError::from)?;
        let full = Menu::full(3);
        for p in strict_profiles(3, self.n)? {
            let mut base: Vec<(Menu, Menu)> = (0..3).map(|h| (Menu::singleton(h), Menu::singleton(h))).collect();
            for (a, b) in pair_list(3) {
                let d = crate::rule::direction_index(&p, a, b);
                base.push((Menu::pair(a, b), self.table(a, b).outcome(d).chosen(a, b)));
            }
            let mut any = false;
            for chosen in full.subsets() {
                let mut entries = base.clone();
                entries.push((full, chosen));
                let cc = ChoiceCorrespondence::from_pairs(3, entries).map_err(AxiomError::from)?;
                if check_internal_consistency(&cc, &fam)?.passed {
                    any = true;
                    break;
                }
            }
            if !any {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl PairwiseRule for CandidateRule {
    fn pair_outcome(&self, a: HypId, b: HypId, direction: usize, _n: usize) -> Outcome {
        self.table(a, b).outcome(direction)
    }
}

impl AggregationRule for CandidateRule {
    fn name(&self) -> &'static str {
        "candidate"
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({ "tables": self.encode() })
    }

    fn domain(&self) -> DomainKind {
        DomainKind::Ordinal
    }

    fn choose(&self, profile: ProfileRef<'_>, menu: Menu) -> Result<Menu, RuleError> {
        let o = ordinal_view(profile);
        if o.envs() != self.n {
            return Err(RuleError::EnvCountMismatch { expected: self.n, found: o.envs() });
        }
        if o.hyps() != self.m {
            return Err(RuleError::HypCountMismatch { expected: self.m, found: o.hyps() });
        }
        choose_pairwise(self, "candidate", &o, menu)
    }

    fn pairwise(&self) -> Option<&dyn PairwiseRule> {
        Some(self)
    }
}

fn triples(m: usize) -> impl Iterator<Item = (HypId, HypId, HypId)> {
    (0..m).flat_map(move |a| {
        (a + 1..m).flat_map(move |b| (b + 1..m).map(move |c| (a, b, c)))
    })
}

/// Direction triples `(d_ab, d_ac, d_bc)` realized by strict rankings of a
/// triple `a < b < c`, deduplicated and sorted.
fn triple_directions(n: usize) -> Vec<[usize; 3]> {
    // per environment: (b over a, c over a, c over b) for each of the 6 rankings
    let rankings: Vec<[usize; 3]> = (0..8)
        .map(|bits| [bits >> 2 & 1, bits >> 1 & 1, bits & 1])
        .filter(|&[ba, ca, cb]| {
            // cyclic patterns: a>b, b>c, c>a or the reverse
            !((ba == 0 && cb == 0 && ca == 1) || (ba == 1 && cb == 1 && ca == 0))
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut stack = vec![(0usize, [0usize; 3])];
    while let Some((env, acc)) = stack.pop() {
        if env == n {
            out.insert(acc);
            continue;
        }
        for r in &rankings {
            stack.push((env + 1, [acc[0] << 1 | r[0], acc[1] << 1 | r[1], acc[2] << 1 | r[2]]));
        }
    }
    out.into_iter().collect()
}

/// Which outcome triples `(o_ab, o_ac, o_bc)` form a transitive relation.
struct WeakOrderTable([bool; 27]);

impl WeakOrderTable {
    fn new() -> Self {
        let mut valid = [false; 27];
        for (i, slot) in valid.iter_mut().enumerate() {
            let digits = [i / 9, i / 3 % 3, i % 3];
            let mut r = [[true; 3]; 3];
            for (k, &(x, y)) in [(0, 1), (0, 2), (1, 2)].iter().enumerate() {
                match digits[k] {
                    0 => r[y][x] = false,
                    1 => r[x][y] = false,
                    _ => {}
                }
            }
            *slot = (0..3).all(|x| {
                (0..3).all(|y| (0..3).all(|z| !(r[x][y] && r[y][z]) || r[x][z]))
            });
        }
        Self(valid)
    }

    fn valid(&self, ab: Outcome, ac: Outcome, bc: Outcome) -> bool {
        self.0[usize::from(ab.digit()) * 9 + usize::from(ac.digit()) * 3 + usize::from(bc.digit())]
    }

    fn valid_digits(&self, ab: u8, ac: u8, bc: u8) -> bool {
        self.0[usize::from(ab) * 9 + usize::from(ac) * 3 + usize::from(bc)]
    }
}

/// Axioms a search imposes. IIH and IR are properties of the pairwise
/// representation and always hold for every candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomSet {
    pub ic: bool,
    pub po: bool,
    pub iih: bool,
    pub ir: bool,
    pub ci: bool,
}

impl AxiomSet {
    pub const COROLLARY: AxiomSet = AxiomSet { ic: true, po: true, iih: true, ir: true, ci: false };
    pub const THEOREM: AxiomSet = AxiomSet { ic: true, po: true, iih: true, ir: true, ci: true };
}

impl FromStr for AxiomSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = AxiomSet { ic: false, po: false, iih: false, ir: false, ci: false };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().as_str() {
                "ic" => set.ic = true,
                "po" => set.po = true,
                "iih" => set.iih = true,
                "ir" => set.ir = true,
                "ci" => set.ci = true,
                other => return Err(format!("unknown axiom {other:?}; expected ic, po, iih, ir, ci")),
            }
        }
        Ok(set)
    }
}

impl fmt::Display for AxiomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.ic, "ic"),
            (self.po, "po"),
            (self.iih, "iih"),
            (self.ir, "ir"),
            (self.ci, "ci"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        f.write_str(&names.join(","))
    }
}

/// Search knobs. None of them changes the survivor set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Check a transitivity constraint as soon as its three entries are set.
    pub early_check: bool,
    /// Narrow the remaining entry of a constraint with two entries set.
    pub forward_check: bool,
    pub parallel: bool,
    /// Allow searches without PO (small domains only).
    pub allow_no_po: bool,
    /// Drop every triple menu from the feasible family, which removes the
    /// transitivity constraints.
    pub omit_triples: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            early_check: true,
            forward_check: true,
            parallel: true,
            allow_no_po: false,
            omit_triples: false,
        }
    }
}

impl SearchOptions {
    pub fn unpruned() -> Self {
        Self { early_check: false, forward_check: false, ..Self::default() }
    }
}

/// One surviving candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    pub tables: Vec<String>,
    /// 1-based.
    pub dictator: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorReport {
    pub m: usize,
    pub n: usize,
    pub axioms: AxiomSet,
    pub omit_triples: bool,
    pub survivor_count: usize,
    pub survivors: Vec<Survivor>,
    /// Vacuously true when nothing survives.
    pub all_dictatorial: bool,
    pub nodes_explored: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl SurvivorReport {
    /// Dictators of all survivors, 1-based, ascending.
    pub fn dictators(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.survivors.iter().filter_map(|s| s.dictator).collect();
        set.into_iter().collect()
    }

    pub fn candidates(&self) -> Result<Vec<CandidateRule>, VerifyError> {
        self.survivors
            .iter()
            .map(|s| {
                let tables = s.tables.iter().map(|t| t.parse()).collect::<Result<Vec<_>, _>>()?;
                CandidateRule::new(self.m, tables)
            })
            .collect()
    }
}

fn check_guard(m: usize, n: usize, axioms: AxiomSet, opts: &SearchOptions) -> Result<(), VerifyError> {
    let guard = |reason: &str| Err(VerifyError::Guard { m, n, reason: reason.into() });
    if !axioms.po && !opts.allow_no_po {
        return Err(VerifyError::PoRequired);
    }
    match (m, n) {
        (3, 1..=3) | (4, 1..=2) => {}
        (3 | 4, _) => return guard("supported domains are m=3 with n<=3 and m=4 with n<=2"),
        _ => return guard("the search needs m=3 (or m=4 with n<=2)"),
    }
    if !axioms.po && (m != 3 || n > 2) {
        return guard("searching without PO is limited to m=3, n<=2");
    }
    let constrained = axioms.ic && !opts.omit_triples;
    if !constrained && (!axioms.po || m != 3 || n > 2) {
        return guard("searching without transitivity constraints is limited to m=3, n<=2 with PO");
    }
    Ok(())
}

struct Problem {
    dirs: usize,
    vars: usize,
    /// Variables searched, pair-major then direction order.
    free: Vec<usize>,
    /// Free variables belonging to the first pair.
    first_pair_free: usize,
    fixed: Vec<Option<u8>>,
    constraints: Vec<[usize; 3]>,
    by_var: Vec<Vec<usize>>,
    weak: WeakOrderTable,
}

const UNSET: u8 = u8::MAX;

impl Problem {
    fn new(m: usize, n: usize, po: bool, constrained: bool) -> Self {
        let dirs = 1usize << n;
        let pairs = pair_list(m);
        let vars = pairs.len() * dirs;
        let mut fixed = vec![None; vars];
        if po {
            for p in 0..pairs.len() {
                fixed[p * dirs] = Some(Outcome::First.digit());
                fixed[p * dirs + dirs - 1] = Some(Outcome::Second.digit());
            }
        }
        let free: Vec<usize> = (0..vars).filter(|&v| fixed[v].is_none()).collect();
        let first_pair_free = free.iter().filter(|&&v| v < dirs).count();
        let mut constraints = Vec::new();
        if constrained {
            let tds = triple_directions(n);
            for (a, b, c) in triples(m) {
                let (pab, pac, pbc) =
                    (pair_index(m, a, b) * dirs, pair_index(m, a, c) * dirs, pair_index(m, b, c) * dirs);
                for &[dab, dac, dbc] in &tds {
                    constraints.push([pab + dab, pac + dac, pbc + dbc]);
                }
            }
        }
        let mut by_var = vec![Vec::new(); vars];
        for (i, c) in constraints.iter().enumerate() {
            for &v in c {
                by_var[v].push(i);
            }
        }
        Self { dirs, vars, free, first_pair_free, fixed, constraints, by_var, weak: WeakOrderTable::new() }
    }

    fn initial(&self) -> (Vec<u8>, Vec<u8>) {
        let assign: Vec<u8> = self.fixed.iter().map(|f| f.unwrap_or(UNSET)).collect();
        let domains: Vec<u8> = self.fixed.iter().map(|f| f.map_or(0b111, |d| 1 << d)).collect();
        (assign, domains)
    }

    fn satisfied(&self, c: &[usize; 3], assign: &[u8]) -> bool {
        self.weak.valid_digits(assign[c[0]], assign[c[1]], assign[c[2]])
    }

    /// Applies the consequences of assigning `v`. Returns false on a
    /// violated constraint or an emptied domain; `trail` records narrowed
    /// domains for undo.
    fn propagate(
        &self,
        v: usize,
        assign: &[u8],
        domains: &mut [u8],
        trail: &mut Vec<(usize, u8)>,
        opts: &SearchOptions,
    ) -> bool {
        if !opts.early_check && !opts.forward_check {
            return true;
        }
        for &ci in &self.by_var[v] {
            let c = &self.constraints[ci];
            let unset: Vec<usize> = c.iter().copied().filter(|&u| assign[u] == UNSET).collect();
            match unset.len() {
                0 if opts.early_check => {
                    if !self.satisfied(c, assign) {
                        return false;
                    }
                }
                1 if opts.forward_check => {
                    let u = unset[0];
                    let mut allowed = 0u8;
                    for x in 0..3u8 {
                        if domains[u] & 1 << x == 0 {
                            continue;
                        }
                        let val = |w: usize| if w == u { x } else { assign[w] };
                        if self.weak.valid_digits(val(c[0]), val(c[1]), val(c[2])) {
                            allowed |= 1 << x;
                        }
                    }
                    if allowed != domains[u] {
                        trail.push((u, domains[u]));
                        domains[u] = allowed;
                    }
                    if allowed == 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn descend(
        &self,
        depth: usize,
        assign: &mut Vec<u8>,
        domains: &mut Vec<u8>,
        opts: &SearchOptions,
        out: &mut Vec<Vec<u8>>,
        nodes: &mut u64,
    ) {
        if depth == self.free.len() {
            if self.constraints.iter().all(|c| self.satisfied(c, assign)) {
                out.push(assign.clone());
            }
            return;
        }
        let v = self.free[depth];
        for x in 0..3u8 {
            if domains[v] & 1 << x == 0 {
                continue;
            }
            *nodes += 1;
            assign[v] = x;
            let mut trail = Vec::new();
            if self.propagate(v, assign, domains, &mut trail, opts) {
                self.descend(depth + 1, assign, domains, opts, out, nodes);
            }
            for (u, d) in trail.into_iter().rev() {
                domains[u] = d;
            }
            assign[v] = UNSET;
        }
    }

    /// Explores the subtree under one assignment of the first pair's free
    /// entries, given as base-3 digits.
    fn branch(&self, code: u64, opts: &SearchOptions) -> (Vec<Vec<u8>>, u64) {
        let (mut assign, mut domains) = self.initial();
        let mut nodes = 0;
        let mut out = Vec::new();
        let mut trail = Vec::new();
        let mut rest = code;
        let mut digits = vec![0u8; self.first_pair_free];
        for d in digits.iter_mut().rev() {
            *d = (rest % 3) as u8;
            rest /= 3;
        }
        for (depth, &x) in digits.iter().enumerate() {
            let v = self.free[depth];
            nodes += 1;
            if domains[v] & 1 << x == 0 {
                return (out, nodes);
            }
            assign[v] = x;
            if !self.propagate(v, &assign, &mut domains, &mut trail, opts) {
                return (out, nodes);
            }
        }
        self.descend(self.first_pair_free, &mut assign, &mut domains, opts, &mut out, &mut nodes);
        (out, nodes)
    }
}

/// Enumerates every pairwise rule on `m` hypotheses and `n` environments
/// satisfying `axioms`.
pub fn search_survivors(
    m: usize,
    n: usize,
    axioms: AxiomSet,
    opts: &SearchOptions,
) -> Result<SurvivorReport, VerifyError> {
    check_guard(m, n, axioms, opts)?;
    let start = Instant::now();
    let constrained = axioms.ic && !opts.omit_triples;
    let problem = Problem::new(m, n, axioms.po, constrained);
    let branches = 3u64.pow(problem.first_pair_free as u32);
    let run = |code: u64| problem.branch(code, opts);
    let results: Vec<(Vec<Vec<u8>>, u64)> = if opts.parallel {
        (0..branches).into_par_iter().map(run).collect()
    } else {
        (0..branches).map(run).collect()
    };

    let mut nodes = 0;
    let mut candidates = Vec::new();
    for (found, count) in results {
        nodes += count;
        for assign in found {
            let tables = assign
                .chunks(problem.dirs)
                .map(|chunk| PairwiseTable {
                    n,
                    outcomes: chunk.iter().map(|&d| Outcome::from_digit(d).expect("assigned")).collect(),
                })
                .collect();
            candidates.push(CandidateRule { m, n, tables });
        }
    }
    debug_assert_eq!(problem.vars, pair_list(m).len() * problem.dirs);
    candidates.sort();

    let mut survivors = Vec::new();
    for c in candidates {
        let dictator = find_dictator(&c, m, n)?;
        if axioms.ci && dictator.is_some() {
            continue;
        }
        survivors.push(Survivor { tables: c.encode(), dictator: dictator.map(|d| d + 1) });
    }
    Ok(SurvivorReport {
        m,
        n,
        axioms,
        omit_triples: opts.omit_triples,
        survivor_count: survivors.len(),
        all_dictatorial: survivors.iter().all(|s| s.dictator.is_some()),
        survivors,
        nodes_explored: nodes,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
    })
}

/// Searches under IC, PO, IIH and IR and checks that every survivor is a
/// single-environment risk minimizer on every strict profile, never uses
/// indifference, and is rationalized by its revealed preference.
pub fn verify_corollary(m: usize, n: usize) -> Result<SurvivorReport, VerifyError> {
    let report = search_survivors(m, n, AxiomSet::COROLLARY, &SearchOptions::default())?;
    if !report.all_dictatorial {
        return Err(VerifyError::CorollaryViolated(format!(
            "{} of {} survivors have no dictator",
            report.survivors.iter().filter(|s| s.dictator.is_none()).count(),
            report.survivor_count
        )));
    }
    let fam = FeasibleFamily::enumerate(&Universe::of_size(m).map_err(AxiomError::from)?, None)
        .map_err(AxiomError::from)?;
    let profiles = strict_profiles(m, n)?;
    for (s, c) in report.survivors.iter().zip(report.candidates()?) {
        if c.uses_indifference() {
            return Err(VerifyError::CorollaryViolated(format!(
                "survivor {:?} uses indifference",
                s.tables
            )));
        }
        let erm = ErmSingle::new(s.dictator.expect("checked above") - 1);
        for p in &profiles {
            for (a, b) in pair_list(m) {
                let pair = Menu::pair(a, b);
                let ours = c.choose(ProfileRef::Ordinal(p), pair)?;
                let theirs = erm.choose(ProfileRef::Ordinal(p), pair)?;
                if ours != theirs {
                    return Err(VerifyError::CorollaryViolated(format!(
                        "survivor {:?} differs from erm_single({}) on {pair}",
                        s.tables,
                        erm.env() + 1
                    )));
                }
            }
            let cc = crate::rule::induce(&c, ProfileRef::Ordinal(p), &fam)?;
            let relation = reveal(&cc).map_err(AxiomError::from)?;
            if !check_complete_transitive(&relation).passed || !roundtrip_check(&cc, &fam)?.passed {
                return Err(VerifyError::CorollaryViolated(format!(
                    "survivor {:?} is not rationalized by its revealed preference",
                    s.tables
                )));
            }
        }
    }
    Ok(report)
}

/// Searches under all five axioms; for `n >= 3` nothing may survive. For
/// smaller `n` the count is reported as found.
pub fn verify_theorem(m: usize, n: usize) -> Result<SurvivorReport, VerifyError> {
    let report = search_survivors(m, n, AxiomSet::THEOREM, &SearchOptions::default())?;
    if n >= 3 && report.survivor_count > 0 {
        return Err(VerifyError::TheoremViolated { n, survivors: report.survivor_count });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Decisiveness traces

/// A decisiveness claim together with its re-validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisivenessCheck {
    pub set: EnvSet,
    /// The set forces `{better}` from `{better, worse}`.
    pub better: HypId,
    pub worse: HypId,
    pub holds: bool,
}

/// Strict rankings (best first) assigned to groups of environments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub groups: Vec<RankedGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedGroup {
    pub envs: EnvSet,
    pub ranking: Vec<HypId>,
}

impl ProfileConfig {
    fn profile(&self, n: usize) -> Result<OrdinalProfile, VerifyError> {
        let mut orders = vec![Vec::new(); n];
        for g in &self.groups {
            for e in g.envs.members() {
                orders[e] = g.ranking.clone();
            }
        }
        Ok(OrdinalProfile::from_strict_orders(&orders).map_err(AxiomError::from)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// The rule strictly preferred `h` to `g`: the second part is decisive
    /// over `(h, g)`.
    Second,
    /// Otherwise `f` beats `h` by transitivity: the first part is decisive
    /// over `(f, h)`.
    First,
}

/// Promotion of local decisiveness from one ordered pair to another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadStep {
    pub from: (HypId, HypId),
    pub to: (HypId, HypId),
    pub config: ProfileConfig,
    pub check: DecisivenessCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub set: EnvSet,
    pub first: EnvSet,
    pub second: EnvSet,
    /// Hypotheses `[f, g, h]` of the contraction profile.
    pub hypotheses: [HypId; 3],
    pub config: ProfileConfig,
    /// Choice on `{g, h}` in the contraction profile.
    pub pair_choice: Menu,
    pub branch: Branch,
    pub checks: Vec<DecisivenessCheck>,
    pub spreading: Vec<SpreadStep>,
    pub globally_decisive: bool,
}

impl TraceStep {
    /// The part found decisive.
    pub fn decisive(&self) -> EnvSet {
        match self.branch {
            Branch::First => self.first,
            Branch::Second => self.second,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisivenessTrace {
    pub n: usize,
    pub rule: String,
    pub params: serde_json::Value,
    pub initial: EnvSet,
    pub steps: Vec<TraceStep>,
    pub terminal: EnvSet,
}

impl DecisivenessTrace {
    /// Structural invariants plus every recorded check.
    pub fn is_valid(&self) -> bool {
        let mut current = self.initial;
        for step in &self.steps {
            let next = step.decisive();
            if step.set != current || !next.is_subset_of(current) || next.len() >= current.len() {
                return false;
            }
            if !step.globally_decisive
                || !step.checks.iter().all(|c| c.holds)
                || !step.spreading.iter().all(|s| s.check.holds)
            {
                return false;
            }
            current = next;
        }
        current == self.terminal && self.terminal.len() == 1 && self.initial == EnvSet::all(self.n)
    }
}

const F: HypId = 0;
const G: HypId = 1;
const H: HypId = 2;

fn decisive_check(
    rule: &dyn AggregationRule,
    set: EnvSet,
    better: HypId,
    worse: HypId,
    n: usize,
) -> Result<DecisivenessCheck, VerifyError> {
    let holds = is_locally_decisive(rule, set, better, worse, 3, n)?;
    Ok(DecisivenessCheck { set, better, worse, holds })
}

/// Spreads local decisiveness of `set` over `(x, y)` to every ordered pair of
/// three hypotheses. With `z` the third hypothesis, `(x, y)` yields `(x, z)`
/// through the ranking `x > y > z` in the set and `y > z > x` elsewhere, and
/// `(z, y)` through `z > x > y` in the set and `y > z > x` elsewhere.
fn spread(
    rule: &dyn AggregationRule,
    set: EnvSet,
    start: (HypId, HypId),
    n: usize,
) -> Result<Vec<SpreadStep>, VerifyError> {
    let rest = EnvSet::all(n).minus(set);
    let mut reached = vec![start];
    let mut steps = Vec::new();
    let mut i = 0;
    while i < reached.len() {
        let (x, y) = reached[i];
        i += 1;
        let z = 3 - x - y;
        for (to, ranking) in [((x, z), vec![x, y, z]), ((z, y), vec![z, x, y])] {
            if reached.contains(&to) {
                continue;
            }
            let mut groups = vec![RankedGroup { envs: set, ranking }];
            if let Some(rest) = rest {
                groups.push(RankedGroup { envs: rest, ranking: vec![y, z, x] });
            }
            let check = decisive_check(rule, set, to.0, to.1, n)?;
            if !check.holds {
                return Err(VerifyError::TraceInvalid(format!(
                    "spreading {set:?} from {:?} to {to:?} failed",
                    (x, y)
                )));
            }
            steps.push(SpreadStep { from: (x, y), to, config: ProfileConfig { groups }, check });
            reached.push(to);
        }
    }
    Ok(steps)
}

/// Contracts the grand environment set, which PO makes decisive, down to a
/// single decisive environment. Each contraction halves the current set,
/// reads the rule's choice on one witness profile to decide which half is
/// decisive, validates that claim, and spreads it to every pair.
///
/// The rule must satisfy the axioms for the chain to exist; any failed
/// validation is reported as [`VerifyError::TraceInvalid`].
pub fn trace_decisiveness(
    rule: &dyn AggregationRule,
    n: usize,
) -> Result<DecisivenessTrace, VerifyError> {
    if n == 0 {
        return Err(VerifyError::Guard { m: 3, n, reason: "need at least one environment".into() });
    }
    let initial = EnvSet::all(n);
    if !is_globally_decisive(rule, initial, 3, n)? {
        return Err(VerifyError::TraceInvalid("the grand set is not decisive; PO fails".into()));
    }
    let mut current = initial;
    let mut steps = Vec::new();
    while current.len() > 1 {
        let (first, second) = current.halve().expect("at least two members");
        let rest = EnvSet::all(n).minus(current);
        let mut groups = vec![
            RankedGroup { envs: first, ranking: vec![F, G, H] },
            RankedGroup { envs: second, ranking: vec![H, F, G] },
        ];
        if let Some(rest) = rest {
            groups.push(RankedGroup { envs: rest, ranking: vec![G, H, F] });
        }
        let config = ProfileConfig { groups };
        let profile = config.profile(n)?;
        let mut checks = vec![decisive_check(rule, current, F, G, n)?];
        let pair_choice = rule.choose(ProfileRef::Ordinal(&profile), Menu::pair(G, H))?;
        let (branch, next, local) = if pair_choice == Menu::singleton(H) {
            (Branch::Second, second, (H, G))
        } else {
            (Branch::First, first, (F, H))
        };
        checks.push(decisive_check(rule, next, local.0, local.1, n)?);
        if let Some(bad) = checks.iter().find(|c| !c.holds) {
            return Err(VerifyError::TraceInvalid(format!(
                "{:?} is not decisive over ({}, {})",
                bad.set, bad.better, bad.worse
            )));
        }
        let spreading = spread(rule, next, local, n)?;
        let globally_decisive = is_globally_decisive(rule, next, 3, n)?;
        if !globally_decisive {
            return Err(VerifyError::TraceInvalid(format!("{next:?} is not globally decisive")));
        }
        steps.push(TraceStep {
            set: current,
            first,
            second,
            hypotheses: [F, G, H],
            config,
            pair_choice,
            branch,
            checks,
            spreading,
            globally_decisive,
        });
        current = next;
    }
    Ok(DecisivenessTrace {
        n,
        rule: rule.name().to_string(),
        params: rule.params(),
        initial,
        steps,
        terminal: current,
    })
}
