//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails. Run with `cargo test --test acceptance`.
//!
//! Set `BLESS=1` to regenerate the zoo audit fixture and the docs table.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hetero_choice::axioms::{
    check_alpha, check_beta, check_internal_consistency, is_locally_decisive, replay, Axiom,
};
use hetero_choice::cli;
use hetero_choice::model::{
    ChoiceCorrespondence, FeasibleFamily, Menu, MonotoneTransform, ProfileRef, RiskProfile,
    Universe,
};
use hetero_choice::report;
use hetero_choice::revealed::{
    check_complete_transitive, rationalize, reveal, roundtrip_check, RevealedPreference,
};
use hetero_choice::risk::{
    build_profile_multisource, synth_generate, weighted_objective, EnvGenerator, GeneratorSpec,
    Label, LossKind, LossSpec, Penalty, Predictor, RegularizerSpec, SyntheticDataset,
    TabularHypothesis,
};
use hetero_choice::rule::{induce, AggregationRule};
use hetero_choice::verify::{
    search_survivors, trace_decisiveness, verify_corollary, verify_theorem, AxiomSet,
    SearchOptions,
};
use hetero_choice::zoo::{
    reference_audit, reference_specs, render_table, AxiomReport, ErmSingle, RiskMin, WeightedSum,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn full_family(m: usize) -> FeasibleFamily {
    FeasibleFamily::enumerate(&Universe::of_size(m).unwrap(), None).unwrap()
}

fn corollary_n2() -> Outcome {
    let start = Instant::now();
    let r = verify_corollary(3, 2).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    ensure(r.all_dictatorial, "a survivor has no dictator")?;
    ensure(r.dictators() == vec![1, 2], format!("dictators {:?}", r.dictators()))?;
    Ok(format!("{} survivors, dictators {:?}, {elapsed:.2?}", r.survivor_count, r.dictators()))
}

fn corollary_n3() -> Outcome {
    let start = Instant::now();
    let r = verify_corollary(3, 3).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(600), format!("took {elapsed:?}"))?;
    ensure(r.all_dictatorial && r.survivor_count == 3, format!("{} survivors", r.survivor_count))?;
    ensure(r.dictators() == vec![1, 2, 3], format!("dictators {:?}", r.dictators()))?;
    let unpruned = search_survivors(3, 2, AxiomSet::COROLLARY, &SearchOptions::unpruned()).map_err(err)?;
    let pruned = search_survivors(3, 2, AxiomSet::COROLLARY, &SearchOptions::default()).map_err(err)?;
    ensure(unpruned.survivors == pruned.survivors, "pruning changed the survivor set at n=2")?;
    Ok(format!(
        "dictators {:?}, {} nodes, {elapsed:.2?}; pruned = unpruned at n=2 ({} vs {} nodes)",
        r.dictators(),
        r.nodes_explored,
        pruned.nodes_explored,
        unpruned.nodes_explored
    ))
}

fn theorem_n3() -> Outcome {
    let r = verify_theorem(3, 3).map_err(err)?;
    ensure(r.survivor_count == 0, format!("{} survivors", r.survivor_count))?;
    let dir = tempfile::tempdir().map_err(err)?;
    let out = dir.path().join("verify.json");
    let code = cli::run([
        "hetero-choice",
        "verify",
        "--alternatives",
        "3",
        "--environments",
        "3",
        "--axioms",
        "ic,po,iih,ir,ci",
        "--assert-theorem",
        "--out",
        out.to_str().unwrap(),
    ]);
    ensure(code == 0, format!("verify --assert-theorem exited {code}"))?;
    Ok("0 survivors; verify --assert-theorem exits 0".into())
}

/// Risk values on a coarse grid so that ties occur.
fn random_risk(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| f64::from(rng.gen_range(0..6u32)) * 0.25).collect()
}

fn risk_minimizers_consistent() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for m in 2..=5 {
        let fam = full_family(m);
        let p = RiskProfile::single(vec![0.0; m]).unwrap();
        for _ in 0..1000 {
            let rule = RiskMin::fixed(random_risk(&mut rng, m)).unwrap();
            let cc = induce(&rule, ProfileRef::Numeric(&p), &fam).map_err(err)?;
            let a = check_alpha(&cc, &fam).map_err(err)?;
            let b = check_beta(&cc, &fam).map_err(err)?;
            ensure(a.passed && b.passed, format!("risk minimizer failed alpha/beta: {:?}", a.witness.or(b.witness)))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} risk functionals over universes of size 2..=5, 0 failures"))
}

fn all_correspondences_on_three() -> Vec<ChoiceCorrespondence> {
    let full = Menu::full(3);
    let pairs = [Menu::pair(0, 1), Menu::pair(0, 2), Menu::pair(1, 2)];
    let mut out = Vec::new();
    for code in 0..27 {
        let pair_choices: Vec<Menu> = (0..3)
            .map(|k| {
                let digit = code / 3usize.pow(k as u32) % 3;
                let members = pairs[k].to_vec();
                match digit {
                    0 => Menu::singleton(members[0]),
                    1 => Menu::singleton(members[1]),
                    _ => pairs[k],
                }
            })
            .collect();
        for chosen in full.subsets() {
            let mut entries: Vec<(Menu, Menu)> = (0..3).map(|h| (Menu::singleton(h), Menu::singleton(h))).collect();
            entries.extend(pairs.iter().copied().zip(pair_choices.iter().copied()));
            entries.push((full, chosen));
            out.push(ChoiceCorrespondence::from_pairs(3, entries).unwrap());
        }
    }
    out
}

/// The 13 weak orders on three elements, as tier vectors.
fn weak_orders_on_three() -> Vec<RevealedPreference> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in 0..3u32 {
        for b in 0..3u32 {
            for c in 0..3u32 {
                let mut used = vec![a, b, c];
                used.sort_unstable();
                used.dedup();
                let dense: Vec<u32> =
                    [a, b, c].iter().map(|t| used.binary_search(t).unwrap() as u32).collect();
                if seen.insert(dense.clone()) {
                    out.push(RevealedPreference::from_tiers(&dense).unwrap());
                }
            }
        }
    }
    out
}

fn revealed_preference_suite() -> Outcome {
    let fam = full_family(3);
    let all = all_correspondences_on_three();
    ensure(all.len() == 189, format!("{} correspondences", all.len()))?;
    let mut consistent = Vec::new();
    for cc in &all {
        if check_internal_consistency(cc, &fam).map_err(err)?.passed {
            let r = reveal(cc).map_err(err)?;
            ensure(check_complete_transitive(&r).passed, "revealed preference not a weak order")?;
            ensure(roundtrip_check(cc, &fam).map_err(err)?.passed, "roundtrip failed")?;
            consistent.push(cc.clone());
        }
    }
    let orders = weak_orders_on_three();
    ensure(orders.len() == 13, format!("{} weak orders", orders.len()))?;
    let mut rationalized = Vec::new();
    for order in &orders {
        let cc = rationalize(order, &fam).map_err(err)?;
        ensure(check_internal_consistency(&cc, &fam).map_err(err)?.passed, "rationalized correspondence is inconsistent")?;
        rationalized.push(cc);
    }
    ensure(consistent.len() == orders.len(), format!("{} consistent correspondences", consistent.len()))?;
    ensure(rationalized.iter().all(|cc| consistent.contains(cc)), "rationalized set differs from the consistent set")?;
    Ok(format!("189 classified: {} consistent = {} rationalized weak orders", consistent.len(), rationalized.len()))
}

fn monotone_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut compared = 0;
    for t in MonotoneTransform::catalogue() {
        for i in 0..100 {
            let m = 2 + i % 4;
            let r = random_risk(&mut rng, m);
            let c: Vec<f64> = r.iter().map(|&x| t.apply(x)).collect();
            let (a, b) = (RiskMin::fixed(r).unwrap(), RiskMin::fixed(c).unwrap());
            let p = RiskProfile::single(vec![0.0; m]).unwrap();
            for menu in Menu::full(m).subsets() {
                let x = a.choose(ProfileRef::Numeric(&p), menu).map_err(err)?;
                let y = b.choose(ProfileRef::Numeric(&p), menu).map_err(err)?;
                ensure(x == y, format!("{t:?} changed the choice on {menu}: {x} vs {y}"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{} transforms x 100 functionals, {compared} menus identical", MonotoneTransform::catalogue().len()))
}

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/zoo_audit.json")
}

fn docs_table_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/zoo_audit.md")
}

fn docs_table(reports: &[AxiomReport]) -> String {
    format!(
        "# Reference audit\n\nThree hypotheses, three environments, seed 7, ties included. \
         `pass*` marks a pass by construction (ordinal rules cannot see magnitudes).\n\
         Generated from `crates/core/tests/fixtures/zoo_audit.json`.\n\n{}",
        render_table(reports)
    )
}

fn zoo_regression() -> Outcome {
    let first = reference_audit().map_err(err)?;
    let second = reference_audit().map_err(err)?;
    let json = serde_json::to_string_pretty(&first).map_err(err)? + "\n";
    ensure(json == serde_json::to_string_pretty(&second).map_err(err)? + "\n", "audit differs between runs")?;
    if std::env::var_os("BLESS").is_some() {
        fs::create_dir_all(fixture_path().parent().unwrap()).map_err(err)?;
        fs::write(fixture_path(), &json).map_err(err)?;
        fs::create_dir_all(docs_table_path().parent().unwrap()).map_err(err)?;
        fs::write(docs_table_path(), docs_table(&first)).map_err(err)?;
    }
    let fixture = fs::read_to_string(fixture_path()).map_err(|e| format!("fixture: {e}"))?;
    ensure(fixture == json, "audit differs from the fixture")?;
    let table = fs::read_to_string(docs_table_path()).map_err(|e| format!("docs table: {e}"))?;
    ensure(table == docs_table(&first), "docs table is stale")?;

    fn by_name<'a>(reports: &'a [AxiomReport], name: &'a str) -> impl Iterator<Item = &'a AxiomReport> {
        reports.iter().filter(move |r| r.rule == name)
    }
    let find = |name| by_name(&first, name);
    let ws = find("weighted_sum").next().ok_or("no weighted_sum")?;
    ensure(ws.passed(Axiom::Iih) == Some(false) && ws.passed(Axiom::Ir) == Some(false), "weighted_sum should fail IIH and IR")?;
    let pf = find("pareto_front").next().ok_or("no pareto_front")?;
    ensure(pf.passed(Axiom::Beta) == Some(false), "pareto_front should fail beta")?;
    for (i, r) in find("erm_single").enumerate() {
        for a in [Axiom::Pareto, Axiom::Iih, Axiom::Ir] {
            ensure(r.passed(a) == Some(true), format!("erm_single({}) fails {a}", i + 1))?;
        }
        ensure(r.dictator == Some(i + 1), format!("erm_single({}) dictator {:?}", i + 1, r.dictator))?;
    }
    let borda = find("borda").next().ok_or("no borda")?;
    let borda_fails: Vec<String> =
        borda.verdicts.iter().filter(|v| !v.passed).map(|v| v.axiom.to_string()).collect();

    let mut replayed = 0;
    for (spec, r) in reference_specs().iter().zip(&first) {
        let rule = spec.build(3, 3).map_err(err)?;
        for v in r.verdicts.iter().filter(|v| !v.passed) {
            let w = v.witness.as_ref().ok_or("failed verdict without witness")?;
            ensure(replay(w, Some(rule.as_ref())).map_err(err)?, format!("{} {} witness does not replay", r.rule, v.axiom))?;
            replayed += 1;
        }
    }
    Ok(format!(
        "{} rules stable and equal to fixture; {replayed} witnesses replay; borda fails [{}], dictator {:?}",
        first.len(),
        borda_fails.join(","),
        borda.dictator
    ))
}

fn traces() -> Outcome {
    let start = Instant::now();
    let mut steps = Vec::new();
    for n in 1..=10 {
        for dictator in BTreeSet::from([0, n - 1]) {
            let rule = ErmSingle::new(dictator);
            let t = trace_decisiveness(&rule, n).map_err(err)?;
            ensure(t.is_valid(), format!("invalid trace at n={n}"))?;
            let mut sizes = vec![n];
            for s in &t.steps {
                let set = s.decisive();
                let config_ok = s.checks.iter().all(|c| {
                    is_locally_decisive(&rule, c.set, c.better, c.worse, 3, n).unwrap_or(false)
                });
                ensure(config_ok, format!("step check fails to re-validate at n={n}"))?;
                ensure(set.len() < *sizes.last().unwrap(), "chain does not shrink")?;
                sizes.push(set.len());
            }
            ensure(t.terminal.len() == 1 && t.terminal.contains(dictator), format!("terminal {:?}", t.terminal))?;
            if dictator == 0 {
                steps.push(t.steps.len());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("n=1..10 valid, steps {steps:?}, {elapsed:.2?}"))
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..w.len() {
        acc += w[k] * x[k];
    }
    acc
}

/// Recomputes one cell with a single loop and explicit formulas.
fn oracle_cell(h: &TabularHypothesis, d: &SyntheticDataset, loss: LossKind, lambda: f64) -> f64 {
    let mut total = 0.0;
    for e in d.examples() {
        let l = match (&h.predictor, &e.label) {
            (Predictor::Affine { weights, bias }, Label::Real(y)) => {
                let s = dot(weights, &e.input) + bias;
                match loss {
                    LossKind::Square => (y - s) * (y - s),
                    LossKind::Absolute => (y - s).abs(),
                    LossKind::Hinge => f64::max(0.0, 1.0 - y * s),
                    LossKind::CrossEntropy => unreachable!(),
                }
            }
            (Predictor::Softmax { weights, biases }, Label::Class(k)) => {
                let z: f64 = weights.iter().zip(biases).map(|(w, b)| (dot(w, &e.input) + b).exp()).sum();
                -((dot(&weights[*k], &e.input) + biases[*k]).exp() / z).ln()
            }
            _ => unreachable!(),
        };
        total += l;
    }
    total / d.examples().len() as f64 + lambda * h.norm
}

fn risk_parity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dims = 3;
    let mut cells = 0;
    let mut worst: f64 = 0.0;
    for (loss, signed, classes) in [
        (LossKind::Square, None, None),
        (LossKind::Absolute, None, None),
        (LossKind::Hinge, Some(true), None),
        (LossKind::CrossEntropy, Some(false), Some(2)),
    ] {
        let environments = (0..5)
            .map(|i| {
                let weights: Vec<f64> = (0..dims).map(|_| rng.gen_range(-2.0..2.0)).collect();
                match signed {
                    None => EnvGenerator::LinearGaussian {
                        samples: 30 + 10 * i,
                        weights,
                        bias: rng.gen_range(-1.0..1.0),
                        noise_std: 0.5,
                        input_std: 1.0,
                        seed: None,
                    },
                    Some(signed) => EnvGenerator::LabelFlip {
                        samples: 30 + 10 * i,
                        weights,
                        bias: 0.0,
                        flip_rate: 0.1 * i as f64,
                        input_std: 1.0,
                        signed,
                        seed: None,
                    },
                }
            })
            .collect();
        let envs = synth_generate(&GeneratorSpec { environments }, 77).map_err(err)?;
        let hyps: Vec<TabularHypothesis> = (0..16)
            .map(|j| {
                let mut w = || (0..dims).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<f64>>();
                let predictor = match classes {
                    None => Predictor::Affine { weights: w(), bias: rng.gen_range(-1.0..1.0) },
                    Some(_) => Predictor::Softmax { weights: vec![w(), w()], biases: vec![0.0, 0.5] },
                };
                TabularHypothesis::new(format!("h{j}"), predictor, rng.gen_range(0.0..3.0)).unwrap()
            })
            .collect();
        let spec = LossSpec { kind: loss, classes };
        let reg = RegularizerSpec::new(Penalty::Identity, 0.05).unwrap();
        let p = build_profile_multisource(&hyps, &envs, &spec, &reg).map_err(err)?;
        for _ in 0..100 {
            let (i, j) = (rng.gen_range(0..envs.len()), rng.gen_range(0..hyps.len()));
            let want = oracle_cell(&hyps[j], &envs[i], loss, 0.05);
            let rel = (p.get(i, j) - want).abs() / want.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            ensure(rel <= 1e-12, format!("{loss:?} cell ({i},{j}): {} vs {want}", p.get(i, j)))?;
            cells += 1;
        }
    }

    for k in 0..100 {
        let (m, n) = (2 + k % 4, 1 + k % 5);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
        let p = RiskProfile::new(rows).unwrap();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..5.0)).collect();
        let federated = RiskMin::fixed(weighted_objective(&p, &w).map_err(err)?).unwrap();
        let ws = WeightedSum::new(w).unwrap();
        for menu in Menu::full(m).subsets() {
            let a = federated.choose(ProfileRef::Numeric(&p), menu).map_err(err)?;
            let b = ws.choose(ProfileRef::Numeric(&p), menu).map_err(err)?;
            ensure(a == b, format!("federated identity fails on {menu}"))?;
        }
    }
    Ok(format!("{cells} cells, worst relative error {worst:.1e}; federated identity on 100 profiles"))
}

fn run_twice(args: &[&str], out: &std::path::Path) -> Result<String, String> {
    let mut full: Vec<String> = vec!["hetero-choice".into()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.extend(["--out".into(), out.display().to_string(), "--no-timestamp".into()]);
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let code = cli::run(full.clone());
        ensure(code == 0, format!("{args:?} exited {code}"))?;
        outputs.push(fs::read(out).map_err(err)?);
    }
    ensure(outputs[0] == outputs[1], format!("{args:?} is not byte-identical across runs"))?;
    let value: serde_json::Value = serde_json::from_slice(&outputs[0]).map_err(err)?;
    report::validate(&value).map_err(|e| format!("{args:?}: {e}"))?;
    String::from_utf8(outputs.swap_remove(0)).map_err(err)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{
  "generator": {"environments": [
    {"kind": "linear_gaussian", "samples": 50, "weights": [1.0, -1.0], "noise_std": 0.2},
    {"kind": "linear_gaussian", "samples": 40, "weights": [0.5, 1.0], "bias": 1.0, "noise_std": 0.4}
  ]},
  "hypotheses": [
    {"id": "a", "predictor": {"kind": "affine", "weights": [1.0, -1.0], "bias": 0.0}},
    {"id": "b", "predictor": {"kind": "affine", "weights": [0.5, 1.0], "bias": 1.0}},
    {"id": "c", "predictor": {"kind": "affine", "weights": [0.75, 0.0], "bias": 0.5}}
  ],
  "loss": {"kind": "square"}
}"#,
    )
    .map_err(err)?;
    let profile = dir.path().join("profile.json");
    run_twice(&["profile", "--spec", spec.to_str().unwrap(), "--seed", "42"], &profile)?;
    let runs: [&[&str]; 4] = [
        &["audit", "--rule", "weighted_sum", "--weights", "0.5,0.5", "--envs", "2", "--universe", "3", "--seed", "7"],
        &["audit", "--rule", "erm_single", "--env-index", "2", "--profile-file", profile.to_str().unwrap()],
        &["verify", "--alternatives", "3", "--environments", "3", "--axioms", "ic,po,iih,ir"],
        &["trace", "--environments", "5"],
    ];
    for (i, args) in runs.iter().enumerate() {
        run_twice(args, &dir.path().join(format!("run{i}.json")))?;
    }
    Ok("profile, audit (random and file), verify, trace reports byte-identical and schema-valid".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("corollary at m=3, n=2", corollary_n2),
        ("corollary at m=3, n=3 with pruning soundness", corollary_n3),
        ("impossibility at m=3, n=3", theorem_n3),
        ("risk minimizers are internally consistent", risk_minimizers_consistent),
        ("revealed preference on all correspondences over three hypotheses", revealed_preference_suite),
        ("argmin sets invariant under monotone transforms", monotone_invariance),
        ("zoo audit regression", zoo_regression),
        ("decisiveness traces for n=1..10", traces),
        ("risk pipeline oracle parity and federated identity", risk_parity),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
