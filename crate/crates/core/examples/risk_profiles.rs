//! Generates environments with different label noise, scores a few
//! hypotheses on each, and compares the choices of several rules.

use hetero_choice::model::{Menu, ProfileRef};
use hetero_choice::risk::{
    build_profile_multisource, synth_generate, EnvGenerator, GeneratorSpec, LossKind, LossSpec,
    RegularizerSpec, TabularHypothesis,
};
use hetero_choice::rule::AggregationRule;
use hetero_choice::zoo::{ErmSingle, Leximin, ParetoFront, RiskMin, WeightedSum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let environments = [0.0, 0.1, 0.3]
        .into_iter()
        .map(|flip_rate| EnvGenerator::LabelFlip {
            samples: 400,
            weights: vec![1.0, -0.5],
            bias: 0.0,
            flip_rate,
            input_std: 1.0,
            signed: true,
            seed: None,
        })
        .collect();
    let envs = synth_generate(&GeneratorSpec { environments }, 11)?;
    let hyps = vec![
        TabularHypothesis::affine("true", vec![1.0, -0.5], 0.0),
        TabularHypothesis::affine("steep", vec![3.0, -1.5], 0.0),
        TabularHypothesis::affine("tilted", vec![1.0, 0.5], 0.0),
        TabularHypothesis::affine("flat", vec![0.1, -0.05], 0.0),
    ];
    let loss = LossSpec::new(LossKind::Hinge);
    let p = build_profile_multisource(&hyps, &envs, &loss, &RegularizerSpec::none())?;
    for e in 0..p.envs() {
        let row: Vec<String> = p.row(e).iter().map(|r| format!("{r:.3}")).collect();
        println!("env {} hinge risks: {}", e + 1, row.join("  "));
    }

    let rules: Vec<Box<dyn AggregationRule>> = vec![
        Box::new(ErmSingle::new(0)),
        Box::new(ErmSingle::new(2)),
        Box::new(RiskMin::pooled()),
        Box::new(WeightedSum::new(vec![0.2, 0.3, 0.5])?),
        Box::new(Leximin),
        Box::new(ParetoFront),
    ];
    let menu = Menu::full(hyps.len());
    for rule in &rules {
        let chosen = rule.choose(ProfileRef::Numeric(&p), menu)?;
        let ids: Vec<&str> = chosen.members().map(|h| hyps[h].id.as_str()).collect();
        println!("{:>12}: {}", rule.name(), ids.join(", "));
    }
    Ok(())
}
