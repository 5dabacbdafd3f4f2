//! A server that minimizes a weighted average of client risks behaves as a
//! single risk minimizer on the aggregated objective, and so inherits
//! internal consistency while giving up independence of irrelevant
//! hypotheses.

use hetero_choice::axioms::{check_iih, check_internal_consistency, IihSampler};
use hetero_choice::model::{FeasibleFamily, ProfileRef, RiskProfile, Universe};
use hetero_choice::risk::weighted_objective;
use hetero_choice::rule::{induce, AggregationRule};
use hetero_choice::zoo::{RiskMin, WeightedSum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let clients = RiskProfile::new(vec![
        vec![0.12, 0.30, 0.25],
        vec![0.40, 0.10, 0.22],
        vec![0.35, 0.33, 0.20],
    ])?;
    let weights = vec![0.5, 0.3, 0.2];
    let objective = weighted_objective(&clients, &weights)?;
    println!("aggregated objective: {objective:?}");

    let server = WeightedSum::new(weights)?;
    let central = RiskMin::fixed(objective)?;
    let fam = FeasibleFamily::enumerate(&Universe::of_size(3)?, None)?;
    let a = induce(&server, ProfileRef::Numeric(&clients), &fam)?;
    let b = induce(&central, ProfileRef::Numeric(&clients), &fam)?;
    println!("server and central choices agree on every menu: {}", a == b);
    println!("internally consistent: {}", check_internal_consistency(&a, &fam)?.passed);

    let v = check_iih(&server, &fam, &IihSampler::new(200, 3).pairs(3, 3))?;
    println!("{} passes iih: {}", server.name(), v.passed);
    if let Some(w) = v.witness {
        println!("  {}", w.note);
    }
    Ok(())
}
