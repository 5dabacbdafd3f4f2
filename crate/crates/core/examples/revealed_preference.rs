//! Reveals the preference behind a risk minimizer's choices, checks it is a
//! weak order, and rebuilds the choices from it.

use hetero_choice::axioms::check_internal_consistency;
use hetero_choice::model::{FeasibleFamily, ProfileRef, RiskProfile, Universe};
use hetero_choice::revealed::{check_complete_transitive, rationalize, reveal, roundtrip_check};
use hetero_choice::rule::induce;
use hetero_choice::zoo::{ParetoFront, RiskMin};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let universe = Universe::new(["ridge", "lasso", "tree", "knn"])?;
    let fam = FeasibleFamily::enumerate(&universe, None)?;
    let rule = RiskMin::fixed(vec![0.31, 0.27, 0.31, 0.40])?;
    let unused = RiskProfile::single(vec![0.0; 4])?;
    let cc = induce(&rule, ProfileRef::Numeric(&unused), &fam)?;

    let pref = reveal(&cc)?;
    for f in universe.ids() {
        let row: Vec<&str> = universe
            .ids()
            .map(|g| if pref.weakly_prefers(f, g) { "R" } else { "." })
            .collect();
        println!("{:>6} {}", universe.label(f), row.join(" "));
    }
    println!("complete and transitive: {}", check_complete_transitive(&pref).passed);
    println!("roundtrip: {}", roundtrip_check(&cc, &fam)?.passed);
    println!("rationalized equals original: {}", rationalize(&pref, &fam)? == cc);

    // Pareto fronts over several environments are not rationalizable.
    let p = RiskProfile::new(vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.4, 0.3, 0.1, 0.2]])?;
    let front = induce(&ParetoFront, ProfileRef::Numeric(&p), &fam)?;
    let v = check_internal_consistency(&front, &fam)?;
    println!("pareto front internally consistent: {}", v.passed);
    if let Some(w) = v.witness {
        println!("  {}", w.note);
    }
    Ok(())
}
