//! Traces how the decisive set of a dictatorship shrinks from all
//! environments to one, printing each contraction step and its check.

use hetero_choice::axioms::{decisive_sets, EnvSet};
use hetero_choice::verify::trace_decisiveness;
use hetero_choice::zoo::ErmSingle;

fn show(set: EnvSet) -> String {
    let ids: Vec<String> = set.members().map(|e| (e + 1).to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let rule = ErmSingle::new(3);
    let trace = trace_decisiveness(&rule, n)?;
    println!("{} over {n} environments, starting from {}", trace.rule, show(trace.initial));
    for (i, step) in trace.steps.iter().enumerate() {
        let [f, g, h] = step.hypotheses;
        println!(
            "step {}: split {} into {} and {}; on ({f},{g},{h}) choice of {{{g},{h}}} is {} -> {:?}, {} decisive ({} spread checks)",
            i + 1,
            show(step.set),
            show(step.first),
            show(step.second),
            step.pair_choice,
            step.branch,
            show(step.decisive()),
            step.spreading.len(),
        );
    }
    println!("terminal {}, valid {}", show(trace.terminal), trace.is_valid());

    let sets = decisive_sets(&ErmSingle::new(0), 3, 3)?;
    let listed: Vec<String> = sets.into_iter().map(show).collect();
    println!("decisive sets of erm_single(1) at n=3: {}", listed.join(" "));
    Ok(())
}
