//! Audits the reference rule zoo on three hypotheses and three environments
//! and prints the verdict table. Failed verdicts carry a replayable witness.

use hetero_choice::zoo::{reference_audit, render_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reports = reference_audit()?;
    print!("{}", render_table(&reports));
    println!();
    for r in &reports {
        for v in r.verdicts.iter().filter(|v| !v.passed) {
            if let Some(w) = &v.witness {
                println!("{} fails {}: {}", r.rule, v.axiom, w.note);
            }
        }
    }
    Ok(())
}
