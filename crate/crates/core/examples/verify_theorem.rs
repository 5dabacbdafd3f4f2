//! Exhaustive search over pairwise rules on three hypotheses: with IC, PO,
//! IIH and IR only dictatorships survive; adding CI leaves nothing.

use hetero_choice::verify::{verify_corollary, verify_theorem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=3 {
        let corollary = verify_corollary(3, n)?;
        println!(
            "n={n}: {} survivors under ic,po,iih,ir, dictators {:?}, {} nodes, {} ms",
            corollary.survivor_count,
            corollary.dictators(),
            corollary.nodes_explored,
            corollary.elapsed_ms.unwrap_or(0),
        );
        for s in &corollary.survivors {
            println!("    {}", s.tables.join(" "));
        }
        let theorem = verify_theorem(3, n)?;
        println!("n={n}: {} survivors with ci added", theorem.survivor_count);
    }
    Ok(())
}
