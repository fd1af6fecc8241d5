//! For small p the p x 3 braid group is a right-angled Artin group; this
//! recovers the defining graph and compares it with the expected one.

use squarebraid::hnn::identify_small;

fn main() -> squarebraid::Result<()> {
    for p in 3..=5 {
        let id = identify_small(p)?;
        println!("p = {p}: {}", id.description);
        println!("  recovered graph isomorphic to expected: {}", id.isomorphic);
        print!("{}", id.graph.to_edge_list());
    }
    Ok(())
}
