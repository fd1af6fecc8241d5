//! Word problem in a right-angled Artin group on a 4-cycle.

use squarebraid::raag::RaagGraph;
use squarebraid::word::Word;

fn main() -> squarebraid::Result<()> {
    let g = RaagGraph::parse_edge_list("vertices: a b c d\na b\nb c\nc d\nd a\n")?;
    for s in ["a c a^-1 c^-1", "b a b^-1 a^-1", "c a b a^-1 c^-1 b^-1", "d b a d^-1 b^-1"] {
        let w = Word::parse(s)?;
        println!("{s:<26} normal form {:<14} trivial {}", g.normal_form(&w)?.to_string(), g.is_identity(&w)?);
    }
    Ok(())
}
