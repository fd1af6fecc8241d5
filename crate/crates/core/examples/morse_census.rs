//! Tries each spanning-tree shape and prints the critical cell census of the
//! resulting discrete gradient field.

use squarebraid::grid::{build_grid, enumerate_cells};
use squarebraid::homology::homology;
use squarebraid::morse::{morse_homology, select_tree};

fn main() -> squarebraid::Result<()> {
    let (p, q) = (5, 4);
    let c = enumerate_cells(&build_grid(p, q)?, (p * q - 2) as usize)?;
    let sel = select_tree(&c)?;
    println!("predicted critical cells: {:?}", sel.predicted);
    for a in &sel.attempts {
        let mark = if a.matches_prediction { "match" } else { "differs" };
        println!("  {:<14} {:?} {mark}", a.kind.name(), a.census);
    }
    let Some(field) = sel.chosen else {
        println!("no tree gave the predicted census");
        return Ok(());
    };
    println!("checks: {:?}", field.checks);
    let mh = morse_homology(&field, &c)?;
    println!("Morse complex betti {:?}, cellular betti {:?}", mh.betti, homology(&c)?.betti);
    Ok(())
}
