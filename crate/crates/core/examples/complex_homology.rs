//! Builds the hard-square configuration complex on a grid and computes its
//! integer homology next to the closed-form Betti numbers.
//!
//! cargo run --example complex_homology -- 5 4

use squarebraid::grid::{build_grid, enumerate_cells};
use squarebraid::homology::{homology, predict_betti};

fn main() -> squarebraid::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, q) = (args.first().copied().unwrap_or(4), args.get(1).copied().unwrap_or(3));
    let grid = build_grid(p, q)?;
    for n in [(p * q - 2) as usize, (p * q - 1) as usize] {
        let c = enumerate_cells(&grid, n)?;
        let h = homology(&c)?;
        println!("{p}x{q} grid, {n} squares: f = {:?}, betti = {:?}, euler = {}", c.f_vector(), h.betti, h.euler);
        if !h.is_torsion_free() {
            println!("  torsion: {:?}", h.torsion);
        }
    }
    let (b1, b2) = predict_betti(p, q)?;
    println!("closed form at pq-2 squares: b1 = {b1}, b2 = {b2}");
    Ok(())
}
