//! Runs the scripted Tietze simplification, prints every stage summary, then
//! replays the move log from scratch and confirms the digests agree.

use squarebraid::tietze::{relator_census, replay, run_pipeline};

fn main() -> squarebraid::Result<()> {
    let (p, q) = (5, 4);
    let run = run_pipeline(p, q)?;
    for s in &run.stages {
        println!(
            "{:<6} {:>3} generators {:>4} relators  digest {}",
            s.stage.name(),
            s.generators().len(),
            s.relators().len(),
            s.digest()
        );
    }
    println!("{} moves, stage checks {}", run.log.moves().count(), if run.all_checks_pass() { "pass" } else { "FAIL" });
    for c in run.failed_checks() {
        println!("  failed: {} {}", c.stage, c.name);
    }
    for (family, count) in relator_census(run.final_presentation())? {
        println!("  family {family:>3}: {count}");
    }

    let text = run.log.render();
    let parsed = squarebraid::tietze::MoveLog::parse(&text)?;
    let rep = replay(&parsed)?;
    println!("replay reproduces every stage: {}", rep.stages == run.stages);
    Ok(())
}
