//! Every check over the standard grid set, printed as text.

use squarebraid::report::{report_many, GRID_SET};

fn main() -> squarebraid::Result<()> {
    let r = report_many(&GRID_SET)?;
    print!("{}", r.to_text());
    if !r.pass {
        std::process::exit(1);
    }
    Ok(())
}
