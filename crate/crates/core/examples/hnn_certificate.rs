//! Checks that the p x 3 braid group presentation matches an HNN extension of
//! a right-angled Artin group, and shows Britton reduction on a few words.

use squarebraid::hnn::{build_hp, stable_letter, verify_theorem, x, xp};
use squarebraid::word::Word;

fn main() -> squarebraid::Result<()> {
    let p = 8;
    let h = build_hp(p)?;
    let v = stable_letter().word();
    for g in [x(1), xp(2)] {
        let w = Word::product(&[&v, &g.word(), &v.inverse()]);
        println!("{w}  ->  {}", h.britton_reduce(&w)?);
    }
    let pinched = Word::product(&[&v, &x(1).word(), &v.inverse(), &v, &x(1).word().inverse(), &v.inverse()]);
    println!("{pinched} is trivial: {}", h.is_identity(&pinched)?);

    let cert = verify_theorem(p)?;
    print!("{}", cert.to_text());
    Ok(())
}
