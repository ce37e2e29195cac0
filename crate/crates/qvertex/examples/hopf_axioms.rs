//! The Hopf structure on currents: the comultiplication respects every
//! defining relation on a two-fold tensor module, counit bindings reproduce
//! the generators, antipode compositions act as the counit, and the
//! comultiplication is coassociative at small degree.

use qvertex::Engine;

fn main() {
    let engine = Engine::new(2).expect("rank parameter");
    let report = engine.verify_hopf(1, 1, 1).expect("suite run");
    println!("{}", report.text_summary());
    println!("elapsed: {} ms", report.elapsed);
    println!("(the acceptance suite runs this at degree 2, window 2)");
    std::process::exit(if report.all_pass() { 0 } else { 1 });
}
