//! The two-site R-matrix intertwines the comultiplication and its opposite
//! on a pair of evaluation modules: `R·Δ(x) = Δ'(x)·R`, checked as exact
//! rational functions of z2/z1 and expanded through order 10.

use qvertex::Engine;

fn main() {
    let engine = Engine::new(2).expect("rank parameter");
    let report = engine.verify_rmatrix(10, 3).expect("suite run");
    println!("{}", report.text_summary());
    println!("elapsed: {} ms", report.elapsed);
    std::process::exit(if report.all_pass() { 0 } else { 1 });
}
