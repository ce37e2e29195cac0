//! Check the full defining-relation list of the current algebra on a
//! level-one module: every coefficient of every relation over a mode
//! window, applied to a basis of states.
//!
//! Usage: `verify_relations [n] [degree] [window]` (defaults 2 3 3).

use qvertex::Engine;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let degree: i64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let window: i64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(3);
    let engine = Engine::new(n).expect("rank parameter");
    let report = engine
        .verify_defining_relations(0, degree, window, 1)
        .expect("suite run");
    println!("{}", report.text_summary());
    println!("elapsed: {} ms", report.elapsed);
    std::process::exit(if report.all_pass() { 0 } else { 1 });
}
