//! The four rank-two two-point functions of type-I vertex operators,
//! computed exactly by Wick contraction and compared against the reference
//! infinite-product formulas; mismatch verdicts are printed verbatim.

use qvertex::intertwiner::{reference_formula, VoFamily};
use qvertex::Engine;

fn main() {
    let engine = Engine::new(2).expect("rank parameter");
    let order = 8;
    for (l, r) in [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 1), (1, 0)), ((0, 0), (1, 1))] {
        let ops = vec![
            (engine.vo(VoFamily::TypeI, l.0, l.1, "z2"), "z2".to_string()),
            (engine.vo(VoFamily::TypeI, r.0, r.1, "z1"), "z1".to_string()),
        ];
        let corr = engine.correlator(&ops, order).expect("correlator");
        println!("<PhiI:{}:{}:j={}(z2) PhiI:{}:{}:j={}(z1)>:", l.0, (l.0 + 1) % 2, l.1, r.0, (r.0 + 1) % 2, r.1);
        print!("{}", corr.series.dump());
        if let Some(reference) = reference_formula(2, l, r) {
            let rs = reference.series("z1/z2", order).expect("reference series");
            let verdict = if corr.series.agrees_with(&rs) {
                "match".to_string()
            } else {
                format!("MISMATCH first at x^{}", corr.series.first_difference(&rs).unwrap())
            };
            println!("vs reference: {verdict}");
        }
        println!();
    }
}
