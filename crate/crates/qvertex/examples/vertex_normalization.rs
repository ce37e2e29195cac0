//! The four vertex-operator families and their highest-weight
//! normalizations ⟨·|F_i(z)|·⟩ = 1, plus a template dump of one component.

use qvertex::intertwiner::VoFamily;
use qvertex::Engine;

fn main() {
    for n in [2usize, 3] {
        let engine = Engine::new(n).expect("rank parameter");
        let report = engine.verify_normalization().expect("suite run");
        println!("{}", report.text_summary());
    }
    let engine = Engine::new(2).unwrap();
    println!("type-I component (sup 0, j 0) template:");
    print!("{}", engine.vo(VoFamily::TypeI, 0, 0, "z").dump(&engine, 4));
}
