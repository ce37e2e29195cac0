//! The exact coefficient layer: q-integers, rational-function expansions in
//! either direction, and infinite q-Pochhammer products with exact rational
//! coefficients.

use qvertex::scalar::ratfn::Direction;
use qvertex::scalar::{pochhammer_series, qint, QExp, QRat, RatFunc};

fn main() {
    for k in 1..=4 {
        println!("[{k}] = {}", qint(k));
    }
    // the exchange function (q^2 x - 1)/(x - q^2), expanded about x = 0
    let g = RatFunc::linear_frac(
        QRat::from_int(-1),
        QRat::q_pow(QExp::from_integer(2)),
        QRat::q_pow(QExp::from_integer(2)).neg(),
        QRat::one(),
    );
    println!("\n(q^2 x - 1)/(x - q^2) about x = 0:");
    print!("{}", g.expand(Direction::AtZero, "x", 3).unwrap().dump());
    println!("\nthe same function about x = infinity (series in 1/x):");
    print!("{}", g.expand(Direction::AtInfinity, "y", 3).unwrap().dump());
    println!("\n(q x; q^4)_infinity:");
    print!(
        "{}",
        pochhammer_series(&QRat::q_pow(QExp::from_integer(1)), QExp::from_integer(4), "x", 4)
            .dump()
    );
}
