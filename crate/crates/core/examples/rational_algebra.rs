//! Exact arithmetic on rational transfer functions and matrices in `q⁻¹`.

use dynnet::ratfun::{RationalFunction, TransferMatrix};
use num_complex::Complex64;

fn main() -> dynnet::Result<()> {
    let a = RationalFunction::from_i64s(&[0, 1], &[2, -1])?;
    let b = RationalFunction::from_i64s(&[1], &[1, 3])?;
    println!("a = {a}");
    println!("b = {b}");
    println!("a + b = {}", &a + &b);
    println!("a * b = {}", &a * &b);
    println!("a / b = {}", a.checked_div(&b)?);
    println!("poles of a: {:?}, stable: {}", a.poles(), a.is_stable());

    let m = TransferMatrix::from_fn(2, 2, |i, j| if i == j { RationalFunction::one() } else { a.clone() });
    let inv = m.inverse()?;
    println!("inverse of [[1, a], [a, 1]]:");
    for i in 0..2 {
        println!("  [{}, {}]", inv.get(i, 0), inv.get(i, 1));
    }
    assert!(m.mul(&inv)?.is_identity());
    let z = Complex64::from_polar(1.0, 0.3);
    println!("numeric rank at e^(0.3i): {}", m.rank_at(&[z])?);
    Ok(())
}
