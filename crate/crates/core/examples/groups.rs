// Coefficient groups: composition, inverses, deviation from the identity
// and the `|det|` morphism.

use pc_gauge::{GroupElement, GroupKind, GroupSpec, Morphism};

pub fn run_example() -> pc_gauge::Result<()> {
    let rplus = GroupSpec::rplus();
    let x = GroupElement::RPlus(2.0);
    let y = GroupElement::RPlus(3.0);
    println!("2 * 3 = {:?}", rplus.compose(&x, &y)?);
    println!("deviation of 2 = |ln 2| = {:.6}", rplus.deviation(&x)?);

    let se2 = GroupSpec::se2();
    let turn = GroupElement::se2(std::f64::consts::FRAC_PI_2, [1.0, 0.0]);
    let back = se2.compose(&turn, &se2.inverse(&turn)?)?;
    println!("turn . turn^-1 is identity: {}", se2.is_identity(&back)?);

    let gl = GroupSpec::gl(2);
    let m = GroupElement::GL(nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]));
    let det = Morphism::AbsDet.apply(&gl, &m)?;
    println!("|det| of [[2, 1], [0, 3]] = {:?}", det);

    let product = GroupSpec::new(GroupKind::Product(vec![GroupKind::RPlus, GroupKind::SE2]))?;
    let p = GroupElement::Product(vec![x, turn]);
    println!("{product}: deviation of (2, turn) = {:.6}", product.deviation(&p)?);
    println!("{product} is abelian: {}", product.is_abelian());
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
