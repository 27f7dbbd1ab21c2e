// Inconsistency indicators: the triad indicator, localization of the worst
// triad, and a GL(2) matrix the `|det|` indicator cannot see.

use nalgebra::DMatrix;
use pc_gauge::inconsistency::{kii3, IndicatorKind};
use pc_gauge::{GroupElement, GroupSpec, PCMatrix};

pub fn run_example() -> pc_gauge::Result<()> {
    println!("Kii3(1, 2, 1) = {}", kii3(1.0, 2.0, 1.0)?);
    println!("Kii3(10, 101, 10) = {:.6}", kii3(10.0, 101.0, 10.0)?);

    let rp = GroupElement::RPlus;
    let a = PCMatrix::new(
        GroupSpec::rplus(),
        4,
        vec![rp(2.0), rp(4.0), rp(8.0), rp(2.0), rp(4.0), rp(1.0)],
    )?;
    let report = IndicatorKind::Kii3.report(&a)?;
    let t = report.worst_triad.expect("Kii3 localizes");
    println!("Kii3 = {:.4}, worst triad (1-based) = {:?}", report.value, (t.indices.0 + 1, t.indices.1 + 1, t.indices.2 + 1));
    println!("chain form Kii_n = {:.4}", IndicatorKind::KiiN.evaluate(&a)?);

    let id = GroupElement::GL(DMatrix::identity(2, 2));
    let minus = GroupElement::GL(-DMatrix::identity(2, 2));
    let m = PCMatrix::new(GroupSpec::gl(2), 3, vec![id.clone(), minus, id])?;
    println!(
        "a12 = a23 = I, a13 = -I: ii_det = {}, generic = {:.4}",
        IndicatorKind::Det.evaluate(&m)?,
        IndicatorKind::Generic.evaluate(&m)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
