// Forgetting the direction of each comparison and recovering it: the sign
// lifts of a distance matrix and the two consistent ones.

use pc_gauge::distance::{consistent_lifts, count_lifts, enumerate_lifts, to_distance, triangle_check};
use pc_gauge::{GroupElement, GroupSpec, PCMatrix, WeightVector};

pub fn run_example() -> pc_gauge::Result<()> {
    let rp = GroupElement::RPlus;
    let w = WeightVector::new(GroupSpec::rplus(), vec![rp(1.0), rp(3.0), rp(0.5)])?;
    let a = PCMatrix::from_weights(&w)?;
    let k = to_distance(&a)?;
    println!("k =\n{}", k.as_matrix());
    println!("triangle inequality: {}", triangle_check(&k));
    println!("lifts: {} (enumerated {})", count_lifts(&k)?, enumerate_lifts(&k)?.count());
    let c = consistent_lifts(&k)?;
    println!("consistent lifts: {}", c.len());
    println!("they are dual: {}", c[0].dual()?.approx_eq(&c[1], 1e-12));
    println!("one of them is the original: {}", c.iter().any(|m| m.approx_eq(&a, 1e-12)));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
