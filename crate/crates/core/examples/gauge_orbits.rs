// Gauge actions: consistent matrices are exactly the orbit of the identity
// matrix, and a left gauge can consistentize every 3x3 matrix but not every
// 4x4 one.

use pc_gauge::gauge::{
    constructive_gauge, left_action, left_consistentize_3, left_consistentizing_gauge, left_orbit_obstruction,
    orbit_of_identity_contains,
};
use pc_gauge::random::{random_consistent_matrix, random_pc_matrix};
use pc_gauge::{GroupElement, GroupSpec, PCMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> pc_gauge::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = GroupSpec::se2();
    let a = random_consistent_matrix(&spec, 4, 1.0, &mut rng);
    let g = constructive_gauge(&a, 0)?;
    println!("constructive gauge has {} entries; reaches a: {}", g.len(), orbit_of_identity_contains(&a, 1e-9)?);
    let b = random_pc_matrix(&spec, 4, 1.0, &mut rng);
    println!("random matrix in the orbit: {}", orbit_of_identity_contains(&b, 1e-9)?);

    // lambda = 2, k = 3
    let rp = GroupElement::RPlus;
    let cake = PCMatrix::new(GroupSpec::rplus(), 3, vec![rp(2.0), rp(0.125), rp(2.0)])?;
    let r = left_consistentize_3(&cake)?;
    println!("layered cake: g2 = {:?}, consistent = {}", r.g2, r.matrix.is_covariant_consistent(1e-12)?);

    let four = random_pc_matrix(&GroupSpec::rplus(), 4, 1.0, &mut rng);
    println!("random 4x4 passes the obstruction: {}", left_orbit_obstruction(&four)?);
    let mut fixed = four.clone();
    let a13_a32_a24 = GroupSpec::rplus().compose_all([&four.entry(0, 2)?, &four.entry(2, 1)?, &four.entry(1, 3)?])?;
    fixed.set(0, 3, a13_a32_a24)?;
    let gauge = left_consistentizing_gauge(&fixed)?;
    println!(
        "with a14 = a13 a32 a24: obstruction passes = {}, gauge consistentizes = {}",
        left_orbit_obstruction(&fixed)?,
        left_action(&gauge, &fixed)?.is_covariant_consistent(1e-9)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
