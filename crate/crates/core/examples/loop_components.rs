// Splitting a matrix into a consistent chain part and loop components,
// reassembling it, and watching the components under a gauge.

use pc_gauge::gauge::{ad_action, component_ad_transform, phi_n, phi_n_inverse};
use pc_gauge::random::{random_gauge, random_pc_matrix};
use pc_gauge::GroupSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> pc_gauge::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = GroupSpec::gl(2);
    let a = random_pc_matrix(&spec, 5, 0.4, &mut rng);
    let d = phi_n(&a)?;
    println!("n = 5: {} loop components, chain part consistent = {}", d.components.len(), d.consistent.is_covariant_consistent(1e-8)?);
    println!("round trip error = {:.2e}", phi_n_inverse(&d)?.max_deviation_from(&a)?);
    println!("all components trivial: {}", d.is_trivial(1e-9)?);

    let g = random_gauge(&spec, 5, 0.4, &mut rng);
    let moved = phi_n(&ad_action(&g, &a)?)?;
    let predicted = component_ad_transform(&g, &d)?;
    let worst = moved
        .components
        .iter()
        .zip(&predicted.components)
        .map(|((_, x), (_, y))| spec.deviation(&spec.divide(x, y)?))
        .try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))?;
    println!("components conjugate under the gauge (max error {worst:.2e})");
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
