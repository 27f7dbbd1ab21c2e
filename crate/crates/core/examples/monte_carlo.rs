// Random comparison matrices: acceptance probability of an indicator
// threshold, a reweighted expectation, and Haar integration on the positive
// reals.

use pc_gauge::inconsistency::IndicatorKind;
use pc_gauge::stochastic::{
    acceptance_probability, feynman_kac_expectation, haar_integrate_rplus, plain_mean, EntryMeasure, ProductMeasure,
};

pub fn run_example() -> pc_gauge::Result<()> {
    let kii3 = |a: &pc_gauge::PCMatrix| IndicatorKind::Kii3.evaluate(a);
    let m = ProductMeasure::homogeneous(3, EntryMeasure::LogNormal { sigma: 0.5 })?;
    for eps in [0.05, 0.1, 0.3] {
        let p = acceptance_probability(&m, kii3, eps, 20_000, 7)?;
        println!("P(Kii3 <= {eps}) = {:.4} +- {:.4}", p.value, p.stderr);
    }
    let plain = plain_mean(&m, kii3, 20_000, 7)?;
    let tilted = feynman_kac_expectation(kii3, kii3, 0.1, &m, 20_000, 7)?;
    println!("E[Kii3] = {:.4}; reweighted by exp(-Kii3 / 0.1): {:.4} (ess {:.0})", plain.value, tilted.value, tilted.ess);
    let ln_half = haar_integrate_rplus(f64::ln, 1.0, std::f64::consts::E, 1000)?;
    println!("integral of ln x dx/x over [1, e] = {ln_half:.8}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
