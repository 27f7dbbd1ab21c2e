// Recovering weights: the exact chain solution and the log least-squares
// fit on an inconsistent matrix.

use pc_gauge::weights::{solve_chain, solve_least_squares, weights_from_potential};
use pc_gauge::{GroupElement, GroupSpec, PCMatrix, WeightVector};

pub fn run_example() -> pc_gauge::Result<()> {
    let rp = GroupElement::RPlus;
    let w = WeightVector::new(GroupSpec::rplus(), vec![rp(1.0), rp(2.0), rp(4.0)])?;
    let a = PCMatrix::from_weights(&w)?;
    let f = solve_chain(&a)?;
    println!("potential f = {:?}", f.values());
    println!("lambda = exp(f) = {:?}", weights_from_potential(&f).entries());
    println!("reconstruction matches: {}", f.reconstruct()?.approx_eq(&a, 1e-12));

    let triad = PCMatrix::new(GroupSpec::rplus(), 3, vec![rp(1.0), rp(2.0), rp(1.0)])?;
    let chain = solve_chain(&triad)?;
    let lsq = solve_least_squares(&triad)?;
    println!("triad (1, 2, 1): chain residual {:.4}, least squares residual {:.4}", chain.residual(&triad)?, lsq.residual(&triad)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
