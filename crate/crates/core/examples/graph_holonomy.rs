// Incomplete comparisons on a graph: loop holonomy, consistency and the
// ranked indicator by loop length.

use pc_gauge::graph::{
    default_score, graph_weights, holonomy_generators, is_graph_consistent, ranked_kii, GraphPCMatrix,
    DEFAULT_PATH_BUDGET,
};
use pc_gauge::{GroupElement, GroupSpec};

fn five_nodes(a45: f64) -> pc_gauge::Result<GraphPCMatrix> {
    let rp = GroupElement::RPlus;
    // star at node 1 plus the edge 4-5: one independent loop 1-4-5-1
    GraphPCMatrix::new(
        GroupSpec::rplus(),
        5,
        vec![(0, 1, rp(2.0)), (0, 2, rp(0.5)), (0, 3, rp(2.0)), (0, 4, rp(5.0)), (3, 4, rp(a45))],
    )
}

pub fn run_example() -> pc_gauge::Result<()> {
    let spec = GroupSpec::rplus();
    let g = five_nodes(3.0)?;
    let gens = holonomy_generators(&g, 0)?;
    println!("{} loop generator(s): {:?}", gens.len(), gens);
    println!("consistent: {}", is_graph_consistent(&g, 1e-9)?);
    let series = ranked_kii(&g, 0, 6, |h| default_score(&spec, h), DEFAULT_PATH_BUDGET)?;
    println!("ranked indicator: {series}");

    let flat = five_nodes(2.5)?;
    println!("with a45 = 2.5 the loop closes: {}", is_graph_consistent(&flat, 1e-9)?);
    println!("weights: {:?}", graph_weights(&flat)?.entries());
    Ok(())
}

#[allow(dead_code)]
fn main() -> pc_gauge::Result<()> {
    run_example()
}
