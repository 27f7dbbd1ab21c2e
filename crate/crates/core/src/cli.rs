//! Command-line front end over JSON files.
//!
//! Every command prints one JSON document on stdout and exits with 0, with 1
//! when the operation itself fails (wrong group for an indicator, an
//! unsatisfiable reduction, ...) and with 2 when an input cannot be read or
//! parsed.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::distance::{consistent_lifts, count_lifts, enumerate_lifts, lift_exponent, triangle_check, MAX_ENUMERATED_SIGNS};
use crate::error::Error;
use crate::gauge::{left_consistentize_3, phi_n, phi_n_inverse};
use crate::graph::{
    default_score, graph_weights, holonomy_generators, is_graph_consistent, ranked_kii, GraphPCMatrix,
    DEFAULT_PATH_BUDGET,
};
use crate::inconsistency::IndicatorKind;
use crate::io::{self, ComparisonInput, FormatError};
use crate::matrix::{PCMatrix, DEFAULT_CONSISTENCY_TOL};
use crate::stochastic::acceptance_probability;
use crate::weights::{
    solve_chain_componentwise, solve_least_squares_componentwise, weights_from_potentials, AffinePotential,
};

#[derive(Debug, Parser)]
#[command(name = "pc-gauge", version, about = "Pairwise-comparisons matrices over groups")]
pub struct Cli {
    /// Consistency tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_CONSISTENCY_TOL)]
    pub tol: f64,
    /// Worker threads for sampling (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Kii3,
    Kiin,
    Generic,
    Det,
}

impl From<KindArg> for IndicatorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Kii3 => IndicatorKind::Kii3,
            KindArg::Kiin => IndicatorKind::KiiN,
            KindArg::Generic => IndicatorKind::Generic,
            KindArg::Det => IndicatorKind::Det,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Chain,
    Lsq,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Covariant, contravariant and graph consistency of a matrix or graph.
    Check { file: PathBuf },
    /// Inconsistency indicator value, optionally with the worst triad.
    Indicator {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        localize: bool,
    },
    /// Split a matrix into its chain part and loop components, or reassemble
    /// a decomposition file with `--inverse`.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Left gauge making a 3x3 matrix consistent.
    Reduce { file: PathBuf },
    /// Weight reconstruction for positive-real matrices.
    Weights {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Chain)]
        method: Method,
    },
    /// Loop generators, consistency and ranked indicator of a graph.
    Graph {
        file: PathBuf,
        /// Longest loop length in the ranked series.
        #[arg(long, default_value_t = 6)]
        series: usize,
        /// Base node (1-based).
        #[arg(long, default_value_t = 1)]
        source: usize,
        /// Maximum number of partial walks explored.
        #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
        budget: usize,
    },
    /// Monte-Carlo acceptance probability under a product measure.
    Sample {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Kii3)]
        ii: KindArg,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sign lifts of a distance matrix.
    Lifts { file: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Domain(Error),
    Input(FormatError),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e)
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn finish(outcome: Outcome) -> CommandResult {
    match outcome {
        Ok(v) => CommandResult {
            code: 0,
            stdout: serde_json::to_string_pretty(&v).expect("serializable") + "\n",
            stderr: String::new(),
        },
        Err(Failure::Domain(e)) => CommandResult { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
        Err(Failure::Input(e)) => CommandResult { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn load_matrix(path: &Path) -> std::result::Result<PCMatrix, Failure> {
    Ok(io::pc_matrix_from_json(&io::read_json(path)?)?)
}

pub fn cmd_check(file: &Path, tol: f64) -> CommandResult {
    finish((|| {
        Ok(match io::comparison_from_json(&io::read_json(file)?)? {
            ComparisonInput::Matrix(a) => json!({
                "covariant": a.is_covariant_consistent(tol)?,
                "contravariant": a.is_contravariant_consistent(tol)?,
                "graph_consistent": is_graph_consistent(&GraphPCMatrix::from_pc_matrix(&a)?, tol)?,
            }),
            ComparisonInput::Graph(g) => json!({"graph_consistent": is_graph_consistent(&g, tol)?}),
        })
    })())
}

pub fn cmd_indicator(file: &Path, kind: IndicatorKind, localize: bool) -> CommandResult {
    finish((|| {
        let a = load_matrix(file)?;
        if localize {
            Ok(io::indicator_report_to_json(&kind.report(&a)?))
        } else {
            Ok(json!({"value": kind.evaluate(&a)?}))
        }
    })())
}

pub fn cmd_decompose(file: &Path, inverse: bool) -> CommandResult {
    finish((|| {
        let v = io::read_json(file)?;
        if inverse {
            Ok(io::pc_matrix_to_json(&phi_n_inverse(&io::phi_from_json(&v)?)?))
        } else {
            Ok(io::phi_to_json(&phi_n(&io::pc_matrix_from_json(&v)?)?))
        }
    })())
}

pub fn cmd_reduce(file: &Path) -> CommandResult {
    finish((|| {
        let r = left_consistentize_3(&load_matrix(file)?)?;
        Ok(json!({
            "g2": io::element_to_json(&r.g2),
            "gauge": io::gauge_to_json(&r.gauge),
            "matrix": io::pc_matrix_to_json(&r.matrix),
        }))
    })())
}

pub fn cmd_weights(file: &Path, method: Method) -> CommandResult {
    finish((|| {
        let a = load_matrix(file)?;
        let fs = match method {
            Method::Chain => solve_chain_componentwise(&a)?,
            Method::Lsq => solve_least_squares_componentwise(&a)?,
        };
        let lambda = weights_from_potentials(&fs)?;
        let lambda = io::weights_to_json(&lambda)["entries"].clone();
        if let [f] = fs.as_slice() {
            Ok(json!({"f": f.values(), "lambda": lambda, "residual": f.residual(&a)?}))
        } else {
            // one potential and one residual per factor
            let logs: Vec<&[f64]> = fs.iter().map(AffinePotential::values).collect();
            let residuals = fs
                .iter()
                .enumerate()
                .map(|(k, f)| f.residual(&factor(&a, k)?))
                .collect::<crate::Result<Vec<f64>>>()?;
            Ok(json!({"f": logs, "lambda": lambda, "residual": residuals}))
        }
    })())
}

fn factor(a: &PCMatrix, k: usize) -> crate::Result<PCMatrix> {
    use crate::group::{GroupElement, GroupSpec};
    PCMatrix::from_fn(GroupSpec::rplus(), a.n(), |i, j| match a.upper(i, j) {
        GroupElement::Product(parts) => Ok(parts[k].clone()),
        _ => Err(Error::UnsupportedGroup(a.spec().to_string())),
    })
}

pub fn cmd_graph(file: &Path, series: usize, source: usize, budget: usize, tol: f64) -> CommandResult {
    finish((|| {
        let g = io::graph_from_json(&io::read_json(file)?)?;
        if source == 0 || source > g.n() {
            return Err(Error::InvalidArgument(format!("source must be in 1..={}", g.n())).into());
        }
        let s = source - 1;
        let spec = g.spec().clone();
        let generators = holonomy_generators(&g, s)?;
        let consistent = is_graph_consistent(&g, tol)?;
        let ranked = ranked_kii(&g, s, series, |h| default_score(&spec, h), budget)?;
        let mut out = json!({
            "graph_consistent": consistent,
            "generators": generators.iter().map(io::element_to_json).collect::<Vec<_>>(),
            "series": {"coefficients": ranked.coefficients, "text": ranked.to_string()},
        });
        if consistent {
            out["weights"] = io::weights_to_json(&graph_weights(&g)?)["entries"].clone();
        }
        Ok(out)
    })())
}

pub fn cmd_sample(spec: &Path, ii: IndicatorKind, eps: f64, n: usize, seed: u64) -> CommandResult {
    finish((|| {
        let m = io::measure_from_json(&io::read_json(spec)?)?;
        let est = acceptance_probability(&m, |a| ii.evaluate(a), eps, n, seed)?;
        Ok(io::estimate_to_json(&est))
    })())
}

pub fn cmd_lifts(file: &Path) -> CommandResult {
    finish((|| {
        let k = io::distance_from_json(&io::read_json(file)?)?;
        let count = count_lifts(&k)?;
        let count = u64::try_from(count).map(Value::from).unwrap_or_else(|_| Value::from(count.to_string()));
        let mut out = json!({
            "free_signs": lift_exponent(&k),
            "count": count,
            "triangle_inequality": triangle_check(&k),
        });
        if lift_exponent(&k) <= MAX_ENUMERATED_SIGNS {
            let all: Vec<Value> = enumerate_lifts(&k)?.map(|a| io::pc_matrix_to_json(&a)).collect();
            let consistent: Vec<Value> = consistent_lifts(&k)?.iter().map(io::pc_matrix_to_json).collect();
            out["lifts"] = Value::from(all);
            out["consistent"] = Value::from(consistent);
        }
        Ok(out)
    })())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CommandResult {
    let go = || match &cli.command {
        Command::Check { file } => cmd_check(file, cli.tol),
        Command::Indicator { file, kind, localize } => cmd_indicator(file, (*kind).into(), *localize),
        Command::Decompose { file, inverse } => cmd_decompose(file, *inverse),
        Command::Reduce { file } => cmd_reduce(file),
        Command::Weights { file, method } => cmd_weights(file, *method),
        Command::Graph { file, series, source, budget } => cmd_graph(file, *series, *source, *budget, cli.tol),
        Command::Sample { spec, ii, eps, n, seed } => cmd_sample(spec, (*ii).into(), *eps, *n, *seed),
        Command::Lifts { file } => cmd_lifts(file),
    };
    if cli.threads == 0 {
        return go();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool.install(go),
        Err(e) => CommandResult { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
