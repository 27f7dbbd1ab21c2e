//! Weight reconstruction for positive-real matrices.
//!
//! A potential `f` (with `f[0] = 0`) solves the chain system
//! `f[i] - f[i+1] = -ln a[i][i+1]`, i.e. `f[i+1] = f[i] + ln a[i][i+1]`, and
//! induces comparisons `a[i][j] = exp(f[j] - f[i])`. The weights are
//! `lambda_i = exp(f[i])`, so `a[i][j] = lambda_i^-1 . lambda_j`: this is the
//! dual of the `lambda_i . lambda_j^-1` convention used by
//! [`PCMatrix::from_weights`] (see [`AffinePotential::dual_weights`]).
//!
//! For inconsistent input the chain solution only honours the superdiagonal;
//! [`solve_least_squares`] fits every comparison in the log domain.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind, GroupSpec};
use crate::matrix::{upper_pairs, PCMatrix, WeightVector};

#[derive(Clone, Debug, PartialEq)]
pub struct AffinePotential {
    f: Vec<f64>,
}

impl AffinePotential {
    /// Shifts `values` so that the first entry is 0.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let first = *values.first().ok_or_else(|| Error::InvalidArgument("empty potential".into()))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("potential values must be finite".into()));
        }
        Ok(AffinePotential { f: values.into_iter().map(|v| v - first).collect() })
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Comparison `exp(f[j] - f[i])` induced between nodes `i` and `j`.
    pub fn comparison(&self, i: usize, j: usize) -> f64 {
        (self.f[j] - self.f[i]).exp()
    }

    /// The consistent matrix `a[i][j] = exp(f[j] - f[i])`.
    pub fn reconstruct(&self) -> Result<PCMatrix> {
        PCMatrix::from_fn(GroupSpec::rplus(), self.f.len(), |i, j| Ok(GroupElement::RPlus(self.comparison(i, j))))
    }

    /// `lambda_i = exp(-f[i])`, the weights for which
    /// [`PCMatrix::from_weights`] reproduces [`AffinePotential::reconstruct`].
    pub fn dual_weights(&self) -> WeightVector {
        let entries = self.f.iter().map(|v| GroupElement::RPlus((-v).exp())).collect();
        WeightVector::new(GroupSpec::rplus(), entries).expect("exponentials are positive")
    }

    /// `sum over i < j of (f[i] - f[j] + ln a[i][j])^2`.
    pub fn residual(&self, a: &PCMatrix) -> Result<f64> {
        let logs = log_components(a)?;
        if logs.len() != 1 {
            return Err(Error::UnsupportedGroup(a.spec().to_string()));
        }
        self.residual_of_logs(a.n(), &logs[0])
    }

    fn residual_of_logs(&self, n: usize, logs: &[f64]) -> Result<f64> {
        if n != self.f.len() {
            return Err(Error::Dimension(format!("potential has {} entries, matrix has n = {n}", self.f.len())));
        }
        Ok(upper_pairs(n).zip(logs).map(|((i, j), l)| (self.f[i] - self.f[j] + l).powi(2)).sum())
    }
}

/// `lambda_i = exp(f[i])`.
pub fn weights_from_potential(f: &AffinePotential) -> WeightVector {
    let entries = f.f.iter().map(|v| GroupElement::RPlus(v.exp())).collect();
    WeightVector::new(GroupSpec::rplus(), entries).expect("exponentials are positive")
}

/// Factorwise weights over a product of positive reals.
pub fn weights_from_potentials(potentials: &[AffinePotential]) -> Result<WeightVector> {
    let n = potentials.first().map(|p| p.len()).ok_or_else(|| Error::InvalidArgument("no potentials".into()))?;
    if potentials.iter().any(|p| p.len() != n) {
        return Err(Error::Dimension("potentials have different lengths".into()));
    }
    if potentials.len() == 1 {
        return Ok(weights_from_potential(&potentials[0]));
    }
    let spec = GroupSpec::new(GroupKind::Product(vec![GroupKind::RPlus; potentials.len()]))?;
    let entries = (0..n)
        .map(|i| GroupElement::Product(potentials.iter().map(|p| GroupElement::RPlus(p.f[i].exp())).collect()))
        .collect();
    WeightVector::new(spec, entries)
}

/// Upper-triangle logarithms per positive-real factor. Accepts `RPlus` and
/// products whose factors are all `RPlus`.
fn log_components(a: &PCMatrix) -> Result<Vec<Vec<f64>>> {
    let unsupported = || Error::UnsupportedGroup(a.spec().to_string());
    let factors = match a.spec().kind() {
        GroupKind::RPlus => 1,
        GroupKind::Product(parts) if parts.iter().all(|p| *p == GroupKind::RPlus) => parts.len(),
        _ => return Err(unsupported()),
    };
    let mut out = vec![Vec::with_capacity(a.upper_entries().len()); factors];
    for g in a.upper_entries() {
        match g {
            GroupElement::RPlus(x) => out[0].push(x.ln()),
            GroupElement::Product(parts) => {
                for (slot, p) in out.iter_mut().zip(parts) {
                    slot.push(p.as_rplus().ok_or_else(unsupported)?.ln());
                }
            }
            _ => return Err(unsupported()),
        }
    }
    Ok(out)
}

fn chain_from_logs(n: usize, logs: &[f64]) -> AffinePotential {
    let mut f = vec![0.0; n];
    let mut pairs = upper_pairs(n).zip(logs);
    // the superdiagonal entry (i, i+1) opens row i
    for i in 0..n - 1 {
        let (_, l) = pairs.find(|((p, q), _)| *p == i && *q == i + 1).expect("superdiagonal present");
        f[i + 1] = f[i] + l;
    }
    AffinePotential { f }
}

fn least_squares_from_logs(n: usize, logs: &[f64]) -> Result<AffinePotential> {
    // normal equations (n-1) f_k - sum_{m != k} f_m = b_k with f_0 pinned
    let mut b = vec![0.0; n];
    for ((i, j), l) in upper_pairs(n).zip(logs) {
        b[j] += l;
        b[i] -= l;
    }
    let m = n - 1;
    let lap = DMatrix::from_fn(m, m, |r, c| if r == c { (n - 1) as f64 } else { -1.0 });
    let rhs = DVector::from_iterator(m, b[1..].iter().copied());
    let sol = lap
        .cholesky()
        .ok_or_else(|| Error::NumericalDegeneracy("normal equations are not positive definite".into()))?
        .solve(&rhs);
    let mut f = vec![0.0];
    f.extend(sol.iter());
    Ok(AffinePotential { f })
}

/// Potential solving the superdiagonal chain system.
pub fn solve_chain(a: &PCMatrix) -> Result<AffinePotential> {
    single(a, solve_chain_componentwise(a)?)
}

/// [`solve_chain`] for each factor of a product of positive reals.
pub fn solve_chain_componentwise(a: &PCMatrix) -> Result<Vec<AffinePotential>> {
    Ok(log_components(a)?.iter().map(|logs| chain_from_logs(a.n(), logs)).collect())
}

/// Potential minimizing `sum over i < j of (f[i] - f[j] + ln a[i][j])^2`
/// subject to `f[0] = 0`.
pub fn solve_least_squares(a: &PCMatrix) -> Result<AffinePotential> {
    single(a, solve_least_squares_componentwise(a)?)
}

pub fn solve_least_squares_componentwise(a: &PCMatrix) -> Result<Vec<AffinePotential>> {
    log_components(a)?.iter().map(|logs| least_squares_from_logs(a.n(), logs)).collect()
}

fn single(a: &PCMatrix, mut v: Vec<AffinePotential>) -> Result<AffinePotential> {
    if v.len() != 1 {
        return Err(Error::UnsupportedGroup(format!("{} (use the componentwise solver)", a.spec())));
    }
    Ok(v.remove(0))
}
