//! Distance matrices of positive-real comparison matrices and their lifts.
//!
//! `k[i][j] = |ln a[i][j]|` forgets the sign of each log-coefficient, so a
//! distance matrix with `N` nonzero off-diagonal entries has `2^(N/2)` lifts
//! back to comparison matrices. At most two of them are consistent, and those
//! two are duals of each other.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind, GroupSpec};
use crate::matrix::{triples, upper_pairs, PCMatrix, DEFAULT_CONSISTENCY_TOL};

/// Largest number of free signs [`enumerate_lifts`] accepts.
pub const MAX_ENUMERATED_SIGNS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    k: DMatrix<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry (up to `1e-12` relative), nonnegativity and the
    /// zero diagonal. The stored matrix is exactly symmetric.
    pub fn new(k: DMatrix<f64>) -> Result<Self> {
        let n = k.nrows();
        if k.ncols() != n || n < 2 {
            return Err(Error::Dimension(format!("distance matrix must be square with n >= 2, got {}x{}", n, k.ncols())));
        }
        for i in 0..n {
            if k[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!("k[{0}][{0}] must be 0", i + 1)));
            }
            for j in i + 1..n {
                let (a, b) = (k[(i, j)], k[(j, i)]);
                if !(a >= 0.0 && a.is_finite() && b >= 0.0 && b.is_finite()) {
                    return Err(Error::InvalidArgument(format!("k[{}][{}] must be finite and nonnegative", i + 1, j + 1)));
                }
                if (a - b).abs() > 1e-12 * a.max(b).max(1.0) {
                    return Err(Error::InvalidArgument(format!("k is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let mut k = k;
        for (i, j) in upper_pairs(n) {
            k[(j, i)] = k[(i, j)];
        }
        Ok(DistanceMatrix { k })
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.k[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.k
    }

    /// Upper-triangle pairs with a nonzero distance.
    pub fn nonzero_pairs(&self) -> Vec<(usize, usize)> {
        upper_pairs(self.n()).filter(|&(i, j)| self.k[(i, j)] != 0.0).collect()
    }
}

pub fn to_distance(a: &PCMatrix) -> Result<DistanceMatrix> {
    if a.spec().kind() != &GroupKind::RPlus {
        return Err(Error::UnsupportedGroup(a.spec().to_string()));
    }
    let n = a.n();
    let mut k = DMatrix::zeros(n, n);
    for (i, j) in upper_pairs(n) {
        let d = a.upper(i, j).as_rplus().expect("RPlus").ln().abs();
        k[(i, j)] = d;
        k[(j, i)] = d;
    }
    Ok(DistanceMatrix { k })
}

/// `N / 2`, the number of independent sign choices.
pub fn lift_exponent(k: &DistanceMatrix) -> usize {
    k.nonzero_pairs().len()
}

/// `2^(N/2)`. Exact up to 127 free signs.
pub fn count_lifts(k: &DistanceMatrix) -> Result<u128> {
    let e = lift_exponent(k);
    if e >= 128 {
        return Err(Error::InvalidArgument(format!("2^{e} lifts does not fit in 128 bits")));
    }
    Ok(1u128 << e)
}

/// Every sign assignment `a[i][j] = exp(+-k[i][j])`. Lift number `m` takes
/// the negative sign on the `b`-th nonzero pair iff bit `b` of `m` is set, so
/// lift 0 has every exponent positive.
pub fn enumerate_lifts(k: &DistanceMatrix) -> Result<impl Iterator<Item = PCMatrix> + '_> {
    let pairs = k.nonzero_pairs();
    if pairs.len() > MAX_ENUMERATED_SIGNS {
        return Err(Error::EnumerationCap(pairs.len()));
    }
    let n = k.n();
    Ok((0u64..(1u64 << pairs.len())).map(move |mask| {
        let mut upper = vec![GroupElement::RPlus(1.0); n * (n - 1) / 2];
        let mut bit = 0;
        for (slot, (i, j)) in upper_pairs(n).enumerate() {
            let d = k.get(i, j);
            if d != 0.0 {
                let sign = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
                upper[slot] = GroupElement::RPlus((sign * d).exp());
                bit += 1;
            }
        }
        PCMatrix::new(GroupSpec::rplus(), n, upper).expect("exponentials are positive")
    }))
}

/// The covariantly consistent lifts, in enumeration order.
pub fn consistent_lifts(k: &DistanceMatrix) -> Result<Vec<PCMatrix>> {
    let mut out = Vec::new();
    for lift in enumerate_lifts(k)? {
        if lift.is_covariant_consistent(DEFAULT_CONSISTENCY_TOL)? {
            out.push(lift);
        }
    }
    Ok(out)
}

/// `k[i][l] <= k[i][j] + k[j][l]` for all triples (with `1e-12` relative slack).
pub fn triangle_check(k: &DistanceMatrix) -> bool {
    let n = k.n();
    triples(n).all(|(a, b, c)| {
        // each side against the other two
        let (x, y, z) = (k.get(a, b), k.get(b, c), k.get(a, c));
        let slack = 1e-12 * x.max(y).max(z).max(1.0);
        x <= y + z + slack && y <= x + z + slack && z <= x + y + slack
    })
}
