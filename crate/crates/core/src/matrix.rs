//! Group-valued pairwise-comparisons matrices.
//!
//! Indices are 0-based in the Rust API. Only the strict upper triangle is
//! stored: the diagonal is the identity and `a[j][i]` is always read as the
//! inverse of `a[i][j]`, so reciprocity cannot be violated.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, Morphism};

/// Default threshold for the consistency predicates.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-8;

/// Number of stored coefficients of an `n x n` matrix.
pub fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Iterator over the strict upper triangle `(i, j)`, `i < j`, row by row.
pub fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Iterator over the triples `i < j < k`.
pub fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PCMatrix {
    spec: GroupSpec,
    n: usize,
    upper: Vec<GroupElement>,
}

/// A family `(lambda_1, ..., lambda_n)` of weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    spec: GroupSpec,
    entries: Vec<GroupElement>,
}

impl WeightVector {
    pub fn new(spec: GroupSpec, entries: Vec<GroupElement>) -> Result<Self> {
        entries.iter().try_for_each(|g| spec.validate(g))?;
        Ok(WeightVector { spec, entries })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn entries(&self) -> &[GroupElement] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl PCMatrix {
    /// Builds a matrix from its strict upper triangle, listed row by row.
    pub fn new(spec: GroupSpec, n: usize, upper: Vec<GroupElement>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("a comparison matrix needs n >= 2, got {n}")));
        }
        if upper.len() != upper_len(n) {
            return Err(Error::Dimension(format!(
                "expected {} upper-triangle entries for n = {n}, got {}",
                upper_len(n),
                upper.len()
            )));
        }
        upper.iter().try_for_each(|g| spec.validate(g))?;
        Ok(PCMatrix { spec, n, upper })
    }

    /// Builds a matrix by evaluating `f(i, j)` on the strict upper triangle.
    pub fn from_fn<F>(spec: GroupSpec, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<GroupElement>,
    {
        let upper = upper_pairs(n).map(|(i, j)| f(i, j)).collect::<Result<Vec<_>>>()?;
        Self::new(spec, n, upper)
    }

    /// The matrix with every coefficient equal to the identity.
    pub fn identity(spec: GroupSpec, n: usize) -> Result<Self> {
        let e = spec.identity();
        Self::new(spec, n, vec![e; upper_len(n)])
    }

    /// Builds a matrix from `f(i, j)` without re-validating the values.
    /// Used for results of group operations on already valid entries.
    pub(crate) fn from_upper_unchecked(spec: GroupSpec, n: usize, upper: Vec<GroupElement>) -> Self {
        debug_assert_eq!(upper.len(), upper_len(n));
        PCMatrix { spec, n, upper }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Stored coefficient `a[i][j]`, `i < j`.
    ///
    /// Panics if `i >= j` or `j >= n`.
    pub fn upper(&self, i: usize, j: usize) -> &GroupElement {
        assert!(i < j && j < self.n, "({i}, {j}) is not in the strict upper triangle");
        &self.upper[self.index(i, j)]
    }

    /// The stored coefficients, row by row.
    pub fn upper_entries(&self) -> &[GroupElement] {
        &self.upper
    }

    /// Any coefficient: identity on the diagonal, inverse below it.
    pub fn entry(&self, i: usize, j: usize) -> Result<GroupElement> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange { i, j, n: self.n });
        }
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Ok(self.spec.identity()),
            std::cmp::Ordering::Less => Ok(self.upper(i, j).clone()),
            std::cmp::Ordering::Greater => self.spec.inverse(self.upper(j, i)),
        }
    }

    /// Sets `a[i][j]` (and implicitly `a[j][i]`).
    pub fn set(&mut self, i: usize, j: usize, value: GroupElement) -> Result<()> {
        if i >= self.n || j >= self.n || i == j {
            return Err(Error::IndexOutOfRange { i, j, n: self.n });
        }
        self.spec.validate(&value)?;
        if i < j {
            let k = self.index(i, j);
            self.upper[k] = value;
        } else {
            let k = self.index(j, i);
            self.upper[k] = self.spec.inverse(&value)?;
        }
        Ok(())
    }

    /// The principal submatrix on `indices` (kept in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange { i: bad, j: bad, n: self.n });
        }
        Self::from_fn(self.spec.clone(), indices.len(), |p, q| self.entry(indices[p], indices[q]))
    }

    /// Covariant triad defect `a[i][k]^-1 . a[i][j] . a[j][k]`.
    fn covariant_defect(&self, i: usize, j: usize, k: usize) -> Result<GroupElement> {
        let chain = self.spec.compose(&self.entry(i, j)?, &self.entry(j, k)?)?;
        self.spec.compose(&self.spec.inverse(&self.entry(i, k)?)?, &chain)
    }

    /// Contravariant triad defect `a[i][k]^-1 . a[j][k] . a[i][j]`.
    fn contravariant_defect(&self, i: usize, j: usize, k: usize) -> Result<GroupElement> {
        let chain = self.spec.compose(&self.entry(j, k)?, &self.entry(i, j)?)?;
        self.spec.compose(&self.spec.inverse(&self.entry(i, k)?)?, &chain)
    }

    /// `a[i][k] = a[i][j] . a[j][k]` for every triple, up to `tol` on the
    /// deviation of the defect. Triples `i < j < k` suffice by reciprocity.
    pub fn is_covariant_consistent(&self, tol: f64) -> Result<bool> {
        for (i, j, k) in triples(self.n) {
            if self.spec.deviation(&self.covariant_defect(i, j, k)?)? > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `a[i][k] = a[j][k] . a[i][j]` for every triple.
    pub fn is_contravariant_consistent(&self, tol: f64) -> Result<bool> {
        for (i, j, k) in triples(self.n) {
            if self.spec.deviation(&self.contravariant_defect(i, j, k)?)? > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coefficientwise inverse `b[i][j] = a[i][j]^-1`; swaps covariant and
    /// contravariant consistency.
    pub fn dual(&self) -> Result<Self> {
        let upper = self.upper.iter().map(|g| self.spec.inverse(g)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_upper_unchecked(self.spec.clone(), self.n, upper))
    }

    /// `a[i][j] = lambda_i . lambda_j^-1`; always covariantly consistent.
    pub fn from_weights(weights: &WeightVector) -> Result<Self> {
        let spec = weights.spec();
        let lambda = weights.entries();
        let inv = lambda.iter().map(|g| spec.inverse(g)).collect::<Result<Vec<_>>>()?;
        Self::from_fn(spec.clone(), lambda.len(), |i, j| spec.compose(&lambda[i], &inv[j]))
    }

    /// Weights `lambda_i = a[i][base]`. For a consistent matrix,
    /// `from_weights` of the result reproduces it.
    pub fn weights_relative_to(&self, base: usize) -> Result<WeightVector> {
        let entries = (0..self.n).map(|i| self.entry(i, base)).collect::<Result<Vec<_>>>()?;
        WeightVector::new(self.spec.clone(), entries)
    }

    /// Applies a group morphism to every coefficient.
    pub fn apply_morphism(&self, morphism: Morphism) -> Result<Self> {
        let target = morphism.target(&self.spec)?;
        let upper = self.upper.iter().map(|g| morphism.apply(&self.spec, g)).collect::<Result<Vec<_>>>()?;
        Self::new(target, self.n, upper)
    }

    /// Largest `deviation(a[i][j] . b[i][j]^-1)` over the upper triangle.
    pub fn max_deviation_from(&self, other: &PCMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("sizes differ: {} vs {}", self.n, other.n)));
        }
        let mut worst = 0.0_f64;
        for (a, b) in self.upper.iter().zip(&other.upper) {
            worst = worst.max(self.spec.deviation(&self.spec.divide(a, b)?)?);
        }
        Ok(worst)
    }

    /// Componentwise equality within `tol`.
    pub fn approx_eq(&self, other: &PCMatrix, tol: f64) -> bool {
        self.n == other.n
            && self.spec.kind() == other.spec.kind()
            && self.upper.iter().zip(&other.upper).all(|(a, b)| self.spec.approx_eq_within(a, b, tol))
    }
}
