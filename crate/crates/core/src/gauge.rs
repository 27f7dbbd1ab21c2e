//! The gauge group `G^n` acting on comparison matrices.
//!
//! For a gauge `g = (g_1, ..., g_n)` and stored coefficients `a[i][j]`, `i < j`:
//!
//! * left action:  `a[i][j] -> g_i . a[i][j]`
//! * right action: `a[i][j] -> a[i][j] . g_j`
//! * adjoint:      `a[i][j] -> g_i . a[i][j] . g_j^-1`
//!
//! Lower-triangle coefficients are never transformed directly; they are read
//! back as inverses, which reproduces the lower cases of each action.
//!
//! Consistent matrices are exactly the adjoint orbit of the identity matrix.
//! [`phi_n`] splits any matrix into a consistent chain part and
//! `(n-1)(n-2)/2` loop components which transform by plain conjugation.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::matrix::{upper_pairs, PCMatrix, DEFAULT_CONSISTENCY_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeVector {
    spec: GroupSpec,
    entries: Vec<GroupElement>,
}

impl GaugeVector {
    pub fn new(spec: GroupSpec, entries: Vec<GroupElement>) -> Result<Self> {
        entries.iter().try_for_each(|g| spec.validate(g))?;
        Ok(GaugeVector { spec, entries })
    }

    pub fn identity(spec: GroupSpec, n: usize) -> Self {
        let e = spec.identity();
        GaugeVector { spec, entries: vec![e; n] }
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

    /// Entrywise product `(g_i . h_i)`.
    pub fn compose(&self, other: &GaugeVector) -> Result<GaugeVector> {
        self.check_len(other.len())?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(g, h)| self.spec.compose(g, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaugeVector { spec: self.spec.clone(), entries })
    }

    pub fn inverse(&self) -> Result<GaugeVector> {
        let entries = self.entries.iter().map(|g| self.spec.inverse(g)).collect::<Result<Vec<_>>>()?;
        Ok(GaugeVector { spec: self.spec.clone(), entries })
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.entries.len() != n {
            return Err(Error::Dimension(format!("gauge has {} entries, expected {n}", self.entries.len())));
        }
        Ok(())
    }

    fn check_against(&self, a: &PCMatrix) -> Result<()> {
        if a.spec().kind() != self.spec.kind() {
            return Err(Error::SpecMismatch {
                expected: a.spec().to_string(),
                found: self.spec.to_string(),
            });
        }
        self.check_len(a.n())
    }
}

fn act<F>(g: &GaugeVector, a: &PCMatrix, mut f: F) -> Result<PCMatrix>
where
    F: FnMut(usize, usize, &GroupElement) -> Result<GroupElement>,
{
    g.check_against(a)?;
    let upper = upper_pairs(a.n()).map(|(i, j)| f(i, j, a.upper(i, j))).collect::<Result<Vec<_>>>()?;
    Ok(PCMatrix::from_upper_unchecked(a.spec().clone(), a.n(), upper))
}

/// Left action `a[i][j] -> g_i . a[i][j]` for `i < j`. `g_n` never acts.
pub fn left_action(g: &GaugeVector, a: &PCMatrix) -> Result<PCMatrix> {
    let spec = a.spec();
    act(g, a, |i, _, x| spec.compose(&g.entries[i], x))
}

/// Right action `a[i][j] -> a[i][j] . g_j` for `i < j`. `g_1` never acts.
pub fn right_action(g: &GaugeVector, a: &PCMatrix) -> Result<PCMatrix> {
    let spec = a.spec();
    act(g, a, |_, j, x| spec.compose(x, &g.entries[j]))
}

/// Adjoint action `a[i][j] -> g_i . a[i][j] . g_j^-1`, i.e. the left action
/// by `g` composed with the right action by `g^-1`.
pub fn ad_action(g: &GaugeVector, a: &PCMatrix) -> Result<PCMatrix> {
    let spec = a.spec();
    let inv = g.inverse()?;
    act(g, a, |i, j, x| spec.compose(&spec.compose(&g.entries[i], x)?, &inv.entries[j]))
}

/// Coadjoint action: the adjoint action of the inverse gauge.
pub fn coad_action(g: &GaugeVector, a: &PCMatrix) -> Result<PCMatrix> {
    ad_action(&g.inverse()?, a)
}

/// The gauge `g_i = a[i][base]`. When `a` is consistent, the adjoint action
/// of this gauge sends the identity matrix to `a`.
pub fn constructive_gauge(a: &PCMatrix, base: usize) -> Result<GaugeVector> {
    let w = a.weights_relative_to(base)?;
    Ok(GaugeVector { spec: a.spec().clone(), entries: w.entries().to_vec() })
}

/// Whether `a` lies in the adjoint orbit of the identity matrix, decided by
/// applying the constructive gauge to the identity and comparing within
/// `tol` (deviation of the entrywise ratio).
pub fn orbit_of_identity_contains(a: &PCMatrix, tol: f64) -> Result<bool> {
    let g = constructive_gauge(a, 0)?;
    let id = PCMatrix::identity(a.spec().clone(), a.n())?;
    Ok(ad_action(&g, &id)?.max_deviation_from(a)? <= tol)
}

/// Result of consistentizing a 3x3 matrix by the left action.
///
/// The solutions form the family `(g_1, g_2, g_3) = (t, a21 . a13 . a32, s)`
/// with `t`, `s` free; `gauge` is the representative `t = s = e`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeftConsistentization {
    /// The forced coordinate `g_2 = a21 . a13 . a32`.
    pub g2: GroupElement,
    pub gauge: GaugeVector,
    /// `left_action(gauge, a)`, which is consistent.
    pub matrix: PCMatrix,
}

pub fn left_consistentize_3(a: &PCMatrix) -> Result<LeftConsistentization> {
    if a.n() != 3 {
        return Err(Error::Dimension(format!("left_consistentize_3 needs n = 3, got {}", a.n())));
    }
    let gauge = left_consistentizing_gauge(a)?;
    let g2 = gauge.entries[1].clone();
    let matrix = left_action(&gauge, a)?;
    Ok(LeftConsistentization { g2, gauge, matrix })
}

/// The left gauge obtained by consistentizing every consecutive 3x3 block:
/// `g_1 = g_n = e` and `g_i = a[i][i-1] . a[i-1][i+1] . a[i+1][i]` otherwise.
///
/// For `n = 3` the result is always consistent; for `n = 4` it is consistent
/// exactly when [`left_orbit_obstruction`] holds.
pub fn left_consistentizing_gauge(a: &PCMatrix) -> Result<GaugeVector> {
    let n = a.n();
    if n < 3 {
        return Err(Error::Dimension(format!("need n >= 3, got {n}")));
    }
    let spec = a.spec();
    let mut entries = vec![spec.identity(); n];
    for (i, slot) in entries.iter_mut().enumerate().take(n - 1).skip(1) {
        *slot = spec.compose_all(&[a.entry(i, i - 1)?, a.entry(i - 1, i + 1)?, a.entry(i + 1, i)?])?;
    }
    Ok(GaugeVector { spec: spec.clone(), entries })
}

/// Checks `a[s][s+3] = a[s][s+2] . a[s+2][s+1] . a[s+1][s+3]` on every
/// consecutive 4x4 principal block. `true` means each block's left orbit
/// meets the consistent matrices; `false` exhibits an orbit that does not.
pub fn left_orbit_obstruction(a: &PCMatrix) -> Result<bool> {
    let n = a.n();
    if n < 4 {
        return Err(Error::Dimension(format!("the 4x4 obstruction needs n >= 4, got {n}")));
    }
    let spec = a.spec();
    for s in 0..=n - 4 {
        let rhs = spec.compose_all(&[a.entry(s, s + 2)?, a.entry(s + 2, s + 1)?, a.entry(s + 1, s + 3)?])?;
        let defect = spec.divide(&a.entry(s, s + 3)?, &rhs)?;
        if spec.deviation(&defect)? > DEFAULT_CONSISTENCY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Chain part plus loop components of a comparison matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiDecomposition {
    /// `b[i][j] = a[i][i+1] . ... . a[j-1][j]`.
    pub consistent: PCMatrix,
    /// `c[i][j] = (a[i][i+1] . ... . a[j-1][j]) . a[j][i]` for `j >= i + 2`,
    /// in row-major order.
    pub components: Vec<((usize, usize), GroupElement)>,
}

/// Index pairs carrying a loop component.
pub fn component_indices(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 2..n).map(move |j| (i, j)))
}

impl PhiDecomposition {
    pub fn n(&self) -> usize {
        self.consistent.n()
    }

    pub fn component(&self, i: usize, j: usize) -> Option<&GroupElement> {
        self.components.iter().find(|((p, q), _)| *p == i && *q == j).map(|(_, v)| v)
    }

    /// All components within `tol` of the identity.
    pub fn is_trivial(&self, tol: f64) -> Result<bool> {
        let spec = self.consistent.spec();
        for (_, c) in &self.components {
            if spec.deviation(c)? > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Products along the superdiagonal: `chains[i][j - i]` is
/// `a[i][i+1] . ... . a[j-1][j]`.
fn superdiagonal_chains(a: &PCMatrix) -> Result<Vec<Vec<GroupElement>>> {
    let spec = a.spec();
    (0..a.n())
        .map(|i| {
            let mut row = vec![spec.identity()];
            for j in i + 1..a.n() {
                let next = spec.compose(row.last().expect("non-empty"), a.upper(j - 1, j))?;
                row.push(next);
            }
            Ok(row)
        })
        .collect()
}

pub fn phi_n(a: &PCMatrix) -> Result<PhiDecomposition> {
    let n = a.n();
    if n < 3 {
        return Err(Error::Dimension(format!("phi_n needs n >= 3, got {n}")));
    }
    let spec = a.spec();
    let chains = superdiagonal_chains(a)?;
    let upper = upper_pairs(n).map(|(i, j)| chains[i][j - i].clone()).collect();
    let consistent = PCMatrix::from_upper_unchecked(spec.clone(), n, upper);
    let components = component_indices(n)
        .map(|(i, j)| Ok(((i, j), spec.compose(&chains[i][j - i], &a.entry(j, i)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhiDecomposition { consistent, components })
}

pub fn phi_n_inverse(d: &PhiDecomposition) -> Result<PCMatrix> {
    let n = d.n();
    if n < 3 {
        return Err(Error::MalformedDecomposition(format!("n = {n} < 3")));
    }
    let expected: Vec<_> = component_indices(n).collect();
    let found: Vec<_> = d.components.iter().map(|(ij, _)| *ij).collect();
    if expected != found {
        return Err(Error::MalformedDecomposition(format!(
            "expected {} components on pairs j >= i + 2 in row-major order, got {}",
            expected.len(),
            found.len()
        )));
    }
    let spec = d.consistent.spec();
    if !d.consistent.is_covariant_consistent(DEFAULT_CONSISTENCY_TOL)? {
        return Err(Error::MalformedDecomposition("chain part is not consistent".into()));
    }
    for (_, c) in &d.components {
        spec.validate(c).map_err(|e| Error::MalformedDecomposition(e.to_string()))?;
    }
    let chains = superdiagonal_chains(&d.consistent)?;
    let mut comps = d.components.iter();
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for (i, j) in upper_pairs(n) {
        if j == i + 1 {
            upper.push(d.consistent.upper(i, j).clone());
        } else {
            // a[j][i] = chain^-1 . c, so a[i][j] = c^-1 . chain
            let (_, c) = comps.next().expect("component count checked");
            upper.push(spec.compose(&spec.inverse(c)?, &chains[i][j - i])?);
        }
    }
    Ok(PCMatrix::from_upper_unchecked(spec.clone(), n, upper))
}

/// How a decomposition transforms under the adjoint action: the chain part
/// by the adjoint action itself, each component `c[i][j] -> g_i . c . g_i^-1`.
pub fn component_ad_transform(g: &GaugeVector, d: &PhiDecomposition) -> Result<PhiDecomposition> {
    let consistent = ad_action(g, &d.consistent)?;
    let spec = d.consistent.spec();
    let components = d
        .components
        .iter()
        .map(|((i, j), c)| Ok(((*i, *j), spec.conjugate(&g.entries[*i], c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhiDecomposition { consistent, components })
}
