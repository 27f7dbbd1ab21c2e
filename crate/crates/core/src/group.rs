//! Coefficient groups.
//!
//! A [`GroupSpec`] names one of the concrete groups a comparison matrix can
//! take its coefficients in: the multiplicative positive reals, `GL(n)`, the
//! rigid motions `SE(2)` / `SE(3)`, or a direct product of those. Elements are
//! plain values ([`GroupElement`]); every group law goes through the spec so
//! that tolerance-based checks (singularity, equality) use one threshold.

use std::fmt;

use nalgebra::{DMatrix, SMatrix, SVector};

use crate::error::{Error, Result};

/// Default tolerance for identity and equality tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Shape of a coefficient group.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    /// Positive reals under multiplication.
    RPlus,
    /// Invertible real `n x n` matrices.
    GL(usize),
    /// Planar rigid motions.
    SE2,
    /// Spatial rigid motions.
    SE3,
    /// Direct product, composed factorwise.
    Product(Vec<GroupKind>),
}

impl GroupKind {
    fn check(&self) -> Result<()> {
        match self {
            GroupKind::GL(0) => Err(Error::InvalidSpec("GL(n) requires n >= 1".into())),
            GroupKind::Product(parts) if parts.is_empty() => {
                Err(Error::InvalidSpec("a product needs at least one factor".into()))
            }
            GroupKind::Product(parts) => parts.iter().try_for_each(GroupKind::check),
            _ => Ok(()),
        }
    }

    fn is_abelian(&self) -> bool {
        match self {
            GroupKind::RPlus | GroupKind::GL(1) => true,
            GroupKind::GL(_) | GroupKind::SE2 | GroupKind::SE3 => false,
            GroupKind::Product(parts) => parts.iter().all(GroupKind::is_abelian),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::RPlus => write!(f, "RPlus"),
            GroupKind::GL(n) => write!(f, "GL({n})"),
            GroupKind::SE2 => write!(f, "SE2"),
            GroupKind::SE3 => write!(f, "SE3"),
            GroupKind::Product(parts) => {
                write!(f, "Product(")?;
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A coefficient group together with the tolerance used for its
/// floating-point identity and equality tests.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    kind: GroupKind,
    tolerance: f64,
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// A rigid motion `x -> R x + t` with `R` in `SO(D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rigid<const D: usize> {
    pub rotation: SMatrix<f64, D, D>,
    pub translation: SVector<f64, D>,
}

impl<const D: usize> Rigid<D> {
    fn compose(&self, other: &Self) -> Self {
        Rigid {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Rigid { rotation: rt, translation: -(rt * self.translation) }
    }

    fn identity() -> Self {
        Rigid { rotation: SMatrix::identity(), translation: SVector::zeros() }
    }

    fn deviation(&self) -> f64 {
        (self.rotation - SMatrix::<f64, D, D>::identity()).norm() + self.translation.norm()
    }

    fn check(&self, tol: f64) -> Result<()> {
        let finite = self.rotation.iter().chain(self.translation.iter()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidElement("non-finite rigid motion".into()));
        }
        let gram = self.rotation.transpose() * self.rotation - SMatrix::<f64, D, D>::identity();
        let off = gram.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let det = DMatrix::from_column_slice(D, D, self.rotation.as_slice()).determinant();
        if off > tol || det <= 0.0 {
            return Err(Error::InvalidElement(format!(
                "rotation part is not in SO({D}) (|R^T R - I| = {off:.3e})"
            )));
        }
        Ok(())
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        close_iter(self.rotation.iter(), other.rotation.iter(), tol)
            && close_iter(self.translation.iter(), other.translation.iter(), tol)
    }
}

impl Rigid<2> {
    /// Rotation by `angle` followed by translation `t`.
    pub fn planar(angle: f64, t: [f64; 2]) -> Self {
        let (s, c) = angle.sin_cos();
        Rigid {
            rotation: SMatrix::<f64, 2, 2>::new(c, -s, s, c),
            translation: SVector::<f64, 2>::new(t[0], t[1]),
        }
    }

    /// Rotation angle in `(-pi, pi]`.
    pub fn angle(&self) -> f64 {
        self.rotation[(1, 0)].atan2(self.rotation[(0, 0)])
    }
}

/// A group element. Which group it belongs to is decided by its shape; the
/// owning [`GroupSpec`] validates it.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    RPlus(f64),
    GL(DMatrix<f64>),
    SE2(Rigid<2>),
    SE3(Rigid<3>),
    Product(Vec<GroupElement>),
}

impl GroupElement {
    /// Shape of the group this element lives in.
    pub fn kind(&self) -> GroupKind {
        match self {
            GroupElement::RPlus(_) => GroupKind::RPlus,
            GroupElement::GL(m) => GroupKind::GL(m.nrows()),
            GroupElement::SE2(_) => GroupKind::SE2,
            GroupElement::SE3(_) => GroupKind::SE3,
            GroupElement::Product(parts) => {
                GroupKind::Product(parts.iter().map(GroupElement::kind).collect())
            }
        }
    }

    /// Planar rigid motion from an angle and a translation.
    pub fn se2(angle: f64, t: [f64; 2]) -> Self {
        GroupElement::SE2(Rigid::planar(angle, t))
    }

    /// The positive real payload, if this is an `RPlus` element.
    pub fn as_rplus(&self) -> Option<f64> {
        match self {
            GroupElement::RPlus(x) => Some(*x),
            _ => None,
        }
    }

    /// The matrix payload, if this is a `GL` element.
    pub fn as_matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            GroupElement::GL(m) => Some(m),
            _ => None,
        }
    }
}

fn close_iter<'a>(
    a: impl Iterator<Item = &'a f64>,
    b: impl Iterator<Item = &'a f64>,
    tol: f64,
) -> bool {
    a.zip(b).all(|(x, y)| (x - y).abs() <= tol * 1f64.max(x.abs()).max(y.abs()))
}

/// Group morphisms applied coefficientwise to comparison matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Morphism {
    Identity,
    /// `GL(n) -> RPlus`, `g -> |det g|`.
    AbsDet,
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Morphism::Identity => write!(f, "identity"),
            Morphism::AbsDet => write!(f, "abs-det"),
        }
    }
}

impl Morphism {
    /// Group the morphism lands in when applied to `source`.
    pub fn target(&self, source: &GroupSpec) -> Result<GroupSpec> {
        match (self, &source.kind) {
            (Morphism::Identity, _) => Ok(source.clone()),
            (Morphism::AbsDet, GroupKind::GL(_)) => {
                Ok(GroupSpec { kind: GroupKind::RPlus, tolerance: source.tolerance })
            }
            (Morphism::AbsDet, _) => Err(Error::UnsupportedMorphism {
                morphism: self.to_string(),
                group: source.to_string(),
            }),
        }
    }

    pub fn apply(&self, source: &GroupSpec, g: &GroupElement) -> Result<GroupElement> {
        match self {
            Morphism::Identity => Ok(g.clone()),
            Morphism::AbsDet => {
                self.target(source)?;
                source.det_morphism(g)
            }
        }
    }
}

impl GroupSpec {
    pub fn new(kind: GroupKind) -> Result<Self> {
        Self::with_tolerance(kind, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(kind: GroupKind, tolerance: f64) -> Result<Self> {
        kind.check()?;
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tolerance}")));
        }
        Ok(GroupSpec { kind, tolerance })
    }

    pub fn rplus() -> Self {
        GroupSpec { kind: GroupKind::RPlus, tolerance: DEFAULT_TOLERANCE }
    }

    /// `GL(n)`. Panics if `n == 0`; use [`GroupSpec::new`] for fallible construction.
    pub fn gl(n: usize) -> Self {
        assert!(n >= 1, "GL(n) requires n >= 1");
        GroupSpec { kind: GroupKind::GL(n), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn se2() -> Self {
        GroupSpec { kind: GroupKind::SE2, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn se3() -> Self {
        GroupSpec { kind: GroupKind::SE3, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn is_abelian(&self) -> bool {
        self.kind.is_abelian()
    }

    /// Whether `deviation` is invariant under conjugation, so that
    /// triad-generated indicators are Ad-invariant at the value level and not
    /// only on their zero set.
    pub fn has_conjugation_invariant_deviation(&self) -> bool {
        self.is_abelian()
    }

    fn factor(&self, kind: &GroupKind) -> GroupSpec {
        GroupSpec { kind: kind.clone(), tolerance: self.tolerance }
    }

    fn mismatch(&self, g: &GroupElement) -> Error {
        Error::SpecMismatch { expected: self.kind.to_string(), found: g.kind().to_string() }
    }

    /// True if `g` has the shape of an element of this group.
    pub fn matches(&self, g: &GroupElement) -> bool {
        g.kind() == self.kind
    }

    /// Checks shape and the element invariants (positivity, invertibility,
    /// orthogonality of rotation parts).
    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        match (&self.kind, g) {
            (GroupKind::RPlus, GroupElement::RPlus(x)) => {
                if *x > 0.0 && x.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidElement(format!("RPlus payload must be positive, got {x}")))
                }
            }
            (GroupKind::GL(n), GroupElement::GL(m)) if m.nrows() == *n && m.ncols() == *n => {
                if m.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidElement("non-finite matrix entry".into()));
                }
                let det = m.determinant();
                if det.abs() <= self.tolerance {
                    Err(Error::NumericalDegeneracy(format!("|det| = {:.3e} is too small", det.abs())))
                } else {
                    Ok(())
                }
            }
            (GroupKind::SE2, GroupElement::SE2(r)) => r.check(self.tolerance),
            (GroupKind::SE3, GroupElement::SE3(r)) => r.check(self.tolerance),
            (GroupKind::Product(kinds), GroupElement::Product(parts)) if kinds.len() == parts.len() => {
                kinds.iter().zip(parts).try_for_each(|(k, p)| self.factor(k).validate(p))
            }
            _ => Err(self.mismatch(g)),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            GroupKind::RPlus => GroupElement::RPlus(1.0),
            GroupKind::GL(n) => GroupElement::GL(DMatrix::identity(*n, *n)),
            GroupKind::SE2 => GroupElement::SE2(Rigid::identity()),
            GroupKind::SE3 => GroupElement::SE3(Rigid::identity()),
            GroupKind::Product(kinds) => {
                GroupElement::Product(kinds.iter().map(|k| self.factor(k).identity()).collect())
            }
        }
    }

    /// Group law `g . h`.
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g, h) {
            (GroupKind::RPlus, GroupElement::RPlus(x), GroupElement::RPlus(y)) => {
                Ok(GroupElement::RPlus(x * y))
            }
            (GroupKind::GL(n), GroupElement::GL(a), GroupElement::GL(b))
                if a.nrows() == *n && b.nrows() == *n =>
            {
                let m = a * b;
                let det = m.determinant();
                if det.abs() <= self.tolerance {
                    return Err(Error::NumericalDegeneracy(format!(
                        "product has |det| = {:.3e}",
                        det.abs()
                    )));
                }
                Ok(GroupElement::GL(m))
            }
            (GroupKind::SE2, GroupElement::SE2(a), GroupElement::SE2(b)) => {
                Ok(GroupElement::SE2(a.compose(b)))
            }
            (GroupKind::SE3, GroupElement::SE3(a), GroupElement::SE3(b)) => {
                Ok(GroupElement::SE3(a.compose(b)))
            }
            (GroupKind::Product(kinds), GroupElement::Product(a), GroupElement::Product(b))
                if a.len() == kinds.len() && b.len() == kinds.len() =>
            {
                let parts = kinds
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(k, (x, y))| self.factor(k).compose(x, y))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Product(parts))
            }
            _ => Err(if self.matches(g) { self.mismatch(h) } else { self.mismatch(g) }),
        }
    }

    /// Composes a sequence left to right; the empty product is the identity.
    pub fn compose_all<'a>(&self, items: impl IntoIterator<Item = &'a GroupElement>) -> Result<GroupElement> {
        items.into_iter().try_fold(self.identity(), |acc, g| self.compose(&acc, g))
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g) {
            (GroupKind::RPlus, GroupElement::RPlus(x)) => Ok(GroupElement::RPlus(1.0 / x)),
            (GroupKind::GL(n), GroupElement::GL(m)) if m.nrows() == *n => {
                if m.determinant().abs() <= self.tolerance {
                    return Err(Error::NumericalDegeneracy("matrix is numerically singular".into()));
                }
                m.clone()
                    .try_inverse()
                    .map(GroupElement::GL)
                    .ok_or_else(|| Error::NumericalDegeneracy("matrix inversion failed".into()))
            }
            (GroupKind::SE2, GroupElement::SE2(r)) => Ok(GroupElement::SE2(r.inverse())),
            (GroupKind::SE3, GroupElement::SE3(r)) => Ok(GroupElement::SE3(r.inverse())),
            (GroupKind::Product(kinds), GroupElement::Product(parts)) if parts.len() == kinds.len() => {
                let inv = kinds
                    .iter()
                    .zip(parts)
                    .map(|(k, p)| self.factor(k).inverse(p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupElement::Product(inv))
            }
            _ => Err(self.mismatch(g)),
        }
    }

    /// `g . h^-1`.
    pub fn divide(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.compose(g, &self.inverse(h)?)
    }

    /// `g . h . g^-1`.
    pub fn conjugate(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.compose(&self.compose(g, h)?, &self.inverse(g)?)
    }

    /// Distance from `g` to the identity, zero exactly at the identity:
    ///
    /// * `RPlus`: `|ln g|`
    /// * `GL(n)`: `|g - I|_F + |g^-1 - I|_F`
    /// * `SE`: `|R - I|_F + |t|_2`
    /// * products: sum over factors
    pub fn deviation(&self, g: &GroupElement) -> Result<f64> {
        match (&self.kind, g) {
            (GroupKind::RPlus, GroupElement::RPlus(x)) => Ok(x.ln().abs()),
            (GroupKind::GL(n), GroupElement::GL(m)) if m.nrows() == *n => {
                let id = DMatrix::<f64>::identity(*n, *n);
                let inv = match self.inverse(g)? {
                    GroupElement::GL(inv) => inv,
                    _ => unreachable!(),
                };
                Ok((m - &id).norm() + (inv - id).norm())
            }
            (GroupKind::SE2, GroupElement::SE2(r)) => Ok(r.deviation()),
            (GroupKind::SE3, GroupElement::SE3(r)) => Ok(r.deviation()),
            (GroupKind::Product(kinds), GroupElement::Product(parts)) if parts.len() == kinds.len() => {
                kinds.iter().zip(parts).map(|(k, p)| self.factor(k).deviation(p)).sum()
            }
            _ => Err(self.mismatch(g)),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> Result<bool> {
        Ok(self.deviation(g)? <= self.tolerance)
    }

    /// Componentwise equality, each component within the tolerance scaled by
    /// its magnitude (never below the absolute tolerance).
    pub fn approx_eq(&self, g: &GroupElement, h: &GroupElement) -> bool {
        self.approx_eq_within(g, h, self.tolerance)
    }

    pub fn approx_eq_within(&self, g: &GroupElement, h: &GroupElement, tol: f64) -> bool {
        match (g, h) {
            (GroupElement::RPlus(x), GroupElement::RPlus(y)) => close_iter([*x].iter(), [*y].iter(), tol),
            (GroupElement::GL(a), GroupElement::GL(b)) => {
                a.shape() == b.shape() && close_iter(a.iter(), b.iter(), tol)
            }
            (GroupElement::SE2(a), GroupElement::SE2(b)) => a.approx_eq(b, tol),
            (GroupElement::SE3(a), GroupElement::SE3(b)) => a.approx_eq(b, tol),
            (GroupElement::Product(a), GroupElement::Product(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.approx_eq_within(x, y, tol))
            }
            _ => false,
        }
    }

    /// `|det g|` as an `RPlus` element.
    pub fn det_morphism(&self, g: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g) {
            (GroupKind::GL(n), GroupElement::GL(m)) if m.nrows() == *n => {
                let det = m.determinant().abs();
                if det <= self.tolerance {
                    return Err(Error::NumericalDegeneracy(format!("|det| = {det:.3e}")));
                }
                Ok(GroupElement::RPlus(det))
            }
            (GroupKind::GL(_), _) => Err(self.mismatch(g)),
            _ => Err(Error::UnsupportedGroup(self.to_string())),
        }
    }
}
