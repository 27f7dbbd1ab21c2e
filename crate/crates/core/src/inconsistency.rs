//! Inconsistency maps and indicators.
//!
//! The triad indicator for positive reals,
//! `Kii(x, y, z) = 1 - min(y / xz, xz / y)`, equals `1 - exp(-|ln(y / xz)|)`.
//! The exponential form generalizes to any group through
//! [`GroupSpec::deviation`]: a triad `(i, j, k)` has defect
//! `a[i][k] . (a[i][j] . a[j][k])^-1` and value `1 - exp(-deviation(defect))`.
//! A matrix indicator is the supremum of the triad values, which also
//! localizes the worst triad.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gauge::ad_action;
use crate::group::{GroupElement, GroupKind, GroupSpec, Morphism};
use crate::matrix::{triples, PCMatrix};
use crate::random::{random_consistent_matrix, random_element, random_gauge, random_unimodular_element};

/// Threshold below which an indicator value counts as zero in the
/// invariance and faithfulness checks.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct TriadReport {
    /// `(i, j, k)` with `i < j < k`, 0-based.
    pub indices: (usize, usize, usize),
    /// `1 - exp(-deviation(defect))`, in `[0, 1)`.
    pub value: f64,
    /// `a[i][k] . (a[i][j] . a[j][k])^-1`.
    pub defect: GroupElement,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InconsistencyValue {
    pub value: f64,
    /// The map never exceeds 1.
    pub normalized: bool,
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveInput(x))
    }
}

/// Koczkodaj triad indicator `1 - min(y / xz, xz / y)` for the triad
/// `x = a12, y = a13, z = a23`.
pub fn kii3(x: f64, y: f64, z: f64) -> Result<f64> {
    [x, y, z].into_iter().try_for_each(check_positive)?;
    let r = y / (x * z);
    Ok(1.0 - r.min(1.0 / r))
}

/// Exponential form `1 - exp(-|ln(y / xz)|)` of [`kii3`].
pub fn kii3_exp(x: f64, y: f64, z: f64) -> Result<f64> {
    [x, y, z].into_iter().try_for_each(check_positive)?;
    Ok(1.0 - (-(y / (x * z)).ln().abs()).exp())
}

/// Triad value for any coefficient group.
pub fn generic_triad_map(a: &PCMatrix, i: usize, j: usize, k: usize) -> Result<TriadReport> {
    if !(i < j && j < k && k < a.n()) {
        return Err(Error::IndexOutOfRange { i, j: k, n: a.n() });
    }
    let spec = a.spec();
    let chain = spec.compose(a.upper(i, j), a.upper(j, k))?;
    let defect = spec.divide(a.upper(i, k), &chain)?;
    let value = 1.0 - (-spec.deviation(&defect)?).exp();
    Ok(TriadReport { indices: (i, j, k), value, defect })
}

fn require_rplus(a: &PCMatrix) -> Result<()> {
    match a.spec().kind() {
        GroupKind::RPlus => Ok(()),
        _ => Err(Error::UnsupportedGroup(a.spec().to_string())),
    }
}

fn require_triads(a: &PCMatrix) -> Result<()> {
    if a.n() < 3 {
        return Err(Error::Dimension(format!("triad indicators need n >= 3, got {}", a.n())));
    }
    Ok(())
}

fn rp(g: &GroupElement) -> f64 {
    g.as_rplus().expect("checked RPlus")
}

/// Chain form of the Koczkodaj indicator: the worst disagreement between
/// `a[i][j]` and the superdiagonal chain `a[i][i+1] ... a[j-1][j]`.
pub fn kii_n(a: &PCMatrix) -> Result<f64> {
    require_rplus(a)?;
    require_triads(a)?;
    let n = a.n();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mut chain = 1.0;
        for j in i + 1..n {
            chain *= rp(a.upper(j - 1, j));
            let r = chain / rp(a.upper(i, j));
            worst = worst.max(1.0 - r.min(1.0 / r));
        }
    }
    Ok(worst)
}

/// Supremum of [`generic_triad_map`] over all triads, with the worst triad.
/// The first maximal triad in lexicographic order wins ties.
pub fn indicator_from_triads(a: &PCMatrix) -> Result<(InconsistencyValue, TriadReport)> {
    require_triads(a)?;
    let mut best: Option<TriadReport> = None;
    for (i, j, k) in triples(a.n()) {
        let report = generic_triad_map(a, i, j, k)?;
        if best.as_ref().is_none_or(|b| report.value > b.value) {
            best = Some(report);
        }
    }
    let best = best.expect("n >= 3 has a triad");
    Ok((InconsistencyValue { value: best.value, normalized: true }, best))
}

/// Supremum of [`kii3`] over all triads of a positive-real matrix.
pub fn kii3_matrix(a: &PCMatrix) -> Result<(f64, (usize, usize, usize))> {
    require_rplus(a)?;
    require_triads(a)?;
    let mut best = (-1.0, (0, 1, 2));
    for (i, j, k) in triples(a.n()) {
        let v = kii3(rp(a.upper(i, j)), rp(a.upper(i, k)), rp(a.upper(j, k)))?;
        if v > best.0 {
            best = (v, (i, j, k));
        }
    }
    Ok(best)
}

/// Triad indicator of the `|det|` image of a `GL(n)` matrix. Ad-invariant
/// but not faithful.
pub fn ii_det(a: &PCMatrix) -> Result<InconsistencyValue> {
    ii_det_report(a).map(|(v, _)| v)
}

fn ii_det_report(a: &PCMatrix) -> Result<(InconsistencyValue, TriadReport)> {
    if !matches!(a.spec().kind(), GroupKind::GL(_)) {
        return Err(Error::UnsupportedGroup(a.spec().to_string()));
    }
    indicator_from_triads(&a.apply_morphism(Morphism::AbsDet)?)
}

/// The indicators exposed through the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndicatorKind {
    /// Supremum of `kii3` over triads (positive reals).
    Kii3,
    /// Chain form (positive reals).
    KiiN,
    /// Supremum of the deviation-based triad map (any group).
    Generic,
    /// Triad indicator of the `|det|` image (`GL(n)`).
    Det,
}

/// An indicator value with the worst triad when the indicator has one.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorReport {
    pub value: f64,
    pub worst_triad: Option<TriadReport>,
}

impl IndicatorKind {
    pub fn evaluate(&self, a: &PCMatrix) -> Result<f64> {
        match self {
            IndicatorKind::Kii3 => kii3_matrix(a).map(|(v, _)| v),
            IndicatorKind::KiiN => kii_n(a),
            IndicatorKind::Generic => indicator_from_triads(a).map(|(v, _)| v.value),
            IndicatorKind::Det => ii_det(a).map(|v| v.value),
        }
    }

    /// Value plus localization. The `Det` triad is reported on the `|det|`
    /// image, so its defect is a positive real.
    pub fn report(&self, a: &PCMatrix) -> Result<IndicatorReport> {
        match self {
            IndicatorKind::KiiN => Ok(IndicatorReport { value: kii_n(a)?, worst_triad: None }),
            IndicatorKind::Kii3 => {
                let (value, (i, j, k)) = kii3_matrix(a)?;
                let triad = generic_triad_map(a, i, j, k)?;
                Ok(IndicatorReport { value, worst_triad: Some(triad) })
            }
            IndicatorKind::Generic => {
                let (v, t) = indicator_from_triads(a)?;
                Ok(IndicatorReport { value: v.value, worst_triad: Some(t) })
            }
            IndicatorKind::Det => {
                let (v, t) = ii_det_report(a)?;
                Ok(IndicatorReport { value: v.value, worst_triad: Some(t) })
            }
        }
    }
}

/// Checks `|ii(Ad_g(a)) - ii(a)| <= 1e-9` for `trials` random gauges.
pub fn check_ad_invariance<F, R>(ii: F, a: &PCMatrix, trials: usize, rng: &mut R) -> Result<bool>
where
    F: Fn(&PCMatrix) -> Result<f64>,
    R: Rng + ?Sized,
{
    let base = ii(a)?;
    for _ in 0..trials {
        let g = random_gauge(a.spec(), a.n(), 1.0, rng);
        if (ii(&ad_action(&g, a)?)? - base).abs() > ZERO_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A consistent matrix with a nonzero value.
    ConsistentNonzero,
    /// An inconsistent matrix with value zero.
    InconsistentZero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub value: f64,
    pub matrix: PCMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaithfulnessReport {
    pub trials: usize,
    pub violation: Option<Violation>,
}

impl FaithfulnessReport {
    pub fn is_faithful(&self) -> bool {
        self.violation.is_none()
    }
}

/// Randomized test of `ii^-1([0, 1e-9]) = consistent matrices`.
///
/// Each trial evaluates `ii` on one random consistent matrix and on one
/// inconsistent matrix obtained by perturbing `a[0][2]` of another. Odd
/// trials draw the perturbation from the kernel of `|det|` (see
/// [`random_unimodular_element`]), which is where determinant-based maps
/// lose information; trials whose perturbation is the identity are skipped.
pub fn check_faithfulness<F, R>(
    ii: F,
    spec: &GroupSpec,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<FaithfulnessReport>
where
    F: Fn(&PCMatrix) -> Result<f64>,
    R: Rng + ?Sized,
{
    if n < 3 {
        return Err(Error::Dimension(format!("faithfulness needs n >= 3, got {n}")));
    }
    for t in 0..trials {
        let consistent = random_consistent_matrix(spec, n, 1.0, rng);
        let v = ii(&consistent)?;
        if v > ZERO_TOL {
            return Ok(FaithfulnessReport {
                trials: t + 1,
                violation: Some(Violation { kind: ViolationKind::ConsistentNonzero, value: v, matrix: consistent }),
            });
        }

        let h = if t % 2 == 1 {
            random_unimodular_element(spec, 1.0, rng)
        } else {
            random_element(spec, 1.0, rng)
        };
        if spec.deviation(&h)? <= 1e-6 {
            continue;
        }
        let mut inconsistent = random_consistent_matrix(spec, n, 1.0, rng);
        let perturbed = spec.compose(inconsistent.upper(0, 2), &h)?;
        inconsistent.set(0, 2, perturbed)?;
        let v = ii(&inconsistent)?;
        if v <= ZERO_TOL {
            return Ok(FaithfulnessReport {
                trials: t + 1,
                violation: Some(Violation { kind: ViolationKind::InconsistentZero, value: v, matrix: inconsistent }),
            });
        }
    }
    Ok(FaithfulnessReport { trials, violation: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_pc_matrix;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn rp(x: f64) -> GroupElement {
        GroupElement::RPlus(x)
    }

    fn counter_example() -> PCMatrix {
        let i2 = GroupElement::GL(DMatrix::identity(2, 2));
        let minus = GroupElement::GL(-DMatrix::<f64>::identity(2, 2));
        PCMatrix::new(GroupSpec::gl(2), 3, vec![i2.clone(), minus, i2]).unwrap()
    }

    #[test]
    fn kii3_reference_triads() {
        assert!((kii3(1.0, 2.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((kii3(10.0, 101.0, 10.0).unwrap() - (1.0 - 100.0 / 101.0)).abs() < 1e-15);
        assert_eq!(kii3(3.0, 6.0, 2.0).unwrap(), 0.0);
        assert!((kii3_exp(1.0, 2.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(kii3_exp(1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(kii3(0.0, 1.0, 1.0), Err(Error::NonPositiveInput(_))));
        assert!(matches!(kii3_exp(1.0, -1.0, 1.0), Err(Error::NonPositiveInput(_))));
    }

    #[test]
    fn kii3_is_monotone_in_log_defect() {
        let mut prev = -1.0;
        for k in 0..100 {
            let v = kii3(1.0, (0.05 * k as f64).exp(), 1.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn generic_triad_reduces_to_kii3() {
        let a = PCMatrix::new(GroupSpec::rplus(), 3, vec![rp(1.0), rp(2.0), rp(1.0)]).unwrap();
        let t = generic_triad_map(&a, 0, 1, 2).unwrap();
        assert!((t.value - 0.5).abs() < 1e-15);
        assert!(generic_triad_map(&a, 0, 2, 1).is_err());
    }

    #[test]
    fn generic_triad_on_se2_translation_drift() {
        // going around the loop drifts the origin from (0, 0) to (1, 0)
        let spec = GroupSpec::se2();
        let e = spec.identity();
        let a = PCMatrix::new(spec, 3, vec![e.clone(), GroupElement::se2(0.0, [1.0, 0.0]), e]).unwrap();
        let t = generic_triad_map(&a, 0, 1, 2).unwrap();
        assert!((t.value - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn kii_n_examples() {
        let w = crate::matrix::WeightVector::new(GroupSpec::rplus(), vec![rp(1.0), rp(3.0), rp(0.5), rp(2.0)]).unwrap();
        let mut a = PCMatrix::from_weights(&w).unwrap();
        assert!(kii_n(&a).unwrap() < 1e-15);
        let perturbed = a.upper(0, 3).as_rplus().unwrap() * E;
        a.set(0, 3, rp(perturbed)).unwrap();
        assert!((kii_n(&a).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let t = PCMatrix::new(GroupSpec::rplus(), 3, vec![rp(1.0), rp(2.0), rp(1.0)]).unwrap();
        assert!((kii_n(&t).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(kii_n(&counter_example()), Err(Error::UnsupportedGroup(_))));
    }

    #[test]
    fn localizes_planted_triad() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut a = random_consistent_matrix(&GroupSpec::rplus(), 6, 1.0, &mut rng);
        // perturbing a[1][4] disturbs only triads containing both 1 and 4
        let v = a.upper(1, 4).as_rplus().unwrap() * 3.0;
        a.set(1, 4, rp(v)).unwrap();
        let (value, triad) = indicator_from_triads(&a).unwrap();
        assert!((value.value - 2.0 / 3.0).abs() < 1e-12);
        let (i, j, k) = triad.indices;
        assert!([i, j, k].contains(&1) && [i, j, k].contains(&4));
    }

    #[test]
    fn ii_det_counter_example() {
        let a = counter_example();
        assert_eq!(ii_det(&a).unwrap().value, 0.0);
        assert!(!a.is_covariant_consistent(1e-8).unwrap());
        assert!(indicator_from_triads(&a).unwrap().0.value > 0.5);
        assert!(matches!(
            ii_det(&PCMatrix::identity(GroupSpec::rplus(), 3).unwrap()),
            Err(Error::UnsupportedGroup(_))
        ));
    }

    #[test]
    fn ii_det_of_diagonal_matrices() {
        let d = |a: f64, b: f64| GroupElement::GL(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b])));
        let a = PCMatrix::new(GroupSpec::gl(2), 3, vec![d(2.0, 1.0), d(3.0, -1.0), d(1.0, 0.5)]).unwrap();
        let image = PCMatrix::new(GroupSpec::rplus(), 3, vec![rp(2.0), rp(3.0), rp(0.5)]).unwrap();
        let expected = indicator_from_triads(&image).unwrap().0.value;
        assert!((ii_det(&a).unwrap().value - expected).abs() < 1e-15);
    }

    #[test]
    fn ad_invariance_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let a = random_pc_matrix(&GroupSpec::rplus(), 5, 1.0, &mut rng);
        assert!(check_ad_invariance(|m| IndicatorKind::Generic.evaluate(m), &a, 50, &mut rng).unwrap());
        let g = random_pc_matrix(&GroupSpec::gl(2), 4, 0.5, &mut rng);
        assert!(check_ad_invariance(|m| IndicatorKind::Det.evaluate(m), &g, 50, &mut rng).unwrap());
        let first_entry = |m: &PCMatrix| Ok(m.upper(0, 1).as_rplus().unwrap());
        assert!(!check_ad_invariance(first_entry, &a, 50, &mut rng).unwrap());
    }

    #[test]
    fn faithfulness_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let generic = |m: &PCMatrix| IndicatorKind::Generic.evaluate(m);
        assert!(check_faithfulness(generic, &GroupSpec::rplus(), 4, 500, &mut rng).unwrap().is_faithful());
        let det = |m: &PCMatrix| IndicatorKind::Det.evaluate(m);
        let report = check_faithfulness(det, &GroupSpec::gl(2), 3, 50, &mut rng).unwrap();
        let violation = report.violation.expect("det map is not faithful");
        assert_eq!(violation.kind, ViolationKind::InconsistentZero);
        assert!(!violation.matrix.is_covariant_consistent(1e-8).unwrap());
    }

    #[test]
    fn indicator_needs_a_triad() {
        assert!(matches!(
            indicator_from_triads(&PCMatrix::identity(GroupSpec::rplus(), 2).unwrap()),
            Err(Error::Dimension(_))
        ));
    }
}
