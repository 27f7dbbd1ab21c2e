//! Random elements, weight vectors, gauges and matrices.
//!
//! `scale` controls the spread around the identity: log-scale for `RPlus`,
//! entry noise for `GL`, translation spread for rigid motions.

use nalgebra::{DMatrix, Quaternion, SVector, UnitQuaternion};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::gauge::GaugeVector;
use crate::group::{GroupElement, GroupKind, GroupSpec, Rigid};
use crate::matrix::{PCMatrix, WeightVector};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn sample_kind<R: Rng + ?Sized>(kind: &GroupKind, scale: f64, rng: &mut R) -> GroupElement {
    match kind {
        GroupKind::RPlus => GroupElement::RPlus((scale * normal(rng)).exp()),
        GroupKind::GL(n) => loop {
            let m = DMatrix::<f64>::identity(*n, *n) + DMatrix::from_fn(*n, *n, |_, _| scale * normal(rng));
            // well-conditioned draws only
            let sv = m.singular_values();
            if sv.min() >= 0.2 && sv.max() <= 5.0 {
                break GroupElement::GL(m);
            }
        },
        GroupKind::SE2 => {
            let angle = Uniform::new(-std::f64::consts::PI, std::f64::consts::PI)
                .expect("valid range")
                .sample(rng);
            GroupElement::se2(angle, [scale * normal(rng), scale * normal(rng)])
        }
        GroupKind::SE3 => {
            let q = UnitQuaternion::from_quaternion(Quaternion::new(
                normal(rng),
                normal(rng),
                normal(rng),
                normal(rng),
            ));
            GroupElement::SE3(Rigid {
                rotation: q.to_rotation_matrix().into_inner(),
                translation: SVector::<f64, 3>::from_fn(|_, _| scale * normal(rng)),
            })
        }
        GroupKind::Product(parts) => {
            GroupElement::Product(parts.iter().map(|k| sample_kind(k, scale, rng)).collect())
        }
    }
}

/// A random element of `spec`.
pub fn random_element<R: Rng + ?Sized>(spec: &GroupSpec, scale: f64, rng: &mut R) -> GroupElement {
    sample_kind(spec.kind(), scale, rng)
}

fn unimodular(g: GroupElement) -> GroupElement {
    match g {
        GroupElement::RPlus(_) => GroupElement::RPlus(1.0),
        GroupElement::GL(m) => {
            let n = m.nrows() as f64;
            let d = m.determinant().abs().powf(1.0 / n);
            GroupElement::GL(m / d)
        }
        GroupElement::Product(parts) => GroupElement::Product(parts.into_iter().map(unimodular).collect()),
        rigid => rigid,
    }
}

/// A random element of the kernel of `|det|`: `GL` draws rescaled to
/// `|det| = 1`, rigid motions unchanged, `RPlus` factors set to 1.
pub fn random_unimodular_element<R: Rng + ?Sized>(spec: &GroupSpec, scale: f64, rng: &mut R) -> GroupElement {
    unimodular(random_element(spec, scale, rng))
}

pub fn random_weights<R: Rng + ?Sized>(spec: &GroupSpec, n: usize, scale: f64, rng: &mut R) -> WeightVector {
    let entries = (0..n).map(|_| random_element(spec, scale, rng)).collect();
    WeightVector::new(spec.clone(), entries).expect("sampled elements are valid")
}

pub fn random_gauge<R: Rng + ?Sized>(spec: &GroupSpec, n: usize, scale: f64, rng: &mut R) -> GaugeVector {
    let entries = (0..n).map(|_| random_element(spec, scale, rng)).collect();
    GaugeVector::new(spec.clone(), entries).expect("sampled elements are valid")
}

/// A matrix with independent random upper-triangle entries; inconsistent
/// with probability one for `n >= 3`.
pub fn random_pc_matrix<R: Rng + ?Sized>(spec: &GroupSpec, n: usize, scale: f64, rng: &mut R) -> PCMatrix {
    PCMatrix::from_fn(spec.clone(), n, |_, _| Ok(random_element(spec, scale, rng)))
        .expect("sampled elements are valid")
}

/// A random consistent matrix, built from random weights.
pub fn random_consistent_matrix<R: Rng + ?Sized>(spec: &GroupSpec, n: usize, scale: f64, rng: &mut R) -> PCMatrix {
    PCMatrix::from_weights(&random_weights(spec, n, scale, rng)).expect("weights are valid")
}
