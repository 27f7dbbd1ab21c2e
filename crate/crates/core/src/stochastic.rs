//! Random matrices, acceptance probabilities and reweighted expectations.
//!
//! Every sample is drawn from its own ChaCha stream: sample `k` of a run with
//! seed `s` is seeded by mixing `(s, k)`, and entry `e` inside a sample uses
//! stream `e`. Results are therefore independent of thread count.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::matrix::{upper_len, PCMatrix};

/// Smallest singular value accepted by [`EntryMeasure::MatrixGaussianGL`].
pub const MIN_SINGULAR_VALUE: f64 = 1e-3;

/// Smallest effective sample size [`feynman_kac_expectation`] accepts.
pub const MIN_EFFECTIVE_SAMPLES: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub enum EntryMeasure {
    /// `exp(N(0, sigma^2))` on the positive reals.
    LogNormal { sigma: f64 },
    /// Planar rigid motion with a uniform angle and `N(0, sigma_t^2)`
    /// translation coordinates.
    UniformRotation { sigma_t: f64 },
    /// `I + sigma * N` on `GL(n)`, redrawn while nearly singular.
    MatrixGaussianGL { n: usize, sigma: f64 },
}

impl EntryMeasure {
    pub fn validate(&self) -> Result<()> {
        let s = match self {
            EntryMeasure::LogNormal { sigma } => *sigma,
            EntryMeasure::UniformRotation { sigma_t } => *sigma_t,
            EntryMeasure::MatrixGaussianGL { n, sigma } => {
                if *n == 0 {
                    return Err(Error::InvalidArgument("GL dimension must be positive".into()));
                }
                *sigma
            }
        };
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive and finite, got {s}")));
        }
        Ok(())
    }

    pub fn spec(&self) -> GroupSpec {
        match self {
            EntryMeasure::LogNormal { .. } => GroupSpec::rplus(),
            EntryMeasure::UniformRotation { .. } => GroupSpec::se2(),
            EntryMeasure::MatrixGaussianGL { n, .. } => GroupSpec::gl(*n),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> GroupElement {
        match self {
            EntryMeasure::LogNormal { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                GroupElement::RPlus((sigma * z).exp())
            }
            EntryMeasure::UniformRotation { sigma_t } => {
                let pi = std::f64::consts::PI;
                let angle = Uniform::new(-pi, pi).expect("valid range").sample(rng);
                let t = Normal::new(0.0, *sigma_t).expect("validated scale");
                GroupElement::se2(angle, [t.sample(rng), t.sample(rng)])
            }
            EntryMeasure::MatrixGaussianGL { n, sigma } => loop {
                let m = DMatrix::<f64>::identity(*n, *n)
                    + DMatrix::from_fn(*n, *n, |_, _| {
                        let z: f64 = StandardNormal.sample(rng);
                        sigma * z
                    });
                if m.singular_values().min() >= MIN_SINGULAR_VALUE {
                    break GroupElement::GL(m);
                }
            },
        }
    }
}

/// Independent measures on the upper-triangle entries, in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductMeasure {
    n: usize,
    entries: Vec<EntryMeasure>,
}

impl ProductMeasure {
    pub fn new(n: usize, entries: Vec<EntryMeasure>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("need n >= 2, got {n}")));
        }
        if entries.len() != upper_len(n) {
            return Err(Error::Dimension(format!("expected {} entry measures, got {}", upper_len(n), entries.len())));
        }
        for e in &entries {
            e.validate()?;
        }
        let spec = entries[0].spec();
        if let Some(bad) = entries.iter().find(|e| e.spec() != spec) {
            return Err(Error::SpecMismatch { expected: spec.to_string(), found: bad.spec().to_string() });
        }
        Ok(ProductMeasure { n, entries })
    }

    /// The same measure on every entry.
    pub fn homogeneous(n: usize, entry: EntryMeasure) -> Result<Self> {
        ProductMeasure::new(n, vec![entry; upper_len(n.max(2))])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[EntryMeasure] {
        &self.entries
    }

    pub fn spec(&self) -> GroupSpec {
        self.entries[0].spec()
    }
}

/// Draws every upper-triangle entry independently; deterministic in `seed`.
pub fn sample_pc(m: &ProductMeasure, seed: u64) -> PCMatrix {
    let upper = m
        .entries
        .iter()
        .enumerate()
        .map(|(e, measure)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(e as u64);
            measure.sample(&mut rng)
        })
        .collect();
    PCMatrix::new(m.spec(), m.n, upper).expect("sampled elements are valid")
}

/// Seed of sample `index` in a run seeded by `seed` (SplitMix64 finalizer).
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Effective sample size; equals `samples` for unweighted estimates.
    pub ess: f64,
}

/// `f(A_k)` for samples `k = 0..count`, in sample order.
pub fn evaluate_samples<F>(m: &ProductMeasure, f: F, count: usize, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(&PCMatrix) -> Result<f64> + Sync,
{
    (0..count as u64).into_par_iter().map(|k| f(&sample_pc(m, sample_seed(seed, k)))).collect()
}

/// Fraction of `values` at most `eps`, with binomial standard error.
pub fn acceptance_from_values(values: &[f64], eps: f64) -> MCEstimate {
    let n = values.len();
    let hits = values.iter().filter(|&&v| v <= eps).count();
    let p = hits as f64 / n as f64;
    MCEstimate { value: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), samples: n, ess: n as f64 }
}

/// Probability that `ii(A) <= eps` under `m`.
pub fn acceptance_probability<F>(m: &ProductMeasure, ii: F, eps: f64, count: usize, seed: u64) -> Result<MCEstimate>
where
    F: Fn(&PCMatrix) -> Result<f64> + Sync,
{
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("threshold must lie in (0, 1), got {eps}")));
    }
    if count < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {count}")));
    }
    Ok(acceptance_from_values(&evaluate_samples(m, ii, count, seed)?, eps))
}

/// Mean of `f` under `m` with sample-standard-deviation error.
pub fn plain_mean<F>(m: &ProductMeasure, f: F, count: usize, seed: u64) -> Result<MCEstimate>
where
    F: Fn(&PCMatrix) -> Result<f64> + Sync,
{
    if count < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let values = evaluate_samples(m, f, count, seed)?;
    let n = count as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MCEstimate { value: mean, stderr: (var / n).sqrt(), samples: count, ess: n })
}

/// Self-normalized estimate of `E[f]` under the density proportional to
/// `exp(-ii / eps)` relative to `base`.
///
/// The reported error is the delta-method standard error of the ratio
/// estimator.
pub fn feynman_kac_expectation<F, I>(f: F, ii: I, eps: f64, base: &ProductMeasure, count: usize, seed: u64) -> Result<MCEstimate>
where
    F: Fn(&PCMatrix) -> Result<f64> + Sync,
    I: Fn(&PCMatrix) -> Result<f64> + Sync,
{
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("temperature must be positive, got {eps}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("need at least 1 sample".into()));
    }
    let pairs: Vec<(f64, f64)> = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let a = sample_pc(base, sample_seed(seed, k));
            Ok((f(&a)?, ii(&a)?))
        })
        .collect::<Result<_>>()?;
    // shift by the smallest indicator so the largest weight is 1
    let floor = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = pairs.iter().map(|p| (-(p.1 - floor) / eps).exp()).collect();
    let total: f64 = weights.iter().sum();
    let ess = total * total / weights.iter().map(|w| w * w).sum::<f64>();
    if ess.is_nan() || ess < MIN_EFFECTIVE_SAMPLES {
        return Err(Error::DegenerateWeights(ess));
    }
    let value = pairs.iter().zip(&weights).map(|(p, w)| w * p.0).sum::<f64>() / total;
    let spread = pairs.iter().zip(&weights).map(|(p, w)| (w * (p.0 - value)).powi(2)).sum::<f64>();
    Ok(MCEstimate { value, stderr: spread.sqrt() / total, samples: count, ess })
}

fn simpson<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, steps: usize) -> f64 {
    let m = (steps.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m).map(|k| g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (g(a) + g(b) + inner) * h / 3.0
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::InvalidInterval(a, b));
    }
    Ok(())
}

/// Simpson quadrature of `g(x) / x` over `[a, b]`, the Haar measure of the
/// positive reals. `steps` is rounded up to an even count.
pub fn haar_integrate_rplus<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, steps: usize) -> Result<f64> {
    check_interval(a, b)?;
    Ok(simpson(|x| g(x) / x, a, b, steps))
}

/// The same integral in the log coordinate: Simpson quadrature of `g(e^u)`
/// over `[ln a, ln b]`.
pub fn haar_integrate_log(g: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> Result<f64> {
    check_interval(a, b)?;
    Ok(simpson(|u| g(u.exp()), a.ln(), b.ln(), steps))
}
