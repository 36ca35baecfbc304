//! The three-parameter singular Marshall–Olkin bivariate Pareto distribution.
//!
//! With `U0 ~ Pa(II)(0,1,a0)`, `U1 ~ Pa(II)(0,1,a1)` and `U2 ~ Pa(II)(0,1,a2)`
//! independent, the observed pair is `(min(U0,U1), min(U0,U2))`. The common
//! shock `U0` puts positive mass on the diagonal `x1 = x2`, so the density has
//! three branches: `f1` below the diagonal (`x1 < x2`), `f2` above it and a
//! one-dimensional density `f0` along it.
//!
//! Likelihood evaluation goes through [`Partition`], which holds the cell
//! counts and the five `ln(1 + x)` sums the likelihood depends on.

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Shape parameters `(alpha0, alpha1, alpha2)`.
///
/// Constructed values are strictly positive and finite. [`ShapeParams::with`]
/// deliberately skips validation so samplers can probe points outside the
/// support; every density in this crate treats such points as impossible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct ShapeParams([f64; 3]);

impl ShapeParams {
    pub fn new(alpha0: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::try_from([alpha0, alpha1, alpha2])
    }

    pub fn alpha0(&self) -> f64 {
        self.0[0]
    }

    pub fn alpha1(&self) -> f64 {
        self.0[1]
    }

    pub fn alpha2(&self) -> f64 {
        self.0[2]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    /// Copy with coordinate `i` replaced; not validated.
    pub fn with(&self, i: usize, value: f64) -> Self {
        let mut a = self.0;
        a[i] = value;
        Self(a)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|a| *a > 0.0 && a.is_finite())
    }

    /// Cell probabilities `(P(x1 = x2), P(x1 < x2), P(x1 > x2))`.
    pub fn cell_probabilities(&self) -> [f64; 3] {
        let s = self.sum();
        [self.0[0] / s, self.0[1] / s, self.0[2] / s]
    }
}

impl TryFrom<[f64; 3]> for ShapeParams {
    type Error = Error;

    fn try_from(a: [f64; 3]) -> Result<Self> {
        if a.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(Self(a))
        } else {
            Err(Error::Domain(format!(
                "shape parameters must be positive and finite, got {a:?}"
            )))
        }
    }
}

impl From<ShapeParams> for [f64; 3] {
    fn from(p: ShapeParams) -> Self {
        p.0
    }
}

/// Location and scale of the two margins, used to standardize raw data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationScale {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl LocationScale {
    pub fn new(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma2 > 0.0) || !mu1.is_finite() || !mu2.is_finite() {
            return Err(Error::Domain(format!(
                "invalid location/scale ({mu1}, {mu2}, {sigma1}, {sigma2})"
            )));
        }
        Ok(Self {
            mu1,
            mu2,
            sigma1,
            sigma2,
        })
    }

    pub fn identity() -> Self {
        Self {
            mu1: 0.0,
            mu2: 0.0,
            sigma1: 1.0,
            sigma2: 1.0,
        }
    }

    pub fn standardize(&self, x1: f64, x2: f64) -> (f64, f64) {
        ((x1 - self.mu1) / self.sigma1, (x2 - self.mu2) / self.sigma2)
    }
}

impl Default for LocationScale {
    fn default() -> Self {
        Self::identity()
    }
}

/// Observation pairs on the standardized scale.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BivariateSample {
    pub pairs: Vec<(f64, f64)>,
}

impl BivariateSample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Self {
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Sums of `ln(1 + x)` over the three cells.
///
/// `s0` runs over the diagonal cell, `s1a`/`s1b` over the first and second
/// coordinates of the `x1 < x2` cell, `s2a`/`s2b` likewise for `x1 > x2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LogSums {
    pub s0: f64,
    pub s1a: f64,
    pub s1b: f64,
    pub s2a: f64,
    pub s2b: f64,
}

impl LogSums {
    /// Exposure totals `(D0, D1, D2)`: the coefficient of each `alpha` in the
    /// negative log-likelihood.
    pub fn exposures(&self) -> [f64; 3] {
        [
            self.s0 + self.s1b + self.s2a,
            self.s0 + self.s1a + self.s2a,
            self.s0 + self.s1b + self.s2b,
        ]
    }

    /// The `alpha`-free part of the log-likelihood.
    fn constant(&self) -> f64 {
        -(self.s0 + self.s1a + self.s1b + self.s2a + self.s2b)
    }
}

/// Cell counts and log-sums of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    pub sums: LogSums,
}

impl Partition {
    pub fn n(&self) -> usize {
        self.n0 + self.n1 + self.n2
    }

    pub fn counts(&self) -> [f64; 3] {
        [self.n0 as f64, self.n1 as f64, self.n2 as f64]
    }

    /// Concatenation of two samples' statistics.
    pub fn merge(&self, other: &Partition) -> Partition {
        let (a, b) = (&self.sums, &other.sums);
        Partition {
            n0: self.n0 + other.n0,
            n1: self.n1 + other.n1,
            n2: self.n2 + other.n2,
            sums: LogSums {
                s0: a.s0 + b.s0,
                s1a: a.s1a + b.s1a,
                s1b: a.s1b + b.s1b,
                s2a: a.s2a + b.s2a,
                s2b: a.s2b + b.s2b,
            },
        }
    }
}

fn check_coords(x1: f64, x2: f64) -> Result<()> {
    if x1 >= 0.0 && x2 >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "coordinates must be nonnegative, got ({x1}, {x2})"
        )))
    }
}

/// Joint density. On the diagonal this is the one-dimensional density `f0`.
pub fn pdf(p: &ShapeParams, x1: f64, x2: f64) -> Result<f64> {
    check_coords(x1, x2)?;
    let [a0, a1, a2] = p.as_array();
    let v = if x1 < x2 {
        a1 * (a0 + a2) * (1.0 + x1).powf(-a1 - 1.0) * (1.0 + x2).powf(-a0 - a2 - 1.0)
    } else if x1 > x2 {
        a2 * (a0 + a1) * (1.0 + x2).powf(-a2 - 1.0) * (1.0 + x1).powf(-a0 - a1 - 1.0)
    } else {
        a0 * (1.0 + x1).powf(-(a0 + a1 + a2) - 1.0)
    };
    Ok(v)
}

/// Joint survival `P(X1 > x1, X2 > x2)`.
pub fn survival(p: &ShapeParams, x1: f64, x2: f64) -> Result<f64> {
    check_coords(x1, x2)?;
    let [a0, a1, a2] = p.as_array();
    Ok((1.0 + x1.max(x2)).powf(-a0) * (1.0 + x1).powf(-a1) * (1.0 + x2).powf(-a2))
}

/// Pa(II)(0, 1, alpha) by inversion.
pub fn pareto2_inverse_cdf(v: f64, alpha: f64) -> f64 {
    (1.0 - v).powf(-1.0 / alpha) - 1.0
}

/// Draw `n` pairs using a generator seeded from `seed`.
pub fn sample(p: &ShapeParams, n: usize, seed: u64) -> BivariateSample {
    let mut rng = SimRng::seed_from_u64(seed);
    sample_with(p, n, &mut rng)
}

pub fn sample_with<R: Rng + ?Sized>(p: &ShapeParams, n: usize, rng: &mut R) -> BivariateSample {
    let [a0, a1, a2] = p.as_array();
    let pairs = (0..n)
        .map(|_| {
            let u0 = pareto2_inverse_cdf(rng.random::<f64>(), a0);
            let u1 = pareto2_inverse_cdf(rng.random::<f64>(), a1);
            let u2 = pareto2_inverse_cdf(rng.random::<f64>(), a2);
            (u0.min(u1), u0.min(u2))
        })
        .collect();
    BivariateSample { pairs }
}

/// Split a sample into the three cells by exact comparison.
pub fn partition(data: &BivariateSample) -> Partition {
    let mut pt = Partition::default();
    for &(x1, x2) in &data.pairs {
        let (l1, l2) = (x1.ln_1p(), x2.ln_1p());
        if x1 == x2 {
            pt.n0 += 1;
            pt.sums.s0 += l1;
        } else if x1 < x2 {
            pt.n1 += 1;
            pt.sums.s1a += l1;
            pt.sums.s1b += l2;
        } else {
            pt.n2 += 1;
            pt.sums.s2a += l1;
            pt.sums.s2b += l2;
        }
    }
    pt
}

/// `n * ln(x)` with `0 * ln(anything) = 0` and `-inf` for `n > 0, x <= 0`.
fn xlogy(n: f64, x: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else if x > 0.0 {
        n * x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Log-likelihood with (possibly fractional) cell weights in place of the counts.
pub fn loglik_with_counts(p: &ShapeParams, counts: [f64; 3], sums: &LogSums) -> f64 {
    let [a0, a1, a2] = p.as_array();
    let [n0, n1, n2] = counts;
    let [d0, d1, d2] = sums.exposures();
    let count_terms = xlogy(n0, a0)
        + xlogy(n1, a1)
        + xlogy(n2, a2)
        + xlogy(n1, a0 + a2)
        + xlogy(n2, a0 + a1);
    if count_terms == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    count_terms - a0 * d0 - a1 * d1 - a2 * d2 + sums.constant()
}

/// `loglik(to) - loglik(from)` in difference form, free of the cancellation
/// that subtracting two large log-likelihoods suffers near convergence.
pub fn loglik_difference(from: &ShapeParams, to: &ShapeParams, counts: [f64; 3], sums: &LogSums) -> f64 {
    let [a0, a1, a2] = from.as_array();
    let [b0, b1, b2] = to.as_array();
    let [n0, n1, n2] = counts;
    let [d0, d1, d2] = sums.exposures();
    let log_ratio = |n: f64, new: f64, old: f64| if n == 0.0 { 0.0 } else { n * ((new - old) / old).ln_1p() };
    log_ratio(n0, b0, a0)
        + log_ratio(n1, b1, a1)
        + log_ratio(n2, b2, a2)
        + log_ratio(n1, b0 + b2, a0 + a2)
        + log_ratio(n2, b0 + b1, a0 + a1)
        - (b0 - a0) * d0
        - (b1 - a1) * d1
        - (b2 - a2) * d2
}

/// Log-likelihood from the sufficient statistics.
///
/// The diagonal cell carries the exponent `-(a0 + a1 + a2 + 1)` implied by the
/// density, so `exp(loglik)` of a single pair equals [`pdf`] at that pair.
pub fn loglik(p: &ShapeParams, pt: &Partition) -> f64 {
    loglik_with_counts(p, pt.counts(), &pt.sums)
}

pub fn grad_with_counts(p: &ShapeParams, counts: [f64; 3], sums: &LogSums) -> [f64; 3] {
    let [a0, a1, a2] = p.as_array();
    let [n0, n1, n2] = counts;
    let [d0, d1, d2] = sums.exposures();
    let r01 = if n2 == 0.0 { 0.0 } else { n2 / (a0 + a1) };
    let r02 = if n1 == 0.0 { 0.0 } else { n1 / (a0 + a2) };
    let q = |n: f64, a: f64| if n == 0.0 { 0.0 } else { n / a };
    [
        q(n0, a0) + r02 + r01 - d0,
        q(n1, a1) + r01 - d1,
        q(n2, a2) + r02 - d2,
    ]
}

/// Analytic gradient of [`loglik`].
pub fn loglik_grad(p: &ShapeParams, pt: &Partition) -> Result<[f64; 3]> {
    if !p.is_interior() {
        return Err(Error::Domain(format!(
            "gradient requires positive parameters, got {:?}",
            p.as_array()
        )));
    }
    Ok(grad_with_counts(p, pt.counts(), &pt.sums))
}

/// Second derivatives of the log-likelihood. The `ln(1+x)` sums enter only
/// linearly, so this depends on the counts alone.
pub fn hessian_with_counts(p: &ShapeParams, counts: [f64; 3]) -> Matrix3<f64> {
    let [a0, a1, a2] = p.as_array();
    let [n0, n1, n2] = counts;
    let c01 = n2 / (a0 + a1).powi(2);
    let c02 = n1 / (a0 + a2).powi(2);
    Matrix3::new(
        -n0 / (a0 * a0) - c01 - c02,
        -c01,
        -c02,
        -c01,
        -n1 / (a1 * a1) - c01,
        0.0,
        -c02,
        0.0,
        -n2 / (a2 * a2) - c02,
    )
}

/// Third derivatives of the log-likelihood, indexed `[i][j][k]`.
pub fn third_derivatives_with_counts(p: &ShapeParams, counts: [f64; 3]) -> [[[f64; 3]; 3]; 3] {
    let [a0, a1, a2] = p.as_array();
    let [_, n1, n2] = counts;
    let t01 = 2.0 * n2 / (a0 + a1).powi(3);
    let t02 = 2.0 * n1 / (a0 + a2).powi(3);
    let mut t = [[[0.0; 3]; 3]; 3];
    // Each mixed term only involves the indices of its pairwise sum, so an
    // entry is nonzero only when its index multiset lies in {0,1} or {0,2}.
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let idx = [i, j, k];
                let mut v = 0.0;
                if idx.iter().all(|&m| m == 0 || m == 1) {
                    v += t01;
                }
                if idx.iter().all(|&m| m == 0 || m == 2) {
                    v += t02;
                }
                if i == j && j == k {
                    v += 2.0 * counts[i] / p.get(i).powi(3);
                }
                t[i][j][k] = v;
            }
        }
    }
    t
}

/// A log-likelihood over the shape parameters, with the cell weights that
/// enter its count terms.
pub trait Likelihood: Sync {
    fn loglik(&self, p: &ShapeParams) -> f64;

    fn grad(&self, p: &ShapeParams) -> [f64; 3];

    /// Cell weights `(n0, n1, n2)` in force at `p`.
    fn cell_counts(&self, p: &ShapeParams) -> [f64; 3];

    fn log_sums(&self) -> &LogSums;

    fn n(&self) -> f64;

    /// Hessian; defaults to central differences of [`Likelihood::grad`].
    fn hessian(&self, p: &ShapeParams) -> Matrix3<f64> {
        let mut h = Matrix3::zeros();
        for j in 0..3 {
            let step = 1e-5 * p.get(j).max(1e-8);
            let gp = self.grad(&p.with(j, p.get(j) + step));
            let gm = self.grad(&p.with(j, p.get(j) - step));
            for i in 0..3 {
                h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        (h + h.transpose()) * 0.5
    }
}

impl Likelihood for Partition {
    fn loglik(&self, p: &ShapeParams) -> f64 {
        loglik(p, self)
    }

    fn grad(&self, p: &ShapeParams) -> [f64; 3] {
        grad_with_counts(p, self.counts(), &self.sums)
    }

    fn cell_counts(&self, _p: &ShapeParams) -> [f64; 3] {
        self.counts()
    }

    fn log_sums(&self) -> &LogSums {
        &self.sums
    }

    fn n(&self) -> f64 {
        self.n() as f64
    }

    fn hessian(&self, p: &ShapeParams) -> Matrix3<f64> {
        hessian_with_counts(p, self.counts())
    }
}
