//! Shared oracles for the integration tests. Nothing here calls into the
//! analytic derivative code; everything is built from `loglik` alone.
#![allow(dead_code)]

use mobvpa::model::loglik;
use mobvpa::{Partition, ShapeParams};
use std::time::Duration;

fn shifted(p: &ShapeParams, steps: &[(usize, f64)]) -> ShapeParams {
    let mut a = p.as_array();
    for &(i, h) in steps {
        a[i] += h;
    }
    ShapeParams::try_from(a).expect("finite-difference step left the parameter space")
}

/// Nested central differences of `loglik` along the listed coordinates with
/// relative step `delta`.
fn nested_diff(pt: &Partition, p: &ShapeParams, idx: &[usize], delta: f64) -> f64 {
    let h: Vec<f64> = idx.iter().map(|&i| delta * p.get(i)).collect();
    let mut total = 0.0;
    for mask in 0..(1u32 << idx.len()) {
        let mut steps = Vec::with_capacity(idx.len());
        let mut sign = 1.0;
        for (b, (&i, &hi)) in idx.iter().zip(&h).enumerate() {
            if mask >> b & 1 == 1 {
                steps.push((i, hi));
            } else {
                steps.push((i, -hi));
                sign = -sign;
            }
        }
        total += sign * loglik(&shifted(p, &steps), pt);
    }
    total / h.iter().map(|hi| 2.0 * hi).product::<f64>()
}

/// Richardson-extrapolated central difference: `(4 D(δ/2) - D(δ)) / 3`.
pub fn fd_derivative(pt: &Partition, p: &ShapeParams, idx: &[usize]) -> f64 {
    let delta = 4e-3;
    let coarse = nested_diff(pt, p, idx, delta);
    let fine = nested_diff(pt, p, idx, delta / 2.0);
    (4.0 * fine - coarse) / 3.0
}

pub fn fd_hessian(pt: &Partition, p: &ShapeParams) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = fd_derivative(pt, p, &[i, j]);
        }
    }
    out
}

pub fn fd_third(pt: &Partition, p: &ShapeParams) -> [[[f64; 3]; 3]; 3] {
    let mut out = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j][k] = fd_derivative(pt, p, &[i, j, k]);
            }
        }
    }
    out
}

/// Relative error of `analytic` against `oracle`. Entries that vanish
/// analytically have no scale of their own and are judged against the
/// largest entry of the same tensor.
pub fn rel_err(analytic: f64, oracle: f64, scale: f64) -> f64 {
    let denom = if analytic == 0.0 { scale } else { analytic.abs() };
    (analytic - oracle).abs() / denom
}

/// Two-sided KS statistic of `xs` against the continuous CDF `cdf`.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Minimal-width interval among all `floor(M * gamma)` candidates, scanning
/// every one; ties keep the first.
pub fn brute_force_interval(draws: &[f64], gamma: f64) -> (f64, f64) {
    let mut s = draws.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = s.len();
    let k = (m as f64 * gamma + 1e-9).floor() as usize;
    let mut best: Option<(f64, f64)> = None;
    for j in 0..k {
        let lo = s[j];
        let hi = s[j + m - k];
        match best {
            Some((blo, bhi)) if bhi - blo <= hi - lo => {}
            _ => best = Some((lo, hi)),
        }
    }
    best.expect("no candidate intervals")
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Prints the one-line verdict for an acceptance criterion.
pub fn verdict(id: u32, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    println!(
        "[{}] criterion {id:>2} {name}: {detail} ({:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
}

/// Monte-Carlo standard error of the mean of a correlated series by
/// non-overlapping batch means.
pub fn batch_means_se(xs: &[f64], batches: usize) -> f64 {
    let size = xs.len() / batches;
    let means: Vec<f64> = xs.chunks_exact(size).map(mean).collect();
    (variance(&means) / means.len() as f64).sqrt()
}
