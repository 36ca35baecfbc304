//! Posterior summaries and replication statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::PosteriorChain;
use crate::model::ShapeParams;

/// Shortest interval whose endpoints are order statistics of the draws and
/// that covers all but `floor(M * gamma)` of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub lo: f64,
    pub hi: f64,
    pub gamma: f64,
    /// 1-based index of the lower order statistic.
    pub j_star: usize,
}

pub fn posterior_mean(chain: &PosteriorChain) -> Result<ShapeParams> {
    let n = chain.samples.len();
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    let mut acc = [0.0; 3];
    for s in &chain.samples {
        for (a, v) in acc.iter_mut().zip(s.as_array()) {
            *a += v;
        }
    }
    ShapeParams::try_from(acc.map(|a| a / n as f64))
}

/// Per-coordinate sample variance of the draws.
pub fn posterior_variance(chain: &PosteriorChain) -> Result<[f64; 3]> {
    let mean = posterior_mean(chain)?.as_array();
    let n = chain.samples.len();
    if n < 2 {
        return Ok([0.0; 3]);
    }
    let mut acc = [0.0; 3];
    for s in &chain.samples {
        for i in 0..3 {
            acc[i] += (s.get(i) - mean[i]).powi(2);
        }
    }
    Ok(acc.map(|a| a / (n - 1) as f64))
}

/// Number of candidate intervals, `floor(M * gamma)`.
fn candidate_count(m: usize, gamma: f64) -> usize {
    // small slack so that e.g. 0.29 * 100 counts as 29
    (m as f64 * gamma + 1e-9).floor() as usize
}

pub fn chen_shao_interval(draws: &[f64], gamma: f64) -> Result<CredibleInterval> {
    let m = draws.len();
    if m < 2 {
        return Err(Error::Interval(format!("need at least 2 draws, got {m}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Interval(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let k = candidate_count(m, gamma);
    if k < 1 {
        return Err(Error::Interval(format!("M * gamma = {} < 1: no candidate intervals", m as f64 * gamma)));
    }
    if draws.iter().any(|d| d.is_nan()) {
        return Err(Error::Interval("draws contain NaN".into()));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let span = m - k;
    let mut best = 0;
    for j in 1..k {
        if sorted[j + span] - sorted[j] < sorted[best + span] - sorted[best] {
            best = j;
        }
    }
    Ok(CredibleInterval {
        lo: sorted[best],
        hi: sorted[best + span],
        gamma,
        j_star: best + 1,
    })
}

/// Per-coordinate bias and mean squared error of replicated estimates.
pub fn replication_stats(estimates: &[ShapeParams], truth: &ShapeParams) -> ([f64; 3], [f64; 3]) {
    let n = estimates.len() as f64;
    let mut bias = [0.0; 3];
    let mut mse = [0.0; 3];
    for e in estimates {
        for i in 0..3 {
            let d = e.get(i) - truth.get(i);
            bias[i] += d;
            mse[i] += d * d;
        }
    }
    (bias.map(|b| b / n), mse.map(|m| m / n))
}
