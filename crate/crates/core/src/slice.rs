//! Univariate step-out slice sampling on `(0, inf)`.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceConfig {
    /// Initial bracket width.
    pub width: f64,
    /// Total number of step-outs allowed, split at random between the two ends.
    pub max_stepout: usize,
    pub max_shrink: usize,
}

impl Default for SliceConfig {
    fn default() -> Self {
        Self {
            width: 1.0,
            max_stepout: 64,
            max_shrink: 1000,
        }
    }
}

impl SliceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width > 0.0 && self.width.is_finite() && self.max_stepout >= 1 && self.max_shrink >= 1 {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid slice configuration {self:?}")))
        }
    }
}

/// One step-out slice update of `x0` under the unnormalized log-density `logf`.
///
/// The bracket never extends below 0. Points outside the support should map
/// to `-inf`.
pub fn slice_step<F, R>(logf: F, x0: f64, cfg: &SliceConfig, rng: &mut R) -> Result<f64>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    let f0 = logf(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteStart(x0));
    }
    let e: f64 = rng.sample(Exp1);
    let level = f0 - e;

    let w = cfg.width;
    let mut lo = x0 - w * rng.random::<f64>();
    let mut hi = lo + w;
    let m = cfg.max_stepout;
    let mut left = (m as f64 * rng.random::<f64>()).floor() as usize;
    let mut right = (m - 1).saturating_sub(left);
    while left > 0 && lo > 0.0 && logf(lo) > level {
        lo -= w;
        left -= 1;
    }
    lo = lo.max(0.0);
    while right > 0 && logf(hi) > level {
        hi += w;
        right -= 1;
    }

    for _ in 0..cfg.max_shrink {
        let x1 = lo + (hi - lo) * rng.random::<f64>();
        if x1 > 0.0 && logf(x1) >= level {
            return Ok(x1);
        }
        if x1 < x0 {
            lo = x1;
        } else {
            hi = x1;
        }
    }
    Err(Error::ShrinkExhausted(cfg.max_shrink))
}
