//! Maximum likelihood by EM on the latent exponential representation.
//!
//! On the scale `y = ln(1 + x)` the three shocks are independent exponentials
//! with rates `alpha0..alpha2`. Each observed minimum is an event for exactly
//! one shock; the only missing piece is which shock produced the second event
//! in the off-diagonal cells. The E-step splits that event between `U0` and
//! the cell's own shock in proportion to their rates, and the M-step divides
//! expected events by exposure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{loglik, loglik_difference, Partition, ShapeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub max_iters: usize,
    /// Stop when the largest relative parameter change drops below this.
    pub tol: f64,
    pub init: ShapeParams,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-10,
            init: ShapeParams::new(1.0, 1.0, 1.0).unwrap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmFit {
    pub params: ShapeParams,
    pub iterations: usize,
    /// Log-likelihood at the initial point and after each update. Later
    /// entries accumulate exact-form increments, so ascent is visible below
    /// the rounding of the log-likelihood itself.
    pub loglik_trace: Vec<f64>,
}

/// One EM update. Returns raw values; a zero count can drive a rate to 0.
pub fn em_step(p: &ShapeParams, pt: &Partition) -> [f64; 3] {
    let [a0, a1, a2] = p.as_array();
    let [n0, n1, n2] = pt.counts();
    let [d0, d1, d2] = pt.sums.exposures();
    let w02 = a0 / (a0 + a2);
    let w01 = a0 / (a0 + a1);
    [
        (n0 + n1 * w02 + n2 * w01) / d0,
        (n1 + n2 * (1.0 - w01)) / d1,
        (n2 + n1 * (1.0 - w02)) / d2,
    ]
}

fn check_data(pt: &Partition) -> Result<()> {
    if pt.n() == 0 {
        return Err(Error::Degenerate("empty sample".into()));
    }
    if pt.sums.exposures().iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Degenerate(
            "a log-sum exposure is zero; the likelihood is unbounded".into(),
        ));
    }
    if pt.n1 + pt.n2 == 0 {
        return Err(Error::Boundary {
            param: 1,
            reason: "no off-diagonal observations; alpha1 and alpha2 have MLE 0".into(),
        });
    }
    Ok(())
}

pub fn em_fit(pt: &Partition, cfg: &EmConfig) -> Result<EmFit> {
    if cfg.max_iters == 0 || !(cfg.tol > 0.0) {
        return Err(Error::Config("EM needs max_iters >= 1 and tol > 0".into()));
    }
    check_data(pt)?;
    let mut p = cfg.init;
    let mut trace = vec![loglik(&p, pt)];
    for it in 1..=cfg.max_iters {
        let next = em_step(&p, pt);
        if let Some(i) = next.iter().position(|a| !(*a > 0.0)) {
            return Err(Error::Boundary {
                param: i,
                reason: format!("EM update reached {:?}", next),
            });
        }
        let change = (0..3)
            .map(|i| ((next[i] - p.get(i)) / p.get(i)).abs())
            .fold(0.0, f64::max);
        let next = ShapeParams::try_from(next)?;
        let last = *trace.last().unwrap();
        trace.push(last + loglik_difference(&p, &next, pt.counts(), &pt.sums));
        p = next;
        if change < cfg.tol {
            return Ok(EmFit {
                params: p,
                iterations: it,
                loglik_trace: trace,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iters,
        last: p.as_array(),
    })
}
