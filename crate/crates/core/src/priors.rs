//! Gamma priors and the data-dependent reference conditional priors.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::{Partition, ShapeParams};

/// Independent `Gamma(k_i, theta_i)` priors (shape `k`, scale `theta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaHyper {
    pub k: [f64; 3],
    pub theta: [f64; 3],
}

impl GammaHyper {
    pub fn new(k: [f64; 3], theta: [f64; 3]) -> Result<Self> {
        if k.iter().chain(theta.iter()).all(|v| *v > 0.0 && v.is_finite()) {
            Ok(Self { k, theta })
        } else {
            Err(Error::Domain(format!(
                "gamma hyperparameters must be positive, got k={k:?} theta={theta:?}"
            )))
        }
    }

    /// Log-prior gradient `(k_i - 1)/alpha_i - 1/theta_i`.
    pub fn log_gradient(&self, p: &ShapeParams) -> [f64; 3] {
        std::array::from_fn(|i| (self.k[i] - 1.0) / p.get(i) - 1.0 / self.theta[i])
    }

    /// `(k_i - 1) ln alpha_i - alpha_i / theta_i`, the unnormalized log-prior of one coordinate.
    pub fn log_kernel(&self, i: usize, alpha: f64) -> f64 {
        (self.k[i] - 1.0) * alpha.ln() - alpha / self.theta[i]
    }
}

impl Default for GammaHyper {
    /// k = (2, 4, 3), theta = (3, 3, 2).
    fn default() -> Self {
        Self {
            k: [2.0, 4.0, 3.0],
            theta: [3.0, 3.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PriorSpec {
    Gamma(GammaHyper),
    Reference,
}

/// Log density of `Gamma(k, theta)` at `x`.
pub fn log_gamma_pdf(x: f64, k: f64, theta: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("gamma density needs x > 0, got {x}")));
    }
    Ok((k - 1.0) * x.ln() - x / theta - ln_gamma(k) - k * theta.ln())
}

/// Negative second derivative of the log-likelihood in `alpha_which`, from
/// the cell weights.
pub(crate) fn ref_bracket(which: usize, p: &ShapeParams, counts: [f64; 3]) -> f64 {
    let [a0, a1, a2] = p.as_array();
    let [n0, n1, n2] = counts;
    match which {
        0 => n0 / (a0 * a0) + n2 / (a0 + a1).powi(2) + n1 / (a0 + a2).powi(2),
        1 => n1 / (a1 * a1) + n2 / (a0 + a1).powi(2),
        2 => n2 / (a2 * a2) + n1 / (a0 + a2).powi(2),
        _ => panic!("coordinate index out of range: {which}"),
    }
}

pub(crate) fn log_ref_conditional_counts(
    which: usize,
    p: &ShapeParams,
    counts: [f64; 3],
) -> Result<f64> {
    if !p.is_interior() {
        return Err(Error::Domain(format!(
            "reference prior needs positive parameters, got {:?}",
            p.as_array()
        )));
    }
    let bracket = ref_bracket(which, p, counts);
    if bracket > 0.0 {
        Ok(0.5 * bracket.ln())
    } else {
        Err(Error::Domain(format!(
            "reference prior for alpha{which} is undefined: no observations inform it"
        )))
    }
}

/// Unnormalized log reference prior of `alpha_which` given the other two:
/// half the log of the observed information in that coordinate.
pub fn log_ref_conditional(which: usize, p: &ShapeParams, pt: &Partition) -> Result<f64> {
    log_ref_conditional_counts(which, p, pt.counts())
}
