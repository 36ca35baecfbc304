//! Log-posterior densities: the joint under the gamma prior and the three
//! univariate full conditionals under either prior.

use crate::error::{Error, Result};
use crate::model::{loglik, Likelihood, Partition, ShapeParams};
use crate::priors::{log_ref_conditional_counts, GammaHyper, PriorSpec};

/// Unnormalized joint log-posterior under independent gamma priors.
pub fn log_full_posterior_gamma(p: &ShapeParams, pt: &Partition, h: &GammaHyper) -> Result<f64> {
    if !p.is_interior() {
        return Err(Error::Domain(format!("posterior needs positive parameters, got {:?}", p.as_array())));
    }
    let prior: f64 = (0..3).map(|i| h.log_kernel(i, p.get(i))).sum();
    Ok(loglik(p, pt) + prior)
}

/// Unnormalized log full conditional of `alpha_which` given the other two.
///
/// Under a gamma prior this differs from [`log_full_posterior_gamma`] by a
/// term constant in `alpha_which`. Under the reference prior the prior term
/// is the reference conditional evaluated with the likelihood's cell weights
/// at `p`.
pub fn log_conditional<L: Likelihood + ?Sized>(
    which: usize,
    p: &ShapeParams,
    lik: &L,
    prior: &PriorSpec,
) -> Result<f64> {
    let a = p.get(which);
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("alpha{which} must be positive, got {a}")));
    }
    let data = lik.loglik(p);
    let prior_term = match prior {
        PriorSpec::Gamma(h) => h.log_kernel(which, a),
        PriorSpec::Reference => log_ref_conditional_counts(which, p, lik.cell_counts(p))?,
    };
    Ok(data + prior_term)
}
