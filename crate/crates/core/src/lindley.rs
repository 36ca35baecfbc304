//! Lindley's second-order approximation to the posterior means of
//! `alpha0..alpha2` under independent gamma priors.
//!
//! For a coordinate function `g = alpha_l` the expansion around the MLE reads
//!
//! ```text
//! E[alpha_l] ≈ â_l + b_l + ½ Σ_k A_k σ_kl,   A_k = Σ_ij σ_ij L_ijk,   b_l = Σ_j ρ_j σ_lj
//! ```
//!
//! where `L_ij`, `L_ijk` are log-likelihood derivatives at the MLE, `ρ` is the
//! log-prior gradient and `σ` is the posterior covariance proxy
//! `(-L_ij)^{-1}`. The second-derivative terms of `g` vanish.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::em::{em_fit, EmConfig};
use crate::error::{Error, Result};
use crate::model::{hessian_with_counts, third_derivatives_with_counts, Likelihood, Partition, ShapeParams};
use crate::optimize::{maximize, NewtonConfig};
use crate::priors::GammaHyper;

#[derive(Debug, Clone, PartialEq)]
pub struct LindleyWorkspace {
    pub mle: ShapeParams,
    /// Second derivatives of the log-likelihood at the MLE.
    pub lij: Matrix3<f64>,
    /// `(-lij)^{-1}`.
    pub sigma: Matrix3<f64>,
    pub lijk: [[[f64; 3]; 3]; 3],
    /// `(A, B, C)`.
    pub abc: [f64; 3],
    pub rho: [f64; 3],
    pub b: [f64; 3],
}

/// How the expansion point is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MleSource {
    #[default]
    Em,
    Newton,
}

pub fn build_workspace(pt: &Partition, mle: &ShapeParams, h: &GammaHyper) -> Result<LindleyWorkspace> {
    build_workspace_counts(pt.counts(), mle, h)
}

/// Workspace from explicit cell weights (fractional weights allowed).
pub fn build_workspace_counts(counts: [f64; 3], mle: &ShapeParams, h: &GammaHyper) -> Result<LindleyWorkspace> {
    if !mle.is_interior() {
        return Err(Error::Domain("Lindley expansion needs an interior MLE".into()));
    }
    let lij = hessian_with_counts(mle, counts);
    let sigma = (-lij).try_inverse().ok_or(Error::Singular)?;
    if sigma.iter().any(|v| !v.is_finite()) || !(lij.determinant().abs() > 0.0) {
        return Err(Error::Singular);
    }
    let lijk = third_derivatives_with_counts(mle, counts);
    let abc: [f64; 3] = std::array::from_fn(|k| {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += sigma[(i, j)] * lijk[i][j][k];
            }
        }
        acc
    });
    let rho = h.log_gradient(mle);
    let b: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| rho[j] * sigma[(i, j)]).sum());
    Ok(LindleyWorkspace {
        mle: *mle,
        lij,
        sigma,
        lijk,
        abc,
        rho,
        b,
    })
}

impl LindleyWorkspace {
    /// The curvature term `½ Σ_k A_k σ_kl` for each coordinate.
    pub fn curvature_terms(&self) -> [f64; 3] {
        std::array::from_fn(|l| 0.5 * (0..3).map(|k| self.abc[k] * self.sigma[(k, l)]).sum::<f64>())
    }
}

pub fn lindley_estimates(w: &LindleyWorkspace) -> Result<ShapeParams> {
    let curv = w.curvature_terms();
    let est: [f64; 3] = std::array::from_fn(|l| w.mle.get(l) + w.b[l] + curv[l]);
    ShapeParams::try_from(est)
        .map_err(|_| Error::Domain(format!("Lindley correction left the parameter space: {est:?}")))
}

/// MLE by the chosen route, then the Lindley estimates. Returns both.
pub fn lindley_fit(
    pt: &Partition,
    h: &GammaHyper,
    source: MleSource,
    em_cfg: &EmConfig,
) -> Result<(ShapeParams, ShapeParams)> {
    let mle = match source {
        MleSource::Em => em_fit(pt, em_cfg)?.params,
        MleSource::Newton => maximize(pt, em_cfg.init, &NewtonConfig::default())?,
    };
    let w = build_workspace(pt, &mle, h)?;
    Ok((mle, lindley_estimates(&w)?))
}

/// Lindley estimates for an arbitrary likelihood: direct maximization, then
/// the expansion with the cell weights frozen at the maximizer.
pub fn lindley_fit_general<L: Likelihood + ?Sized>(
    lik: &L,
    h: &GammaHyper,
    init: ShapeParams,
) -> Result<(ShapeParams, ShapeParams)> {
    let mle = maximize(lik, init, &NewtonConfig::default())?;
    let w = build_workspace_counts(lik.cell_counts(&mle), &mle, h)?;
    Ok((mle, lindley_estimates(&w)?))
}
