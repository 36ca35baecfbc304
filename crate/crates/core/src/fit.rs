//! Single-dataset fits and their report form.

use serde::Serialize;

use crate::em::{em_fit, EmConfig};
use crate::error::Result;
use crate::fractional::FractionalPartition;
use crate::gibbs::{run_chain, GibbsConfig, PosteriorChain};
use crate::lindley::{lindley_fit, lindley_fit_general, MleSource};
use crate::model::{Likelihood, Partition, ShapeParams};
use crate::optimize::{maximize, NewtonConfig};
use crate::priors::{GammaHyper, PriorSpec};
use crate::summary::{chen_shao_interval, posterior_mean, posterior_variance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub method: String,
    pub n: usize,
    pub estimates: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<[[f64; 2]; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior_variance: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

pub fn prior_label(prior: &PriorSpec) -> &'static str {
    match prior {
        PriorSpec::Gamma(_) => "gibbs-gamma",
        PriorSpec::Reference => "gibbs-reference",
    }
}

/// Posterior mean, within-chain variance and credible intervals at level
/// `100(1 - gamma)%`.
pub fn fit_gibbs<L: Likelihood + ?Sized>(
    lik: &L,
    prior: &PriorSpec,
    cfg: &GibbsConfig,
    gamma: f64,
) -> Result<(FitReport, PosteriorChain)> {
    let chain = run_chain(lik, prior, cfg)?;
    let mean = posterior_mean(&chain)?;
    let var = posterior_variance(&chain)?;
    let mut intervals = [[0.0; 2]; 3];
    for (i, iv) in intervals.iter_mut().enumerate() {
        let ci = chen_shao_interval(&chain.coordinate(i), gamma)?;
        *iv = [ci.lo, ci.hi];
    }
    let report = FitReport {
        method: prior_label(prior).into(),
        n: lik.n() as usize,
        estimates: mean.as_array(),
        mle: None,
        intervals: Some(intervals),
        posterior_variance: Some(var),
        level: Some(1.0 - gamma),
        seed: Some(cfg.seed),
        iterations: None,
    };
    Ok((report, chain))
}

pub fn fit_em(pt: &Partition, cfg: &EmConfig) -> Result<FitReport> {
    let fit = em_fit(pt, cfg)?;
    Ok(FitReport {
        method: "em".into(),
        n: pt.n(),
        estimates: fit.params.as_array(),
        mle: None,
        intervals: None,
        posterior_variance: None,
        level: None,
        seed: None,
        iterations: Some(fit.iterations),
    })
}

/// Maximum likelihood for the fractional-count likelihood (no EM form).
pub fn fit_mle_fractional(fp: &FractionalPartition, init: ShapeParams) -> Result<FitReport> {
    let p = maximize(fp, init, &NewtonConfig::default())?;
    Ok(FitReport {
        method: "mle-fractional".into(),
        n: fp.n,
        estimates: p.as_array(),
        mle: None,
        intervals: None,
        posterior_variance: None,
        level: None,
        seed: None,
        iterations: None,
    })
}

pub fn fit_lindley(pt: &Partition, h: &GammaHyper, source: MleSource, em: &EmConfig) -> Result<FitReport> {
    let (mle, est) = lindley_fit(pt, h, source, em)?;
    Ok(lindley_report(pt.n(), mle, est))
}

pub fn fit_lindley_fractional(fp: &FractionalPartition, h: &GammaHyper, init: ShapeParams) -> Result<FitReport> {
    let (mle, est) = lindley_fit_general(fp, h, init)?;
    Ok(lindley_report(fp.n, mle, est))
}

fn lindley_report(n: usize, mle: ShapeParams, est: ShapeParams) -> FitReport {
    FitReport {
        method: "lindley".into(),
        n,
        estimates: est.as_array(),
        mle: Some(mle.as_array()),
        intervals: None,
        posterior_variance: None,
        level: None,
        seed: None,
        iterations: None,
    }
}

/// Plain-text rendering with the same row labels as the study tables.
pub fn render_fit(r: &FitReport) -> String {
    let mut out = format!("{} (n = {})\n", r.method, r.n);
    out += &row("Parameter Sets", ["alpha0", "alpha1", "alpha2"].map(String::from));
    let label = if r.method.starts_with("gibbs") || r.method == "lindley" { "Bayes Estimates" } else { "Estimates" };
    out += &row(label, r.estimates.map(|v| format!("{v:.4}")));
    if let Some(m) = r.mle {
        out += &row("MLE", m.map(|v| format!("{v:.4}")));
    }
    if let Some(v) = r.posterior_variance {
        out += &row("Posterior Variance", v.map(|v| format!("{v:.6}")));
    }
    if let Some(iv) = r.intervals {
        out += &row("Credible Intervals", iv.map(|[a, b]| format!("[{a:.4}, {b:.4}]")));
    }
    out
}

pub(crate) fn row(label: &str, cells: [String; 3]) -> String {
    format!("  {:<24}{:>20}{:>20}{:>20}\n", label, cells[0], cells[1], cells[2])
}
