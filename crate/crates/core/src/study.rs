//! Replication studies: simulate at a known truth, fit every requested
//! method, and summarize bias, MSE and credible intervals per method.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::em::EmConfig;
use crate::error::{Error, Result};
use crate::fit::{fit_em, fit_gibbs, fit_lindley, row, FitReport};
use crate::gibbs::GibbsConfig;
use crate::lindley::MleSource;
use crate::model::{partition, sample, ShapeParams};
use crate::priors::{GammaHyper, PriorSpec};
use crate::rng::derive_seed;
use crate::summary::replication_stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GibbsGamma,
    GibbsReference,
    Lindley,
    Em,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::GibbsGamma, Method::GibbsReference, Method::Lindley, Method::Em];

    pub fn name(&self) -> &'static str {
        match self {
            Method::GibbsGamma => "gibbs-gamma",
            Method::GibbsReference => "gibbs-reference",
            Method::Lindley => "lindley",
            Method::Em => "em",
        }
    }

    fn heading(&self) -> &'static str {
        match self {
            Method::GibbsGamma => "Slice-cum-Gibbs, Gamma Prior",
            Method::GibbsReference => "Slice-cum-Gibbs, Reference Prior",
            Method::Lindley => "Lindley, Gamma Prior",
            Method::Em => "EM (maximum likelihood)",
        }
    }

    fn is_gibbs(&self) -> bool {
        matches!(self, Method::GibbsGamma | Method::GibbsReference)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub truth: ShapeParams,
    pub n: usize,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub hyper: GammaHyper,
    /// Burn-in, draws, starting value and slice tuning; the seed is replaced
    /// per replication.
    pub gibbs: GibbsConfig,
    /// Credible intervals are `100(1 - gamma_level)%`.
    pub gamma_level: f64,
    pub seed: u64,
    pub em: EmConfig,
    pub mle_source: MleSource,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            truth: ShapeParams::new(0.1, 0.2, 0.4).unwrap(),
            n: 1000,
            replications: 50,
            methods: vec![Method::GibbsGamma],
            hyper: GammaHyper::default(),
            gibbs: GibbsConfig::default(),
            gamma_level: 0.05,
            seed: 0,
            em: EmConfig::default(),
            mle_source: MleSource::Em,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.replications == 0 || self.methods.is_empty() {
            return Err(Error::Config("study needs n >= 1, replications >= 1 and at least one method".into()));
        }
        if !(self.gamma_level > 0.0 && self.gamma_level < 1.0) {
            return Err(Error::Config(format!("level gamma must lie in (0, 1), got {}", self.gamma_level)));
        }
        if self.gibbs.draws == 0 {
            return Err(Error::Config("draws must be at least 1".into()));
        }
        self.gibbs.slice.validate()
    }
}

/// Per-method summary across replications. Failed replications are
/// excluded from every average and listed in `failures`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub estimates: Option<[f64; 3]>,
    pub mse: Option<[f64; 3]>,
    pub bias: Option<[f64; 3]>,
    /// Mean interval endpoints; Gibbs methods only.
    pub intervals: Option<[[f64; 2]; 3]>,
    /// Replications whose interval covers the truth, per coordinate.
    pub coverage: Option<[usize; 3]>,
    /// Mean within-chain posterior variance; Gibbs methods only.
    pub posterior_variance: Option<[f64; 3]>,
    pub starting_value: Option<[f64; 3]>,
    pub excluded: usize,
    pub seed: u64,
    pub failures: Vec<(usize, String)>,
    #[serde(skip)]
    pub fits: Vec<Option<FitReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub methods: Vec<MethodSummary>,
}

fn fit_one(method: Method, cfg: &StudyConfig, rep: usize) -> Result<FitReport> {
    let data_seed = derive_seed(cfg.seed, rep as u64);
    let pt = partition(&sample(&cfg.truth, cfg.n, data_seed));
    match method {
        Method::GibbsGamma | Method::GibbsReference => {
            let prior = if method == Method::GibbsGamma { PriorSpec::Gamma(cfg.hyper) } else { PriorSpec::Reference };
            let stream = Method::ALL.iter().position(|m| *m == method).unwrap() as u64;
            let gibbs = GibbsConfig { seed: derive_seed(data_seed, stream), ..cfg.gibbs };
            fit_gibbs(&pt, &prior, &gibbs, cfg.gamma_level).map(|(r, _)| r)
        }
        Method::Lindley => fit_lindley(&pt, &cfg.hyper, cfg.mle_source, &cfg.em),
        Method::Em => fit_em(&pt, &cfg.em),
    }
}

fn mean3(xs: impl Iterator<Item = [f64; 3]>) -> Option<[f64; 3]> {
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for x in xs {
        for i in 0..3 {
            acc[i] += x[i];
        }
        n += 1;
    }
    (n > 0).then(|| acc.map(|a| a / n as f64))
}

fn summarize(method: Method, cfg: &StudyConfig, results: Vec<Result<FitReport>>) -> MethodSummary {
    let mut failures = Vec::new();
    let mut fits = Vec::with_capacity(results.len());
    for (rep, r) in results.into_iter().enumerate() {
        match r {
            Ok(f) => fits.push(Some(f)),
            Err(e) => {
                failures.push((rep, e.to_string()));
                fits.push(None);
            }
        }
    }
    let ok: Vec<&FitReport> = fits.iter().flatten().collect();
    let est: Vec<ShapeParams> = ok.iter().filter_map(|f| ShapeParams::try_from(f.estimates).ok()).collect();
    let (bias, mse) = if est.is_empty() {
        (None, None)
    } else {
        let (b, m) = replication_stats(&est, &cfg.truth);
        (Some(b), Some(m))
    };
    let intervals = mean3(ok.iter().filter_map(|f| f.intervals.map(|iv| iv.map(|p| p[0]))))
        .zip(mean3(ok.iter().filter_map(|f| f.intervals.map(|iv| iv.map(|p| p[1])))))
        .map(|(lo, hi)| std::array::from_fn(|i| [lo[i], hi[i]]));
    let coverage = method.is_gibbs().then(|| {
        std::array::from_fn(|i| {
            let t = cfg.truth.get(i);
            ok.iter().filter(|f| f.intervals.is_some_and(|iv| iv[i][0] <= t && t <= iv[i][1])).count()
        })
    });
    MethodSummary {
        method,
        estimates: mean3(ok.iter().map(|f| f.estimates)),
        mse,
        bias,
        intervals,
        coverage,
        posterior_variance: mean3(ok.iter().filter_map(|f| f.posterior_variance)),
        starting_value: method.is_gibbs().then(|| cfg.gibbs.init.as_array()),
        excluded: failures.len(),
        seed: cfg.seed,
        failures,
        fits,
    }
}

/// Runs the study. Replications run in parallel; the report depends only on
/// the configuration.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let methods = cfg
        .methods
        .iter()
        .map(|&m| {
            let results: Vec<Result<FitReport>> =
                (0..cfg.replications).into_par_iter().map(|rep| fit_one(m, cfg, rep)).collect();
            summarize(m, cfg, results)
        })
        .collect();
    Ok(StudyReport { config: cfg.clone(), methods })
}

fn fmt3(v: Option<[f64; 3]>, prec: usize) -> [String; 3] {
    match v {
        Some(v) => v.map(|x| format!("{x:.prec$}")),
        None => std::array::from_fn(|_| "-".to_string()),
    }
}

impl StudyReport {
    /// Aligned plain-text table, one block per method.
    pub fn render_text(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "n = {}, replications = {}, seed = {}, credible level = {}%\n",
            c.n,
            c.replications,
            c.seed,
            100.0 * (1.0 - c.gamma_level)
        );
        let truth = c.truth.as_array();
        for m in &self.methods {
            out += &format!("\n{}\n", m.method.heading());
            out += &row("Original Parameter Sets", std::array::from_fn(|i| format!("alpha{i} = {}", truth[i])));
            if let Some(s) = m.starting_value {
                out += &row("Starting Value", s.map(|v| format!("{v:.4}")));
            }
            out += &row("Bayes Estimates", fmt3(m.estimates, 4));
            out += &row("Bias", fmt3(m.bias, 4));
            out += &row("Mean Square Error", fmt3(m.mse, 6));
            if m.posterior_variance.is_some() {
                out += &row("Posterior Variance", fmt3(m.posterior_variance, 6));
            }
            if let Some(iv) = m.intervals {
                out += &row("Credible Intervals", iv.map(|[a, b]| format!("[{a:.4}, {b:.4}]")));
            }
            if let Some(cov) = m.coverage {
                out += &row("Interval Coverage", cov.map(|k| format!("{k}/{}", c.replications - m.excluded)));
            }
            out += &format!("  {:<24}{}\n", "Excluded Replications", m.excluded);
            for (rep, msg) in &m.failures {
                out += &format!("    replication {rep}: {msg}\n");
            }
        }
        out
    }

    /// Machine-readable sidecar: one object per method.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.methods).expect("report serializes")
    }
}
