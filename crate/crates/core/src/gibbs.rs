//! Slice-within-Gibbs sampling of the shape parameters.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Likelihood, ShapeParams};
use crate::posterior::log_conditional;
use crate::priors::PriorSpec;
use crate::rng::SimRng;
use crate::slice::{slice_step, SliceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    pub burn_in: usize,
    pub draws: usize,
    pub init: ShapeParams,
    pub seed: u64,
    pub slice: SliceConfig,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            burn_in: 500,
            draws: 2000,
            init: ShapeParams::new(1.0, 1.0, 1.0).unwrap(),
            seed: 0,
            slice: SliceConfig::default(),
        }
    }
}

/// Post-burn-in draws in sweep order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    pub samples: Vec<ShapeParams>,
    pub meta: GibbsConfig,
}

impl PosteriorChain {
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.get(i)).collect()
    }
}

/// Runs `burn_in + draws` sweeps, updating `alpha0`, `alpha1`, `alpha2` in
/// turn, and keeps the last `draws` states.
pub fn run_chain<L: Likelihood + ?Sized>(lik: &L, prior: &PriorSpec, cfg: &GibbsConfig) -> Result<PosteriorChain> {
    if cfg.draws == 0 {
        return Err(Error::Config("draws must be at least 1".into()));
    }
    cfg.slice.validate()?;
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let mut state = cfg.init;
    let mut samples = Vec::with_capacity(cfg.draws);
    for sweep in 0..cfg.burn_in + cfg.draws {
        for coord in 0..3 {
            let logf = |v: f64| {
                log_conditional(coord, &state.with(coord, v), lik, prior).unwrap_or(f64::NEG_INFINITY)
            };
            let next = slice_step(logf, state.get(coord), &cfg.slice, &mut rng).map_err(|e| Error::Chain {
                sweep,
                coord,
                source: Box::new(e),
            })?;
            state = state.with(coord, next);
        }
        if sweep >= cfg.burn_in {
            samples.push(state);
        }
    }
    Ok(PosteriorChain { samples, meta: *cfg })
}
