//! Likelihood for standardized real data, where exact diagonal ties do not
//! survive the location-scale transform.
//!
//! The cell counts are replaced by their multinomial expectations
//! `ñ_i = n · alpha_i / (alpha0 + alpha1 + alpha2)`, recomputed at every
//! parameter value. The log-sums come from the observed cells: pairs are
//! split by coordinate comparison, and only exact ties (if any) feed `s0`.

use crate::error::{Error, Result};
use crate::model::{grad_with_counts, loglik_with_counts, partition, BivariateSample, Likelihood, LogSums, ShapeParams};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FractionalPartition {
    pub n: usize,
    pub sums: LogSums,
}

impl FractionalPartition {
    pub fn from_sample(data: &BivariateSample) -> Self {
        let pt = partition(data);
        Self { n: pt.n(), sums: pt.sums }
    }

    /// `(ñ0, ñ1, ñ2)` at `p`.
    pub fn counts_at(&self, p: &ShapeParams) -> [f64; 3] {
        let n = self.n as f64;
        p.cell_probabilities().map(|w| n * w)
    }
}

pub fn loglik_fractional(p: &ShapeParams, fp: &FractionalPartition) -> Result<f64> {
    if !p.is_interior() {
        return Err(Error::Domain(format!("fractional likelihood needs positive parameters, got {:?}", p.as_array())));
    }
    Ok(loglik_with_counts(p, fp.counts_at(p), &fp.sums))
}

impl Likelihood for FractionalPartition {
    fn loglik(&self, p: &ShapeParams) -> f64 {
        loglik_fractional(p, self).unwrap_or(f64::NEG_INFINITY)
    }

    fn grad(&self, p: &ShapeParams) -> [f64; 3] {
        let [a0, a1, a2] = p.as_array();
        let counts = self.counts_at(p);
        let fixed = grad_with_counts(p, counts, &self.sums);
        // derivative of the weights: dñ_i/da_j = n (δ_ij - w_i) / s
        let c = [a0.ln(), a1.ln() + (a0 + a2).ln(), a2.ln() + (a0 + a1).ln()];
        let w = p.cell_probabilities();
        let avg: f64 = (0..3).map(|i| w[i] * c[i]).sum();
        let scale = self.n as f64 / p.sum();
        std::array::from_fn(|j| fixed[j] + scale * (c[j] - avg))
    }

    fn cell_counts(&self, p: &ShapeParams) -> [f64; 3] {
        self.counts_at(p)
    }

    fn log_sums(&self) -> &LogSums {
        &self.sums
    }

    fn n(&self) -> f64 {
        self.n as f64
    }
}
