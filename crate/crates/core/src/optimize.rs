//! Direct numerical maximization of a log-likelihood: damped Newton on
//! `ln(alpha)` with a gradient-ascent fallback.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{Likelihood, ShapeParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    pub max_iters: usize,
    /// Convergence threshold on the largest log-scale step.
    pub tol: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-12,
        }
    }
}

pub fn maximize<L: Likelihood + ?Sized>(
    lik: &L,
    init: ShapeParams,
    cfg: &NewtonConfig,
) -> Result<ShapeParams> {
    let mut p = init;
    let mut f = lik.loglik(&p);
    if !f.is_finite() {
        return Err(Error::Optimizer("log-likelihood not finite at the start".into()));
    }
    for _ in 0..cfg.max_iters {
        let a = Vector3::from(p.as_array());
        let g = Vector3::from(lik.grad(&p));
        // chain rule for theta = ln(alpha)
        let g_t = a.component_mul(&g);
        let h_t = Matrix3::from_diagonal(&a) * lik.hessian(&p) * Matrix3::from_diagonal(&a)
            + Matrix3::from_diagonal(&g_t);
        let neg = -h_t;
        let dir = match neg.cholesky() {
            Some(ch) => ch.solve(&g_t),
            None => g_t / (1.0 + g_t.amax()),
        };
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-12 {
            let d = dir * step;
            let cand = [a[0] * d[0].exp(), a[1] * d[1].exp(), a[2] * d[2].exp()];
            if let Ok(q) = ShapeParams::try_from(cand) {
                let fq = lik.loglik(&q);
                if fq >= f {
                    p = q;
                    f = fq;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            let gn = Vector3::from(lik.grad(&p)).component_mul(&Vector3::from(p.as_array()));
            return if gn.amax() < 1e-6 * lik.n().max(1.0) {
                Ok(p)
            } else {
                Err(Error::Optimizer("line search failed away from a stationary point".into()))
            };
        }
        if (dir * step).amax() < cfg.tol {
            return Ok(p);
        }
    }
    Err(Error::Optimizer(format!("no convergence in {} iterations", cfg.max_iters)))
}
