use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::BallSpec;
use super::exact::exact_log_prob;
use crate::basis::weights;
use crate::error::{config, Error, Result};
use crate::qwiener::SimConfig;
use crate::rng::standard_normal;

/// Monte Carlo refuses when fewer hits than this are expected.
pub const MIN_EXPECTED_HITS: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub hits: u64,
    pub paths: u64,
    /// Allowance for the probability mass lost between the ball's truncation
    /// and the (larger) simulated one.
    pub slack: f64,
}

impl McEstimate {
    /// `|p̂ − p| <= 3 stderr + slack`.
    pub fn agrees_with(&self, p: f64) -> bool {
        (self.p_hat - p).abs() <= 3.0 * self.stderr + self.slack
    }
}

/// Fraction of simulated coefficient matrices with `sup |√ε c_n Z_{n,k} − F_{k,n}| < δ`.
///
/// The ball center is extended by zeros to the simulated truncation `cfg.count`.
pub fn mc_prob(ball: &BallSpec, eps: f64, cfg: &SimConfig) -> Result<McEstimate> {
    let exact = exact_log_prob(ball, eps)?;
    if cfg.spectrum.lambdas() != ball.spec().lambdas() {
        return Err(config("simulation spectrum differs from the ball spectrum"));
    }
    if cfg.count < ball.count() {
        return Err(config(format!(
            "simulated truncation N = {} is smaller than the ball's {}",
            cfg.count,
            ball.count()
        )));
    }
    let expected = exact.logp.exp() * cfg.paths as f64;
    if expected < MIN_EXPECTED_HITS {
        return Err(Error::RareEvent {
            expected,
            threshold: MIN_EXPECTED_HITS,
        });
    }
    let slack = if cfg.count > ball.count() {
        exact.logp.exp() * -(-exact.tail_bound).exp_m1()
    } else {
        0.0
    };

    let kk = ball.channels();
    let delta = ball.delta();
    let sd: Vec<f64> = weights(cfg.count, ball.alpha())
        .iter()
        .flat_map(|c| {
            ball.spec()
                .lambdas()
                .iter()
                .map(move |l| c * (eps * l).sqrt())
        })
        .collect();
    let center = ball.center().scaled();
    let hit = |path: u64| -> bool {
        sd.iter().enumerate().all(|(i, &s)| {
            let f = center.get(i).copied().unwrap_or(0.0);
            let z = if s == 0.0 {
                0.0
            } else {
                s * standard_normal(cfg.seed, path, i / kk, i % kk)
            };
            (z - f).abs() < delta
        })
    };
    let hits = (0..cfg.paths as u64)
        .into_par_iter()
        .filter(|&i| hit(i))
        .count() as u64;
    let m = cfg.paths as f64;
    let p_hat = hits as f64 / m;
    Ok(McEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / m).sqrt(),
        hits,
        paths: cfg.paths as u64,
        slack,
    })
}
