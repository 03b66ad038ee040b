use serde::{Deserialize, Serialize};

use super::ball::{ball_infimum, BallSpec};
use super::exact::exact_log_prob;
use super::mc::{mc_prob, McEstimate};
use crate::error::{domain, Error, Result};
use crate::qwiener::SimConfig;

/// Monte Carlo schedule for a curve: simulate only at `eps >= min_eps`.
#[derive(Debug, Clone, Copy)]
pub struct McPlan<'a> {
    pub cfg: &'a SimConfig,
    pub min_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub eps: f64,
    pub logp: f64,
    pub tail_bound: f64,
    pub eps_logp: f64,
    /// Absent when not requested or refused as a rare event.
    pub mc: Option<McEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LDPCurve {
    /// `−inf I` over the ball, the limit of `ε log μ_ε`.
    pub target: f64,
    pub points: Vec<CurvePoint>,
}

impl LDPCurve {
    /// `|ε log p − target| / |target|` at the last (smallest) ε.
    pub fn final_relative_error(&self) -> Option<f64> {
        let last = self.points.last()?;
        Some((last.eps_logp - self.target).abs() / self.target.abs())
    }
}

/// Exact (and optionally simulated) `ε log μ_ε(ball)` on a strictly decreasing grid.
pub fn ldp_curve(ball: &BallSpec, eps_grid: &[f64], mc: Option<McPlan<'_>>) -> Result<LDPCurve> {
    if eps_grid.is_empty() {
        return Err(domain("eps grid is empty"));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("eps grid must be strictly decreasing"));
    }
    let target = -ball_infimum(ball).value;
    let mut points = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let exact = exact_log_prob(ball, eps)?;
        let mc = match mc {
            Some(plan) if eps >= plan.min_eps => match mc_prob(ball, eps, plan.cfg) {
                Ok(est) => Some(est),
                Err(Error::RareEvent { .. }) => None,
                Err(e) => return Err(e),
            },
            _ => None,
        };
        points.push(CurvePoint {
            eps,
            logp: exact.logp,
            tail_bound: exact.tail_bound,
            eps_logp: eps * exact.logp,
            mc,
        });
    }
    Ok(LDPCurve { target, points })
}
