use serde::{Deserialize, Serialize};

use super::ball::BallSpec;
use crate::basis::{level_weight, weight};
use crate::error::{domain, Result};
use crate::gauss::log_norm_interval;
use crate::spectrum::DecayLaw;

/// `log μ_ε(ball)` at truncation, plus a bound on the omitted factors:
/// the untruncated value lies in `[logp − tail_bound, logp]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactLogProb {
    pub logp: f64,
    pub tail_bound: f64,
}

const MAX_LEVELS: usize = 4096;
const MAX_CHANNELS: usize = 1 << 20;

/// Product of `P(c_n √(ελ_k) Z ∈ (F − δ, F + δ))` over the truncated coordinates.
pub fn exact_log_prob(ball: &BallSpec, eps: f64) -> Result<ExactLogProb> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(domain(format!(
            "noise level eps must be positive, got {eps}"
        )));
    }
    let kk = ball.channels();
    let delta = ball.delta();
    let roots: Vec<f64> = ball
        .spec()
        .lambdas()
        .iter()
        .map(|l| (eps * l).sqrt())
        .collect();
    let mut logp = 0.0;
    for (i, &f) in ball.center().scaled().iter().enumerate() {
        let sigma = weight(i / kk, ball.alpha()) * roots[i % kk];
        logp += if sigma == 0.0 {
            if f.abs() < delta {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            log_norm_interval((f - delta) / sigma, (f + delta) / sigma)
        };
    }
    Ok(ExactLogProb {
        logp,
        tail_bound: tail_bound(ball, eps),
    })
}

/// `h(y) = −log P(|Z| < y)`.
fn h(y: f64) -> f64 {
    -log_norm_interval(-y, y)
}

/// `e^{−s}/(1 − e^{−s})`, an upper bound on `h(√(2s))`: `P(|Z| >= y) <= e^{−y²/2}`
/// and `−log(1 − x) <= x/(1 − x)`.
fn b(s: f64) -> f64 {
    if s == f64::INFINITY {
        0.0
    } else {
        let e = (-s).exp();
        e / -(-s).exp_m1()
    }
}

/// `s = δ² / (2 c² ε λ)`.
fn s_of(delta: f64, c: f64, eps: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        f64::INFINITY
    } else {
        delta * delta / (2.0 * c * c * eps * lambda)
    }
}

/// Bound on `Σ_{k >= K} h` for one coordinate weight `c`. With `exact_head`
/// the leading terms use `h`, otherwise `b` throughout.
fn channel_tail(
    law: &DecayLaw,
    from: usize,
    delta: f64,
    c: f64,
    eps: f64,
    exact_head: bool,
) -> f64 {
    if matches!(law, DecayLaw::Explicit { .. }) {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut k = from;
    while k < from + MAX_CHANNELS {
        let s = s_of(delta, c, eps, law.eigenvalue(k));
        let s_next = s_of(delta, c, eps, law.eigenvalue(k + 1));
        // the gaps s_{k+1} − s_k grow with k for both laws, so later ratios are smaller
        let ratio = (-(s_next - s)).exp();
        if ratio <= 0.5 {
            return sum + b(s) / (1.0 - ratio);
        }
        sum += if exact_head {
            h((2.0 * s).sqrt())
        } else {
            b(s)
        };
        k += 1;
    }
    f64::INFINITY
}

/// Bound on `Σ |log P|` over the coordinates outside the `N × K` truncation,
/// whose centers are zero.
fn tail_bound(ball: &BallSpec, eps: f64) -> f64 {
    let law = ball.spec().law();
    let kk = ball.channels();
    let delta = ball.delta();
    let alpha = ball.alpha();
    let n = ball.count();

    // channels k >= K on the rows present: n = 0 and levels 0..L−1
    let present_levels = n.trailing_zeros() as usize;
    let mut total = channel_tail(law, kk, delta, 1.0, eps, true);
    for j in 0..present_levels {
        let c = level_weight(j as u32, alpha);
        total += (j as f64).exp2() * channel_tail(law, kk, delta, c, eps, true);
    }

    // every channel on the levels j >= L
    let lambda_max = ball.spec().lambda_max().max(law.eigenvalue(kk));
    if lambda_max == 0.0 {
        return total;
    }
    let growth = (1.0 - 2.0 * alpha.value()).exp2();
    for j in present_levels..present_levels + MAX_LEVELS {
        let c = level_weight(j as u32, alpha);
        let mult = (j as f64).exp2();
        let s_min = s_of(delta, c, eps, lambda_max);
        let ratio = 2.0 * (-s_min * (growth - 1.0)).exp();
        if ratio <= 0.5 {
            let head: f64 = ball
                .spec()
                .lambdas()
                .iter()
                .map(|&l| b(s_of(delta, c, eps, l)))
                .sum();
            let bound = mult * (head + channel_tail(law, kk, delta, c, eps, false));
            return total + bound / (1.0 - ratio);
        }
        let head: f64 = ball
            .spec()
            .lambdas()
            .iter()
            .map(|&l| {
                if l == 0.0 {
                    0.0
                } else {
                    h(delta / (c * (eps * l).sqrt()))
                }
            })
            .sum();
        total += mult * (head + channel_tail(law, kk, delta, c, eps, true));
        if !total.is_finite() {
            return f64::INFINITY;
        }
    }
    f64::INFINITY
}
