//! Compact sets carrying all but `(1+c) e^{−a/ε}/(1 − e^{−a/ε})` of the mass of `√ε W`.
//!
//! Row `n` of the coefficient sequence must lie in a Euclidean ball of radius
//! `√(a(n+1)/λ̄)` intersected with the ellipsoid `Σ_k c_k x_k² <= β a'_n`. The
//! constants come from the concentration bound
//! `P(‖Z‖ >= t) <= exp(−(t − √tr Q)²/(2 λ_max))`, which with
//! `(t − s)² >= t²/2 − s²` gives `P(‖Z‖ >= √x) <= c(Q) e^{−λ(Q) x}`,
//! `c(Q) = exp(tr Q/(2λ_max))`, `λ(Q) = 1/(4 λ_max)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{weight, HolderExponent};
use crate::error::{config, domain, Result};
use crate::qwiener::SimConfig;
use crate::rng::standard_normal;
use crate::spectrum::{DecayLaw, Spectrum};

/// The divergent sequence `c_k` shaping the ellipsoids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GrowthLaw {
    /// `c_k = ratio^k`, `ratio > 1`.
    Geometric { ratio: f64 },
    /// `c_k = (k+1)^exponent`, `exponent > 0`.
    Power { exponent: f64 },
}

impl GrowthLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            GrowthLaw::Geometric { ratio } if !(ratio.is_finite() && ratio > 1.0) => Err(config(
                format!("geometric growth ratio must be > 1, got {ratio}"),
            )),
            GrowthLaw::Power { exponent } if !(exponent.is_finite() && exponent > 0.0) => Err(
                config(format!("power growth exponent must be > 0, got {exponent}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        match *self {
            GrowthLaw::Geometric { ratio } => ratio.powi(k as i32),
            GrowthLaw::Power { exponent } => ((k + 1) as f64).powf(exponent),
        }
    }
}

/// `(Σ_{k >= from} c_k λ_k` upper bound, `sup_{k >= from} c_k λ_k)`.
fn weighted_tail(law: &DecayLaw, growth: GrowthLaw, from: usize) -> Result<(f64, f64)> {
    let divergent = || config("sum of c_k * lambda_k diverges under the decay law");
    let term = |k: usize| growth.value(k) * law.eigenvalue(k);
    match (law, growth) {
        (DecayLaw::Explicit { .. }, _) => Ok((0.0, 0.0)),
        (DecayLaw::Power { .. }, GrowthLaw::Geometric { .. }) => Err(divergent()),
        (DecayLaw::Power { lambda0, exponent }, GrowthLaw::Power { exponent: s }) => {
            let e = exponent - s;
            if e <= 1.0 {
                return Err(divergent());
            }
            let m = (from + 1) as f64;
            Ok((
                lambda0 * (m.powf(-e) + m.powf(1.0 - e) / (e - 1.0)),
                term(from),
            ))
        }
        (DecayLaw::Geometric { lambda0, ratio }, GrowthLaw::Geometric { ratio: g }) => {
            let r = ratio * g;
            if r >= 1.0 {
                return Err(divergent());
            }
            Ok((lambda0 * r.powi(from as i32) / (1.0 - r), term(from)))
        }
        (DecayLaw::Geometric { ratio, .. }, GrowthLaw::Power { exponent }) => {
            // term ratios q((k+2)/(k+1))^s decrease to q
            let target = 0.5 * (1.0 + ratio);
            let mut sum = 0.0;
            let mut sup: f64 = 0.0;
            let mut k = from;
            loop {
                let r = ratio * ((k + 2) as f64 / (k + 1) as f64).powf(exponent);
                sup = sup.max(term(k));
                if r <= target {
                    return Ok((sum + term(k) / (1.0 - r), sup));
                }
                sum += term(k);
                k += 1;
            }
        }
    }
}

/// A materialized tightness set together with its constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightSet {
    pub a: f64,
    pub alpha: HolderExponent,
    pub spectrum: Spectrum,
    pub growth: GrowthLaw,
    /// `c(Q)`.
    pub c: f64,
    /// `λ̄ = λ(Q)`.
    pub lambda_bar: f64,
    /// `c(Q̃)` for `Q̃ = diag(c_k λ_k)`.
    pub c_tilde: f64,
    /// `β = 1/λ(Q̃)`.
    pub beta: f64,
    /// `Σ_k c_k λ_k` over all channels, including the extrapolated tail.
    pub weighted_trace: f64,
    /// `c_n(α) √(a(n+1)/λ̄)` for the rows `n < N`.
    pub radii: Vec<f64>,
    /// `a'_n = (n+1) a + log c(Q̃)`.
    pub ellipsoid_levels: Vec<f64>,
    /// `b_k = √(β/c_k)` for the channels `k < K`.
    pub ellipsoid_weights: Vec<f64>,
}

impl TightSet {
    pub fn rows(&self) -> usize {
        self.radii.len()
    }

    /// `(1+c) e^{−a/ε} / (1 − e^{−a/ε})`.
    pub fn bound(&self, eps: f64) -> f64 {
        let x = -self.a / eps;
        (1.0 + self.c) * x.exp() / -x.exp_m1()
    }

    /// Whether raw row `z` (a draw of `Z_n`) scaled by `√ε` lies in row `n` of the set.
    pub fn row_contains(&self, n: usize, z: &[f64], eps: f64) -> bool {
        let norm2: f64 = z.iter().map(|x| x * x).sum();
        let ell: f64 = z
            .iter()
            .zip(&self.ellipsoid_weights)
            .map(|(x, b)| x * x / (b * b))
            .sum();
        eps * norm2 <= self.a * (n + 1) as f64 / self.lambda_bar
            && eps * ell <= self.ellipsoid_levels[n]
    }
}

/// Builds the set for target rate `a` over `rows` coefficient rows.
pub fn tight_build(
    a: f64,
    spec: &Spectrum,
    growth: GrowthLaw,
    alpha: HolderExponent,
    rows: usize,
) -> Result<TightSet> {
    if !(a.is_finite() && a > 0.0) {
        return Err(config(format!("target rate a must be positive, got {a}")));
    }
    if rows == 0 {
        return Err(config("tightness set needs at least one row"));
    }
    growth.validate()?;
    let kk = spec.channels();
    let lambda_max = spec.lambda_max();
    if lambda_max == 0.0 {
        return Err(config("tightness needs a nonzero spectrum"));
    }
    let c = (spec.full_trace_bound() / (2.0 * lambda_max)).exp();
    let lambda_bar = 1.0 / (4.0 * lambda_max);

    let head: Vec<f64> = (0..kk).map(|k| growth.value(k) * spec.lambda(k)).collect();
    let (tail, tail_sup) = weighted_tail(spec.law(), growth, kk)?;
    let weighted_trace = head.iter().sum::<f64>() + tail;
    let weighted_max = head.iter().copied().fold(tail_sup, f64::max);
    let c_tilde = (weighted_trace / (2.0 * weighted_max)).exp();
    let beta = 4.0 * weighted_max;

    let radii = (0..rows)
        .map(|n| weight(n, alpha) * (a * (n + 1) as f64 / lambda_bar).sqrt())
        .collect();
    let ellipsoid_levels = (0..rows)
        .map(|n| (n + 1) as f64 * a + c_tilde.ln())
        .collect();
    let ellipsoid_weights = (0..kk).map(|k| (beta / growth.value(k)).sqrt()).collect();
    Ok(TightSet {
        a,
        alpha,
        spectrum: spec.clone(),
        growth,
        c,
        lambda_bar,
        c_tilde,
        beta,
        weighted_trace,
        radii,
        ellipsoid_levels,
        ellipsoid_weights,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightPoint {
    pub eps: f64,
    pub complement: f64,
    pub stderr: f64,
    pub misses: u64,
    pub bound: f64,
    /// The bound is at least 1 and says nothing.
    pub vacuous: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightReport {
    pub a: f64,
    pub c: f64,
    pub lambda_bar: f64,
    pub beta: f64,
    pub paths: u64,
    pub points: Vec<TightPoint>,
}

impl TightReport {
    pub fn all_pass(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }
}

/// Monte Carlo mass of the complement at each `ε ∈ (0, 1]` against the bound.
pub fn tight_check(set: &TightSet, eps_grid: &[f64], cfg: &SimConfig) -> Result<TightReport> {
    if cfg.spectrum.lambdas() != set.spectrum.lambdas() {
        return Err(config(
            "simulation spectrum differs from the tightness spectrum",
        ));
    }
    if cfg.count != set.rows() {
        return Err(config(format!(
            "simulated truncation N = {} but the set has {} rows",
            cfg.count,
            set.rows()
        )));
    }
    if let Some(bad) = eps_grid.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(domain(format!(
            "tightness eps must lie in (0,1], got {bad}"
        )));
    }
    let kk = cfg.channels();
    let roots: Vec<f64> = cfg.spectrum.lambdas().iter().map(|l| l.sqrt()).collect();
    let mut points = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let misses = (0..cfg.paths as u64)
            .into_par_iter()
            .filter(|&i| {
                let mut row = vec![0.0; kk];
                (0..set.rows()).any(|n| {
                    for (k, r) in row.iter_mut().enumerate() {
                        *r = roots[k] * standard_normal(cfg.seed, i, n, k);
                    }
                    !set.row_contains(n, &row, eps)
                })
            })
            .count() as u64;
        let m = cfg.paths as f64;
        let p = misses as f64 / m;
        let stderr = (p * (1.0 - p) / m).sqrt();
        let bound = set.bound(eps);
        let vacuous = bound >= 1.0;
        points.push(TightPoint {
            eps,
            complement: p,
            stderr,
            misses,
            bound,
            vacuous,
            pass: p <= bound + 3.0 * stderr,
        });
    }
    Ok(TightReport {
        a: set.a,
        c: set.c,
        lambda_bar: set.lambda_bar,
        beta: set.beta,
        paths: cfg.paths as u64,
        points,
    })
}
