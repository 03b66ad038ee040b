//! Q-Wiener paths from the double Schauder series `W = Σ_n φ_n Z_n`,
//! `Z_n = (√λ_k N_{n,k})_k`, with counter-based draws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{schauder_unchecked, HolderExponent};
use crate::error::{config, domain, Error, Result};
use crate::rng::standard_normal;
use crate::spectrum::{HVector, Spectrum};
use crate::transform::{grid_time, inverse, CoeffMatrix, DyadicPath};

/// Simulation parameters. `count` (N) is the coefficient truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub spectrum: Spectrum,
    pub level: u32,
    pub count: usize,
    pub alpha: HolderExponent,
    pub seed: u64,
    pub paths: usize,
}

impl SimConfig {
    /// Config with the default truncation `N = 2^J`.
    pub fn new(
        spectrum: Spectrum,
        level: u32,
        alpha: HolderExponent,
        seed: u64,
        paths: usize,
    ) -> Result<Self> {
        if level > 24 {
            return Err(config(format!("level J = {level} too large")));
        }
        let cfg = Self {
            spectrum,
            level,
            count: 1usize << level,
            alpha,
            seed,
            paths,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_count(mut self, count: usize) -> Result<Self> {
        self.count = count;
        self.validate()?;
        Ok(self)
    }

    pub fn with_paths(mut self, paths: usize) -> Result<Self> {
        self.paths = paths;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(config("path count M must be >= 1"));
        }
        if self.count == 0 || !self.count.is_power_of_two() {
            return Err(config(format!(
                "coefficient truncation N = {} must be a power of two",
                self.count
            )));
        }
        if self.count > 1usize << self.level {
            return Err(config(format!(
                "N = {} exceeds 2^J = {}",
                self.count,
                1usize << self.level
            )));
        }
        Ok(())
    }

    pub fn channels(&self) -> usize {
        self.spectrum.channels()
    }
}

/// Standard normal draws `N_{n,k}` of one path, `N × K` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDraws {
    pub count: usize,
    pub channels: usize,
    pub normals: Vec<f64>,
}

pub fn draws(cfg: &SimConfig, path: u64) -> GaussianDraws {
    let kk = cfg.channels();
    let normals = (0..cfg.count)
        .flat_map(|n| (0..kk).map(move |k| standard_normal(cfg.seed, path, n, k)))
        .collect();
    GaussianDraws {
        count: cfg.count,
        channels: kk,
        normals,
    }
}

/// Coefficients `raw[n][k] = √λ_k N_{n,k}` of path `path`.
pub fn sample_coeffs(cfg: &SimConfig, path: u64) -> CoeffMatrix {
    let kk = cfg.channels();
    let roots: Vec<f64> = cfg.spectrum.lambdas().iter().map(|l| l.sqrt()).collect();
    let d = draws(cfg, path);
    let raw = d
        .normals
        .iter()
        .enumerate()
        .map(|(i, z)| roots[i % kk] * z)
        .collect();
    CoeffMatrix::from_raw(cfg.count, kk, cfg.alpha, raw).expect("validated config")
}

/// `W(t_j) = Σ_{n<N} φ_n(t_j) Z_n` on the level-`J` grid.
pub fn sample_path(cfg: &SimConfig, path: u64) -> DyadicPath {
    inverse(&sample_coeffs(cfg, path), cfg.level).expect("N <= 2^J")
}

/// The same path through the eigenbasis route `Σ_k √λ_k β_k e_k`, with
/// `β_k(t) = Σ_n φ_n(t) N_{n,k}` summed term by term.
pub fn sample_path_eigen(cfg: &SimConfig, path: u64) -> DyadicPath {
    let kk = cfg.channels();
    let d = draws(cfg, path);
    let rows = (1usize << cfg.level) + 1;
    let mut samples = vec![0.0; rows * kk];
    for k in 0..kk {
        let root = cfg.spectrum.lambda(k).sqrt();
        let mut beta = vec![0.0; rows];
        for n in 0..cfg.count {
            let z = d.normals[n * kk + k];
            for (j, b) in beta.iter_mut().enumerate() {
                *b += schauder_unchecked(n, grid_time(cfg.level, j)) * z;
            }
        }
        for j in 0..rows {
            samples[j * kk + k] = root * beta[j];
        }
    }
    DyadicPath::new(cfg.level, kk, samples).expect("starts at zero")
}

/// Monte Carlo covariance versus its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovReport {
    pub estimate: f64,
    pub target: f64,
    pub stderr: f64,
}

impl CovReport {
    /// `|estimate − target|` in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.stderr == 0.0 {
            if self.estimate == self.target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - self.target).abs() / self.stderr
        }
    }
}

fn grid_row(level: u32, t: f64) -> Result<usize> {
    let scaled = t * (1u64 << level) as f64;
    if !(0.0..=1.0).contains(&t) || scaled.fract() != 0.0 {
        return Err(domain(format!(
            "time {t} is not a level-{level} grid point"
        )));
    }
    Ok(scaled as usize)
}

/// Estimates `cov(⟨v, W_t⟩, ⟨w, W_s⟩)` over `cfg.paths` paths; the target is
/// `(t ∧ s) Σ_k λ_k v_k w_k`.
pub fn covariance_check(
    cfg: &SimConfig,
    v: &HVector,
    w: &HVector,
    s: f64,
    t: f64,
) -> Result<CovReport> {
    let kk = cfg.channels();
    if v.len() != kk || w.len() != kk {
        return Err(Error::Shape(format!(
            "test vectors must have {kk} coordinates"
        )));
    }
    if cfg.paths < 100 {
        return Err(config("covariance check needs M >= 100 paths"));
    }
    let js = grid_row(cfg.level, s)?;
    let jt = grid_row(cfg.level, t)?;
    let pairs: Vec<(f64, f64)> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| {
            let p = sample_path(cfg, i);
            let x: f64 = p.row(jt).iter().zip(&v.0).map(|(a, b)| a * b).sum();
            let y: f64 = p.row(js).iter().zip(&w.0).map(|(a, b)| a * b).sum();
            (x, y)
        })
        .collect();
    let m = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / m;
    let prods: Vec<f64> = pairs.iter().map(|(x, y)| (x - mx) * (y - my)).collect();
    let estimate = prods.iter().sum::<f64>() / (m - 1.0);
    let mean_prod = prods.iter().sum::<f64>() / m;
    let var = prods.iter().map(|p| (p - mean_prod).powi(2)).sum::<f64>() / (m - 1.0);
    let qvw: f64 = (0..kk)
        .map(|k| cfg.spectrum.lambda(k) * v.0[k] * w.0[k])
        .sum();
    Ok(CovReport {
        estimate,
        target: s.min(t) * qvw,
        stderr: (var / m).sqrt(),
    })
}

/// `sup_{2 <= n < N} ‖Z_n‖_H / √(log n)` over all simulated paths.
pub fn log_bound_stat(cfg: &SimConfig) -> Result<f64> {
    if cfg.count < 3 {
        return Err(config("log bound statistic needs N >= 4"));
    }
    let per_path: Vec<f64> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| {
            let c = sample_coeffs(cfg, i);
            (2..cfg.count)
                .map(|n| {
                    let norm = c.raw_row(n).iter().map(|x| x * x).sum::<f64>().sqrt();
                    norm / (n as f64).ln().sqrt()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(per_path.into_iter().fold(0.0, f64::max))
}
