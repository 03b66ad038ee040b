//! The Cameron–Martin rate `I(F) = Σ_k (1/λ_k) Ĩ(⟨F, e_k⟩)` with
//! `Ĩ(f) = ½∫|ḟ|²`, in path and Haar-coefficient form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{h0_energy_slice, ratio_conv, Spectrum};
use crate::transform::{CoeffMatrix, DyadicPath};

/// A rate value, possibly infinite, with its channel decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateValue {
    pub value: f64,
    pub per_channel: Vec<f64>,
}

impl RateValue {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `½ Σ a_n²` for raw Haar coefficients `a_n`.
pub fn rate_scalar_coeffs(raw: &[f64]) -> f64 {
    0.5 * raw.iter().map(|a| a * a).sum::<f64>()
}

/// `½ Σ_j (f(t_{j+1}) − f(t_j))² 2^J`, the energy of the piecewise-linear interpolant.
pub fn rate_scalar_fd(samples: &[f64], level: u32) -> f64 {
    let scale = (1u64 << level) as f64;
    0.5 * samples
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2))
        .sum::<f64>()
        * scale
}

fn check_channels(found: usize, spec: &Spectrum) -> Result<()> {
    if found == spec.channels() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "input has {found} channels, spectrum has {}",
            spec.channels()
        )))
    }
}

/// `I(F)` from coefficients: channel `k` contributes `(1/λ_k) ½ Σ_n a_{n,k}²`.
pub fn rate_total(coeffs: &CoeffMatrix, spec: &Spectrum) -> Result<RateValue> {
    check_channels(coeffs.channels(), spec)?;
    let per_channel: Vec<f64> = (0..spec.channels())
        .map(|k| ratio_conv(rate_scalar_coeffs(&coeffs.raw_column(k)), spec.lambda(k)))
        .collect();
    Ok(RateValue {
        value: per_channel.iter().sum(),
        per_channel,
    })
}

/// `I(F)` from samples: `½ Σ_j ‖ΔF_j‖²_{H₀} 2^J`.
pub fn rate_path(path: &DyadicPath, spec: &Spectrum) -> Result<RateValue> {
    check_channels(path.channels(), spec)?;
    let per_channel: Vec<f64> = (0..spec.channels())
        .map(|k| {
            ratio_conv(
                rate_scalar_fd(&path.channel_values(k), path.level()),
                spec.lambda(k),
            )
        })
        .collect();
    Ok(RateValue {
        value: per_channel.iter().sum(),
        per_channel,
    })
}

/// `½ Σ_j h0_energy(ΔF_j) 2^J`, summed over time first.
pub fn rate_path_h0(path: &DyadicPath, spec: &Spectrum) -> Result<f64> {
    check_channels(path.channels(), spec)?;
    let scale = (1u64 << path.level()) as f64;
    let mut total = 0.0;
    for j in 1..path.rows() {
        let inc: Vec<f64> = path
            .row(j)
            .iter()
            .zip(path.row(j - 1))
            .map(|(a, b)| a - b)
            .collect();
        total += h0_energy_slice(&inc, spec.lambdas());
    }
    Ok(0.5 * total * scale)
}
