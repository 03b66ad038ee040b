//! Diagonal trace-class covariance operators at finite channel truncation.

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};

/// Eigenvalue law of the covariance operator in its eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DecayLaw {
    /// `λ_k = lambda0 · ratio^k`.
    Geometric { lambda0: f64, ratio: f64 },
    /// `λ_k = lambda0 / (k+1)^exponent`.
    Power { lambda0: f64, exponent: f64 },
    /// A finite list; eigenvalues beyond its end are zero.
    Explicit { values: Vec<f64> },
}

impl DecayLaw {
    fn validate(&self) -> Result<()> {
        match self {
            DecayLaw::Geometric { lambda0, ratio } => {
                if !(lambda0.is_finite() && *lambda0 > 0.0) {
                    return Err(config(format!(
                        "geometric lambda0 must be positive, got {lambda0}"
                    )));
                }
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(config(format!(
                        "geometric ratio must lie in (0,1), got {ratio}"
                    )));
                }
            }
            DecayLaw::Power { lambda0, exponent } => {
                if !(lambda0.is_finite() && *lambda0 > 0.0) {
                    return Err(config(format!(
                        "power lambda0 must be positive, got {lambda0}"
                    )));
                }
                if !(exponent.is_finite() && *exponent > 1.0) {
                    return Err(config(format!(
                        "power exponent must be > 1, got {exponent}"
                    )));
                }
            }
            DecayLaw::Explicit { values } => {
                if values.is_empty() {
                    return Err(config("explicit spectrum needs at least one eigenvalue"));
                }
                if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(config(format!(
                        "explicit eigenvalues must be finite and >= 0, got {bad}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Eigenvalue `λ_k` for any `k`, extrapolating the law past the truncation.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        match self {
            DecayLaw::Geometric { lambda0, ratio } => lambda0 * ratio.powi(k as i32),
            DecayLaw::Power { lambda0, exponent } => lambda0 * ((k + 1) as f64).powf(-exponent),
            DecayLaw::Explicit { values } => values.get(k).copied().unwrap_or(0.0),
        }
    }

    /// Upper bound on `Σ_{k >= from} λ_k`.
    pub fn tail_sum(&self, from: usize) -> f64 {
        match self {
            DecayLaw::Geometric { ratio, .. } => self.eigenvalue(from) / (1.0 - ratio),
            DecayLaw::Power { lambda0, exponent } => {
                // Σ_{j > from} j^{-p} <= (from+1)^{-p} + ∫_{from+1}^∞ x^{-p} dx
                let m = (from + 1) as f64;
                lambda0 * (m.powf(-exponent) + m.powf(1.0 - exponent) / (exponent - 1.0))
            }
            DecayLaw::Explicit { values } => values.iter().skip(from).sum(),
        }
    }
}

/// Eigenvalues `λ_0..λ_{K−1}` of `Q` together with the law that generated them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    lambdas: Vec<f64>,
    law: DecayLaw,
    trace: f64,
}

/// Builds a spectrum with `channels` eigenvalues from `law`.
///
/// An explicit list fixes the channel count; `channels` must then equal its length.
pub fn make_spectrum(law: DecayLaw, channels: usize) -> Result<Spectrum> {
    law.validate()?;
    if channels == 0 {
        return Err(config("channel count K must be >= 1"));
    }
    if let DecayLaw::Explicit { values } = &law {
        if values.len() != channels {
            return Err(config(format!(
                "explicit spectrum has {} eigenvalues but K = {channels}",
                values.len()
            )));
        }
    }
    let lambdas: Vec<f64> = (0..channels).map(|k| law.eigenvalue(k)).collect();
    let trace = lambdas.iter().sum();
    Ok(Spectrum {
        lambdas,
        law,
        trace,
    })
}

impl Spectrum {
    /// Spectrum of a scalar standard Brownian motion.
    pub fn scalar(lambda: f64) -> Result<Self> {
        make_spectrum(
            DecayLaw::Explicit {
                values: vec![lambda],
            },
            1,
        )
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        let k = values.len();
        make_spectrum(DecayLaw::Explicit { values }, k)
    }

    pub fn channels(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.lambdas[k]
    }

    pub fn law(&self) -> &DecayLaw {
        &self.law
    }

    /// Trace of the truncated operator.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// Upper bound on the trace of the untruncated operator implied by the law.
    pub fn full_trace_bound(&self) -> f64 {
        self.trace + self.law.tail_sum(self.channels())
    }

    /// Errors when the extrapolated trace exceeds `budget`.
    pub fn check_trace_budget(&self, budget: f64) -> Result<()> {
        let t = self.full_trace_bound();
        if t > budget {
            Err(config(format!(
                "extrapolated trace {t} exceeds budget {budget}"
            )))
        } else {
            Ok(())
        }
    }

    pub fn lambda_max(&self) -> f64 {
        // laws are nonincreasing except explicit lists, and the tail never exceeds the head
        self.lambdas.iter().copied().fold(0.0, f64::max)
    }

    /// Same law with every eigenvalue multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let law = match &self.law {
            DecayLaw::Geometric { lambda0, ratio } => DecayLaw::Geometric {
                lambda0: lambda0 * factor,
                ratio: *ratio,
            },
            DecayLaw::Power { lambda0, exponent } => DecayLaw::Power {
                lambda0: lambda0 * factor,
                exponent: *exponent,
            },
            DecayLaw::Explicit { values } => DecayLaw::Explicit {
                values: values.iter().map(|v| v * factor).collect(),
            },
        };
        make_spectrum(law, self.channels())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.channels() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "vector has {len} coordinates, spectrum has {}",
                self.channels()
            )))
        }
    }
}

/// A vector of `H` in eigenbasis coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HVector(pub Vec<f64>);

/// Which side of the cutoff [`project`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Head,
    Tail,
}

impl HVector {
    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    /// Unit vector `e_i` in `K` coordinates.
    pub fn unit(i: usize, k: usize) -> Self {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &HVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// `Σ_k u_k²/λ_k` with `c/0 = ∞` for `c > 0` and `0/0 = 0`.
pub fn h0_energy(u: &HVector, spec: &Spectrum) -> Result<f64> {
    spec.check_len(u.len())?;
    Ok(h0_energy_slice(&u.0, spec.lambdas()))
}

pub(crate) fn h0_energy_slice(u: &[f64], lambdas: &[f64]) -> f64 {
    u.iter()
        .zip(lambdas)
        .map(|(&x, &l)| ratio_conv(x * x, l))
        .sum()
}

/// `num/den` under the conventions `c/0 = ∞` (c > 0) and `0/0 = 0`.
pub(crate) fn ratio_conv(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// `P_k` (head: keep coordinates `< k`) or `R_k` (tail: keep coordinates `>= k`).
pub fn project(v: &HVector, cutoff: usize, side: Side) -> Result<HVector> {
    if cutoff > v.len() {
        return Err(domain(format!(
            "cutoff {cutoff} out of range 0..={}",
            v.len()
        )));
    }
    let out =
        v.0.iter()
            .enumerate()
            .map(|(i, &x)| match side {
                Side::Head if i < cutoff => x,
                Side::Tail if i >= cutoff => x,
                _ => 0.0,
            })
            .collect();
    Ok(HVector(out))
}
