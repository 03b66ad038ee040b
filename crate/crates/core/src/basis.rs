//! Haar and Schauder functions on the unit interval and the Ciesielski weights.
//!
//! Index `n >= 1` decomposes uniquely as `n = 2^k + l` with `0 <= l < 2^k`;
//! `n = 0` is the constant Haar function (whose primitive is `t`).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Hölder exponent in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HolderExponent(f64);

impl HolderExponent {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(domain(format!("alpha must lie in (0,1), got {alpha}")))
        }
    }

    /// Exponent admissible for the small-noise results, which need `alpha < 1/2`.
    pub fn for_ldp(alpha: f64) -> Result<Self> {
        let a = Self::new(alpha)?;
        if alpha < 0.5 {
            Ok(a)
        } else {
            Err(domain("alpha must be < 1/2 for LDP commands"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_ldp_admissible(self) -> bool {
        self.0 < 0.5
    }
}

impl TryFrom<f64> for HolderExponent {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HolderExponent> for f64 {
    fn from(a: HolderExponent) -> f64 {
        a.0
    }
}

/// Dyadic position `(level, shift)` of a Haar index `n = 2^level + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub n: usize,
    pub level: u32,
    pub shift: usize,
}

impl BasisIndex {
    pub fn new(n: usize) -> Result<Self> {
        let (level, shift) = split_index(n)?;
        Ok(Self { n, level, shift })
    }
}

/// Splits `n >= 1` into `(k, l)` with `n = 2^k + l`, `0 <= l < 2^k`.
pub fn split_index(n: usize) -> Result<(u32, usize)> {
    if n == 0 {
        return Err(domain("constant index has no dyadic decomposition"));
    }
    let k = usize::BITS - 1 - n.leading_zeros();
    Ok((k, n - (1usize << k)))
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(domain(format!("t = {t} lies outside [0,1]")))
    }
}

/// Haar function `χ_n(t)`.
///
/// Positive on `[2l/2^{k+1}, (2l+1)/2^{k+1})`, negative on the closed right
/// half `[(2l+1)/2^{k+1}, (2l+2)/2^{k+1}]`, zero elsewhere.
pub fn haar_eval(n: usize, t: f64) -> Result<f64> {
    check_unit(t)?;
    if n == 0 {
        return Ok(1.0);
    }
    let (k, l) = split_index(n)?;
    let scale = (k as f64 / 2.0).exp2();
    let denom = (1u64 << (k + 1)) as f64;
    let left = (2 * l) as f64 / denom;
    let mid = (2 * l + 1) as f64 / denom;
    let right = (2 * l + 2) as f64 / denom;
    Ok(if left <= t && t < mid {
        scale
    } else if mid <= t && t <= right {
        -scale
    } else {
        0.0
    })
}

/// Schauder function `φ_n(t) = ∫_0^t χ_n`, evaluated in closed form.
pub fn schauder_eval(n: usize, t: f64) -> Result<f64> {
    check_unit(t)?;
    Ok(schauder_unchecked(n, t))
}

/// Closed-form tent; callers guarantee `t ∈ [0,1]`.
pub(crate) fn schauder_unchecked(n: usize, t: f64) -> f64 {
    if n == 0 {
        return t;
    }
    let k = usize::BITS - 1 - n.leading_zeros();
    let l = n - (1usize << k);
    let cells = (1u64 << k) as f64;
    // position inside the support, rescaled to [0,1]
    let u = t * cells - l as f64;
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    let peak = (-(k as f64) / 2.0 - 1.0).exp2();
    peak * (1.0 - (2.0 * u - 1.0).abs())
}

/// Peak value `sup_t |φ_n(t)|`.
pub fn schauder_peak(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let k = usize::BITS - 1 - n.leading_zeros();
    (-(k as f64) / 2.0 - 1.0).exp2()
}

/// Ciesielski weight `c_n(α)`: 1 for `n = 0`, else `2^{k(α−1/2)+α−1}`.
pub fn weight(n: usize, alpha: HolderExponent) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let k = (usize::BITS - 1 - n.leading_zeros()) as f64;
    level_weight(k as u32, alpha)
}

/// Weight shared by every index of dyadic level `k`.
pub fn level_weight(k: u32, alpha: HolderExponent) -> f64 {
    let a = alpha.value();
    (k as f64 * (a - 0.5) + a - 1.0).exp2()
}

/// Weights `c_0(α), …, c_{count−1}(α)`.
pub fn weights(count: usize, alpha: HolderExponent) -> Vec<f64> {
    (0..count).map(|n| weight(n, alpha)).collect()
}
