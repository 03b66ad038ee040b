//! Forward and inverse Ciesielski transform on dyadic grids, the two sequence
//! norms, and the grid Hölder seminorm.

use serde::{Deserialize, Serialize};

use crate::basis::{schauder_peak, weights, HolderExponent};
use crate::error::{domain, Error, Result};

/// Multichannel path sampled on the level-`J` dyadic grid, starting at 0.
///
/// `samples` is row-major with `2^J + 1` rows and `K` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicPath {
    level: u32,
    channels: usize,
    samples: Vec<f64>,
}

impl DyadicPath {
    pub fn new(level: u32, channels: usize, samples: Vec<f64>) -> Result<Self> {
        if channels == 0 {
            return Err(domain("path needs at least one channel"));
        }
        if level > 30 {
            return Err(domain(format!("level {level} too large")));
        }
        let rows = (1usize << level) + 1;
        if samples.len() != rows * channels {
            return Err(Error::Shape(format!(
                "level {level} with {channels} channels needs {} samples, got {}",
                rows * channels,
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(domain(format!("non-finite sample at row {}", i / channels)));
        }
        if samples[..channels].iter().any(|&x| x != 0.0) {
            return Err(domain("path must start at 0"));
        }
        Ok(Self {
            level,
            channels,
            samples,
        })
    }

    pub fn zeros(level: u32, channels: usize) -> Self {
        let rows = (1usize << level) + 1;
        Self {
            level,
            channels,
            samples: vec![0.0; rows * channels],
        }
    }

    /// Samples `t ↦ f(t)` (one value per channel) on the grid.
    pub fn from_fn(level: u32, channels: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let rows = (1usize << level) + 1;
        let mut samples = Vec::with_capacity(rows * channels);
        for j in 0..rows {
            let v = f(grid_time(level, j));
            if v.len() != channels {
                return Err(Error::Shape(format!(
                    "f returned {} values, expected {channels}",
                    v.len()
                )));
            }
            samples.extend(v);
        }
        Self::new(level, channels, samples)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn rows(&self) -> usize {
        (1usize << self.level) + 1
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `⟨F(j/2^J), e_k⟩`.
    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.samples[j * self.channels + k]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.samples[j * self.channels..(j + 1) * self.channels]
    }

    /// Channel `k` as a scalar path.
    pub fn channel(&self, k: usize) -> DyadicPath {
        let samples = (0..self.rows()).map(|j| self.at(j, k)).collect();
        DyadicPath {
            level: self.level,
            channels: 1,
            samples,
        }
    }

    pub fn channel_values(&self, k: usize) -> Vec<f64> {
        (0..self.rows()).map(|j| self.at(j, k)).collect()
    }
}

/// Time of grid point `j` at level `J`; exact in binary floating point.
pub fn grid_time(level: u32, j: usize) -> f64 {
    j as f64 / (1u64 << level) as f64
}

/// Raw and α-scaled Haar coefficients, `N × K` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffMatrix {
    count: usize,
    channels: usize,
    alpha: HolderExponent,
    raw: Vec<f64>,
    scaled: Vec<f64>,
}

impl CoeffMatrix {
    /// Builds from raw coefficients `∫χ_n dF_k`; `count` must be a power of two.
    pub fn from_raw(
        count: usize,
        channels: usize,
        alpha: HolderExponent,
        raw: Vec<f64>,
    ) -> Result<Self> {
        check_shape(count, channels, raw.len())?;
        let c = weights(count, alpha);
        let scaled = raw
            .iter()
            .enumerate()
            .map(|(i, &r)| c[i / channels] * r)
            .collect();
        Ok(Self {
            count,
            channels,
            alpha,
            raw,
            scaled,
        })
    }

    /// Builds from weighted coefficients `c_n(α)∫χ_n dF_k`.
    pub fn from_scaled(
        count: usize,
        channels: usize,
        alpha: HolderExponent,
        scaled: Vec<f64>,
    ) -> Result<Self> {
        check_shape(count, channels, scaled.len())?;
        let c = weights(count, alpha);
        let raw = scaled
            .iter()
            .enumerate()
            .map(|(i, &s)| s / c[i / channels])
            .collect();
        // keep the invariant scaled == weight * raw exactly
        let mut m = Self {
            count,
            channels,
            alpha,
            raw,
            scaled,
        };
        m.rescale();
        Ok(m)
    }

    pub fn zeros(count: usize, channels: usize, alpha: HolderExponent) -> Result<Self> {
        Self::from_raw(count, channels, alpha, vec![0.0; count * channels])
    }

    fn rescale(&mut self) {
        let c = weights(self.count, self.alpha);
        for (i, s) in self.scaled.iter_mut().enumerate() {
            *s = c[i / self.channels] * self.raw[i];
        }
    }

    /// Number of basis indices `N`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn alpha(&self) -> HolderExponent {
        self.alpha
    }

    /// `log2 N`.
    pub fn level(&self) -> u32 {
        self.count.trailing_zeros()
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn scaled(&self) -> &[f64] {
        &self.scaled
    }

    pub fn raw_at(&self, n: usize, k: usize) -> f64 {
        self.raw[n * self.channels + k]
    }

    pub fn scaled_at(&self, n: usize, k: usize) -> f64 {
        self.scaled[n * self.channels + k]
    }

    pub fn raw_row(&self, n: usize) -> &[f64] {
        &self.raw[n * self.channels..(n + 1) * self.channels]
    }

    pub fn scaled_row(&self, n: usize) -> &[f64] {
        &self.scaled[n * self.channels..(n + 1) * self.channels]
    }

    pub fn raw_column(&self, k: usize) -> Vec<f64> {
        (0..self.count).map(|n| self.raw_at(n, k)).collect()
    }

    /// Same raw coefficients weighted with a different exponent.
    pub fn with_alpha(&self, alpha: HolderExponent) -> Self {
        let mut m = self.clone();
        m.alpha = alpha;
        m.rescale();
        m
    }
}

fn check_shape(count: usize, channels: usize, len: usize) -> Result<()> {
    if count == 0 || !count.is_power_of_two() {
        return Err(domain(format!(
            "coefficient count {count} is not a power of two"
        )));
    }
    if channels == 0 {
        return Err(domain("coefficient matrix needs at least one channel"));
    }
    if len != count * channels {
        return Err(Error::Shape(format!(
            "expected {} entries, got {len}",
            count * channels
        )));
    }
    Ok(())
}

/// Haar coefficients of `path` for `0 <= n < 2^J`.
///
/// `n = 0` gives `F(1) − F(0)`; `n = 2^k + l` uses the second difference
/// `√2^k [2F(mid) − F(right) − F(left)]` on the support of `χ_n`.
pub fn forward(path: &DyadicPath, alpha: HolderExponent) -> CoeffMatrix {
    let big_j = path.level();
    let count = 1usize << big_j;
    let kk = path.channels();
    let mut raw = vec![0.0; count * kk];
    let last = count;
    for (k, r) in raw.iter_mut().take(kk).enumerate() {
        *r = path.at(last, k) - path.at(0, k);
    }
    for level in 0..big_j {
        let scale = (level as f64 / 2.0).exp2();
        // grid step of half a support at this level, in level-J index units
        let half = 1usize << (big_j - level - 1);
        for shift in 0..(1usize << level) {
            let n = (1usize << level) + shift;
            let left = 2 * shift * half;
            let mid = left + half;
            let right = mid + half;
            for k in 0..kk {
                raw[n * kk + k] =
                    scale * (2.0 * path.at(mid, k) - path.at(right, k) - path.at(left, k));
            }
        }
    }
    CoeffMatrix::from_raw(count, kk, alpha, raw).expect("shape is consistent by construction")
}

/// Synthesizes `Σ_{n<N} raw_n φ_n` on the level-`out_level` grid.
pub fn inverse(coeffs: &CoeffMatrix, out_level: u32) -> Result<DyadicPath> {
    let base = coeffs.level();
    if out_level < base {
        return Err(domain(format!(
            "output level {out_level} cannot resolve {} coefficients (needs >= {base})",
            coeffs.count()
        )));
    }
    if out_level > 30 {
        return Err(domain(format!("output level {out_level} too large")));
    }
    let kk = coeffs.channels();
    let rows = (1usize << out_level) + 1;
    let mut samples = vec![0.0; rows * kk];
    let stride = 1usize << (out_level - base);
    let last = rows - 1;
    for k in 0..kk {
        samples[last * kk + k] = coeffs.raw_at(0, k);
    }
    // coarse-to-fine midpoint refinement: tents at coarser levels are linear on finer cells
    for level in 0..base {
        let peak = schauder_peak(1usize << level);
        let span = stride << (base - level);
        for shift in 0..(1usize << level) {
            let n = (1usize << level) + shift;
            let left = shift * span;
            let right = left + span;
            let mid = left + span / 2;
            for k in 0..kk {
                let lin = 0.5 * (samples[left * kk + k] + samples[right * kk + k]);
                samples[mid * kk + k] = lin + coeffs.raw_at(n, k) * peak;
            }
        }
    }
    if stride > 1 {
        for cell in 0..(1usize << base) {
            let left = cell * stride;
            let right = left + stride;
            for j in (left + 1)..right {
                let w = (j - left) as f64 / stride as f64;
                for k in 0..kk {
                    samples[j * kk + k] =
                        (1.0 - w) * samples[left * kk + k] + w * samples[right * kk + k];
                }
            }
        }
    }
    DyadicPath::new(out_level, kk, samples)
}

/// `sup_n ‖scaled row n‖_H`.
pub fn seq_norm_h(coeffs: &CoeffMatrix) -> f64 {
    (0..coeffs.count())
        .map(|n| {
            coeffs
                .scaled_row(n)
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// `sup_{n,k} |scaled[n][k]|`.
pub fn seq_norm_comp(coeffs: &CoeffMatrix) -> f64 {
    coeffs.scaled().iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Pair set used by [`dyadic_holder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HolderStrategy {
    /// Every pair of grid points.
    Exhaustive,
    /// Every pair at a dyadic lag `2^p` grid steps, i.e. pairs inside one
    /// cell or two adjacent cells of the matching scale.
    DyadicLags,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub value: f64,
    pub strategy: HolderStrategy,
}

/// Levels up to this use the exhaustive pair scan.
pub const EXHAUSTIVE_MAX_LEVEL: u32 = 7;

/// Grid α-Hölder seminorm, a lower bound on the seminorm of the interpolant.
pub fn dyadic_holder(path: &DyadicPath, alpha: HolderExponent) -> HolderEstimate {
    let strategy = if path.level() > EXHAUSTIVE_MAX_LEVEL {
        HolderStrategy::DyadicLags
    } else {
        HolderStrategy::Exhaustive
    };
    HolderEstimate {
        value: dyadic_holder_with(path, alpha, strategy),
        strategy,
    }
}

pub fn dyadic_holder_with(
    path: &DyadicPath,
    alpha: HolderExponent,
    strategy: HolderStrategy,
) -> f64 {
    let rows = path.rows();
    let h = grid_time(path.level(), 1);
    let a = alpha.value();
    let quotient = |s: usize, t: usize| -> f64 {
        let d: f64 = path
            .row(t)
            .iter()
            .zip(path.row(s))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        d / (((t - s) as f64) * h).powf(a)
    };
    let mut best = 0.0f64;
    match strategy {
        HolderStrategy::Exhaustive => {
            for s in 0..rows {
                for t in (s + 1)..rows {
                    best = best.max(quotient(s, t));
                }
            }
        }
        HolderStrategy::DyadicLags => {
            let mut lag = 1usize;
            while lag < rows {
                for s in 0..(rows - lag) {
                    best = best.max(quotient(s, s + lag));
                }
                lag <<= 1;
            }
        }
    }
    best
}

/// Upper bound `2/((2^α−1)(2^{1−α}−1))` on the norm of the inverse transform.
pub fn inverse_norm_bound(alpha: HolderExponent) -> f64 {
    let a = alpha.value();
    2.0 / ((a.exp2() - 1.0) * ((1.0 - a).exp2() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::schauder_eval;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn alpha(a: f64) -> HolderExponent {
        HolderExponent::new(a).unwrap()
    }

    fn linear_e1(level: u32, k: usize) -> DyadicPath {
        DyadicPath::from_fn(level, k, |t| {
            let mut v = vec![0.0; k];
            v[1] = t;
            v
        })
        .unwrap()
    }

    #[test]
    fn path_validation() {
        assert!(DyadicPath::new(1, 1, vec![0.0, 0.5, 1.0]).is_ok());
        assert!(matches!(
            DyadicPath::new(1, 1, vec![0.1, 0.5, 1.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            DyadicPath::new(1, 1, vec![0.0, 0.5]),
            Err(Error::Shape(_))
        ));
        assert!(DyadicPath::new(1, 1, vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(CoeffMatrix::from_raw(3, 1, alpha(0.4), vec![0.0; 3]).is_err());
    }

    #[test]
    fn linear_path_maps_to_first_unit_vector() {
        for level in [0, 3, 6] {
            let p = linear_e1(level, 3);
            let c = forward(&p, alpha(0.3));
            for n in 0..c.count() {
                for k in 0..3 {
                    let expect = if n == 0 && k == 1 { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(c.raw_at(n, k), expect, epsilon = 1e-15);
                }
            }
            assert_abs_diff_eq!(seq_norm_h(&c), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(seq_norm_comp(&c), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(dyadic_holder(&p, alpha(0.3)).value, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_path_and_zero_coeffs() {
        let c = forward(&DyadicPath::zeros(4, 2), alpha(0.4));
        assert!(c.raw().iter().all(|&x| x == 0.0));
        assert_eq!(seq_norm_h(&c), 0.0);
        assert_eq!(
            dyadic_holder(&DyadicPath::zeros(4, 2), alpha(0.4)).value,
            0.0
        );
        let p = inverse(&c, 5).unwrap();
        assert!(p.samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn square_at_level_one() {
        let p = DyadicPath::from_fn(1, 1, |t| vec![t * t]).unwrap();
        let c = forward(&p, alpha(0.5));
        assert_eq!(c.raw(), &[1.0, -0.5]);
        // ∫ χ_1(t) 2t dt = 2(1/8) − 2(3/8) = −1/2
        let oracle = 2.0 * (0.125) - 2.0 * (0.5 - 0.125);
        assert_abs_diff_eq!(c.raw_at(1, 0), oracle, epsilon = 1e-15);
    }

    #[test]
    fn norm_examples() {
        let c = CoeffMatrix::from_scaled(2, 2, alpha(0.4), vec![3.0, 4.0, 5.0, 0.0]).unwrap();
        assert_abs_diff_eq!(seq_norm_h(&c), 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(seq_norm_comp(&c), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn scaled_is_weight_times_raw() {
        let a = alpha(0.25);
        let c = CoeffMatrix::from_scaled(8, 2, a, (0..16).map(|i| i as f64 * 0.37 - 2.0).collect())
            .unwrap();
        for n in 0..8 {
            for k in 0..2 {
                assert_eq!(
                    c.scaled_at(n, k),
                    crate::basis::weight(n, a) * c.raw_at(n, k)
                );
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let a = alpha(0.4);
        let c = CoeffMatrix::from_raw(4, 1, a, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let p = inverse(&c, 4).unwrap();
        for j in 0..p.rows() {
            assert_abs_diff_eq!(p.at(j, 0), grid_time(4, j), epsilon = 1e-15);
        }
        let c = CoeffMatrix::from_raw(2, 3, a, vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let p = inverse(&c, 1).unwrap();
        assert_eq!(p, linear_e1(1, 3));
        assert!(matches!(inverse(&c, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn inverse_matches_direct_schauder_sum() {
        let a = alpha(0.4);
        let raw: Vec<f64> = (0..16)
            .map(|i| ((i * 7919) % 13) as f64 / 6.0 - 1.0)
            .collect();
        let c = CoeffMatrix::from_raw(16, 1, a, raw.clone()).unwrap();
        let p = inverse(&c, 6).unwrap();
        for j in 0..p.rows() {
            let t = grid_time(6, j);
            let direct: f64 = (0..16).map(|n| raw[n] * schauder_eval(n, t).unwrap()).sum();
            assert_abs_diff_eq!(p.at(j, 0), direct, epsilon = 1e-13);
        }
    }

    #[test]
    fn inverse_bound_constant_at_one_third() {
        assert_abs_diff_eq!(
            inverse_norm_bound(alpha(1.0 / 3.0)),
            13.099_472_971_564_776,
            epsilon = 1e-10
        );
    }

    fn path_strategy(max_level: u32, max_k: usize) -> impl Strategy<Value = DyadicPath> {
        (0..=max_level, 1..=max_k).prop_flat_map(|(level, k)| {
            let rows = (1usize << level) + 1;
            prop::collection::vec(-5.0..5.0f64, (rows - 1) * k).prop_map(move |tail| {
                let mut s = vec![0.0; k];
                s.extend(tail);
                DyadicPath::new(level, k, s).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn roundtrip(p in path_strategy(7, 4), a in 0.05..0.95f64) {
            let c = forward(&p, alpha(a));
            let back = inverse(&c, p.level()).unwrap();
            for (x, y) in p.samples().iter().zip(back.samples()) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
            // and the other way round
            let again = forward(&back, alpha(a));
            for (x, y) in c.raw().iter().zip(again.raw()) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }

        #[test]
        fn forward_norm_bounded_by_holder(p in path_strategy(6, 3), a in 0.05..0.95f64) {
            let c = forward(&p, alpha(a));
            let h = dyadic_holder(&p, alpha(a)).value;
            prop_assert!(seq_norm_h(&c) <= h * (1.0 + 1e-12) + 1e-12);
            prop_assert!(seq_norm_comp(&c) <= seq_norm_h(&c) + 1e-15);
        }

        #[test]
        fn linear_and_channel_consistent(p in path_strategy(5, 3), s in -3.0..3.0f64, b in -3.0..3.0f64) {
            let a = alpha(0.35);
            let q = DyadicPath::new(p.level(), p.channels(),
                p.samples().iter().enumerate().map(|(i, x)| (x * 1.3 + i as f64 * 0.01) * (i >= p.channels()) as u8 as f64).collect()).unwrap();
            let combo = DyadicPath::new(p.level(), p.channels(),
                p.samples().iter().zip(q.samples()).map(|(x, y)| s * x + b * y).collect()).unwrap();
            let (cp, cq, cc) = (forward(&p, a), forward(&q, a), forward(&combo, a));
            for i in 0..cc.raw().len() {
                prop_assert!((cc.raw()[i] - (s * cp.raw()[i] + b * cq.raw()[i])).abs() <= 1e-12 * (1.0 + cc.raw()[i].abs()) * 8.0);
            }
            for k in 0..p.channels() {
                let single = forward(&p.channel(k), a);
                prop_assert_eq!(single.raw().to_vec(), cp.raw_column(k));
            }
        }

        #[test]
        fn dyadic_lags_bracket_exhaustive(p in path_strategy(6, 2), a in 0.1..0.9f64) {
            let ex = dyadic_holder_with(&p, alpha(a), HolderStrategy::Exhaustive);
            let dy = dyadic_holder_with(&p, alpha(a), HolderStrategy::DyadicLags);
            prop_assert!(dy <= ex * (1.0 + 1e-12));
            prop_assert!(ex <= dy / (1.0 - (-a).exp2()) * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn square_holder_exhaustive_level_four() {
        let p = DyadicPath::from_fn(4, 1, |t| vec![t * t]).unwrap();
        let a = alpha(0.5);
        let est = dyadic_holder(&p, a);
        assert_eq!(est.strategy, HolderStrategy::Exhaustive);
        // independent brute force over all pairs
        let mut best = 0.0f64;
        for s in 0..=16 {
            for t in (s + 1)..=16 {
                let (x, y) = (s as f64 / 16.0, t as f64 / 16.0);
                best = best.max((y * y - x * x).abs() / (y - x).sqrt());
            }
        }
        assert_abs_diff_eq!(est.value, best, epsilon = 1e-14);
        // attained at (s, t) = (5/16, 1), above the endpoint pair (0, 1)
        assert_abs_diff_eq!(
            est.value,
            (21.0 / 16.0) * (11.0f64 / 16.0).sqrt(),
            epsilon = 1e-14
        );
        assert!(est.value > 1.0);
    }

    #[test]
    fn large_level_uses_dyadic_lags() {
        let p = linear_e1(9, 2);
        let est = dyadic_holder(&p, alpha(0.2));
        assert_eq!(est.strategy, HolderStrategy::DyadicLags);
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-14);
    }
}
