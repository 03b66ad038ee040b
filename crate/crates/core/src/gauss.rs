//! Standard normal tails in log space and the normal quantile.
//!
//! `erfc` comes from `libm`, a port of the FreeBSD/Sun rational
//! approximations with error below 1 ulp on its whole range. Past the point
//! where `erfc` leaves the normal range the scaled complement
//! `erfcx(z) = e^{z²} erfc(z)` is evaluated by its continued fraction.

#![allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

/// `erfc(z)` is evaluated directly below this argument.
const ERFC_DIRECT_MAX: f64 = 25.0;
/// Depth of the backward continued-fraction evaluation; at `z >= 25` the
/// truncation error is far below one ulp.
const CF_DEPTH: usize = 40;

/// `e^{z²} erfc(z)` for `z >= 25` by the Laplace continued fraction
/// `1/(√π (z + (1/2)/(z + 1/(z + (3/2)/(z + …)))))`.
fn erfcx_large(z: f64) -> f64 {
    let mut f = z;
    for i in (1..=CF_DEPTH).rev() {
        f = z + (i as f64 * 0.5) / f;
    }
    1.0 / (std::f64::consts::PI.sqrt() * f)
}

/// Upper tail `Q(x) = P(Z > x)`.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `Φ(x) = P(Z <= x)`.
pub fn norm_cdf(x: f64) -> f64 {
    norm_sf(-x)
}

/// `log Q(x)`, accurate in the far upper tail (no underflow).
pub fn log_norm_sf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if x < 0.0 {
        return (-norm_sf(-x)).ln_1p();
    }
    let z = x * FRAC_1_SQRT_2;
    if z < ERFC_DIRECT_MAX {
        (0.5 * libm::erfc(z)).ln()
    } else {
        -0.5 * x * x + erfcx_large(z).ln() - LN_2
    }
}

/// `log Φ(x)`.
pub fn log_norm_cdf(x: f64) -> f64 {
    log_norm_sf(-x)
}

/// `log(Φ(b) − Φ(a))` for `a < b`; `−∞` when the interval is empty.
///
/// Both endpoints in the same tail are handled by factoring out the larger
/// tail mass, so intervals far from the origin keep full relative accuracy.
pub fn log_norm_interval(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        return f64::NAN;
    }
    if a >= b {
        return f64::NEG_INFINITY;
    }
    if a >= 0.0 {
        same_tail(a, b)
    } else if b <= 0.0 {
        same_tail(-b, -a)
    } else {
        (-(norm_sf(b) + norm_sf(-a))).ln_1p()
    }
}

/// `log(Q(lo) − Q(hi))` for `0 <= lo < hi`.
fn same_tail(lo: f64, hi: f64) -> f64 {
    let l_lo = log_norm_sf(lo);
    let l_hi = log_norm_sf(hi);
    if l_hi == f64::NEG_INFINITY {
        return l_lo;
    }
    l_lo + (-(l_hi - l_lo).exp_m1()).ln()
}

/// Normal quantile `Φ^{-1}(p)` for `p ∈ (0,1)` (Wichura's AS 241, PPND16;
/// relative accuracy about 1e−16).
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p < 0.5 {
        quantile_split(p - 0.5, p)
    } else {
        quantile_split(p - 0.5, 1.0 - p)
    }
}

/// AS 241 with the tail mass `min(p, 1−p)` supplied exactly by the caller.
pub(crate) fn quantile_split(q: f64, tail: f64) -> f64 {
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((r * 2509.080_928_730_122_7 + 33430.575_583_588_128) * r
                + 67265.770_927_008_7)
                * r
                + 45921.953_931_549_87)
                * r
                + 13731.693_765_509_461)
                * r
                + 1971.590_950_306_551_4)
                * r
                + 133.141_667_891_784_38)
                * r
                + 3.387_132_872_796_366_5)
            / (((((((r * 5226.495_278_852_546 + 28729.085_735_721_943) * r
                + 39307.895_800_092_71)
                * r
                + 21213.794_301_586_596)
                * r
                + 5394.196_021_424_751)
                * r
                + 687.187_007_492_057_9)
                * r
                + 42.313_330_701_600_91)
                * r
                + 1.0);
    }
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((r * 7.745_450_142_783_414e-4 + 0.022_723_844_989_269_184) * r
            + 0.241_780_725_177_450_6)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_545)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((r * 1.050_750_071_644_416_9e-9 + 5.475_938_084_995_345e-4) * r
                + 0.015_198_666_563_616_457)
                * r
                + 0.148_103_976_427_480_08)
                * r
                + 0.689_767_334_985_1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((r * 2.010_334_399_292_288_1e-7 + 2.711_555_568_743_487_6e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103)
            / (((((((r * 2.044_263_103_389_939_7e-15 + 1.421_511_758_316_446e-7) * r
                + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_133e-4)
                * r
                + 0.014_875_361_290_850_615)
                * r
                + 0.136_929_880_922_735_8)
                * r
                + 0.599_832_206_555_888)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}
