//! Counter-based Philox4x32-10 generator.
//!
//! Every standard normal draw is a pure function of
//! `(seed, path index, basis index n, channel k)`, so results do not depend
//! on how paths are scheduled across threads or in which order they are
//! requested.

use crate::gauss::quantile_split;

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

#[inline]
fn round(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(M0, ctr[0]);
    let (hi1, lo1) = mulhilo(M1, ctr[2]);
    [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]
}

/// One Philox4x32 block with 10 rounds.
pub fn philox4x32_10(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    ctr = round(ctr, key);
    for _ in 1..10 {
        key[0] = key[0].wrapping_add(W0);
        key[1] = key[1].wrapping_add(W1);
        ctr = round(ctr, key);
    }
    ctr
}

/// Keyed 64-bit output for the counter `(path, n, k)`.
pub fn bits(seed: u64, path: u64, n: u32, k: u32) -> u64 {
    let key = [seed as u32, (seed >> 32) as u32];
    let out = philox4x32_10([path as u32, (path >> 32) as u32, n, k], key);
    out[0] as u64 | ((out[1] as u64) << 32)
}

/// Uniform on the open interval (0,1) from the top 52 bits.
pub fn uniform_open(x: u64) -> f64 {
    ((x >> 12) as f64 + 0.5) * (-52f64).exp2()
}

/// Standard normal by inverse CDF of the 53-bit uniform `(m + 1/2)/2^53`.
///
/// The upper-tail complement `1 − u` is formed from the integer mantissa, so
/// both tails are resolved symmetrically.
pub fn normal_from_bits(x: u64) -> f64 {
    let m = x >> 11;
    let scale = (-53f64).exp2();
    // both quantities are exact: |m − 2^52| + 1/2 and the tail mass fit in 53 bits
    let q = ((m as i64 - (1i64 << 52)) as f64 + 0.5) * scale;
    let tail = if m < (1u64 << 52) {
        (m as f64 + 0.5) * scale
    } else {
        (((1u64 << 53) - m) as f64 - 0.5) * scale
    };
    quantile_split(q, tail)
}

/// The draw `N_{n,k}` of path `path` under `seed`.
pub fn standard_normal(seed: u64, path: u64, n: usize, k: usize) -> f64 {
    normal_from_bits(bits(seed, path, n as u32, k as u32))
}
