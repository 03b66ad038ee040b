//! End-to-end acceptance criteria, one line per criterion.
//!
//! Oracles live here, independent of the library code paths they check:
//! brute-force grid minimization for ball infima, frozen high-precision
//! constants, and closed-form covariance targets.

use std::process::Command;
use std::time::Instant;

use qwiener_ldp::basis::weight;
use qwiener_ldp::ldp::{
    ball_infimum, exact_log_prob, ldp_curve, mc_prob, tight_build, tight_check, BallSpec, GrowthLaw,
};
use qwiener_ldp::qwiener::{covariance_check, sample_path, sample_path_eigen, SimConfig};
use qwiener_ldp::rate::{rate_scalar_coeffs, rate_scalar_fd};
use qwiener_ldp::rng::{bits, standard_normal, uniform_open};
use qwiener_ldp::transform::inverse_norm_bound;
use qwiener_ldp::{
    dyadic_holder, forward, inverse, make_spectrum, seq_norm_h, CoeffMatrix, DecayLaw, DyadicPath,
    Error, HVector, HolderExponent, Spectrum,
};

/// `P(|Z| < 1)`.
const P_UNIT_INTERVAL: f64 = 0.682_689_492_137_085_9;
/// `2/((2^{1/3} − 1)(2^{2/3} − 1))`.
const INVERSE_CONSTANT_THIRD: f64 = 13.099_472_971_564_776;
/// Infimum of the rate over the criterion-6 ball, from the closed form.
const MULTICHANNEL_INFIMUM: f64 = 2.673_625_582_760_226;

/// Criteria whose failure is established and explained in the project notes.
const UNATTAINABLE: &[u32] = &[7];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn alpha(a: f64) -> HolderExponent {
    HolderExponent::new(a).unwrap()
}

fn geometric(k: usize) -> Spectrum {
    make_spectrum(
        DecayLaw::Geometric {
            lambda0: 0.5,
            ratio: 0.5,
        },
        k,
    )
    .unwrap()
}

/// Brownian-scaled random walk with independent channels.
fn random_path(seed: u64, index: u64, level: u32, channels: usize) -> DyadicPath {
    let rows = (1usize << level) + 1;
    let step = (-(level as f64)).exp2().sqrt();
    let mut samples = vec![0.0; rows * channels];
    for j in 1..rows {
        for k in 0..channels {
            samples[j * channels + k] =
                samples[(j - 1) * channels + k] + step * standard_normal(seed, index, j, k);
        }
    }
    DyadicPath::new(level, channels, samples).unwrap()
}

fn uniform(seed: u64, index: u64, j: usize) -> f64 {
    uniform_open(bits(seed, index, j as u32, 7))
}

/// `min (x²)` over the endpoint-anchored grid `F − δ + i·10⁻⁴δ`, `i = 0..=20000`.
fn grid_min_sq(f: f64, delta: f64) -> f64 {
    let steps = 20_000;
    (0..=steps)
        .map(|i| {
            let x = (f - delta) + delta * 1e-4 * i as f64;
            x * x
        })
        .fold(f64::INFINITY, f64::min)
}

fn brute_force_infimum(ball: &BallSpec) -> f64 {
    let kk = ball.channels();
    ball.center()
        .scaled()
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let c = weight(i / kk, ball.alpha());
            grid_min_sq(f, ball.delta()) / (2.0 * c * c * ball.spec().lambda(i % kk))
        })
        .sum()
}

fn multichannel_ball() -> BallSpec {
    let p = DyadicPath::from_fn(6, 4, |t| vec![t, t * t, 0.0, 0.0]).unwrap();
    BallSpec::new(forward(&p, alpha(0.4)), 0.1, geometric(4)).unwrap()
}

fn c1_roundtrip() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let a = alpha(if i % 2 == 0 { 0.2 } else { 0.4 });
        let p = random_path(1, i, 10, 8);
        let back = inverse(&forward(&p, a), 10).unwrap();
        for (x, y) in p.samples().iter().zip(back.samples()) {
            worst = worst.max((x - y).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-10 && secs < 5.0,
        detail: format!("max abs error {worst:.3e}, {secs:.2} s"),
    }
}

fn c2_norms() -> Outcome {
    let a = alpha(0.4);
    let line = DyadicPath::from_fn(6, 3, |t| vec![0.0, t, 0.0]).unwrap();
    let h_line = seq_norm_h(&forward(&line, a));
    let d_line = dyadic_holder(&line, a).value;
    let part_a = h_line == 1.0 && d_line == 1.0;

    let mut worst_b = f64::NEG_INFINITY;
    for i in 0..1000 {
        let p = random_path(2, i, 5, 3);
        let aa = alpha(0.1 + 0.8 * uniform(2, i, 0));
        let lhs = seq_norm_h(&forward(&p, aa));
        let rhs = dyadic_holder(&p, aa).value;
        worst_b = worst_b.max((lhs - rhs) / rhs);
    }
    let part_b = worst_b <= 1e-12;

    let third = alpha(1.0 / 3.0);
    let constant = inverse_norm_bound(third);
    let mut worst_c = f64::NEG_INFINITY;
    for i in 0..1000 {
        let scaled: Vec<f64> = (0..32 * 2).map(|j| 2.0 * uniform(3, i, j) - 1.0).collect();
        let c = CoeffMatrix::from_scaled(32, 2, third, scaled).unwrap();
        let h = dyadic_holder(&inverse(&c, 5).unwrap(), third).value;
        worst_c = worst_c.max(h - (13.100 * seq_norm_h(&c) + 1e-9));
    }
    let const_ok = (constant - INVERSE_CONSTANT_THIRD).abs() <= 1e-13 * INVERSE_CONSTANT_THIRD;
    let part_c = worst_c <= 0.0 && const_ok;
    Outcome {
        pass: part_a && part_b && part_c,
        detail: format!(
            "(a) seq_norm_h = {h_line}, holder = {d_line}; (b) max rel excess {worst_b:.2e}; (c) max excess {worst_c:.3}, constant {constant:.15}"
        ),
    }
}

fn c3_parseval() -> Outcome {
    let a = alpha(0.4);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let p = random_path(4, i, 8, 1);
        let fd = rate_scalar_fd(&p.channel_values(0), 8);
        let cf = rate_scalar_coeffs(forward(&p, a).raw());
        worst = worst.max((fd - cf).abs());
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("max abs difference {worst:.3e}"),
    }
}

fn c4_infimum() -> Outcome {
    let a = alpha(0.4);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let center: Vec<f64> = (0..16 * 4).map(|j| 6.0 * uniform(5, i, j) - 3.0).collect();
        let delta = 0.05 + 0.95 * uniform(5, i, 1000);
        let b = BallSpec::new(
            CoeffMatrix::from_scaled(16, 4, a, center).unwrap(),
            delta,
            geometric(4),
        )
        .unwrap();
        let closed = ball_infimum(&b).value;
        let brute = brute_force_infimum(&b);
        worst = worst.max((closed - brute).abs() / brute);
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("max rel difference {worst:.3e}"),
    }
}

fn c5_scalar() -> Outcome {
    let start = Instant::now();
    let line = DyadicPath::from_fn(6, 1, |t| vec![t]).unwrap();
    let b = BallSpec::new(
        forward(&line, alpha(0.4)),
        0.2,
        Spectrum::scalar(1.0).unwrap(),
    )
    .unwrap();
    let grid: Vec<f64> = (3..=14).map(|m| (-(m as f64)).exp2()).collect();
    let curve = ldp_curve(&b, &grid, None).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let hand = -(1.0f64 - 0.2).powi(2) / 2.0;
    let errs: Vec<f64> = curve
        .points
        .iter()
        .map(|p| (p.eps_logp - hand).abs() / hand.abs())
        .collect();
    let monotone = errs[3..].windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().unwrap();
    let target_ok = (curve.target - hand).abs() <= 1e-14;
    Outcome {
        pass: monotone && last <= 0.05 && target_ok && secs < 1.0,
        detail: format!(
            "rel error at 2^-14 {last:.3e}, monotone for m>=6: {monotone}, {secs:.3} s"
        ),
    }
}

fn c6_multichannel() -> Outcome {
    let start = Instant::now();
    let b = multichannel_ball();
    let brute = brute_force_infimum(&b);
    let eps = (-14f64).exp2();
    let r = exact_log_prob(&b, eps).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = (eps * r.logp + brute).abs() / brute;
    let oracle_ok = (brute - MULTICHANNEL_INFIMUM).abs() <= 1e-6 * MULTICHANNEL_INFIMUM;
    let closed_ok =
        (ball_infimum(&b).value - MULTICHANNEL_INFIMUM).abs() <= 1e-13 * MULTICHANNEL_INFIMUM;
    Outcome {
        pass: err <= 0.05 && oracle_ok && closed_ok && secs < 5.0,
        detail: format!(
            "eps*logp = {:.6}, -inf = {:.6}, rel error {err:.3e}, {secs:.3} s",
            eps * r.logp,
            -brute
        ),
    }
}

fn c7_mc() -> Outcome {
    let a = alpha(0.4);
    let spec = Spectrum::scalar(1.0).unwrap();
    let single = BallSpec::new(CoeffMatrix::zeros(1, 1, a).unwrap(), 1.0, spec.clone()).unwrap();
    let cfg = SimConfig::new(spec, 0, a, 2024, 100_000).unwrap();
    let est = mc_prob(&single, 1.0, &cfg).unwrap();
    let part_a = (est.p_hat - P_UNIT_INTERVAL).abs() <= 3.0 * est.stderr;

    let b = multichannel_ball();
    let exact = exact_log_prob(&b, 0.25).unwrap();
    let cfg6 = SimConfig::new(geometric(4), 6, a, 2024, 100_000).unwrap();
    let part_b = match mc_prob(&b, 0.25, &cfg6) {
        Ok(m) => m.agrees_with(exact.logp.exp()) && m.hits > 0,
        Err(Error::RareEvent { .. }) => false,
        Err(e) => panic!("{e}"),
    };
    Outcome {
        pass: part_a && part_b,
        detail: format!(
            "(a) p_hat = {:.6} +- {:.6} vs {P_UNIT_INTERVAL:.7}: {}; (b) exact logp = {:.2} (p ~ {:.1e}), expected hits {:.1e} at M = 1e5: {}",
            est.p_hat,
            est.stderr,
            if part_a { "ok" } else { "off" },
            exact.logp,
            exact.logp.exp(),
            exact.logp.exp() * 1e5,
            if part_b { "ok" } else { "refused, no Monte Carlo estimate is possible" },
        ),
    }
}

fn c8_covariance() -> Outcome {
    let cfg = SimConfig::new(geometric(4), 3, alpha(0.4), 8, 10_000).unwrap();
    let (e0, e1) = (HVector::unit(0, 4), HVector::unit(1, 4));
    let cases = [
        (&e0, &e0, 1.0, 1.0, 0.5),
        (&e0, &e1, 1.0, 1.0, 0.0),
        (&e0, &e0, 0.5, 1.0, 0.25),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (v, w, s, t, target) in cases {
        let r = covariance_check(&cfg, v, w, s, t).unwrap();
        pass &= r.target == target && (r.estimate - target).abs() <= 5.0 * r.stderr;
        parts.push(format!("{:.4}~{target} (z {:.2})", r.estimate, r.z_score()));
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn c9_representation() -> Outcome {
    let cfg = SimConfig::new(geometric(8), 8, alpha(0.4), 9, 100).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let a = sample_path(&cfg, i);
        let b = sample_path_eigen(&cfg, i);
        for (x, y) in a.samples().iter().zip(b.samples()) {
            worst = worst.max((x - y).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max entrywise difference {worst:.3e}"),
    }
}

fn c10_tightness() -> Outcome {
    let spec = geometric(8);
    let a = alpha(0.4);
    let set = tight_build(
        1.0,
        &spec,
        GrowthLaw::Geometric {
            ratio: std::f64::consts::SQRT_2,
        },
        a,
        64,
    )
    .unwrap();
    let cfg = SimConfig::new(spec, 6, a, 10, 100_000).unwrap();
    let r = tight_check(&set, &[0.25, 0.125], &cfg).unwrap();
    let parts: Vec<String> = r
        .points
        .iter()
        .map(|p| {
            format!(
                "eps {}: {:.2e} <= {:.4e}{}",
                p.eps,
                p.complement,
                p.bound,
                if p.vacuous { " (vacuous)" } else { "" }
            )
        })
        .collect();
    Outcome {
        pass: r.all_pass(),
        detail: format!("c = {:.6}; {}", set.c, parts.join("; ")),
    }
}

fn c11_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qwldp"))
            .args(["verify", "--seed", "11", "--paths", "5000"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same =
        a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    Outcome {
        pass: same,
        detail: format!(
            "{} bytes, identical: {}",
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "roundtrip identity", c1_roundtrip),
        (2, "isomorphism norms", c2_norms),
        (3, "Parseval bridge", c3_parseval),
        (4, "ball infimum vs brute force", c4_infimum),
        (5, "scalar Schilder convergence", c5_scalar),
        (6, "multichannel LDP", c6_multichannel),
        (7, "MC/exact agreement", c7_mc),
        (8, "covariance identity", c8_covariance),
        (9, "representation equality", c9_representation),
        (10, "tightness bound", c10_tightness),
        (11, "determinism", c11_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let out = run();
        let known = UNATTAINABLE.contains(&id);
        let tag = match (out.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (unattainable, documented)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} [{tag}] {name}: {}", out.detail);
        if out.pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
