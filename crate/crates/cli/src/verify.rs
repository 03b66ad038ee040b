//! A reduced, deterministic run of the end-to-end checks. The report contains
//! no timings, so equal configurations give byte-equal output.

use qwiener_ldp::basis::weight;
use qwiener_ldp::ldp::{
    ball_infimum, exact_log_prob, mc_prob, tight_build, tight_check, BallSpec, GrowthLaw,
};
use qwiener_ldp::qwiener::{covariance_check, sample_path, sample_path_eigen, SimConfig};
use qwiener_ldp::rate::{rate_scalar_coeffs, rate_scalar_fd};
use qwiener_ldp::rng::standard_normal;
use qwiener_ldp::transform::inverse_norm_bound;
use qwiener_ldp::{
    dyadic_holder, forward, inverse, make_spectrum, seq_norm_h, CoeffMatrix, DecayLaw, DyadicPath,
    HVector, HolderExponent, Spectrum,
};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{num, object};

const DEFAULT_VERIFY_PATHS: usize = 20_000;

struct Check {
    name: &'static str,
    pass: bool,
    metric: f64,
    tolerance: f64,
}

fn random_path(seed: u64, index: u64, level: u32, channels: usize) -> DyadicPath {
    // a Gaussian random walk, so paths are rough at every scale
    let rows = (1usize << level) + 1;
    let mut samples = vec![0.0; rows * channels];
    for j in 1..rows {
        for k in 0..channels {
            samples[j * channels + k] =
                samples[(j - 1) * channels + k] + standard_normal(seed, index, j, k);
        }
    }
    DyadicPath::new(level, channels, samples).expect("starts at zero")
}

fn geometric(k: usize) -> Spectrum {
    make_spectrum(
        DecayLaw::Geometric {
            lambda0: 0.5,
            ratio: 0.5,
        },
        k,
    )
    .expect("valid law")
}

fn roundtrip(seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let p = random_path(seed, i, 8, 4);
        let alpha = HolderExponent::new(if i % 2 == 0 { 0.2 } else { 0.4 }).unwrap();
        let back = inverse(&forward(&p, alpha), 8).unwrap();
        for (a, b) in p.samples().iter().zip(back.samples()) {
            worst = worst.max((a - b).abs());
        }
    }
    Check {
        name: "roundtrip",
        pass: worst <= 1e-10,
        metric: worst,
        tolerance: 1e-10,
    }
}

fn norms(seed: u64) -> Check {
    let alpha = HolderExponent::new(1.0 / 3.0).unwrap();
    let line = DyadicPath::from_fn(6, 2, |t| vec![0.0, t]).unwrap();
    let exact = (seq_norm_h(&forward(&line, alpha)) - 1.0).abs()
        + (dyadic_holder(&line, alpha).value - 1.0).abs();
    let bound = inverse_norm_bound(alpha);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..50 {
        let raw: Vec<f64> = (0..64 * 2)
            .map(|j| standard_normal(seed ^ 0x5eed, i, j / 2, j % 2))
            .collect();
        let c = CoeffMatrix::from_raw(64, 2, alpha, raw).unwrap();
        let h = dyadic_holder(&inverse(&c, 6).unwrap(), alpha).value;
        worst = worst.max(h - bound * seq_norm_h(&c));
    }
    let pass = exact == 0.0 && worst <= 1e-9;
    Check {
        name: "isomorphism_norms",
        pass,
        metric: worst.max(exact),
        tolerance: 1e-9,
    }
}

fn parseval(seed: u64) -> Check {
    let alpha = HolderExponent::new(0.4).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let p = random_path(seed, 1000 + i, 8, 1);
        let fd = rate_scalar_fd(&p.channel_values(0), 8);
        let cf = rate_scalar_coeffs(forward(&p, alpha).raw());
        worst = worst.max((fd - cf).abs() / fd.max(1.0));
    }
    Check {
        name: "parseval_bridge",
        pass: worst <= 1e-9,
        metric: worst,
        tolerance: 1e-9,
    }
}

fn brute_force_infimum(b: &BallSpec) -> f64 {
    let kk = b.channels();
    let d = b.delta();
    let steps = 20_000;
    let mut total = 0.0;
    for (i, &f) in b.center().scaled().iter().enumerate() {
        let c = weight(i / kk, b.alpha());
        let lam = b.spec().lambda(i % kk);
        let best = (0..=steps)
            .map(|s| {
                let x = (f - d) + 2.0 * d * s as f64 / steps as f64;
                x * x
            })
            .fold(f64::INFINITY, f64::min);
        total += best / (2.0 * c * c * lam);
    }
    total
}

fn infimum(seed: u64) -> Check {
    let alpha = HolderExponent::new(0.4).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..10u64 {
        let u = |j: usize| {
            qwiener_ldp::rng::uniform_open(qwiener_ldp::rng::bits(seed, 5000 + i, j as u32, 0))
        };
        let center: Vec<f64> = (0..64).map(|j| 6.0 * u(j) - 3.0).collect();
        let delta = 0.05 + 0.95 * u(64);
        let b = BallSpec::new(
            CoeffMatrix::from_scaled(16, 4, alpha, center).unwrap(),
            delta,
            geometric(4),
        )
        .unwrap();
        let closed = ball_infimum(&b).value;
        worst = worst.max((closed - brute_force_infimum(&b)).abs() / closed);
    }
    Check {
        name: "ball_infimum",
        pass: worst <= 1e-6,
        metric: worst,
        tolerance: 1e-6,
    }
}

fn line_ball() -> BallSpec {
    let alpha = HolderExponent::new(0.4).unwrap();
    let line = DyadicPath::from_fn(6, 1, |t| vec![t]).unwrap();
    BallSpec::new(forward(&line, alpha), 0.2, Spectrum::scalar(1.0).unwrap()).unwrap()
}

fn multichannel_ball() -> BallSpec {
    let alpha = HolderExponent::new(0.4).unwrap();
    let p = DyadicPath::from_fn(6, 4, |t| vec![t, t * t, 0.0, 0.0]).unwrap();
    BallSpec::new(forward(&p, alpha), 0.1, geometric(4)).unwrap()
}

fn schilder() -> Check {
    let b = line_ball();
    let errs: Vec<f64> = (3..=14)
        .map(|m| {
            let eps = (-(m as f64)).exp2();
            (eps * exact_log_prob(&b, eps).unwrap().logp + 0.32).abs() / 0.32
        })
        .collect();
    let monotone = errs[3..].windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().unwrap();
    Check {
        name: "scalar_schilder",
        pass: monotone && last <= 0.05,
        metric: last,
        tolerance: 0.05,
    }
}

fn multichannel() -> Check {
    let b = multichannel_ball();
    let target = ball_infimum(&b).value;
    let eps = (-14f64).exp2();
    let err = (eps * exact_log_prob(&b, eps).unwrap().logp + target).abs() / target;
    Check {
        name: "multichannel_ldp",
        pass: err <= 0.05,
        metric: err,
        tolerance: 0.05,
    }
}

fn mc_agreement(seed: u64, paths: usize) -> CliResult<Check> {
    let alpha = HolderExponent::new(0.4).unwrap();
    let spec = Spectrum::scalar(1.0).unwrap();
    let b = BallSpec::new(CoeffMatrix::zeros(1, 1, alpha).unwrap(), 1.0, spec.clone())?;
    let cfg = SimConfig::new(spec, 0, alpha, seed, paths)?;
    let est = mc_prob(&b, 1.0, &cfg)?;
    let p = exact_log_prob(&b, 1.0)?.logp.exp();
    let z = (est.p_hat - p).abs() / est.stderr;
    Ok(Check {
        name: "mc_exact_agreement",
        pass: z <= 3.0,
        metric: z,
        tolerance: 3.0,
    })
}

fn covariance(seed: u64) -> CliResult<Check> {
    let alpha = HolderExponent::new(0.4).unwrap();
    let cfg = SimConfig::new(geometric(4), 3, alpha, seed, 2000)?;
    let (e0, e1) = (HVector::unit(0, 4), HVector::unit(1, 4));
    let cases = [
        (&e0, &e0, 1.0, 1.0),
        (&e0, &e1, 1.0, 1.0),
        (&e0, &e0, 0.5, 1.0),
    ];
    let mut worst: f64 = 0.0;
    for (v, w, s, t) in cases {
        worst = worst.max(covariance_check(&cfg, v, w, s, t)?.z_score());
    }
    Ok(Check {
        name: "covariance_identity",
        pass: worst <= 5.0,
        metric: worst,
        tolerance: 5.0,
    })
}

fn representation(seed: u64) -> CliResult<Check> {
    let cfg = SimConfig::new(geometric(4), 6, HolderExponent::new(0.4).unwrap(), seed, 10)?;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let a = sample_path(&cfg, i);
        let b = sample_path_eigen(&cfg, i);
        for (x, y) in a.samples().iter().zip(b.samples()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(Check {
        name: "representation_equality",
        pass: worst <= 1e-12,
        metric: worst,
        tolerance: 1e-12,
    })
}

fn tightness(seed: u64, paths: usize) -> CliResult<Check> {
    let alpha = HolderExponent::new(0.4).unwrap();
    let spec = make_spectrum(
        DecayLaw::Geometric {
            lambda0: 0.5,
            ratio: 0.5,
        },
        8,
    )?;
    let set = tight_build(
        1.0,
        &spec,
        GrowthLaw::Geometric {
            ratio: std::f64::consts::SQRT_2,
        },
        alpha,
        64,
    )?;
    let cfg = SimConfig::new(spec, 6, alpha, seed, paths)?;
    let report = tight_check(&set, &[0.25, 0.125], &cfg)?;
    let worst = report
        .points
        .iter()
        .map(|p| p.complement - p.bound - 3.0 * p.stderr)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Check {
        name: "tightness_bound",
        pass: report.all_pass(),
        metric: worst,
        tolerance: 0.0,
    })
}

pub fn verify(rc: &RunConfig) -> CliResult<Value> {
    let seed = rc.seed;
    let paths = rc.paths.unwrap_or(DEFAULT_VERIFY_PATHS);
    let checks = vec![
        roundtrip(seed),
        norms(seed),
        parseval(seed),
        infimum(seed),
        schilder(),
        multichannel(),
        mc_agreement(seed, paths)?,
        covariance(seed)?,
        representation(seed)?,
        tightness(seed, paths)?,
    ];
    let all = checks.iter().all(|c| c.pass);
    let items = checks
        .iter()
        .map(|c| {
            object([
                ("metric", num(c.metric)),
                ("name", Value::from(c.name)),
                ("pass", Value::from(c.pass)),
                ("tolerance", num(c.tolerance)),
            ])
        })
        .collect();
    Ok(object([
        ("all_pass", Value::from(all)),
        ("checks", Value::Array(items)),
        ("paths", Value::from(paths as u64)),
        ("seed", Value::from(seed)),
    ]))
}
