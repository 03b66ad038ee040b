//! One function per subcommand, each returning a JSON document and, where the
//! data is tabular, a CSV rendering.

use std::path::Path;

use qwiener_ldp::ldp::{
    ball_infimum, classify, ldp_curve, tight_build, tight_check, BallSpec, GrowthLaw, LDPCurve,
    McEstimate, McPlan,
};
use qwiener_ldp::qwiener::{sample_path, SimConfig};
use qwiener_ldp::rate::rate_path;
use qwiener_ldp::transform::grid_time;
use qwiener_ldp::{
    dyadic_holder, forward, haar_eval, inverse, make_spectrum, schauder_eval, seq_norm_comp,
    seq_norm_h, split_index, weight, CoeffMatrix, Spectrum,
};
use serde_json::Value;

use crate::config::{RunConfig, DEFAULT_MC_PATHS};
use crate::error::{usage, CliResult};
use crate::io;
use crate::report::{num, nums, object};

pub struct Output {
    pub doc: Value,
    pub csv: Option<String>,
}

impl Output {
    fn json(doc: Value) -> Self {
        Self { doc, csv: None }
    }
}

/// Spectrum with `K` taken from the input data when the user left it open.
pub fn spectrum_for(rc: &RunConfig, data_channels: Option<usize>) -> CliResult<Spectrum> {
    let k = match data_channels {
        Some(d) if rc.channels_fixed && d != rc.channels => {
            return Err(usage(format!(
                "input has {d} channels but K = {}",
                rc.channels
            )))
        }
        Some(d) => d,
        None => rc.channels,
    };
    Ok(make_spectrum(rc.spectrum.clone(), k)?)
}

/// Keeps the first `N` rows of `c` when `--N` is given.
fn truncate(c: CoeffMatrix, count: Option<usize>) -> CliResult<CoeffMatrix> {
    match count {
        None => Ok(c),
        Some(n) if n == c.count() => Ok(c),
        Some(n) if n > c.count() || !n.is_power_of_two() => Err(usage(format!(
            "N = {n} must be a power of two <= {}",
            c.count()
        ))),
        Some(n) => Ok(CoeffMatrix::from_raw(
            n,
            c.channels(),
            c.alpha(),
            c.raw()[..n * c.channels()].to_vec(),
        )?),
    }
}

fn mc_json(m: &Option<McEstimate>) -> Value {
    match m {
        None => Value::Null,
        Some(m) => object([
            ("hits", Value::from(m.hits)),
            ("p_hat", num(m.p_hat)),
            ("paths", Value::from(m.paths)),
            ("slack", num(m.slack)),
            ("stderr", num(m.stderr)),
        ]),
    }
}

pub fn curve_json(c: &LDPCurve) -> Value {
    let points = c
        .points
        .iter()
        .map(|p| {
            object([
                ("eps", num(p.eps)),
                ("eps_logp", num(p.eps_logp)),
                ("logp", num(p.logp)),
                ("mc", mc_json(&p.mc)),
                ("tail_bound", num(p.tail_bound)),
            ])
        })
        .collect();
    object([("points", Value::Array(points)), ("target", num(c.target))])
}

pub fn basis_eval(rc: &RunConfig, n: usize, t: f64) -> CliResult<Output> {
    let alpha = rc.holder()?;
    let (level, shift) = match split_index(n) {
        Ok((k, l)) => (Value::from(k), Value::from(l as u64)),
        Err(_) => (Value::Null, Value::Null),
    };
    Ok(Output::json(object([
        ("alpha", num(alpha.value())),
        ("haar", num(haar_eval(n, t)?)),
        ("k_level", level),
        ("l_shift", shift),
        ("n", Value::from(n as u64)),
        ("schauder", num(schauder_eval(n, t)?)),
        ("t", num(t)),
        ("weight", num(weight(n, alpha))),
    ])))
}

fn coeff_json(c: &CoeffMatrix) -> Value {
    let rows = (0..c.count())
        .map(|n| {
            object([
                ("raw", nums(c.raw_row(n))),
                ("scaled", nums(c.scaled_row(n))),
            ])
        })
        .collect();
    object([
        ("alpha", num(c.alpha().value())),
        ("channels", Value::from(c.channels() as u64)),
        ("count", Value::from(c.count() as u64)),
        ("rows", Value::Array(rows)),
        ("seq_norm_comp", num(seq_norm_comp(c))),
        ("seq_norm_h", num(seq_norm_h(c))),
    ])
}

pub fn transform_forward(rc: &RunConfig, input: &Path) -> CliResult<Output> {
    let path = io::read_path_csv(input)?;
    let c = truncate(forward(&path, rc.holder()?), rc.count)?;
    let holder = dyadic_holder(&path, rc.holder()?);
    let mut doc = coeff_json(&c);
    doc["holder"] = object([
        ("strategy", Value::from(format!("{:?}", holder.strategy))),
        ("value", num(holder.value)),
    ]);
    Ok(Output {
        doc,
        csv: Some(io::coeff_csv(&c)),
    })
}

fn path_json(p: &qwiener_ldp::DyadicPath) -> Value {
    let rows = (0..p.rows()).map(|j| nums(p.row(j))).collect();
    object([
        ("channels", Value::from(p.channels() as u64)),
        ("level", Value::from(p.level())),
        ("samples", Value::Array(rows)),
    ])
}

pub fn transform_inverse(rc: &RunConfig, input: &Path) -> CliResult<Output> {
    let c = truncate(io::read_coeff_csv(input, rc.holder()?)?, rc.count)?;
    let p = inverse(&c, rc.level.unwrap_or(c.level()))?;
    Ok(Output {
        doc: path_json(&p),
        csv: Some(io::path_csv(&p)),
    })
}

fn sim_config(
    rc: &RunConfig,
    spec: Spectrum,
    level: u32,
    count: usize,
    default_paths: usize,
) -> CliResult<SimConfig> {
    let cfg = SimConfig::new(
        spec,
        level,
        rc.holder()?,
        rc.seed,
        rc.paths.unwrap_or(default_paths),
    )?;
    Ok(cfg.with_count(count)?)
}

pub fn simulate(rc: &RunConfig) -> CliResult<Output> {
    let level = rc.level_or_default();
    let cfg = sim_config(
        rc,
        spectrum_for(rc, None)?,
        level,
        rc.count.unwrap_or(1usize << level),
        1,
    )?;
    let paths: Vec<_> = (0..cfg.paths as u64)
        .map(|i| sample_path(&cfg, i))
        .collect();
    let mut csv = String::from("path,t");
    for k in 0..cfg.channels() {
        csv.push_str(&format!(",ch{k}"));
    }
    csv.push('\n');
    for (i, p) in paths.iter().enumerate() {
        for j in 0..p.rows() {
            csv.push_str(&format!("{i},{}", grid_time(level, j)));
            for x in p.row(j) {
                csv.push_str(&format!(",{x}"));
            }
            csv.push('\n');
        }
    }
    let doc = object([
        ("count", Value::from(cfg.count as u64)),
        ("lambdas", nums(cfg.spectrum.lambdas())),
        ("paths", Value::Array(paths.iter().map(path_json).collect())),
        ("seed", Value::from(cfg.seed)),
    ]);
    Ok(Output {
        doc,
        csv: Some(csv),
    })
}

pub fn rate(rc: &RunConfig, input: &Path) -> CliResult<Output> {
    let path = io::read_path_csv(input)?;
    let spec = spectrum_for(rc, Some(path.channels()))?;
    let r = rate_path(&path, &spec)?;
    Ok(Output::json(object([
        ("finite", Value::from(r.is_finite())),
        ("per_channel", nums(&r.per_channel)),
        ("value", num(r.value)),
    ])))
}

fn ball(rc: &RunConfig, center: Option<&Path>, delta: Option<f64>) -> CliResult<BallSpec> {
    let alpha = rc.ldp_holder()?;
    let center = center.ok_or_else(|| usage("--center is required"))?;
    let delta = delta.ok_or_else(|| usage("--delta is required"))?;
    let c = truncate(io::read_center(center, alpha)?, rc.count)?;
    let spec = spectrum_for(rc, Some(c.channels()))?;
    Ok(BallSpec::new(c, delta, spec)?)
}

pub fn ball_inf(rc: &RunConfig, center: Option<&Path>) -> CliResult<Output> {
    let b = ball(rc, center, rc.delta)?;
    let inf = ball_infimum(&b);
    let part = classify(&b);
    let doc = object([
        ("alpha", num(b.alpha().value())),
        ("channels", Value::from(b.channels() as u64)),
        ("count", Value::from(b.count() as u64)),
        ("delta", num(b.delta())),
        ("finite", Value::from(inf.value.is_finite())),
        (
            "partition",
            object([
                ("lambda1", Value::from(part.sizes[0] as u64)),
                ("lambda2", Value::from(part.sizes[1] as u64)),
                ("lambda3", Value::from(part.sizes[2] as u64)),
                ("lambda4", Value::from(part.sizes[3] as u64)),
                ("outside_lambda3", Value::from(part.outside_lambda3 as u64)),
            ]),
        ),
        ("value", num(inf.value)),
    ]);
    Ok(Output {
        doc,
        csv: Some(io::coeff_csv(&inf.shrunk)),
    })
}

pub fn ldp_curve_cmd(rc: &RunConfig, center: Option<&Path>) -> CliResult<Output> {
    let b = ball(rc, center, rc.delta)?;
    let grid = match &rc.eps_grid {
        Some(g) => g.clone(),
        None => crate::config::parse_eps_grid("2^-3..2^-14")?,
    };
    let cfg = match rc.mc_upto {
        Some(_) => Some(sim_config(
            rc,
            b.spec().clone(),
            b.count().trailing_zeros(),
            b.count(),
            DEFAULT_MC_PATHS,
        )?),
        None => None,
    };
    let plan = cfg
        .as_ref()
        .zip(rc.mc_upto)
        .map(|(cfg, min_eps)| McPlan { cfg, min_eps });
    let curve = ldp_curve(&b, &grid, plan)?;
    Ok(Output {
        doc: curve_json(&curve),
        csv: Some(io::curve_csv(&curve)),
    })
}

pub const DEFAULT_GROWTH: GrowthLaw = GrowthLaw::Geometric {
    ratio: std::f64::consts::SQRT_2,
};

pub fn tightness(rc: &RunConfig) -> CliResult<Output> {
    let alpha = rc.ldp_holder()?;
    let a = rc.a.unwrap_or(1.0);
    let growth = rc.growth.unwrap_or(DEFAULT_GROWTH);
    let grid = match &rc.eps_grid {
        Some(g) => g.clone(),
        None => vec![0.25, 0.125],
    };
    let rows = rc.count.unwrap_or(1usize << rc.level_or_default());
    if !rows.is_power_of_two() {
        return Err(usage(format!("N = {rows} must be a power of two")));
    }
    let spec = spectrum_for(rc, None)?;
    let set = tight_build(a, &spec, growth, alpha, rows)?;
    let cfg = sim_config(rc, spec, rows.trailing_zeros(), rows, DEFAULT_MC_PATHS)?;
    let report = tight_check(&set, &grid, &cfg)?;
    let points = report
        .points
        .iter()
        .map(|p| {
            object([
                ("bound", num(p.bound)),
                ("complement", num(p.complement)),
                ("eps", num(p.eps)),
                ("misses", Value::from(p.misses)),
                ("pass", Value::from(p.pass)),
                ("stderr", num(p.stderr)),
                ("vacuous", Value::from(p.vacuous)),
            ])
        })
        .collect();
    let growth_json = match growth {
        GrowthLaw::Geometric { ratio } => {
            object([("kind", Value::from("geometric")), ("ratio", num(ratio))])
        }
        GrowthLaw::Power { exponent } => {
            object([("exponent", num(exponent)), ("kind", Value::from("power"))])
        }
    };
    Ok(Output::json(object([
        ("a", num(a)),
        ("all_pass", Value::from(report.all_pass())),
        ("beta", num(set.beta)),
        ("c", num(set.c)),
        ("c_tilde", num(set.c_tilde)),
        ("growth", growth_json),
        ("lambda_bar", num(set.lambda_bar)),
        ("paths", Value::from(report.paths)),
        ("points", Value::Array(points)),
        ("rows", Value::from(rows as u64)),
        ("weighted_trace", num(set.weighted_trace)),
    ])))
}
