//! Command-line flags, the optional JSON config file, and their merge into a
//! fully resolved [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwiener_ldp::ldp::GrowthLaw;
use qwiener_ldp::{DecayLaw, HolderExponent};
use serde::Deserialize;

use crate::error::{usage, CliResult};

pub const DEFAULT_ALPHA: f64 = 0.4;
pub const DEFAULT_LEVEL: u32 = 8;
pub const DEFAULT_CHANNELS: usize = 4;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MC_PATHS: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "qwldp",
    version,
    about = "Ciesielski transforms, Q-Wiener simulation and small-noise LDP checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON file with default values; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Hölder exponent α in (0,1).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// geometric:LAMBDA0:RATIO, power:LAMBDA0:EXPONENT or explicit:L0,L1,...
    #[arg(long, global = true)]
    pub spectrum: Option<String>,
    /// Dyadic grid level J.
    #[arg(long = "J", global = true)]
    pub level: Option<u32>,
    /// Coefficient truncation N (a power of two).
    #[arg(long = "N", global = true)]
    pub count: Option<usize>,
    /// Channel truncation K.
    #[arg(long = "K", global = true)]
    pub channels: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of simulated paths M.
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Basis functions.
    #[command(subcommand)]
    Basis(BasisCommand),
    /// Forward or inverse Ciesielski transform of a file.
    #[command(subcommand)]
    Transform(TransformCommand),
    /// Simulate Q-Wiener paths.
    Simulate,
    /// Rate function of a sampled path.
    Rate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rate infimum over a coefficient ball.
    BallInf(BallArgs),
    /// Exact and Monte Carlo ε log P over an ε grid.
    LdpCurve {
        #[command(flatten)]
        ball: BallArgs,
        /// `2^-3..2^-14` or a comma list such as `0.25,1/8,2^-4`.
        #[arg(long)]
        eps: Option<String>,
        /// Run Monte Carlo for every ε at or above this value.
        #[arg(long = "mc-upto")]
        mc_upto: Option<String>,
    },
    /// Monte Carlo check of the exponential tightness bound.
    Tightness {
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        eps: Option<String>,
        /// geometric:RATIO or power:EXPONENT for the divergent weights c_k.
        #[arg(long)]
        growth: Option<String>,
    },
    /// Run the built-in verification battery.
    Verify,
}

#[derive(Debug, Clone, Subcommand)]
pub enum BasisCommand {
    /// Evaluate χ_n, φ_n and c_n(α) at a point.
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum TransformCommand {
    /// Path CSV to coefficient CSV.
    Forward {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Coefficient CSV to path CSV on the level-J grid.
    Inverse {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    /// Path CSV (`t,ch0,...`) or coefficient CSV (`n,k_level,...`).
    #[arg(long)]
    pub center: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
}

/// Values accepted in the `--config` file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub spectrum: Option<DecayLaw>,
    #[serde(rename = "J")]
    pub level: Option<u32>,
    #[serde(rename = "N")]
    pub count: Option<usize>,
    #[serde(rename = "K")]
    pub channels: Option<usize>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub delta: Option<f64>,
    pub eps: Option<String>,
    pub mc_upto: Option<String>,
    pub a: Option<f64>,
    pub growth: Option<GrowthLaw>,
    pub format: Option<Format>,
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub spectrum: DecayLaw,
    /// True when `K` came from the user or an explicit spectrum.
    pub channels_fixed: bool,
    pub channels: usize,
    pub level: Option<u32>,
    pub count: Option<usize>,
    pub seed: u64,
    pub paths: Option<usize>,
    pub delta: Option<f64>,
    pub eps_grid: Option<Vec<f64>>,
    pub mc_upto: Option<f64>,
    pub a: Option<f64>,
    pub growth: Option<GrowthLaw>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn holder(&self) -> CliResult<HolderExponent> {
        Ok(HolderExponent::new(self.alpha)?)
    }

    pub fn level_or_default(&self) -> u32 {
        self.level.unwrap_or(DEFAULT_LEVEL)
    }

    pub fn ldp_holder(&self) -> CliResult<HolderExponent> {
        Ok(HolderExponent::for_ldp(self.alpha)?)
    }
}

/// Parses `geometric:λ0:q`, `power:λ0:p` or `explicit:v0,v1,...`.
pub fn parse_spectrum(s: &str) -> CliResult<DecayLaw> {
    let bad = || usage(format!("cannot parse spectrum '{s}'"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let nums = |t: &str, sep: char| -> CliResult<Vec<f64>> {
        t.split(sep)
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    };
    match kind {
        "geometric" | "power" => {
            let v = nums(rest, ':')?;
            if v.len() != 2 {
                return Err(bad());
            }
            Ok(if kind == "geometric" {
                DecayLaw::Geometric {
                    lambda0: v[0],
                    ratio: v[1],
                }
            } else {
                DecayLaw::Power {
                    lambda0: v[0],
                    exponent: v[1],
                }
            })
        }
        "explicit" => Ok(DecayLaw::Explicit {
            values: nums(rest, ',')?,
        }),
        _ => Err(bad()),
    }
}

pub fn parse_growth(s: &str) -> CliResult<GrowthLaw> {
    let bad = || usage(format!("cannot parse growth law '{s}'"));
    let (kind, v) = s.split_once(':').ok_or_else(bad)?;
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    match kind {
        "geometric" => Ok(GrowthLaw::Geometric { ratio: v }),
        "power" => Ok(GrowthLaw::Power { exponent: v }),
        _ => Err(bad()),
    }
}

/// A number written as a decimal, `p/q` or `2^e`.
pub fn parse_scalar(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let bad = || usage(format!("cannot parse number '{s}'"));
    if let Some(e) = s.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| bad())?;
        return Ok(f64::from(e).exp2());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        return Ok(p / q);
    }
    s.parse().map_err(|_| bad())
}

/// `2^a..2^b` (every integer exponent from a to b) or a comma list of scalars.
pub fn parse_eps_grid(s: &str) -> CliResult<Vec<f64>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let exp = |t: &str| -> CliResult<i32> {
            t.trim()
                .strip_prefix("2^")
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| usage(format!("eps range '{s}' must look like 2^-3..2^-14")))
        };
        let (a, b) = (exp(lo)?, exp(hi)?);
        let step = if b >= a { 1 } else { -1 };
        let mut out = Vec::new();
        let mut e = a;
        loop {
            out.push(f64::from(e).exp2());
            if e == b {
                break;
            }
            e += step;
        }
        return Ok(out);
    }
    s.split(',').map(parse_scalar).collect()
}

fn read_file_config(path: &std::path::Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::error::CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Resolves defaults, the config file and the flags of `cli`, in increasing priority.
pub fn resolve(cli: &Cli) -> CliResult<RunConfig> {
    let g = &cli.global;
    let file = match &g.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };
    let alpha = g.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA);
    let spectrum = match &g.spectrum {
        Some(s) => parse_spectrum(s)?,
        None => file.spectrum.clone().unwrap_or(DecayLaw::Geometric {
            lambda0: 0.5,
            ratio: 0.5,
        }),
    };
    let requested_k = g.channels.or(file.channels);
    let (channels, channels_fixed) = match (&spectrum, requested_k) {
        (DecayLaw::Explicit { values }, Some(k)) if k != values.len() => {
            return Err(usage(format!(
                "--K {k} conflicts with an explicit spectrum of {} eigenvalues",
                values.len()
            )))
        }
        (DecayLaw::Explicit { values }, _) => (values.len(), true),
        (_, Some(k)) => (k, true),
        (_, None) => (DEFAULT_CHANNELS, false),
    };

    let (mut delta, mut eps, mut mc_upto, mut a, mut growth) = (
        file.delta,
        file.eps.clone(),
        file.mc_upto.clone(),
        file.a,
        file.growth,
    );
    match &cli.command {
        Command::BallInf(b) => delta = b.delta.or(delta),
        Command::LdpCurve {
            ball,
            eps: e,
            mc_upto: m,
        } => {
            delta = ball.delta.or(delta);
            eps = e.clone().or(eps);
            mc_upto = m.clone().or(mc_upto);
        }
        Command::Tightness {
            a: aa,
            eps: e,
            growth: gr,
        } => {
            a = aa.or(a);
            eps = e.clone().or(eps);
            if let Some(s) = gr {
                growth = Some(parse_growth(s)?);
            }
        }
        _ => {}
    }
    let rc = RunConfig {
        alpha,
        spectrum,
        channels_fixed,
        channels,
        level: g.level.or(file.level),
        count: g.count.or(file.count),
        seed: g.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        paths: g.paths.or(file.paths),
        delta,
        eps_grid: eps.as_deref().map(parse_eps_grid).transpose()?,
        mc_upto: mc_upto.as_deref().map(parse_scalar).transpose()?,
        a,
        growth,
        format: g.format.or(file.format),
        out: g.out.clone(),
    };
    rc.holder()?;
    if matches!(
        cli.command,
        Command::BallInf(_) | Command::LdpCurve { .. } | Command::Tightness { .. }
    ) {
        rc.ldp_holder()?;
    }
    Ok(rc)
}

/// Parses an argument vector (program name first) into the command and its configuration.
pub fn from_args<I, T>(args: I) -> CliResult<(Command, RunConfig)>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    let rc = resolve(&cli)?;
    Ok((cli.command, rc))
}
