//! CSV formats for paths, coefficient matrices and LDP curves.

use std::path::Path;

use qwiener_ldp::ldp::LDPCurve;
use qwiener_ldp::{split_index, CoeffMatrix, DyadicPath, HolderExponent};

use crate::error::{usage, CliError, CliResult};

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn records(text: &str) -> CliResult<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| usage(format!("bad CSV header: {e}")))?
        .clone();
    let rows = rdr
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("bad CSV row: {e}")))?;
    Ok((header, rows))
}

fn field(rec: &csv::StringRecord, i: usize, row: usize) -> CliResult<f64> {
    let s = rec.get(i).unwrap_or("");
    let v: f64 = s
        .parse()
        .map_err(|_| usage(format!("row {row}: cannot parse '{s}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("row {row}: non-finite value '{s}'")))
    }
}

/// Whether the CSV text has the coefficient header.
pub fn is_coeff_csv(text: &str) -> bool {
    text.trim_start().starts_with("n,")
}

/// Parses `t,ch0,...,ch{K−1}` with `2^J + 1` rows on the grid `t_j = j/2^J`.
pub fn parse_path_csv(text: &str) -> CliResult<DyadicPath> {
    let (header, rows) = records(text)?;
    if header.get(0) != Some("t") || header.len() < 2 {
        return Err(usage("path CSV header must be t,ch0,..."));
    }
    let channels = header.len() - 1;
    let count = rows.len();
    if count < 2 || !(count - 1).is_power_of_two() {
        return Err(usage(format!("row count {count} is not 2^J + 1")));
    }
    let level = (count - 1).trailing_zeros();
    let mut times = Vec::with_capacity(count);
    for (j, rec) in rows.iter().enumerate() {
        if rec.len() != header.len() {
            return Err(usage(format!(
                "row {j}: expected {} fields, found {}",
                header.len(),
                rec.len()
            )));
        }
        let t = field(rec, 0, j)?;
        if times.last().is_some_and(|&last| t <= last) {
            return Err(usage(format!("non-monotone t at row {j}")));
        }
        times.push(t);
    }
    let mut samples = Vec::with_capacity(count * channels);
    for (j, rec) in rows.iter().enumerate() {
        let grid = j as f64 / (count - 1) as f64;
        if (times[j] - grid).abs() > 1e-12 {
            return Err(usage(format!(
                "row {j}: t = {} is not the grid point {grid}",
                times[j]
            )));
        }
        for k in 0..channels {
            samples.push(field(rec, k + 1, j)?);
        }
    }
    DyadicPath::new(level, channels, samples).map_err(|e| match e {
        qwiener_ldp::Error::Domain(m) | qwiener_ldp::Error::Shape(m) => usage(m),
        other => other.into(),
    })
}

pub fn read_path_csv(path: &Path) -> CliResult<DyadicPath> {
    parse_path_csv(&read_text(path)?)
}

pub fn path_csv(path: &DyadicPath) -> String {
    let mut out = String::from("t");
    for k in 0..path.channels() {
        out.push_str(&format!(",ch{k}"));
    }
    out.push('\n');
    for j in 0..path.rows() {
        out.push_str(&format!(
            "{}",
            qwiener_ldp::transform::grid_time(path.level(), j)
        ));
        for x in path.row(j) {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
    }
    out
}

/// Long format: one line per `(n, channel)`; `k_level` and `l_shift` are empty for `n = 0`.
pub fn coeff_csv(c: &CoeffMatrix) -> String {
    let mut out = String::from("n,k_level,l_shift,channel,raw,scaled\n");
    for n in 0..c.count() {
        let (k, l) = match split_index(n) {
            Ok((k, l)) => (k.to_string(), l.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        for ch in 0..c.channels() {
            out.push_str(&format!(
                "{n},{k},{l},{ch},{},{}\n",
                c.raw_at(n, ch),
                c.scaled_at(n, ch)
            ));
        }
    }
    out
}

/// Reads [`coeff_csv`] output; the scaled column must agree with `alpha`.
pub fn parse_coeff_csv(text: &str, alpha: HolderExponent) -> CliResult<CoeffMatrix> {
    let (header, rows) = records(text)?;
    let expected = ["n", "k_level", "l_shift", "channel", "raw", "scaled"];
    if header.iter().ne(expected.iter().copied()) {
        return Err(usage(
            "coefficient CSV header must be n,k_level,l_shift,channel,raw,scaled",
        ));
    }
    let mut entries = Vec::with_capacity(rows.len());
    let (mut count, mut channels) = (0usize, 0usize);
    for (r, rec) in rows.iter().enumerate() {
        let idx = |i: usize| -> CliResult<usize> {
            let s = rec.get(i).unwrap_or("");
            s.parse()
                .map_err(|_| usage(format!("row {r}: cannot parse index '{s}'")))
        };
        let (n, ch) = (idx(0)?, idx(3)?);
        count = count.max(n + 1);
        channels = channels.max(ch + 1);
        entries.push((n, ch, field(rec, 4, r)?, field(rec, 5, r)?));
    }
    if entries.len() != count * channels {
        return Err(usage(format!(
            "expected {} coefficient rows for N = {count}, K = {channels}",
            count * channels
        )));
    }
    let mut raw = vec![f64::NAN; count * channels];
    for &(n, ch, a, _) in &entries {
        raw[n * channels + ch] = a;
    }
    if raw.iter().any(|x| x.is_nan()) {
        return Err(usage("duplicate or missing coefficient entries"));
    }
    let c = CoeffMatrix::from_raw(count, channels, alpha, raw).map_err(|e| usage(e.to_string()))?;
    for &(n, ch, _, s) in &entries {
        let want = c.scaled_at(n, ch);
        if (want - s).abs() > 1e-9 * want.abs().max(1e-300) && (want - s).abs() > 1e-15 {
            return Err(usage(format!(
                "scaled coefficient at n = {n}, channel {ch} does not match alpha = {}",
                alpha.value()
            )));
        }
    }
    Ok(c)
}

pub fn read_coeff_csv(path: &Path, alpha: HolderExponent) -> CliResult<CoeffMatrix> {
    parse_coeff_csv(&read_text(path)?, alpha)
}

/// A ball center given either as path CSV (transformed at `alpha`) or as coefficient CSV.
pub fn read_center(path: &Path, alpha: HolderExponent) -> CliResult<CoeffMatrix> {
    let text = read_text(path)?;
    if is_coeff_csv(&text) {
        parse_coeff_csv(&text, alpha)
    } else {
        Ok(qwiener_ldp::forward(&parse_path_csv(&text)?, alpha))
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

pub fn curve_csv(curve: &LDPCurve) -> String {
    let mut out = String::from("eps,logp,tail_bound,eps_logp,mc_p,mc_stderr\n");
    for p in &curve.points {
        let (mp, ms) = match &p.mc {
            Some(m) => (num(m.p_hat), num(m.stderr)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{mp},{ms}\n",
            num(p.eps),
            num(p.logp),
            num(p.tail_bound),
            num(p.eps_logp)
        ));
    }
    out
}
