//! Text syntax for parameter grids and sweep spec files.
//!
//! A grid value is one of
//!
//! * a comma-separated list: `1.5, 2, 5`
//! * an inclusive integer range: `3..64`
//! * `lin(start, stop, count)` or `log(start, stop, count)`, endpoints
//!   included
//!
//! A spec file holds one `key = grid` assignment per line; `#` starts a
//! comment. Keys are `m`, `M`, `n_s`, `eta`, `n_b` (long aliases `bins`,
//! `modes`, `signal_photons`, `background_photons` are accepted) plus an
//! optional integer `cap`. A later assignment to the same key replaces the
//! earlier one.

use crate::error::{Error, Result};
use crate::scenario::{SweepSpec, DEFAULT_SWEEP_CAP};

const MAX_GRID_POINTS: u64 = 10_000_000;

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn parse_real(token: &str) -> Result<f64> {
    let t = token.trim();
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => parse_err(format!("`{t}` is not a finite number")),
    }
}

fn spaced(args: &str, log: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != 3 {
        return parse_err(format!("expected (start, stop, count), got ({args})"));
    }
    let start = parse_real(parts[0])?;
    let stop = parse_real(parts[1])?;
    let count = parts[2].trim().parse::<u64>().map_err(|_| {
        Error::Parse(format!("grid count `{}` is not a non-negative integer", parts[2].trim()))
    })?;
    if count == 0 || count > MAX_GRID_POINTS {
        return parse_err(format!("grid count must be in 1..={MAX_GRID_POINTS}, got {count}"));
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return parse_err("log grid endpoints must be positive");
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let (a, b) = if log { (start.log10(), stop.log10()) } else { (start, stop) };
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                stop
            } else if i == 0 {
                start
            } else {
                let x = a + i as f64 * step;
                if log {
                    10f64.powf(x)
                } else {
                    x
                }
            }
        })
        .collect())
}

fn function_call<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    let rest = text.strip_prefix(name)?.trim_start();
    rest.strip_prefix('(')?.strip_suffix(')')
}

/// Parses a real-valued grid.
pub fn parse_real_grid(text: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    if t.is_empty() {
        return parse_err("empty grid");
    }
    if let Some(args) = function_call(t, "lin") {
        return spaced(args, false);
    }
    if let Some(args) = function_call(t, "log") {
        return spaced(args, true);
    }
    if t.contains("..") {
        return parse_count_grid(t).map(|v| v.into_iter().map(|x| x as f64).collect());
    }
    t.split(',').map(parse_real).collect()
}

/// Parses a grid of non-negative integers. `lin`/`log` points are rounded
/// to the nearest integer and duplicates dropped.
pub fn parse_count_grid(text: &str) -> Result<Vec<u64>> {
    let t = text.trim();
    if let Some((lo, hi)) = t.split_once("..") {
        let lo = parse_count(lo)?;
        let hi = parse_count(hi)?;
        if hi < lo {
            return parse_err(format!("empty range {t}"));
        }
        if hi - lo >= MAX_GRID_POINTS {
            return parse_err(format!("range {t} has too many points"));
        }
        return Ok((lo..=hi).collect());
    }
    if function_call(t, "lin").is_some() || function_call(t, "log").is_some() {
        let mut out: Vec<u64> = Vec::new();
        for x in parse_real_grid(t)? {
            let r = x.round();
            if r < 0.0 || r > u64::MAX as f64 {
                return parse_err(format!("grid point {x} is not a valid count"));
            }
            let r = r as u64;
            if out.last() != Some(&r) {
                out.push(r);
            }
        }
        return Ok(out);
    }
    if t.is_empty() {
        return parse_err("empty grid");
    }
    t.split(',').map(parse_count).collect()
}

fn parse_count(token: &str) -> Result<u64> {
    let t = token.trim();
    if let Ok(n) = t.parse::<u64>() {
        return Ok(n);
    }
    // allow 1e6 style literals when they are exact integers
    match t.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => parse_err(format!("`{t}` is not a non-negative integer")),
    }
}

/// Grid of `u32` values (bin counts).
pub fn parse_bins_grid(text: &str) -> Result<Vec<u32>> {
    parse_count_grid(text)?
        .into_iter()
        .map(|n| u32::try_from(n).map_err(|_| Error::Parse(format!("bin count {n} too large"))))
        .collect()
}

#[derive(Debug, Default)]
struct SpecBuilder {
    m: Option<Vec<u32>>,
    big_m: Option<Vec<u64>>,
    n_s: Option<Vec<f64>>,
    eta: Option<Vec<f64>>,
    n_b: Option<Vec<f64>>,
    cap: Option<usize>,
}

impl SpecBuilder {
    fn assign(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" | "bins" => self.m = Some(parse_bins_grid(value)?),
            "M" | "modes" | "big_m" => self.big_m = Some(parse_count_grid(value)?),
            "n_s" | "signal_photons" => self.n_s = Some(parse_real_grid(value)?),
            "eta" => self.eta = Some(parse_real_grid(value)?),
            "n_b" | "background_photons" => self.n_b = Some(parse_real_grid(value)?),
            "cap" => {
                let cap = parse_count(value)?;
                self.cap = Some(usize::try_from(cap).map_err(|_| Error::Parse("cap too large".into()))?);
            }
            other => return parse_err(format!("unknown sweep key `{other}`")),
        }
        Ok(())
    }

    fn build(self) -> Result<SweepSpec> {
        let missing: Vec<&str> = [
            ("m", self.m.is_none()),
            ("M", self.big_m.is_none()),
            ("n_s", self.n_s.is_none()),
            ("eta", self.eta.is_none()),
            ("n_b", self.n_b.is_none()),
        ]
        .iter()
        .filter(|(_, absent)| *absent)
        .map(|(k, _)| *k)
        .collect();
        if !missing.is_empty() {
            return parse_err(format!("sweep spec is missing {}", missing.join(", ")));
        }
        Ok(SweepSpec {
            m: self.m.unwrap_or_default(),
            big_m: self.big_m.unwrap_or_default(),
            n_s: self.n_s.unwrap_or_default(),
            eta: self.eta.unwrap_or_default(),
            n_b: self.n_b.unwrap_or_default(),
            cap: self.cap.unwrap_or(DEFAULT_SWEEP_CAP),
        })
    }
}

/// Parses `key = grid` lines into a [`SweepSpec`].
pub fn parse_sweep_spec<'a, I>(lines: I) -> Result<SweepSpec>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut builder = SpecBuilder::default();
    for (n, raw) in lines.into_iter().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = values`, got `{line}`", n + 1)))?;
        builder
            .assign(key.trim(), value.trim())
            .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
    }
    builder.build()
}
