//! Number formatting and the small argument grammars: angles, purity grids
//! and coordinate triples.

use std::f64::consts::PI;

/// Plain decimal with 15 significant digits; exponent form outside `[1e-4, 1e6)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (14 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.14e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Parses an angle. A trailing `pi` (or `π`) makes the number a multiple of
/// pi (`0.25pi`, `-pi`, `pi`); `pi/8` is accepted too. Anything else is
/// read as radians.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let bad = || format!("cannot read angle '{text}'");
    if let Some(den) = t.strip_prefix("pi/").or_else(|| t.strip_prefix("π/")) {
        let d: f64 = den.trim().parse().map_err(|_| bad())?;
        return Ok(PI / d);
    }
    let stripped = t.strip_suffix("pi").or_else(|| t.strip_suffix("π"));
    let value = match stripped {
        Some(m) => {
            let m = m.trim().trim_end_matches('*');
            let factor = match m {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => m.parse::<f64>().map_err(|_| bad())?,
            };
            factor * PI
        }
        None => t.parse::<f64>().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// `x,y,z` with each entry in angle syntax.
pub fn parse_coords(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated angles, got '{text}'"));
    }
    Ok([parse_angle(parts[0])?, parse_angle(parts[1])?, parse_angle(parts[2])?])
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("cannot read grid '{text}'")))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(format!("grid '{text}' is not start:stop:step"));
    };
    if !(step > 0.0) || stop < start {
        return Err(format!("grid '{text}' needs step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| (start + k as f64 * step).min(stop)).collect())
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}
