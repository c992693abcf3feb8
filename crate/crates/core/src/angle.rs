//! Angle tokens: exact multiples of π (`pi/8`, `-3pi/4`) where the value is
//! reproduced bit for bit, otherwise a 17-significant-digit decimal.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_DENOMINATOR: i64 = 64;
const MAX_NUMERATOR: i64 = 4096;

fn pi_multiple(p: i64, q: i64) -> f64 {
    p as f64 * PI / q as f64
}

/// Returns `(p, q)` with `p π / q` bit-identical to `x`, smallest `q` first.
pub fn as_pi_fraction(x: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    for q in 1..=MAX_DENOMINATOR {
        let p = (x * q as f64 / PI).round();
        if p.abs() > MAX_NUMERATOR as f64 {
            continue;
        }
        let p = p as i64;
        if pi_multiple(p, q).to_bits() == x.to_bits() {
            return Some((p, q));
        }
    }
    None
}

pub fn format_angle(x: f64) -> String {
    match as_pi_fraction(x) {
        Some((0, _)) => "0".to_string(),
        Some((p, q)) => {
            let num = match p {
                1 => "pi".to_string(),
                -1 => "-pi".to_string(),
                _ => format!("{p}pi"),
            };
            if q == 1 {
                num
            } else {
                format!("{num}/{q}")
            }
        }
        None => format!("{x:.16e}"),
    }
}

/// Parses `pi`, `-pi/8`, `3pi/8`, `3*pi/8` or a plain decimal.
pub fn parse_angle(token: &str) -> Result<f64> {
    let t = token.trim();
    let err = || Error::Parse { location: "angle".into(), message: format!("bad angle `{token}`") };
    if let Some(idx) = t.find("pi") {
        let head = t[..idx].trim().trim_end_matches('*').trim();
        let tail = t[idx + 2..].trim();
        let p: i64 = match head {
            "" | "+" => 1,
            "-" => -1,
            h => h.parse().map_err(|_| err())?,
        };
        let q: i64 = if tail.is_empty() {
            1
        } else {
            let d = tail.strip_prefix('/').ok_or_else(err)?.trim();
            d.parse().map_err(|_| err())?
        };
        if q <= 0 {
            return Err(err());
        }
        return Ok(pi_multiple(p, q));
    }
    let v: f64 = t.parse().map_err(|_| err())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err())
    }
}
