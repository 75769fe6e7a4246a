//! Complex literals: `x`, `yi`, `x+yi`, `x-yi`, where each part is a decimal
//! (`1.5`, `-2e-3`, `inf`) or a fraction (`-1/3`). `i` alone means `1i`.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed complex literal {literal:?}: {reason}")]
pub struct LiteralError {
    pub literal: String,
    pub reason: String,
}

fn fail(literal: &str, reason: impl Into<String>) -> LiteralError {
    LiteralError {
        literal: literal.to_string(),
        reason: reason.into(),
    }
}

/// Real number or fraction, with an optional leading sign.
pub fn parse_real(s: &str) -> Result<f64, LiteralError> {
    let t = s.trim();
    let value = match t.split_once('/') {
        Some((num, den)) => {
            let n = parse_decimal(num).ok_or_else(|| fail(s, "bad numerator"))?;
            let d = parse_decimal(den).ok_or_else(|| fail(s, "bad denominator"))?;
            if d == 0.0 {
                return Err(fail(s, "zero denominator"));
            }
            n / d
        }
        None => parse_decimal(t).ok_or_else(|| fail(s, "not a number"))?,
    };
    if value.is_nan() {
        return Err(fail(s, "NaN is not allowed"));
    }
    Ok(value)
}

fn parse_decimal(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() || s.contains('/') {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| !v.is_nan())
}

/// Index of the sign that separates the real and imaginary parts, if any.
fn split_point(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'/'))
}

pub fn parse_complex(s: &str) -> Result<C64, LiteralError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(fail(s, "empty"));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(parse_real(&t).map_err(|e| fail(s, e.reason))?, 0.0));
    };
    let imag = |part: &str| -> Result<f64, LiteralError> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => parse_real(p).map_err(|e| fail(s, e.reason)),
        }
    };
    match split_point(body) {
        Some(k) => {
            let re = parse_real(&body[..k]).map_err(|e| fail(s, e.reason))?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// Shortest representation that parses back to the same value.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
