use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CMatrix;

fn token(v: &Complex64) -> String {
    let sign = if v.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}j", v.re, sign, v.im.abs())
}

/// One matrix row per line, whitespace-separated `re+imj` tokens.
pub fn to_text(m: &CMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let line: Vec<String> = (0..m.ncols()).map(|c| token(&m[(r, c)])).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn parse_token(t: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex token `{t}`"));
    let body = t.strip_suffix('j').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    // split at the last sign that is not the leading one or an exponent sign
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn from_text(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<Complex64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(parse_token).collect())
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_exact() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, -0.0),
                Complex64::new(-2.5e-17, 3.0),
                Complex64::new(1e300, -1e-300),
                Complex64::new(-0.1, 0.2),
            ],
        );
        let text = to_text(&m);
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("1.0-0.0j "));
        assert_eq!(from_text(&text).unwrap(), m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(from_text("1+2j 3").is_err());
        assert!(from_text("1+2j\n1+2j 3+4j").is_err());
        assert!(from_text("abc+1j").is_err());
    }
}
