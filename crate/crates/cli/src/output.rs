use std::fs;
use std::io::Write;
use std::path::Path;

use orbit_designs::linalg::RealVector;
use orbit_designs::Result;
use serde::Serialize;

/// Plain decimal with 17 significant digits, enough to round-trip an f64.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn points_csv(points: &[RealVector], dim: usize) -> String {
    let mut out = (1..=dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for p in points {
        out.push_str(&p.iter().map(|&x| fmt17(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            -1.0 / 3.0,
            1e-20,
            12345.678901234567,
            2f64.sqrt(),
            9.999999999999999e-5,
        ] {
            let s = fmt17(x);
            assert!(!s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt17(0.0), "0");
        assert_eq!(fmt17(0.5), "0.50000000000000000");
    }

    #[test]
    fn csv_header() {
        let pts = vec![RealVector::from_vec(vec![1.0, 0.0])];
        assert_eq!(points_csv(&pts, 2), "x1,x2\n1.0000000000000000,0\n");
    }
}
