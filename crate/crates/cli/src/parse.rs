//! Command-line value syntax: complex numbers as `a+bi`, grids as
//! `start:stop:count`.

use num_complex::Complex64;

/// Parses `a`, `bi`, `a+bi` or `a-bi`, with optional spaces and exponents.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse {text:?} as a complex number (expected a+bi)");
    let Some(body) = s.strip_suffix('i') else {
        return real(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // the split is the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { 0.0 } else { real(re_part).ok_or_else(bad)? };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other).ok_or_else(bad)?,
    };
    Ok(Complex64::new(re, im))
}

fn real(s: &str) -> Option<f64> {
    let lower = s.to_ascii_lowercase();
    if lower.contains("inf") || lower.contains("nan") {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Expands `start:stop:count`, geometrically unless `linear` is set.
pub fn parse_grid(text: &str, linear: bool) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("grid {text:?} is not start:stop:count"));
    };
    let start = real(a).ok_or_else(|| format!("bad grid start {a:?}"))?;
    let stop = real(b).ok_or_else(|| format!("bad grid stop {b:?}"))?;
    let count: usize = n.parse().map_err(|_| format!("bad grid count {n:?}"))?;
    if count == 0 {
        return Err("grid count must be positive".into());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if !linear && !(start > 0.0 && stop > 0.0) {
        return Err("geometric grids need positive endpoints (use --linear)".into());
    }
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let f = i as f64 / last;
            if i + 1 == count {
                stop
            } else if linear {
                start + (stop - start) * f
            } else {
                start * (stop / start).powf(f)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.3i").unwrap(), c(0.5, 0.3));
        assert_eq!(parse_complex(" 0.5 - 0.3i ").unwrap(), c(0.5, -0.3));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1+i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex("-1E+2-3.5e-2i").unwrap(), c(-100.0, -0.035));
        for bad in ["", "abc", "1+2", "1+2j", "inf", "1+nani", "0.5++1i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g = parse_grid("1e-3:0.3:24", false).unwrap();
        assert_eq!(g.len(), 24);
        assert_eq!((g[0], g[23]), (1e-3, 0.3));
        assert!((g[1] / g[0] - g[2] / g[1]).abs() < 1e-12);
        assert_eq!(parse_grid("0:1:5", true).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.2:0.4:1", false).unwrap(), vec![0.2]);
        for bad in ["1:2", "a:1:2", "1:2:0", "0:1:3"] {
            assert!(parse_grid(bad, false).is_err(), "{bad}");
        }
    }
}
