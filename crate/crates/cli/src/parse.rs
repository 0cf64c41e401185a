//! Command-line value parsers.

use num_complex::Complex64;

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` (also with `j`). Exponents
/// such as `1e-3+2e-1i` are accepted.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let err = || format!("cannot parse complex number '{s}' (expected a+bi)");
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return match t.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(err()),
        };
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| err())? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| err())?,
    };
    let z = Complex64::new(re, im);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(err())
    }
}

/// Parses `r:theta` into `r·e^{iθ}`.
pub fn parse_polar(s: &str) -> Result<Complex64, String> {
    let (r, t) = s
        .split_once(':')
        .ok_or_else(|| format!("expected r:theta, got '{s}'"))?;
    let r: f64 = r.trim().parse().map_err(|_| format!("bad radius in '{s}'"))?;
    let t: f64 = t.trim().parse().map_err(|_| format!("bad angle in '{s}'"))?;
    if !(r.is_finite() && t.is_finite()) || r < 0.0 {
        return Err(format!("invalid polar value '{s}'"));
    }
    Ok(Complex64::from_polar(r, t))
}

/// Parses `re_lo:re_hi:im_lo:im_hi`.
pub fn parse_region(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("expected re_lo:re_hi:im_lo:im_hi, got '{s}'"));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.trim().parse().map_err(|_| format!("bad number '{p}' in region"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |a, b| Complex64::new(a, b);
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("1+1i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex("0.5+0.0i").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("-2-3.5i").unwrap(), c(-2.0, -3.5));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex("-1e-3-2E+1j").unwrap(), c(-1e-3, -20.0));
        assert_eq!(parse_complex("-3.3333").unwrap(), c(-3.3333, 0.0));
        for bad in ["", "abc", "1+2", "1+xi", "nan", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn polar_and_region() {
        let z = parse_polar("2:1.5707963267948966").unwrap();
        assert!((z - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert!(parse_polar("2").is_err());
        assert!(parse_polar("-1:0").is_err());
        assert_eq!(parse_region("-1.2:1.2:-1:1").unwrap(), [-1.2, 1.2, -1.0, 1.0]);
        assert!(parse_region("0:1:2").is_err());
    }
}
