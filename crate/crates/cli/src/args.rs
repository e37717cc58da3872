//! Value parsers for list and complex flags.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct IntList(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

/// `4`, `1..8` (inclusive), or a comma list of either.
pub fn parse_int_list(s: &str) -> Result<IntList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {part:?}"))?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in {part:?}"))?;
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("not an integer: {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(IntList(out))
}

/// `x`, a comma list, or `lo:hi:count` for count equispaced points.
pub fn parse_real_list(s: &str) -> Result<RealList, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let pieces: Vec<&str> = part.split(':').collect();
        match pieces.as_slice() {
            [x] => out.push(num(x)?),
            [lo, hi, count] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let count: usize = count.trim().parse().map_err(|_| format!("bad count in {part:?}"))?;
                if count < 2 {
                    return Err(format!("{part:?}: count must be at least 2"));
                }
                out.extend((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64));
            }
            _ => return Err(format!("cannot read {part:?}")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err("non-finite value".into());
    }
    Ok(RealList(out))
}

/// `0.3`, `0.2i`, `-i`, `0.3+0.2i`, `0.3-0.2i`, `1e-3-2e-1i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim().replace(' ', "");
    let bad = || format!("not a complex number: {s:?}");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = 0;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = i;
            break;
        }
    }
    let (re, im) = body.split_at(split);
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_int_list("1..4").unwrap().0, vec![1, 2, 3, 4]);
        assert_eq!(parse_int_list("2,8..9").unwrap().0, vec![2, 8, 9]);
        assert!(parse_int_list("4..1").is_err());
        assert!(parse_int_list("x").is_err());
        assert_eq!(parse_real_list("-2,0,2").unwrap().0, vec![-2.0, 0.0, 2.0]);
        assert_eq!(parse_real_list("0:1:3").unwrap().0, vec![0.0, 0.5, 1.0]);
        assert!(parse_real_list("nan").is_err());
    }

    #[test]
    fn complex_numbers() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("0.3").unwrap(), c(0.3, 0.0));
        assert_eq!(parse_complex("0.2i").unwrap(), c(0.0, 0.2));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.3-0.2i").unwrap(), c(0.3, -0.2));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex("-1e-3i").unwrap(), c(0.0, -1e-3));
        assert!(parse_complex("abc").is_err());
    }
}
