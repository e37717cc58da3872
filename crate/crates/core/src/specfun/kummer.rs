use num_complex::Complex64;
use std::f64::consts::PI;

use super::{is_nonpositive_integer, log_gamma, recip_gamma};
use crate::dd::{approx_abs, cdiv, dc, dd, to_c64, DC};
use crate::error::{Error, Result};

const SERIES_RADIUS: f64 = 30.0;
const MAX_TERMS: usize = 4000;

/// Kummer's function M(a, c, z) = 1F1(a; c; z).
pub fn kummer_phi(a: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Parameter(format!("c = {c} is a non-positive integer")));
    }
    if z.norm() <= SERIES_RADIUS || is_nonpositive_integer(a) {
        series(a, c, z)
    } else {
        asymptotic(a, c, z)
    }
}

/// d/dz M(a, c, z) = (a/c) M(a+1, c+1, z).
pub fn kummer_phi_prime(a: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    Ok(a / c * kummer_phi(a + 1.0, c + 1.0, z)?)
}

fn series(a: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let (ad, cd, zd) = (dc(a), dc(c), dc(z));
    let one = dc(Complex64::new(1.0, 0.0));
    let mut term = one;
    let mut sum = one;
    let size = z.norm() + a.norm();
    for n in 0..MAX_TERMS {
        let nn = dd(n as f64);
        let num = (ad + DC::new(nn, dd(0.0))) * zd;
        let den = (cd + DC::new(nn, dd(0.0))) * DC::new(nn + dd(1.0), dd(0.0));
        term = cdiv(term * num, den);
        sum += term;
        let t = approx_abs(term);
        if t == 0.0 || ((n as f64) > size && t <= 1e-33 * approx_abs(sum)) {
            return Ok(to_c64(sum));
        }
    }
    Err(Error::Convergence(format!("Kummer series for a={a}, c={c}, z={z}")))
}

fn asym_sum(p: Complex64, q: Complex64, w: Complex64) -> Complex64 {
    // sum_s (p)_s (q)_s / s! w^s, truncated at the smallest term
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for s in 0..200 {
        let sf = s as f64;
        let next = term * (p + sf) * (q + sf) / (sf + 1.0) * w;
        let m = next.norm();
        if m > prev || m == 0.0 {
            break;
        }
        sum += next;
        term = next;
        prev = m;
        if m < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn asymptotic(a: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let lz = z.ln();
    let lg_c = log_gamma(c)?;
    let first = if is_nonpositive_integer(c - a) {
        Complex64::new(0.0, 0.0)
    } else {
        let phase = Complex64::new(0.0, sign * PI) * a;
        (phase - a * lz + lg_c - log_gamma(c - a)?).exp()
            * asym_sum(a, a - c + 1.0, -1.0 / z)
    };
    let second = if is_nonpositive_integer(a) {
        Complex64::new(0.0, 0.0)
    } else {
        (z + (a - c) * lz + lg_c).exp() * recip_gamma(a) * asym_sum(c - a, 1.0 - a, 1.0 / z)
    };
    Ok(first + second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reference_values() {
        let cases = [
            (c(1.2, 0.3), c(1.4, 0.0), c(0.0, 16.0), c(-0.2205040775257885, -0.28628246290683557)),
            (c(0.7, -0.5), c(1.4, 0.0), c(0.0, -45.0), c(-0.012399657828167505, 0.0069171706868152915)),
            (c(1.5, 0.0), c(2.0, 0.0), c(-35.0, 0.0), c(0.0027865369117716188, 0.0)),
            (c(0.3, 0.0), c(1.3, 0.0), c(0.0, 2.0), c(0.7816307334837026, 0.35442115588364154)),
        ];
        for (a, cc, z, want) in cases {
            let got = kummer_phi(a, cc, z).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm(), "{a} {cc} {z}: {got}");
        }
    }

    #[test]
    fn elementary_cases() {
        // M(a, a, z) = e^z and M(1, 2, z) = (e^z - 1)/z
        for z in [c(0.0, 12.0), c(-3.0, 1.0), c(0.0, -29.0), c(0.0, 31.0)] {
            let a = c(0.8, 0.1);
            assert!((kummer_phi(a, a, z).unwrap() - z.exp()).norm() < 1e-12 * z.exp().norm());
            let m = kummer_phi(c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
            let want = (z.exp() - 1.0) / z;
            assert!((m - want).norm() < 1e-12 * want.norm().max(1e-3));
        }
        // terminating series: M(-2, c, z) = 1 - 2z/c + z^2/(c(c+1))
        let cc = c(1.5, 0.0);
        let z = c(40.0, 3.0);
        let want = 1.0 - 2.0 * z / cc + z * z / (cc * (cc + 1.0));
        assert!((kummer_phi(c(-2.0, 0.0), cc, z).unwrap() - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn kummer_transformation() {
        // M(a, c, z) = e^z M(c - a, c, -z)
        for z in [c(0.0, 10.0), c(0.0, 29.5), c(0.0, 30.5), c(0.0, -60.0)] {
            let (a, cc) = (c(1.3, 0.2), c(1.6, 0.0));
            let lhs = kummer_phi(a, cc, z).unwrap();
            let rhs = z.exp() * kummer_phi(cc - a, cc, -z).unwrap();
            assert!((lhs - rhs).norm() < 1e-11 * lhs.norm(), "{z}");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let (a, cc, z) = (c(1.1, 0.4), c(1.4, 0.0), c(0.0, 7.0));
        let h = 1e-5;
        let fd = (kummer_phi(a, cc, z + h).unwrap() - kummer_phi(a, cc, z - h).unwrap()) / (2.0 * h);
        assert!((fd - kummer_phi_prime(a, cc, z).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn rejects_bad_c() {
        assert!(matches!(
            kummer_phi(c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)),
            Err(Error::Parameter(_))
        ));
    }
}
