use num_complex::Complex64;
use std::f64::consts::PI;

use super::log_gamma;
use crate::dd::{approx_abs, cdiv, dc, dd, to_c64, DC};
use crate::error::{Error, Result};

const SERIES_MAX: f64 = 25.0;

/// J_a(x) for x >= 0 and Re a > -1.
pub fn bessel_j(a: Complex64, x: f64) -> Result<Complex64> {
    Ok(bessel_j_pair(a, x)?.0)
}

/// (J_a(x), J_a'(x)).
pub fn bessel_j_pair(a: Complex64, x: f64) -> Result<(Complex64, Complex64)> {
    if a.re <= -1.0 || !a.re.is_finite() || !a.im.is_finite() {
        return Err(Error::Parameter(format!("Bessel order {a} needs Re a > -1")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument {x} must be >= 0")));
    }
    if x == 0.0 {
        return at_zero(a);
    }
    if x <= SERIES_MAX {
        series(a, x)
    } else {
        let j = hankel(a, x);
        let jm = hankel(a - 1.0, x);
        Ok((j, jm - a / x * j))
    }
}

fn at_zero(a: Complex64) -> Result<(Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    if a == zero {
        return Ok((Complex64::new(1.0, 0.0), zero));
    }
    if a == Complex64::new(1.0, 0.0) {
        return Ok((zero, Complex64::new(0.5, 0.0)));
    }
    if a.re > 1.0 {
        return Ok((zero, zero));
    }
    if a.re > 0.0 {
        return Err(Error::Domain(format!("J_a'(0) is unbounded for a = {a}")));
    }
    Err(Error::Domain(format!("J_a(0) is undefined for a = {a}")))
}

fn series(a: Complex64, x: f64) -> Result<(Complex64, Complex64)> {
    let pref = (a * (x / 2.0).ln() - log_gamma(a + 1.0)?).exp();
    let ad = dc(a);
    let w = dd(-x * x / 4.0);
    let mut t = dc(Complex64::new(1.0, 0.0));
    let mut sum = t;
    let mut dsum = cdiv(ad, dc(Complex64::new(x, 0.0)));
    for k in 1..2000 {
        let kf = dd(k as f64);
        let den = (ad + DC::new(kf, dd(0.0))) * DC::new(kf, dd(0.0));
        t = cdiv(t * DC::new(w, dd(0.0)), den);
        sum += t;
        let fac = cdiv(ad + DC::new(dd(2.0) * kf, dd(0.0)), dc(Complex64::new(x, 0.0)));
        dsum += t * fac;
        if (k as f64) > x && approx_abs(t) < 1e-34 * approx_abs(sum).max(1e-300) {
            return Ok((pref * to_c64(sum), pref * to_c64(dsum)));
        }
    }
    Err(Error::Convergence(format!("Bessel series a={a}, x={x}")))
}

fn hankel(nu: Complex64, x: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let mut ak = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..200usize {
        let kf = k as f64;
        ak = ak * (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf);
        let term = ak / x.powi(k as i32);
        let m = term.norm();
        if m > prev {
            break;
        }
        prev = m;
        // sign pattern (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if m < 1e-17 || m == 0.0 {
            break;
        }
    }
    let omega = x - nu * (PI / 2.0) - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
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
            (c(0.5, 0.0), 3.0, c(0.06500818287737578, 0.0), c(-0.46688351794086247, 0.0)),
            (c(0.5, 0.0), 30.0, c(-0.1439296533703999, 0.0), c(0.024869118155004356, 0.0)),
            (c(0.3, 0.4), 7.5, c(0.3466053116976995, -0.011190823721922582), c(-0.0015715525119585727, 0.1903440670438838)),
            (c(0.0, 0.0), 26.0, c(0.15599931552242113, 0.0), c(-0.015045730586915811, 0.0)),
            (c(-0.4, 0.0), 1.5, c(0.16263140571961607, 0.0), c(-0.6880380082005854, 0.0)),
            (c(2.5, 0.0), 24.0, c(0.13808549207484214, 0.0), c(-0.08961426856270745, 0.0)),
            (c(2.5, 0.0), 40.0, c(-0.08751431140932354, 0.0), c(0.09195832419921648, 0.0)),
        ];
        for (a, x, j, jp) in cases {
            let (gj, gjp) = bessel_j_pair(a, x).unwrap();
            assert!((gj - j).norm() < 1e-12, "J_{a}({x}) = {gj}");
            assert!((gjp - jp).norm() < 1e-12, "J'_{a}({x}) = {gjp}");
        }
    }

    #[test]
    fn half_order_is_elementary() {
        for x in [0.1, 2.0, 10.0, 24.9, 25.1, 60.0] {
            let want = (2.0 / (PI * x)).sqrt() * x.sin();
            let got = bessel_j(c(0.5, 0.0), x).unwrap();
            assert!((got.re - want).abs() < 1e-13 && got.im.abs() < 1e-15, "{x}");
        }
    }

    #[test]
    fn bessel_equation_and_overlap() {
        for a in [c(0.0, 0.0), c(0.7, 0.0), c(1.2, -0.3)] {
            for x in [0.5, 5.0, 20.0] {
                let h = 1e-4;
                let (j, jp) = bessel_j_pair(a, x).unwrap();
                let jpp = (bessel_j_pair(a, x + h).unwrap().1 - bessel_j_pair(a, x - h).unwrap().1) / (2.0 * h);
                let r = x * x * jpp + x * jp + (x * x - a * a) * j;
                assert!(r.norm() < 1e-6 * (1.0 + x * x), "a={a}, x={x}");
            }
            let s = series(a, 25.0).unwrap().0;
            let h = hankel(a, 25.0);
            assert!((s - h).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(bessel_j(c(-1.5, 0.0), 1.0), Err(Error::Parameter(_))));
        assert!(matches!(bessel_j(c(0.5, 0.0), -1.0), Err(Error::Domain(_))));
        assert_eq!(bessel_j(c(0.0, 0.0), 0.0).unwrap(), c(1.0, 0.0));
    }
}
