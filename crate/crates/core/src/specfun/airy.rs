use std::f64::consts::PI;

use crate::dd::{dd, ddc, div, DD};
use crate::error::{Error, Result};

const SERIES_LO: f64 = -10.0;
const SERIES_HI: f64 = 8.0;

/// Ai(x) and Ai'(x) for real x.
pub fn airy_ai(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Parameter(format!("Airy argument {x}")));
    }
    if x > SERIES_HI {
        Ok(decaying(x))
    } else if x < SERIES_LO {
        Ok(oscillatory(-x))
    } else {
        Ok(maclaurin(x))
    }
}

fn maclaurin(x: f64) -> (f64, f64) {
    let c1 = ddc(0.3550280538878172, 2.05233632436212e-17);
    let c2 = ddc(0.2588194037928068, -2.522243111610832e-17);
    let xd = dd(x);
    let x3 = xd * xd * xd;
    // f = sum t_k, g = sum s_k; derivatives accumulated alongside
    let x2 = xd * xd;
    let mut t = dd(1.0);
    let mut s = xd;
    let (mut f, mut g) = (t, s);
    let (mut fp, mut gp) = (dd(0.0), dd(1.0));
    for k in 1..400 {
        let kf = k as f64;
        // derivative terms from the previous series terms
        let dt = div(t * x2, dd(3.0 * kf - 1.0));
        let ds = div(s * x2, dd(3.0 * kf));
        t = div(t * x3, dd((3.0 * kf - 1.0) * (3.0 * kf)));
        s = div(s * x3, dd((3.0 * kf) * (3.0 * kf + 1.0)));
        f += t;
        g += s;
        fp += dt;
        gp += ds;
        let m = t.hi().abs() + s.hi().abs() + dt.hi().abs() + ds.hi().abs();
        if m < 1e-34 && kf > x.abs() {
            break;
        }
    }
    let ai: DD = c1 * f - c2 * g;
    let aip: DD = c1 * fp - c2 * gp;
    (f64::from(ai), f64::from(aip))
}

fn u_coeffs(n: usize) -> Vec<f64> {
    let mut u = vec![1.0f64];
    for k in 1..n {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf));
    }
    u
}

fn v_from_u(u: &[f64]) -> Vec<f64> {
    u.iter()
        .enumerate()
        .map(|(k, uk)| {
            let kf = k as f64;
            -uk * (6.0 * kf + 1.0) / (6.0 * kf - 1.0)
        })
        .collect()
}

// alternating asymptotic sums truncated at the smallest term
fn alt_sum(c: &[f64], zeta: f64, parity: Option<usize>) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut sign = 1.0;
    for (k, ck) in c.iter().enumerate() {
        if let Some(p) = parity {
            if k % 2 != p {
                continue;
            }
        }
        let term = sign * ck / zeta.powi(k as i32);
        sign = -sign;
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn decaying(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = u_coeffs(40);
    let v = v_from_u(&u);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * alt_sum(&u, zeta, None), -q * e * alt_sum(&v, zeta, None))
}

fn oscillatory(x: f64) -> (f64, f64) {
    // Ai(-x), Ai'(-x) for x > 0
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = u_coeffs(60);
    let v = v_from_u(&u);
    let (s, c) = (zeta - PI / 4.0).sin_cos();
    let q = x.powf(0.25);
    let sp = PI.sqrt();
    let ue = alt_sum(&u, zeta, Some(0));
    let uo = alt_sum(&u, zeta, Some(1));
    let ve = alt_sum(&v, zeta, Some(0));
    let vo = alt_sum(&v, zeta, Some(1));
    ((c * ue + s * uo) / (sp * q), q / sp * (s * ve - c * vo))
}
