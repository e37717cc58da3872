use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{is_nonpositive_integer, log_gamma, BERNOULLI_EVEN};
use dashu_float::FBig;
use crate::error::{Error, Result};

const SHIFT_TO: f64 = 12.0;

const BERNOULLI_RATIONAL: [(f64, f64); 12] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
];

/// zeta'(-1), through Glaisher's constant: zeta'(-1) = 1/12 - ln A, with
/// ln A from the Euler-Maclaurin expansion of sum k ln k.
pub fn zeta_prime_minus1() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| {
        let big = |x: f64| -> FBig { FBig::try_from(x).unwrap().with_precision(160).value() };
        let n = 10i32;
        let mut h = big(0.0);
        for k in 2..=n {
            h += big(k as f64) * big(k as f64).ln();
        }
        let nb = big(n as f64);
        let mut ln_a = h - (big((n * n) as f64 / 2.0 + n as f64 / 2.0) + big(1.0) / big(12.0)) * nb.ln()
            + big((n * n) as f64 / 4.0);
        for (idx, b) in BERNOULLI_EVEN.iter().enumerate().skip(1) {
            let j = (idx + 1) as i32;
            // B_2j is a ratio of small integers; rebuild it exactly
            let (p, q) = BERNOULLI_RATIONAL[idx];
            debug_assert!((p / q - b).abs() < 1e-12 * b.abs());
            let denom = big(((2 * j) * (2 * j - 1) * (2 * j - 2)) as f64) * big(q) * nb.powi((2 * j - 2).into());
            ln_a += big(p) / denom;
        }
        let ln_a = ln_a.to_f64().value();
        1.0 / 12.0 - ln_a
    })
}

// ln G(1 + u) for large |u|
fn asymptotic(u: Complex64) -> Complex64 {
    let lu = u.ln();
    let u2 = u * u;
    let mut s = 0.5 * u2 * lu - 0.75 * u2 + 0.5 * u * (2.0 * PI).ln() - lu / 12.0
        + zeta_prime_minus1();
    let mut p = u2;
    for k in 1..=10usize {
        let kf = k as f64;
        s += BERNOULLI_EVEN[k] / (4.0 * kf * (kf + 1.0)) / p;
        p *= u2;
    }
    s
}

/// Logarithm of the Barnes G function, on the branch fixed by
/// `ln G(z + 1) = ln G(z) + log_gamma(z)`.
pub fn log_barnes_g(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Parameter(format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Zero(format!("{z}")));
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TO {
        acc += log_gamma(w)?;
        w += 1.0;
    }
    Ok(asymptotic(w - 1.0) - acc)
}
