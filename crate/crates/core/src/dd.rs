//! Double-double helpers on top of `twofloat`.
//!
//! `TwoFloat` division in the version we depend on only returns a
//! double-accurate quotient, so quotients go through [`div`], which adds one
//! correction step.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

pub type DD = TwoFloat;
pub type DC = Complex<TwoFloat>;

#[inline]
pub fn dd(x: f64) -> DD {
    TwoFloat::from(x)
}

#[inline]
pub fn dc(z: Complex64) -> DC {
    Complex::new(dd(z.re), dd(z.im))
}

#[inline]
pub fn to_c64(z: DC) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// Exact pair (hi, lo) as a double-double constant.
#[inline]
pub fn ddc(hi: f64, lo: f64) -> DD {
    TwoFloat::new_add(hi, lo)
}

pub fn div(a: DD, b: DD) -> DD {
    let q0 = TwoFloat::from(a.hi() / b.hi());
    let r = a - q0 * b;
    let q1 = q0 + TwoFloat::from(r.hi() / b.hi());
    let r = a - q1 * b;
    q1 + TwoFloat::from(r.hi() / b.hi())
}

pub fn cdiv(a: DC, b: DC) -> DC {
    let d = b.re * b.re + b.im * b.im;
    let re = a.re * b.re + a.im * b.im;
    let im = a.im * b.re - a.re * b.im;
    Complex::new(div(re, d), div(im, d))
}

#[inline]
pub fn cscale(a: DC, s: DD) -> DC {
    Complex::new(a.re * s, a.im * s)
}

/// Cheap magnitude estimate, good enough for stopping tests.
#[inline]
pub fn approx_abs(a: DC) -> f64 {
    a.re.hi().abs() + a.im.hi().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_is_double_double_accurate() {
        let q = div(dd(1.0), dd(3.0));
        let err = q * dd(3.0) - dd(1.0);
        assert!(err.hi().abs() < 1e-31);
        let a = ddc(0.1, 1e-20);
        let q = div(a, dd(7.0));
        assert!((q * dd(7.0) - a).hi().abs() < 1e-32);
    }

    #[test]
    fn complex_division_roundtrip() {
        let a = dc(Complex64::new(1.25, -3.5));
        let b = dc(Complex64::new(-0.3, 2.0 / 3.0));
        let q = cdiv(a, b);
        let back = q * b - a;
        assert!(approx_abs(back) < 1e-30);
    }
}
