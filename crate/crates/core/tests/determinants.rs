use num_complex::Complex64;
use std::f64::consts::PI;

use toeplitz_asy::asympt::{fh_prediction, szego_prediction};
use toeplitz_asy::detcore::{gessel_det, hankel_det, hankel_det_certified, opuc, toeplitz_det, MomentTable};
use toeplitz_asy::symbol::{FHSingularity, FHSymbol};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn legendre_and_chebyshev_moments() {
    let legendre = MomentTable::standard(vec![2.0, 0.0, 2.0 / 3.0]);
    assert!((hankel_det(&legendre, 2).unwrap().value().re - 4.0 / 3.0).abs() < 1e-14);
    let chebyshev = MomentTable::standard(vec![PI]);
    assert!((hankel_det(&chebyshev, 1).unwrap().value().re - PI).abs() < 1e-14);
}

#[test]
fn ill_conditioned_exponential_weight_is_certified() {
    // e^{-4 n x} on [0, 1], n = 4
    let table = MomentTable::exponential(16.0, Some(1.0), 7, 60).unwrap();
    let (d, disagreement) = hankel_det_certified(&table, 4).unwrap();
    assert!(disagreement < 1e-6);
    assert!(d.log_modulus.is_finite() && d.phase == 0.0);
    // on the half line det = c^{-n^2} prod_{k<n} (k!)^2
    let half = MomentTable::exponential(16.0, None, 7, 60).unwrap();
    let (h, _) = hankel_det_certified(&half, 4).unwrap();
    let want = -16.0 * 16f64.ln() + 2.0 * (1.0f64 * 1.0 * 2.0 * 6.0).ln();
    assert!((h.log_modulus - want).abs() < 1e-12 * want.abs());
    // truncating the weight at 1 removes mass, which lowers the determinant
    assert!(d.log_modulus < h.log_modulus);
}

#[test]
fn szego_and_fh_close_in_on_exact_values() {
    let smooth = FHSymbol::smooth(vec![(1, c(0.4)), (-1, c(0.3)), (2, c(0.1))]).unwrap();
    for n in [8, 24] {
        let exact = toeplitz_det(&smooth.fourier_coeffs(-(n as i64), n as i64).unwrap(), n).unwrap();
        assert!((exact.ln() - szego_prediction(&smooth, n).unwrap().log_value()).norm() < 1e-10);
    }
    let sing = FHSymbol::new(
        vec![(1, c(0.3))],
        vec![FHSingularity::new(1.0, c(0.3), c(0.2)), FHSingularity::new(4.0, c(0.2), c(-0.1))],
    )
    .unwrap();
    let err = |n: usize| {
        let exact = toeplitz_det(&sing.fourier_coeffs(-(n as i64), n as i64).unwrap(), n).unwrap();
        (exact.ln() - fh_prediction(&sing, n).unwrap().log_value()).norm()
    };
    let (e16, e32, e64) = (err(16), err(32), err(64));
    assert!(e64 < e32 && e32 < e16, "{e16} {e32} {e64}");
}

#[test]
fn opuc_chi_links_consecutive_determinants() {
    let sym = FHSymbol::new(vec![(1, c(0.2))], vec![FHSingularity::new(2.0, c(0.5), c(0.1))]).unwrap();
    let t = sym.fourier_coeffs(-12, 12).unwrap();
    for k in 0..5 {
        let r = opuc(&t, k).unwrap();
        let ratio = toeplitz_det(&t, k).unwrap().div(toeplitz_det(&t, k + 1).unwrap()).value();
        assert!((r.chi * r.chi - ratio).norm() < 1e-10 * ratio.norm());
    }
}

#[test]
fn gessel_single_row_is_bessel_series() {
    // u_1(N) = 1
    let lambda: f64 = 0.3;
    let mut series = 0.0;
    let mut term = 1.0;
    for n in 0..30 {
        series += term;
        term *= lambda / ((n + 1) as f64).powi(2);
    }
    assert!((gessel_det(1, lambda).unwrap() - series).abs() < 1e-13);
}
