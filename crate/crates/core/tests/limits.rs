use num_complex::Complex64;

use toeplitz_asy::asympt::{fredholm_prediction, log_c_sine};
use toeplitz_asy::fredholm::{fredholm_det, fredholm_log_det, limit_check_sine, FredholmOptions, KernelSpec};
use toeplitz_asy::painleve::{default_hastings_mcleod, solve_sigma, tracy_widom_cdf, tracy_widom_log_cdf};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn airy_determinant_and_painleve_route_agree() {
    for s in [-3.0, -0.5, 0.5, 2.0] {
        let d = fredholm_det(&KernelSpec::Airy { s }, 80).unwrap();
        assert!((d - tracy_widom_cdf(s).unwrap()).abs() < 1e-9, "s={s}");
    }
}

#[test]
fn tracy_widom_left_tail_follows_prediction() {
    let err = |s: f64| {
        (tracy_widom_log_cdf(s).unwrap() - fredholm_prediction(&KernelSpec::Airy { s }).unwrap().log_value().re).abs()
    };
    assert!(err(-8.0) < err(-4.0));
    assert!(err(-10.0) < 0.01);
    assert!(default_hastings_mcleod().unwrap().x_min() <= -11.0);
}

#[test]
fn sine_constant_and_decay() {
    assert!((log_c_sine() - (2f64.ln() / 12.0 + 3.0 * -0.16542114370045092)).abs() < 1e-12);
    let mut last = f64::INFINITY;
    for s in [2.0, 4.0, 8.0, 12.0] {
        let k = KernelSpec::Sine { s };
        let d = fredholm_log_det(&k, k.default_nodes(), &FredholmOptions::default()).unwrap();
        let e = (d.ln() - fredholm_prediction(&k).unwrap().log_value()).norm();
        assert!(e < last, "s={s}");
        last = e;
    }
}

#[test]
fn toeplitz_arc_converges_to_sine_determinant() {
    let rows = limit_check_sine(2.0, &[32, 64, 128]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].residual < w[0].residual));
    assert!(rows[2].residual < 1e-4);
}

#[test]
fn sigma_solution_reproduces_its_boundary_values() {
    let s = solve_sigma(c(0.5), c(0.0), 30.0).unwrap();
    assert!((s.sigma(1e-5).unwrap() - 0.25).abs() < 1e-4);
    assert!(s.sigma(30.0).unwrap().abs() < 1e-10);
    assert!(s.max_residual(0.01, 20.0) < 1e-6);
}
