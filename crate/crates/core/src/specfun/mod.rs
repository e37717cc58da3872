//! Special functions: log-gamma, Barnes G, Kummer's confluent function,
//! Airy and Bessel functions.

mod airy;
mod barnes;
mod bessel;
mod gamma;
mod kummer;

pub use airy::airy_ai;
pub use barnes::{log_barnes_g, zeta_prime_minus1};
pub use bessel::{bessel_j, bessel_j_pair};
pub use gamma::{log_gamma, recip_gamma};
pub use kummer::{kummer_phi, kummer_phi_prime};

/// B_2, B_4, ..., B_24.
pub(crate) const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

pub(crate) fn is_nonpositive_integer(z: num_complex::Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

pub(crate) fn near_nonpositive_integer(z: num_complex::Complex64, tol: f64) -> bool {
    z.im.abs() <= tol && z.re <= tol && (z.re - z.re.round()).abs() <= tol
}
