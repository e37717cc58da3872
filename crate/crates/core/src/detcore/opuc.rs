use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

use super::{check_even, th_moments, toeplitz_matrix, MomentTable, ThVariant};
use crate::error::{Error, Result};
use crate::linalg::{LogDet, Lu};
use crate::symbol::{CoeffTable, FHSymbol};

/// phi_k(z) = chi_k z^k + ... and its dual phi_hat_k, orthonormal against f.
#[derive(Debug, Clone, Serialize)]
pub struct OPUCResult {
    pub degree: usize,
    pub chi: Complex64,
    /// coefficients of phi_k, lowest degree first
    pub phi: Vec<Complex64>,
    pub phi_hat: Vec<Complex64>,
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

impl OPUCResult {
    pub fn phi_at(&self, z: Complex64) -> Complex64 {
        horner(&self.phi, z)
    }

    pub fn phi_hat_at(&self, z: Complex64) -> Complex64 {
        horner(&self.phi_hat, z)
    }
}

// |D_j| tiny against the Hadamard bound counts as a vanishing minor
fn minor_vanishes(coeffs: &CoeffTable, j: usize) -> bool {
    if j == 0 {
        return false;
    }
    let m = toeplitz_matrix(coeffs, j);
    let d = Lu::factor(&m).log_det();
    if d.is_zero() {
        return true;
    }
    let hadamard: f64 = (0..j)
        .map(|r| (0..j).map(|c| m.get(r, c).norm_sqr()).sum::<f64>().sqrt().ln())
        .sum();
    d.log_modulus < hadamard + (1e-12f64).ln()
}

/// Orthonormal polynomials of degree k for the weight with the given
/// Fourier coefficients.
pub fn opuc(coeffs: &CoeffTable, k: usize) -> Result<OPUCResult> {
    let kk = k as i64;
    if !(coeffs.contains(-kk) && coeffs.contains(kk)) {
        return Err(Error::Size(format!("coefficients up to |j| = {k} needed")));
    }
    for j in 1..=k + 1 {
        if minor_vanishes(coeffs, j) {
            return Err(Error::SingularMinor(format!("D_{j} = 0")));
        }
    }
    let t = toeplitz_matrix(coeffs, k + 1);
    let mut e = vec![Complex64::new(0.0, 0.0); k + 1];
    e[k] = Complex64::new(1.0, 0.0);
    let y = Lu::factor(&t).solve(&e);
    let yh = Lu::factor(&t.transpose()).solve(&e);
    // sum_i c_i f_{j-i} = delta_{jk} / chi forces c = y / chi with chi^2 = y_k
    let chi = y[k].sqrt();
    Ok(OPUCResult {
        degree: k,
        chi,
        phi: y.iter().map(|v| v / chi).collect(),
        phi_hat: yh.iter().map(|v| v / chi).collect(),
    })
}

/// Relative residual of the Hankel/Toeplitz bridge identity for an even
/// symbol at order n.
pub fn th_bridge_check(sym: &FHSymbol, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let m = 2 * n as i64;
    let coeffs = sym.fourier_coeffs(-m, m)?;
    check_even(&coeffs, m)?;
    let moments = th_moments(sym, 2 * n - 1, ThVariant::Plus)?;
    let dh = super::hankel_det(&MomentTable::standard(moments), n)?;
    let lhs = 2.0 * dh.ln();
    let op = opuc(&coeffs, 2 * n)?;
    let d2n = super::toeplitz_det(&coeffs, 2 * n)?;
    let one = Complex64::new(1.0, 0.0);
    let nf = n as f64;
    let rhs = 2.0 * nf * PI.ln() - 2.0 * (nf - 1.0).powi(2) * LN_2
        + 2.0 * (op.chi + op.phi[0]).ln()
        - op.phi_at(one).ln()
        - op.phi_at(-one).ln()
        + d2n.ln();
    let r = LogDet::from_log(lhs - rhs).value();
    Ok((r - 1.0).norm())
}
