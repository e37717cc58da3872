//! Exact finite-n determinants: Toeplitz, Hankel, Toeplitz+Hankel, and the
//! orthogonal polynomials on the circle.

mod hankel;
mod opuc;

pub use hankel::{hankel_det, hankel_det_certified, MomentTable, EXTENDED_THRESHOLD};
pub use opuc::{opuc, th_bridge_check, OPUCResult};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{log_det, LogDet, Matrix};
use crate::quad::PanelSpec;
use crate::symbol::{CoeffTable, FHSymbol};

fn require(coeffs: &CoeffTable, lo: i64, hi: i64) -> Result<()> {
    if lo <= hi && !(coeffs.contains(lo) && coeffs.contains(hi)) {
        return Err(Error::Size(format!(
            "coefficients [{lo}, {hi}] needed, table holds [{}, {}]",
            coeffs.k_min,
            coeffs.k_max()
        )));
    }
    Ok(())
}

/// D_n = det(f_{j-k}), j, k = 0..n-1.
pub fn toeplitz_det(coeffs: &CoeffTable, n: usize) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    let m = n as i64 - 1;
    require(coeffs, -m, m)?;
    Ok(log_det(&toeplitz_matrix(coeffs, n)))
}

pub(crate) fn toeplitz_matrix(coeffs: &CoeffTable, n: usize) -> Matrix {
    Matrix::from_fn(n, |j, k| coeffs.get(j as i64 - k as i64))
}

/// The four Toeplitz+Hankel forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThVariant {
    /// det(f_{j-k} + f_{j+k})
    Plus,
    /// det(f_{j-k} - f_{j+k+2})
    Minus2,
    /// det(f_{j-k} + f_{j+k+1})
    Plus1,
    /// det(f_{j-k} - f_{j+k+1})
    Minus1,
}

impl ThVariant {
    pub const ALL: [ThVariant; 4] = [ThVariant::Plus, ThVariant::Minus2, ThVariant::Plus1, ThVariant::Minus1];

    pub fn name(&self) -> &'static str {
        match self {
            ThVariant::Plus => "plus",
            ThVariant::Minus2 => "minus2",
            ThVariant::Plus1 => "plus1",
            ThVariant::Minus1 => "minus1",
        }
    }

    pub fn parse(s: &str) -> Option<ThVariant> {
        ThVariant::ALL.iter().copied().find(|v| v.name() == s)
    }

    fn hankel_offset_sign(&self) -> (i64, f64) {
        match self {
            ThVariant::Plus => (0, 1.0),
            ThVariant::Minus2 => (2, -1.0),
            ThVariant::Plus1 => (1, 1.0),
            ThVariant::Minus1 => (1, -1.0),
        }
    }

    /// log2 of the power-of-two prefactor in front of D_n^H.
    fn log2_prefactor(&self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            ThVariant::Plus => n * n - 2.0 * n + 2.0,
            ThVariant::Minus2 => n * n,
            ThVariant::Plus1 | ThVariant::Minus1 => n * n - n,
        }
    }

    // w(cos theta) sqrt(1 - x^2) in the theta variable, divided by f
    fn theta_weight(&self, theta: f64) -> f64 {
        match self {
            ThVariant::Plus => 1.0,
            ThVariant::Minus2 => theta.sin().powi(2),
            ThVariant::Plus1 => 1.0 + theta.cos(),
            ThVariant::Minus1 => 1.0 - theta.cos(),
        }
    }
}

fn check_even(coeffs: &CoeffTable, kmax: i64) -> Result<()> {
    let scale = (0..=kmax).map(|k| coeffs.get(k).norm()).fold(0.0, f64::max).max(1e-300);
    for k in 1..=kmax {
        if coeffs.contains(-k) {
            let d = (coeffs.get(k) - coeffs.get(-k)).norm();
            if d > 1e-10 * scale {
                return Err(Error::Symmetry(format!("|f_{k} - f_-{k}| = {d:e}")));
            }
        }
    }
    Ok(())
}

/// Toeplitz+Hankel determinant of the chosen form.
pub fn toeplitz_plus_hankel_det(coeffs: &CoeffTable, n: usize, variant: ThVariant) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    let (off, sign) = variant.hankel_offset_sign();
    let top = 2 * (n as i64 - 1) + off;
    require(coeffs, -(n as i64 - 1), top)?;
    check_even(coeffs, (n as i64 - 1).min(coeffs.k_max()).min(-coeffs.k_min))?;
    let m = Matrix::from_fn(n, |j, k| {
        let (j, k) = (j as i64, k as i64);
        coeffs.get(j - k) + sign * coeffs.get(j + k + off)
    });
    Ok(log_det(&m))
}

/// The Hankel moments int_{-1}^{1} x^k w(x) dx of the weight that pairs
/// with `variant`, computed in the angle variable.
pub fn th_moments(sym: &FHSymbol, count: usize, variant: ThVariant) -> Result<Vec<f64>> {
    let spec = PanelSpec { max_width: 0.05, ..Default::default() };
    let nodes = sym.nodes(0.0, PI, &spec);
    let mut moments = vec![Complex64::new(0.0, 0.0); count];
    for nd in &nodes {
        let base = nd.weight * sym.eval_at(nd) * variant.theta_weight(nd.theta);
        let c = nd.theta.cos();
        let mut p = 1.0;
        for m in moments.iter_mut() {
            *m += base * p;
            p *= c;
        }
    }
    let scale = moments.iter().map(|m| m.norm()).fold(0.0, f64::max);
    if moments.iter().any(|m| m.im.abs() > 1e-10 * scale.max(1.0)) {
        return Err(Error::Symmetry("moments are not real; the symbol is not real on the circle".into()));
    }
    Ok(moments.into_iter().map(|m| m.re).collect())
}

/// Right-hand side of the Toeplitz+Hankel / Hankel relation:
/// 2^{p(n)} / pi^n * D_n^H(w).
pub fn th_hankel_side(sym: &FHSymbol, n: usize, variant: ThVariant) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    let moments = th_moments(sym, 2 * n - 1, variant)?;
    let dh = hankel_det(&MomentTable::standard(moments), n)?;
    let pref = variant.log2_prefactor(n) * 2f64.ln() - n as f64 * PI.ln();
    Ok(dh.mul(LogDet { log_modulus: pref, phase: 0.0 }))
}

/// D_n(exp(sqrt(lambda)(z + 1/z))), the generating function of u_n(N).
pub fn gessel_det(n: usize, lambda: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("lambda = {lambda} must be >= 0")));
    }
    let r = lambda.sqrt();
    let sym = FHSymbol::smooth(vec![(1, Complex64::new(r, 0.0)), (-1, Complex64::new(r, 0.0))])?;
    let m = n as i64 - 1;
    let coeffs = sym.fourier_coeffs(-m, m)?;
    Ok(toeplitz_det(&coeffs, n)?.value().re)
}
