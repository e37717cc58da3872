//! Nystrom evaluation of det(I - K) for the sine, confluent hypergeometric,
//! Bessel and Airy kernels, and the finite-n Toeplitz/Hankel sides of the
//! double-scaling limits.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::detcore::{hankel_det_certified, toeplitz_det, MomentTable};
use crate::error::{Error, Result};
use crate::linalg::{log_det, LogDet, Matrix};
use crate::quad::{gauss_legendre, graded_rule, PanelSpec, Rule};
use crate::specfun::{airy_ai, bessel_j_pair, kummer_phi, kummer_phi_prime, log_gamma, near_nonpositive_integer};
use crate::symbol::{CoeffTable, FHSingularity, FHSymbol};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum KernelSpec {
    /// sin(x-y)/(pi(x-y)) on (-s, s).
    Sine { s: f64 },
    /// The confluent hypergeometric kernel on (-s, s).
    ConfluentHyp { alpha: Complex64, beta: Complex64, s: f64 },
    /// The Bessel kernel of order a on (0, s).
    Bessel { a: Complex64, s: f64 },
    /// The Airy kernel on (s, inf).
    Airy { s: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Sine { s } => positive(s),
            KernelSpec::ConfluentHyp { alpha, beta, s } => {
                positive(s)?;
                if alpha.re <= -0.5 {
                    return Err(Error::Parameter(format!("Re alpha = {} must exceed -1/2", alpha.re)));
                }
                for g in [1.0 + alpha + beta, 1.0 + alpha - beta] {
                    if near_nonpositive_integer(g, 1e-12) {
                        return Err(Error::Parameter(format!("alpha +- beta = {} is a negative integer", g - 1.0)));
                    }
                }
                Ok(())
            }
            KernelSpec::Bessel { a, s } => {
                positive(s)?;
                if a.re <= -1.0 {
                    return Err(Error::Parameter(format!("Re a = {} must exceed -1", a.re)));
                }
                Ok(())
            }
            KernelSpec::Airy { s } => {
                if s.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("s = {s}")))
                }
            }
        }
    }

    pub fn s(&self) -> f64 {
        match *self {
            KernelSpec::Sine { s }
            | KernelSpec::ConfluentHyp { s, .. }
            | KernelSpec::Bessel { s, .. }
            | KernelSpec::Airy { s } => s,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Sine { .. } => "sine",
            KernelSpec::ConfluentHyp { .. } => "ch",
            KernelSpec::Bessel { .. } => "bessel",
            KernelSpec::Airy { .. } => "airy",
        }
    }

    /// A node count that meets the default tolerance for moderate s.
    pub fn default_nodes(&self) -> usize {
        let s = self.s().abs();
        let m = match self {
            KernelSpec::Sine { .. } | KernelSpec::ConfluentHyp { .. } => 40.0 + 4.0 * s,
            KernelSpec::Bessel { .. } => 40.0 + 4.0 * s.sqrt(),
            KernelSpec::Airy { .. } => 60.0 + 6.0 * (-s).max(0.0),
        };
        m.ceil() as usize
    }
}

fn positive(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("s = {s} must be positive")))
    }
}

/// Nodes, positive weights and the variable they live in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// "x" for the kernel's own variable, "r = sqrt(x)" for the Bessel map.
    pub domain: String,
}

/// Options for [`fredholm_det_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FredholmOptions {
    /// Accept when |det_m - det_2m| is within this...
    pub abs_tol: f64,
    /// ...or within this times |det_2m|.
    pub rel_tol: f64,
    /// Skip the doubling check and return det_m.
    pub check: bool,
}

impl Default for FredholmOptions {
    fn default() -> Self {
        FredholmOptions { abs_tol: 1e-9, rel_tol: 1e-6, check: true }
    }
}

fn from_rule(rule: Rule, domain: &str) -> QuadratureRule {
    let mut pairs: Vec<(f64, f64)> = rule.nodes.iter().zip(&rule.weights).map(|(&x, w)| (x, w.re)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        domain: domain.to_string(),
    }
}

fn plain(a: f64, b: f64, m: usize) -> Rule {
    let mut r = Rule::default();
    r.push_gl(a, b, m);
    r
}

// m nodes split into 20-point panels, graded toward `end` with exponent g.
fn graded_half(a: f64, b: f64, m: usize, ga: Option<Complex64>, gb: Option<Complex64>) -> Rule {
    let panels = m.div_ceil(20).max(1);
    let spec = PanelSpec {
        max_width: (b - a) / panels as f64 * (1.0 + 1e-12),
        levels: 16,
        end_correction: false,
        ..Default::default()
    };
    graded_rule(a, b, ga, gb, &spec)
}

/// Upper truncation for the Airy kernel: Ai(x)^2 <= 1e-18 beyond it.
pub fn airy_cutoff() -> f64 {
    let mut x = 6.0;
    while airy_ai(x).map(|p| p.0 * p.0).unwrap_or(0.0) > 1e-18 {
        x += 0.01;
    }
    x
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

/// The discretization used for `spec` with nominal node count m.
pub fn quadrature_rule(spec: &KernelSpec, m: usize) -> Result<QuadratureRule> {
    spec.validate()?;
    if m < 10 {
        return Err(Error::Parameter(format!("m = {m} must be at least 10")));
    }
    Ok(match *spec {
        KernelSpec::Sine { s } => from_rule(plain(-s, s, m), "x"),
        KernelSpec::ConfluentHyp { alpha, s, .. } => {
            // split at 0 where g_beta jumps; grade when |2x|^alpha is not smooth
            let g = (alpha != Complex64::new(0.0, 0.0)).then_some(2.0 * alpha);
            let half = m.div_ceil(2);
            let mut r = if g.is_some() { graded_half(-s, 0.0, half, None, g) } else { plain(-s, 0.0, half) };
            let right = if g.is_some() { graded_half(0.0, s, half, g, None) } else { plain(0.0, s, half) };
            r.nodes.extend(right.nodes);
            r.weights.extend(right.weights);
            from_rule(r, "x")
        }
        KernelSpec::Bessel { a, s } => {
            let top = s.sqrt();
            let smooth = a.im == 0.0 && is_integer(a.re + 0.5);
            let r = if smooth {
                plain(0.0, top, m)
            } else {
                graded_half(0.0, top, m, Some(2.0 * a + 1.0), None)
            };
            from_rule(r, "r = sqrt(x)")
        }
        KernelSpec::Airy { s } => {
            let b = airy_cutoff().max(s + 1.0);
            from_rule(plain(s, b, m), "x")
        }
    })
}

// Per-node data from which the kernel is assembled as
// (p_i q_j - p_j q_i) / (x_i - x_j) * scale, with diag_i on the diagonal.
struct Integrable {
    p: Vec<Complex64>,
    q: Vec<Complex64>,
    diag: Vec<Complex64>,
    scale: Complex64,
}

fn ch_prefactor(alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    let lg = log_gamma(1.0 + alpha + beta)? + log_gamma(1.0 + alpha - beta)? - 2.0 * log_gamma(1.0 + 2.0 * alpha)?;
    Ok(lg.exp() / (2.0 * PI * I))
}

// (A, A', B, B') of the confluent kernel at x != 0.
fn ch_ab(alpha: Complex64, beta: Complex64, x: f64) -> Result<[Complex64; 4]> {
    // g_beta^{1/2}(x) = e^{-i pi beta/2} for x > 0 and e^{+i pi beta/2} for x < 0
    let sign = if x > 0.0 { -1.0 } else { 1.0 };
    let g = (sign * I * PI * beta / 2.0).exp();
    let c = 1.0 + 2.0 * alpha;
    let pw = ((2.0 * x.abs()).ln() * alpha).exp();
    let (a1, a2) = (1.0 + alpha + beta, 1.0 + alpha - beta);
    let z = Complex64::new(0.0, 2.0 * x);
    let (p1, d1) = (kummer_phi(a1, c, z)?, kummer_phi_prime(a1, c, z)?);
    let (p2, d2) = (kummer_phi(a2, c, -z)?, kummer_phi_prime(a2, c, -z)?);
    let em = Complex64::from_polar(1.0, -x);
    let ep = Complex64::from_polar(1.0, x);
    let a = g * pw * em * p1;
    let da = g * pw * em * ((alpha / x - I) * p1 + 2.0 * I * d1);
    let b = g * pw * ep * p2;
    let db = g * pw * ep * ((alpha / x + I) * p2 - 2.0 * I * d2);
    Ok([a, da, b, db])
}

fn integrable(spec: &KernelSpec, x: &[f64]) -> Result<Integrable> {
    let n = x.len();
    match *spec {
        KernelSpec::Sine { .. } => Ok(Integrable {
            p: x.iter().map(|&t| Complex64::new(t.sin(), 0.0)).collect(),
            q: x.iter().map(|&t| Complex64::new(t.cos(), 0.0)).collect(),
            diag: vec![Complex64::new(1.0 / PI, 0.0); n],
            scale: Complex64::new(1.0 / PI, 0.0),
        }),
        KernelSpec::ConfluentHyp { alpha, beta, .. } => {
            let pre = ch_prefactor(alpha, beta)?;
            let rows: Vec<[Complex64; 4]> = x.par_iter().map(|&t| ch_ab(alpha, beta, t)).collect::<Result<_>>()?;
            Ok(Integrable {
                p: rows.iter().map(|r| r[0]).collect(),
                q: rows.iter().map(|r| r[2]).collect(),
                diag: rows.iter().map(|r| pre * (r[1] * r[2] - r[0] * r[3])).collect(),
                scale: pre,
            })
        }
        KernelSpec::Bessel { a, .. } => {
            // in r = sqrt(x): 2 sqrt(r1 r2) K(r1^2, r2^2)
            //   = sqrt(r1 r2) (r2 J(r1) J'(r2) - r1 J(r2) J'(r1)) / (r1^2 - r2^2)
            // the r1^2 - r2^2 is split as (r1 - r2)(r1 + r2) below
            let rows: Vec<(Complex64, Complex64)> = x.par_iter().map(|&r| bessel_j_pair(a, r)).collect::<Result<_>>()?;
            Ok(Integrable {
                p: rows.iter().map(|r| r.0).collect(),
                q: rows.iter().zip(x).map(|(r, &t)| r.1 * t).collect(),
                diag: rows
                    .iter()
                    .zip(x)
                    .map(|(r, &t)| 0.5 / t * (t * t * r.1 * r.1 + (t * t - a * a) * r.0 * r.0))
                    .collect(),
                scale: Complex64::new(1.0, 0.0),
            })
        }
        KernelSpec::Airy { .. } => {
            let rows: Vec<(f64, f64)> = x.iter().map(|&t| airy_ai(t)).collect::<Result<_>>()?;
            Ok(Integrable {
                p: rows.iter().map(|r| Complex64::new(r.0, 0.0)).collect(),
                q: rows.iter().map(|r| Complex64::new(r.1, 0.0)).collect(),
                diag: rows.iter().zip(x).map(|(r, &t)| Complex64::new(r.1 * r.1 - t * r.0 * r.0, 0.0)).collect(),
                scale: Complex64::new(1.0, 0.0),
            })
        }
    }
}

fn off_diagonal(spec: &KernelSpec, d: &Integrable, x: &[f64], i: usize, j: usize) -> Complex64 {
    match spec {
        KernelSpec::Bessel { .. } => {
            // p = J(r), q = r J'(r)
            let num = d.q[j] * d.p[i] - d.q[i] * d.p[j];
            (x[i] * x[j]).sqrt() * num / ((x[i] - x[j]) * (x[i] + x[j]))
        }
        _ => d.scale * (d.p[i] * d.q[j] - d.p[j] * d.q[i]) / (x[i] - x[j]),
    }
}

/// K(x, y), with the analytic limit on the diagonal. For the Bessel kernel
/// x and y are in the original variable on (0, s).
pub fn kernel_eval(spec: &KernelSpec, x: f64, y: f64) -> Result<Complex64> {
    spec.validate()?;
    let bad = || Err(Error::Domain(format!("({x}, {y}) outside the {} kernel domain", spec.name())));
    match *spec {
        KernelSpec::ConfluentHyp { .. } if x == 0.0 || y == 0.0 => return bad(),
        KernelSpec::Bessel { .. } if !(x > 0.0 && y > 0.0) => return bad(),
        _ => {}
    }
    if !(x.is_finite() && y.is_finite()) {
        return bad();
    }
    if let KernelSpec::Bessel { .. } = spec {
        // back from the r-variable form: K(x, y) = K~(r1, r2) / (2 sqrt(r1 r2))
        let r = [x.sqrt(), y.sqrt()];
        let d = integrable(spec, &r)?;
        let near = (x - y).abs() <= 1e-9 * x.abs().max(1.0);
        let v = if near { d.diag[0] } else { off_diagonal(spec, &d, &r, 0, 1) };
        return Ok(v / (2.0 * (r[0] * r[1]).sqrt()));
    }
    let pts = [x, y];
    let d = integrable(spec, &pts)?;
    // below this separation the difference quotient loses more digits than
    // the diagonal value is off by
    let near = (x - y).abs() <= 1e-9 * x.abs().max(1.0);
    Ok(if near { d.diag[0] } else { off_diagonal(spec, &d, &pts, 0, 1) })
}

/// det(I - W^{1/2} K W^{1/2}) on the rule for node count m, no convergence check.
pub fn nystrom_det(spec: &KernelSpec, m: usize) -> Result<LogDet> {
    let rule = quadrature_rule(spec, m)?;
    let x = &rule.nodes;
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let d = integrable(spec, x)?;
    let n = x.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = if i == j { d.diag[i] } else { off_diagonal(spec, &d, x, i, j) };
                    let delta = if i == j { 1.0 } else { 0.0 };
                    delta - sw[i] * k * sw[j]
                })
                .collect()
        })
        .collect();
    let a = Matrix { n, data: rows.into_iter().flatten().collect() };
    let ld = log_det(&a);
    if !(ld.log_modulus.is_finite() || ld.is_zero()) {
        return Err(Error::Convergence(format!("non-finite determinant for {} kernel", spec.name())));
    }
    Ok(ld)
}

/// det(I - K) as a complex number, with the m -> 2m check.
pub fn fredholm_det_with(spec: &KernelSpec, m: usize, opts: &FredholmOptions) -> Result<Complex64> {
    let d1 = nystrom_det(spec, m)?.value();
    if !opts.check {
        return Ok(d1);
    }
    let d2 = nystrom_det(spec, 2 * m)?.value();
    let diff = (d1 - d2).norm();
    if diff <= opts.abs_tol || diff <= opts.rel_tol * d2.norm() {
        Ok(d2)
    } else {
        Err(Error::Convergence(format!(
            "{} kernel, s = {}: det changed by {diff:e} from m = {m} to {}",
            spec.name(),
            spec.s(),
            2 * m
        )))
    }
}

/// ln det(I - K) as a complex log, with the m -> 2m check on the log.
pub fn fredholm_log_det(spec: &KernelSpec, m: usize, opts: &FredholmOptions) -> Result<LogDet> {
    let d1 = nystrom_det(spec, m)?;
    if !opts.check {
        return Ok(d1);
    }
    let d2 = nystrom_det(spec, 2 * m)?;
    let diff = (d1.div(d2).value() - 1.0).norm();
    if diff <= opts.rel_tol.max(opts.abs_tol) {
        Ok(d2)
    } else {
        Err(Error::Convergence(format!(
            "{} kernel, s = {}: det changed by relative {diff:e} from m = {m} to {}",
            spec.name(),
            spec.s(),
            2 * m
        )))
    }
}

/// Real part of det(I - K) with default options.
pub fn fredholm_det(spec: &KernelSpec, m: usize) -> Result<f64> {
    Ok(fredholm_det_with(spec, m, &FredholmOptions::default())?.re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub n: usize,
    /// The finite-n determinant side (a ratio for ch, normalized for Airy).
    pub discrete: Complex64,
    pub fredholm: Complex64,
    pub residual: f64,
}

/// Fourier coefficients of the indicator of the arc 2s/n <= theta <= 2pi - 2s/n.
pub fn arc_coeffs(s: f64, n: usize) -> CoeffTable {
    let nf = n as f64;
    let m = n as i64;
    CoeffTable::from_fn(-m, m, |j| {
        if j == 0 {
            Complex64::new(1.0 - 2.0 * s / (nf * PI), 0.0)
        } else {
            let jf = j as f64;
            Complex64::new(-(2.0 * s * jf / nf).sin() / (PI * jf), 0.0)
        }
    })
}

fn check_n_list(s: f64, n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::Parameter("empty n list".into()));
    }
    let lo = *n_list.iter().min().unwrap() as f64;
    if !(s > 0.0 && s < lo) {
        return Err(Error::Parameter(format!("need 0 < s < min n, got s = {s}, min n = {lo}")));
    }
    Ok(())
}

/// D_n of the closing-arc symbol against det(I - K_sine).
pub fn limit_check_sine(s: f64, n_list: &[usize]) -> Result<Vec<LimitRow>> {
    check_n_list(s, n_list)?;
    let spec = KernelSpec::Sine { s };
    let det = fredholm_det_with(&spec, spec.default_nodes(), &FredholmOptions::default())?;
    n_list
        .iter()
        .map(|&n| {
            let d = toeplitz_det(&arc_coeffs(s, n), n)?.value();
            Ok(LimitRow { n, discrete: d, fredholm: det, residual: (d - det).norm() })
        })
        .collect()
}

/// D_n(F(z;n)) / D_n(F(z;inf)) against det(I - K_ch), for the symbol
/// |z-1|^{2 alpha} z^beta e^{-i pi beta} with and without the arc.
pub fn limit_check_ch(alpha: Complex64, beta: Complex64, s: f64, n_list: &[usize]) -> Result<Vec<LimitRow>> {
    check_n_list(s, n_list)?;
    let spec = KernelSpec::ConfluentHyp { alpha, beta, s };
    let det = fredholm_det_with(&spec, spec.default_nodes(), &FredholmOptions::default())?;
    let full = FHSymbol::new(vec![], vec![FHSingularity::new(0.0, alpha, beta)])?;
    n_list
        .iter()
        .map(|&n| {
            let m = n as i64 - 1;
            let arc = full.clone().with_gap(2.0 * s / n as f64)?;
            let num = toeplitz_det(&arc.fourier_coeffs(-m, m)?, n)?;
            let den = toeplitz_det(&full.fourier_coeffs(-m, m)?, n)?;
            let d = num.div(den).value();
            Ok(LimitRow { n, discrete: d, fredholm: det, residual: (d - det).norm() })
        })
        .collect()
}

/// ln of the Hankel determinant for e^{-cx} on the half-line:
/// -n^2 ln c + 2 sum_{k<n} ln k!.
pub fn half_line_log_det(c: f64, n: usize) -> f64 {
    let mut lf = 0.0;
    let mut acc = 0.0;
    for k in 1..n {
        lf += (k as f64).ln();
        acc += lf;
    }
    -((n * n) as f64) * c.ln() + 2.0 * acc
}

/// D_n^H for e^{-4nx} on [0, 1 + s (2n)^{-2/3}], normalized by the
/// half-line determinant, against det(I - K_Airy).
pub fn limit_check_airy(s: f64, n_list: &[usize]) -> Result<Vec<LimitRow>> {
    if n_list.is_empty() {
        return Err(Error::Parameter("empty n list".into()));
    }
    let spec = KernelSpec::Airy { s };
    let det = fredholm_det_with(&spec, spec.default_nodes(), &FredholmOptions::default())?;
    n_list
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let b = 1.0 + s * (2.0 * nf).powf(-2.0 / 3.0);
            if !(b > 0.0) {
                return Err(Error::Parameter(format!("interval end 1 + s (2n)^(-2/3) = {b} is not positive")));
            }
            let c = 4.0 * nf;
            let digits = 40 + 6 * n;
            let table = MomentTable::exponential(c, Some(b), 2 * n - 1, digits)?;
            let (ld, _) = hankel_det_certified(&table, n)?;
            let d = (ld.ln() - half_line_log_det(c, n)).exp();
            Ok(LimitRow { n, discrete: d, fredholm: det, residual: (d - det).norm() })
        })
        .collect()
}

/// Gauss-Legendre nodes mapped to [a, b], for callers needing a plain rule.
pub fn gl_rule(a: f64, b: f64, m: usize) -> QuadratureRule {
    let gl = gauss_legendre(m);
    let h = 0.5 * (b - a);
    QuadratureRule {
        nodes: gl.0.iter().map(|t| a + h * (t + 1.0)).collect(),
        weights: gl.1.iter().map(|w| w * h).collect(),
        domain: "x".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sine_diagonal_and_trace() {
        let spec = KernelSpec::Sine { s: 3.0 };
        assert!((kernel_eval(&spec, 0.7, 0.7).unwrap().re - 1.0 / PI).abs() < 1e-16);
        let rule = quadrature_rule(&spec, 50).unwrap();
        let tr: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&x, w)| w * kernel_eval(&spec, x, x).unwrap().re).sum();
        assert!((tr - 6.0 / PI).abs() < 1e-10);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 6.0).abs() < 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_interval_matches_trace() {
        let s = 1e-3;
        let d = fredholm_det(&KernelSpec::Sine { s }, 20).unwrap();
        assert!(((1.0 - d) - 2.0 * s / PI).abs() < 1e-8);
    }

    #[test]
    fn sine_converges_in_m() {
        let spec = KernelSpec::Sine { s: 2.0 };
        let a = nystrom_det(&spec, 40).unwrap().value();
        let b = nystrom_det(&spec, 80).unwrap().value();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn airy_diagonal_is_the_limit() {
        let spec = KernelSpec::Airy { s: -1.0 };
        for x in [-2.0, 0.3, 1.5] {
            let d = kernel_eval(&spec, x, x).unwrap().re;
            // Richardson on K(x, x + h)
            let k = |h: f64| 0.5 * (kernel_eval(&spec, x, x + h).unwrap().re + kernel_eval(&spec, x, x - h).unwrap().re);
            let (h1, h2) = (1e-3, 5e-4);
            let ext = (4.0 * k(h2) - k(h1)) / 3.0;
            assert!((d - ext).abs() < 1e-8, "x={x}: {d} vs {ext}");
        }
    }

    #[test]
    fn bessel_and_ch_diagonals_are_limits() {
        let specs = [
            KernelSpec::Bessel { a: c(0.5), s: 9.0 },
            KernelSpec::Bessel { a: c(1.3), s: 9.0 },
            KernelSpec::ConfluentHyp { alpha: c(0.2), beta: c(0.0), s: 3.0 },
            KernelSpec::ConfluentHyp { alpha: c(0.3), beta: Complex64::new(0.0, 0.4), s: 3.0 },
        ];
        for spec in specs {
            for x in [0.4, 2.1] {
                let d = kernel_eval(&spec, x, x).unwrap();
                let k = |h: f64| 0.5 * (kernel_eval(&spec, x, x + h).unwrap() + kernel_eval(&spec, x, x - h).unwrap());
                let (h1, h2) = (1e-3, 5e-4);
                let ext = (4.0 * k(h2) - k(h1)) / 3.0;
                assert!((d - ext).norm() < 1e-7, "{spec:?} x={x}: {d} vs {ext}");
            }
        }
    }

    #[test]
    fn ch_reduces_to_sine() {
        let ch = KernelSpec::ConfluentHyp { alpha: c(0.0), beta: c(0.0), s: 4.0 };
        let sine = KernelSpec::Sine { s: 4.0 };
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                let x = -3.9 + 0.83 * i as f64;
                let y = -3.7 + 0.79 * j as f64;
                let d = kernel_eval(&ch, x, y).unwrap() - kernel_eval(&sine, x, y).unwrap();
                worst = worst.max(d.norm());
            }
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn ch_kernel_approaches_sine_far_from_origin() {
        let ch = KernelSpec::ConfluentHyp { alpha: c(0.3), beta: c(0.0), s: 40.0 };
        let d = kernel_eval(&ch, 35.0, 35.0).unwrap();
        assert!((d.re - 1.0 / PI).abs() < 1e-2 && d.im.abs() < 1e-10, "{d}");
    }

    #[test]
    fn bessel_kernel_at_half_order() {
        // J_{1/2}: the r-variable kernel is a sine-kernel combination
        let spec = KernelSpec::Bessel { a: c(0.5), s: 4.0 };
        let (x, y) = (1.3_f64, 2.2_f64);
        let k = kernel_eval(&spec, x, y).unwrap().re;
        let (r1, r2) = (x.sqrt(), y.sqrt());
        let sinc = |u: f64| u.sin() / u;
        let want = (sinc(r1 - r2) - sinc(r1 + r2)) / (2.0 * PI * (r1 * r2).sqrt());
        assert!((k - want).abs() < 1e-13, "{k} vs {want}");
    }

    #[test]
    fn airy_monotone_and_cutoff_stable() {
        let d0 = fredholm_det(&KernelSpec::Airy { s: 0.0 }, 60).unwrap();
        let d1 = fredholm_det(&KernelSpec::Airy { s: -1.0 }, 60).unwrap();
        assert!(d1 < d0 && d0 < 1.0);
        assert!((d0 - 0.969372828355262).abs() < 1e-9, "{d0}");
        // longer truncation leaves the value alone
        let b = airy_cutoff();
        let far = gl_rule(0.0, 2.0 * b, 120);
        let x = &far.nodes;
        let d = integrable(&KernelSpec::Airy { s: 0.0 }, x).unwrap();
        let n = x.len();
        let a = Matrix::from_fn(n, |i, j| {
            let k = if i == j { d.diag[i] } else { off_diagonal(&KernelSpec::Airy { s: 0.0 }, &d, x, i, j) };
            (if i == j { 1.0 } else { 0.0 }) - far.weights[i].sqrt() * k * far.weights[j].sqrt()
        });
        let dl = log_det(&a).value().re;
        assert!((dl - d0).abs() < 1e-12, "{dl} vs {d0}");
    }

    #[test]
    fn ch_determinant_is_real_for_real_alpha_imaginary_beta() {
        let spec = KernelSpec::ConfluentHyp { alpha: c(0.3), beta: Complex64::new(0.0, 0.2), s: 2.0 };
        let d = fredholm_det_with(&spec, 60, &FredholmOptions::default()).unwrap();
        assert!(d.im.abs() <= 1e-10, "{d}");
        assert!(d.re > 0.0 && d.re < 1.0);
    }

    #[test]
    fn arc_coefficients_match_quadrature() {
        let (s, n) = (1.0, 16);
        let sym = FHSymbol::smooth(vec![]).unwrap().with_gap(2.0 * s / n as f64).unwrap();
        let q = sym.fourier_coeffs(-5, 5).unwrap();
        let a = arc_coeffs(s, n);
        for k in -5..=5 {
            assert!((q.get(k) - a.get(k)).norm() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn half_line_closed_form() {
        let t = MomentTable::exponential(3.0, None, 7, 40).unwrap();
        let (ld, _) = hankel_det_certified(&t, 4).unwrap();
        assert!((ld.log_modulus - half_line_log_det(3.0, 4)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(fredholm_det(&KernelSpec::Sine { s: -1.0 }, 20).is_err());
        assert!(fredholm_det(&KernelSpec::Bessel { a: c(-1.5), s: 1.0 }, 20).is_err());
        assert!(fredholm_det(&KernelSpec::Sine { s: 1.0 }, 5).is_err());
        assert!(kernel_eval(&KernelSpec::Bessel { a: c(0.0), s: 1.0 }, -1.0, 0.5).is_err());
    }
}
