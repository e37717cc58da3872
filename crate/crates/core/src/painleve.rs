//! The sigma-form Painleve V transcendent of the merging-singularity
//! transition, and the Hastings-McLeod Painleve II solution behind the
//! Tracy-Widom distribution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::quad::gauss_legendre;
use crate::specfun::{airy_ai, near_nonpositive_integer, recip_gamma};

/// (A, B, C, D) of the Painleve V equation matching the sigma-form with
/// parameters (alpha, beta).
pub fn pv_parameters(alpha: Complex64, beta: Complex64) -> [Complex64; 4] {
    [
        0.5 * (alpha - beta) * (alpha - beta),
        -0.5 * (alpha + beta) * (alpha + beta),
        1.0 + 2.0 * beta,
        Complex64::new(-0.5, 0.0),
    ]
}

/// sigma(x) on a grid uniform in ln x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSolution {
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Increasing x values, uniform in ln x.
    pub grid: Vec<f64>,
    pub sigma_values: Vec<f64>,
    /// x sigma'(x) on the grid.
    pub x_sigma_prime: Vec<f64>,
    /// Largest interval around x = 1 on which the finite-difference residual
    /// of the sigma-form stays below 1e-7.
    pub validated_range: (f64, f64),
    /// The constant of the x -> +inf behaviour sigma ~ kappa x^{2 alpha - 1} e^{-x},
    /// kappa = 1/(Gamma(alpha - beta) Gamma(alpha + beta)).
    pub kappa: f64,
    // cumulative int_0^{x_i} (sigma - alpha^2 + beta^2) dx/x
    cumulative: Vec<f64>,
    h: f64,
}

// alpha real, beta imaginary: everything below is real
#[derive(Debug, Clone, Copy)]
struct Params {
    alpha: f64,
    // beta^2, real and <= 0
    beta2: f64,
}

impl Params {
    fn a(&self) -> f64 {
        self.alpha * self.alpha - self.beta2
    }

    fn q_prime(&self, s: f64) -> f64 {
        let u = s + self.alpha;
        8.0 * s * (u * u - self.beta2) + 8.0 * s * s * u
    }

    fn q(&self, s: f64) -> f64 {
        let u = s + self.alpha;
        4.0 * s * s * (u * u - self.beta2)
    }

    /// (x sigma'')^2 - P^2 + Q(sigma')
    fn residual(&self, x: f64, s: f64, ds: f64, d2s: f64) -> f64 {
        let p = s - x * ds + 2.0 * ds * ds + 2.0 * self.alpha * ds;
        let l = x * d2s;
        l * l - p * p + self.q(ds)
    }

    // y = (sigma, x sigma', x^2 sigma'') as functions of t = ln x
    fn rhs(&self, t: f64, y: &[f64; 3]) -> [f64; 3] {
        let x = t.exp();
        let (s, p, r) = (y[0], y[1], y[2]);
        let ds = p / x;
        let big_p = s - p + 2.0 * ds * ds + 2.0 * self.alpha * ds;
        [p, p + r, r + x * (big_p * (4.0 * ds + 2.0 * self.alpha - x) - 0.5 * self.q_prime(ds))]
    }
}

fn validate_sigma_params(alpha: Complex64, beta: Complex64) -> Result<Params> {
    if alpha.im != 0.0 || beta.re != 0.0 {
        return Err(Error::Parameter(
            "the sigma solver is restricted to real alpha and purely imaginary beta".into(),
        ));
    }
    if alpha.re <= -0.5 {
        return Err(Error::Parameter(format!("alpha = {} must exceed -1/2", alpha.re)));
    }
    for g in [alpha + beta, alpha - beta] {
        if near_nonpositive_integer(g + 1.0, 1e-12) {
            return Err(Error::Parameter(format!("alpha +- beta = {g} is a negative integer")));
        }
    }
    Ok(Params { alpha: alpha.re, beta2: -beta.im * beta.im })
}

/// Coefficients l_k of sigma'/sigma = sum l_k x^{-k} for the decaying
/// solution, from (l^2 - w^2 l_w)^2 = (w - l + 2 alpha w l)^2 - 4(alpha^2 - beta^2) w^2 l^2, w = 1/x.
fn log_derivative_series(p: &Params, order: usize) -> Vec<f64> {
    let mul = |a: &[f64], b: &[f64], k: usize| -> f64 { (0..=k).map(|i| a[i] * b[k - i]).sum() };
    let mut l = vec![0.0; order + 1];
    l[0] = -1.0;
    let a2 = p.a();
    for k in 1..=order {
        l[k] = 0.0;
        let m = k + 1;
        // (l^2 - w^2 l_w)
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; m];
        for i in 0..m {
            u[i] = mul(&l, &l, i) - if i >= 1 { (i as f64 - 1.0) * l[i - 1] } else { 0.0 };
            // w - l + 2 alpha w l
            v[i] = -l[i] + if i == 1 { 1.0 } else { 0.0 } + if i >= 1 { 2.0 * p.alpha * l[i - 1] } else { 0.0 };
        }
        let mut ll = vec![0.0; m];
        for i in 0..m {
            ll[i] = mul(&l, &l, i);
        }
        // w^2 l^2 shifted by two orders
        let shifted = if k >= 2 { ll[k - 2] } else { 0.0 };
        let f = mul(&u, &u, k) - mul(&v, &v, k) + 4.0 * a2 * shifted;
        // f is linear in l_k with slope 4 l0^3 - 2 l0 = -2
        l[k] = f / 2.0;
    }
    l
}

/// Large-x values (sigma, x sigma', x^2 sigma'') of the decaying solution.
fn large_x_state(p: &Params, kappa: f64, x: f64) -> [f64; 3] {
    let l = log_derivative_series(p, 80);
    // truncate the divergent series at its smallest term
    let mut ell = l[0] + l[1] / x;
    let mut dell = -l[1] / (x * x);
    let mut expo = 0.0;
    let mut last = f64::INFINITY;
    for k in 2..l.len() {
        let term = l[k] * x.powi(-(k as i32));
        if term.abs() > last {
            break;
        }
        last = term.abs();
        ell += term;
        dell -= k as f64 * term / x;
        expo += l[k] * x.powi(1 - k as i32) / (1.0 - k as f64);
    }
    let sigma = kappa * x.powf(2.0 * p.alpha - 1.0) * (-x).exp() * expo.exp();
    [sigma, x * ell * sigma, x * x * sigma * (dell + ell * ell)]
}

const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand-Prince from t0 to t1 (either direction).
fn dopri(
    f: &impl Fn(f64, &[f64; 3]) -> [f64; 3],
    t0: f64,
    t1: f64,
    y0: [f64; 3],
    h_guess: &mut f64,
    rtol: f64,
    scale: &mut [f64; 3],
) -> Result<[f64; 3]> {
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let span = (t1 - t0).abs();
    let mut h = h_guess.abs().min(span);
    let mut steps = 0usize;
    while (t1 - t).abs() > 1e-15 * span.max(1.0) {
        steps += 1;
        if steps > 200_000 {
            return Err(Error::PoleProximity(format!("too many steps near ln x = {t}")));
        }
        h = h.min((t1 - t).abs());
        let mut k = [[0.0; 3]; 7];
        k[0] = f(t, &y);
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += dir * h * (0..s).map(|j| DP_A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + dir * h * DP_C[s], &ys);
        }
        let mut yn = y;
        let mut err: f64 = 0.0;
        for i in 0..3 {
            yn[i] += dir * h * (0..7).map(|j| DP_B[j] * k[j][i]).sum::<f64>();
            let e = dir * h * (0..7).map(|j| DP_E[j] * k[j][i]).sum::<f64>();
            scale[i] = scale[i].max(yn[i].abs());
            let tol = rtol * yn[i].abs().max(y[i].abs()) + 1e-3 * rtol * scale[i] + 1e-300;
            err = err.max(e.abs() / tol);
        }
        if !err.is_finite() || yn.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
        } else if err <= 1.0 {
            t += dir * h;
            y = yn;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-12 * span.max(1e-3) {
            return Err(Error::PoleProximity(format!("step size collapsed near x = {}", t.exp())));
        }
    }
    *h_guess = h;
    Ok(y)
}

/// Start of the backward integration.
pub const SIGMA_X_START: f64 = 40.0;
/// End of the backward integration.
pub const SIGMA_X_END: f64 = 1e-6;
const SIGMA_DT: f64 = 0.01;

// 7-point central differences on a uniform grid: first and second derivatives
fn fd(v: &[f64], i: usize, h: f64) -> (f64, f64) {
    let g = |o: isize| v[(i as isize + o) as usize];
    let d1 = (-g(-3) + 9.0 * g(-2) - 45.0 * g(-1) + 45.0 * g(1) - 9.0 * g(2) + g(3)) / (60.0 * h);
    let d2 = (2.0 * g(-3) - 27.0 * g(-2) + 270.0 * g(-1) - 490.0 * g(0) + 270.0 * g(1) - 27.0 * g(2) + 2.0 * g(3))
        / (180.0 * h * h);
    (d1, d2)
}

/// Integrate the sigma-form backward from x = max(x_max, 40), where sigma is
/// fixed by its exponentially small behaviour, down to x = 1e-6.
pub fn solve_sigma(alpha: Complex64, beta: Complex64, x_max: f64) -> Result<SigmaSolution> {
    let p = validate_sigma_params(alpha, beta)?;
    if !(x_max > 0.0 && x_max <= 500.0) {
        return Err(Error::Parameter(format!("x_max = {x_max} must lie in (0, 500]")));
    }
    let kappa = (recip_gamma(alpha - beta) * recip_gamma(alpha + beta)).re;
    let x_start = x_max.max(SIGMA_X_START);
    let (t_hi, t_lo) = (x_start.ln(), SIGMA_X_END.ln());
    let steps = ((t_hi - t_lo) / SIGMA_DT).ceil() as usize;
    let h = (t_hi - t_lo) / steps as f64;
    let mut ys = vec![[0.0; 3]; steps + 1];
    ys[steps] = large_x_state(&p, kappa, x_start);
    let f = |t: f64, y: &[f64; 3]| p.rhs(t, y);
    let mut hg = h / 4.0;
    let mut scale = [0.0; 3];
    for i in (0..steps).rev() {
        let t1 = t_lo + i as f64 * h;
        let t0 = t_lo + (i + 1) as f64 * h;
        ys[i] = dopri(&f, t0, t1, ys[i + 1], &mut hg, 1e-13, &mut scale)?;
    }
    let grid: Vec<f64> = (0..=steps).map(|i| (t_lo + i as f64 * h).exp()).collect();
    let sigma_values: Vec<f64> = ys.iter().map(|y| y[0]).collect();
    let x_sigma_prime: Vec<f64> = ys.iter().map(|y| y[1]).collect();
    let a = p.a();
    // cubic Hermite in t for int (sigma - a) dt
    let mut cumulative = vec![0.0; steps + 1];
    cumulative[0] = sigma_values[0] - a;
    for i in 0..steps {
        let (f0, f1) = (sigma_values[i] - a, sigma_values[i + 1] - a);
        let (d0, d1) = (x_sigma_prime[i], x_sigma_prime[i + 1]);
        cumulative[i + 1] = cumulative[i] + h * (f0 + f1) / 2.0 + h * h * (d0 - d1) / 12.0;
    }
    let mut sol = SigmaSolution {
        alpha,
        beta,
        grid,
        sigma_values,
        x_sigma_prime,
        validated_range: (0.0, 0.0),
        kappa,
        cumulative,
        h,
    };
    sol.validated_range = sol.validate(1e-7);
    Ok(sol)
}

impl SigmaSolution {
    fn params(&self) -> Params {
        Params { alpha: self.alpha.re, beta2: -self.beta.im * self.beta.im }
    }

    /// Residual of the sigma-form at interior grid points, from finite
    /// differences of the sigma values alone: (x, residual).
    pub fn residuals(&self) -> Vec<(f64, f64)> {
        let p = self.params();
        let n = self.grid.len();
        (3..n.saturating_sub(3))
            .map(|i| {
                let x = self.grid[i];
                let (st, stt) = fd(&self.sigma_values, i, self.h);
                let ds = st / x;
                let d2s = (stt - st) / (x * x);
                (x, p.residual(x, self.sigma_values[i], ds, d2s))
            })
            .collect()
    }

    fn validate(&self, tol: f64) -> (f64, f64) {
        let r = self.residuals();
        let Some(mid) = r.iter().position(|e| e.0 >= 1.0) else {
            return (0.0, 0.0);
        };
        if r[mid].1.abs() > tol {
            return (1.0, 1.0);
        }
        let mut lo = mid;
        while lo > 0 && r[lo - 1].1.abs() <= tol {
            lo -= 1;
        }
        let mut hi = mid;
        while hi + 1 < r.len() && r[hi + 1].1.abs() <= tol {
            hi += 1;
        }
        (r[lo].0, r[hi].0)
    }

    pub fn max_residual(&self, x_lo: f64, x_hi: f64) -> f64 {
        self.residuals()
            .iter()
            .filter(|e| e.0 >= x_lo && e.0 <= x_hi)
            .map(|e| e.1.abs())
            .fold(0.0, f64::max)
    }

    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let (lo, hi) = (self.grid[0], *self.grid.last().unwrap());
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!("x = {x} outside the solved range [{lo}, {hi}]")));
        }
        let u = (x.ln() - lo.ln()) / self.h;
        let i = (u.floor() as usize).min(self.grid.len() - 2);
        Ok((i, u - i as f64))
    }

    /// sigma(x) by cubic Hermite interpolation in ln x.
    pub fn sigma(&self, x: f64) -> Result<f64> {
        let (i, s) = self.locate(x)?;
        let (f0, f1) = (self.sigma_values[i], self.sigma_values[i + 1]);
        let (d0, d1) = (self.x_sigma_prime[i] * self.h, self.x_sigma_prime[i + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * d1)
    }

    /// Omega(x) = int_0^x (sigma - alpha^2 + beta^2) dy/y + (alpha^2 - beta^2) ln x.
    pub fn omega(&self, x: f64) -> Result<Complex64> {
        let a = self.params().a();
        let top = *self.grid.last().unwrap();
        if !(x > 0.0) {
            return Err(Error::Domain(format!("Omega needs x > 0, got {x}")));
        }
        if x < self.grid[0] {
            // sigma - a is linear in x to leading order there
            let v = (self.sigma_values[0] - a) * x / self.grid[0] + a * x.ln();
            return Ok(v.into());
        }
        if x > top {
            let tail = *self.sigma_values.last().unwrap() / top * (1.0 - (top - x).exp());
            return Ok((self.omega(top)?.re + tail).into());
        }
        let (i, s) = self.locate(x)?;
        let h = self.h;
        let (f0, f1) = (self.sigma_values[i] - a, self.sigma_values[i + 1] - a);
        let (d0, d1) = (self.x_sigma_prime[i] * h, self.x_sigma_prime[i + 1] * h);
        // integrals of the Hermite basis over [0, s]
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let part = (0.5 * s4 - s3 + s) * f0
            + (0.25 * s4 - 2.0 / 3.0 * s3 + 0.5 * s2) * d0
            + (-0.5 * s4 + s3) * f1
            + (0.25 * s4 - s3 / 3.0) * d1;
        Ok((self.cumulative[i] + h * part + a * x.ln()).into())
    }

    /// Omega(+inf), the last grid value plus the exponentially small tail.
    pub fn omega_infinity(&self) -> Result<Complex64> {
        let top = *self.grid.last().unwrap();
        Ok(self.omega(top)? + *self.sigma_values.last().unwrap() / top)
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Parameter(format!("csv: {e}"));
        out.write_record(["x", "sigma"]).map_err(io)?;
        for (x, s) in self.grid.iter().zip(&self.sigma_values) {
            out.write_record([x.to_string(), s.to_string()]).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Parameter(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Omega(X) for (alpha, beta), solving the sigma-form over (0, X].
pub fn omega(alpha: Complex64, beta: Complex64, x: f64) -> Result<Complex64> {
    solve_sigma(alpha, beta, x.min(500.0))?.omega(x)
}

// Chebyshev-Lobatto points on [a, b], increasing, with barycentric weights.
struct Piece {
    a: f64,
    b: f64,
    x: Vec<f64>,
    w: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Piece {
    fn new(a: f64, b: f64, n: usize) -> Piece {
        let x: Vec<f64> = (0..=n).map(|j| a + 0.5 * (b - a) * (1.0 - (PI * j as f64 / n as f64).cos())).collect();
        let w: Vec<f64> = (0..=n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let m = n + 1;
        let mut d1 = vec![0.0; m * m];
        for i in 0..m {
            let mut diag = 0.0;
            for j in 0..m {
                if i != j {
                    let v = (w[j] / w[i]) / (x[i] - x[j]);
                    d1[i * m + j] = v;
                    diag -= v;
                }
            }
            d1[i * m + i] = diag;
        }
        let mut d2 = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                let a = d1[i * m + k];
                if a != 0.0 {
                    for j in 0..m {
                        d2[i * m + j] += a * d1[k * m + j];
                    }
                }
            }
        }
        Piece { a, b, x, w, d1, d2 }
    }

    fn apply(&self, d: &[f64], u: &[f64]) -> Vec<f64> {
        let m = self.x.len();
        (0..m).map(|i| (0..m).map(|j| d[i * m + j] * u[j]).sum()).collect()
    }

    fn interpolate(&self, f: &[f64], t: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.x.len() {
            let d = t - self.x[j];
            if d == 0.0 {
                return f[j];
            }
            let c = self.w[j] / d;
            num += c * f[j];
            den += c;
        }
        num / den
    }
}

/// The Hastings-McLeod solution of u'' = x u + 2 u^3 by multi-domain
/// Chebyshev collocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HastingsMcLeod {
    pub grid: Vec<f64>,
    pub u_values: Vec<f64>,
    pub u_prime_values: Vec<f64>,
    /// Newton iterations used.
    pub iterations: usize,
    #[serde(skip)]
    pieces: PieceData,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct PieceData {
    bounds: Vec<f64>,
    // u on each piece's Lobatto points, and u''
    u: Vec<Vec<f64>>,
    upp: Vec<Vec<f64>>,
    order: usize,
}

/// The x -> -inf expansion sqrt(-x/2)(1 + 1/(8x^3) - 73/(128x^6) + 10657/(1024x^9)).
pub fn hastings_mcleod_left(x: f64) -> f64 {
    let x3 = x * x * x;
    (-x / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * x3) - 73.0 / (128.0 * x3 * x3) + 10657.0 / (1024.0 * x3 * x3 * x3))
}

const HM_ORDER: usize = 24;

pub fn hastings_mcleod(x_min: f64, x_max: f64) -> Result<HastingsMcLeod> {
    if !(x_max >= 6.0 && x_min >= -12.0 && x_min < x_max - 1.0) {
        return Err(Error::Parameter(format!(
            "need x_max >= 6 and -12 <= x_min < x_max - 1, got [{x_min}, {x_max}]"
        )));
    }
    let k = (x_max - x_min).ceil() as usize;
    let bounds: Vec<f64> = (0..=k).map(|i| x_min + (x_max - x_min) * i as f64 / k as f64).collect();
    let n = HM_ORDER;
    let m = n + 1;
    let pieces: Vec<Piece> = bounds.windows(2).map(|w| Piece::new(w[0], w[1], n)).collect();
    let total = k * m;
    let left = if x_min < -4.0 { hastings_mcleod_left(x_min) } else { hm_guess(x_min)? };
    let right = airy_ai(x_max)?.0;
    let mut u: Vec<f64> = Vec::with_capacity(total);
    for p in &pieces {
        for &x in &p.x {
            u.push(hm_guess(x)?);
        }
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > 40 {
            return Err(Error::Instability("Newton iteration for Painleve II did not converge".into()));
        }
        let mut f = vec![0.0; total];
        let mut jac = Matrix::zeros(total);
        let mut row = 0;
        for (pi, p) in pieces.iter().enumerate() {
            let off = pi * m;
            let up = &u[off..off + m];
            let scale = (p.b - p.a) * (p.b - p.a);
            for i in 1..n {
                let d2u: f64 = (0..m).map(|j| p.d2[i * m + j] * up[j]).sum();
                f[row] = (d2u - p.x[i] * up[i] - 2.0 * up[i].powi(3)) * scale;
                for j in 0..m {
                    jac.data[row * total + off + j] = (p.d2[i * m + j]).into();
                }
                jac.data[row * total + off + i] -= Complex64::from(p.x[i] + 6.0 * up[i] * up[i]);
                for j in 0..m {
                    jac.data[row * total + off + j] *= scale;
                }
                row += 1;
            }
        }
        // interfaces: continuity of u and u'
        for pi in 0..k - 1 {
            let (a, b) = (&pieces[pi], &pieces[pi + 1]);
            let (oa, ob) = (pi * m, (pi + 1) * m);
            f[row] = u[oa + n] - u[ob];
            jac.data[row * total + oa + n] = 1.0.into();
            jac.data[row * total + ob] = (-1.0).into();
            row += 1;
            let da: f64 = (0..m).map(|j| a.d1[n * m + j] * u[oa + j]).sum();
            let db: f64 = (0..m).map(|j| b.d1[j] * u[ob + j]).sum();
            f[row] = da - db;
            for j in 0..m {
                jac.data[row * total + oa + j] = a.d1[n * m + j].into();
                jac.data[row * total + ob + j] = (-b.d1[j]).into();
            }
            row += 1;
        }
        f[row] = u[0] - left;
        jac.data[row * total] = 1.0.into();
        row += 1;
        f[row] = u[total - 1] - right;
        jac.data[row * total + total - 1] = 1.0.into();
        let lu = Lu::factor(&jac);
        let rhs: Vec<Complex64> = f.iter().map(|&v| v.into()).collect();
        let du = lu.solve(&rhs);
        let mut step: f64 = 0.0;
        for (ui, d) in u.iter_mut().zip(&du) {
            if !d.re.is_finite() {
                return Err(Error::Instability("singular Newton system for Painleve II".into()));
            }
            *ui -= d.re;
            step = step.max(d.re.abs());
        }
        let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // quadratic convergence stalls at the rounding floor
        if step < 1e-12 * umax {
            break;
        }
    }
    let mut grid = Vec::new();
    let mut u_values = Vec::new();
    let mut u_prime_values = Vec::new();
    let mut pu = Vec::new();
    let mut pupp = Vec::new();
    for (pi, p) in pieces.iter().enumerate() {
        let up = &u[pi * m..(pi + 1) * m];
        let d = p.apply(&p.d1, up);
        let start = if pi == 0 { 0 } else { 1 };
        for j in start..m {
            grid.push(p.x[j]);
            u_values.push(up[j]);
            u_prime_values.push(d[j]);
        }
        pu.push(up.to_vec());
        pupp.push(p.apply(&p.d2, up));
    }
    if u_values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Instability("collocation produced a non-positive u".into()));
    }
    Ok(HastingsMcLeod {
        grid,
        u_values,
        u_prime_values,
        iterations,
        pieces: PieceData { bounds, u: pu, upp: pupp, order: n },
    })
}

fn hm_guess(x: f64) -> Result<f64> {
    let ai = airy_ai(x)?.0;
    Ok(((-x).max(0.0) / 2.0 + ai * ai).sqrt())
}

impl HastingsMcLeod {
    pub fn x_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    fn piece_at(&self, x: f64) -> Result<(Piece, usize)> {
        let b = &self.pieces.bounds;
        if !(x >= b[0] && x <= *b.last().unwrap()) {
            return Err(Error::Domain(format!("x = {x} outside [{}, {}]", b[0], b.last().unwrap())));
        }
        let i = b.windows(2).position(|w| x <= w[1]).unwrap_or(b.len() - 2);
        Ok((Piece::new(b[i], b[i + 1], self.pieces.order), i))
    }

    /// u(x) by barycentric interpolation.
    pub fn u(&self, x: f64) -> Result<f64> {
        let (p, i) = self.piece_at(x)?;
        Ok(p.interpolate(&self.pieces.u[i], x))
    }

    /// u'' - x u - 2u^3 at x, from interpolated u and u''.
    pub fn residual(&self, x: f64) -> Result<f64> {
        let (p, i) = self.piece_at(x)?;
        let u = p.interpolate(&self.pieces.u[i], x);
        let upp = p.interpolate(&self.pieces.upp[i], x);
        Ok(upp - x * u - 2.0 * u * u * u)
    }

    /// ln F_TW(s) = -int_s^inf (x - s) u(x)^2 dx.
    pub fn log_cdf(&self, s: f64) -> Result<f64> {
        let lo = self.x_min() + 1.0;
        if !(s >= lo) {
            return Err(Error::Domain(format!("s = {s} below {lo}")));
        }
        let top = self.x_max();
        let (i0, i1) = airy_tail(top.max(s))?;
        let mut total = i1 - s * i0;
        if s < top {
            let gl = gauss_legendre(40);
            let b = &self.pieces.bounds;
            for (pi, w) in b.windows(2).enumerate() {
                if w[1] <= s {
                    continue;
                }
                let (a, bb) = (w[0].max(s), w[1]);
                let p = Piece::new(w[0], w[1], self.pieces.order);
                let h = 0.5 * (bb - a);
                for (t, wt) in gl.0.iter().zip(&gl.1) {
                    let x = a + h * (t + 1.0);
                    let u = p.interpolate(&self.pieces.u[pi], x);
                    total += wt * h * (x - s) * u * u;
                }
            }
        }
        Ok(-total)
    }

    pub fn cdf(&self, s: f64) -> Result<f64> {
        Ok(self.log_cdf(s)?.exp())
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Parameter(format!("csv: {e}"));
        out.write_record(["x", "u", "u_prime"]).map_err(io)?;
        for i in 0..self.grid.len() {
            out.write_record([self.grid[i].to_string(), self.u_values[i].to_string(), self.u_prime_values[i].to_string()])
                .map_err(io)?;
        }
        out.flush().map_err(|e| Error::Parameter(format!("csv: {e}")))?;
        Ok(())
    }
}

// (int_X^inf Ai^2, int_X^inf x Ai^2)
fn airy_tail(x: f64) -> Result<(f64, f64)> {
    let (a, d) = airy_ai(x)?;
    let i0 = d * d - x * a * a;
    let i1 = -(x * x * a * a - x * d * d + a * d) / 3.0;
    Ok((i0, i1))
}

/// The default Hastings-McLeod solution on [-12, 8], computed once.
pub fn default_hastings_mcleod() -> Result<&'static HastingsMcLeod> {
    static HM: OnceLock<std::result::Result<HastingsMcLeod, Error>> = OnceLock::new();
    HM.get_or_init(|| hastings_mcleod(-12.0, 8.0)).as_ref().map_err(|e| e.clone())
}

/// F_TW(s); beyond the solved range the Airy-tail bound is used.
pub fn tracy_widom_cdf(s: f64) -> Result<f64> {
    Ok(tracy_widom_log_cdf(s)?.exp())
}

pub fn tracy_widom_log_cdf(s: f64) -> Result<f64> {
    let hm = default_hastings_mcleod()?;
    if s > hm.x_max() {
        let (i0, i1) = airy_tail(s)?;
        return Ok(-(i1 - s * i0));
    }
    hm.log_cdf(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::log_barnes_g;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parameter_identities() {
        for (a, b) in [(c(0.3, 0.0), c(0.0, 0.2)), (c(0.7, 0.1), c(-0.3, 0.4))] {
            let [pa, pb, pc, pd] = pv_parameters(a, b);
            assert!((pa + pb + 2.0 * a * b).norm() < 1e-15);
            assert!((pc - 1.0 - 2.0 * b).norm() < 1e-15);
            assert_eq!(pd, c(-0.5, 0.0));
        }
    }

    #[test]
    fn log_derivative_series_leading_terms() {
        let p = Params { alpha: 0.3, beta2: -0.04 };
        let l = log_derivative_series(&p, 6);
        assert_eq!(l[0], -1.0);
        assert!((l[1] - (2.0 * 0.3 - 1.0)).abs() < 1e-14, "{}", l[1]);
    }

    #[test]
    fn trivial_parameters_give_zero() {
        let s = solve_sigma(c(0.0, 0.0), c(0.0, 0.0), 30.0).unwrap();
        assert!(s.sigma_values.iter().all(|v| *v == 0.0));
        assert_eq!(s.omega(5.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn sigma_limits_and_residual() {
        let (al, be) = (c(0.3, 0.0), c(0.0, 0.0));
        let s = solve_sigma(al, be, 30.0).unwrap();
        assert!((s.sigma_values[0] - 0.09).abs() < 1e-4, "{}", s.sigma_values[0]);
        // x^{2a-1} e^{-x} (-1)/(Gamma(a-b)Gamma(a+b)) has the right size but
        // the opposite sign: with kappa < 0 the solution tends to a negative
        // constant at 0 instead of alpha^2 - beta^2
        let big = s.sigma(30.0).unwrap();
        let paper = -30f64.powf(-0.4) * (-30f64).exp() / crate::specfun::log_gamma(c(0.3, 0.0)).unwrap().re.exp().powi(2);
        assert!(((big.abs() - paper.abs()) / paper).abs() < 0.2, "{big} vs {paper}");
        assert!(big > 0.0 && paper < 0.0);
        // the linear term at 0 is -(alpha^2 - beta^2)/(2 alpha) x
        let slope = (s.sigma(1e-5).unwrap() - 0.09) / 1e-5;
        assert!((slope + 0.15).abs() < 1e-3, "{slope}");
        assert!(s.max_residual(0.01, 20.0) <= 1e-6);
        // Omega on (0, X] vanishes as X -> 0 after the log is removed
        let x = 1e-5;
        assert!((s.omega(x).unwrap().re - 0.09 * x.ln()).abs() < 1e-4);
    }

    #[test]
    fn omega_infinity_identity() {
        for (al, be) in [(c(0.3, 0.0), c(0.0, 0.0)), (c(0.5, 0.0), c(0.0, 0.0)), (c(0.3, 0.0), c(0.0, 0.2))] {
            let s = solve_sigma(al, be, 40.0).unwrap();
            let g = log_barnes_g(1.0 + al + be).unwrap() + log_barnes_g(1.0 + al - be).unwrap()
                - log_barnes_g(1.0 + 2.0 * al).unwrap();
            let d = (s.omega_infinity().unwrap() + g).norm();
            assert!(d <= 1e-3, "alpha={al} beta={be}: {d}");
        }
    }

    #[test]
    fn rejects_complex_regime() {
        assert!(solve_sigma(c(0.3, 0.1), c(0.0, 0.0), 10.0).is_err());
        assert!(solve_sigma(c(0.3, 0.0), c(0.2, 0.0), 10.0).is_err());
    }

    #[test]
    fn hastings_mcleod_properties() {
        let hm = default_hastings_mcleod().unwrap();
        assert!((hm.u(6.0).unwrap() - airy_ai(6.0).unwrap().0).abs() < 1e-8);
        assert_eq!(*hm.u_values.last().unwrap(), airy_ai(8.0).unwrap().0);
        let worst = (0..50).map(|i| hm.residual(-11.9 + 19.7 * (i as f64 + 0.37) / 50.0).unwrap().abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{worst}");
        assert!(hm.u_values.iter().all(|&u| u > 0.0));
    }

    #[test]
    fn tracy_widom_values() {
        let f = |s: f64| tracy_widom_cdf(s).unwrap();
        assert!(f(-2.0) < f(0.0) && f(0.0) < f(2.0));
        assert!((f(0.0) - 0.969372828355262).abs() < 1e-10, "{}", f(0.0));
        assert!((f(20.0) - 1.0).abs() < 1e-15);
        // (ln F)'' = -u^2
        let hm = default_hastings_mcleod().unwrap();
        let h = 1e-3;
        for s in [-3.0, -1.0, 0.5] {
            let l = |x: f64| tracy_widom_log_cdf(x).unwrap();
            let d2 = (l(s + h) - 2.0 * l(s) + l(s - h)) / (h * h);
            let u = hm.u(s).unwrap();
            assert!((d2 + u * u).abs() < 1e-5, "s={s}");
        }
    }
}
