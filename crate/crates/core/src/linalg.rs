//! Dense complex LU and a log-determinant accumulator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A determinant stored as ln|det| and arg det in (-pi, pi].
/// A vanishing determinant has `log_modulus == -inf` and phase 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub log_modulus: f64,
    pub phase: f64,
}

pub(crate) fn wrap_phase(p: f64) -> f64 {
    let mut r = p.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

impl LogDet {
    pub const ONE: LogDet = LogDet { log_modulus: 0.0, phase: 0.0 };
    pub const ZERO: LogDet = LogDet { log_modulus: f64::NEG_INFINITY, phase: 0.0 };

    pub fn from_complex(z: Complex64) -> Self {
        if z.norm() == 0.0 {
            return Self::ZERO;
        }
        LogDet { log_modulus: z.norm().ln(), phase: z.arg() }
    }

    /// From a complex logarithm; only its imaginary part modulo 2 pi matters.
    pub fn from_log(l: Complex64) -> Self {
        LogDet { log_modulus: l.re, phase: wrap_phase(l.im) }
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == f64::NEG_INFINITY
    }

    pub fn mul(self, other: LogDet) -> LogDet {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        LogDet {
            log_modulus: self.log_modulus + other.log_modulus,
            phase: wrap_phase(self.phase + other.phase),
        }
    }

    pub fn div(self, other: LogDet) -> LogDet {
        LogDet {
            log_modulus: self.log_modulus - other.log_modulus,
            phase: wrap_phase(self.phase - other.phase),
        }
    }

    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.log_modulus, self.phase)
    }

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_modulus.exp(), self.phase)
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// LU factors with partial pivoting: P A = L U.
#[derive(Debug, Clone)]
pub struct Lu {
    pub n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Lu {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let piv = lu[k * n + k];
            if piv.norm() == 0.0 {
                continue;
            }
            let inv = 1.0 / piv;
            let (top, rest) = lu.split_at_mut((k + 1) * n);
            let row_k = &top[k * n..k * n + n];
            for row in rest.chunks_mut(n) {
                let l = row[k] * inv;
                row[k] = l;
                if l.norm() != 0.0 {
                    for j in k + 1..n {
                        row[j] -= l * row_k[j];
                    }
                }
            }
        }
        Lu { n, lu, perm, swaps }
    }

    pub fn log_det(&self) -> LogDet {
        let n = self.n;
        let mut lm = 0.0;
        let mut ph = if self.swaps % 2 == 1 { PI } else { 0.0 };
        for k in 0..n {
            let d = self.lu[k * n + k];
            if d.norm() == 0.0 {
                return LogDet::ZERO;
            }
            lm += d.norm().ln();
            ph = wrap_phase(ph + d.arg());
        }
        LogDet { log_modulus: lm, phase: ph }
    }

    pub fn pivots(&self) -> Vec<Complex64> {
        (0..self.n).map(|k| self.lu[k * self.n + k]).collect()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// 1-norm condition number, from the explicit inverse.
    pub fn condition(&self, a: &Matrix) -> f64 {
        let n = self.n;
        if self.log_det().is_zero() {
            return f64::INFINITY;
        }
        let mut inv_norm: f64 = 0.0;
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            inv_norm = inv_norm.max(col.iter().map(|v| v.norm()).sum());
        }
        a.norm1() * inv_norm
    }
}

pub fn log_det(a: &Matrix) -> LogDet {
    Lu::factor(a).log_det()
}
