//! Gauss-Legendre rules and graded composite rules.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let r = Arc::new(compute_gl(n));
    cache.lock().unwrap().insert(n, r.clone());
    r
}

fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        // recompute derivative at the converged node
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        if n > 1 {
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// A quadrature rule with real nodes and (possibly complex) weights.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<Complex64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push_gl(&mut self, a: f64, b: f64, n: usize) {
        let gl = gauss_legendre(n);
        let (h, m) = ((b - a) / 2.0, (a + b) / 2.0);
        for (x, w) in gl.0.iter().zip(gl.1.iter()) {
            self.nodes.push(m + h * x);
            self.weights.push(Complex64::new(h * w, 0.0));
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn real_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.re).collect()
    }
}

/// Panel layout for one interval, with optional algebraic behaviour
/// `(x - a)^ga` / `(b - x)^gb` at the ends.
#[derive(Debug, Clone, Copy)]
pub struct PanelSpec {
    pub max_width: f64,
    pub points: usize,
    pub ratio: f64,
    pub levels: usize,
    /// Approximate the innermost piece of a graded end by its leading
    /// power behaviour instead of dropping it.
    pub end_correction: bool,
}

impl Default for PanelSpec {
    fn default() -> Self {
        PanelSpec { max_width: 1.0, points: 20, ratio: 0.15, levels: 16, end_correction: true }
    }
}

/// Composite Gauss-Legendre rule on [a, b], geometrically graded toward the
/// ends that carry an exponent.
pub fn graded_rule(a: f64, b: f64, ga: Option<Complex64>, gb: Option<Complex64>, spec: &PanelSpec) -> Rule {
    let mut rule = Rule::default();
    append_graded(&mut rule, a, b, ga, gb, spec);
    rule
}

pub fn append_graded(rule: &mut Rule, a: f64, b: f64, ga: Option<Complex64>, gb: Option<Complex64>, spec: &PanelSpec) {
    let len = b - a;
    if len <= 0.0 {
        return;
    }
    let mut panels = (len / spec.max_width).ceil().max(1.0) as usize;
    if ga.is_some() && gb.is_some() && panels < 2 {
        panels = 2;
    }
    let h = len / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == panels { b } else { lo + h };
        let grade_lo = p == 0 && ga.is_some();
        let grade_hi = p + 1 == panels && gb.is_some();
        match (grade_lo, grade_hi) {
            (false, false) => rule.push_gl(lo, hi, spec.points),
            (true, false) => graded_piece(rule, lo, hi - lo, 1.0, ga.unwrap(), spec),
            (false, true) => graded_piece(rule, hi, hi - lo, -1.0, gb.unwrap(), spec),
            (true, true) => {
                let mid = 0.5 * (lo + hi);
                graded_piece(rule, lo, mid - lo, 1.0, ga.unwrap(), spec);
                graded_piece(rule, hi, hi - mid, -1.0, gb.unwrap(), spec);
            }
        }
    }
}

// geometric panels from `end` going a distance `h` in direction `dir`
fn graded_piece(rule: &mut Rule, end: f64, h: f64, dir: f64, g: Complex64, spec: &PanelSpec) {
    let q = spec.ratio;
    let mut outer = h;
    for _ in 0..spec.levels {
        let inner = outer * q;
        let (x0, x1) = (end + dir * inner, end + dir * outer);
        rule.push_gl(x0.min(x1), x0.max(x1), spec.points);
        outer = inner;
    }
    if spec.end_correction {
        // int_0^eps t^g dt = eps * eps^g / (1 + g)
        rule.nodes.push(end + dir * outer);
        rule.weights.push(Complex64::new(outer, 0.0) / (1.0 + g));
    }
}
