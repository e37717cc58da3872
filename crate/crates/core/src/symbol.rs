//! Symbols on the unit circle with Fisher-Hartwig singularities.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, PanelSpec};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FHSingularity {
    pub theta: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl FHSingularity {
    pub fn new(theta: f64, alpha: Complex64, beta: Complex64) -> Self {
        FHSingularity { theta, alpha, beta }
    }

    pub fn is_genuine(&self) -> bool {
        self.alpha != Complex64::new(0.0, 0.0) || self.beta != Complex64::new(0.0, 0.0)
    }
}

/// f(z) = e^{V(z)} z^{sum beta_j} prod |z - z_j|^{2 alpha_j} g_j(z) z_j^{-beta_j},
/// optionally set to zero on the arc |arg z| < gap.
#[derive(Debug, Clone, PartialEq)]
pub struct FHSymbol {
    v: Vec<(i64, Complex64)>,
    sings: Vec<FHSingularity>,
    gap: Option<f64>,
}

/// Fourier coefficients f_k for k in [k_min, k_min + len).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub k_min: i64,
    pub values: Vec<Complex64>,
}

impl CoeffTable {
    pub fn from_fn(k_min: i64, k_max: i64, f: impl Fn(i64) -> Complex64) -> Self {
        CoeffTable { k_min, values: (k_min..=k_max).map(f).collect() }
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.k_min && k <= self.k_max()
    }

    /// Panics when k is outside the table.
    #[inline]
    pub fn get(&self, k: i64) -> Complex64 {
        assert!(self.contains(k), "coefficient {k} not in table [{}, {}]", self.k_min, self.k_max());
        self.values[(k - self.k_min) as usize]
    }
}

/// Splitting of e^{V} into e^{V_0} b_+ b_-.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerHopf {
    pub v0: Complex64,
    pub plus: Vec<(i64, Complex64)>,
    pub minus: Vec<(i64, Complex64)>,
}

impl WienerHopf {
    pub fn b_plus(&self, z: Complex64) -> Complex64 {
        self.plus.iter().map(|&(k, c)| c * z.powi(k as i32)).sum::<Complex64>().exp()
    }

    pub fn b_minus(&self, z: Complex64) -> Complex64 {
        self.minus.iter().map(|&(k, c)| c * z.powi(k as i32)).sum::<Complex64>().exp()
    }
}

/// One element of the set of FH-representations: integer shifts n_j with
/// sum n_j = 0 and the shifted exponents beta_j + n_j.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FHRepresentation {
    pub shifts: Vec<i64>,
    pub betas: Vec<Complex64>,
    /// sum_j (Re beta_j + n_j)^2
    pub weight: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub theta: f64,
    pub anchor: Option<(usize, f64)>,
    pub weight: Complex64,
}

impl FHSymbol {
    pub fn new(v: Vec<(i64, Complex64)>, singularities: Vec<FHSingularity>) -> Result<Self> {
        let mut vv: Vec<(i64, Complex64)> = Vec::new();
        for (k, c) in v {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Parameter(format!("V_{k} is not finite")));
            }
            match vv.iter_mut().find(|e| e.0 == k) {
                Some(e) => e.1 += c,
                None => vv.push((k, c)),
            }
        }
        vv.retain(|e| e.1 != Complex64::new(0.0, 0.0));
        vv.sort_by_key(|e| e.0);
        let mut sings = singularities;
        for s in &sings {
            if !(0.0..TWO_PI).contains(&s.theta) {
                return Err(Error::Parameter(format!("theta = {} outside [0, 2pi)", s.theta)));
            }
            if s.alpha.re <= -0.5 {
                return Err(Error::Parameter(format!("Re alpha = {} must exceed -1/2", s.alpha.re)));
            }
        }
        sings.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
        if sings.windows(2).any(|w| w[0].theta == w[1].theta) {
            return Err(Error::Parameter("two singularities share an angle".into()));
        }
        if sings.first().map_or(true, |s| s.theta != 0.0) {
            sings.insert(0, FHSingularity::new(0.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        }
        if sings.iter().skip(1).any(|s| !s.is_genuine()) {
            return Err(Error::Parameter("singularities away from z = 1 need (alpha, beta) != (0, 0)".into()));
        }
        Ok(FHSymbol { v: vv, sings, gap: None })
    }

    pub fn smooth(v: Vec<(i64, Complex64)>) -> Result<Self> {
        Self::new(v, vec![])
    }

    /// Symbol with the arc |arg z| < gap removed (f = 0 there).
    pub fn with_gap(mut self, gap: f64) -> Result<Self> {
        if !(gap > 0.0 && gap < PI) {
            return Err(Error::Parameter(format!("gap {gap} must lie in (0, pi)")));
        }
        self.gap = Some(gap);
        Ok(self)
    }

    pub fn gap(&self) -> Option<f64> {
        self.gap
    }

    pub fn singularities(&self) -> &[FHSingularity] {
        &self.sings
    }

    pub fn genuine_count(&self) -> usize {
        self.sings.iter().filter(|s| s.is_genuine()).count()
    }

    pub fn v_terms(&self) -> &[(i64, Complex64)] {
        &self.v
    }

    pub fn v_coeff(&self, k: i64) -> Complex64 {
        self.v.iter().find(|e| e.0 == k).map_or(Complex64::new(0.0, 0.0), |e| e.1)
    }

    pub fn v_order(&self) -> i64 {
        self.v.iter().map(|e| e.0.abs()).max().unwrap_or(0)
    }

    pub fn is_smooth(&self) -> bool {
        self.genuine_count() == 0 && self.gap.is_none()
    }

    pub fn v_eval(&self, theta: f64) -> Complex64 {
        self.v.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, k as f64 * theta)).sum()
    }

    pub fn wiener_hopf(&self) -> WienerHopf {
        WienerHopf {
            v0: self.v_coeff(0),
            plus: self.v.iter().copied().filter(|e| e.0 > 0).collect(),
            minus: self.v.iter().copied().filter(|e| e.0 < 0).collect(),
        }
    }

    /// max_{j,k} |Re beta_j - Re beta_k|; the slot at z = 1 is left out
    /// unless it is a genuine singularity.
    pub fn beta_seminorm(&self) -> f64 {
        let re: Vec<f64> = self
            .sings
            .iter()
            .enumerate()
            .filter(|(j, s)| *j > 0 || s.is_genuine())
            .map(|(_, s)| s.beta.re)
            .collect();
        if re.is_empty() {
            return 0.0;
        }
        let hi = re.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = re.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    }

    /// f(e^{i theta}).
    pub fn evaluate(&self, theta: f64) -> Result<Complex64> {
        if !theta.is_finite() {
            return Err(Error::Parameter(format!("theta = {theta}")));
        }
        let theta = theta.rem_euclid(TWO_PI);
        for s in self.sings.iter().filter(|s| s.alpha != Complex64::new(0.0, 0.0)) {
            let d = (theta - s.theta).rem_euclid(TWO_PI);
            if d.min(TWO_PI - d) < 1e-14 {
                return Err(Error::SingularPoint(format!("theta = {theta}")));
            }
        }
        Ok(self.eval_theta(theta))
    }

    /// f(z) for |z| = 1.
    pub fn evaluate_at(&self, z: Complex64) -> Result<Complex64> {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("|z| = {} is not 1", z.norm())));
        }
        self.evaluate(z.arg())
    }

    /// sum_k |k|^s |V_k|, the smoothness diagnostic for the smooth part.
    pub fn smoothness_norm(&self, s: f64) -> f64 {
        self.v.iter().map(|&(k, c)| (k.abs() as f64).powf(s) * c.norm()).sum()
    }

    pub fn eval_theta(&self, theta: f64) -> Complex64 {
        self.eval_node(theta.rem_euclid(TWO_PI), None)
    }

    // theta in [0, 2pi]; anchor = (j, theta - theta_j) computed without cancellation
    fn eval_node(&self, theta: f64, anchor: Option<(usize, f64)>) -> Complex64 {
        if let Some(g) = self.gap {
            if theta < g || theta > TWO_PI - g {
                return Complex64::new(0.0, 0.0);
            }
        }
        let mut log = self.v_eval(theta);
        for (j, s) in self.sings.iter().enumerate() {
            if !s.is_genuine() {
                continue;
            }
            // nodes anchored at 2pi on slot 0 carry delta < 0
            let delta = match anchor {
                Some((a, d)) if a == j => d,
                _ => theta - s.theta,
            };
            let dist = 2.0 * (0.5 * delta).sin().abs();
            let psi = if delta >= 0.0 { delta - PI } else { delta + PI };
            log += 2.0 * s.alpha * dist.ln() + Complex64::new(0.0, 1.0) * s.beta * psi;
        }
        log.exp()
    }

    // breakpoints in [lo, hi]: (angle, singularity index if genuine)
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<(f64, Option<usize>)> {
        let (lo, hi) = match self.gap {
            Some(g) => (lo.max(g), hi.min(TWO_PI - g)),
            None => (lo, hi),
        };
        let mut pts: Vec<(f64, Option<usize>)> = vec![(lo, None), (hi, None)];
        for (j, s) in self.sings.iter().enumerate() {
            if !s.is_genuine() {
                continue;
            }
            for th in [s.theta, s.theta + TWO_PI] {
                if th >= lo && th <= hi {
                    if let Some(p) = pts.iter_mut().find(|p| p.0 == th) {
                        p.1 = Some(j);
                    } else {
                        pts.push((th, Some(j)));
                    }
                }
            }
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pts.dedup_by(|a, b| a.0 == b.0);
        pts
    }

    /// Quadrature nodes covering [lo, hi], split at singular points and
    /// graded toward them.
    pub(crate) fn nodes(&self, lo: f64, hi: f64, spec: &PanelSpec) -> Vec<Node> {
        let pts = self.breakpoints(lo, hi);
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let (a, ja) = w[0];
            let (b, jb) = w[1];
            if b <= a {
                continue;
            }
            let ga = ja.and_then(|j| self.end_exponent(j));
            let gb = jb.and_then(|j| self.end_exponent(j));
            arc_nodes(&mut out, a, b, ja.map(|j| (j, ga)), jb.map(|j| (j, gb)), spec);
        }
        out
    }

    fn end_exponent(&self, j: usize) -> Option<Complex64> {
        let a = self.sings[j].alpha;
        if a == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(2.0 * a)
        }
    }

    pub(crate) fn eval_at(&self, node: &Node) -> Complex64 {
        self.eval_node(node.theta, node.anchor)
    }

    fn bandwidth(&self, kabs: i64) -> f64 {
        let vb: f64 = self.v.iter().map(|&(k, c)| (k.abs() as f64) * c.norm()).sum();
        let bb: f64 = self.sings.iter().map(|s| s.beta.re.abs()).sum();
        kabs as f64 + 2.0 * vb + self.v_order() as f64 + bb + 8.0
    }

    /// Fourier coefficients f_k, k_min <= k <= k_max.
    pub fn fourier_coeffs(&self, k_min: i64, k_max: i64) -> Result<CoeffTable> {
        if k_min > k_max {
            return Err(Error::Parameter(format!("empty coefficient range [{k_min}, {k_max}]")));
        }
        let kabs = k_min.abs().max(k_max.abs());
        let omega = self.bandwidth(kabs);
        if self.is_smooth() {
            let mut n = (4.0 * omega + 64.0).max(64.0) as usize;
            n = n.next_power_of_two();
            let f = |th: f64| self.eval_theta(th);
            let mut prev = periodic_coeffs(&f, n, k_min, k_max);
            for _ in 0..6 {
                n *= 2;
                let next = periodic_coeffs(&f, n, k_min, k_max);
                let scale = next.values.iter().map(|c| c.norm()).fold(1e-300, f64::max);
                let diff = max_diff(&prev, &next);
                if diff <= 1e-14 * scale.max(1.0) {
                    return Ok(next);
                }
                prev = next;
            }
            return Err(Error::Quadrature("trapezoid sums did not settle".into()));
        }
        let mut spec = PanelSpec { max_width: 12.0 / omega, ..Default::default() };
        spec.max_width = spec.max_width.min(0.5);
        let mut prev = self.coeffs_with(k_min, k_max, &spec);
        for _ in 0..3 {
            spec.max_width /= 2.0;
            spec.levels += 4;
            let (next, scale) = self.coeffs_with(k_min, k_max, &spec);
            let diff = max_diff(&prev.0, &next);
            if diff <= 1e-12 * scale.max(1e-300) {
                return Ok(next);
            }
            prev = (next, scale);
        }
        Err(Error::Quadrature(format!(
            "Fourier coefficients did not settle for k in [{k_min}, {k_max}]"
        )))
    }

    fn coeffs_with(&self, k_min: i64, k_max: i64, spec: &PanelSpec) -> (CoeffTable, f64) {
        let nodes = self.nodes(0.0, TWO_PI, spec);
        let wf: Vec<(f64, Complex64)> =
            nodes.par_iter().map(|nd| (nd.theta, nd.weight * self.eval_at(nd) / TWO_PI)).collect();
        let scale: f64 = wf.iter().map(|p| p.1.norm()).sum();
        (weighted_dft(&wf, k_min, k_max), scale)
    }

    /// Minimal FH-representations: shifts n_j with sum 0 (n_0 = 0 unless z = 1
    /// is a genuine singularity) minimizing sum (Re beta_j + n_j)^2.
    pub fn fh_representations(&self) -> Result<Vec<FHRepresentation>> {
        let m = self.sings.len();
        let free: Vec<bool> = self.sings.iter().map(|s| s.is_genuine()).collect();
        let bounds: Vec<i64> = self.sings.iter().map(|s| s.beta.re.abs().ceil() as i64 + 1).collect();
        let mut all = Vec::new();
        let mut shifts = vec![0i64; m];
        enumerate_shifts(0, &free, &bounds, &mut shifts, &mut |sh| {
            if sh.iter().sum::<i64>() != 0 {
                return;
            }
            let betas: Vec<Complex64> = self.sings.iter().zip(sh).map(|(s, &n)| s.beta + n as f64).collect();
            let weight = betas.iter().map(|b| b.re * b.re).sum();
            all.push(FHRepresentation { shifts: sh.to_vec(), betas, weight });
        });
        let min = all.iter().map(|r| r.weight).fold(f64::INFINITY, f64::min);
        let mut best: Vec<FHRepresentation> = all.into_iter().filter(|r| r.weight <= min + 1e-9).collect();
        for r in &best {
            for (s, b) in self.sings.iter().zip(&r.betas) {
                for g in [1.0 + s.alpha + b, 1.0 + s.alpha - b] {
                    if crate::specfun::near_nonpositive_integer(g, 1e-12) {
                        return Err(Error::Degenerate(format!(
                            "representation {:?} has G({g}) = 0", r.shifts
                        )));
                    }
                }
            }
        }
        best.sort_by(|a, b| a.shifts.cmp(&b.shifts));
        Ok(best)
    }

    pub fn shifted(&self, betas: &[Complex64]) -> FHSymbol {
        let mut out = self.clone();
        for (s, b) in out.sings.iter_mut().zip(betas) {
            s.beta = *b;
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SymbolFile =
            serde_json::from_str(text).map_err(|e| Error::Parameter(format!("symbol file: {e}")))?;
        file.into_symbol()
    }
}

fn enumerate_shifts(i: usize, free: &[bool], bounds: &[i64], cur: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if i == free.len() {
        f(cur);
        return;
    }
    if !free[i] {
        cur[i] = 0;
        enumerate_shifts(i + 1, free, bounds, cur, f);
        return;
    }
    for n in -bounds[i]..=bounds[i] {
        cur[i] = n;
        enumerate_shifts(i + 1, free, bounds, cur, f);
    }
}

fn arc_nodes(
    out: &mut Vec<Node>,
    a: f64,
    b: f64,
    ja: Option<(usize, Option<Complex64>)>,
    jb: Option<(usize, Option<Complex64>)>,
    spec: &PanelSpec,
) {
    let len = b - a;
    let mut panels = (len / spec.max_width).ceil().max(1.0) as usize;
    let grade_a = ja.and_then(|x| x.1);
    let grade_b = jb.and_then(|x| x.1);
    if grade_a.is_some() && grade_b.is_some() && panels < 2 {
        panels = 2;
    }
    let h = len / panels as f64;
    let gl = gauss_legendre(spec.points);
    let push_panel = |out: &mut Vec<Node>, lo: f64, hi: f64| {
        let (hh, m) = ((hi - lo) / 2.0, (hi + lo) / 2.0);
        for (x, w) in gl.0.iter().zip(&gl.1) {
            out.push(Node { theta: m + hh * x, anchor: None, weight: Complex64::new(hh * w, 0.0) });
        }
    };
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == panels { b } else { lo + h };
        let first = p == 0;
        let last = p + 1 == panels;
        match (first && grade_a.is_some(), last && grade_b.is_some()) {
            (false, false) => push_panel(out, lo, hi),
            (ga, gb) => {
                let half = if ga && gb { 0.5 * (hi - lo) } else { hi - lo };
                if ga {
                    let (j, g) = ja.unwrap();
                    graded_end(out, a, 1.0, half, j, g.unwrap(), spec);
                }
                if gb {
                    let (j, g) = jb.unwrap();
                    graded_end(out, b, -1.0, half, j, g.unwrap(), spec);
                }
            }
        }
    }
}

fn graded_end(out: &mut Vec<Node>, end: f64, dir: f64, h: f64, j: usize, g: Complex64, spec: &PanelSpec) {
    let gl = gauss_legendre(spec.points);
    let q = spec.ratio;
    let mut outer = h;
    for _ in 0..spec.levels {
        let inner = outer * q;
        let (hh, m) = ((outer - inner) / 2.0, (outer + inner) / 2.0);
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let t = m + hh * x;
            out.push(Node {
                theta: end + dir * t,
                anchor: Some((j, dir * t)),
                weight: Complex64::new(hh * w, 0.0),
            });
        }
        outer = inner;
    }
    if spec.end_correction {
        out.push(Node {
            theta: end + dir * outer,
            anchor: Some((j, dir * outer)),
            weight: Complex64::new(outer, 0.0) / (1.0 + g),
        });
    }
}

fn max_diff(a: &CoeffTable, b: &CoeffTable) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn weighted_dft(wf: &[(f64, Complex64)], k_min: i64, k_max: i64) -> CoeffTable {
    let values = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let kf = k as f64;
            let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
            for &(th, w) in wf {
                let t = w * Complex64::from_polar(1.0, -kf * th);
                re.add(t.re);
                im.add(t.im);
            }
            Complex64::new(re.value(), im.value())
        })
        .collect();
    CoeffTable { k_min, values }
}

// compensated summation; plain sums over thousands of nodes drift by ~1e-14
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Trapezoid-rule Fourier coefficients of a smooth periodic function,
/// sampled at n equispaced angles.
pub fn periodic_coeffs(f: &(impl Fn(f64) -> Complex64 + Sync), n: usize, k_min: i64, k_max: i64) -> CoeffTable {
    let samples: Vec<(f64, Complex64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let th = TWO_PI * i as f64 / n as f64;
            (th, f(th) / n as f64)
        })
        .collect();
    weighted_dft(&samples, k_min, k_max)
}

/// Symbol file layout: {"V": [[k, re, im], ...], "singularities": [...]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolFile {
    #[serde(rename = "V", default)]
    pub v: Vec<(i64, f64, f64)>,
    #[serde(default)]
    pub singularities: Vec<SingularityFile>,
    /// Closing-arc parameter: the arc |arg z| < 2 s / n is removed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityFile {
    pub theta: f64,
    #[serde(default)]
    pub alpha: (f64, f64),
    #[serde(default)]
    pub beta: (f64, f64),
}

impl SymbolFile {
    pub fn into_symbol(&self) -> Result<FHSymbol> {
        FHSymbol::new(
            self.v.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))).collect(),
            self.singularities
                .iter()
                .map(|s| {
                    FHSingularity::new(s.theta, Complex64::new(s.alpha.0, s.alpha.1), Complex64::new(s.beta.0, s.beta.1))
                })
                .collect(),
        )
    }
}

/// The transition symbol
/// f_t(z) = e^{t(a+b)} (1 - z e^{-t})^{a+b} (1 - e^{-t}/z)^{a-b} e^{V(z)}, t > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSymbol {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub t: f64,
    pub v: Vec<(i64, Complex64)>,
}

impl TransitionSymbol {
    pub fn new(alpha: Complex64, beta: Complex64, t: f64, v: Vec<(i64, Complex64)>) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Parameter(format!("t = {t} must be positive")));
        }
        if alpha.re <= -0.5 {
            return Err(Error::Parameter("Re alpha must exceed -1/2".into()));
        }
        Ok(TransitionSymbol { alpha, beta, t, v })
    }

    pub fn eval_theta(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        let q = (-self.t).exp();
        let v: Complex64 = self.v.iter().map(|&(k, c)| c * z.powi(k as i32)).sum();
        let log = self.t * (self.alpha + self.beta)
            + (self.alpha + self.beta) * (1.0 - z * q).ln()
            + (self.alpha - self.beta) * (1.0 - q / z).ln()
            + v;
        log.exp()
    }

    pub fn fourier_coeffs(&self, k_min: i64, k_max: i64) -> Result<CoeffTable> {
        let kabs = k_min.abs().max(k_max.abs()) as f64;
        let vb: f64 = self.v.iter().map(|&(k, c)| (k.abs() as f64) * c.norm()).sum();
        let mut n = ((4.0 * (kabs + vb) + 64.0).max(48.0 / self.t)) as usize;
        n = n.next_power_of_two();
        let f = |th: f64| self.eval_theta(th);
        let mut prev = periodic_coeffs(&f, n, k_min, k_max);
        for _ in 0..6 {
            n *= 2;
            let next = periodic_coeffs(&f, n, k_min, k_max);
            let scale = next.values.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if max_diff(&prev, &next) <= 1e-14 * scale.max(1.0) {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Quadrature("transition symbol coefficients did not settle".into()))
    }
}
