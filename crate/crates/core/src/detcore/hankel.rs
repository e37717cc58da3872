use dashu_float::FBig;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{LogDet, Lu, Matrix};

/// Condition number above which elimination moves to extended precision.
pub const EXTENDED_THRESHOLD: f64 = 1e12;
const DEFAULT_DIGITS: usize = 60;

type Generator = Arc<dyn Fn(usize) -> Vec<FBig> + Send + Sync>;

/// Hankel moments m_k = int x^k w(x) dx, k = 0, 1, ...
#[derive(Clone)]
pub enum MomentTable {
    Standard(Vec<f64>),
    /// Moments produced on demand at a requested binary precision, so the
    /// determinant can be certified by recomputing at a higher one.
    Extended { digits: usize, count: usize, generator: Generator },
}

impl fmt::Debug for MomentTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentTable::Standard(v) => f.debug_tuple("Standard").field(v).finish(),
            MomentTable::Extended { digits, count, .. } => {
                f.debug_struct("Extended").field("digits", digits).field("count", count).finish()
            }
        }
    }
}

pub(crate) fn digits_to_bits(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8
}

pub(crate) fn big(x: f64, bits: usize) -> FBig {
    FBig::try_from(x).expect("finite").with_precision(bits).value()
}

impl MomentTable {
    pub fn standard(moments: Vec<f64>) -> Self {
        MomentTable::Standard(moments)
    }

    pub fn extended(digits: usize, count: usize, generator: impl Fn(usize) -> Vec<FBig> + Send + Sync + 'static) -> Self {
        MomentTable::Extended { digits, count, generator: Arc::new(generator) }
    }

    pub fn len(&self) -> usize {
        match self {
            MomentTable::Standard(v) => v.len(),
            MomentTable::Extended { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Moments of e^{-c x} on [0, b] in closed form:
    /// m_k = k!/c^{k+1} (1 - e^{-cb} sum_{j<=k} (cb)^j/j!).
    /// `b = None` gives the half-line moments k!/c^{k+1}.
    pub fn exponential(c: f64, b: Option<f64>, count: usize, digits: usize) -> Result<Self> {
        if !(c > 0.0) || b.is_some_and(|b| !(b > 0.0)) {
            return Err(Error::Parameter(format!("exponential weight needs c > 0, b > 0 (c={c}, b={b:?})")));
        }
        Ok(MomentTable::extended(digits, count, move |bits| {
            let cb = big(c, bits);
            let mut out = Vec::with_capacity(count);
            let mut fact = big(1.0, bits);
            let mut cpow = cb.clone();
            let tail = b.map(|b| (-(cb.clone() * big(b, bits))).exp());
            let x = b.map(|b| cb.clone() * big(b, bits));
            let mut partial = big(1.0, bits);
            let mut term = big(1.0, bits);
            for k in 0..count {
                if k > 0 {
                    fact *= big(k as f64, bits);
                    cpow *= cb.clone();
                    if let Some(x) = &x {
                        term = term * x.clone() / big(k as f64, bits);
                        partial += term.clone();
                    }
                }
                let base = fact.clone() / cpow.clone();
                let m = match &tail {
                    Some(t) => base * (big(1.0, bits) - t.clone() * partial.clone()),
                    None => base,
                };
                out.push(m);
            }
            out
        }))
    }
}

/// D_n^H = det(m_{j+k}), j, k = 0..n-1.
pub fn hankel_det(moments: &MomentTable, n: usize) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    if moments.len() < 2 * n - 1 {
        return Err(Error::Size(format!("{} moments given, {} needed", moments.len(), 2 * n - 1)));
    }
    match moments {
        MomentTable::Standard(m) => {
            let a = Matrix::from_fn(n, |j, k| m[j + k].into());
            let lu = Lu::factor(&a);
            let cond = lu.condition(&a);
            if cond <= EXTENDED_THRESHOLD {
                return Ok(lu.log_det());
            }
            let table = m.clone();
            let ext = MomentTable::extended(DEFAULT_DIGITS, table.len(), move |bits| {
                table.iter().map(|&x| big(x, bits)).collect()
            });
            hankel_det_certified(&ext, n).map(|r| r.0)
        }
        MomentTable::Extended { .. } => hankel_det_certified(moments, n).map(|r| r.0),
    }
}

/// Extended-precision determinant, computed at the table's precision and at
/// a higher one; returns the value and the relative disagreement. Fails
/// unless 6 significant digits agree.
pub fn hankel_det_certified(moments: &MomentTable, n: usize) -> Result<(LogDet, f64)> {
    let (digits, generator) = match moments {
        MomentTable::Extended { digits, generator, .. } => (*digits, generator.clone()),
        MomentTable::Standard(m) => {
            let table = m.clone();
            (DEFAULT_DIGITS, Arc::new(move |bits: usize| table.iter().map(|&x| big(x, bits)).collect::<Vec<_>>()) as Generator)
        }
    };
    if n == 0 {
        return Ok((LogDet::ONE, 0.0));
    }
    let b1 = digits_to_bits(digits);
    let b2 = digits_to_bits(digits + digits / 2 + 10);
    let d1 = big_det(&generator(b1), n, b1)?;
    let d2 = big_det(&generator(b2), n, b2)?;
    let rel = relative_gap(&d1, &d2, b2);
    if !(rel <= 1e-6) {
        return Err(Error::Precision(format!(
            "Hankel determinant of order {n}: {digits}-digit and higher-precision results differ by {rel:e}"
        )));
    }
    Ok((to_logdet(&d2)?, rel))
}

fn relative_gap(a: &FBig, b: &FBig, bits: usize) -> f64 {
    let zero = big(0.0, bits);
    if *b == zero {
        return if *a == zero { 0.0 } else { f64::INFINITY };
    }
    let r = (a.clone() - b.clone()) / b.clone();
    r.to_f64().value().abs()
}

pub(crate) fn to_logdet(d: &FBig) -> Result<LogDet> {
    let zero: FBig = FBig::ZERO;
    if *d == zero {
        return Ok(LogDet::ZERO);
    }
    let neg = *d < zero;
    let a = if neg { -d.clone() } else { d.clone() };
    let lm = a.ln().to_f64().value();
    Ok(LogDet { log_modulus: lm, phase: if neg { std::f64::consts::PI } else { 0.0 } })
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn big_det(m: &[FBig], n: usize, _bits: usize) -> Result<FBig> {
    let mut a: Vec<FBig> = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            a.push(m[j + k].clone());
        }
    }
    big_elimination(a, n)
}

pub(crate) fn big_elimination(mut a: Vec<FBig>, n: usize) -> Result<FBig> {
    let zero: FBig = FBig::ZERO;
    let abs = |x: &FBig| if *x < zero { -x.clone() } else { x.clone() };
    let mut det = FBig::ONE;
    for k in 0..n {
        let mut p = k;
        let mut best = abs(&a[k * n + k]);
        for i in k + 1..n {
            let v = abs(&a[i * n + k]);
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == zero {
            return Ok(zero);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let piv = a[k * n + k].clone();
        det *= piv.clone();
        for i in k + 1..n {
            let l = a[i * n + k].clone() / piv.clone();
            if l == zero {
                continue;
            }
            for j in k + 1..n {
                let t = l.clone() * a[k * n + j].clone();
                a[i * n + j] -= t;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn chebyshev_and_legendre_weights() {
        let d = hankel_det(&MomentTable::standard(vec![PI]), 1).unwrap();
        assert!((d.value().re - PI).abs() < 1e-15);
        let d = hankel_det(&MomentTable::standard(vec![2.0, 0.0, 2.0 / 3.0]), 2).unwrap();
        assert!((d.value().re - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(hankel_det(&MomentTable::standard(vec![]), 0).unwrap(), LogDet::ONE);
    }

    #[test]
    fn ill_conditioned_matrix_moves_to_extended() {
        // Hilbert matrix: moments of w = 1 on [0, 1]; det H_n known exactly
        let n = 10;
        let m: Vec<f64> = (0..2 * n - 1).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let a = Matrix::from_fn(n, |j, k| m[j + k].into());
        assert!(Lu::factor(&a).condition(&a) > EXTENDED_THRESHOLD);
        let d = hankel_det(&MomentTable::standard(m), n).unwrap();
        // det of the (double-rounded) Hilbert matrix is within rounding of the exact one
        let mut exact_ln = 0.0;
        for k in 1..n {
            let mut fact = 0.0;
            for i in 1..=k {
                fact += (i as f64).ln();
            }
            let mut fact2 = 0.0;
            for i in 1..=(2 * k) {
                fact2 += (i as f64).ln();
            }
            let mut fact3 = 0.0;
            for i in 1..=(2 * k + 1) {
                fact3 += (i as f64).ln();
            }
            exact_ln += 4.0 * fact - fact2 - fact3;
        }
        assert!((d.log_modulus - exact_ln).abs() < 1e-2);
    }

    fn cofactor(m: &[Vec<FBig>]) -> FBig {
        if m.len() == 1 {
            return m[0][0].clone();
        }
        let mut s = FBig::ZERO;
        for col in 0..m.len() {
            let minor: Vec<Vec<FBig>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(i, _)| *i != col).map(|(_, v)| v.clone()).collect())
                .collect();
            let t = m[0][col].clone() * cofactor(&minor);
            if col % 2 == 0 {
                s += t;
            } else {
                s -= t;
            }
        }
        s
    }

    #[test]
    fn airy_weight_matches_cofactor_oracle() {
        let nh = 4usize;
        let b = 1.0;
        let table = MomentTable::exponential(4.0 * nh as f64, Some(b), 2 * nh - 1, 60).unwrap();
        let (d, rel) = hankel_det_certified(&table, nh).unwrap();
        assert!(rel < 1e-30);
        let bits = digits_to_bits(80);
        let m = match &table {
            MomentTable::Extended { generator, .. } => generator(bits),
            _ => unreachable!(),
        };
        let mat: Vec<Vec<FBig>> = (0..nh).map(|j| (0..nh).map(|k| m[j + k].clone()).collect()).collect();
        let want = to_logdet(&cofactor(&mat)).unwrap();
        assert!((d.log_modulus - want.log_modulus).abs() < 1e-12);
        assert_eq!(d.phase, 0.0);
    }

    #[test]
    fn half_line_closed_form() {
        // det(k+j)!/c^{...} = prod (k!)^2 c^{-n^2}
        let (n, c) = (6usize, 24.0);
        let t = MomentTable::exponential(c, None, 2 * n - 1, 60).unwrap();
        let d = hankel_det(&t, n).unwrap();
        let mut want = -((n * n) as f64) * c.ln();
        for k in 0..n {
            for i in 1..=k {
                want += 2.0 * (i as f64).ln();
            }
        }
        assert!((d.log_modulus - want).abs() < 1e-11);
    }

    #[test]
    fn exponential_moments_check_inputs() {
        assert!(MomentTable::exponential(-1.0, None, 3, 60).is_err());
        let t = MomentTable::exponential(2.0, Some(1.5), 4, 40).unwrap();
        if let MomentTable::Extended { generator, .. } = &t {
            let m = generator(160);
            // m_0 = (1 - e^{-3}) / 2
            let want = (1.0 - (-3.0f64).exp()) / 2.0;
            assert!((m[0].to_f64().value() - want).abs() < 1e-16);
        }
    }
}
