//! Longest increasing subsequences: patience sorting, exhaustive counts
//! and Monte Carlo samples of the scaled statistic.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::{Mutex, OnceLock};

use crate::detcore::gessel_det;
use crate::error::{Error, Result};
use crate::painleve::tracy_widom_cdf;

/// Largest N for which S_N is enumerated.
pub const MAX_EXHAUSTIVE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    /// Entries must be a rearrangement of 1..=N.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n];
        for &e in &entries {
            let i = e as usize;
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::InvalidPermutation(format!("{entries:?}")));
            }
            seen[i - 1] = true;
        }
        Ok(Permutation { entries })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { entries: (1..=n as u32).collect() }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.reverse();
        Permutation { entries }
    }
}

/// Length of a longest increasing subsequence.
pub fn lis_length(p: &Permutation) -> usize {
    lis_of(p.entries())
}

/// Length of a longest decreasing subsequence.
pub fn lds_length(p: &Permutation) -> usize {
    lis_of(p.reversed().entries())
}

// patience sorting on distinct values
fn lis_of(xs: &[u32]) -> usize {
    let mut tops: Vec<u32> = Vec::new();
    for &x in xs {
        let i = tops.partition_point(|&t| t < x);
        if i == tops.len() {
            tops.push(x);
        } else {
            tops[i] = x;
        }
    }
    tops.len()
}

// hist[l] = #{pi in S_N : lis(pi) = l}
fn lis_histogram(n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![1];
    }
    // one task per leading entry, Heap's algorithm on the rest
    let parts: Vec<Vec<u64>> = (1..=n as u32)
        .into_par_iter()
        .map(|first| {
            let mut hist = vec![0u64; n + 1];
            let mut rest: Vec<u32> = (1..=n as u32).filter(|&v| v != first).collect();
            let mut buf = vec![0u32; n];
            buf[0] = first;
            let mut visit = |r: &[u32]| {
                buf[1..].copy_from_slice(r);
                hist[lis_of(&buf)] += 1;
            };
            let m = rest.len();
            let mut c = vec![0usize; m];
            visit(&rest);
            let mut i = 0;
            while i < m {
                if c[i] < i {
                    if i % 2 == 0 {
                        rest.swap(0, i);
                    } else {
                        rest.swap(c[i], i);
                    }
                    visit(&rest);
                    c[i] += 1;
                    i = 0;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
            hist
        })
        .collect();
    let mut hist = vec![0u64; n + 1];
    for p in parts {
        for (h, v) in hist.iter_mut().zip(p) {
            *h += v;
        }
    }
    hist
}

fn cached_histogram(n: usize) -> Vec<u64> {
    static CACHE: OnceLock<Mutex<Vec<Option<Vec<u64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![None; MAX_EXHAUSTIVE + 1]));
    if let Some(h) = &cache.lock().unwrap()[n] {
        return h.clone();
    }
    let h = lis_histogram(n);
    cache.lock().unwrap()[n] = Some(h.clone());
    h
}

/// u_n(N): the number of permutations of S_N with no increasing subsequence longer than n.
pub fn count_u(n: usize, big_n: usize) -> Result<u64> {
    if big_n > MAX_EXHAUSTIVE {
        return Err(Error::Size(format!("N = {big_n} exceeds the exhaustive limit {MAX_EXHAUSTIVE}")));
    }
    let hist = cached_histogram(big_n);
    Ok(hist.iter().take(n + 1).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GesselCheck {
    pub n: usize,
    pub lambda: f64,
    pub n_max: usize,
    pub determinant: f64,
    pub series: f64,
    pub residual: f64,
    /// Bound on the omitted terms N > n_max.
    pub tail_bound: f64,
}

/// Compares D_n(e^{sqrt(lambda)(z+1/z)}) with the truncated series sum u_n(N) lambda^N / (N!)^2.
pub fn gessel_check(n: usize, lambda: f64, n_max: usize) -> Result<GesselCheck> {
    if n_max > MAX_EXHAUSTIVE {
        return Err(Error::Size(format!("N_max = {n_max} exceeds {MAX_EXHAUSTIVE}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda = {lambda} must be finite and >= 0")));
    }
    // u_n(N) <= N!, so the tail is at most sum_{N > n_max} lambda^N / N!
    let tail_bound = lambda.powi(n_max as i32 + 1) * lambda.exp() / factorial(n_max + 1);
    if tail_bound > 1e-6 {
        return Err(Error::Parameter(format!(
            "lambda = {lambda} too large for N_max = {n_max} (tail bound {tail_bound:e})"
        )));
    }
    let determinant = gessel_det(n, lambda)?;
    let mut series = 0.0;
    let mut fact = 1.0f64;
    for big_n in 0..=n_max {
        if big_n > 0 {
            fact *= big_n as f64;
        }
        series += count_u(n, big_n)? as f64 * lambda.powi(big_n as i32) / (fact * fact);
    }
    Ok(GesselCheck {
        n,
        lambda,
        n_max,
        determinant,
        series,
        residual: (determinant - series).abs(),
        tail_bound,
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LisSample {
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub scaled_values: Vec<f64>,
}

/// Scaled statistic (l_N - 2 sqrt N) N^{-1/6} over `trials` uniform permutations.
/// Trial i draws from ChaCha8 seeded with `seed` on stream i, so the result
/// does not depend on the number of worker threads.
pub fn sample_scaled_lis(big_n: usize, trials: usize, seed: u64) -> Result<LisSample> {
    if big_n == 0 || big_n > 1_000_000 {
        return Err(Error::Size(format!("N = {big_n} must be in 1..=1e6")));
    }
    if trials > 1_000_000 {
        return Err(Error::Size(format!("trials = {trials} exceeds 1e6")));
    }
    let nf = big_n as f64;
    let centre = 2.0 * nf.sqrt();
    let scale = nf.powf(-1.0 / 6.0);
    let scaled_values = (0..trials)
        .into_par_iter()
        .map_init(
            || (1..=big_n as u32).collect::<Vec<u32>>(),
            |perm, i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                for (k, v) in perm.iter_mut().enumerate() {
                    *v = k as u32 + 1;
                }
                perm.shuffle(&mut rng);
                (lis_of(perm) as f64 - centre) * scale
            },
        )
        .collect();
    Ok(LisSample { n: big_n, trials, seed, scaled_values })
}

impl LisSample {
    /// Fraction of samples <= s.
    pub fn ecdf(&self, s: f64) -> f64 {
        if self.scaled_values.is_empty() {
            return f64::NAN;
        }
        self.scaled_values.iter().filter(|&&v| v <= s).count() as f64 / self.scaled_values.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.scaled_values.iter().sum::<f64>() / self.scaled_values.len() as f64
    }

    /// sup over [lo, hi] of |ECDF - F_TW|, taking both one-sided limits at the jumps.
    pub fn ks_distance(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo < hi) {
            return Err(Error::Parameter(format!("empty range [{lo}, {hi}]")));
        }
        if self.scaled_values.is_empty() {
            return Err(Error::Parameter("no samples".into()));
        }
        let mut v = self.scaled_values.clone();
        v.sort_by(f64::total_cmp);
        let total = v.len() as f64;
        let below = |s: f64| v.partition_point(|&x| x < s) as f64 / total;
        let upto = |s: f64| v.partition_point(|&x| x <= s) as f64 / total;
        let mut points = vec![lo, hi];
        points.extend(v.iter().copied().filter(|&x| x > lo && x < hi));
        points.dedup();
        let mut d: f64 = 0.0;
        for s in points {
            let f = tracy_widom_cdf(s)?;
            d = d.max((upto(s) - f).abs());
            if s > lo {
                d = d.max((below(s) - f).abs());
            }
        }
        Ok(d)
    }

    /// max over the distinct sample values s in [lo, hi] of |ECDF(s) - F_TW(s)|.
    pub fn ks_lattice(&self, lo: f64, hi: f64) -> Result<f64> {
        let mut v = self.scaled_values.clone();
        v.sort_by(f64::total_cmp);
        let total = v.len() as f64;
        let mut d: f64 = 0.0;
        let mut i = 0;
        while i < v.len() {
            let j = v.partition_point(|&x| x <= v[i]);
            if v[i] >= lo && v[i] <= hi {
                d = d.max((j as f64 / total - tracy_widom_cdf(v[i])?).abs());
            }
            i = j;
        }
        Ok(d)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| Error::Parameter(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["trial", "scaled_lis"]).map_err(io)?;
        for (i, v) in self.scaled_values.iter().enumerate() {
            w.write_record([i.to_string(), format!("{v:e}")]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}
