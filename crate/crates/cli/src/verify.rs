//! The acceptance suites behind `verify`.

use num_complex::Complex64;
use serde_json::json;
use std::f64::consts::PI;
use std::time::Instant;

use toeplitz_asy::asympt::{basor_tracy_prediction, fh_prediction, fredholm_prediction, transition_prediction};
use toeplitz_asy::detcore::{th_bridge_check, th_hankel_side, toeplitz_det, toeplitz_plus_hankel_det, ThVariant};
use toeplitz_asy::fredholm::{
    fredholm_det, fredholm_log_det, limit_check_airy, limit_check_ch, limit_check_sine, FredholmOptions, KernelSpec,
};
use toeplitz_asy::linalg::LogDet;
use toeplitz_asy::painleve::{solve_sigma, tracy_widom_cdf, tracy_widom_log_cdf};
use toeplitz_asy::permlab::{count_u, gessel_check, sample_scaled_lis};
use toeplitz_asy::specfun::log_barnes_g;
use toeplitz_asy::symbol::{FHSingularity, FHSymbol, TransitionSymbol};

use crate::args::{IntList, RealList};
use crate::commands::*;
use crate::report::{Row, RowBuilder, RunReport};
use crate::{CliError, Progress};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub metrics: Row,
    pub seconds: f64,
    pub limit_s: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {}: {} ({:.2}s of {}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds,
            self.limit_s
        )
    }
}

pub const NAMES: [(u32, &str, f64); 12] = [
    (1, "szego", 1.0),
    (2, "fisher-hartwig", 5.0),
    (3, "basor-tracy", 10.0),
    (4, "finite-identities", 10.0),
    (5, "sine", 2.0),
    (6, "ch", 5.0),
    (7, "bessel", 5.0),
    (8, "airy", 30.0),
    (9, "limits", 300.0),
    (10, "transition", 120.0),
    (11, "lis", 300.0),
    (12, "determinism", 1.0),
];

/// Criterion ids for a suite name: `all`, a criterion name, or its number.
pub fn suite(name: &str) -> Option<Vec<u32>> {
    if name == "all" {
        return Some(NAMES.iter().map(|n| n.0).collect());
    }
    NAMES.iter().find(|n| n.1 == name || n.0.to_string() == name).map(|n| vec![n.0])
}

type Check = Result<(bool, String, Row), CliError>;
type Rerun<'a> = Box<dyn Fn() -> Result<RunReport, CliError> + 'a>;

fn exact(sym: &FHSymbol, n: usize) -> Result<LogDet, CliError> {
    let m = n as i64;
    Ok(toeplitz_det(&sym.fourier_coeffs(-m, m)?, n)?)
}

fn szego() -> Check {
    let s = FHSymbol::smooth(vec![(1, c(1.0)), (-1, c(1.0))])?;
    let err = (exact(&s, 64)?.ln() - 1.0).norm();
    Ok((err <= 1e-8, format!("|ln D_64 - 1| = {err:.3e} <= 1e-8"), RowBuilder::new().num("error", err).build()))
}

fn fisher_hartwig() -> Check {
    let s = FHSymbol::new(vec![], vec![FHSingularity::new(0.0, c(0.5), c(0.0))])?;
    let mut dev = Vec::new();
    for n in [32, 64] {
        let ratio = (exact(&s, n)?.ln() - fh_prediction(&s, n)?.log_value()).exp();
        dev.push((ratio - 1.0).norm());
    }
    let ok = dev[1] <= 0.03 && dev[1] < dev[0];
    Ok((
        ok,
        format!("|ratio - 1| = {:.3e} (n=32), {:.3e} (n=64)", dev[0], dev[1]),
        RowBuilder::new().num("deviation_32", dev[0]).num("deviation_64", dev[1]).build(),
    ))
}

fn basor_tracy() -> Check {
    let s = FHSymbol::new(
        vec![],
        vec![FHSingularity::new(0.0, c(0.0), c(0.5)), FHSingularity::new(PI, c(0.0), c(-0.5))],
    )?;
    let coeffs = s.fourier_coeffs(-40, 40)?;
    let (mut terms_ok, mut worst_even, mut worst_odd) = (true, 0f64, 0f64);
    for n in 20..=40 {
        let bt = basor_tracy_prediction(&s, n)?;
        terms_ok &= bt.terms.len() == 2;
        let d = toeplitz_det(&coeffs, n)?.value();
        let p = bt.value.value();
        if n % 2 == 0 {
            worst_even = worst_even.max((d - p).norm() / p.norm());
        } else {
            // D_n vanishes for odd n; so must the two-term sum
            worst_odd = worst_odd.max(d.norm().max(p.norm()));
        }
    }
    let ok = terms_ok && worst_even <= 0.1 && worst_odd <= 1e-12;
    Ok((
        ok,
        format!("|M| = 2: {terms_ok}; even-n rel. error <= {worst_even:.2e}; odd-n |D_n|, |pred| <= {worst_odd:.1e}"),
        RowBuilder::new().num("even_rel_error", worst_even).num("odd_magnitude", worst_odd).build(),
    ))
}

fn finite_identities() -> Check {
    let half = FHSymbol::smooth(vec![(1, c(0.5)), (-1, c(0.5))])?;
    let flat = FHSymbol::smooth(vec![])?;
    let bridge = th_bridge_check(&flat, 2)?.max(th_bridge_check(&half, 2)?);
    let mut th: f64 = 0.0;
    for sym in [FHSymbol::smooth(vec![(1, c(1.0)), (-1, c(1.0))])?, flat] {
        let coeffs = sym.fourier_coeffs(-16, 16)?;
        for n in 1..=6 {
            for v in ThVariant::ALL {
                let a = toeplitz_plus_hankel_det(&coeffs, n, v)?.value();
                let b = th_hankel_side(&sym, n, v)?.value();
                th = th.max((a - b).norm() / b.norm());
            }
        }
    }
    Ok((
        bridge <= 1e-9 && th <= 1e-8,
        format!("bridge residual {bridge:.2e} <= 1e-9; T+H relations {th:.2e} <= 1e-8"),
        RowBuilder::new().num("bridge_residual", bridge).num("th_residual", th).build(),
    ))
}

fn log_err(spec: &KernelSpec, m: usize) -> Result<f64, CliError> {
    let d = fredholm_log_det(spec, m, &FredholmOptions::default())?;
    Ok((d.ln() - fredholm_prediction(spec)?.log_value()).norm())
}

fn sine() -> Check {
    let e4 = log_err(&KernelSpec::Sine { s: 4.0 }, 120)?;
    let e8 = log_err(&KernelSpec::Sine { s: 8.0 }, 120)?;
    Ok((
        e8 <= 0.02 && e8 < e4,
        format!("error {e4:.3e} (s=4), {e8:.3e} (s=8)"),
        RowBuilder::new().num("error_4", e4).num("error_8", e8).build(),
    ))
}

fn ch() -> Check {
    let mut diff: f64 = 0.0;
    for s in [2.0, 5.0] {
        let a = fredholm_det(&KernelSpec::ConfluentHyp { alpha: c(0.0), beta: c(0.0), s }, 80)?;
        let b = fredholm_det(&KernelSpec::Sine { s }, 80)?;
        diff = diff.max((a - b).abs());
    }
    let k = KernelSpec::ConfluentHyp { alpha: c(0.2), beta: c(0.0), s: 8.0 };
    let e = log_err(&k, k.default_nodes())?;
    Ok((
        diff <= 1e-9 && e <= 0.05,
        format!("|ch(0,0) - sine| = {diff:.2e}; prediction error {e:.3e} at alpha=0.2, s=8"),
        RowBuilder::new().num("reduction", diff).num("error", e).build(),
    ))
}

fn bessel() -> Check {
    let errs: Vec<f64> = [25.0, 50.0, 100.0]
        .iter()
        .map(|&s| {
            let k = KernelSpec::Bessel { a: c(0.5), s };
            log_err(&k, k.default_nodes())
        })
        .collect::<Result<_, _>>()?;
    let ok = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] <= 0.1;
    Ok((
        ok,
        format!("error {:.3e} (s=25), {:.3e} (s=50), {:.3e} (s=100)", errs[0], errs[1], errs[2]),
        RowBuilder::new().num("error_25", errs[0]).num("error_50", errs[1]).num("error_100", errs[2]).build(),
    ))
}

fn airy() -> Check {
    let mut dual: f64 = 0.0;
    for s in [-2.0, -1.0, 0.0, 1.0] {
        dual = dual.max((tracy_widom_cdf(s)? - fredholm_det(&KernelSpec::Airy { s }, 80)?).abs());
    }
    let p = fredholm_prediction(&KernelSpec::Airy { s: -8.0 })?.log_value().re;
    let e = (tracy_widom_log_cdf(-8.0)? - p).abs();
    Ok((
        dual <= 1e-6 && e <= 0.05,
        format!("|F_TW - det| = {dual:.2e}; log prediction error {e:.3e} at s=-8"),
        RowBuilder::new().num("dual", dual).num("error", e).build(),
    ))
}

fn limits() -> Check {
    let r = |rows: Vec<toeplitz_asy::fredholm::LimitRow>| (rows[0].residual, rows[1].residual);
    let sine = r(limit_check_sine(1.0, &[64, 128])?);
    let ch = r(limit_check_ch(c(0.2), c(0.0), 1.0, &[64, 128])?);
    let airy = r(limit_check_airy(0.0, &[8, 16])?);
    Ok((
        sine.1 < sine.0 && ch.1 < ch.0 && airy.1 < airy.0,
        format!(
            "sine {:.2e} -> {:.2e}; ch {:.2e} -> {:.2e}; airy {:.2e} -> {:.2e}",
            sine.0, sine.1, ch.0, ch.1, airy.0, airy.1
        ),
        RowBuilder::new()
            .num("sine_64", sine.0)
            .num("sine_128", sine.1)
            .num("ch_64", ch.0)
            .num("ch_128", ch.1)
            .num("airy_8", airy.0)
            .num("airy_16", airy.1)
            .build(),
    ))
}

fn transition() -> Check {
    let (al, be) = (c(0.3), c(0.0));
    let sigma = solve_sigma(al, be, 20.0)?;
    let mut errs = Vec::new();
    for n in [40usize, 80] {
        let t = 5.0 / (2.0 * n as f64);
        let sym = TransitionSymbol::new(al, be, t, vec![])?;
        let m = n as i64;
        let d = toeplitz_det(&sym.fourier_coeffs(-m, m)?, n)?;
        errs.push((d.ln() - transition_prediction(al, be, &[], n, t, &sigma)?).norm());
    }
    let long = solve_sigma(al, be, 40.0)?;
    let g = log_barnes_g(1.0 + al + be)? + log_barnes_g(1.0 + al - be)? - log_barnes_g(1.0 + 2.0 * al)?;
    let omega = (long.omega_infinity()? + g).norm();
    let res = sigma.max_residual(0.01, 20.0);
    Ok((
        errs[1] < errs[0] && omega <= 1e-3 && res <= 1e-6,
        format!(
            "error {:.3e} (n=40), {:.3e} (n=80); Omega(inf) identity {omega:.2e}; sigma-form residual {res:.2e}",
            errs[0], errs[1]
        ),
        RowBuilder::new()
            .num("error_40", errs[0])
            .num("error_80", errs[1])
            .num("omega_identity", omega)
            .num("sigma_residual", res)
            .build(),
    ))
}

fn lis() -> Check {
    let g = gessel_check(2, 0.25, 10)?.residual;
    let catalan = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430];
    let mut cat_ok = true;
    for (n, &want) in catalan.iter().enumerate() {
        cat_ok &= count_u(2, n)? == want;
    }
    let sample = sample_scaled_lis(4096, 20000, 1)?;
    let ks = sample.ks_distance(-4.0, 2.0)?;
    let ks_lattice = sample.ks_lattice(-4.0, 2.0)?;
    Ok((
        g <= 1e-10 && cat_ok && ks <= 0.05,
        format!(
            "gessel residual {g:.2e}; u_2 = Catalan: {cat_ok}; KS sup over [-4,2] {ks:.4} <= 0.05 (at lattice points {ks_lattice:.4})"
        ),
        RowBuilder::new().num("gessel", g).put("catalan", cat_ok).num("ks_distance", ks).num("ks_lattice", ks_lattice).build(),
    ))
}

fn determinism() -> Check {
    let quiet = Progress::quiet();
    let symbol = r#"{"V": [[1, 0.3, 0], [-1, 0.2, 0]], "singularities": [{"theta": 1.0, "alpha": [0.25, 0], "beta": [0.1, 0]}]}"#;
    let runs: Vec<Rerun> = vec![
        Box::new(|| cmd_toeplitz(&ToeplitzArgs { symbol: symbol.into(), n: IntList(vec![2, 8, 16]) }, &quiet)),
        Box::new(|| {
            cmd_hankel(
                &HankelArgs {
                    moments: None,
                    exp_c: Some(16.0),
                    exp_b: Some(1.0),
                    digits: 50,
                    symbol: None,
                    variant: "plus".into(),
                    n: IntList(vec![2, 4]),
                },
                &quiet,
            )
        }),
        Box::new(|| {
            cmd_th(
                &ThArgs {
                    symbol: r#"{"V": [[1, 0.5, 0], [-1, 0.5, 0]]}"#.into(),
                    n: IntList(vec![2, 3]),
                    variant: "all".into(),
                    bridge: true,
                },
                &quiet,
            )
        }),
        Box::new(|| {
            cmd_fredholm(
                &FredholmArgs {
                    kernel: KernelName::Sine,
                    s: RealList(vec![1.0, 2.0]),
                    alpha: c(0.0),
                    beta: c(0.0),
                    a: c(0.0),
                    m: Some(30),
                    abs_tol: 1e-9,
                    rel_tol: 1e-6,
                    no_check: false,
                },
                &quiet,
            )
        }),
        Box::new(|| {
            cmd_transition(
                &TransitionArgs { alpha: c(0.3), beta: c(0.0), n: IntList(vec![8]), x: RealList(vec![1.0]), symbol: None },
                &quiet,
            )
        }),
        Box::new(|| cmd_tw(&TwArgs { s: RealList(vec![-2.0, 0.0, 2.0]) }, &quiet)),
        Box::new(|| {
            cmd_lis(&LisArgs { n: 100, trials: 200, seed: 7, lo: -4.0, hi: 2.0, samples: None }, &quiet)
        }),
        Box::new(|| cmd_gessel(&GesselArgs { n: IntList(vec![2]), lambda: RealList(vec![0.25]), n_max: 6 }, &quiet)),
    ];
    let mut mismatched = Vec::new();
    for run in &runs {
        let (a, b) = (run()?, run()?);
        if a.fingerprint() != b.fingerprint() {
            mismatched.push(a.command.clone());
        }
    }
    Ok((
        mismatched.is_empty(),
        format!("{} commands rerun, mismatches: {:?}", runs.len(), mismatched),
        RowBuilder::new().put("commands", runs.len()).put("mismatches", mismatched.len()).build(),
    ))
}

/// Runs one criterion; errors count as failures.
pub fn run_criterion(id: u32) -> Criterion {
    let &(_, name, limit_s) = NAMES.iter().find(|n| n.0 == id).expect("known criterion");
    let start = Instant::now();
    let outcome = match id {
        1 => szego(),
        2 => fisher_hartwig(),
        3 => basor_tracy(),
        4 => finite_identities(),
        5 => sine(),
        6 => ch(),
        7 => bessel(),
        8 => airy(),
        9 => limits(),
        10 => transition(),
        11 => lis(),
        _ => determinism(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail, metrics) = match outcome {
        Ok((ok, detail, metrics)) => (ok && seconds < limit_s, detail, metrics),
        Err(e) => (false, format!("error: {}", e.message), Row::new()),
    };
    Criterion { id, name, passed, detail, metrics, seconds, limit_s }
}

pub fn cmd_verify(name: &str, progress: &Progress) -> Result<RunReport, CliError> {
    let ids = suite(name).ok_or_else(|| {
        let known: Vec<&str> = NAMES.iter().map(|n| n.1).collect();
        CliError::input(format!("unknown suite {name:?}; use all, 1..12 or one of {known:?}"))
    })?;
    let mut report = RunReport::new("verify", json!({ "suite": name }));
    let mut all = true;
    for id in ids {
        let c = run_criterion(id);
        progress.note(&c.line());
        all &= c.passed;
        let mut row = RowBuilder::new()
            .put("criterion", c.id)
            .put("name", c.name)
            .put("passed", c.passed)
            .put("detail", c.detail.clone())
            .build();
        row.extend(c.metrics);
        report.rows.push(row);
    }
    report.passed = Some(all);
    Ok(report)
}
