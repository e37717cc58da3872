use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use std::path::PathBuf;

use toeplitz_asy::asympt::{basor_tracy_prediction, fh_prediction, fredholm_prediction, szego_prediction, transition_prediction};
use toeplitz_asy::detcore::{
    hankel_det, hankel_det_certified, th_bridge_check, th_hankel_side, toeplitz_det, toeplitz_plus_hankel_det, MomentTable,
    ThVariant,
};
use toeplitz_asy::fredholm::{fredholm_log_det, FredholmOptions, KernelSpec};
use toeplitz_asy::linalg::LogDet;
use toeplitz_asy::painleve::{solve_sigma, tracy_widom_cdf, tracy_widom_log_cdf};
use toeplitz_asy::permlab::{gessel_check, sample_scaled_lis};
use toeplitz_asy::symbol::{FHSymbol, SymbolFile, TransitionSymbol};

use crate::args::{parse_complex, parse_int_list, parse_real_list, IntList, RealList};
use crate::report::{RowBuilder, RunReport};
use crate::{CliError, Progress};

/// A symbol file path, or the JSON itself if the argument starts with `{`.
pub fn read_symbol_file(arg: &str) -> Result<SymbolFile, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::input(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("symbol file {arg}: {e}")))
}

fn symbol_for(file: &SymbolFile, n: usize) -> Result<FHSymbol, CliError> {
    let sym = file.into_symbol()?;
    Ok(match file.arc_s {
        Some(s) => sym.with_gap(2.0 * s / n as f64)?,
        None => sym,
    })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[derive(Args, Debug, Clone)]
pub struct ToeplitzArgs {
    /// Symbol JSON file (or inline JSON)
    #[arg(long)]
    pub symbol: String,
    /// Sizes, e.g. 1..4,64
    #[arg(long, value_parser = parse_int_list)]
    pub n: IntList,
}

pub fn cmd_toeplitz(a: &ToeplitzArgs, progress: &Progress) -> Result<RunReport, CliError> {
    let file = read_symbol_file(&a.symbol)?;
    let mut report = RunReport::new("toeplitz", json!({ "symbol": file, "n": a.n.0 }));
    for &n in &a.n.0 {
        let sym = symbol_for(&file, n)?;
        let m = n.max(1) as i64;
        let coeffs = sym.fourier_coeffs(-m, m)?;
        let d = toeplitz_det(&coeffs, n)?;
        let ln_d = d.ln();
        let szego = if sym.is_smooth() { Some(szego_prediction(&sym, n)?.log_value()) } else { None };
        let fh = if sym.gap().is_none() && sym.genuine_count() > 0 && sym.beta_seminorm() < 1.0 {
            Some(fh_prediction(&sym, n)?.log_value())
        } else {
            None
        };
        let bt = if sym.gap().is_none() && sym.genuine_count() > 0 {
            Some(basor_tracy_prediction(&sym, n)?)
        } else {
            None
        };
        let logdiff = |p: Option<Complex64>| p.map(|p| (ln_d - p).norm());
        report.rows.push(
            RowBuilder::new()
                .put("n", n)
                .num("log_modulus", d.log_modulus)
                .num("phase", d.phase)
                .complex("f0", coeffs.get(0))
                .opt_complex("szego", szego)
                .opt("szego_residual", logdiff(szego))
                .opt_complex("fh", fh)
                .opt("fh_residual", logdiff(fh))
                .opt("bt_terms", bt.as_ref().map(|b| b.terms.len() as f64))
                .opt("bt_log_modulus", bt.as_ref().map(|b| b.value.log_modulus))
                .opt("bt_phase", bt.as_ref().map(|b| b.value.phase))
                .opt("bt_rel_residual", bt.as_ref().map(|b| rel(d.value(), b.value.value())))
                .build(),
        );
        progress.note(&format!("toeplitz n={n}"));
    }
    Ok(report)
}

#[derive(Args, Debug, Clone)]
pub struct HankelArgs {
    /// Explicit moments m_0, m_1, ...
    #[arg(long, value_parser = parse_real_list, allow_hyphen_values = true, conflicts_with_all = ["exp_c", "symbol"])]
    pub moments: Option<RealList>,
    /// Weight e^{-c x} on [0, b] (or [0, inf) without --exp-b)
    #[arg(long)]
    pub exp_c: Option<f64>,
    #[arg(long, requires = "exp_c")]
    pub exp_b: Option<f64>,
    /// Decimal digits for the exponential moments
    #[arg(long, default_value_t = 60)]
    pub digits: usize,
    /// Even symbol whose Toeplitz+Hankel partner weight supplies the moments
    #[arg(long, conflicts_with = "exp_c")]
    pub symbol: Option<String>,
    #[arg(long, default_value = "plus", requires = "symbol")]
    pub variant: String,
    #[arg(long, value_parser = parse_int_list)]
    pub n: IntList,
}

fn variant(name: &str) -> Result<ThVariant, CliError> {
    ThVariant::parse(name).ok_or_else(|| CliError::input(format!("unknown variant {name:?} (plus, minus2, plus1, minus1)")))
}

pub fn cmd_hankel(a: &HankelArgs, progress: &Progress) -> Result<RunReport, CliError> {
    let n_max = *a.n.0.iter().max().unwrap();
    let count = 2 * n_max.max(1) - 1;
    let (table, source) = if let Some(m) = &a.moments {
        (MomentTable::standard(m.0.clone()), json!({ "moments": m.0 }))
    } else if let Some(c) = a.exp_c {
        (
            MomentTable::exponential(c, a.exp_b, count, a.digits)?,
            json!({ "exp_c": c, "exp_b": a.exp_b, "digits": a.digits }),
        )
    } else if let Some(path) = &a.symbol {
        let file = read_symbol_file(path)?;
        let v = variant(&a.variant)?;
        let m = toeplitz_asy::detcore::th_moments(&file.into_symbol()?, count, v)?;
        (MomentTable::standard(m), json!({ "symbol": file, "variant": v.name() }))
    } else {
        return Err(CliError::input("one of --moments, --exp-c, --symbol is required"));
    };
    let extended = matches!(table, MomentTable::Extended { .. });
    let mut report = RunReport::new("hankel", json!({ "source": source, "n": a.n.0 }));
    for &n in &a.n.0 {
        let (d, disagreement) = if extended {
            let (d, e) = hankel_det_certified(&table, n)?;
            (d, Some(e))
        } else {
            (hankel_det(&table, n)?, None)
        };
        report.rows.push(
            RowBuilder::new()
                .put("n", n)
                .num("log_modulus", d.log_modulus)
                .num("phase", d.phase)
                .opt("certified_disagreement", disagreement)
                .build(),
        );
        progress.note(&format!("hankel n={n}"));
    }
    Ok(report)
}

#[derive(Args, Debug, Clone)]
pub struct ThArgs {
    /// Even symbol JSON file (or inline JSON)
    #[arg(long)]
    pub symbol: String,
    #[arg(long, value_parser = parse_int_list)]
    pub n: IntList,
    /// plus, minus2, plus1, minus1 or all
    #[arg(long, default_value = "all")]
    pub variant: String,
    /// Also report the Hankel/Toeplitz bridge residual
    #[arg(long)]
    pub bridge: bool,
}

pub fn cmd_th(a: &ThArgs, progress: &Progress) -> Result<RunReport, CliError> {
    let file = read_symbol_file(&a.symbol)?;
    let sym = file.into_symbol()?;
    let variants = if a.variant == "all" { ThVariant::ALL.to_vec() } else { vec![variant(&a.variant)?] };
    let n_max = *a.n.0.iter().max().unwrap() as i64;
    let coeffs = sym.fourier_coeffs(-2 * n_max - 2, 2 * n_max + 2)?;
    let mut report = RunReport::new(
        "th",
        json!({ "symbol": file, "n": a.n.0, "variant": a.variant, "bridge": a.bridge }),
    );
    for &n in &a.n.0 {
        for &v in &variants {
            let th = toeplitz_plus_hankel_det(&coeffs, n, v)?;
            let h = th_hankel_side(&sym, n, v)?;
            report.rows.push(
                RowBuilder::new()
                    .put("n", n)
                    .put("variant", v.name())
                    .num("log_modulus", th.log_modulus)
                    .num("phase", th.phase)
                    .num("hankel_log_modulus", h.log_modulus)
                    .num("hankel_phase", h.phase)
                    .num("residual", rel(th.value(), h.value()))
                    .build(),
            );
        }
        if a.bridge {
            report.rows.push(
                RowBuilder::new().put("n", n).put("variant", "bridge").num("residual", th_bridge_check(&sym, n)?).build(),
            );
        }
        progress.note(&format!("th n={n}"));
    }
    Ok(report)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelName {
    Sine,
    Ch,
    Bessel,
    Airy,
}

#[derive(Args, Debug, Clone)]
pub struct FredholmArgs {
    #[arg(long, value_enum)]
    pub kernel: KernelName,
    /// Interval parameter(s)
    #[arg(long, value_parser = parse_real_list, allow_hyphen_values = true)]
    pub s: RealList,
    /// ch kernel alpha
    #[arg(long, value_parser = parse_complex, default_value = "0", allow_hyphen_values = true)]
    pub alpha: Complex64,
    /// ch kernel beta
    #[arg(long, value_parser = parse_complex, default_value = "0", allow_hyphen_values = true)]
    pub beta: Complex64,
    /// Bessel order
    #[arg(long, value_parser = parse_complex, default_value = "0", allow_hyphen_values = true)]
    pub a: Complex64,
    /// Quadrature nodes (default depends on kernel and s)
    #[arg(long)]
    pub m: Option<usize>,
    /// Doubling check: accept when |det_m - det_2m| <= abs-tol ...
    #[arg(long, default_value_t = 1e-9)]
    pub abs_tol: f64,
    /// ... or <= rel-tol * |det_2m|
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    /// Skip the doubling check
    #[arg(long)]
    pub no_check: bool,
}

impl FredholmArgs {
    fn spec(&self, s: f64) -> KernelSpec {
        match self.kernel {
            KernelName::Sine => KernelSpec::Sine { s },
            KernelName::Ch => KernelSpec::ConfluentHyp { alpha: self.alpha, beta: self.beta, s },
            KernelName::Bessel => KernelSpec::Bessel { a: self.a, s },
            KernelName::Airy => KernelSpec::Airy { s },
        }
    }
}

pub fn cmd_fredholm(a: &FredholmArgs, progress: &Progress) -> Result<RunReport, CliError> {
    let opts = FredholmOptions { abs_tol: a.abs_tol, rel_tol: a.rel_tol, check: !a.no_check };
    let specs: Vec<KernelSpec> = a.s.0.iter().map(|&s| a.spec(s)).collect();
    for s in &specs {
        s.validate()?;
    }
    let results: Vec<Result<(usize, LogDet, Complex64), CliError>> = specs
        .par_iter()
        .map(|spec| {
            let m = a.m.unwrap_or_else(|| spec.default_nodes());
            Ok((m, fredholm_log_det(spec, m, &opts)?, fredholm_prediction(spec)?.log_value()))
        })
        .collect();
    let mut report = RunReport::new("fredholm", json!({ "kernels": specs, "m": a.m }))
        .tolerance("abs_tol", a.abs_tol)
        .tolerance("rel_tol", a.rel_tol);
    for (spec, r) in specs.iter().zip(results) {
        let (m, d, p) = r?;
        report.rows.push(
            RowBuilder::new()
                .put("kernel", spec.name())
                .num("s", spec.s())
                .put("m", m)
                .num("value", d.log_modulus)
                .num("phase", d.phase)
                .num("det", d.value().re)
                .complex("prediction", p)
                .num("residual", (d.ln() - p).norm())
                .build(),
        );
        progress.note(&format!("fredholm {} s={}", spec.name(), spec.s()));
    }
    Ok(report)
}

#[derive(Args, Debug, Clone)]
pub struct TransitionArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, value_parser = parse_complex, default_value = "0", allow_hyphen_values = true)]
    pub beta: Complex64,
    #[arg(long, value_parser = parse_int_list)]
    pub n: IntList,
    /// Values of x = 2 n t
    #[arg(long, value_parser = parse_real_list)]
    pub x: RealList,
    /// Optional smooth part V as a symbol file without singularities
    #[arg(long)]
    pub symbol: Option<String>,
}

pub fn cmd_transition(a: &TransitionArgs, progress: &Progress) -> Result<RunReport, CliError> {
    let v: Vec<(i64, Complex64)> = match &a.symbol {
        Some(path) => {
            let file = read_symbol_file(path)?;
            if !file.singularities.is_empty() || file.arc_s.is_some() {
                return Err(CliError::input("the transition symbol file may only carry V"));
            }
            file.v.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))).collect()
        }
        None => Vec::new(),
    };
    if a.x.0.iter().any(|&x| !(x > 0.0)) {
        return Err(CliError::input("x values must be positive"));
    }
    let x_max = a.x.0.iter().cloned().fold(0.0, f64::max);
    let sigma = solve_sigma(a.alpha, a.beta, x_max)?;
    progress.note("transition: sigma solved");
    let mut report = RunReport::new(
        "transition",
        json!({ "alpha": [a.alpha.re, a.alpha.im], "beta": [a.beta.re, a.beta.im], "V": v.iter().map(|(k, c)| (k, c.re, c.im)).collect::<Vec<_>>(), "n": a.n.0, "x": a.x.0 }),
    );
    let jobs: Vec<(usize, f64)> = a.n.0.iter().flat_map(|&n| a.x.0.iter().map(move |&x| (n, x))).collect();
    let results: Vec<Result<(LogDet, Complex64), CliError>> = jobs
        .par_iter()
        .map(|&(n, x)| {
            let t = x / (2.0 * n as f64);
            let sym = TransitionSymbol::new(a.alpha, a.beta, t, v.clone())?;
            let m = n.max(1) as i64;
            let d = toeplitz_det(&sym.fourier_coeffs(-m, m)?, n)?;
            Ok((d, transition_prediction(a.alpha, a.beta, &v, n, t, &sigma)?))
        })
        .collect();
    for (&(n, x), r) in jobs.iter().zip(results) {
        let (d, p) = r?;
        report.rows.push(
            RowBuilder::new()
                .put("n", n)
                .num("x", x)
                .num("t", x / (2.0 * n as f64))
                .num("log_modulus", d.log_modulus)
                .num("phase", d.phase)
                .complex("prediction", p)
                .num("error", (d.ln() - p).norm())
                .build(),
        );
    }
    Ok(report)
}

#[derive(Args, Debug, Clone)]
pub struct TwArgs {
    #[arg(long, value_parser = parse_real_list, allow_hyphen_values = true)]
    pub s: RealList,
}

pub fn cmd_tw(a: &TwArgs, _progress: &Progress) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("tw", json!({ "s": a.s.0 }));
    for &s in &a.s.0 {
        report.rows.push(
            RowBuilder::new().num("s", s).num("cdf", tracy_widom_cdf(s)?).num("log_cdf", tracy_widom_log_cdf(s)?).build(),
        );
    }
    Ok(report)
}

#[derive(Args, Debug, Clone)]
pub struct LisArgs {
    /// Permutation size N
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Distance window [lo, hi]
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub hi: f64,
    /// Write the scaled samples here as CSV
    #[arg(long)]
    pub samples: Option<PathBuf>,
}

pub fn cmd_lis(a: &LisArgs, progress: &Progress) -> Result<RunReport, CliError> {
    let sample = sample_scaled_lis(a.n, a.trials, a.seed)?;
    progress.note(&format!("lis: {} trials done", a.trials));
    if let Some(path) = &a.samples {
        sample.write_csv(path)?;
    }
    let mut report = RunReport::new(
        "lis",
        json!({ "N": a.n, "trials": a.trials, "seed": a.seed, "lo": a.lo, "hi": a.hi }),
    );
    report.seeds.push(a.seed);
    report.rows.push(
        RowBuilder::new()
            .put("N", a.n)
            .put("trials", a.trials)
            .put("seed", a.seed)
            .num("ks_distance", sample.ks_distance(a.lo, a.hi)?)
            .num("ks_lattice", sample.ks_lattice(a.lo, a.hi)?)
            .num("mean", sample.mean())
            .build(),
    );
    Ok(report)
}

#[derive(Args, Debug, Clone)]
pub struct GesselArgs {
    #[arg(long, value_parser = parse_int_list)]
    pub n: IntList,
    #[arg(long, value_parser = parse_real_list)]
    pub lambda: RealList,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
}

pub fn cmd_gessel(a: &GesselArgs, _progress: &Progress) -> Result<RunReport, CliError> {
    let mut report =
        RunReport::new("gessel", json!({ "n": a.n.0, "lambda": a.lambda.0, "n_max": a.n_max }));
    for &n in &a.n.0 {
        for &lambda in &a.lambda.0 {
            let g = gessel_check(n, lambda, a.n_max)?;
            report.rows.push(
                RowBuilder::new()
                    .put("n", n)
                    .num("lambda", lambda)
                    .put("n_max", a.n_max)
                    .num("determinant", g.determinant)
                    .num("series", g.series)
                    .num("residual", g.residual)
                    .num("tail_bound", g.tail_bound)
                    .build(),
            );
        }
    }
    Ok(report)
}
