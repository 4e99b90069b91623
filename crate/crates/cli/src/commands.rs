//! Command implementations. Each returns a [`Report`] plus the echoed
//! configuration; nothing here writes to standard output.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use zeta_laplace::arithmetic::divisor_sieve;
use zeta_laplace::closed_forms::{
    atkinson_l1, atkinson_l1_terms, atkinson_l2_k0, atkinson_l2_terms, fit_main_coeffs, fit_main_free_values,
    kober_fit, kober_fit_values, kober_main, kober_window_scaling, laplace_real, main_term, KoberCoeffs,
    MainTermCoeffs, Provenance,
};
use zeta_laplace::spectral::{
    counterexample_table, parse_spectral_table, partial_sum_bound, r_function, spectral_sum, synthetic_table,
    theorem_l2, SpectralTable,
};
use zeta_laplace::transforms::{
    laplace_identity_residual, laplace_quadrature, laplace_romberg, moment_integrals, trivial_bound_check,
    LaplaceResult, Method, QuadratureConfig,
};
use zeta_laplace::Error;

use crate::parse::{parse_complex, parse_grid};
use crate::report::{Cell, Report};
use crate::{Cli, Command, EvalArgs, FitArgs, MomentArgs, SpectralArgs, VerifyArgs, EXIT_CHECK_FAILED, EXIT_DATA, EXIT_USAGE};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Validation(_) | Error::NotFound(_) => EXIT_DATA,
            Error::Domain(_) | Error::Range(_) | Error::Pole(_) | Error::BranchCut(_) => EXIT_USAGE,
            Error::Tolerance(_)
            | Error::Convergence(_)
            | Error::Capacity(_)
            | Error::IllConditioned(_)
            | Error::NonFinite(_) => EXIT_CHECK_FAILED,
        };
        CliError { code, message: e.to_string() }
    }
}

pub struct Outcome {
    pub report: Report,
    pub config: Value,
    pub all_passed: bool,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let format = serde_json::to_value(cli.format).unwrap_or(Value::Null);
    let mut outcome = match &cli.command {
        Command::Eval(a) => eval(a, false),
        Command::Compare(a) => eval(a, true),
        Command::Fit(a) => fit(a),
        Command::Moments(a) => moments(a),
        Command::SpectralCheck(a) => spectral_check(a),
        Command::Verify(a) => verify(a),
    }?;
    if let Value::Object(map) = &mut outcome.config {
        map.insert("output_format".into(), format);
    }
    Ok(outcome)
}

fn load_table(path: Option<&Path>) -> Result<SpectralTable, CliError> {
    match path {
        None => Ok(synthetic_table()),
        Some(p) => {
            let file = std::fs::File::open(p)
                .map_err(|e| CliError { code: EXIT_DATA, message: format!("cannot read {}: {e}", p.display()) })?;
            parse_spectral_table(std::io::BufReader::new(file)).map_err(|e| CliError {
                code: EXIT_DATA,
                message: format!("{}: {e}", p.display()),
            })
        }
    }
}

fn table_echo(path: Option<&Path>) -> Value {
    path.map_or(Value::from("builtin:synthetic"), |p| Value::from(p.display().to_string()))
}

fn collect_points(s: &[String], grid: Option<&str>, linear: bool) -> Result<Vec<Complex64>, CliError> {
    let mut points = s.iter().map(|t| parse_complex(t).map_err(usage)).collect::<Result<Vec<_>, _>>()?;
    if let Some(g) = grid {
        points.extend(parse_grid(g, linear).map_err(usage)?.into_iter().map(|x| Complex64::new(x, 0.0)));
    }
    if points.is_empty() {
        return Err(usage("no points given (use --s or --grid)"));
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EvalMethod {
    Quadrature,
    Romberg,
    Kober,
    Atkinson,
    K0,
    Theorem,
}

impl EvalMethod {
    fn parse(name: &str, k: u32) -> Result<Self, CliError> {
        let m = match name.trim() {
            "quadrature" => Self::Quadrature,
            "romberg" => Self::Romberg,
            "kober" => Self::Kober,
            "atkinson" | "atkinson_series" => Self::Atkinson,
            "k0" | "k0_series" => Self::K0,
            "theorem" | "theorem_spectral" => Self::Theorem,
            other => return Err(usage(format!("unknown method {other:?}"))),
        };
        let needed = match m {
            Self::Kober | Self::Atkinson => Some(1),
            Self::K0 | Self::Theorem => Some(2),
            _ => None,
        };
        if needed.is_some_and(|n| n != k) {
            return Err(usage(format!("method {name} applies to k = {}", needed.unwrap_or(0))));
        }
        Ok(m)
    }

    fn tag(self) -> &'static str {
        match self {
            Self::Quadrature => "quadrature",
            Self::Romberg => "quadrature_romberg",
            Self::Kober => Method::Kober.tag(),
            Self::Atkinson => Method::AtkinsonSeries.tag(),
            Self::K0 => Method::K0Series.tag(),
            Self::Theorem => Method::TheoremSpectral.tag(),
        }
    }
}

/// Kober expansion completed by a cubic fitted on `sigma in [0.01, 0.08]`.
struct KoberModel {
    fit: KoberCoeffs,
    err: f64,
}

const KOBER_WINDOW: (f64, f64) = (0.01, 0.08);

impl KoberModel {
    fn build() -> Result<Self, CliError> {
        let cfg = QuadratureConfig::with_tol(1e-11);
        let sig: Vec<f64> = (0..=56).map(|i| KOBER_WINDOW.0 + 0.00125 * i as f64).collect();
        let rem = sig
            .iter()
            .map(|&s| Ok(laplace_quadrature(1, Complex64::new(2.0 * s, 0.0), &cfg)?.value.re - kober_main(s)?))
            .collect::<Result<Vec<f64>, Error>>()?;
        let held = kober_window_scaling(&sig, &rem, KOBER_WINDOW.0, &[KOBER_WINDOW.1 - KOBER_WINDOW.0], 3)?;
        Ok(Self { fit: kober_fit_values(&sig, &rem, 3)?, err: held[0].1 })
    }

    fn eval(&self, s: Complex64) -> Result<LaplaceResult, CliError> {
        let sigma = s.re / 2.0;
        if s.im != 0.0 || !(sigma > 0.0 && sigma <= KOBER_WINDOW.1) {
            return Err(usage(format!("kober needs real 0 < s <= {}", 2.0 * KOBER_WINDOW.1)));
        }
        Ok(LaplaceResult {
            s,
            k: 1,
            value: Complex64::new(kober_main(sigma)? + self.fit.eval(sigma), 0.0),
            method: Method::Kober,
            err_estimate: self.err,
        })
    }
}

fn eval(a: &EvalArgs, compare: bool) -> Result<Outcome, CliError> {
    if a.k != 1 && a.k != 2 {
        return Err(usage("--k must be 1 or 2"));
    }
    if !(a.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let points = collect_points(&a.points.s, a.points.grid.as_deref(), a.points.linear)?;
    let mut methods = a.method.iter().map(|m| EvalMethod::parse(m, a.k)).collect::<Result<Vec<_>, _>>()?;
    if compare && !methods.contains(&EvalMethod::Quadrature) {
        methods.insert(0, EvalMethod::Quadrature);
    }
    let cfg = QuadratureConfig::with_tol(a.tol);

    let uses = |m: EvalMethod| methods.contains(&m);
    let table = if uses(EvalMethod::Theorem) { Some(load_table(a.table.table.as_deref())?) } else { None };
    let coeffs = if uses(EvalMethod::Theorem) {
        Some(match &a.coeffs {
            Some(v) => MainTermCoeffs { a: v[0], b: v[1], c: v[2], d: v[3], e: v[4], provenance: Provenance::Fitted },
            None => fit_main_coeffs(&parse_grid("1e-3:0.3:24", false).map_err(usage)?)?,
        })
    } else {
        None
    };
    let kober = if uses(EvalMethod::Kober) { Some(KoberModel::build()?) } else { None };
    let n_max = points
        .iter()
        .map(|&s| match (uses(EvalMethod::Atkinson), uses(EvalMethod::K0)) {
            (true, _) => atkinson_l1_terms(s),
            (_, true) => atkinson_l2_terms(s),
            _ => Ok(1),
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(1);
    let dtable = if uses(EvalMethod::Atkinson) || uses(EvalMethod::K0) {
        Some(divisor_sieve(a.k * 2, n_max)?)
    } else {
        None
    };

    let one = |s: Complex64, m: EvalMethod| -> Result<LaplaceResult, CliError> {
        Ok(match m {
            EvalMethod::Quadrature => laplace_quadrature(a.k, s, &cfg)?,
            EvalMethod::Romberg => laplace_romberg(a.k, s, &cfg)?,
            EvalMethod::Kober => kober.as_ref().map(|km| km.eval(s)).unwrap_or_else(|| Err(usage("kober model")))?,
            EvalMethod::Atkinson => {
                let t = dtable.as_ref().ok_or_else(|| usage("divisor table"))?;
                atkinson_l1(s, atkinson_l1_terms(s)?, t)?
            }
            EvalMethod::K0 => {
                let t = dtable.as_ref().ok_or_else(|| usage("divisor table"))?;
                atkinson_l2_k0(s, atkinson_l2_terms(s)?, t)?
            }
            EvalMethod::Theorem => theorem_l2(
                s,
                coeffs.as_ref().ok_or_else(|| usage("coefficients"))?,
                table.as_ref().ok_or_else(|| usage("table"))?,
            )?,
        })
    };

    let per_point: Vec<Vec<LaplaceResult>> = points
        .par_iter()
        .map(|&s| methods.iter().map(|&m| one(s, m)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;

    let mut columns = vec!["k", "s_re", "s_im", "method", "value_re", "value_im", "err_estimate"];
    if compare {
        columns.extend(["abs_diff", "rel_diff"]);
    }
    let mut report = Report::new(columns);
    for results in &per_point {
        let reference = methods
            .iter()
            .position(|&m| m == EvalMethod::Quadrature)
            .map(|i| results[i].value);
        for (r, m) in results.iter().zip(&methods) {
            let mut row: Vec<Cell> = vec![
                r.k.into(),
                r.s.re.into(),
                r.s.im.into(),
                m.tag().into(),
                r.value.re.into(),
                r.value.im.into(),
                r.err_estimate.into(),
            ];
            if compare {
                let q = reference.unwrap_or(r.value);
                let d = (r.value - q).norm();
                row.push(d.into());
                row.push((d / q.norm()).into());
            }
            report.push(row);
        }
    }
    let config = json!({
        "command": if compare { "compare" } else { "eval" },
        "k": a.k,
        "points": points.iter().map(|p| [p.re, p.im]).collect::<Vec<_>>(),
        "methods": methods.iter().map(|m| m.tag()).collect::<Vec<_>>(),
        "tol": a.tol,
        "table_path": if uses(EvalMethod::Theorem) { table_echo(a.table.table.as_deref()) } else { Value::Null },
        "coeffs": coeffs.map(|c| serde_json::to_value(c).unwrap_or(Value::Null)),
    });
    Ok(Outcome { report, config, all_passed: true })
}

fn fit(a: &FitArgs) -> Result<Outcome, CliError> {
    let mut grid = parse_grid(&a.sigma_grid, a.linear).map_err(usage)?;
    if let Some(seed) = a.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for x in &mut grid {
            *x *= 1.0 + 0.01 * rng.gen_range(-1.0..1.0);
        }
    }
    let mut report = Report::new(vec!["coefficient", "value", "provenance"]);
    let tag = |p: Provenance| match p {
        Provenance::ClosedForm => "closed_form",
        Provenance::Fitted => "fitted",
    };
    match a.coeffs.as_str() {
        "main" | "main-free" => {
            let m = if a.coeffs == "main" {
                fit_main_coeffs(&grid)?
            } else {
                let l2: Vec<f64> = laplace_real(2, &grid)?.iter().map(|r| r.value.re).collect();
                fit_main_free_values(&grid, &l2)?
            };
            let frozen = if a.coeffs == "main" { Provenance::ClosedForm } else { Provenance::Fitted };
            for (name, v, p) in [
                ("A", m.a, frozen),
                ("B", m.b, frozen),
                ("C", m.c, Provenance::Fitted),
                ("D", m.d, Provenance::Fitted),
                ("E", m.e, Provenance::Fitted),
            ] {
                report.push(vec![name.into(), v.into(), tag(p).into()]);
            }
        }
        "kober" => {
            let k = kober_fit(&grid, a.degree)?;
            for (i, c) in k.c.iter().enumerate() {
                report.push(vec![format!("c{i}").into(), (*c).into(), "fitted".into()]);
            }
            report.summary.insert("rms_residual".into(), json!(k.residual));
        }
        other => return Err(usage(format!("unknown coefficient set {other:?} (main, main-free, kober)"))),
    }
    let config = json!({
        "command": "fit",
        "coeffs": a.coeffs,
        "sigma_grid": a.sigma_grid,
        "linear": a.linear,
        "degree": a.degree,
        "seed": a.seed,
        "points": grid,
    });
    Ok(Outcome { report, config, all_passed: true })
}

fn moments(a: &MomentArgs) -> Result<Outcome, CliError> {
    let mut ts = a.t.clone();
    if let Some(g) = &a.grid {
        ts.extend(parse_grid(g, a.linear).map_err(usage)?);
    }
    if ts.is_empty() {
        return Err(usage("no heights given (use --t or --grid)"));
    }
    let recs = moment_integrals(a.k, &ts)?;
    let mut report = Report::new(vec!["k", "T", "value", "err_estimate"]);
    for r in &recs {
        report.push(vec![r.k.into(), r.t.into(), r.value.into(), r.err_estimate.into()]);
    }
    let config = json!({ "command": "moments", "k": a.k, "points": ts });
    Ok(Outcome { report, config, all_passed: true })
}

fn realness(table: &SpectralTable) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for i in 1..=20 {
        let v = spectral_sum(Complex64::new(i as f64 / 20.0, 0.0), table)?.value;
        worst = worst.max(v.im.abs() / (1.0 + v.norm()));
    }
    Ok(worst)
}

fn spectral_check(a: &SpectralArgs) -> Result<Outcome, CliError> {
    let table = load_table(a.table.table.as_deref())?;
    let r = partial_sum_bound(&table, a.c_exponent)?;
    let mut report = Report::new(vec!["K", "partial_sum", "ratio"]);
    for &(k, ratio) in &r.ratios {
        report.push(vec![k.into(), table.partial_sum(k).into(), ratio.into()]);
    }
    let real = realness(&table)?;
    report.summary.insert("max_ratio".into(), json!(r.max_ratio));
    report.summary.insert("top_decade_slope".into(), json!(r.top_decade_slope));
    report.summary.insert("bounded".into(), json!(r.bounded));
    report.summary.insert("realness".into(), json!(real));
    eprintln!(
        "partial sums: max ratio {:.4e}, top-decade slope {:.3}, bounded {}; spectral-sum realness {:.1e}",
        r.max_ratio, r.top_decade_slope, r.bounded, real
    );
    let config = json!({
        "command": "spectral-check",
        "table_path": table_echo(a.table.table.as_deref()),
        "c_exponent": a.c_exponent,
        "records": table.len(),
        "kappa_max": table.kappa_max(),
    });
    Ok(Outcome { report, config, all_passed: r.bounded && real <= 1e-10 })
}

struct Check {
    suite: &'static str,
    name: String,
    value: f64,
    threshold: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.value <= self.threshold
    }
}

fn identity_checks(tol: f64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for k in [1u32, 2] {
        for t in [1.0, 5.0, 10.0, 20.0] {
            out.push(Check {
                suite: "identities",
                name: format!("laplace_identity k={k} T={t}"),
                value: laplace_identity_residual(k, t)?,
                threshold: tol,
            });
            out.push(Check {
                suite: "identities",
                name: format!("trivial_bound k={k} T={t}"),
                value: if trivial_bound_check(k, t)? { 0.0 } else { 1.0 },
                threshold: 0.0,
            });
        }
    }
    let cfg = QuadratureConfig::default();
    for k in [1u32, 2] {
        let s = Complex64::new(0.5, 0.7);
        let a = laplace_quadrature(k, s, &cfg)?;
        let b = laplace_quadrature(k, s.conj(), &cfg)?;
        out.push(Check {
            suite: "identities",
            name: format!("conjugate symmetry L{k}(0.5+0.7i)"),
            value: (a.value - b.value.conj()).norm(),
            threshold: a.err_estimate + b.err_estimate,
        });
    }
    let coeffs = MainTermCoeffs { c: 1.0, d: -1.0, e: 0.5, ..MainTermCoeffs::closed_form() };
    let s = Complex64::new(0.3, 0.4);
    out.push(Check {
        suite: "identities",
        name: "conjugate symmetry main_term(0.3+0.4i)".into(),
        value: (main_term(s, &coeffs)? - main_term(s.conj(), &coeffs)?.conj()).norm(),
        threshold: 0.0,
    });
    Ok(out)
}

fn spectral_checks(table: &SpectralTable) -> Result<Vec<Check>, CliError> {
    let mut worst_r: f64 = 0.0;
    for i in 0..=2000 {
        let y = 5.0 + 495.0 * i as f64 / 2000.0;
        worst_r = worst_r.max(r_function(y)?.norm() * y.sqrt());
    }
    let shipped = partial_sum_bound(table, 3.0)?;
    let planted = partial_sum_bound(&counterexample_table(), 3.0)?;
    Ok(vec![
        Check { suite: "spectral", name: "spectral_sum realness".into(), value: realness(table)?, threshold: 1e-10 },
        Check { suite: "spectral", name: "max |R(y)| sqrt(y) on [5, 500]".into(), value: worst_r, threshold: 2.0 },
        Check {
            suite: "spectral",
            name: "partial sums bounded (C = 3), top-decade slope".into(),
            value: shipped.top_decade_slope,
            threshold: zeta_laplace::spectral::TREND_SLOPE,
        },
        Check {
            suite: "spectral",
            name: "planted counterexample flagged".into(),
            value: if planted.bounded { 1.0 } else { 0.0 },
            threshold: 0.0,
        },
    ])
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    if !(a.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let checks = match a.suite.as_str() {
        "identities" => identity_checks(a.tol)?,
        "spectral" => spectral_checks(&load_table(a.table.table.as_deref())?)?,
        "all" => {
            let mut v = identity_checks(a.tol)?;
            v.extend(spectral_checks(&load_table(a.table.table.as_deref())?)?);
            v
        }
        other => return Err(usage(format!("unknown suite {other:?} (identities, spectral, all)"))),
    };
    let mut report = Report::new(vec!["suite", "check", "value", "threshold", "pass"]);
    for c in &checks {
        report.push(vec![c.suite.into(), c.name.clone().into(), c.value.into(), c.threshold.into(), c.pass().into()]);
    }
    let failed = checks.iter().filter(|c| !c.pass()).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", checks.len());
    }
    let config = json!({
        "command": "verify",
        "suite": a.suite,
        "tol": a.tol,
        "table_path": if a.suite == "identities" { Value::Null } else { table_echo(a.table.table.as_deref()) },
    });
    Ok(Outcome { report, config, all_passed: failed == 0 })
}
