//! Command-line driver: `compute`, `verify`, `sweep` and `identities` modes,
//! each writing one JSON object per line followed by a summary line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input or
//! evaluation errors.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::biorth::{BiorthogonalSystem, OrthogonalSystem};
use crate::error::{Error, Result};
use crate::formats::{
    complex_json, integrand_spec_json, load_measure, one_matrix_spec_json, parse_spec,
    read_spec_source, LoadedMeasure,
};
use crate::formulas::{
    integral_one, integral_two_with_budget, EvaluationReport, IntegrandSpec, OneMatrixSpec,
};
use crate::measure::{catalog, DiscreteBiMeasure, DiscreteMeasure};
use crate::oracle::{self, OracleBudget};
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Evaluate the determinantal formula only.
    Compute,
    /// Evaluate the formula and compare with brute-force summation.
    Verify,
    /// Verify every spec in a grid of list sizes with seeded random parameters.
    Sweep,
    /// Check the algebraic identities on seeded random draws.
    Identities,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "symint",
    version,
    about = "Evaluate and verify determinantal formulas for integrals over one- and two-matrix ensembles"
)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Measure JSON file, or `builtin:<name>` (coupled-sign, exp-xy-grid3,
    /// exp-xy-grid5, two-point, legendre8).
    #[arg(long)]
    pub measure: Option<String>,
    /// Spec JSON file or inline JSON. For `sweep`, optional ranges
    /// `{"N":[..],"L":[..],"M":[..]}`.
    #[arg(long)]
    pub spec: Option<String>,
    /// Relative tolerance for `verify` and `sweep`.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp field so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Maximum number of N-tuples per oracle sum.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            measure: None,
            spec: None,
            tolerance: 1e-8,
            seed: 0,
            out: None,
            no_timestamp: false,
            budget: 10_000_000,
        }
    }
}

/// Residual thresholds of the `identities` mode.
pub const PARTIAL_FRACTION_TOLERANCE: f64 = 1e-10;
pub const CAUCHY_BINET_TOLERANCE: f64 = 1e-9;
pub const INTERPOLATION_TOLERANCE: f64 = 1e-10;
pub const REDUCTION_TOLERANCE: f64 = 1e-9;

/// Pole radius for the kernel-reduction draws; closer poles slow the decay of
/// `K₂₁^J`, which keeps that identity well conditioned.
pub const REDUCTION_POLE_RADIUS: f64 = 1.5;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRanges {
    #[serde(rename = "N", default = "default_n")]
    n: Vec<usize>,
    #[serde(rename = "L", default = "default_lm")]
    l: Vec<usize>,
    #[serde(rename = "M", default = "default_lm")]
    m: Vec<usize>,
}

fn default_n() -> Vec<usize> {
    vec![1, 2]
}

fn default_lm() -> Vec<usize> {
    vec![0, 1, 2]
}

impl Default for SweepRanges {
    fn default() -> Self {
        Self {
            n: default_n(),
            l: default_lm(),
            m: default_lm(),
        }
    }
}

#[derive(Debug, Default)]
struct Tally {
    evaluated: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
    errors: usize,
}

struct Reporter<'a> {
    out: &'a mut dyn Write,
    timestamp: bool,
}

impl Reporter<'_> {
    fn emit(&mut self, mut record: Map<String, Value>) -> Result<()> {
        if self.timestamp {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            record.insert("timestamp".into(), json!(now));
        }
        writeln!(self.out, "{}", Value::Object(record))
            .map_err(|e| Error::Invalid(format!("write failed: {e}")))
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("records are JSON objects"),
    }
}

/// Run one CLI invocation; returns the process exit code.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    let mut file;
    let out: &mut dyn Write = match &config.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => {
                file = std::io::BufWriter::new(f);
                &mut file
            }
            Err(e) => {
                let _ = writeln!(diag, "error: cannot create {}: {e}", path.display());
                return 2;
            }
        },
        None => stdout,
    };
    let mut reporter = Reporter {
        out,
        timestamp: !config.no_timestamp,
    };
    let code = match execute(config, &mut reporter) {
        Ok(tally) => {
            let summary = json!({"summary": {
                "mode": format!("{:?}", config.mode).to_lowercase(),
                "evaluated": tally.evaluated,
                "passed": tally.passed,
                "failed": tally.failed,
                "skipped": tally.skipped,
                "errors": tally.errors,
            }});
            if let Err(e) = reporter.emit(object(summary)) {
                let _ = writeln!(diag, "error: {e}");
                return 2;
            }
            if tally.failed > 0 {
                let _ = writeln!(diag, "{} check(s) failed", tally.failed);
                1
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            2
        }
    };
    if reporter.out.flush().is_err() {
        return 2;
    }
    code
}

fn execute(config: &RunConfig, reporter: &mut Reporter) -> Result<Tally> {
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let budget = OracleBudget::new(config.budget)?;
    match config.mode {
        Mode::Compute | Mode::Verify => single(config, budget, reporter),
        Mode::Sweep => sweep(config, budget, reporter),
        Mode::Identities => identities(config, reporter),
    }
}

fn require_measure(config: &RunConfig) -> Result<LoadedMeasure> {
    let source = config
        .measure
        .as_deref()
        .ok_or_else(|| Error::Invalid("--measure is required for this mode".into()))?;
    load_measure(source)
}

fn two_system(m: DiscreteBiMeasure) -> Result<BiorthogonalSystem> {
    let limit = m.x_nodes().len().min(m.y_nodes().len()) - 1;
    BiorthogonalSystem::largest(Arc::new(m), limit)
}

fn one_system(m: DiscreteMeasure) -> Result<OrthogonalSystem> {
    let limit = m.len() - 1;
    OrthogonalSystem::largest(Arc::new(m), limit)
}

fn report_record(spec: Value, r: &EvaluationReport, tolerance: Option<f64>) -> Map<String, Value> {
    let rel = r.rel_residual();
    let pass = match (tolerance, rel) {
        (Some(tol), Some(rel)) => json!(rel < tol),
        _ => Value::Null,
    };
    object(json!({
        "spec": spec,
        "case": r.case_used.name(),
        "swapped": r.swapped,
        "value": complex_json(r.value),
        "oracle": r.oracle_value.map(complex_json),
        "abs_residual": r.abs_residual,
        "rel_residual": rel,
        "pass": pass,
    }))
}

fn single(config: &RunConfig, budget: OracleBudget, reporter: &mut Reporter) -> Result<Tally> {
    let measure = require_measure(config)?;
    let source = config
        .spec
        .as_deref()
        .ok_or_else(|| Error::Invalid("--spec is required for this mode".into()))?;
    let spec = parse_spec(&read_spec_source(source)?)?;
    let verify = config.mode == Mode::Verify;
    let oracle_budget = verify.then_some(budget);
    let (spec_json, report) = match measure {
        LoadedMeasure::Two(m) => {
            let spec = spec.two()?;
            let sys = two_system(m)?;
            (
                integrand_spec_json(&spec),
                integral_two_with_budget(&sys, &spec, oracle_budget)?,
            )
        }
        LoadedMeasure::One(m) => {
            let spec = spec.one()?;
            let sys = one_system(m)?;
            (
                one_matrix_spec_json(&spec),
                integral_one(&sys, &spec, oracle_budget)?,
            )
        }
    };
    let mut tally = Tally {
        evaluated: 1,
        ..Tally::default()
    };
    if verify {
        if report.rel_residual().is_some_and(|r| r < config.tolerance) {
            tally.passed += 1;
        } else {
            tally.failed += 1;
        }
    }
    reporter.emit(report_record(
        spec_json,
        &report,
        verify.then_some(config.tolerance),
    ))?;
    Ok(tally)
}

fn circle_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex {
    Complex::from_polar(radius, rng.gen_range(0.0..TAU))
}

/// Minimum distance between two draws in the same list. Nearly coincident
/// parameters approach a confluent limit where `1/Δ` amplifies rounding.
pub const MIN_DRAW_SEPARATION: f64 = 0.2;

/// `count` points on a circle, redrawing any that fall within
/// [`MIN_DRAW_SEPARATION`] of an earlier one.
pub fn circle_points(rng: &mut ChaCha8Rng, count: usize, radius: f64) -> Vec<Complex> {
    let mut out: Vec<Complex> = Vec::with_capacity(count);
    while out.len() < count {
        let z = circle_point(rng, radius);
        if out.iter().all(|w| (z - w).norm() >= MIN_DRAW_SEPARATION) {
            out.push(z);
        }
    }
    out
}

enum SweepSpec {
    Two(IntegrandSpec),
    One(OneMatrixSpec),
}

fn is_skip(e: &Error) -> bool {
    matches!(
        e,
        Error::CapExceeded { .. } | Error::DegreeOutOfRange { .. } | Error::BudgetExceeded { .. }
    )
}

fn sweep(config: &RunConfig, budget: OracleBudget, reporter: &mut Reporter) -> Result<Tally> {
    let measure = require_measure(config)?;
    let ranges: SweepRanges = match &config.spec {
        Some(source) => serde_json::from_str(&read_spec_source(source)?)
            .map_err(|e| Error::Invalid(format!("sweep ranges JSON: {e}")))?,
        None => SweepRanges::default(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut specs = Vec::new();
    match &measure {
        LoadedMeasure::Two(_) => {
            for &n in &ranges.n {
                for &l1 in &ranges.l {
                    for &l2 in &ranges.l {
                        for &m1 in &ranges.m {
                            for &m2 in &ranges.m {
                                let xi = circle_points(&mut rng, l1, 2.0);
                                let zeta = circle_points(&mut rng, l2, 2.0);
                                let eta = circle_points(&mut rng, m1, 3.0);
                                let mu = circle_points(&mut rng, m2, 3.0);
                                specs.push(SweepSpec::Two(IntegrandSpec::new(
                                    n, xi, zeta, eta, mu,
                                )?));
                            }
                        }
                    }
                }
            }
        }
        LoadedMeasure::One(_) => {
            for &n in &ranges.n {
                for &l in &ranges.l {
                    for &m in &ranges.m {
                        let xi = circle_points(&mut rng, l, 2.0);
                        let eta = circle_points(&mut rng, m, 3.0);
                        specs.push(SweepSpec::One(OneMatrixSpec::new(n, xi, eta)?));
                    }
                }
            }
        }
    }

    let tolerance = config.tolerance;
    let records: Vec<(Map<String, Value>, Outcome)> = match measure {
        LoadedMeasure::Two(m) => {
            let sys = two_system(m)?;
            specs
                .par_iter()
                .map(|s| {
                    let SweepSpec::Two(spec) = s else {
                        unreachable!()
                    };
                    classify(
                        integrand_spec_json(spec),
                        integral_two_with_budget(&sys, spec, Some(budget)),
                        tolerance,
                    )
                })
                .collect()
        }
        LoadedMeasure::One(m) => {
            let sys = one_system(m)?;
            specs
                .par_iter()
                .map(|s| {
                    let SweepSpec::One(spec) = s else {
                        unreachable!()
                    };
                    classify(
                        one_matrix_spec_json(spec),
                        integral_one(&sys, spec, Some(budget)),
                        tolerance,
                    )
                })
                .collect()
        }
    };

    let mut tally = Tally::default();
    for (record, outcome) in records {
        match outcome {
            Outcome::Pass => {
                tally.evaluated += 1;
                tally.passed += 1;
            }
            Outcome::Fail => {
                tally.evaluated += 1;
                tally.failed += 1;
            }
            Outcome::Skip => tally.skipped += 1,
            Outcome::Error => {
                tally.evaluated += 1;
                tally.failed += 1;
                tally.errors += 1;
            }
        }
        reporter.emit(record)?;
    }
    Ok(tally)
}

enum Outcome {
    Pass,
    Fail,
    Skip,
    Error,
}

fn classify(
    spec: Value,
    result: Result<EvaluationReport>,
    tolerance: f64,
) -> (Map<String, Value>, Outcome) {
    match result {
        Ok(r) => {
            let pass = r.rel_residual().is_some_and(|x| x < tolerance);
            let outcome = if pass { Outcome::Pass } else { Outcome::Fail };
            (report_record(spec, &r, Some(tolerance)), outcome)
        }
        Err(e) if is_skip(&e) => (
            object(json!({"spec": spec, "skipped": e.to_string()})),
            Outcome::Skip,
        ),
        Err(e) => (
            object(json!({"spec": spec, "error": e.to_string(), "pass": false})),
            Outcome::Error,
        ),
    }
}

fn square_point(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn annulus_point(rng: &mut ChaCha8Rng) -> Complex {
    Complex::from_polar(rng.gen_range(1.5..2.5), rng.gen_range(0.0..TAU))
}

fn identity_record(
    name: &str,
    draws: usize,
    worst: f64,
    threshold: f64,
    tally: &mut Tally,
) -> Map<String, Value> {
    let pass = worst < threshold;
    tally.evaluated += 1;
    if pass {
        tally.passed += 1;
    } else {
        tally.failed += 1;
    }
    object(json!({
        "identity": name,
        "draws": draws,
        "max_residual": worst,
        "threshold": threshold,
        "pass": pass,
    }))
}

fn identities(config: &RunConfig, reporter: &mut Reporter) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tally = Tally::default();

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(0..=4);
        let m = rng.gen_range(0..=n);
        let x: Vec<Complex> = (0..n).map(|_| square_point(&mut rng)).collect();
        let eta: Vec<Complex> = (0..m).map(|_| annulus_point(&mut rng)).collect();
        worst = worst.max(oracle::check_partial_frac_1(&x, &eta)?);
    }
    reporter.emit(identity_record(
        "partial_frac_1",
        100,
        worst,
        PARTIAL_FRACTION_TOLERANCE,
        &mut tally,
    ))?;

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(0..=4);
        let m = rng.gen_range(n..=4);
        let x: Vec<Complex> = (0..n).map(|_| square_point(&mut rng)).collect();
        let eta: Vec<Complex> = (0..m).map(|_| annulus_point(&mut rng)).collect();
        worst = worst.max(oracle::check_partial_frac_2(&x, &eta)?);
    }
    reporter.emit(identity_record(
        "partial_frac_2",
        100,
        worst,
        PARTIAL_FRACTION_TOLERANCE,
        &mut tally,
    ))?;

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let l = rng.gen_range(1..=3);
        let n = rng.gen_range(0..=3);
        let mut vectors = || -> Vec<Vec<Complex>> {
            (0..l)
                .map(|_| (0..n + l).map(|_| square_point(&mut rng)).collect())
                .collect()
        };
        let p = vectors();
        let s = vectors();
        worst = worst.max(oracle::check_cauchy_binet(&p, &s, n)?);
    }
    reporter.emit(identity_record(
        "cauchy_binet",
        50,
        worst,
        CAUCHY_BINET_TOLERANCE,
        &mut tally,
    ))?;

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let l1 = rng.gen_range(0..=3);
        let m1 = rng.gen_range(0..=l1);
        let l2 = rng.gen_range(0..=3);
        let m2 = rng.gen_range(0..=l2);
        let spec = IntegrandSpec::new(
            1,
            circle_points(&mut rng, l1, 2.0),
            circle_points(&mut rng, l2, 2.0),
            circle_points(&mut rng, m1, 3.0),
            circle_points(&mut rng, m2, 3.0),
        )?;
        worst = worst.max(oracle::check_interpolation_prefactor(&spec)?);
    }
    reporter.emit(identity_record(
        "interpolation_prefactor",
        50,
        worst,
        INTERPOLATION_TOLERANCE,
        &mut tally,
    ))?;

    let bimeasure = match &config.measure {
        Some(source) => match load_measure(source)? {
            LoadedMeasure::Two(m) => m,
            LoadedMeasure::One(m) => m.diagonal_bimeasure(),
        },
        None => catalog::exp_xy_grid(&[-1.0, -0.5, 0.0, 0.5, 1.0]),
    };
    let sys = two_system(bimeasure)?;
    // Truncations stay strictly below the support rank: K₂₁^J decays
    // geometrically towards zero there and a relative residual loses meaning.
    let top = sys.degree_cap();
    let mut worst = [0.0f64; 4];
    for _ in 0..20 {
        let l1 = rng.gen_range(0..=2.min(top));
        let l2 = rng.gen_range(0..=2.min(top));
        let m1 = rng.gen_range(1..=2);
        let m2 = rng.gen_range(1..=2);
        let spec = IntegrandSpec::new(
            1,
            circle_points(&mut rng, l1, 2.0),
            circle_points(&mut rng, l2, 2.0),
            circle_points(&mut rng, m1, REDUCTION_POLE_RADIUS),
            circle_points(&mut rng, m2, REDUCTION_POLE_RADIUS),
        )?;
        let lo = l1.max(l2);
        let j = rng.gen_range(lo..=(lo + 1).min(top));
        let r = oracle::check_kernel_reductions(&sys, &spec, j)?;
        for (w, v) in worst.iter_mut().zip([r.k11, r.k22, r.k21, r.p_tilde]) {
            *w = w.max(v);
        }
    }
    for (name, w) in [
        "reduction_k11",
        "reduction_k22",
        "reduction_k21",
        "reduction_p_tilde",
    ]
    .iter()
    .zip(worst)
    {
        reporter.emit(identity_record(
            name,
            20,
            w,
            REDUCTION_TOLERANCE,
            &mut tally,
        ))?;
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(config: &RunConfig) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(config, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn verify_hand_example() {
        let mut c = RunConfig::new(Mode::Verify);
        c.measure = Some("builtin:coupled-sign".into());
        c.spec = Some(r#"{"N":1,"xi":[[2,0]]}"#.into());
        c.no_timestamp = true;
        let (code, out, _) = run_capture(&c);
        assert_eq!(code, 0, "{out}");
        let first: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(first["case"], "Case1");
        assert!((first["value"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
        assert!(first["abs_residual"].as_f64().unwrap() < 1e-12);
        assert_eq!(first["pass"], true);
    }

    #[test]
    fn compute_pole_on_support_exits_2() {
        let mut c = RunConfig::new(Mode::Compute);
        c.measure = Some("builtin:coupled-sign".into());
        c.spec = Some(r#"{"N":1,"mu":[[1,0]]}"#.into());
        let (code, _, err) = run_capture(&c);
        assert_eq!(code, 2);
        assert!(err.contains("PoleOnSupport"), "{err}");
    }

    #[test]
    fn bad_inputs_exit_2() {
        let mut c = RunConfig::new(Mode::Compute);
        c.measure = Some("builtin:coupled-sign".into());
        c.spec = Some("{not json".into());
        assert_eq!(run_capture(&c).0, 2);
        c.spec = Some(r#"{"N":1}"#.into());
        c.tolerance = 0.0;
        assert_eq!(run_capture(&c).0, 2);
    }

    #[test]
    fn failing_check_exits_1() {
        let mut c = RunConfig::new(Mode::Verify);
        c.measure = Some("builtin:exp-xy-grid3".into());
        c.spec = Some(r#"{"N":2,"xi":[[1,1]],"eta":[[0,3]]}"#.into());
        c.tolerance = 1e-300;
        let (code, out, _) = run_capture(&c);
        // A residual of exactly zero would still pass; anything else fails.
        let first: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        if first["rel_residual"].as_f64().unwrap() > 0.0 {
            assert_eq!(code, 1);
        }
    }
}
