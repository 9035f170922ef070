//! The `homoconn` command line: dimension tables, connection reports,
//! Einstein scans and the verification suite, emitted as JSON or Markdown.
//!
//! Every JSON document has the shape
//! `{"command", "config", "results", "residuals", "verdicts"}` and complex
//! numbers are written as `{"re": .., "im": ..}`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::connection_families::{family_alpha, named_connection, skew_family, FamilyParams, NamedConnection, SphereClass};
use crate::error::{Error, Result};
use crate::invariant_solver::{dimension_row, BilinearMap, DimensionRow};
use crate::lie_core::{reductive_split, ReductiveSplit};
use crate::nomizu_calculus::{curvature, curvature_invariants, einstein_check, levi_civita_from_brackets, ConnectionReport, EinsteinVerdict};
use crate::sampling::DEFAULT_SEED;
use crate::verify::{run_suite, SuiteOptions, SuiteSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_TRIALS: usize = 100;

/// Threshold used to call a curvature tensor zero or cyclic.
const CURVATURE_TOL: f64 = 1e-9;

const PARAMS_SHAPE: &str = r#"{"family": "s7_metric", "q1": {"re": 1, "im": 0}, "q2": {"re": 0, "im": 0}, "t": -0.3333333333333333}
families: general_invariant {q1,q2,q3,t}, general_metric {q,t}, s7_invariant {q1,q2,q3,q4,t},
s7_metric {q1,q2,t}, s5_invariant {coeffs: [13 reals]}, s5_metric {q1,q2,q3,t},
s3_metric {t: 3x3 reals}, s3_full {coeffs: [27 reals]}"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Markdown,
}

#[derive(Debug, Parser)]
#[command(name = "homoconn", version, about = "Invariant connections on odd-dimensional spheres SU(n+1)/SU(n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions of the invariant, metric and skew-torsion connection spaces.
    Dims(DimsArgs),
    /// Curvature report for one connection.
    Connection(ConnectionArgs),
    /// Einstein verdicts over a grid of skew-torsion parameters.
    Scan(ScanArgs),
    /// Run the seeded verification batteries.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DimsArgs {
    /// Comma-separated sphere parameters n (S^{2n+1}).
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SphereArgs {
    /// s3, s5, s7, s<2n+1> or general.
    #[arg(long, default_value = "s7")]
    pub sphere: String,
    /// n for `--sphere general`.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ConnectionArgs {
    #[command(flatten)]
    pub sphere: SphereArgs,
    /// Skew-torsion parameter r.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub r: f64,
    /// Complex skew-torsion parameter q (s5 and s7), e.g. 1+0i, -i, 0.3.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Family parameters as JSON; overrides --r and --q.
    #[arg(long)]
    pub params: Option<String>,
    /// A named connection: levi_civita, canonical, natural, tanaka, characteristic.
    #[arg(long, conflicts_with = "params")]
    pub named: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub sphere: SphereArgs,
    /// `start:end:step` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "-1:1:0.5", allow_hyphen_values = true)]
    pub r_grid: String,
    /// Complex values (`0,1,i`), or real parts when --q-im-grid is given.
    #[arg(long, allow_hyphen_values = true)]
    pub q_grid: Option<String>,
    /// Imaginary parts; the q grid is then the product of --q-grid and this.
    #[arg(long, allow_hyphen_values = true)]
    pub q_im_grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, env = "HOMOCONN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Run the Jacobi battery on deliberately broken structure constants.
    #[arg(long, hide = true)]
    pub perturb_structure_constants: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub n: Option<usize>,
    pub params: Value,
    pub tolerance: f64,
    pub seed: u64,
    pub trials: usize,
    pub output_format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: &str, n: Option<usize>, params: Value, tolerance: f64, seed: u64, trials: usize, output_format: OutputFormat) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tolerance}")));
        }
        if trials == 0 {
            return Err(Error::InvalidInput("trials must be positive".into()));
        }
        Ok(RunConfig { command: command.into(), n, params, tolerance, seed, trials, output_format })
    }
}

/// The JSON document written by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub results: Value,
    pub residuals: Value,
    pub verdicts: Value,
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidInput(format!("cannot parse complex number '{s}' (expected forms like 1, -i, 0.3+0.4i)"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { 0.0 } else { re_part.parse::<f64>().map_err(|_| bad())? };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// `start:end:step` (inclusive, step > 0) or a comma-separated list of reals.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidInput(format!("bad grid '{s}': {why}"));
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("expected start:end:step"))?;
        let [a, b, step] = parts[..] else { return Err(bad("expected start:end:step")) };
        if !(step > 0.0) || b < a {
            return Err(bad("need end >= start and step > 0"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| a + k as f64 * step).collect())
    } else {
        s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad("expected numbers"))).collect()
    }
}

/// Resolves `--sphere`/`--n` into a class and n.
pub fn resolve_sphere(sphere: &str, n: Option<usize>) -> Result<(SphereClass, usize)> {
    let s = sphere.trim().to_ascii_lowercase();
    if s == "general" || s == "general_n" {
        let n = n.ok_or_else(|| Error::InvalidInput("--sphere general needs --n".into()))?;
        if n == 0 {
            return Err(Error::InvalidSphere(n));
        }
        return Ok((SphereClass::GeneralN, n));
    }
    let dim: usize = s
        .strip_prefix('s')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::InvalidInput(format!("unknown sphere '{sphere}' (use s3, s5, s7, s<2n+1> or general)")))?;
    if dim < 3 || dim % 2 == 0 {
        return Err(Error::InvalidInput(format!("S^{dim} is not an odd sphere of dimension >= 3")));
    }
    let k = (dim - 1) / 2;
    if let Some(explicit) = n {
        if explicit != k {
            return Err(Error::InvalidInput(format!("--n {explicit} contradicts --sphere {sphere}")));
        }
    }
    Ok((SphereClass::for_n(k), k))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn cx(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

pub fn cmd_dims(ns: &[usize]) -> Result<Vec<DimensionRow>> {
    if let Some(&bad) = ns.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidSphere(bad));
    }
    let splits = ns.iter().map(|&n| reductive_split(n)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<Result<DimensionRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = splits
            .iter()
            .map(|split| s.spawn(move || dimension_row(split, &levi_civita_from_brackets(split))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("dimension worker")).collect()
    });
    rows.into_iter().collect()
}

fn sphere_name(n: usize) -> String {
    format!("S^{}", 2 * n + 1)
}

/// What to evaluate in `connection`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConnectionSpec {
    Skew { class: SphereClass, n: usize, r: f64, q: Option<Complex64> },
    Family { n: usize, params: FamilyParams },
    Named { n: usize, name: NamedConnection },
}

impl ConnectionSpec {
    pub fn n(&self) -> usize {
        match self {
            ConnectionSpec::Skew { n, .. } | ConnectionSpec::Family { n, .. } | ConnectionSpec::Named { n, .. } => *n,
        }
    }

    pub fn alpha(&self, split: &ReductiveSplit) -> Result<BilinearMap> {
        match self {
            ConnectionSpec::Skew { class, r, q, .. } => skew_family(*class, *r, *q, split),
            ConnectionSpec::Family { params, .. } => family_alpha(params, split),
            ConnectionSpec::Named { name, .. } => named_connection(*name, split),
        }
    }

    pub fn describe(&self) -> Value {
        match self {
            ConnectionSpec::Skew { class, r, q, .. } => {
                json!({"kind": "skew_family", "sphere_class": class, "r": r, "q": q.map(cx)})
            }
            ConnectionSpec::Family { params, .. } => json!({"kind": "family", "family": params}),
            ConnectionSpec::Named { name, .. } => json!({"kind": "named", "name": name}),
        }
    }
}

/// Ricci sign and curvature class of an S^7 skew-torsion connection, next to
/// the row of the flatness table predicted for points of the Einstein cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S7Flatness {
    pub ricci_sign: String,
    pub curvature_class: String,
    pub cyclic_defect: f64,
    pub on_einstein_cone: bool,
    pub predicted_ricci_sign: Option<String>,
    pub predicted_curvature_class: Option<String>,
    pub matches_table: Option<bool>,
}

fn ricci_sign(sym_ricci: &DMatrix<f64>, tol: f64) -> &'static str {
    let ev = sym_ricci.clone().symmetric_eigenvalues();
    if ev.iter().all(|&e| e.abs() < tol) {
        "zero"
    } else if ev.iter().all(|&e| e > tol) {
        "positive"
    } else if ev.iter().all(|&e| e < -tol) {
        "negative"
    } else {
        "indefinite"
    }
}

/// Flatness table rows for |q| = |r|.
fn predicted_flatness(r: f64, tol: f64) -> (&'static str, &'static str) {
    let sign = if (r.abs() - 1.0).abs() < tol {
        "zero"
    } else if r.abs() < 1.0 {
        "positive"
    } else {
        "negative"
    };
    let class = if (r - 1.0).abs() < tol {
        "flat"
    } else if (r + 1.0).abs() < tol {
        "totally_skew"
    } else if r.abs() < tol {
        "levi_civita"
    } else {
        "nonzero"
    };
    (sign, class)
}

pub fn s7_flatness(split: &ReductiveSplit, alpha: &BilinearMap, report: &ConnectionReport, r: f64, q: Complex64, tol: f64) -> S7Flatness {
    let curv = curvature(split, alpha);
    let cyclic = curv.cyclic_defect(&split.gram);
    let curvature_class = if report.curvature_max < CURVATURE_TOL {
        "flat"
    } else if report.torsion_max < CURVATURE_TOL {
        "levi_civita"
    } else if cyclic < CURVATURE_TOL {
        "totally_skew"
    } else {
        "nonzero"
    };
    let sign = ricci_sign(&report.sym_ricci, tol);
    let on_cone = (q.norm_sqr() - r * r).abs() < tol;
    let (ps, pc) = predicted_flatness(r, tol);
    S7Flatness {
        ricci_sign: sign.into(),
        curvature_class: curvature_class.into(),
        cyclic_defect: cyclic,
        on_einstein_cone: on_cone,
        predicted_ricci_sign: on_cone.then(|| ps.into()),
        predicted_curvature_class: on_cone.then(|| pc.into()),
        matches_table: on_cone.then(|| ps == sign && pc == curvature_class),
    }
}

/// Output of `connection`.
#[derive(Debug, Clone)]
pub struct ConnectionOutcome {
    pub spec: ConnectionSpec,
    pub report: ConnectionReport,
    pub einstein: EinsteinVerdict,
    pub flatness: Option<S7Flatness>,
}

pub fn cmd_connection(spec: &ConnectionSpec, tol: f64) -> Result<ConnectionOutcome> {
    let split = reductive_split(spec.n())?;
    let alpha = spec.alpha(&split)?;
    let report = curvature_invariants(&split, &alpha);
    let einstein = einstein_check(&report, report.dim, tol);
    let flatness = match spec {
        ConnectionSpec::Skew { class: SphereClass::S7, r, q, .. } => {
            Some(s7_flatness(&split, &alpha, &report, *r, q.unwrap_or_default(), tol))
        }
        _ => None,
    };
    Ok(ConnectionOutcome { spec: spec.clone(), report, einstein, flatness })
}

fn report_json(r: &ConnectionReport) -> Value {
    json!({
        "dim": r.dim,
        "ricci": matrix_rows(&r.ricci),
        "sym_ricci": matrix_rows(&r.sym_ricci),
        "sym_ricci_via_torsion": matrix_rows(&r.sym_ricci_via_torsion),
        "scalar": r.scalar,
        "scalar_via_torsion": r.scalar_via_torsion,
        "s_tensor": matrix_rows(&r.s_tensor),
        "torsion_norm_sq": r.torsion_norm_sq,
        "curvature_max": r.curvature_max,
        "torsion_max": r.torsion_max,
    })
}

/// Closed-form Einstein prediction for a skew-torsion parameter point.
pub fn predicted_einstein(class: SphereClass, r: f64, q: Complex64, tol: f64) -> bool {
    match class {
        SphereClass::S3 => true,
        SphereClass::S7 => (q.norm_sqr() - r * r).abs() < tol,
        SphereClass::GeneralN | SphereClass::S5 => r.abs() < tol && q.norm() < tol,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub index: usize,
    pub r: f64,
    #[serde(with = "crate::connection_families::complex_serde")]
    pub q: Complex64,
    pub einstein: EinsteinVerdict,
    pub einstein_residual: f64,
    pub scalar: f64,
    pub route_gap: f64,
    pub predicted_einstein: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub class: SphereClass,
    pub n: usize,
    pub points: Vec<ScanPoint>,
}

impl ScanOutcome {
    pub fn locus(&self) -> Vec<&ScanPoint> {
        self.points.iter().filter(|p| p.einstein == EinsteinVerdict::Einstein).collect()
    }

    pub fn matches_prediction(&self) -> bool {
        self.points.iter().all(|p| (p.einstein == EinsteinVerdict::Einstein) == p.predicted_einstein)
    }
}

/// Evaluates every (r, q) point; results are ordered by grid index.
pub fn cmd_scan(class: SphereClass, n: usize, r_grid: &[f64], q_grid: &[Complex64], tol: f64, workers: usize) -> Result<ScanOutcome> {
    let split = reductive_split(n)?;
    let lc = crate::connection_families::levi_civita(&split)?;
    let qs: Vec<Option<Complex64>> = if class.has_q() {
        if q_grid.is_empty() {
            vec![Some(Complex64::new(0.0, 0.0))]
        } else {
            q_grid.iter().map(|&q| Some(q)).collect()
        }
    } else {
        if !q_grid.is_empty() {
            return Err(Error::InvalidInput(format!("the {class} skew family has no q parameter")));
        }
        vec![None]
    };
    let grid: Vec<(f64, Option<Complex64>)> = r_grid.iter().flat_map(|&r| qs.iter().map(move |&q| (r, q))).collect();
    // Validate class/n once before fanning out.
    crate::connection_families::skew_difference(class, 0.0, qs[0], &split)?;

    let workers = workers.max(1).min(grid.len().max(1));
    let chunk = grid.len().div_ceil(workers).max(1);
    let mut points: Vec<ScanPoint> = std::thread::scope(|s| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                let split = &split;
                let lc = &lc;
                s.spawn(move || {
                    part.iter()
                        .enumerate()
                        .map(|(k, &(r, q))| {
                            let d = crate::connection_families::skew_difference(class, r, q, split).expect("validated");
                            let rep = curvature_invariants(split, &(lc + &d));
                            let q = q.unwrap_or_default();
                            ScanPoint {
                                index: c * chunk + k,
                                r,
                                q,
                                einstein: einstein_check(&rep, rep.dim, tol),
                                einstein_residual: rep.einstein_residual,
                                scalar: rep.scalar,
                                route_gap: rep.route_gap,
                                predicted_einstein: predicted_einstein(class, r, q, tol),
                            }
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("scan worker")).collect()
    });
    points.sort_by_key(|p| p.index);
    Ok(ScanOutcome { class, n, points })
}

pub fn cmd_verify(opts: SuiteOptions) -> Result<SuiteSummary> {
    run_suite(opts)
}

fn dims_report(rows: &[DimensionRow], config: RunConfig) -> Report {
    let results: Vec<Value> = rows
        .iter()
        .map(|r| json!({"sphere": sphere_name(r.n), "n": r.n, "invariant": r.invariant, "metric": r.metric, "skew": r.skew}))
        .collect();
    Report {
        command: "dims".into(),
        config,
        results: Value::Array(results),
        residuals: json!({}),
        verdicts: json!({}),
    }
}

pub fn connection_report(o: &ConnectionOutcome, config: RunConfig) -> Report {
    let r = &o.report;
    let mut verdicts = json!({
        "is_metric": r.is_metric,
        "is_skew_torsion": r.is_skew_torsion,
        "torsion_form_totally_skew": r.skew_residual < 1e-9,
        "einstein": o.einstein,
        "is_einstein": o.einstein == EinsteinVerdict::Einstein,
    });
    if let Some(f) = &o.flatness {
        verdicts["s7_flatness"] = serde_json::to_value(f).expect("serializable");
    }
    Report {
        command: "connection".into(),
        config,
        results: json!({"connection": o.spec.describe(), "report": report_json(r)}),
        residuals: json!({
            "route_gap": r.route_gap,
            "scalar_route_gap": (r.scalar - r.scalar_via_torsion).abs(),
            "metric_residual": r.metric_residual,
            "torsion_skew_residual": r.skew_residual,
            "einstein_residual": r.einstein_residual,
            "ricci_asymmetry": r.ricci_asymmetry,
        }),
        verdicts,
    }
}

fn scan_report(s: &ScanOutcome, config: RunConfig) -> Report {
    let max_residual_off = s
        .points
        .iter()
        .filter(|p| p.einstein == EinsteinVerdict::Einstein)
        .map(|p| p.einstein_residual)
        .fold(0.0, f64::max);
    let max_gap = s.points.iter().map(|p| p.route_gap).fold(0.0, f64::max);
    Report {
        command: "scan".into(),
        config,
        results: json!({
            "sphere_class": s.class,
            "n": s.n,
            "points": s.points,
            "locus": s.locus().iter().map(|p| json!({"r": p.r, "q": cx(p.q)})).collect::<Vec<_>>(),
        }),
        residuals: json!({"max_einstein_residual_on_locus": max_residual_off, "max_route_gap": max_gap}),
        verdicts: json!({"locus_matches_prediction": s.matches_prediction(), "einstein_points": s.locus().len(), "total_points": s.points.len()}),
    }
}

fn verify_report(s: &SuiteSummary, config: RunConfig) -> Report {
    let residuals: serde_json::Map<String, Value> = s.batteries.iter().map(|b| (b.name.clone(), json!(b.max_residual))).collect();
    let mut verdicts: serde_json::Map<String, Value> = s.batteries.iter().map(|b| (b.name.clone(), json!(b.passed))).collect();
    verdicts.insert("all_passed".into(), json!(s.all_passed));
    Report {
        command: "verify".into(),
        config,
        results: json!({"batteries": s.batteries}),
        residuals: Value::Object(residuals),
        verdicts: Value::Object(verdicts),
    }
}

fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.abs() >= 1e-3 && x.abs() < 1e6 {
        let s = format!("{x:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.3e}")
    }
}

fn fmt_cx(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_num(z.re)
    } else {
        format!("{}{}{}i", fmt_num(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt_num(z.im.abs()))
    }
}

pub fn render_markdown(report: &Report) -> String {
    let mut out = String::new();
    match report.command.as_str() {
        "dims" => {
            out.push_str("| Sphere | n | Invariant | Metric | Skew-Torsion |\n|---|---|---|---|---|\n");
            for row in report.results.as_array().into_iter().flatten() {
                let _ = writeln!(out, "| {} | {} | {} | {} | {} |", row["sphere"].as_str().unwrap_or(""), row["n"], row["invariant"], row["metric"], row["skew"]);
            }
        }
        "scan" => {
            let _ = writeln!(out, "Einstein scan ({}, n = {})\n", report.results["sphere_class"].as_str().unwrap_or(""), report.results["n"]);
            out.push_str("| r | q | verdict | residual | predicted |\n|---|---|---|---|---|\n");
            let points: Vec<ScanPoint> = serde_json::from_value(report.results["points"].clone()).unwrap_or_default();
            for p in points {
                let verdict = serde_json::to_value(p.einstein).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                let _ = writeln!(out, "| {} | {} | {} | {} | {} |", fmt_num(p.r), fmt_cx(p.q), verdict, fmt_num(p.einstein_residual), p.predicted_einstein);
            }
            let _ = writeln!(out, "\nlocus matches prediction: {}", report.verdicts["locus_matches_prediction"]);
        }
        "verify" => {
            out.push_str("| Battery | Trials | Max residual | Tolerance | Result |\n|---|---|---|---|---|\n");
            for b in report.results["batteries"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    b["name"].as_str().unwrap_or(""),
                    b["trials"],
                    fmt_num(b["max_residual"].as_f64().unwrap_or(f64::NAN)),
                    fmt_num(b["tolerance"].as_f64().unwrap_or(f64::NAN)),
                    if b["passed"].as_bool() == Some(true) { "pass" } else { "FAIL" }
                );
            }
        }
        _ => {
            let rep = &report.results["report"];
            let _ = writeln!(out, "Connection: `{}`\n", report.results["connection"]);
            out.push_str("| Quantity | Value |\n|---|---|\n");
            for key in ["scalar", "scalar_via_torsion", "torsion_norm_sq", "curvature_max", "torsion_max"] {
                let _ = writeln!(out, "| {key} | {} |", fmt_num(rep[key].as_f64().unwrap_or(f64::NAN)));
            }
            if let Some(obj) = report.residuals.as_object() {
                for (k, v) in obj {
                    let _ = writeln!(out, "| {k} | {} |", fmt_num(v.as_f64().unwrap_or(f64::NAN)));
                }
            }
            if let Some(obj) = report.verdicts.as_object() {
                for (k, v) in obj {
                    let _ = writeln!(out, "| {k} | {} |", v);
                }
            }
            out.push_str("\nSym(Ric):\n\n");
            for row in rep["sym_ricci"].as_array().into_iter().flatten() {
                let cells: Vec<String> = row.as_array().into_iter().flatten().map(|v| fmt_num(v.as_f64().unwrap_or(f64::NAN))).collect();
                let _ = writeln!(out, "    {}", cells.join("  "));
            }
        }
    }
    out
}

fn parse_params(raw: &str) -> Result<FamilyParams> {
    serde_json::from_str(raw).map_err(|e| Error::InvalidInput(format!("malformed --params ({e}); expected JSON like\n{PARAMS_SHAPE}")))
}

fn q_points(q_grid: Option<&str>, q_im_grid: Option<&str>) -> Result<Vec<Complex64>> {
    match (q_grid, q_im_grid) {
        (None, None) => Ok(Vec::new()),
        (re, Some(im)) => {
            let res = match re {
                Some(r) => parse_grid(r)?,
                None => vec![0.0],
            };
            let ims = parse_grid(im)?;
            Ok(res.iter().flat_map(|&a| ims.iter().map(move |&b| Complex64::new(a, b))).collect())
        }
        (Some(q), None) if q.contains(':') => Ok(parse_grid(q)?.into_iter().map(|a| Complex64::new(a, 0.0)).collect()),
        (Some(q), None) => q.split(',').map(parse_complex).collect(),
    }
}

/// Builds the report for one parsed command; the boolean is false when a
/// verification battery failed.
pub fn execute(command: &Command) -> Result<(Report, OutputArgs, bool)> {
    match command {
        Command::Dims(a) => {
            let rows = cmd_dims(&a.n)?;
            let cfg = RunConfig::new("dims", None, json!({"n": a.n}), DEFAULT_TOLERANCE, DEFAULT_SEED, DEFAULT_TRIALS, a.output.format)?;
            Ok((dims_report(&rows, cfg), a.output.clone(), true))
        }
        Command::Connection(a) => {
            let (class, n) = resolve_sphere(&a.sphere.sphere, a.sphere.n)?;
            let spec = if let Some(raw) = &a.params {
                ConnectionSpec::Family { n, params: parse_params(raw)? }
            } else if let Some(name) = &a.named {
                ConnectionSpec::Named { n, name: name.parse()? }
            } else {
                let q = a.q.as_deref().map(parse_complex).transpose()?;
                ConnectionSpec::Skew { class, n, r: a.r, q }
            };
            let cfg = RunConfig::new("connection", Some(n), spec.describe(), a.tolerance, DEFAULT_SEED, DEFAULT_TRIALS, a.output.format)?;
            let outcome = cmd_connection(&spec, a.tolerance)?;
            Ok((connection_report(&outcome, cfg), a.output.clone(), true))
        }
        Command::Scan(a) => {
            let (class, n) = resolve_sphere(&a.sphere.sphere, a.sphere.n)?;
            let rs = parse_grid(&a.r_grid)?;
            let qs = q_points(a.q_grid.as_deref(), a.q_im_grid.as_deref())?;
            let workers = a.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
            let params = json!({"sphere_class": class, "r_grid": rs, "q_grid": qs.iter().map(|&q| cx(q)).collect::<Vec<_>>()});
            let cfg = RunConfig::new("scan", Some(n), params, a.tolerance, DEFAULT_SEED, DEFAULT_TRIALS, a.output.format)?;
            let outcome = cmd_scan(class, n, &rs, &qs, a.tolerance, workers)?;
            Ok((scan_report(&outcome, cfg), a.output.clone(), true))
        }
        Command::Verify(a) => {
            let cfg = RunConfig::new(
                "verify",
                None,
                json!({"perturb_structure_constants": a.perturb_structure_constants}),
                DEFAULT_TOLERANCE,
                a.seed,
                a.trials,
                a.output.format,
            )?;
            let summary = cmd_verify(SuiteOptions { seed: a.seed, trials: a.trials, perturb_structure_constants: a.perturb_structure_constants })?;
            let ok = summary.all_passed;
            Ok((verify_report(&summary, cfg), a.output.clone(), ok))
        }
    }
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        OutputFormat::Markdown => render_markdown(report),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (report, output, ok) = match execute(&cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = render(&report, output.format);
    match &output.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{text}"),
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1+0i").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.3").unwrap(), Complex64::new(0.3, 0.0));
        assert_eq!(parse_complex("-0.5-2i").unwrap(), Complex64::new(-0.5, -2.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(parse_complex("1+x").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-1:1:0.5").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0,0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-1:1:0.25").unwrap().len(), 9);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn sphere_resolution() {
        assert_eq!(resolve_sphere("s7", None).unwrap(), (SphereClass::S7, 3));
        assert_eq!(resolve_sphere("S9", None).unwrap(), (SphereClass::GeneralN, 4));
        assert_eq!(resolve_sphere("general", Some(3)).unwrap(), (SphereClass::GeneralN, 3));
        assert!(resolve_sphere("s8", None).is_err());
        assert!(resolve_sphere("s7", Some(4)).is_err());
        assert!(resolve_sphere("general", None).is_err());
    }

    #[test]
    fn flatness_prediction_rows() {
        assert_eq!(predicted_flatness(1.0, 1e-8), ("zero", "flat"));
        assert_eq!(predicted_flatness(-1.0, 1e-8), ("zero", "totally_skew"));
        assert_eq!(predicted_flatness(0.0, 1e-8), ("positive", "levi_civita"));
        assert_eq!(predicted_flatness(0.5, 1e-8), ("positive", "nonzero"));
        assert_eq!(predicted_flatness(-2.0, 1e-8), ("negative", "nonzero"));
    }
}
