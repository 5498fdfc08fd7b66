//! Command-line front end: `transform`, `invert`, `verify` and `poly`.
//!
//! [`run`] parses arguments, writes results to the given sinks and returns the
//! process exit code (0 success, 1 verification failure, 2 usage or
//! validation error, 3 numerical non-convergence).

use crate::error::{Error, Result};
use crate::funlang;
use crate::poly::{jacobi_norm_sq, jacobi_poly, romanovski_poly, wilson_poly};
use crate::quad::{Decay, QuadratureConfig};
use crate::registry::{suite_ids, Calibration, CheckReport, Registry};
use crate::xform::{discrete_coefficients, discrete_spectrum, forward_real_result, inverse, preset_hyperbolic, Regime, SpectralData, TransformParams, WeightedFunction};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "index-transform", version, about = "Index hypergeometric (Jacobi) transform toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward transform of an expression or a sampled x-grid on an s-grid.
    Transform(TransformArgs),
    /// Inverse transform of tabulated spectral data on an x-grid.
    Invert(InvertArgs),
    /// Run identity verification suites from the registry.
    Verify(VerifyArgs),
    /// Tabulate Jacobi, Wilson or Romanovski polynomials.
    Poly(PolyArgs),
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Transform parameter b.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Transform parameter c.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Hyperbolic-space preset "r,n" with r ∈ {1, 2, 4}, n ≥ 1.
    #[arg(long, conflicts_with_all = ["b", "c"])]
    preset: Option<String>,
}

#[derive(Debug, Args, Default)]
struct QuadArgs {
    /// key=value file with tol_rel, tol_abs, x_max, s_max, series_switch, contour_shift.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    series_switch: Option<f64>,
    #[arg(long)]
    contour_shift: Option<f64>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Expression in x, a file containing one, or a CSV file with columns x,f.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Spectral grid lo:hi:n.
    #[arg(long, default_value = "0:10:101")]
    s_grid: String,
    /// Override the inferred exponent e of f(x) ~ x^e at 0.
    #[arg(long, allow_hyphen_values = true)]
    zero_exponent: Option<f64>,
    /// Override the inferred decay rate d of f(x) = O(x^{−d}) at infinity.
    #[arg(long)]
    decay: Option<f64>,
    /// Output CSV (stdout when absent).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// JSON sidecar for the discrete coefficients (default: <output>.discrete.json).
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct InvertArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// CSV with columns s,ghat on an increasing grid.
    #[arg(long)]
    input: PathBuf,
    /// JSON sidecar with the discrete coefficients (required in the mixed regime).
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Output grid lo:hi:n.
    #[arg(long, default_value = "0:5:51")]
    x_grid: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// all, none, dbw, nr, table, wilson, whipple, resolvent, operators or barnes.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// Print the reports as JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Registry file to load instead of the built-in one.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Rewrite the registry file with adjudicated statuses and calibration constants.
    #[arg(long)]
    update_registry: bool,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Jacobi,
    Wilson,
    Romanovski,
}

#[derive(Debug, Args)]
struct PolyArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Highest degree n; columns P_0 … P_n.
    #[arg(long)]
    degree: usize,
    /// Grid lo:hi:n (x for Jacobi and Romanovski, s for Wilson).
    #[arg(long, default_value = "0:1:11")]
    grid: String,
    /// Jacobi α.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Jacobi β.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Wilson a.
    #[arg(long)]
    a: Option<f64>,
    /// Wilson b, or Romanovski b.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Wilson c, or Romanovski c.
    #[arg(long)]
    c: Option<f64>,
    /// Wilson d.
    #[arg(long)]
    d: Option<f64>,
    /// JSON file receiving the squared norms [{"n", "norm_sq"}].
    #[arg(long)]
    norms: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    quad: QuadArgs,
}

/// One discrete-spectrum record of the JSON sidecar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteRecord {
    pub m: usize,
    pub coeff: f64,
    pub norm_sq: f64,
}

/// Machine-readable output of `verify --json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub reports: Vec<CheckReport>,
}

/// Rectangular table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl GridTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    /// CSV text with every value rendered with 17 significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            if row.len() != self.columns.len() {
                return Err(Error::Domain("ragged table row".into()));
            }
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(io_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers().map_err(io_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(io_err)?;
            let row = rec
                .iter()
                .map(|v| v.parse::<f64>().map_err(|_| Error::Domain(format!("row {}: '{v}' is not a number", line + 1))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Domain(format!("row {} has {} fields, expected {}", line + 1, row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

/// Parses `lo:hi:n` into n equispaced points (n = 1 gives lo).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Domain(format!("grid '{spec}' is not of the form lo:hi:n"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || (n > 1 && !(hi > lo)) {
        return Err(Error::Domain(format!("grid '{spec}' needs n ≥ 1 and lo < hi")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect())
}

/// Reads a key=value configuration file over `base`.
pub fn load_config(text: &str, base: &QuadratureConfig) -> Result<QuadratureConfig> {
    let mut cfg = base.clone();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("config line {}: expected key=value", k + 1)))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("config line {}: '{}' is not a number", k + 1, value.trim())))?;
        match key.trim() {
            "tol_rel" => cfg.tol_rel = v,
            "tol_abs" => cfg.tol_abs = v,
            "x_max" => cfg.x_max = v,
            "s_max" => cfg.s_max = v,
            "series_switch" => cfg.series_switch = v,
            "contour_shift" => cfg.contour_shift = v,
            other => return Err(Error::Domain(format!("config line {}: unknown key '{other}'", k + 1))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

impl QuadArgs {
    fn resolve(&self) -> Result<QuadratureConfig> {
        let mut cfg = QuadratureConfig::default();
        if let Some(path) = &self.config {
            cfg = load_config(&read(path)?, &cfg)?;
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.tol_rel, self.tol_rel);
        set(&mut cfg.tol_abs, self.tol_abs);
        set(&mut cfg.x_max, self.x_max);
        set(&mut cfg.s_max, self.s_max);
        set(&mut cfg.series_switch, self.series_switch);
        set(&mut cfg.contour_shift, self.contour_shift);
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ParamArgs {
    fn resolve(&self) -> Result<TransformParams> {
        if let Some(p) = &self.preset {
            let bad = || Error::Domain(format!("preset '{p}' is not of the form r,n"));
            let (r, n) = p.split_once(',').ok_or_else(bad)?;
            return preset_hyperbolic(r.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?);
        }
        match (self.b, self.c) {
            (Some(b), Some(c)) => TransformParams::new(b, c),
            _ => Err(Error::Domain("give --b and --c, or --preset r,n".into())),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn default_sidecar(output: Option<&Path>) -> Option<PathBuf> {
    output.map(|p| {
        let mut s = p.as_os_str().to_os_string();
        s.push(".discrete.json");
        PathBuf::from(s)
    })
}

/// Natural cubic spline through increasing abscissae; zero outside the data range.
#[derive(Debug, Clone)]
pub struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Domain("a sampled function needs at least two points".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("the sample grid must be strictly increasing".into()));
        }
        // Second derivatives from the tridiagonal system of the natural spline.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self { x, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if !(t >= self.x[0] && t <= self.x[n - 1]) {
            return 0.0;
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k => (k - 1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// Interpolation nodes in increasing order.
    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn start(&self) -> f64 {
        self.x[0]
    }

    pub fn end(&self) -> f64 {
        self.x[self.x.len() - 1]
    }
}

/// Builds the x-side function from an expression, an expression file or a CSV grid.
fn input_function(args: &TransformArgs) -> Result<WeightedFunction<'static>> {
    let path = Path::new(&args.f);
    let source = if path.is_file() { Some(read(path)?) } else { None };
    if let Some(text) = &source {
        if let Ok(table) = GridTable::from_csv(text) {
            if table.columns.len() == 2 && !table.rows.is_empty() {
                let spline = Spline::new(table.column(0), table.column(1))?;
                if spline.start() != 0.0 {
                    return Err(Error::Domain("a sampled function must start at x = 0".into()));
                }
                let end = spline.end();
                let zero = args.zero_exponent.unwrap_or(0.0);
                return Ok(WeightedFunction::new(move |x| spline.eval(x), zero, Decay::Compact(end)));
            }
        }
    }
    let expr = funlang::parse(source.as_deref().map(str::trim).unwrap_or(&args.f))?;
    funlang::weighted_function(expr, args.zero_exponent, args.decay)
}

fn cmd_transform(args: &TransformArgs, out: &mut dyn Write) -> Result<()> {
    let p = args.params.resolve()?;
    let cfg = args.quad.resolve()?;
    let grid = parse_grid(&args.s_grid)?;
    if grid.iter().any(|s| *s < 0.0) {
        return Err(Error::Domain("the spectral grid must be non-negative".into()));
    }
    let f = input_function(args)?;
    let sidecar = match p.regime {
        Regime::Mixed => Some(
            args.sidecar
                .clone()
                .or_else(|| default_sidecar(args.output.as_deref()))
                .ok_or_else(|| Error::Domain("mixed regime: pass --sidecar (or --output) for the discrete coefficients".into()))?,
        ),
        Regime::Continuous => None,
    };
    let mut table = GridTable::new(vec!["s".into(), "ghat".into()]);
    for &s in &grid {
        let r = forward_real_result(&p, &f, s, &cfg)?;
        if !r.converged {
            return Err(Error::NonConvergence {
                context: "forward transform".into(),
                detail: format!("error estimate {:.3e} at s = {s}", r.error_estimate),
            });
        }
        table.rows.push(vec![s, r.value]);
    }
    if let Some(path) = sidecar {
        let modes = discrete_spectrum(&p, &cfg)?;
        let coeffs = discrete_coefficients(&p, &f, &cfg)?;
        let records: Vec<DiscreteRecord> =
            modes.iter().zip(&coeffs).map(|(m, c)| DiscreteRecord { m: m.m, coeff: c.1, norm_sq: m.norm_sq }).collect();
        write_file(&path, &(serde_json::to_string_pretty(&records).map_err(io_err)? + "\n"))?;
    }
    emit(out, args.output.as_deref(), &table.to_csv()?)
}

fn cmd_invert(args: &InvertArgs, out: &mut dyn Write) -> Result<()> {
    let p = args.params.resolve()?;
    let mut cfg = args.quad.resolve()?;
    let grid = parse_grid(&args.x_grid)?;
    let table = GridTable::from_csv(&read(&args.input)?)?;
    if table.columns.len() != 2 {
        return Err(Error::Domain("spectral input needs exactly two columns s,ghat".into()));
    }
    let discrete = match (p.regime, &args.sidecar) {
        (Regime::Mixed, None) => {
            return Err(Error::Domain(format!(
                "b = {} lies in the mixed regime: the discrete coefficients are required, pass --sidecar <json>",
                p.b
            )))
        }
        (_, Some(path)) => {
            let recs: Vec<DiscreteRecord> =
                serde_json::from_str(&read(path)?).map_err(|e| Error::Domain(format!("sidecar {}: {e}", path.display())))?;
            recs.iter().map(|r| (r.m, r.coeff)).collect()
        }
        (Regime::Continuous, None) => Vec::new(),
    };
    let (s, g) = (table.column(0), table.column(1));
    let spline = Spline::new(s, g)?;
    if spline.start() > 0.0 {
        return Err(Error::Domain("spectral input must start at s = 0".into()));
    }
    cfg.s_max = spline.end();
    let knots = spline.knots().to_vec();
    let data = SpectralData::new(move |s| spline.eval(s), discrete).with_breakpoints(knots);
    let mut result = GridTable::new(vec!["x".into(), "f".into()]);
    for &x in &grid {
        result.rows.push(vec![x, inverse(&p, &data, x, &cfg)?]);
    }
    emit(out, args.output.as_deref(), &result.to_csv()?)
}

fn render_table(reports: &[CheckReport]) -> String {
    let mut s = format!("{:<20} {:>5} {:>12} {:>10}  {}\n", "id", "trial", "rel_gap", "tolerance", "result");
    for r in reports {
        let verdict = if r.passed { "pass".to_string() } else { format!("FAIL {}", r.detail.clone().unwrap_or_default()) };
        s.push_str(&format!("{:<20} {:>5} {:>12.3e} {:>10.1e}  {}\n", r.id, r.trial, r.rel_gap, r.tolerance, verdict));
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    s.push_str(&format!("{} checks, {} failed\n", reports.len(), failed));
    s
}

fn registry_path(args: &VerifyArgs) -> PathBuf {
    args.registry.clone().unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("registry.toml"))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = args.quad.resolve()?;
    let registry = match &args.registry {
        Some(p) if p.is_file() => Registry::parse(&read(p)?)?,
        _ => Registry::builtin(),
    };
    let ids = suite_ids(&registry, &args.suite).ok_or_else(|| Error::Domain(format!("unknown suite '{}'", args.suite)))?;
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let reports = registry.run_suite(&refs, args.seed, args.trials, &cfg)?;
    let passed = reports.iter().all(|r| r.passed);
    if args.json {
        let o = VerifyOutput { suite: args.suite.clone(), seed: args.seed, trials: args.trials, passed, reports: reports.clone() };
        writeln!(out, "{}", serde_json::to_string_pretty(&o).map_err(io_err)?).map_err(io_err)?;
    } else {
        out.write_all(render_table(&reports).as_bytes()).map_err(io_err)?;
    }
    if args.update_registry {
        let mut cals: Vec<Calibration> = Vec::new();
        for id in &refs {
            if let Some(c) = registry.calibrate(id, args.seed, &cfg)? {
                if !c.is_constant() {
                    writeln!(err, "{id}: ratio lhs/rhs is not constant (relative variance {:.3e})", c.rel_variance).map_err(io_err)?;
                }
                cals.push(c);
            }
        }
        let updated = registry.adjudicate(&reports, &cals);
        let path = registry_path(args);
        write_file(&path, &updated.to_toml_string())?;
        writeln!(err, "registry written to {}", path.display()).map_err(io_err)?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Squared Wilson norm for the weight (1/π)|Γ(a+is)Γ(b+is)Γ(c+is)Γ(d+is)/Γ(2is)|² on [0, ∞).
pub fn wilson_norm_sq(a: f64, b: f64, c: f64, d: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let sum = a + b + c + d;
    let g = crate::gamma::gamma_ratio_real(
        &[nf + a + b, nf + a + c, nf + a + d, nf + b + c, nf + b + d, nf + c + d, nf + 1.0],
        &[2.0 * nf + sum],
    )?;
    Ok(2.0 * crate::gamma::pochhammer_real(nf + sum - 1.0, n) * g)
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Domain(format!("--{name} is required for this family")))
}

fn cmd_poly(args: &PolyArgs, out: &mut dyn Write) -> Result<()> {
    let grid = parse_grid(&args.grid)?;
    let n = args.degree;
    let axis = if args.family == Family::Wilson { "s" } else { "x" };
    let mut columns = vec![axis.to_string()];
    columns.extend((0..=n).map(|k| format!("P_{k}")));
    let mut table = GridTable::new(columns);
    let mut norms: Vec<Option<f64>> = Vec::new();
    match args.family {
        Family::Jacobi => {
            let (al, be) = (need(args.alpha, "alpha")?, need(args.beta, "beta")?);
            let polys = (0..=n).map(|k| jacobi_poly(al, be, k)).collect::<Result<Vec<_>>>()?;
            for k in 0..=n {
                norms.push(Some(jacobi_norm_sq(al, be, k)?));
            }
            for &x in &grid {
                let mut row = vec![x];
                row.extend(polys.iter().map(|q| q.eval(x)));
                table.rows.push(row);
            }
        }
        Family::Wilson => {
            let v = [need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?, need(args.d, "d")?];
            for k in 0..=n {
                norms.push(Some(wilson_norm_sq(v[0], v[1], v[2], v[3], k)?));
            }
            for &s in &grid {
                let mut row = vec![s];
                for k in 0..=n {
                    row.push(wilson_poly(v[0], v[1], v[2], v[3], k, s)?);
                }
                table.rows.push(row);
            }
        }
        Family::Romanovski => {
            let p = TransformParams::new(need(args.b, "b")?, need(args.c, "c")?)?;
            let polys = (0..=n).map(|k| romanovski_poly(&p, k)).collect::<Result<Vec<_>>>()?;
            if args.norms.is_some() {
                let cfg = args.quad.resolve()?;
                norms.extend(discrete_spectrum(&p, &cfg)?.iter().take(n + 1).map(|m| Some(m.norm_sq)));
            }
            for &x in &grid {
                let mut row = vec![x];
                row.extend(polys.iter().map(|q| q.eval(x)));
                table.rows.push(row);
            }
        }
    }
    if let Some(path) = &args.norms {
        #[derive(Serialize)]
        struct NormRecord {
            n: usize,
            norm_sq: Option<f64>,
        }
        let recs: Vec<NormRecord> = norms.iter().enumerate().map(|(k, v)| NormRecord { n: k, norm_sq: *v }).collect();
        write_file(path, &(serde_json::to_string_pretty(&recs).map_err(io_err)? + "\n"))?;
    }
    emit(out, args.output.as_deref(), &table.to_csv()?)
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Transform(a) => cmd_transform(a, out).map(|_| EXIT_OK),
        Command::Invert(a) => cmd_invert(a, out).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Poly(a) => cmd_poly(a, out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn config_file_keys() {
        let cfg = load_config("# comment\ntol_rel = 1e-9\ns_max=120 # trailing\n", &QuadratureConfig::default()).unwrap();
        assert_eq!(cfg.tol_rel, 1e-9);
        assert_eq!(cfg.s_max, 120.0);
        assert!(load_config("bogus = 1", &QuadratureConfig::default()).is_err());
        assert!(load_config("tol_rel", &QuadratureConfig::default()).is_err());
        assert!(load_config("contour_shift = 2", &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn spline_interpolates_and_vanishes_outside() {
        let x: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|t| (3.0 * t).sin()).collect();
        let s = Spline::new(x, y).unwrap();
        assert!((s.eval(0.73) - (2.19f64).sin()).abs() < 1e-4);
        assert_eq!(s.eval(2.5), 0.0);
        assert_eq!(s.eval(0.05), (3.0f64 * 0.05).sin());
        assert!(Spline::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let mut t = GridTable::new(vec!["s".into(), "ghat".into()]);
        t.rows.push(vec![0.1, 1.0 / 3.0]);
        t.rows.push(vec![0.25, -2.5e-300]);
        let a = t.to_csv().unwrap();
        let b = GridTable::from_csv(&a).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
        assert_eq!(GridTable::from_csv(&a).unwrap(), t);
    }

    #[test]
    fn wilson_norm_matches_quadrature() {
        let (a, b, c, d) = (0.4, 0.7, 0.9, 0.55);
        let cfg = QuadratureConfig::default();
        for n in 0..3 {
            let h = |s: f64| crate::poly::wilson_weight(a, b, c, d, s).unwrap() * wilson_poly(a, b, c, d, n, s).unwrap().powi(2);
            let q = crate::quad::integrate_spectral_range(&h, 0.0, 60.0, 0.0, &cfg).value;
            let w = wilson_norm_sq(a, b, c, d, n).unwrap();
            assert!((q - w).abs() < 1e-9 * w, "n={n}: {q} vs {w}");
        }
    }
}
