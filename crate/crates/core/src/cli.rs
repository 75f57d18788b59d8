//! `qknot` command-line front end. Every command renders into a byte buffer
//! first, so output is identical for identical flags and can be compared
//! in-process by `verify`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance::{self, CriterionReport};
use crate::contour::{self, build_contour, ContourSpec};
use crate::error::Error;
use crate::hankel::{self, HankelKind, Order};
use crate::ode::Numerics;
use crate::riemann::SurfacePoint;
use crate::spectral::{self, PhysicalChannel};
use crate::unroll;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Agreement threshold between shooting and the closed form.
const AGREE_TOL: f64 = 1e-6;
/// θ spacing of the strip-equation check along the loop; the residual uses
/// finite differences, so it needs a finer grid than the exported samples.
const STRIP_CHECK_STEP: f64 = 0.01;
/// Agreement threshold between circuit formula and continuation oracle.
const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "qknot",
    version,
    about = "Quantum-knot bound states on spiral complex contours",
    args_override_self = true
)]
pub struct Cli {
    /// Output format (json, or csv for contour and scan)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// TOML file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    #[serde(skip)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Allowed (N, M) table, optionally with the knot-supporting coupling
    Table(TableArgs),
    /// Shoot over C^(N) and compare with the closed form
    Shoot(ShootArgs),
    /// Sturmian scan of the shooting residual over ν
    Scan(ScanArgs),
    /// Circuit coefficients (a, b) with a numerical continuation check
    Monodromy(MonodromyArgs),
    /// Export the sampled contour C^(N)
    Contour(ContourArgs),
    /// Contour samples in strip coordinates and a strip-equation check
    Unroll(UnrollArgs),
    /// Run the built-in acceptance suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = contour::DEFAULT_RHO0)]
    pub rho0: f64,
    #[arg(long, default_value_t = contour::DEFAULT_EPS)]
    pub eps: f64,
    /// Default 30/κ
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = contour::DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NumericsArgs {
    #[arg(long, default_value_t = Numerics::default().rel_tol)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = Numerics::default().abs_tol)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = Numerics::default().max_steps)]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TableArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u32,
    #[arg(long)]
    pub m_max: u32,
    #[arg(long)]
    pub dim: Option<u32>,
    #[arg(long)]
    pub partial: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShootArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u32,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub dim: Option<u32>,
    #[arg(long)]
    pub partial: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub numerics: NumericsArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

fn parse_range(s: &str) -> std::result::Result<NuRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:n, got {s:?}"));
    }
    let min = parts[0]
        .parse::<f64>()
        .map_err(|e| format!("bad start {:?}: {e}", parts[0]))?;
    let max = parts[1].parse::<f64>().map_err(|e| format!("bad end {:?}: {e}", parts[1]))?;
    let points = parts[2]
        .parse::<usize>()
        .map_err(|e| format!("bad count {:?}: {e}", parts[2]))?;
    Ok(NuRange { min, max, points })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    /// ν grid as start:end:points (inclusive)
    #[arg(long, value_parser = parse_range)]
    pub nu: NuRange,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub numerics: NumericsArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MonodromyArgs {
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value_t = 3.0)]
    pub z_abs: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z_arg: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ContourArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u32,
    /// Sets the default R_max = 30/√E
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UnrollArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u32,
    #[arg(long, default_value_t = 0.5)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub numerics: NumericsArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Run only this criterion (1 to 9)
    #[arg(long)]
    pub criterion: Option<u32>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Verify(Vec<u8>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::SectorBoundary { .. } | Error::BranchPoint => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// JSON form of a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

fn kappa_of(energy: f64) -> CliResult<f64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(CliError::Usage(format!("--energy must be positive, got {energy}")));
    }
    Ok(energy.sqrt())
}

fn contour_spec(n: u32, kappa: f64, g: &GeometryArgs) -> CliResult<ContourSpec> {
    let r_max = g.r_max.unwrap_or(contour::DEFAULT_KAPPA_R_MAX / kappa);
    Ok(ContourSpec::new(n, g.rho0, g.eps, r_max, g.samples)?)
}

fn numerics(a: &NumericsArgs) -> CliResult<Numerics> {
    let num = Numerics {
        rel_tol: a.rel_tol,
        abs_tol: a.abs_tol,
        max_steps: a.max_steps,
        ..Numerics::default()
    };
    num.validate()?;
    Ok(num)
}

fn envelope(command: &str, params: Value, results: Value, diagnostics: Value) -> CliResult<Vec<u8>> {
    let doc = json!({ "command": command, "params": params, "results": results, "diagnostics": diagnostics });
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Numerical(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn params<T: Serialize>(format: Format, args: &T) -> Value {
    let mut v = serde_json::to_value(args).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut v {
        map.insert("format".into(), serde_json::to_value(format).unwrap_or(Value::Null));
    }
    v
}

fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Numerical(e.to_string()))
}

fn json_only(format: Format, command: &str) -> CliResult<()> {
    if format != Format::Json {
        return Err(CliError::Usage(format!("{command} output is JSON only")));
    }
    Ok(())
}

fn cmd_table(a: &TableArgs, format: Format) -> CliResult<Vec<u8>> {
    json_only(format, "table")?;
    if a.partial.is_some() && a.dim.is_none() {
        return Err(CliError::Usage("--partial needs --dim".into()));
    }
    let rows = spectral::allowed_angular_momenta(a.n, a.m_max)?;
    let mut out = Vec::with_capacity(rows.len());
    for q in rows {
        let mut v = to_value(&q)?;
        if let Some(dim) = a.dim {
            let partial = a.partial.unwrap_or(0);
            PhysicalChannel::new(dim, partial, 0.0, 1.0)?;
            let c = spectral::coupling_for_knot(dim, partial, q.n, q.m)?;
            v["gamma"] = json!(c.gamma);
        }
        out.push(v);
    }
    envelope("table", params(format, a), Value::Array(out), json!({}))
}

fn shoot_order(a: &ShootArgs, kappa: f64) -> CliResult<f64> {
    match (a.nu, a.dim, a.gamma) {
        (Some(nu), None, None) if a.partial.is_none() => Ok(nu),
        (None, Some(dim), Some(gamma)) => {
            let ch = PhysicalChannel::new(dim, a.partial.unwrap_or(0), gamma, kappa)?;
            Ok(spectral::effective_order(&ch)?)
        }
        _ => Err(CliError::Usage("give either --nu or --dim/--partial/--gamma".into())),
    }
}

fn cmd_shoot(a: &ShootArgs, format: Format) -> CliResult<Vec<u8>> {
    json_only(format, "shoot")?;
    let kappa = kappa_of(a.energy)?;
    let nu = shoot_order(a, kappa)?;
    let cspec = contour_spec(a.n, kappa, &a.geometry)?;
    let num = numerics(&a.numerics)?;
    let r = spectral::shoot(nu, a.n, kappa, &cspec, &num)?;
    let (ca, cb) = hankel::monodromy_coeffs(&Order::new(nu)?, 2 * a.n as i64);
    let agreement = if cb.norm() < 1e-12 {
        r.residual <= AGREE_TOL
    } else {
        let ref_ratio = cb / ca;
        (r.ratio() - ref_ratio).norm() <= AGREE_TOL * ref_ratio.norm().max(1.0)
            && (r.residual - r.predicted_residual).abs() <= AGREE_TOL
    };
    let result = json!({
        "nu": nu,
        "c1": Cx::from(r.c1),
        "c2": Cx::from(r.c2),
        "residual": r.residual,
        "predicted_residual": r.predicted_residual,
        "a": Cx::from(ca),
        "b": Cx::from(cb),
        "agreement": agreement,
        "bound_state": spectral::is_bound_state(nu, a.n, spectral::BOUND_STATE_TOL),
    });
    let diag = json!({
        "contour": to_value(&cspec)?,
        "logscale": r.logscale,
        "steps": r.steps,
        "rejected_steps": r.rejected_steps,
    });
    envelope("shoot", params(format, a), json!([result]), diag)
}

fn cmd_scan(a: &ScanArgs, format: Format) -> CliResult<Vec<u8>> {
    let kappa = kappa_of(a.energy)?;
    let cspec = contour_spec(a.n, kappa, &a.geometry)?;
    let num = numerics(&a.numerics)?;
    let minima = spectral::scan_sturmian(a.n, kappa, a.nu.min, a.nu.max, a.nu.points, &cspec, &num)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for m in &minima {
                w.serialize(m).map_err(|e| CliError::Numerical(e.to_string()))?;
            }
            if minima.is_empty() {
                w.write_record(["nu", "residual"])
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))
        }
        Format::Json => {
            let expected = spectral::quantized_orders(a.n, a.nu.min, a.nu.max);
            envelope(
                "scan",
                params(format, a),
                to_value(&minima)?,
                json!({ "expected_nu": expected }),
            )
        }
    }
}

fn cmd_monodromy(a: &MonodromyArgs, format: Format) -> CliResult<Vec<u8>> {
    json_only(format, "monodromy")?;
    let order = Order::new(a.nu)?;
    if !(a.z_abs > 0.0 && a.z_abs.is_finite()) {
        return Err(CliError::Usage(format!("--z-abs must be positive, got {}", a.z_abs)));
    }
    if !(a.z_arg > -std::f64::consts::PI && a.z_arg <= std::f64::consts::PI) {
        return Err(CliError::Usage(format!("--z-arg must lie in (-pi, pi], got {}", a.z_arg)));
    }
    let m = a.m as i64;
    let (ca, cb) = hankel::monodromy_coeffs(&order, m);
    let z0 = Complex64::from_polar(a.z_abs, a.z_arg);
    let dtheta = m as f64 * std::f64::consts::PI;
    let p = SurfacePoint::new(a.z_abs, a.z_arg + dtheta)?;
    let formula = hankel::hankel_on_surface_pair(HankelKind::Two, &order, &p)?;
    let numeric = hankel::continuation_oracle(HankelKind::Two, &order, z0, dtheta)?;
    let gap = |x: Complex64, y: Complex64| (x - y).norm() / x.norm().max(y.norm()).max(f64::MIN_POSITIVE);
    let rel = gap(formula.value, numeric.value).max(gap(formula.deriv, numeric.deriv));
    let result = json!({
        "a": Cx::from(ca),
        "b": Cx::from(cb),
        "formula_value": Cx::from(formula.value),
        "oracle_value": Cx::from(numeric.value),
        "oracle_relative_gap": rel,
        "oracle_agree": rel <= ORACLE_TOL,
    });
    envelope(
        "monodromy",
        params(format, a),
        json!([result]),
        json!({ "effective_nu": order.effective_nu() }),
    )
}

fn cmd_contour(a: &ContourArgs, format: Format) -> CliResult<Vec<u8>> {
    let kappa = kappa_of(a.energy)?;
    let path = build_contour(&contour_spec(a.n, kappa, &a.geometry)?)?;
    let winding = contour::winding_number(&path)?;
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            contour::write_contour_csv(&path, &mut buf)?;
            Ok(buf)
        }
        Format::Json => envelope(
            "contour",
            params(format, a),
            to_value(&contour::export_contour(&path))?,
            json!({ "winding_number": winding, "contour": to_value(&path.spec)? }),
        ),
    }
}

fn cmd_unroll(a: &UnrollArgs, format: Format) -> CliResult<Vec<u8>> {
    json_only(format, "unroll")?;
    let kappa = kappa_of(a.energy)?;
    let spec = contour_spec(a.n, kappa, &a.geometry)?;
    let path = build_contour(&spec)?;
    let num = numerics(&a.numerics)?;
    let rows: Vec<Value> = path
        .points
        .iter()
        .zip(&path.segments)
        .zip(&path.t)
        .map(|((p, s), t)| {
            let q = unroll::map_to_strip(p);
            json!({ "t": t, "u": q.u, "v": q.v, "segment": s.label() })
        })
        .collect();
    let arc = spec.theta_right() - spec.theta_left();
    let check_samples = ((arc / STRIP_CHECK_STEP).ceil() as usize + 1).max(9);
    let check = unroll::strip_oracle(
        a.nu,
        kappa,
        spec.rho0,
        spec.theta_left(),
        spec.theta_right(),
        check_samples,
        &num,
    )?;
    let diag = json!({
        "u_first": rows.first().map(|r| r["u"].clone()),
        "u_last": rows.last().map(|r| r["u"].clone()),
        "strip_eigenvalue": unroll::strip_eigenvalue(a.nu),
        "strip_check": to_value(&check)?,
    });
    envelope("unroll", params(format, a), Value::Array(rows), diag)
}

/// Fixed invocations whose output must be byte-identical across runs.
pub fn determinism_invocations() -> Vec<Vec<&'static str>> {
    vec![
        vec!["qknot", "table", "--N", "2", "--m-max", "9", "--dim", "3", "--partial", "1"],
        vec!["qknot", "shoot", "--N", "1", "--nu", "0.3", "--energy", "1"],
        vec!["qknot", "scan", "--N", "1", "--energy", "1", "--nu", "0.05:1.95:60"],
    ]
}

fn determinism_report() -> CriterionReport {
    let start = std::time::Instant::now();
    let mut mismatches = 0;
    let mut failures = Vec::new();
    for argv in determinism_invocations() {
        let run = || -> CliResult<Vec<u8>> {
            let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
            execute(&cli)
        };
        match (run(), run()) {
            (Ok(a), Ok(b)) => {
                if a != b {
                    mismatches += 1;
                }
            }
            _ => failures.push(argv[1]),
        }
    }
    let passed = mismatches == 0 && failures.is_empty();
    CriterionReport {
        id: 9,
        name: "CLI determinism (in-process)",
        passed,
        metric: (mismatches + failures.len()) as f64,
        threshold: 0.0,
        seconds: start.elapsed().as_secs_f64(),
        detail: format!("{mismatches} differing outputs, failed commands {failures:?}"),
    }
}

fn cmd_verify(a: &VerifyArgs, format: Format) -> CliResult<Vec<u8>> {
    json_only(format, "verify")?;
    let reports = match a.criterion {
        None => {
            let mut r = acceptance::run_library_criteria();
            r.push(determinism_report());
            r
        }
        Some(9) => vec![determinism_report()],
        Some(id) => vec![acceptance::run_criterion(id).ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?],
    };
    for r in &reports {
        eprintln!("{}", r.line());
    }
    let all = reports.iter().all(|r| r.passed);
    let out = envelope("verify", params(format, a), to_value(&reports)?, json!({ "all_passed": all }))?;
    if all {
        Ok(out)
    } else {
        Err(CliError::Verify(out))
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Contour(_) => Format::Csv,
        _ => Format::Json,
    }
}

/// Run a parsed command and return its rendered output.
pub fn execute(cli: &Cli) -> CliResult<Vec<u8>> {
    let format = cli.format.unwrap_or_else(|| default_format(&cli.command));
    match &cli.command {
        Command::Table(a) => cmd_table(a, format),
        Command::Shoot(a) => cmd_shoot(a, format),
        Command::Scan(a) => cmd_scan(a, format),
        Command::Monodromy(a) => cmd_monodromy(a, format),
        Command::Contour(a) => cmd_contour(a, format),
        Command::Unroll(a) => cmd_unroll(a, format),
        Command::Verify(a) => cmd_verify(a, format),
    }
}

const SUBCOMMANDS: [&str; 7] = ["table", "shoot", "scan", "monodromy", "contour", "unroll", "verify"];
const VALUED_GLOBALS: [&str; 3] = ["--format", "--out", "--config"];

fn toml_token(key: &str, v: &toml::Value) -> CliResult<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        _ => return Err(CliError::Usage(format!("config key {key:?} must be a string or number"))),
    })
}

/// Splice the keys of `--config FILE` in as flags right after the
/// subcommand, so that flags given on the command line override them.
pub fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            config = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        }
    }
    let Some(path) = config else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("bad config {path}: {e}")))?;

    let mut idx = None;
    let mut i = 1;
    while i < strs.len() {
        let a = &strs[i];
        if VALUED_GLOBALS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&a.as_str()) {
            idx = Some(i);
            break;
        }
        i += 1;
    }
    let Some(idx) = idx else { return Ok(args) };

    let mut injected = Vec::new();
    for (k, v) in &table {
        if k == "config" {
            continue;
        }
        let flag = if k == "N" { k.clone() } else { k.replace('_', "-") };
        injected.push(OsString::from(format!("--{flag}")));
        injected.push(OsString::from(toml_token(k, v)?));
    }
    let mut out = args[..=idx].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[idx + 1..]);
    Ok(out)
}

fn write_output(cli: &Cli, bytes: &[u8]) -> std::io::Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("qknot: {e:?}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (bytes, code) = match execute(&cli) {
        Ok(b) => (b, EXIT_OK),
        Err(CliError::Verify(b)) => (b, EXIT_VERIFY),
        Err(CliError::Usage(m)) => {
            eprintln!("qknot: usage error: {m}");
            return EXIT_USAGE;
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("qknot: numerical failure: {m}");
            return EXIT_NUMERICAL;
        }
    };
    if let Err(e) = write_output(&cli, &bytes) {
        eprintln!("qknot: cannot write output: {e}");
        return EXIT_USAGE;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(argv: &[&str]) -> CliResult<Value> {
        let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
        let bytes = execute(&cli)?;
        Ok(serde_json::from_slice(&bytes).unwrap())
    }

    #[test]
    fn table_rows_and_gamma() {
        let v = run(&["qknot", "table", "--N", "1", "--m-max", "5", "--dim", "3", "--partial", "0"]).unwrap();
        let rows = v["results"].as_array().unwrap();
        let ms: Vec<u64> = rows.iter().map(|r| r["M"].as_u64().unwrap()).collect();
        let gs: Vec<f64> = rows.iter().map(|r| r["gamma"].as_f64().unwrap()).collect();
        assert_eq!(ms, vec![1, 3, 5]);
        assert_eq!(gs, vec![0.0, 2.0, 6.0]);
        let v = run(&["qknot", "table", "--N", "2", "--m-max", "4"]).unwrap();
        assert!(v["results"].as_array().unwrap().iter().all(|r| r["M"] != 4));
    }

    #[test]
    fn parse_nu_range() {
        assert_eq!(
            parse_range("0.05:1.95:400").unwrap(),
            NuRange {
                min: 0.05,
                max: 1.95,
                points: 400
            }
        );
        assert!(parse_range("1:2").is_err());
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(CliError::from(Error::InvalidArgument("x".into())).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(Error::Overflow(1.0)).exit_code(), EXIT_NUMERICAL);
    }

    #[test]
    fn complex_numbers_are_objects() {
        let v = run(&["qknot", "monodromy", "--nu", "1", "--m", "2"]).unwrap();
        let r = &v["results"][0];
        assert!((r["a"]["re"].as_f64().unwrap() - 3.0).abs() < 1e-14);
        assert!((r["b"]["re"].as_f64().unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(r["oracle_agree"], true);
    }
}
