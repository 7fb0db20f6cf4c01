//! Command-line front end: `bound`, `optimize`, `table --paper`, `verify`.
//!
//! Every command produces a list of flat-ish JSON records which are then
//! rendered as JSON Lines, CSV or an aligned text table. Exit codes: 0 ok,
//! 1 regression (a tolerance or inequality check failed), 2 usage or config
//! error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::constants::{self, BoundReport, CONJECTURED_L11_RATIO};
use crate::functionals::{self, ProblemSpec};
use crate::optimize::{self, OptConfig, TrialParams};
use crate::quad::{integrate, QuadSpec};
use crate::trial::{FFamily, PhiFamily, PhiKind};
use crate::verify::{self, VerifyCase};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REGRESSION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Proven upper bound on `L_{1,d}/L^cl_{1,d}`; a failed check at or above it
/// is a regression.
pub const PROVEN_L_RATIO: f64 = 1.456;

#[derive(Debug, Parser)]
#[command(
    name = "ltbounds",
    version,
    about = "Bounds on Lieb-Thirring constants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    quad_abs_tol: Option<f64>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    quad_rel_tol: Option<f64>,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one bound on K/K^cl and L/L^cl.
    Bound {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_enum)]
        method: BoundMethod,
        /// Upper bound on the low-momentum constant C_{d,sigma}.
        #[arg(long, conflicts_with = "optimize")]
        c_value: Option<f64>,
        /// Obtain C_{d,sigma} by optimizing the trial family first.
        #[arg(long)]
        optimize: bool,
    },
    /// Run the optimization campaign described by a JSON config.
    Optimize { config: PathBuf },
    /// Reproduce the headline constants.
    Table {
        #[arg(long)]
        paper: bool,
    },
    /// Check the 1-D inequality on model potentials (built-in suite if no
    /// config is given).
    Verify { config: Option<PathBuf> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundMethod {
    RuminOriginal,
    MomentumOptimal,
    FractionalFirst,
    FromC,
    BestOf,
}

/// One entry of an `optimize` config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeRun {
    pub d: u32,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub config: OptConfig,
}

/// A `verify` config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "proven_l_ratio")]
    pub l_ratio: f64,
    #[serde(default)]
    pub cases: Vec<VerifyCase>,
}

fn proven_l_ratio() -> f64 {
    PROVEN_L_RATIO
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

struct Outcome {
    records: Vec<Value>,
    code: i32,
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return if err.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let text = render(&outcome.records, cli.format);
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let quad = quad_spec(cli)?;
    match &cli.command {
        Command::Bound {
            d,
            sigma,
            method,
            c_value,
            optimize,
        } => {
            let report = cmd_bound(*d, *sigma, *method, *c_value, *optimize, &quad)?;
            Ok(Outcome {
                records: vec![to_value(&report)],
                code: EXIT_OK,
            })
        }
        Command::Optimize { config } => cmd_optimize(config, &quad),
        Command::Table { paper } => {
            if !paper {
                return Err(Failure::usage("`table` currently requires --paper"));
            }
            let rows = reference_table(&quad).map_err(|e| Failure {
                code: EXIT_REGRESSION,
                message: format!("table computation failed: {e}"),
            })?;
            let code = if rows.iter().all(|r| r.pass) {
                EXIT_OK
            } else {
                EXIT_REGRESSION
            };
            Ok(Outcome {
                records: rows.iter().map(to_value).collect(),
                code,
            })
        }
        Command::Verify { config } => cmd_verify(config.as_deref(), &quad),
    }
}

fn quad_spec(cli: &Cli) -> Result<QuadSpec, Failure> {
    let base = QuadSpec::default();
    let spec = QuadSpec::with_tolerances(
        cli.quad_abs_tol.unwrap_or(base.abs_tol),
        cli.quad_rel_tol.unwrap_or(base.rel_tol),
    );
    spec.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(spec)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable record")
}

/// Seed used by `bound --optimize`: the fractional d = 3 trial at σ = 1/2,
/// the rich d = 1 trial elsewhere.
fn default_seed(spec: ProblemSpec) -> OptConfig {
    if spec.d == 3 && spec.sigma == 0.5 {
        OptConfig {
            seed_params: TrialParams::FRACTIONAL_D3,
            phi_kind: PhiKind::BumpPower,
            ..OptConfig::default()
        }
    } else {
        OptConfig::default()
    }
}

fn cmd_bound(
    d: u32,
    sigma: f64,
    method: BoundMethod,
    c_value: Option<f64>,
    run_optimizer: bool,
    quad: &QuadSpec,
) -> Result<BoundReport, Failure> {
    let spec = ProblemSpec::new(d, sigma).map_err(|e| Failure::usage(e.to_string()))?;
    let usage = |e: constants::ConstantsError| Failure::usage(e.to_string());

    let mut trial = None;
    let c_upper = if run_optimizer {
        let cfg = default_seed(spec);
        let result = optimize::minimize_c(spec, &cfg, quad).map_err(|e| Failure {
            code: EXIT_REGRESSION,
            message: format!("optimization failed: {e}"),
        })?;
        trial = optimize::build_pair(&result.best_params, cfg.phi_kind).ok();
        Some(result.best_value)
    } else {
        c_value
    };

    let report = match method {
        BoundMethod::RuminOriginal => constants::bound_rumin_original(spec).map_err(usage)?,
        BoundMethod::MomentumOptimal | BoundMethod::FractionalFirst => {
            constants::bound_momentum_optimal(spec)
        }
        BoundMethod::FromC => {
            let c = c_upper
                .ok_or_else(|| Failure::usage("--method from-c needs --c-value or --optimize"))?;
            constants::bound_from_c(spec, c).map_err(usage)?
        }
        BoundMethod::BestOf => constants::best_of(spec, c_upper).map_err(usage)?,
    };
    Ok(match trial {
        Some((f, phi)) if c_upper.is_some() && report.c_value == c_upper => {
            report.with_trial(f, phi)
        }
        _ => report,
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("malformed config {}: {e}", path.display())))
}

fn cmd_optimize(path: &Path, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let runs: Vec<OptimizeRun> = read_json(path)?;
    for (i, run) in runs.iter().enumerate() {
        ProblemSpec::new(run.d, run.sigma).map_err(|e| Failure::usage(format!("run {i}: {e}")))?;
        run.config
            .validate()
            .map_err(|e| Failure::usage(format!("run {i}: {e}")))?;
    }

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut lines = Vec::with_capacity(runs.len());
    for (chunk_index, chunk) in runs.chunks(workers.max(1)).enumerate() {
        let chunk_lines: Vec<Value> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .enumerate()
                .map(|(j, run)| {
                    scope.spawn(move || optimize_line(chunk_index * workers + j, run, quad))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("optimization worker panicked"))
                .collect()
        });
        lines.extend(chunk_lines);
    }

    if !lines.is_empty() {
        let mut best: Vec<(u32, f64, f64, usize)> = Vec::new();
        for (i, (run, line)) in runs.iter().zip(&lines).enumerate() {
            let Some(value) = line.pointer("/result/best_value").and_then(Value::as_f64) else {
                continue;
            };
            match best.iter_mut().find(|b| b.0 == run.d && b.1 == run.sigma) {
                Some(b) if value < b.2 => *b = (run.d, run.sigma, value, i),
                Some(_) => {}
                None => best.push((run.d, run.sigma, value, i)),
            }
        }
        let summary: Vec<Value> = best
            .iter()
            .map(|&(d, sigma, value, run)| json!({"d": d, "sigma": sigma, "best_value": value, "run": run}))
            .collect();
        lines.push(json!({ "summary": summary }));
    }
    Ok(Outcome {
        records: lines,
        code: EXIT_OK,
    })
}

fn optimize_line(index: usize, run: &OptimizeRun, quad: &QuadSpec) -> Value {
    let spec = ProblemSpec {
        d: run.d,
        sigma: run.sigma,
    };
    let mut line = json!({ "run": index, "d": run.d, "sigma": run.sigma });
    if let Some(label) = &run.label {
        line["label"] = json!(label);
    }
    match optimize::minimize_c(spec, &run.config, quad) {
        Ok(result) => {
            if let Ok(bound) = constants::bound_from_c(spec, result.best_value) {
                line["k_ratio"] = json!(bound.k_ratio);
                line["l_ratio"] = json!(bound.l_ratio);
            }
            if let Ok((f, phi)) = optimize::build_pair(&result.best_params, run.config.phi_kind) {
                line["f"] = to_value(&f);
                line["phi"] = to_value(&phi);
            }
            line["result"] = to_value(&result);
        }
        Err(e) => line["error"] = json!(e.to_string()),
    }
    line
}

fn cmd_verify(path: Option<&Path>, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let config = match path {
        Some(p) => read_json::<VerifyConfig>(p)?,
        None => VerifyConfig {
            l_ratio: PROVEN_L_RATIO,
            cases: verify::default_suite(),
        },
    };
    if !(config.l_ratio > 0.0) {
        return Err(Failure::usage(format!(
            "l_ratio must be positive, got {}",
            config.l_ratio
        )));
    }
    let mut records = Vec::with_capacity(config.cases.len());
    let mut regression = false;
    for case in &config.cases {
        let (spectrum, advisory) = verify::solve_checked(&case.potential, &case.grid, quad)
            .map_err(|e| Failure::usage(format!("case {}: {e}", case.name)))?;
        let check = verify::check_inequality(&spectrum, config.l_ratio);
        if !check.holds && config.l_ratio >= PROVEN_L_RATIO {
            regression = true;
        }
        let mut record = json!({
            "name": case.name,
            "potential": case.potential,
            "grid": case.grid,
            "l_ratio": config.l_ratio,
            "n_bound_states": spectrum.negative_eigenvalues.len(),
        });
        merge(&mut record, to_value(&spectrum));
        merge(&mut record, to_value(&check));
        record["grid_advisory"] = match advisory {
            Some(a) => to_value(&a),
            None => Value::Null,
        };
        records.push(record);
    }
    let code = if regression { EXIT_REGRESSION } else { EXIT_OK };
    Ok(Outcome { records, code })
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        t.extend(e);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowCheck {
    /// `|computed - reference| <= tolerance`
    Near,
    /// `computed <= reference + tolerance`
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub quantity: String,
    pub paper_value: f64,
    pub computed_value: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub check: RowCheck,
    pub pass: bool,
}

impl TableRow {
    fn new(
        quantity: &str,
        paper_value: f64,
        computed_value: f64,
        check: RowCheck,
        tolerance: f64,
    ) -> Self {
        let abs_diff = (computed_value - paper_value).abs();
        let pass = match check {
            RowCheck::Near => abs_diff <= tolerance,
            RowCheck::AtMost => computed_value <= paper_value + tolerance,
        };
        Self {
            quantity: quantity.to_string(),
            paper_value,
            computed_value,
            abs_diff,
            tolerance,
            check,
            pass,
        }
    }
}

/// The headline constants with their printed values and registered
/// tolerances, recomputed from scratch.
pub fn reference_table(quad: &QuadSpec) -> Result<Vec<TableRow>, Box<dyn std::error::Error>> {
    use RowCheck::{AtMost, Near};
    let one = ProblemSpec::new(1, 1.0)?;
    let three = ProblemSpec::new(3, 1.0)?;
    let frac = ProblemSpec::new(3, 0.5)?;

    let mom1 = constants::bound_momentum_optimal(one);
    let mom3 = constants::bound_momentum_optimal(three);
    let rumin1 = constants::bound_rumin_original(one)?;

    let simple = functionals::c_objective(
        &FFamily::rational_power(1.5, 1.0)?,
        &PhiFamily::bump_simple(),
        one,
        quad,
    )?;
    let p = TrialParams::RICH_D1;
    let rich = functionals::c_objective(
        &FFamily::rational_power(p.a, p.p)?,
        &PhiFamily::bump_rich(p.q, p.r)?,
        one,
        quad,
    )?;
    let low1 = constants::bound_from_c(one, rich)?;
    let lifted3 = constants::bound_lifted_1d(three, rich)?;

    // Cauchy-Schwarz envelope: g(t) <= sqrt(E/t) leaves 1/2 ∫_1^∞ (1 - u^{-1/2})² u^{-3/2} du
    let envelope = 0.5
        * integrate(
            |u: f64| (1.0 - u.powf(-0.5)).powi(2) * u.powf(-1.5),
            1.0,
            f64::INFINITY,
            &quad.with_tail_power(2),
        )?
        .value;

    let p3 = TrialParams::FRACTIONAL_D3;
    let c3 = functionals::c_objective(
        &FFamily::rational_power(p3.a, p3.p)?,
        &PhiFamily::bump_power(p3.q, p3.r)?,
        frac,
        quad,
    )?;
    let frac_bound = constants::bound_from_c(frac, c3)?;

    let limit = constants::large_d_limit_probe(1000, 1.0)?;

    Ok(vec![
        TableRow::new(
            "K_1/K^cl momentum-optimal",
            0.381777,
            mom1.k_ratio,
            Near,
            1e-5,
        ),
        TableRow::new(
            "L_{1,1}/L^cl momentum-optimal",
            1.618435,
            mom1.l_ratio,
            Near,
            1e-5,
        ),
        TableRow::new(
            "L_{1,3}/L^cl momentum-optimal",
            1.994584,
            mom3.l_ratio,
            Near,
            1e-5,
        ),
        TableRow::new(
            "L_{1,1}/L^cl rumin-original (sqrt 5)",
            2.236,
            rumin1.l_ratio,
            Near,
            1e-3,
        ),
        TableRow::new("C_1 upper simple trial", 0.381378, simple, AtMost, 1e-5),
        TableRow::new("C_1 upper", 0.373556, rich, Near, 1e-5),
        TableRow::new(
            "C_1 lower (Cauchy-Schwarz)",
            1.0 / 3.0,
            envelope,
            Near,
            1e-9,
        ),
        TableRow::new("K_1/K^cl low-momentum", 0.471851, low1.k_ratio, Near, 1e-5),
        TableRow::new(
            "L_{1,1}/L^cl low-momentum",
            1.455786,
            low1.l_ratio,
            Near,
            1e-5,
        ),
        TableRow::new("L_{1,3}/L^cl lifted", 1.456, lifted3.l_ratio, AtMost, 0.0),
        TableRow::new("C_{3,1/2} upper", 0.046737, c3, Near, 2e-6),
        TableRow::new(
            "K_{3,1/2}/K^cl fractional",
            0.826297,
            frac_bound.k_ratio,
            Near,
            1e-4,
        ),
        TableRow::new("K^cl_{3,1/2}", 2.923, constants::k_cl(frac), Near, 1e-3),
        TableRow::new(
            "limit probe d=1000",
            std::f64::consts::E,
            limit,
            AtMost,
            0.0,
        ),
        TableRow::new(
            "L_{1,1}/L^cl conjectured (2/sqrt 3)",
            1.155,
            CONJECTURED_L11_RATIO,
            Near,
            1e-3,
        ),
    ])
}

/// Round to 15 significant digits.
fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(r) = n
                .as_f64()
                .map(round15)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, inner, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn columns(rows: &[Vec<(String, Value)>]) -> Vec<String> {
    let mut keys: Vec<String> = Vec::new();
    for row in rows {
        for (k, _) in row {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    keys
}

fn cell(v: Option<&Value>, human: bool) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) if human && !(n.is_i64() || n.is_u64()) => {
            format!("{:.6}", n.as_f64().unwrap_or(f64::NAN))
        }
        Some(other) => other.to_string(),
    }
}

/// Render records in the chosen format.
pub fn render(records: &[Value], format: Format) -> String {
    let mut records = records.to_vec();
    records.iter_mut().for_each(round_numbers);
    match format {
        Format::Json => records.iter().map(|r| format!("{r}\n")).collect(),
        Format::Csv | Format::Text => {
            if records.is_empty() {
                return String::new();
            }
            let flat: Vec<Vec<(String, Value)>> = records
                .iter()
                .map(|r| {
                    let mut out = Vec::new();
                    flatten("", r, &mut out);
                    out
                })
                .collect();
            let keys = columns(&flat);
            let human = format == Format::Text;
            let table: Vec<Vec<String>> = flat
                .iter()
                .map(|row| {
                    let map: Map<String, Value> = row.iter().cloned().collect();
                    keys.iter().map(|k| cell(map.get(k), human)).collect()
                })
                .collect();
            if human {
                text_table(&keys, &table)
            } else {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&keys).expect("in-memory csv");
                for row in &table {
                    w.write_record(row).expect("in-memory csv");
                }
                String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
            }
        }
    }
}

fn text_table(keys: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..keys.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain(std::iter::once(keys[i].chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(keys);
    line(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>());
    for row in rows {
        line(row);
    }
    out
}
