//! Command-line front end.
//!
//! Every command builds one JSON report and an exit code. `--format machine`
//! prints the report as JSON; `--format table` prints the same values as
//! aligned text.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::certifier::{Certificate, Certifier};
use crate::counterexample;
use crate::danilov::{verify_vanishing_in, CohomologyEngine, LogFormSheafSpec, WeightMode};
use crate::divisors::{hypothesis_feasible, InvariantDivisor};
use crate::error::{Error, Result, EXIT_FAILED, EXIT_OK};
use crate::exactmath::parse_rational;
use crate::fan::builtin::{self, product};
use crate::fan::{Fan, StratumId};
use crate::suite::{self, SweepStats};

pub const DEFAULT_SEED: u64 = 20_240_611;

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  1  check failed: invalid fan, nonzero higher cohomology under a verified
     hypothesis, rejected certificate, or internal inconsistency
  2  malformed input or usage error
  3  ampleness hypothesis infeasible (nothing claimed)

Fan arguments accept a fan file path, `builtin:FAMILY:PARAM`
(e.g. builtin:projective_space:2) or `suite:NAME` (e.g. suite:Bl3P2).";

#[derive(Parser, Debug)]
#[command(
    name = "toric-bott",
    version,
    about = "Exact cohomology of log forms on smooth projective toric varieties",
    after_help = EXIT_HELP
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalFlags {
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Weight enumeration used for cohomology.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Chamber)]
    pub mode: Mode,
    /// Half-width of the weight box; required with `--mode box`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub box_bound: Option<i64>,
    /// Worker threads for suite runs; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for every randomized sample.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Chamber,
    Box,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate, construct or subdivide fans.
    #[command(subcommand)]
    Fan(FanCommand),
    /// Bott-type vanishing for `Ω^p(log D')(-D') ⊗ L`.
    #[command(subcommand)]
    Vanishing(VanishingCommand),
    /// Cohomology of one sheaf `Ω^p(log S) ⊗ O(T)`.
    Cohomology(CohomologyArgs),
    /// Degree arithmetic of the relative counterexample.
    Counterexample(CounterexampleArgs),
    /// Run consistency checks across the built-in test varieties.
    Suite(SuiteArgs),
}

#[derive(Subcommand, Debug)]
pub enum FanCommand {
    /// Report smoothness, completeness and the fan axioms.
    Validate {
        #[arg(long)]
        fan: String,
    },
    /// Construct a standard fan.
    Builtin {
        /// projective_space, hirzebruch, blown_up_plane or product.
        #[arg(long)]
        name: String,
        #[arg(long)]
        dim: Option<i64>,
        /// Hirzebruch parameter.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        /// Number of blown-up torus-fixed points.
        #[arg(long)]
        points: Option<i64>,
        /// Factor of a product; give exactly two.
        #[arg(long = "factor")]
        factors: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star-subdivide at a cone.
    Blowup {
        #[arg(long)]
        fan: String,
        /// Comma-separated ray indices.
        #[arg(long)]
        cone: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    #[arg(long)]
    pub fan: String,
    /// Divisor file, inline JSON, or comma-separated coefficients such as `2,0,0`.
    #[arg(long, allow_hyphen_values = true)]
    pub divisor: String,
    /// Comma-separated ray indices of `D'`; empty for none.
    #[arg(long, default_value = "")]
    pub logset: String,
}

#[derive(Subcommand, Debug)]
pub enum VanishingCommand {
    /// Compute every `h^k`, `k >= 1`, directly.
    Check {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Run even when the ampleness hypothesis fails.
        #[arg(long)]
        unchecked: bool,
    },
    /// Build a residue-sequence certificate and check it.
    Certify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Ray order for adding log components; defaults to ascending.
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare certificate and direct computation.
    CrossValidate {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Check a saved certificate.
    CheckCert {
        #[arg(long)]
        fan: String,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct CohomologyArgs {
    #[arg(long)]
    pub fan: String,
    /// Sheaf-spec file or inline JSON `{"p", "logset", "twist"}`.
    #[arg(long)]
    pub spec: String,
    /// Include the contributing weights.
    #[arg(long)]
    pub weights: bool,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("which").required(true).args(["degree", "scan"])))]
pub struct CounterexampleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub degree: Option<i64>,
    /// Inclusive range `lo..hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub scan: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteCheck {
    All,
    Vanishing,
    Certificates,
    Serre,
    LogSerre,
    Euler,
    Hodge,
    Agreement,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, value_enum, default_value_t = SuiteCheck::All)]
    pub check: SuiteCheck,
    /// Comma-separated suite fan names; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub fans: Vec<String>,
    /// Sample size for randomized checks.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Coefficient bound for the Serre duality grid.
    #[arg(long, default_value_t = 3)]
    pub serre_bound: i64,
}

/// Validated global settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub format: Format,
    pub mode: WeightMode,
    pub threads: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(flags: &GlobalFlags) -> Result<Self> {
        let mode = match (flags.mode, flags.box_bound) {
            (Mode::Chamber, None) => WeightMode::Chamber,
            (Mode::Chamber, Some(_)) => {
                return Err(Error::MalformedInput("--box-bound only applies with --mode box".into()))
            }
            (Mode::Box, None) => {
                return Err(Error::MalformedInput("--mode box needs an explicit --box-bound".into()))
            }
            (Mode::Box, Some(b)) if b < 0 => {
                return Err(Error::MalformedInput("--box-bound must be nonnegative".into()))
            }
            (Mode::Box, Some(bound)) => WeightMode::BruteBox { bound },
        };
        Ok(RunConfig {
            format: flags.format,
            mode,
            threads: flags.threads,
            seed: flags.seed,
        })
    }
}

/// What a run printed and how it exited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    value: Value,
    code: i32,
}

impl Report {
    fn ok(value: Value) -> Self {
        Report { value, code: EXIT_OK }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: e.exit_code(), stdout: String::new(), stderr: text }
            } else {
                Output { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let format = cli.global.format;
    let result = RunConfig::new(&cli.global).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?;
        pool.install(|| execute(&cli.command, &cfg))
    });
    match result {
        Ok(report) => Output {
            code: report.code,
            stdout: render(&report.value, format),
            stderr: String::new(),
        },
        Err(e) => {
            let code = e.exit_code();
            let stdout = match format {
                Format::Machine => render(&json!({ "error": e.to_string(), "exit_code": code }), format),
                Format::Table => String::new(),
            };
            Output { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        Command::Fan(c) => cmd_fan(c),
        Command::Vanishing(c) => cmd_vanishing(c, cfg),
        Command::Cohomology(a) => cmd_cohomology(a, cfg),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Suite(a) => cmd_suite(a, cfg),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn with_fields(base: Value, extra: Value) -> Value {
    let (Value::Object(mut a), Value::Object(b)) = (base, extra) else {
        unreachable!("reports are objects")
    };
    a.extend(b);
    Value::Object(a)
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::MalformedInput(format!("cannot read {path}: {e}")))
}

fn write(path: &PathBuf, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::MalformedInput(format!("cannot write {}: {e}", path.display())))
}

/// Resolves a fan argument: `builtin:FAMILY:P1,P2`, `suite:NAME` or a file.
pub fn load_fan(arg: &str) -> Result<Fan> {
    if let Some(rest) = arg.strip_prefix("builtin:") {
        let (name, params) = rest.split_once(':').unwrap_or((rest, ""));
        return builtin::by_name(name, &parse_ints(params)?);
    }
    if let Some(name) = arg.strip_prefix("suite:") {
        return suite::suite_fan(name);
    }
    Fan::from_json(&read(arg)?)
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::MalformedInput(format!("not an integer: `{t}`"))))
        .collect()
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::MalformedInput(format!("not a ray index: `{t}`"))))
        .collect()
}

/// Divisor from inline JSON, an inline coefficient list, or a file.
pub fn load_divisor(arg: &str) -> Result<InvariantDivisor> {
    let t = arg.trim();
    if t.starts_with('{') {
        return InvariantDivisor::from_json(t);
    }
    if !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || " ,/-".contains(c)) {
        let coeffs = t
            .split(',')
            .map(|x| parse_rational(x.trim()).ok_or_else(|| Error::MalformedInput(format!("bad coefficient `{x}`"))))
            .collect::<Result<Vec<_>>>()?;
        return Ok(InvariantDivisor::new(coeffs));
    }
    InvariantDivisor::from_json(&read(t)?)
}

pub fn load_spec(arg: &str) -> Result<LogFormSheafSpec> {
    let t = arg.trim();
    if t.starts_with('{') {
        LogFormSheafSpec::from_json(t)
    } else {
        LogFormSheafSpec::from_json(&read(t)?)
    }
}

fn load_instance(a: &InstanceArgs) -> Result<(Fan, Vec<usize>, InvariantDivisor)> {
    let f = load_fan(&a.fan)?;
    let l = load_divisor(&a.divisor)?;
    if l.len() != f.n_rays() {
        return Err(Error::MalformedInput(format!(
            "divisor has {} coefficients, fan has {} rays",
            l.len(),
            f.n_rays()
        )));
    }
    let mut dprime = parse_indices(&a.logset)?;
    dprime.sort_unstable();
    dprime.dedup();
    if let Some(j) = dprime.iter().find(|&&j| j >= f.n_rays()) {
        return Err(Error::MalformedInput(format!("log set refers to missing ray {j}")));
    }
    f.require_smooth_complete()?;
    Ok((f, dprime, l))
}

fn fan_summary(f: &Fan) -> Value {
    json!({
        "dim": f.dim(),
        "n_rays": f.n_rays(),
        "n_max_cones": f.max_cones().len(),
        "content_hash": f.content_hash(),
    })
}

fn cmd_fan(c: &FanCommand) -> Result<Report> {
    match c {
        FanCommand::Validate { fan } => {
            let f = load_fan(fan)?;
            let d = f.validate()?;
            let valid = d.smooth && d.complete && d.fan_axioms;
            let value = with_fields(fan_summary(&f), with_fields(to_value(&d), json!({ "valid": valid })));
            Ok(Report {
                value,
                code: if valid { EXIT_OK } else { EXIT_FAILED },
            })
        }
        FanCommand::Builtin { name, dim, a, points, factors, out } => {
            let need = |x: &Option<i64>, flag: &str| {
                x.ok_or_else(|| Error::MalformedInput(format!("{name} needs --{flag}")))
            };
            let f = match name.as_str() {
                "projective_space" => builtin::by_name(name, &[need(dim, "dim")?])?,
                "hirzebruch" => builtin::by_name(name, &[need(a, "a")?])?,
                "blown_up_plane" => builtin::by_name(name, &[need(points, "points")?])?,
                "product" => {
                    let [x, y] = factors.as_slice() else {
                        return Err(Error::MalformedInput("product needs exactly two --factor".into()));
                    };
                    product(&load_fan(x)?, &load_fan(y)?)
                }
                other => return Err(Error::UnknownFamily(other.to_string())),
            };
            finish_fan(f, out, json!({ "family": name }))
        }
        FanCommand::Blowup { fan, cone, out } => {
            let f = load_fan(fan)?;
            let tau = parse_indices(cone)?;
            let g = f.star_subdivision(&StratumId::new(tau.clone()))?;
            let new_ray = g.ray(g.n_rays() - 1).to_vec();
            finish_fan(g, out, json!({ "cone": tau, "new_ray": new_ray }))
        }
    }
}

fn finish_fan(f: Fan, out: &Option<PathBuf>, extra: Value) -> Result<Report> {
    let mut value = with_fields(fan_summary(&f), extra);
    if let Some(path) = out {
        write(path, &f.to_json())?;
        value = with_fields(value, json!({ "written": path.display().to_string() }));
    }
    Ok(Report::ok(with_fields(value, json!({ "fan": to_value(&f) }))))
}

fn mode_fields(mode: WeightMode) -> Value {
    match mode {
        WeightMode::Chamber => json!({ "mode": "chamber" }),
        WeightMode::BruteBox { bound } => json!({ "mode": "box", "box_bound": bound }),
    }
}

fn cmd_vanishing(c: &VanishingCommand, cfg: &RunConfig) -> Result<Report> {
    match c {
        VanishingCommand::Check { instance, unchecked } => {
            let (f, dprime, l) = load_instance(instance)?;
            if !unchecked && hypothesis_feasible(&f, &l, &dprime)?.is_none() {
                return Err(Error::HypothesisInfeasible);
            }
            let engine = CohomologyEngine::shared(&f)?;
            let rep = verify_vanishing_in(&engine, &dprime, &l, *unchecked, cfg.mode)?;
            let hypothesis = rep.witness.is_some();
            let code = if rep.pass || !hypothesis { EXIT_OK } else { EXIT_FAILED };
            let value = with_fields(
                to_value(&rep),
                with_fields(
                    json!({ "hypothesis": if hypothesis { "verified" } else { "infeasible" } }),
                    mode_fields(cfg.mode),
                ),
            );
            Ok(Report { value, code })
        }
        VanishingCommand::Certify { instance, order, out } => {
            let (f, dprime, l) = load_instance(instance)?;
            let certifier = Certifier::new(&f)?;
            let cert = match order {
                Some(o) => certifier.build_with_order(&dprime, &l, &parse_indices(o)?)?,
                None => certifier.build(&dprime, &l)?,
            };
            let (valid, reason) = checked(certifier.check(&cert))?;
            let mut value = json!({
                "fan_hash": cert.fan_hash,
                "dprime": cert.dprime,
                "l": cert.l,
                "leaves": cert.leaves(),
                "nodes": cert.nodes(),
                "depth": cert.depth(),
                "visited_strata": cert.visited_strata(),
                "valid": valid,
                "reason": reason,
            });
            if let Some(path) = out {
                write(path, &cert.to_json())?;
                value = with_fields(value, json!({ "written": path.display().to_string() }));
            }
            Ok(Report {
                value,
                code: if valid { EXIT_OK } else { EXIT_FAILED },
            })
        }
        VanishingCommand::CrossValidate { instance } => {
            let (f, dprime, l) = load_instance(instance)?;
            let cv = Certifier::new(&f)?.cross_validate(&dprime, &l)?;
            let ok = cv.agree && cv.certificate_pass && cv.direct_pass;
            let value = with_fields(json!({ "dprime": dprime }), to_value(&cv));
            Ok(Report {
                value,
                code: if ok { EXIT_OK } else { EXIT_FAILED },
            })
        }
        VanishingCommand::CheckCert { fan, cert } => {
            let f = load_fan(fan)?;
            let text = fs::read_to_string(cert)
                .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", cert.display())))?;
            let c = Certificate::from_json(&text)?;
            let (valid, reason) = checked(Certifier::new(&f)?.check(&c))?;
            let value = json!({
                "fan_hash": c.fan_hash,
                "leaves": c.leaves(),
                "nodes": c.nodes(),
                "valid": valid,
                "reason": reason,
            });
            Ok(Report {
                value,
                code: if valid { EXIT_OK } else { EXIT_FAILED },
            })
        }
    }
}

/// A rejected certificate is a report, not an error.
fn checked(r: Result<bool>) -> Result<(bool, Option<String>)> {
    match r {
        Ok(true) => Ok((true, None)),
        Ok(false) => Ok((false, Some("check returned false".into()))),
        Err(e) if e.exit_code() == EXIT_FAILED => Ok((false, Some(e.to_string()))),
        Err(e) => Err(e),
    }
}

fn cmd_cohomology(a: &CohomologyArgs, cfg: &RunConfig) -> Result<Report> {
    let f = load_fan(&a.fan)?;
    let spec = load_spec(&a.spec)?;
    f.require_smooth_complete()?;
    let res = CohomologyEngine::shared(&f)?.cohomology_with(&spec, cfg.mode)?;
    let mut value = with_fields(
        json!({
            "p": spec.p,
            "logset": spec.logset,
            "twist": spec.twist,
            "dims": res.dims,
            "euler": res.euler,
        }),
        mode_fields(cfg.mode),
    );
    if a.weights {
        let support: Vec<Value> = res
            .weight_support
            .iter()
            .map(|(w, d)| json!({ "weight": w, "dims": d }))
            .collect();
        value = with_fields(value, json!({ "weight_support": support }));
    }
    Ok(Report::ok(value))
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::MalformedInput(format!("expected `lo..hi`, got `{s}`"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Report> {
    if let Some(d) = a.degree {
        let s = counterexample::scenario(d)?;
        let extra = json!({
            "relatively_ample": counterexample::relative_ample_check(d)?,
            "riemann_roch_consistent": counterexample::riemann_roch_consistency(d)?,
        });
        return Ok(Report::ok(with_fields(to_value(&s), extra)));
    }
    let (lo, hi) = parse_range(a.scan.as_deref().expect("clap requires one of the two"))?;
    let reports = counterexample::scan(lo, hi)?;
    let minimal = reports.iter().find(|r| r.bott_fails).map(|r| r.d);
    Ok(Report::ok(json!({
        "lo": lo,
        "hi": hi,
        "minimal_failing_degree": minimal,
        "reports": reports,
    })))
}

fn cmd_suite(a: &SuiteArgs, cfg: &RunConfig) -> Result<Report> {
    let all = suite::suite_fans()?;
    let fans: Vec<(String, Fan)> = if a.fans.is_empty() {
        all
    } else {
        a.fans
            .iter()
            .map(|n| Ok((n.clone(), suite::suite_fan(n)?)))
            .collect::<Result<_>>()?
    };
    let wants = |c: SuiteCheck| a.check == SuiteCheck::All || a.check == c;
    let mut runs: Vec<(&str, SweepStats)> = Vec::new();
    for (name, f) in &fans {
        if wants(SuiteCheck::Vanishing) {
            runs.push(("vanishing", suite::vanishing_sweep(name, f)?));
        }
        if wants(SuiteCheck::Certificates) {
            runs.push(("certificates", suite::certificate_sweep(name, f)?));
        }
        if wants(SuiteCheck::Serre) {
            runs.push(("serre", suite::serre_duality_sweep(name, f, a.serre_bound)?));
        }
        if wants(SuiteCheck::LogSerre) {
            runs.push(("log-serre", suite::log_serre_sample(name, f, a.samples, cfg.seed)?));
        }
        if wants(SuiteCheck::Hodge) {
            runs.push(("hodge", suite::hodge_sweep(name, f)?));
        }
        if wants(SuiteCheck::Agreement) {
            runs.push(("agreement", suite::method_agreement(name, f, a.samples, cfg.seed)?));
        }
    }
    if wants(SuiteCheck::Euler) {
        runs.push(("euler", suite::euler_sample(&fans, a.samples, cfg.seed)?));
    }
    let code = runs.iter().map(|(_, s)| s.exit_code).max().unwrap_or(EXIT_OK);
    let failures: usize = runs.iter().map(|(_, s)| s.failures.len()).sum();
    let rows: Vec<Value> = runs
        .iter()
        .map(|(check, s)| with_fields(json!({ "check": check }), to_value(s)))
        .collect();
    Ok(Report {
        value: json!({ "seed": cfg.seed, "total_failures": failures, "runs": rows }),
        code,
    })
}

/// Renders a report in the requested format. Both formats carry the same
/// scalar values in the same order.
pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Machine => format!("{}\n", serde_json::to_string_pretty(v).expect("json")),
        Format::Table => {
            let mut out = String::new();
            render_value(v, 0, &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => serde_json::to_string(v).expect("json"),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(is_flat),
        Value::Object(_) => false,
        _ => true,
    }
}

/// Array of objects sharing one key list, rendered as rows.
fn uniform_rows(xs: &[Value]) -> Option<Vec<&Map<String, Value>>> {
    let rows: Vec<&Map<String, Value>> = xs.iter().map(Value::as_object).collect::<Option<_>>()?;
    let keys: Vec<&String> = rows.first()?.keys().collect();
    rows.iter()
        .all(|r| r.keys().collect::<Vec<_>>() == keys)
        .then_some(rows)
}

fn render_rows(rows: &[&Map<String, Value>], indent: usize, out: &mut String) {
    let keys: Vec<&String> = rows[0].keys().collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.values().map(scalar).collect())
        .collect();
    let widths: Vec<usize> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| cells.iter().map(|c| c[i].chars().count()).chain([k.len()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<String>| {
        let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("{}{}\n", " ".repeat(indent), padded.join("  ").trim_end())
    };
    out.push_str(&line(keys.iter().map(|k| k.to_string()).collect()));
    for c in cells {
        out.push_str(&line(c));
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            let w = m.keys().map(String::len).max().unwrap_or(0);
            for (k, val) in m {
                match val {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(val, indent + 2, out);
                    }
                    Value::Array(xs) if !is_flat(val) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        match uniform_rows(xs) {
                            Some(rows) => render_rows(&rows, indent + 2, out),
                            None => render_value(val, indent + 2, out),
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k:<w$}  {}\n", scalar(val))),
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_value(x, indent + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}
