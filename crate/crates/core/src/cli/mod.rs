//! The `orbicount` command line. [`run`] parses arguments, dispatches to
//! the library and returns the process exit status: 0 on success, 2 for
//! usage and domain errors, 3 when an enumeration would exceed its budget.

mod config;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::constants::{
    blowup_constant_paper, leading_constant, model_params, p1_campana_constant, p1_constant_paper, ConstantError,
    DEFAULT_CUTOFF,
};
use crate::enumerate::{count_series, dump_points, parse_csv, EnumConfig, EnumerateError, Mode, DEFAULT_BUDGET};
use crate::fitting::{fit_counts, residue_probe, zeta_partial_sums, FitError, FitModel, Window};
use crate::geometry::{
    global_height, height_places, is_campana, is_darmon, local_height, multiplicities, parse_point, relevant_primes,
    Bound, GeometryError, HeightValue,
};
use crate::localfactors::{
    archimedean_blowup, archimedean_p1, closed_form_factor, denef_factor, normalized_factor, shell_sum_oracle,
    LocalFactorError, LocalFactorInput, OracleConfig,
};
use crate::orbifold::{ModelKind, OrbifoldModel, PlaceSet};

pub use config::{parse_places, ConfigFile, GridSpec, ModelName, ModelSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Domain(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<EnumerateError> for CliError {
    fn from(e: EnumerateError) -> Self {
        match e {
            EnumerateError::BudgetExceeded { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::Enumerate(e) => e.into(),
            e => CliError::Domain(e.to_string()),
        }
    }
}

macro_rules! domain_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}
domain_error!(GeometryError, LocalFactorError, ConstantError);

#[derive(Parser, Debug)]
#[command(name = "orbicount", version, about = "Count Darmon and Campana points of bounded height")]
pub struct Cli {
    /// Optional `key=value` file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count points on a grid of height bounds (CSV or JSON).
    Count(CountArgs),
    /// Heights, multiplicities and classification of one point.
    Classify(ClassifyArgs),
    /// The leading constant and its ingredients.
    Constant(ConstantArgs),
    /// A local height integral at a prime or at infinity.
    LocalFactor(LocalFactorArgs),
    /// Fit a count CSV to `κ·Bᵃ(log B)^{b-1}`.
    Fit(FitArgs),
    /// Partial sums of the height zeta function.
    Zeta(ZetaArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct ModelArgs {
    /// p1, pn or blowup.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    m1: Option<u32>,
    #[arg(long)]
    m2: Option<u32>,
}

impl ModelArgs {
    fn resolve(&self, cfg: &ConfigFile) -> Result<OrbifoldModel, CliError> {
        ModelSpec {
            model: self.model.clone(),
            n: self.n,
            m: self.m,
            m1: self.m1,
            m2: self.m2,
        }
        .resolve(cfg)
    }
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Finite primes of S, comma separated.
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    bmax: Option<String>,
    /// geometric:k, geometric:k:lo, or a comma-separated list of bounds.
    #[arg(long)]
    grid: Option<String>,
    /// Points written by --dump: rational, campana or darmon.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Work budget; the enumeration stops with exit status 3 past it.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Also write the points of height at most bmax to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    s: Option<String>,
    /// `p/q` or `x0:…:xn` on projective space, `u,w` on the blow-up.
    point: String,
}

#[derive(Args, Debug)]
struct ConstantArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    s: Option<String>,
    /// Prime cutoff of the truncated Euler products.
    #[arg(long)]
    cutoff: Option<u64>,
    /// Add the reference closed forms.
    #[arg(long)]
    paper_values: bool,
}

#[derive(Args, Debug)]
struct LocalFactorArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// A prime, or `inf` for the archimedean factor.
    #[arg(long)]
    p: String,
    /// The exponent s.
    #[arg(long)]
    s: f64,
    /// Evaluate with the condition waived, as at a prime of S.
    #[arg(long)]
    in_s: bool,
    /// shell or none.
    #[arg(long, default_value = "shell")]
    oracle: String,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// CSV from `count`, or `-` for standard input.
    csv: PathBuf,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<u32>,
    /// `lo,hi`; defaults to the top two decades of the grid.
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    /// none, log, or power:δ.
    #[arg(long)]
    secondary: Option<String>,
}

#[derive(Args, Debug)]
struct ZetaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    bmax: Option<String>,
    /// Exponents, comma separated.
    #[arg(long)]
    at: String,
    #[arg(long)]
    mode: Option<String>,
    /// Also report `(s - a)^b` times each partial sum.
    #[arg(long)]
    probe: bool,
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Count(a) => cmd_count(a, &cfg, out),
        Command::Classify(a) => cmd_classify(a, &cfg, out),
        Command::Constant(a) => cmd_constant(a, &cfg, out),
        Command::LocalFactor(a) => cmd_local_factor(a, &cfg, out),
        Command::Fit(a) => cmd_fit(a, &cfg, out),
        Command::Zeta(a) => cmd_zeta(a, &cfg, out),
    }
}

fn write_to(path: Option<&PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn write_json(value: &Value, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    write_to(None, &text, out)
}

fn parse_mode(text: Option<&str>, default: Mode) -> Result<Mode, CliError> {
    match text {
        None => Ok(default),
        Some(t) => t.parse().map_err(|e: EnumerateError| CliError::Usage(e.to_string())),
    }
}

fn parse_bound(text: Option<String>) -> Result<Bound, CliError> {
    let text = text.ok_or_else(|| CliError::Usage("--bmax is required".into()))?;
    text.parse().map_err(|e: GeometryError| CliError::Usage(e.to_string()))
}

fn model_header(model: &OrbifoldModel, s: &PlaceSet) -> serde_json::Map<String, Value> {
    let (name, params) = model_params(model);
    let mut map = serde_json::Map::new();
    map.insert("model".into(), json!(name));
    map.insert("params".into(), json!(params));
    map.insert("s".into(), json!(s.finite_primes().collect::<Vec<_>>()));
    map
}

fn cmd_count(args: &CountArgs, cfg: &ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let model = args.model.resolve(cfg)?;
    let s = parse_places(cfg.pick(args.s.clone(), "s")?.as_deref())?;
    let bmax = parse_bound(cfg.pick(args.bmax.clone(), "bmax")?)?;
    let grid: GridSpec = cfg
        .pick(args.grid.clone(), "grid")?
        .unwrap_or_else(|| "geometric:10".into())
        .parse()
        .map_err(CliError::Usage)?;
    let bounds = grid.bounds(&bmax)?;
    let mode_text = cfg.pick(args.mode.clone(), "mode")?;
    let dump_mode = match mode_text.as_deref() {
        None | Some("all") => Mode::Darmon,
        Some(t) => parse_mode(Some(t), Mode::Darmon)?,
    };
    let mut config = EnumConfig::default();
    if let Some(w) = cfg.pick(args.workers, "workers")? {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        config.workers = w;
    }
    config.budget = cfg.pick(args.budget, "budget")?.unwrap_or(DEFAULT_BUDGET);
    let format = cfg.pick(args.format.clone(), "format")?.unwrap_or_else(|| "csv".into());
    let output = cfg.pick(args.output.clone(), "output")?;

    let series = count_series(&model, &s, &bounds, &config)?;
    let text = match format.as_str() {
        "csv" => series.to_csv(),
        "json" => {
            let mut map = model_header(&model, &s);
            map.insert("a".into(), json!(model.a_invariant().to_string()));
            map.insert("b".into(), json!(model.b_invariant()));
            let records: Vec<Value> = series
                .records
                .iter()
                .map(|r| {
                    json!({
                        "bound": r.bound.text(),
                        "n_rational": r.n_rational,
                        "n_campana": r.n_campana,
                        "n_darmon": r.n_darmon,
                    })
                })
                .collect();
            map.insert("records".into(), Value::Array(records));
            let mut t = serde_json::to_string_pretty(&Value::Object(map)).expect("JSON values serialize");
            t.push('\n');
            t
        }
        other => return Err(CliError::Usage(format!("unknown format {other:?} (expected csv or json)"))),
    };
    write_to(output.as_ref(), &text, out)?;

    if let Some(path) = cfg.pick(args.dump.clone(), "dump")? {
        let points = dump_points(&model, &s, &bmax, dump_mode)?;
        let mut text = String::new();
        for p in points {
            let coords: Vec<String> = p.iter().map(i64::to_string).collect();
            text.push_str(&coords.join(":"));
            text.push('\n');
        }
        write_to(Some(&path), &text, out)?;
    }
    Ok(())
}

fn exact_text(h: &HeightValue) -> String {
    if h.terms().is_empty() {
        return "1".into();
    }
    h.terms()
        .iter()
        .map(|(b, e)| format!("({b})^({e})"))
        .collect::<Vec<_>>()
        .join("*")
}

fn cmd_classify(args: &ClassifyArgs, cfg: &ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let model = args.model.resolve(cfg)?;
    let s = parse_places(cfg.pick(args.s.clone(), "s")?.as_deref())?;
    let point = parse_point(&args.point, &model)?;
    let heights = height_places(&point)?
        .into_iter()
        .map(|place| {
            let h = local_height(&point, &model, place)?;
            Ok(json!({"place": place.to_string(), "value": h.to_f64(), "exact": exact_text(&h)}))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mults = relevant_primes(&point)?
        .into_iter()
        .map(|p| Ok(json!({"p": p, "n": multiplicities(&point, &model, p)?.0})))
        .collect::<Result<Vec<_>, CliError>>()?;
    let h = global_height(&point, &model)?;
    let mut map = model_header(&model, &s);
    map.insert("point".into(), json!(point.to_string()));
    map.insert("height".into(), json!({"value": h.to_f64(), "exact": exact_text(&h)}));
    map.insert("heights".into(), Value::Array(heights));
    map.insert("multiplicities".into(), Value::Array(mults));
    map.insert("is_darmon".into(), json!(is_darmon(&point, &model, &s)?));
    map.insert("is_campana".into(), json!(is_campana(&point, &model, &s)?));
    write_json(&Value::Object(map), out)
}

fn paper_values(model: &OrbifoldModel, s: &PlaceSet, cutoff: u64) -> Result<Value, CliError> {
    let m = |i: usize| model.components[i].weight.finite().unwrap_or(0);
    Ok(match model.kind {
        ModelKind::ProjectiveSpace { n: 1 } => {
            let darmon = p1_constant_paper(m(0), s)?;
            let campana = if m(0) >= 2 {
                json!(p1_campana_constant(m(0), s, cutoff)?)
            } else {
                Value::Null
            };
            json!({"darmon": darmon, "campana": campana})
        }
        ModelKind::BlowupP2 => json!({"blowup": blowup_constant_paper(m(0), m(1), cutoff)?}),
        _ => json!({}),
    })
}

fn cmd_constant(args: &ConstantArgs, cfg: &ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let model = args.model.resolve(cfg)?;
    let s = parse_places(cfg.pick(args.s.clone(), "s")?.as_deref())?;
    let cutoff = cfg.pick(args.cutoff, "cutoff")?.unwrap_or(DEFAULT_CUTOFF);
    let breakdown = leading_constant(&model, &s, cutoff)?;
    let mut value = serde_json::to_value(&breakdown).expect("breakdown serializes");
    let paper = match cfg.get("paper_values") {
        _ if args.paper_values => true,
        Some(v) => v.trim() == "true",
        None => false,
    };
    if paper {
        value["paper_values"] = paper_values(&model, &s, cutoff)?;
    }
    write_json(&value, out)
}

fn cmd_local_factor(args: &LocalFactorArgs, cfg: &ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let model = args.model.resolve(cfg)?;
    let (name, params) = model_params(&model);
    if args.p.trim().eq_ignore_ascii_case("inf") {
        let v = match model.kind {
            ModelKind::ProjectiveSpace { n } => archimedean_p1(n, args.s)?,
            _ => {
                let m = |i: usize| model.components[i].weight.finite().unwrap_or(0);
                archimedean_blowup(m(0), m(1), args.s)?
            }
        };
        return write_json(
            &json!({
                "model": name, "params": params, "place": "inf", "s": args.s,
                "closed_form": v.closed_form, "quadrature": v.quadrature, "difference": v.difference,
            }),
            out,
        );
    }
    let p: u64 = args
        .p
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid prime {:?}", args.p)))?;
    let input = LocalFactorInput {
        model: &model,
        p,
        s: args.s,
        in_s: args.in_s,
    };
    let mut value = json!({
        "model": name, "params": params, "p": p, "s": args.s, "in_s": args.in_s,
        "closed_form": closed_form_factor(&input)?,
        "denef": denef_factor(&input)?,
        "normalized": if args.in_s { Value::Null } else { json!(normalized_factor(&model, p, args.s)?) },
    });
    match args.oracle.as_str() {
        "shell" => {
            let defaults = OracleConfig::default();
            let oc = OracleConfig {
                depth: cfg.pick(args.depth, "depth")?.unwrap_or(defaults.depth),
                tolerance: cfg.pick(args.tolerance, "tolerance")?.unwrap_or(defaults.tolerance),
            };
            let o = shell_sum_oracle(&input, &oc)?;
            value["oracle"] = json!(o.value);
            value["oracle_bound"] = json!(o.bound);
            value["oracle_rounding"] = json!(o.rounding);
        }
        "none" => value["oracle"] = Value::Null,
        other => return Err(CliError::Usage(format!("unknown oracle {other:?} (expected shell or none)"))),
    }
    write_json(&value, out)
}

fn parse_secondary(text: Option<&str>) -> Result<FitModel, CliError> {
    match text.map(str::trim) {
        None | Some("none") => Ok(FitModel::Leading),
        Some("log") => Ok(FitModel::WithLogSecondary),
        Some(t) => {
            let delta = t
                .strip_prefix("power:")
                .and_then(|d| d.parse::<Bound>().ok())
                .ok_or_else(|| CliError::Usage(format!("invalid secondary term {t:?}")))?;
            Ok(FitModel::WithPowerSecondary { delta: delta.to_f64() })
        }
    }
}

fn cmd_fit(args: &FitArgs, cfg: &ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = String::new();
    let read = if args.csv.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(&args.csv).map(|t| text = t)
    };
    read.map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.csv.display())))?;
    let table = parse_csv(&text)?;
    let a: Bound = cfg
        .pick(args.a.clone(), "a")?
        .ok_or_else(|| CliError::Usage("--a is required".into()))?
        .parse()
        .map_err(|e: GeometryError| CliError::Usage(format!("--a: {e}")))?;
    let b = cfg.pick(args.b, "b")?.unwrap_or(1);
    let mode = parse_mode(cfg.pick(args.mode.clone(), "mode")?.as_deref(), Mode::Darmon)?;
    let column = format!("n_{mode}");
    let counts = table
        .column(&column)
        .ok_or_else(|| CliError::Usage(format!("CSV has no column {column}")))?;
    let data: Vec<(f64, f64)> = table.bounds.iter().map(Bound::to_f64).zip(counts.iter().copied()).collect();
    let window = match cfg.pick(args.window.clone(), "window")? {
        Some(w) => {
            let (lo, hi) = w
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("window must be lo,hi, got {w:?}")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<Bound>()
                    .map(|b| b.to_f64())
                    .map_err(|e| CliError::Usage(format!("window: {e}")))
            };
            Window {
                lo: parse(lo)?,
                hi: parse(hi)?,
            }
        }
        None => Window::top_decades(data.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max)),
    };
    let model = parse_secondary(cfg.pick(args.secondary.clone(), "secondary")?.as_deref())?;
    let fit = fit_counts(&data, a.to_f64(), b, Some(window), model)?;
    write_json(&serde_json::to_value(&fit).expect("fit serializes"), out)
}

fn cmd_zeta(args: &ZetaArgs, cfg: &ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let model = args.model.resolve(cfg)?;
    let s = parse_places(cfg.pick(args.s.clone(), "s")?.as_deref())?;
    let bmax = parse_bound(cfg.pick(args.bmax.clone(), "bmax")?)?;
    let mode = parse_mode(cfg.pick(args.mode.clone(), "mode")?.as_deref(), Mode::Darmon)?;
    let exponents = args
        .at
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid exponent {x:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut map = model_header(&model, &s);
    let sums = zeta_partial_sums(&model, &s, &exponents, &bmax, mode)?;
    map.insert("partial_sums".into(), json!(sums));
    if args.probe {
        map.insert("probe".into(), json!(residue_probe(&model, &s, &exponents, &bmax, mode)?));
    }
    write_json(&Value::Object(map), out)
}
