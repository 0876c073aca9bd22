//! The `uhyp` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

use uhyp::detector::{
    detect, extract_form, search, Certificate, DetectMode, DetectOptions, DetectionCell, ResultStore,
};
use uhyp::duality::{bmss_check, sample_points};
use uhyp::lefschetz::{equivalence_test, lefschetz_check, PowerIdealSpec};
use uhyp::pointsets::{
    fermat_supersolvable_duals, parse_system_name, root_system, twisted_cubic_points, PointFormat, PointSet,
};
use uhyp::reproduce::{golden, goldens, reproduce, Reproduction};
use uhyp::{Error, FieldScalar, FieldSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOWNGRADE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Serialize)]
#[command(name = "uhyp", version, about = "Find and certify unexpected hypersurfaces of finite point sets")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "UHYP_THREADS")]
    threads: Option<usize>,
    /// Silence progress messages on standard error.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Keep per-cell runtimes in reports (makes them differ between runs).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Write a point configuration to a file.
    Points(PointsArgs),
    /// Decide one (d, m) cell.
    Detect(DetectArgs),
    /// Run every cell of a degree grid.
    Search(SearchArgs),
    /// Extract unexpected forms for a cell.
    Form(FormArgs),
    /// Tangent-cone and swap checks on a unique unexpected form.
    Duality(DualityArgs),
    /// Lefschetz maximal-rank test for the powers of the dual linear forms.
    Wlp(WlpArgs),
    /// Rerun a reference search and compare with the embedded results.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Serialize, Clone)]
struct Source {
    /// JSON or CSV point file.
    #[arg(long, value_name = "FILE")]
    points: Option<PathBuf>,
    /// Field of a CSV point file: q, sqrt5, golden or eisenstein.
    #[arg(long, default_value = "q")]
    field: String,
    /// Root system family (A, B, C, D, E, F, H), optionally with the rank, as in B4.
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    rank: Option<u32>,
    /// This many points on the twisted cubic.
    #[arg(long, value_name = "COUNT")]
    twisted_cubic: Option<usize>,
    /// The 12 points dual to xyz(x³-y³)(x³-z³)(y³-z³).
    #[arg(long)]
    fermat: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Symbolic,
    Probabilistic,
    Hybrid,
}

impl From<ModeArg> for DetectMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Symbolic => DetectMode::Symbolic,
            ModeArg::Probabilistic => DetectMode::Probabilistic,
            ModeArg::Hybrid => DetectMode::Hybrid,
        }
    }
}

#[derive(Args, Serialize, Clone)]
struct Engine {
    #[arg(long, value_enum, default_value = "hybrid")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random specializations per rank estimate.
    #[arg(long, default_value_t = 3)]
    trials: u32,
    /// Largest kernel-lifting system attempted when certifying a cell.
    #[arg(long, default_value_t = 4000)]
    max_unknowns: usize,
    /// Exit with status 2 if any verdict is only probabilistic.
    #[arg(long)]
    certify: bool,
}

impl Engine {
    fn options(&self) -> DetectOptions {
        DetectOptions {
            seed: self.seed,
            trials: self.trials,
            max_unknowns: self.max_unknowns,
            ..DetectOptions::default()
        }
    }
}

#[derive(Args, Serialize)]
struct PointsArgs {
    #[command(flatten)]
    source: Source,
    /// Output file; the extension picks JSON or CSV. Defaults to JSON on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DetectArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    engine: Engine,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    m: u32,
    /// Include the unexpected form in the report.
    #[arg(long)]
    form: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SearchArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    engine: Engine,
    #[arg(long, default_value_t = 2)]
    dmin: u32,
    #[arg(long, default_value_t = 6)]
    dmax: u32,
    #[arg(long, default_value_t = 2)]
    mmin: u32,
    /// Defaults to dmax.
    #[arg(long)]
    mmax: Option<u32>,
    /// JSON-lines cache of finished cells, reused across runs.
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a one-row-per-cell CSV summary.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct FormArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    engine: Engine,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DualityArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    engine: Engine,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    m: u32,
    /// Seed-derived sample points.
    #[arg(long, default_value_t = 3)]
    samples: usize,
    /// Extra sample point, comma separated (repeatable), e.g. -6,-5,4.
    #[arg(long = "point", value_name = "COORDS", allow_hyphen_values = true)]
    sample_point: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct WlpArgs {
    #[command(flatten)]
    source: Source,
    /// Exponent of the linear forms.
    #[arg(long)]
    k: u32,
    /// Source degree of the multiplication map (default k - 1).
    #[arg(long)]
    degree: Option<u32>,
    /// Power of the general form.
    #[arg(long, default_value_t = 1)]
    range: u32,
    /// Also check agreement with the detector at d = m = k.
    #[arg(long)]
    check_equivalence: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ReproduceArgs {
    /// Reference search: table1, a, d, f4, h3, h4, e6, e7, e8 or all.
    name: String,
    #[command(flatten)]
    engine: Engine,
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// A failure with its exit status.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn parse_field(name: &str) -> Result<FieldSpec, Failure> {
    match name {
        "q" | "Q" | "rationals" => Ok(FieldSpec::rationals()),
        "sqrt5" => Ok(FieldSpec::sqrt5()),
        "golden" => Ok(FieldSpec::golden()),
        "eisenstein" => Ok(FieldSpec::eisenstein()),
        _ => Err(Failure(EXIT_USAGE, format!("unknown field `{name}`"))),
    }
}

fn load_points(src: &Source) -> Result<PointSet, Failure> {
    let chosen = [src.points.is_some(), src.system.is_some(), src.twisted_cubic.is_some(), src.fermat]
        .iter()
        .filter(|&&b| b)
        .count();
    if chosen != 1 {
        return Err(Failure(
            EXIT_USAGE,
            "give exactly one of --points, --system, --twisted-cubic, --fermat".into(),
        ));
    }
    if let Some(path) = &src.points {
        let format = PointFormat::from_path(path)
            .ok_or_else(|| Failure(EXIT_USAGE, format!("{}: expected a .json or .csv file", path.display())))?;
        return Ok(PointSet::load(path, format, &parse_field(&src.field)?)?);
    }
    if let Some(sys) = &src.system {
        let (name, rank) = match src.rank {
            Some(r) => (sys.clone(), r),
            None => parse_system_name(sys)?,
        };
        return Ok(root_system(&name, rank)?);
    }
    if let Some(count) = src.twisted_cubic {
        return Ok(twisted_cubic_points(count, None)?);
    }
    Ok(fermat_supersolvable_duals())
}

fn cell_value(cell: &DetectionCell, timings: bool) -> Value {
    let mut v = serde_json::to_value(cell).expect("cells serialize");
    if !timings {
        v.as_object_mut().expect("object").remove("runtime_ms");
    }
    v
}

fn envelope(config: &Cli, result: Value) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "result": result,
    })
}

fn emit(out: Option<&Path>, report: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_csv(path: &Path, cells: &[(String, DetectionCell)]) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure(EXIT_USAGE, format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["label", "n", "d", "m", "edim", "adim", "unexpected", "certificate", "kernel_dim_claimed"])
        .map_err(io)?;
    for (label, c) in cells {
        let cert = match c.certificate {
            Certificate::Certified => "certified",
            Certificate::Probabilistic => "probabilistic",
        };
        w.write_record([
            label.clone(),
            c.n.to_string(),
            c.d.to_string(),
            c.m.to_string(),
            c.edim.to_string(),
            c.adim.to_string(),
            c.unexpected.to_string(),
            cert.to_string(),
            c.kernel_dim_claimed.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn downgrade_status(certify: bool, cells: &[&DetectionCell]) -> i32 {
    let downgraded = cells.iter().filter(|c| c.certificate == Certificate::Probabilistic).count();
    if downgraded > 0 {
        warn!("{downgraded} cell(s) carry only probabilistic certificates");
        if certify {
            return EXIT_DOWNGRADE;
        }
    }
    EXIT_OK
}

fn parse_point(field: &FieldSpec, n: usize, s: &str) -> Result<Vec<FieldScalar>, Failure> {
    let coords = s
        .split(',')
        .map(|c| FieldScalar::parse(field, c.trim()).map_err(|e| Failure(EXIT_USAGE, format!("point `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != n + 1 {
        return Err(Failure(EXIT_USAGE, format!("point `{s}` needs {} coordinates", n + 1)));
    }
    Ok(coords)
}

fn open_store(path: &Option<PathBuf>) -> Result<Option<ResultStore>, Failure> {
    match path {
        Some(p) => Ok(Some(ResultStore::open(p)?)),
        None => Ok(None),
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Points(a) => {
            let z = load_points(&a.source)?;
            match &a.out {
                Some(path) => {
                    let format = PointFormat::from_path(path).ok_or_else(|| {
                        Failure(EXIT_USAGE, format!("{}: expected a .json or .csv file", path.display()))
                    })?;
                    z.save(path, format)?;
                    info!("wrote {} points to {}", z.len(), path.display());
                }
                None => println!("{}", z.to_json()),
            }
            Ok(EXIT_OK)
        }
        Command::Detect(a) => {
            let z = load_points(&a.source)?;
            let opts = a.engine.options();
            let mut cell = detect(&z, a.d, a.m, a.engine.mode.into(), &opts)?;
            if a.form && cell.unexpected && cell.certificate == Certificate::Certified {
                let forms = extract_form(&z, a.d, a.m, 1, &opts)?;
                cell.form = Some(forms[0].poly.to_string());
            }
            info!(
                "{} (d={}, m={}): edim {}, adim {}, unexpected {}",
                z.label(),
                a.d,
                a.m,
                cell.edim,
                cell.adim,
                cell.unexpected
            );
            emit(a.out.as_deref(), &envelope(cli, cell_value(&cell, cli.timings)))?;
            Ok(downgrade_status(a.engine.certify, &[&cell]))
        }
        Command::Search(a) => {
            let z = load_points(&a.source)?;
            let store = open_store(&a.store)?;
            let m_range = (a.mmin, a.mmax.unwrap_or(a.dmax));
            info!("searching {} over d in {}..={}", z.label(), a.dmin, a.dmax);
            let cells = search(&z, (a.dmin, a.dmax), m_range, a.engine.mode.into(), &a.engine.options(), store.as_ref())?;
            let hits = cells.iter().filter(|c| c.unexpected).count();
            info!("{} cells, {hits} unexpected", cells.len());
            let labelled: Vec<(String, DetectionCell)> =
                cells.iter().map(|c| (z.label().to_string(), c.clone())).collect();
            if let Some(p) = &a.csv {
                write_csv(p, &labelled)?;
            }
            let result = json!({
                "label": z.label(),
                "cells": cells.iter().map(|c| cell_value(c, cli.timings)).collect::<Vec<_>>(),
            });
            emit(a.out.as_deref(), &envelope(cli, result))?;
            Ok(downgrade_status(a.engine.certify, &cells.iter().collect::<Vec<_>>()))
        }
        Command::Form(a) => {
            let z = load_points(&a.source)?;
            let forms = extract_form(&z, a.d, a.m, a.count, &a.engine.options())?;
            let result: Vec<Value> = forms
                .iter()
                .map(|f| json!({ "bidegree": f.bidegree, "poly": f.poly.to_string() }))
                .collect();
            emit(a.out.as_deref(), &envelope(cli, Value::Array(result)))?;
            Ok(EXIT_OK)
        }
        Command::Duality(a) => {
            let z = load_points(&a.source)?;
            let mut samples = a
                .sample_point
                .iter()
                .map(|s| parse_point(z.field(), z.n(), s))
                .collect::<Result<Vec<_>, _>>()?;
            samples.extend(sample_points(z.n(), z.field(), a.engine.seed, a.samples));
            let report = bmss_check(&z, a.d, a.m, &samples, &a.engine.options())?;
            emit(a.out.as_deref(), &envelope(cli, serde_json::to_value(&report).expect("serializes")))?;
            Ok(EXIT_OK)
        }
        Command::Wlp(a) => {
            let z = load_points(&a.source)?;
            let spec = PowerIdealSpec::dual_to(&z, a.k)?;
            let degree = a.degree.unwrap_or(a.k.saturating_sub(1));
            let verdict = lefschetz_check(&spec, a.range, degree, a.seed)?;
            info!(
                "×L^{} from degree {degree}: rank {} of {} -> {}",
                a.range, verdict.map_rank, verdict.dim_source, verdict.dim_target
            );
            let mut result = json!({ "verdict": verdict });
            if a.check_equivalence {
                let opts = DetectOptions {
                    seed: a.seed,
                    ..DetectOptions::default()
                };
                let shared = equivalence_test(&z, a.k, a.k, a.seed, &opts)?;
                result["equivalence"] = json!({ "d": a.k, "m": a.k, "unexpected": shared });
            }
            emit(a.out.as_deref(), &envelope(cli, result))?;
            Ok(EXIT_OK)
        }
        Command::Reproduce(a) => {
            let names: Vec<String> = if a.name == "all" {
                goldens().into_iter().map(|g| g.name).collect()
            } else {
                vec![a.name.clone()]
            };
            let store = open_store(&a.store)?;
            let mut runs: Vec<Reproduction> = Vec::new();
            for name in &names {
                let g = golden(name)?;
                info!("reproducing {name}");
                let r = reproduce(&g, a.engine.mode.into(), &a.engine.options(), store.as_ref())?;
                if !r.matches {
                    warn!("{name}: missing {:?}, unexpected extras {:?}", r.missing, r.extra);
                }
                runs.push(r);
            }
            if let Some(p) = &a.csv {
                let all: Vec<(String, DetectionCell)> = runs.iter().flat_map(|r| r.cells.clone()).collect();
                write_csv(p, &all)?;
            }
            let result: Vec<Value> = runs
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "matches": r.matches,
                        "found": r.found,
                        "missing": r.missing,
                        "extra": r.extra,
                        "cells": r.cells.iter().map(|(l, c)| {
                            let mut v = cell_value(c, cli.timings);
                            v["label"] = json!(l);
                            v
                        }).collect::<Vec<_>>(),
                    })
                })
                .collect();
            emit(a.out.as_deref(), &envelope(cli, Value::Array(result)))?;
            if runs.iter().any(|r| !r.matches) {
                return Ok(EXIT_MISMATCH);
            }
            let cells: Vec<&DetectionCell> = runs.iter().flat_map(|r| r.cells.iter().map(|(_, c)| c)).collect();
            Ok(downgrade_status(a.engine.certify, &cells))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
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
    let level = if cli.quiet { log::LevelFilter::Off } else { log::LevelFilter::Info };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            warn!("thread pool already initialized; --threads ignored");
        }
    }
    match execute(&cli) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}
