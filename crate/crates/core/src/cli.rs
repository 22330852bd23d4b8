//! Command-line front end.
//!
//! Exit codes: 0 when the computation succeeded and any checked inequality
//! holds, 2 when an inequality is violated (the report carries the worst
//! witness), 1 on input or precondition errors (diagnostic on stderr).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::audit::{audit_certificate, AuditReport};
use crate::characterization::{
    check_pointwise, check_sobolev_pointwise, poincare_from_pointwise, AuditSelection,
    PointwiseReport,
};
use crate::error::{Error, Result};
use crate::geometry::{
    check_geodesic_lemma, dimension_audit, doubling_witness, geometry_report, length_metric,
    DimensionAudit, DoublingWitness, GeometryReport, LemmaOutcome,
};
use crate::maximal::{maximal_function, maximal_function_measure};
use crate::report::{extended_f64, to_json, within};
use crate::space::{load_document, Document, MetricKind, MetricMeasureSpace};
use crate::variation::{
    check_ball_poincare, total_variation, upper_gradient_check, variation_measure, PoincareReport,
    UpperGradientOutcome, VariationMode,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;

/// Path budget passed to `variation --gradient`; the check is exhaustive regardless.
const PATH_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "bvcert",
    version,
    about = "Maximal functions, Poincaré inequalities and BV certificates on finite metric measure spaces"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Graph,
    Grid,
}

impl From<ModeArg> for VariationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Graph => VariationMode::Graph,
            ModeArg::Grid => VariationMode::Grid,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Summary of a space document.
    Info { input: PathBuf },
    /// Restricted maximal function of a function or a measure at every point.
    Maximal {
        input: PathBuf,
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        measure: Option<String>,
        /// Radius bound (default: unrestricted).
        #[arg(long = "R")]
        big_r: Option<f64>,
    },
    /// Doubling constant, its witness and optionally the dimension audit.
    Doubling {
        input: PathBuf,
        #[arg(long)]
        audit: bool,
    },
    /// Geometric constants; with `--x0 --R --x --r` also the ball-containment lemma.
    Geometry {
        input: PathBuf,
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        x0: Option<usize>,
        #[arg(long = "R")]
        big_r: Option<f64>,
        #[arg(long)]
        x: Option<usize>,
        #[arg(long)]
        r: Option<f64>,
        /// Geodesic slack (default: longest edge)
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Discrete variation measure; with `--gradient` also the upper-gradient check.
    Variation {
        input: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Graph)]
        mode: ModeArg,
        #[arg(long)]
        gradient: Option<String>,
    },
    /// Least constant of the ball-wise Poincaré inequality for a measure.
    Poincare {
        input: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long)]
        normalized: bool,
        /// Fail (exit 2) when the least constant exceeds this value.
        #[arg(long)]
        c0: Option<f64>,
    },
    /// Least constant of the pointwise maximal-function inequality.
    Pointwise {
        input: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long)]
        measure: Option<String>,
        /// Use `(M g^p)^{1/p}` of this function instead of a measure.
        #[arg(long)]
        gradient: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        c0: Option<f64>,
    },
    /// Pointwise hypothesis to Poincaré conclusion, with proof traces.
    Characterize {
        input: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        c0: f64,
        /// Audited balls: `default`, `all` or `worst:K`.
        #[arg(long, default_value = "default")]
        balls: String,
    },
    /// Independently recheck a certificate.
    Audit { input: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn document(path: &Path) -> Result<Document> {
    load_document(&read(path)?)
}

#[derive(Serialize)]
struct InfoReport<'a> {
    name: &'a str,
    n: usize,
    metric: MetricKind,
    length_metric: bool,
    total_mass: f64,
    diameter: f64,
    functions: Vec<&'a str>,
    measures: Vec<&'a str>,
}

#[derive(Serialize)]
struct MaximalReport<'a> {
    source: &'a str,
    name: &'a str,
    #[serde(rename = "R", with = "extended_f64")]
    big_r: f64,
    labels: &'a [String],
    values: Vec<f64>,
}

#[derive(Serialize)]
struct DoublingReport {
    doubling_constant: f64,
    doubling_dimension: f64,
    witness: DoublingWitness,
    dimension_audit: Option<DimensionAudit>,
}

#[derive(Serialize)]
struct GeometryOutput {
    geometry: GeometryReport,
    lemma: Option<LemmaOutcome>,
}

#[derive(Serialize)]
struct VariationReport<'a> {
    mode: VariationMode,
    total: f64,
    labels: &'a [String],
    measure: Vec<f64>,
    upper_gradient: Option<UpperGradientOutcome>,
}

#[derive(Serialize)]
struct PoincareOutput<'a> {
    threshold: Option<f64>,
    passed: bool,
    worst_center_label: Option<&'a str>,
    report: PoincareReport,
}

#[derive(Serialize)]
struct PointwiseOutput<'a> {
    worst_pair_labels: Option<[&'a str; 2]>,
    report: PointwiseReport,
}

/// Report text and exit code of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: String,
}

impl Outcome {
    fn new(ok: bool, report: String) -> Self {
        Outcome {
            exit_code: if ok { EXIT_OK } else { EXIT_VIOLATED },
            report,
        }
    }
}

fn parse_selection(text: &str) -> Result<AuditSelection> {
    match text {
        "default" => Ok(AuditSelection::Default),
        "all" => Ok(AuditSelection::All),
        _ => text
            .strip_prefix("worst:")
            .and_then(|k| k.parse().ok())
            .map(AuditSelection::Worst)
            .ok_or_else(|| Error::Precondition(format!("bad --balls value {text:?}"))),
    }
}

/// The length-metric version of `space`, or `space` itself when it already is one.
fn resolve_length(space: &MetricMeasureSpace) -> Result<MetricMeasureSpace> {
    if space.is_length_metric() {
        Ok(space.clone())
    } else {
        length_metric(space)
    }
}

fn pointwise_output(space: &MetricMeasureSpace, report: PointwiseReport) -> Outcome {
    let labels = report
        .worst_pair
        .map(|w| [space.label(w.x), space.label(w.y)]);
    let ok = report.passed;
    Outcome::new(
        ok,
        to_json(&PointwiseOutput {
            worst_pair_labels: labels,
            report,
        }),
    )
}

/// Runs one command and returns its report.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    match &config.command {
        Command::Info { input } => {
            let doc = document(input)?;
            let s = &doc.space;
            Ok(Outcome::new(
                true,
                to_json(&InfoReport {
                    name: s.name(),
                    n: s.n(),
                    metric: s.kind(),
                    length_metric: s.is_length_metric(),
                    total_mass: s.total_mass(),
                    diameter: s.diameter(),
                    functions: doc.functions.keys().map(String::as_str).collect(),
                    measures: doc.measures.keys().map(String::as_str).collect(),
                }),
            ))
        }
        Command::Maximal {
            input,
            function,
            measure,
            big_r,
        } => {
            let doc = document(input)?;
            let r = big_r.unwrap_or(f64::INFINITY);
            let (source, name, values) = match (function, measure) {
                (Some(f), None) => (
                    "function",
                    f,
                    maximal_function(&doc.space, doc.function(f)?, r)?,
                ),
                (None, Some(m)) => (
                    "measure",
                    m,
                    maximal_function_measure(&doc.space, doc.measure(m)?, r)?,
                ),
                _ => {
                    return Err(Error::Precondition(
                        "give exactly one of --function and --measure".into(),
                    ))
                }
            };
            Ok(Outcome::new(
                true,
                to_json(&MaximalReport {
                    source,
                    name,
                    big_r: r,
                    labels: doc.space.labels(),
                    values: values.values().to_vec(),
                }),
            ))
        }
        Command::Doubling { input, audit } => {
            let doc = document(input)?;
            let witness = doubling_witness(&doc.space);
            let dimension = witness.constant.log2();
            let audit = audit.then(|| dimension_audit(&doc.space, dimension));
            let ok = audit.as_ref().is_none_or(|a| a.best_constant > 0.0);
            Ok(Outcome::new(
                ok,
                to_json(&DoublingReport {
                    doubling_constant: witness.constant,
                    doubling_dimension: dimension,
                    witness,
                    dimension_audit: audit,
                }),
            ))
        }
        Command::Geometry {
            input,
            audit,
            x0,
            big_r,
            x,
            r,
            delta,
        } => {
            let doc = document(input)?;
            let geometry = geometry_report(&doc.space, *audit);
            let lemma = match (x0, big_r, x, r) {
                (Some(x0), Some(big_r), Some(x), Some(r)) => {
                    let space = resolve_length(&doc.space)?;
                    let mesh = space
                        .edges()
                        .map_or(0.0, |e| e.iter().map(|e| e.length).fold(0.0, f64::max));
                    let delta = delta.unwrap_or(mesh);
                    Some(check_geodesic_lemma(&space, *x0, *big_r, *x, *r, delta)?)
                }
                (None, None, None, None) => None,
                _ => {
                    return Err(Error::Precondition(
                        "the lemma needs all of --x0, --R, --x and --r".into(),
                    ))
                }
            };
            let ok = lemma.as_ref().is_none_or(LemmaOutcome::succeeded);
            Ok(Outcome::new(
                ok,
                to_json(&GeometryOutput { geometry, lemma }),
            ))
        }
        Command::Variation {
            input,
            function,
            mode,
            gradient,
        } => {
            let doc = document(input)?;
            let u = doc.function(function)?;
            let mode = VariationMode::from(*mode);
            let nu = variation_measure(&doc.space, u, mode)?;
            let upper_gradient = match gradient {
                Some(g) => Some(upper_gradient_check(
                    &doc.space,
                    u,
                    doc.function(g)?,
                    PATH_BUDGET,
                )?),
                None => None,
            };
            let ok = upper_gradient.as_ref().is_none_or(|o| o.passed);
            Ok(Outcome::new(
                ok,
                to_json(&VariationReport {
                    mode,
                    total: total_variation(&doc.space, u, mode)?,
                    labels: doc.space.labels(),
                    measure: nu.masses().to_vec(),
                    upper_gradient,
                }),
            ))
        }
        Command::Poincare {
            input,
            function,
            measure,
            eta,
            normalized,
            c0,
        } => {
            let doc = document(input)?;
            let report = check_ball_poincare(
                &doc.space,
                doc.function(function)?,
                doc.measure(measure)?,
                *eta,
                *normalized,
            )?;
            let passed = match c0 {
                Some(c) => within(report.minimal_constant, *c),
                None => report.is_finite(),
            };
            Ok(Outcome::new(
                passed,
                to_json(&PoincareOutput {
                    threshold: *c0,
                    passed,
                    worst_center_label: report
                        .worst_ball
                        .as_ref()
                        .map(|b| doc.space.label(b.center)),
                    report,
                }),
            ))
        }
        Command::Pointwise {
            input,
            function,
            measure,
            gradient,
            p,
            sigma,
            c0,
        } => {
            let doc = document(input)?;
            let u = doc.function(function)?;
            let report = match (measure, gradient) {
                (Some(m), None) => check_pointwise(&doc.space, u, doc.measure(m)?, *sigma, *c0)?,
                (None, Some(g)) => {
                    let mut r =
                        check_sobolev_pointwise(&doc.space, u, doc.function(g)?, *p, *sigma)?;
                    if let Some(c) = c0 {
                        r.c0 = Some(*c);
                        r.passed = within(r.c0_minimal, *c);
                    }
                    r
                }
                _ => {
                    return Err(Error::Precondition(
                        "give exactly one of --measure and --gradient".into(),
                    ))
                }
            };
            Ok(pointwise_output(&doc.space, report))
        }
        Command::Characterize {
            input,
            function,
            measure,
            sigma,
            c0,
            balls,
        } => {
            let doc = document(input)?;
            let selection = parse_selection(balls)?;
            let space = resolve_length(&doc.space)?;
            let u = doc.function(function)?;
            let nu = doc.measure(measure)?;
            let pointwise = check_pointwise(&space, u, nu, *sigma, Some(*c0))?;
            if !pointwise.passed {
                return Ok(pointwise_output(&space, pointwise));
            }
            let cert = poincare_from_pointwise(&space, u, nu, *c0, *sigma, &selection)?;
            Ok(Outcome::new(cert.passed, to_json(&cert)))
        }
        Command::Audit { input } => {
            let report: AuditReport = audit_certificate(&read(input)?)?;
            Ok(Outcome::new(report.agreed, to_json(&report)))
        }
    }
}

fn emit(config: &RunConfig, report: &str) -> Result<()> {
    match &config.output {
        Some(path) => std::fs::write(path, report).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Runs with an explicit thread count (`None`: rayon's default pool).
pub fn run_with_threads(config: &RunConfig) -> Result<Outcome> {
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start {t} threads: {e}")))?
            .install(|| run(config)),
        None => run(config),
    }
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_with_threads(&config).and_then(|o| emit(&config, &o.report).map(|_| o.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
