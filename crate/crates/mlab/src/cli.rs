//! Command-line front end: argument parsing, suite dispatch, report emission.
//!
//! Subcommands map one-to-one onto the verification suites, plus `tensors`
//! for inspecting the geometry at a single point and `all` for the full
//! battery. Reports go to stdout (or `--out`) in the format picked by
//! `--format`; the JSON schema is documented in [`crate::report`].
//!
//! Exit codes: `0` — every asserting check passed; `1` — at least one
//! asserting check failed; `2` — usage or spec errors (bad flags, malformed
//! spec files, inadmissible points, unsatisfied suite preconditions).
//!
//! `MLAB_THREADS` caps the worker-thread count used for per-sample
//! parallelism; output assembly is always single-threaded and ordered, so
//! reports are byte-stable for fixed inputs (with `--no-timestamp`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use crate::dense::{Tensor3, Tensor4};
use crate::error::{Error, Result};
use crate::hypersurfaces::SurfaceSpec;
use crate::norms::{parse_spec_file, NormSpec};
use crate::report::{self, fmt_float, json_escape, Format, SkippedSuite};
use crate::tensors::{torsion_scaling_residual, PointGeometry};
use crate::verify::{self, CheckRecord, SamplePlan, Tolerances, Verdict};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Path to the norm spec JSON file.
    #[arg(long, value_name = "PATH")]
    norm: PathBuf,

    /// Seed for the deterministic sample stream.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Number of sample points.
    #[arg(long, default_value_t = 200)]
    count: usize,

    /// Smallest sampled Euclidean radius.
    #[arg(long, default_value_t = 0.5, value_name = "X")]
    rmin: f64,

    /// Largest sampled Euclidean radius.
    #[arg(long, default_value_t = 2.0, value_name = "X")]
    rmax: f64,

    /// Tolerance override, repeatable (e.g. --tol tol_flat=1e-9).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Omit the timestamp, making output a pure function of the inputs.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Parser, Debug)]
#[command(
    name = "mlab",
    version,
    about = "Numerical geometry of Minkowski norms: metric, torsion, curvature, and hypersurface rigidity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the norm axioms: positivity, homogeneity, strong convexity.
    Axioms {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print g, C, A, Christoffel, and curvature at one point.
    Tensors {
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluation point, comma-separated coordinates.
        #[arg(
            long,
            value_name = "Y0,Y1,...",
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        at: Vec<f64>,
    },
    /// Classify the norm as flat or curved via both curvature routes.
    Flatness {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the induced-curvature relation on norm spheres S(r).
    Theorem3 {
        #[command(flatten)]
        common: CommonArgs,
        /// Sphere radii, comma-separated.
        #[arg(
            long,
            value_name = "R1,R2,...",
            value_delimiter = ',',
            default_values_t = [0.5, 1.0, 2.0]
        )]
        r: Vec<f64>,
    },
    /// Mean Cartan torsion scan with its Euclidean-rigidity implication.
    Deicke {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Absolute homogeneity + flatness scan with its rigidity implication.
    Brickell {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Parallelism residual of a constant vector field, with its implication.
    Parallel {
        #[command(flatten)]
        common: CommonArgs,
        /// Candidate parallel vector, comma-separated coordinates.
        #[arg(
            long,
            value_name = "B0,B1,...",
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        b: Vec<f64>,
    },
    /// Umbilical-hypersurface battery on a surface spec.
    Theorem1 {
        #[command(flatten)]
        common: CommonArgs,
        /// Path to the surface spec JSON file.
        #[arg(long, value_name = "PATH")]
        surface: PathBuf,
    },
    /// Run every suite; suites whose hypotheses need n >= 3 are skipped at n = 2.
    All {
        #[command(flatten)]
        common: CommonArgs,
        /// Surface spec for the hypersurface battery (default: level set r = 1).
        #[arg(long, value_name = "PATH")]
        surface: Option<PathBuf>,
        /// Parallel candidate vector (default: first coordinate direction).
        #[arg(long, value_name = "B0,B1,...", value_delimiter = ',', allow_hyphen_values = true)]
        b: Option<Vec<f64>>,
        /// Norm-sphere radii for the sectional checks.
        #[arg(
            long,
            value_name = "R1,R2,...",
            value_delimiter = ',',
            default_values_t = [0.5, 1.0, 2.0]
        )]
        r: Vec<f64>,
    },
}

/// Parses the arguments and runs the selected command, returning the process
/// exit code. All I/O errors and spec violations land on code 2; only a
/// failed asserting check produces code 1.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    init_thread_pool();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("MLAB_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // A second initialization in the same process is harmless:
                // the pool is already sized, so the error is ignored.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring MLAB_THREADS={raw:?} (want a positive integer)"),
        }
    }
}

struct RunContext {
    spec: NormSpec,
    plan: SamplePlan,
    tols: Tolerances,
}

impl RunContext {
    fn prepare(common: &CommonArgs) -> Result<RunContext> {
        let spec = parse_spec_file(&common.norm)?;
        let plan = SamplePlan::new(common.seed, common.count, common.rmin, common.rmax)?;
        let mut tols = Tolerances::default();
        for item in &common.tol {
            let (name, value) = item.split_once('=').ok_or_else(|| {
                Error::ParseError(format!("tolerance override {item:?} must look like NAME=VALUE"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::ParseError(format!("tolerance value {value:?} is not a number"))
            })?;
            tols.set(name.trim(), value)?;
        }
        Ok(RunContext { spec, plan, tols })
    }
}

fn emit(common: &CommonArgs, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn exit_code(overall: bool) -> i32 {
    if overall {
        0
    } else {
        1
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Axioms { common } => {
            let ctx = RunContext::prepare(&common)?;
            let report = verify::axioms_suite(&ctx.spec, &ctx.plan, &ctx.tols)?;
            emit(&common, &report::render(&report, common.format.into(), !common.no_timestamp))?;
            Ok(exit_code(report.overall))
        }
        Command::Tensors { common, at } => tensors_command(&common, &at),
        Command::Flatness { common } => {
            let ctx = RunContext::prepare(&common)?;
            let report = verify::flatness_scan(&ctx.spec, &ctx.plan, &ctx.tols)?;
            emit(&common, &report::render(&report, common.format.into(), !common.no_timestamp))?;
            Ok(exit_code(report.overall))
        }
        Command::Theorem3 { common, r } => {
            let ctx = RunContext::prepare(&common)?;
            let report = verify::theorem3_suite(&ctx.spec, &r, &ctx.plan, &ctx.tols)?;
            emit(&common, &report::render(&report, common.format.into(), !common.no_timestamp))?;
            Ok(exit_code(report.overall))
        }
        Command::Deicke { common } => {
            let ctx = RunContext::prepare(&common)?;
            let report = verify::deicke_suite(&ctx.spec, &ctx.plan, &ctx.tols)?;
            emit(&common, &report::render(&report, common.format.into(), !common.no_timestamp))?;
            Ok(exit_code(report.overall))
        }
        Command::Brickell { common } => {
            let ctx = RunContext::prepare(&common)?;
            let report = verify::brickell_suite(&ctx.spec, &ctx.plan, &ctx.tols)?;
            emit(&common, &report::render(&report, common.format.into(), !common.no_timestamp))?;
            Ok(exit_code(report.overall))
        }
        Command::Parallel { common, b } => {
            let ctx = RunContext::prepare(&common)?;
            let b = DVector::from_column_slice(&b);
            let report = verify::parallel_vector_suite(&ctx.spec, &b, &ctx.plan, &ctx.tols)?;
            emit(&common, &report::render(&report, common.format.into(), !common.no_timestamp))?;
            Ok(exit_code(report.overall))
        }
        Command::Theorem1 { common, surface } => {
            let ctx = RunContext::prepare(&common)?;
            let surface = crate::hypersurfaces::parse_surface_file(&surface)?;
            let report = verify::theorem1_suite(&ctx.spec, &surface, &ctx.plan, &ctx.tols)?;
            emit(&common, &report::render(&report, common.format.into(), !common.no_timestamp))?;
            Ok(exit_code(report.overall))
        }
        Command::All { common, surface, b, r } => all_command(&common, surface, b, &r),
    }
}

fn all_command(
    common: &CommonArgs,
    surface: Option<PathBuf>,
    b: Option<Vec<f64>>,
    r: &[f64],
) -> Result<i32> {
    let ctx = RunContext::prepare(common)?;
    let n = ctx.spec.dim();
    let surface = match &surface {
        Some(path) => crate::hypersurfaces::parse_surface_file(path)?,
        None => SurfaceSpec::level_set(1.0)?,
    };
    let b = match b {
        Some(v) => DVector::from_column_slice(&v),
        None => {
            let mut e1 = DVector::zeros(n);
            e1[0] = 1.0;
            e1
        }
    };

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    let skip = |suite: &str, reason: &str| SkippedSuite {
        suite: suite.to_string(),
        reason: reason.to_string(),
    };

    reports.push(verify::axioms_suite(&ctx.spec, &ctx.plan, &ctx.tols)?);
    reports.push(verify::flatness_scan(&ctx.spec, &ctx.plan, &ctx.tols)?);
    if n >= 3 {
        reports.push(verify::theorem3_suite(&ctx.spec, r, &ctx.plan, &ctx.tols)?);
    } else {
        skipped.push(skip("theorem3", "norm-sphere sectional checks need n >= 3"));
    }
    reports.push(verify::deicke_suite(&ctx.spec, &ctx.plan, &ctx.tols)?);
    if n >= 3 {
        reports.push(verify::brickell_suite(&ctx.spec, &ctx.plan, &ctx.tols)?);
    } else {
        skipped.push(skip("brickell", "the symmetric-flat rigidity is stated for n >= 3"));
    }
    if n >= 3 {
        reports.push(verify::parallel_vector_suite(&ctx.spec, &b, &ctx.plan, &ctx.tols)?);
    } else {
        skipped.push(skip("parallel", "the parallel-vector rigidity is stated for n >= 3"));
    }
    reports.push(verify::theorem1_suite(&ctx.spec, &surface, &ctx.plan, &ctx.tols)?);

    let text = report::render_all(&reports, &skipped, common.format.into(), !common.no_timestamp);
    emit(common, &text)?;
    Ok(exit_code(reports.iter().all(|r| r.overall)))
}

fn tensors_command(common: &CommonArgs, at: &[f64]) -> Result<i32> {
    let ctx = RunContext::prepare(common)?;
    let y = DVector::from_column_slice(at);
    let geom = PointGeometry::at(&ctx.spec, &y)?;
    let residual = torsion_scaling_residual(&geom);
    let check = CheckRecord::asserted(
        "torsion_scaling_residual",
        residual,
        ctx.tols.get("tol_torsion_scaling"),
    );
    let pass = check.verdict == Verdict::Pass;
    let text = match common.format {
        FormatArg::Json => tensors_json(&ctx.spec, &geom, &check, !common.no_timestamp),
        FormatArg::Csv => tensors_csv(&geom, &check),
        FormatArg::Text => tensors_text(&ctx.spec, &geom, &check, !common.no_timestamp),
    };
    emit(common, &text)?;
    Ok(exit_code(pass))
}

fn json_vector(v: &DVector<f64>) -> String {
    let cells: Vec<String> = v.iter().map(|x| fmt_float(*x)).collect();
    format!("[{}]", cells.join(", "))
}

fn json_matrix(m: &nalgebra::DMatrix<f64>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..m.ncols()).map(|j| fmt_float(m[(i, j)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn json_tensor3(t: &Tensor3) -> String {
    let n = t.dim();
    let blocks: Vec<String> = (0..n)
        .map(|i| {
            let rows: Vec<String> = (0..n)
                .map(|j| {
                    let cells: Vec<String> = (0..n).map(|k| fmt_float(t[(i, j, k)])).collect();
                    format!("[{}]", cells.join(", "))
                })
                .collect();
            format!("[{}]", rows.join(", "))
        })
        .collect();
    format!("[{}]", blocks.join(", "))
}

fn json_tensor4(t: &Tensor4) -> String {
    let n = t.dim();
    let blocks: Vec<String> = (0..n)
        .map(|i| {
            let inner: Vec<String> = (0..n)
                .map(|j| {
                    let rows: Vec<String> = (0..n)
                        .map(|k| {
                            let cells: Vec<String> =
                                (0..n).map(|l| fmt_float(t[(i, j, k, l)])).collect();
                            format!("[{}]", cells.join(", "))
                        })
                        .collect();
                    format!("[{}]", rows.join(", "))
                })
                .collect();
            format!("[{}]", inner.join(", "))
        })
        .collect();
    format!("[{}]", blocks.join(", "))
}

fn tensors_json(
    spec: &NormSpec,
    geom: &PointGeometry,
    check: &CheckRecord,
    timestamp: bool,
) -> String {
    let mut body = format!(
        "\"command\": \"tensors\", \"spec\": {{\"norm\": \"{}\", \"dim\": {}}}, \
         \"point\": {}, \"norm_value\": {}, \"metric\": {}, \"cartan_low\": {}, \
         \"mean_cartan\": {}, \"christoffel\": {}, \"curvature\": {}, \
         \"curvature_route\": \"{}\", \"checks\": [{{\"name\": \"{}\", \"residual\": {}, \
         \"tolerance\": {}, \"verdict\": \"{}\"}}], \"overall\": {}",
        json_escape(&spec.to_string()),
        spec.dim(),
        json_vector(&geom.metric.point),
        fmt_float(geom.metric.norm_value),
        json_matrix(&geom.metric.g),
        json_tensor3(&geom.cartan.c_low),
        json_vector(&geom.cartan.a_mean),
        json_tensor3(&geom.christoffel),
        json_tensor4(&geom.curvature.r),
        geom.curvature.route.as_str(),
        json_escape(&check.name),
        fmt_float(check.residual),
        check.tolerance.map_or("null".to_string(), fmt_float),
        check.verdict.as_str(),
        check.verdict == Verdict::Pass
    );
    if timestamp {
        body.push_str(&format!(
            ", \"timestamp\": \"{}\"",
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        ));
    }
    format!("{{{body}}}\n")
}

fn tensors_csv(geom: &PointGeometry, check: &CheckRecord) -> String {
    let n = geom.dim();
    let mut out = String::from("name,i,j,k,l,value\n");
    out.push_str(&format!("norm_value,,,,,{}\n", fmt_float(geom.metric.norm_value)));
    for i in 0..n {
        for j in 0..n {
            out.push_str(&format!("g,{i},{j},,,{}\n", fmt_float(geom.metric.g[(i, j)])));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push_str(&format!(
                    "cartan_low,{i},{j},{k},,{}\n",
                    fmt_float(geom.cartan.c_low[(i, j, k)])
                ));
            }
        }
    }
    for i in 0..n {
        out.push_str(&format!("mean_cartan,{i},,,,{}\n", fmt_float(geom.cartan.a_mean[i])));
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push_str(&format!(
                    "christoffel,{i},{j},{k},,{}\n",
                    fmt_float(geom.christoffel[(i, j, k)])
                ));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out.push_str(&format!(
                        "curvature,{i},{j},{k},{l},{}\n",
                        fmt_float(geom.curvature.r[(i, j, k, l)])
                    ));
                }
            }
        }
    }
    out.push_str(&format!("{},,,,,{}\n", check.name, fmt_float(check.residual)));
    out
}

fn text_matrix(out: &mut String, m: &nalgebra::DMatrix<f64>) {
    for i in 0..m.nrows() {
        let cells: Vec<String> = (0..m.ncols()).map(|j| fmt_float(m[(i, j)])).collect();
        out.push_str(&format!("  [{}]\n", cells.join(", ")));
    }
}

fn text_tensor3(out: &mut String, label: &str, t: &Tensor3) {
    let n = t.dim();
    for i in 0..n {
        out.push_str(&format!("{label}[{i}] (rows j, cols k):\n"));
        for j in 0..n {
            let cells: Vec<String> = (0..n).map(|k| fmt_float(t[(i, j, k)])).collect();
            out.push_str(&format!("  [{}]\n", cells.join(", ")));
        }
    }
}

fn tensors_text(
    spec: &NormSpec,
    geom: &PointGeometry,
    check: &CheckRecord,
    timestamp: bool,
) -> String {
    let n = geom.dim();
    let mut out = String::new();
    if timestamp {
        out.push_str(&format!(
            "# {}\n",
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        ));
    }
    let coords: Vec<String> = geom.metric.point.iter().map(|x| x.to_string()).collect();
    out.push_str(&format!("tensors at ({}) for {spec}\n", coords.join(", ")));
    out.push_str(&format!("F = {}\n", fmt_float(geom.metric.norm_value)));
    out.push_str("metric g (rows i, cols j):\n");
    text_matrix(&mut out, &geom.metric.g);
    text_tensor3(&mut out, "cartan C", &geom.cartan.c_low);
    let cells: Vec<String> = geom.cartan.a_mean.iter().map(|x| fmt_float(*x)).collect();
    out.push_str(&format!("mean cartan A:\n  [{}]\n", cells.join(", ")));
    text_tensor3(&mut out, "christoffel gamma", &geom.christoffel);
    out.push_str(&format!("curvature R (route {}):\n", geom.curvature.route.as_str()));
    for i in 0..n {
        for j in 0..n {
            out.push_str(&format!("R[{i}][{j}] (rows k, cols l):\n"));
            for k in 0..n {
                let cells: Vec<String> =
                    (0..n).map(|l| fmt_float(geom.curvature.r[(i, j, k, l)])).collect();
                out.push_str(&format!("  [{}]\n", cells.join(", ")));
            }
        }
    }
    let verdict = if check.verdict == Verdict::Pass { "pass" } else { "FAIL" };
    out.push_str(&format!(
        "{} = {} (tolerance {}): {verdict}\n",
        check.name,
        fmt_float(check.residual),
        check.tolerance.map_or("—".to_string(), fmt_float)
    ));
    out
}
