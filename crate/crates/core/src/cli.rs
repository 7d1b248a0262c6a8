//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check misses its tolerance,
//! 2 on usage or configuration errors. `CO1_THREADS` caps the worker pool.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::co1::{
    canonical_structure_at, direct_structure_value, shape_operator_along_geodesic, structure_at, verify_co1, Slot,
};
use crate::decomp::{classify, submodule_dims, validate_within, CLASSIFY_TOL};
use crate::fd::FdSteps;
use crate::geometry::Point;
use crate::registry::{build_example, BuiltExample, ExampleName, ExampleParams, Fiber, WarpSpec};
use crate::report::{
    canonical_report_text, dims_report_text, point_report_text, to_json, CanonicalReport, CanonicalSample,
    DimsReport, PointJson, PointReport, Sci,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "co1as", version, about = "Verify and classify cohomogeneity-one structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structure equations at sample points.
    Verify(PointArgs),
    /// Report the norms of all ten submodule projections.
    Decompose(PointArgs),
    /// List the submodules present and compare with the registry fingerprint.
    Classify(PointArgs),
    /// Dimensions of the submodules.
    Dims {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the Killing-data structure with the direct one along the normal geodesic.
    Canonical(CanonicalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExampleArgs {
    /// One of parallel_hyperplanes, concentric_spheres, horospheres, linear_type_hyperbolic, warped_generic.
    pub example: String,
    /// Dimension of the leaves.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = FdSteps::default().first)]
    pub fd_step: f64,
    #[arg(long, default_value_t = FdSteps::default().nested)]
    pub fd_nested_step: f64,
    /// Ignore closed-form derivatives and use differences throughout.
    #[arg(long)]
    pub fd_only: bool,
    /// Warping function for warped_generic: exp:K, cosh, const:C or linear:A,B.
    #[arg(long)]
    pub warp: Option<String>,
    /// Fiber for warped_generic: flat or sphere.
    #[arg(long)]
    pub fiber: Option<String>,
    /// Lower end of the radial (or t) range.
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub example: ExampleArgs,
    /// Number of sampled points.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Explicit point as comma-separated coordinates; repeatable, overrides sampling.
    #[arg(long = "point", value_delimiter = ';')]
    pub point: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CanonicalArgs {
    #[command(flatten)]
    pub example: ExampleArgs,
    /// Number of geodesic times, evenly spaced.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
}

/// Outcome of a command: rendered report and whether its checks passed.
struct Rendered {
    body: String,
    pass: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok((rendered, output)) => {
            let written = match output {
                Some(path) => fs::write(&path, &rendered.body).map_err(Error::from),
                None => stdout.write_all(rendered.body.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
            if rendered.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CO1_THREADS") {
        let threads = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::Config(format!("CO1_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn execute(cli: &Cli) -> Result<(Rendered, Option<PathBuf>)> {
    let pool = thread_pool()?;
    pool.install(|| match &cli.command {
        Command::Verify(a) => Ok((verify(a)?, a.example.output.output.clone())),
        Command::Decompose(a) => Ok((decompose(a, true)?, a.example.output.output.clone())),
        Command::Classify(a) => Ok((decompose(a, false)?, a.example.output.output.clone())),
        Command::Dims { n, output } => {
            let report = DimsReport::new(&submodule_dims(*n)?);
            let body = match output.format {
                Format::Json => to_json(&report)?,
                Format::Text => dims_report_text(&report),
            };
            Ok((Rendered { body, pass: true }, output.output.clone()))
        }
        Command::Canonical(a) => Ok((canonical(a)?, a.example.output.output.clone())),
    })
}

fn build(a: &ExampleArgs) -> Result<BuiltExample> {
    if !(a.tol > 0.0) {
        return Err(Error::Config(format!("--tol must be positive, got {}", a.tol)));
    }
    let name: ExampleName = a.example.parse()?;
    let mut params = ExampleParams {
        analytic: !a.fd_only,
        fd: FdSteps {
            first: a.fd_step,
            nested: a.fd_nested_step,
        },
        ..ExampleParams::default()
    };
    if let Some(w) = &a.warp {
        params.warp = w.parse::<WarpSpec>()?;
    }
    if let Some(f) = &a.fiber {
        params.fiber = f.parse::<Fiber>()?;
    }
    match (a.r_min, a.r_max) {
        (None, None) => {}
        (Some(lo), Some(hi)) => params.range = Some((lo, hi)),
        _ => return Err(Error::Config("--r-min and --r-max must be given together".into())),
    }
    if name != ExampleName::WarpedGeneric && (a.warp.is_some() || a.fiber.is_some()) {
        return Err(Error::Config(format!("--warp and --fiber only apply to warped_generic, not {name}")));
    }
    build_example(name, a.n, &params)
}

fn points(a: &PointArgs, ex: &BuiltExample) -> Result<Vec<Point>> {
    if a.point.is_empty() {
        if a.points == 0 {
            return Err(Error::Config("--points must be at least 1".into()));
        }
        return ex.sample_points(a.points, a.seed);
    }
    let dim = ex.setup.chart().dim();
    a.point
        .iter()
        .map(|s| {
            let coords = s
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("cannot parse point {s:?}: {e}")))?;
            if coords.len() != dim {
                return Err(Error::Config(format!(
                    "point {s:?} has {} coordinates, the chart of {} has {dim}",
                    coords.len(),
                    ex.entry.name
                )));
            }
            ex.setup.chart().point(coords)
        })
        .collect()
}

fn render_points(report: &PointReport, format: Format) -> Result<Rendered> {
    let body = match format {
        Format::Json => to_json(report)?,
        Format::Text => point_report_text(report),
    };
    Ok(Rendered { body, pass: report.pass })
}

fn verify(a: &PointArgs) -> Result<Rendered> {
    let ex = build(&a.example)?;
    let pts = points(a, &ex)?;
    let v = verify_co1(&ex.setup, &pts, a.example.tol)?;
    let report = PointReport {
        command: "verify".into(),
        example: ex.entry.name.to_string(),
        n: ex.n,
        tolerance: Sci(a.example.tol),
        points: v.points.iter().map(|p| PointJson::verified(&p.coords, &p.residuals)).collect(),
        pass: v.pass,
    };
    render_points(&report, a.example.output.format)
}

fn decompose(a: &PointArgs, all: bool) -> Result<Rendered> {
    let ex = build(&a.example)?;
    let pts = points(a, &ex)?;
    let tol = a.example.tol;
    let mut records = Vec::with_capacity(pts.len());
    let mut pass = true;
    for p in &pts {
        // difference-quotient structures carry noise well below tol; snap them onto S(V)
        let raw = structure_at(&ex.setup, p)?;
        validate_within(&raw, tol.max(1e-10))?;
        let s = raw.project_to_membership();
        let report = classify(&s, CLASSIFY_TOL)?;
        pass &= if all {
            let total: f64 = report.components.iter().map(|c| c.norm * c.norm).sum();
            (total - report.norm * report.norm).abs() <= 1e-10 * report.norm.powi(2).max(1.0)
        } else {
            ex.fingerprint_matches(p, &report, tol)
        };
        records.push(PointJson::classified(p, &report, all));
    }
    let report = PointReport {
        command: if all { "decompose" } else { "classify" }.into(),
        example: ex.entry.name.to_string(),
        n: ex.n,
        tolerance: Sci(tol),
        points: records,
        pass,
    };
    render_points(&report, a.example.output.format)
}

fn canonical(a: &CanonicalArgs) -> Result<Rendered> {
    let ex = build(&a.example)?;
    let killing = ex
        .killing
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} has no Killing data", ex.entry.name)))?;
    if a.samples == 0 {
        return Err(Error::Config("--samples must be at least 1".into()));
    }
    let (lo, hi) = default_time_range(&ex);
    let (lo, hi) = (a.t_min.unwrap_or(lo), a.t_max.unwrap_or(hi));
    if lo > hi {
        return Err(Error::Config(format!("empty time range [{lo}, {hi}]")));
    }
    let times: Vec<f64> = if a.samples == 1 {
        vec![lo]
    } else {
        (0..a.samples)
            .map(|i| lo + (hi - lo) * i as f64 / (a.samples - 1) as f64)
            .collect()
    };
    let tol = a.example.tol;
    let basis = Slot::basis(killing.len());
    let shapes = shape_operator_along_geodesic(&ex.setup, killing, &times)?;
    let mut samples = Vec::with_capacity(times.len());
    let mut pass = true;
    for (&t, shape) in times.iter().zip(&shapes) {
        let mut worst = 0.0_f64;
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let c = canonical_structure_at(&ex.setup, killing, t, *x, *y, *z)?;
                    let d = direct_structure_value(&ex.setup, killing, t, *x, *y, *z)?;
                    worst = worst.max((c - d).abs());
                }
            }
        }
        let expected = ex.trace_parameter(&killing.geodesic(t));
        let eig_ok = shape.eigenvalues.iter().all(|e| (e - expected).abs() <= tol.max(1e-5));
        pass &= worst <= tol && eig_ok;
        samples.push(CanonicalSample {
            t: Sci(t),
            max_difference: Sci(worst),
            shape_eigenvalues: shape.eigenvalues.iter().copied().map(Sci).collect(),
            expected_eigenvalue: Sci(expected),
        });
    }
    let report = CanonicalReport {
        command: "canonical".into(),
        example: ex.entry.name.to_string(),
        n: ex.n,
        tolerance: Sci(tol),
        samples,
        pass,
    };
    let body = match a.example.output.format {
        Format::Json => to_json(&report)?,
        Format::Text => canonical_report_text(&report),
    };
    Ok(Rendered { body, pass })
}

/// Geodesic times that keep `γ(t)` well inside the chart.
fn default_time_range(ex: &BuiltExample) -> (f64, f64) {
    let chart = ex.setup.chart();
    let Some(k) = &ex.killing else { return (0.0, 0.0) };
    let start = k.geodesic(0.0);
    let axis = (0..start.len())
        .find(|&i| k.geodesic(1.0)[i] != start[i])
        .unwrap_or(0);
    let room = 0.05 * (chart.upper()[axis] - chart.lower()[axis]);
    (chart.lower()[axis] + room - start[axis], chart.upper()[axis] - room - start[axis])
}
