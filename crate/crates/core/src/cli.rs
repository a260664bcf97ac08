//! The `kgeom` command line.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 I/O failure,
//! 4 numerical failure, 5 failed experiment check.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cloud::PointCloud;
use crate::contour::{extract_level_curves, sample_grid, BoundingBox};
use crate::error::Error;
use crate::experiments::{run_experiment, ExperimentName, Overrides};
use crate::geometry::{curvatures, level_stats, signature_model, DEFAULT_TAU_GRAD};
use crate::interpolant::{deserialize, fit, serialize, Model};
use crate::io::{format_cloud, format_operator, format_values, parse_cloud, parse_points, parse_values};
use crate::kernels::KernelSpec;
use crate::surface_ops::{apply_operator, assemble_operator_with_signature, surface_gradient, OperatorKind};
use crate::testbeds::{
    curve_sample, ellipsoid_sample, fibonacci_ellipsoid, fibonacci_sphere, fibonacci_torus, perturb,
    quadratic_patch_grid, quadratic_patch_random, random_sphere, square_with_corner_removed, torus_rejection_sample,
    AnalyticSurface, CurveSampling, SurfaceDescriptor,
};

#[derive(Debug, Parser)]
#[command(name = "kgeom", version, about = "Kernel-based geometry of point clouds")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Kernel: `gauss[:l=<l>]`, `laplace` or `laplace:eps=<eps>`.
    #[arg(long, global = true)]
    kernel: Option<String>,
    /// Regression weight; 0 interpolates.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Gradient norm below which a point counts as degenerate.
    #[arg(long, global = true)]
    tau_grad: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample an analytic surface or curve.
    Sample {
        /// Surface descriptor such as `sphere:r=1` or `torus:R1=2,R2=0.5`.
        surface: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum)]
        sampler: Option<Sampler>,
        /// Total count for `--sampler subset`.
        #[arg(long)]
        of: Option<usize>,
        /// Move each point by a random vector of length at most this.
        #[arg(long)]
        perturb: Option<f64>,
    },
    /// Fit a kernel model to values on a cloud.
    Fit {
        cloud: PathBuf,
        /// Fit the constant 1 (the signature function).
        #[arg(long, conflicts_with = "values")]
        ones: bool,
        /// Values file; defaults to the `y` column of the cloud file.
        #[arg(long)]
        values: Option<PathBuf>,
    },
    /// Normals and curvatures of a signature model at query points.
    Geometry { model: PathBuf, points: PathBuf },
    /// Surface gradient or Laplace-Beltrami of data on a cloud.
    Operator {
        cloud: PathBuf,
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long)]
        ones: bool,
        /// Evaluation points.
        #[arg(long)]
        eval: PathBuf,
        /// `lb`, `grad` (all components) or `grad:<i>` (1-based).
        #[arg(long, default_value = "lb")]
        kind: String,
        /// Evaluate the operator at the points (default).
        #[arg(long, conflicts_with = "assemble")]
        apply: bool,
        /// Write the dense matrix instead.
        #[arg(long)]
        assemble: bool,
        /// Kernel of the signature function; defaults to `--kernel`.
        #[arg(long)]
        sig_kernel: Option<String>,
    },
    /// Grid export and level curves of a model.
    Contour {
        model: PathBuf,
        /// `min1,max1,min2,max2,...`; defaults to the centers' box grown by 25% per side.
        #[arg(long)]
        bbox: Option<String>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// A number, or `mean` for the mean of the model over its centers.
        #[arg(long, default_value = "1")]
        level: String,
        /// Level curves as CSV (planar models only).
        #[arg(long)]
        polylines: Option<PathBuf>,
    },
    /// Run a scripted experiment, or `all`.
    Experiment {
        name: String,
        #[arg(long)]
        m: Option<usize>,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sampler {
    Fibonacci,
    Random,
    Rejection,
    Grid,
    Equispaced,
    Subset,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IllConditioned { .. }
            | Error::DegenerateGradient { .. }
            | Error::DegenerateAt { .. }
            | Error::NonDifferentiableKernel { .. } => 4,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError { code: 3, message: format!("{}: {e}", path.display()) })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError { code: 3, message: format!("{}: {e}", path.display()) })
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(p) => write_file(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError { code: 3, message: format!("stdout: {e}") }),
    }
}

fn parse_kernel(text: Option<&str>) -> CliResult<KernelSpec> {
    text.map_or(Ok(KernelSpec::default()), |t| t.parse().map_err(CliError::from))
}

fn read_model(path: &Path) -> CliResult<Model> {
    Ok(deserialize(&read(path)?)?)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let g = &cli.global;
    let out = g.out.as_deref();
    let tau = g.tau_grad.unwrap_or(DEFAULT_TAU_GRAD);
    if !(tau >= 0.0) {
        return Err(CliError::usage("--tau-grad must be nonnegative"));
    }
    match &cli.command {
        Command::Sample { surface, m, sampler, of, perturb: noise } => {
            let desc: SurfaceDescriptor = surface.parse()?;
            let mut cloud = sample(&desc, *m, *sampler, *of, g.seed.unwrap_or(0))?;
            if let Some(r) = noise {
                cloud = perturb(&cloud, *r, g.seed.unwrap_or(0).wrapping_add(1))?;
            }
            emit(out, &format_cloud(&cloud, None)?, stdout)
        }
        Command::Fit { cloud, ones, values } => {
            let spec = parse_kernel(g.kernel.as_deref())?;
            let alpha = g.alpha.unwrap_or(0.0);
            let table = parse_cloud(&read(cloud)?)?;
            let y = match (ones, values) {
                (true, _) => vec![1.0; table.points.len()],
                (false, Some(p)) => parse_values(&read(p)?)?,
                (false, None) => table
                    .values
                    .clone()
                    .ok_or_else(|| CliError::usage("no values: pass --ones, --values or a cloud with a `y` column"))?,
            };
            let (model, report) = fit(&spec, &table.points, &y, alpha)?;
            let _ = writeln!(
                stderr,
                "kernel={spec} alpha={alpha} m={} residual={:e} jitter={:e} attempts={}",
                table.points.len(),
                report.residual_norm,
                report.jitter_added,
                report.cholesky_attempts
            );
            if *ones {
                let s = level_stats(&model, &table.points)?;
                let _ = writeln!(
                    stderr,
                    "mean_level={} min_level={} max_level={} residual_rms={:e}",
                    s.mean_level, s.min_level, s.max_level, s.residual_rms
                );
            }
            emit(out, &serialize(&model), stdout)
        }
        Command::Geometry { model, points } => {
            let model = read_model(model)?;
            let pts = parse_points(&read(points)?)?;
            if pts.dim() != model.dim() {
                return Err(Error::DimensionMismatch { expected: model.dim(), got: pts.dim() }.into());
            }
            emit(out, &geometry_table(&model, &pts, tau)?, stdout)
        }
        Command::Operator { cloud, values, ones, eval, kind, apply: _, assemble, sig_kernel } => {
            let spec = parse_kernel(g.kernel.as_deref())?;
            let sig_spec = match sig_kernel {
                Some(k) => parse_kernel(Some(k))?,
                None => spec,
            };
            let alpha = g.alpha.unwrap_or(0.0);
            let table = parse_cloud(&read(cloud)?)?;
            let pts = parse_points(&read(eval)?)?;
            let d = table.points.dim();
            if pts.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: pts.dim() }.into());
            }
            let kinds = parse_kind(kind, d)?;
            let (sig, _) = signature_model(&sig_spec, &table.points, alpha)?;
            if *assemble {
                let [k] = kinds.as_slice() else {
                    return Err(CliError::usage("--assemble needs a single operator: use `lb` or `grad:<i>`"));
                };
                let op = assemble_operator_with_signature(&sig, &spec, &table.points, alpha, &pts, *k, tau)?;
                return emit(out, &format_operator(&op), stdout);
            }
            let y = match (ones, values) {
                (true, _) => vec![1.0; table.points.len()],
                (false, Some(p)) => parse_values(&read(p)?)?,
                (false, None) => table
                    .values
                    .clone()
                    .ok_or_else(|| CliError::usage("no values: pass --ones, --values or a cloud with a `y` column"))?,
            };
            let (f, _) = fit(&spec, &table.points, &y, alpha)?;
            emit(out, &operator_values(&sig, &f, &pts, &kinds, tau)?, stdout)
        }
        Command::Contour { model, bbox, resolution, level, polylines } => {
            let model = read_model(model)?;
            let bbox = match bbox {
                Some(b) => b.parse::<BoundingBox>()?,
                None => BoundingBox::around(model.centers(), 0.25)?,
            };
            if bbox.dim() != model.dim() {
                return Err(CliError::usage(format!(
                    "box has dimension {}, model has dimension {}",
                    bbox.dim(),
                    model.dim()
                )));
            }
            let level = match level.as_str() {
                "mean" => level_stats(&model, model.centers())?.mean_level,
                v => v
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("level `{v}` is neither a number nor `mean`")))?,
            };
            let grid = sample_grid(&model, &bbox, *resolution)?;
            if let Some(path) = polylines {
                if model.dim() != 2 {
                    return Err(CliError::usage("level curves need a planar model"));
                }
                let curves = extract_level_curves(&grid, level)?;
                let mut text = format!("# level={level:?} curves={}\ncurve,x1,x2\n", curves.len());
                for (i, c) in curves.iter().enumerate() {
                    for p in &c.points {
                        let _ = writeln!(text, "{i},{:?},{:?}", p[0], p[1]);
                    }
                }
                write_file(path, &text)?;
                let closed = curves.iter().filter(|c| c.is_closed()).count();
                let _ = writeln!(stderr, "level={level} curves={} closed={closed}", curves.len());
            }
            emit(out, &grid.to_csv(), stdout)
        }
        Command::Experiment { name, m, csv } => {
            let names: Vec<ExperimentName> =
                if name == "all" { ExperimentName::ALL.to_vec() } else { vec![name.parse()?] };
            let ov = Overrides {
                kernel: g.kernel.as_deref().map(str::parse).transpose()?,
                alpha: g.alpha,
                m: *m,
                seed: g.seed,
                tau_grad: g.tau_grad,
            };
            let mut md = String::new();
            let mut rows = String::new();
            let mut failed = Vec::new();
            for n in names {
                let rep = run_experiment(n, &ov)?;
                md.push_str(&rep.to_markdown());
                md.push('\n');
                let body = rep.to_csv();
                if rows.is_empty() {
                    rows.push_str(&body);
                } else {
                    rows.extend(body.lines().skip(1).map(|l| format!("{l}\n")));
                }
                if !rep.passed() {
                    failed.push(n.as_str());
                }
            }
            emit(out, &md, stdout)?;
            if let Some(p) = csv {
                write_file(p, &rows)?;
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError { code: 5, message: format!("checks failed in: {}", failed.join(", ")) })
            }
        }
    }
}

fn sample(
    desc: &SurfaceDescriptor,
    m: Option<usize>,
    sampler: Option<Sampler>,
    of: Option<usize>,
    seed: u64,
) -> CliResult<PointCloud> {
    use AnalyticSurface as S;
    let s = &desc.surface;
    let count = || m.ok_or_else(|| CliError::usage("--m is required for this sampler"));
    let bad = |which: Sampler| {
        let name = which.to_possible_value().map_or(String::new(), |v| v.get_name().to_string());
        CliError::usage(format!("sampler `{name}` does not apply to this surface"))
    };
    let cloud = match (s, sampler) {
        (S::Sphere { r }, None | Some(Sampler::Fibonacci)) => scale(fibonacci_sphere(count()?)?, *r)?,
        (S::Sphere { r }, Some(Sampler::Random)) => scale(random_sphere(count()?, seed)?, *r)?,
        (S::Torus { r1, r2 }, None | Some(Sampler::Fibonacci)) => fibonacci_torus(count()?, *r1, *r2)?,
        (S::Torus { r1, r2 }, Some(Sampler::Rejection)) => torus_rejection_sample(count()?, *r1, *r2, seed)?,
        (S::Ellipsoid { a, b, c }, None | Some(Sampler::Fibonacci)) => fibonacci_ellipsoid(count()?, *a, *b, *c)?,
        (S::Ellipsoid { a, b, c }, Some(Sampler::Random)) => ellipsoid_sample(count()?, *a, *b, *c, seed)?,
        (S::QuadraticPatch { a, b, half_extent }, None | Some(Sampler::Grid)) => {
            quadratic_patch_grid(*a, *b, *half_extent, desc.grid_n.unwrap_or(16))?
        }
        (S::QuadraticPatch { a, b, half_extent }, Some(Sampler::Random)) => {
            quadratic_patch_random(*a, *b, *half_extent, count()?, seed)?
        }
        (S::Square { side }, None | Some(Sampler::Equispaced)) if desc.corner_cut.is_some() => {
            square_with_corner_removed(*side, count()?, desc.corner_cut.unwrap())?
        }
        (
            S::Ellipse { .. } | S::SemiEllipse { .. } | S::CubicClosedCurve | S::Triangle { .. } | S::Square { .. },
            None | Some(Sampler::Equispaced),
        ) => curve_sample(s, count()?, CurveSampling::Equispaced)?,
        (
            S::Ellipse { .. } | S::SemiEllipse { .. } | S::CubicClosedCurve | S::Triangle { .. } | S::Square { .. },
            Some(Sampler::Subset),
        ) => {
            let of = of.ok_or_else(|| CliError::usage("--sampler subset needs --of <total>"))?;
            curve_sample(s, count()?, CurveSampling::Subset { of })?
        }
        (_, Some(which)) => return Err(bad(which)),
    };
    Ok(cloud)
}

fn scale(cloud: PointCloud, r: f64) -> CliResult<PointCloud> {
    if r == 1.0 {
        return Ok(cloud);
    }
    Ok(cloud.map_points(|p| p.iter().map(|v| r * v).collect())?)
}

fn parse_kind(kind: &str, d: usize) -> CliResult<Vec<OperatorKind>> {
    match kind {
        "lb" => Ok(vec![OperatorKind::LaplaceBeltrami]),
        "grad" => Ok((0..d).map(OperatorKind::SurfaceGradientComponent).collect()),
        other => {
            let i = other
                .strip_prefix("grad:")
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|i| (1..=d).contains(i))
                .ok_or_else(|| {
                CliError::usage(format!("unknown operator `{other}`; expected lb, grad or grad:1..grad:{d}"))
            })?;
            Ok(vec![OperatorKind::SurfaceGradientComponent(i - 1)])
        }
    }
}

fn operator_values(sig: &Model, f: &Model, pts: &PointCloud, kinds: &[OperatorKind], tau: f64) -> CliResult<String> {
    if let [OperatorKind::LaplaceBeltrami] = kinds {
        return Ok(format_values(&apply_operator(sig, f, pts, kinds[0], tau)?));
    }
    let header: Vec<String> = kinds
        .iter()
        .map(|k| match k {
            OperatorKind::SurfaceGradientComponent(i) => format!("g{}", i + 1),
            OperatorKind::LaplaceBeltrami => "lb".into(),
        })
        .collect();
    let mut text = header.join(",") + "\n";
    for (r, x) in pts.iter().enumerate() {
        let g = surface_gradient(sig, f, x, tau).map_err(|e| match e {
            Error::DegenerateGradient { grad_norm, .. } => Error::DegenerateAt { index: r, grad_norm },
            e => e,
        })?;
        let row: Vec<String> = kinds
            .iter()
            .map(|k| match k {
                OperatorKind::SurfaceGradientComponent(i) => format!("{:?}", g[*i]),
                OperatorKind::LaplaceBeltrami => unreachable!(),
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    Ok(text)
}

fn geometry_table(model: &Model, pts: &PointCloud, tau: f64) -> CliResult<String> {
    let d = model.dim();
    let mut cols = vec!["index".to_string(), "status".to_string()];
    cols.extend((1..=d).map(|i| format!("nu{i}")));
    cols.push("grad_norm".into());
    cols.extend((1..d).map(|i| format!("kappa{i}")));
    cols.push("mean_curvature".into());
    cols.push("gauss_curvature".into());
    let mut text = cols.join(",") + "\n";
    for (i, x) in pts.iter().enumerate() {
        match curvatures(model, x, tau) {
            Ok(f) => {
                let mut row = vec![i.to_string(), "OK".to_string()];
                row.extend(f.normal.iter().map(|v| format!("{v:?}")));
                row.push(format!("{:?}", f.grad_norm));
                row.extend(f.principal_curvatures.iter().map(|v| format!("{v:?}")));
                row.push(format!("{:?}", f.mean_curvature));
                row.push(format!("{:?}", f.gauss_curvature));
                text.push_str(&row.join(","));
            }
            Err(Error::DegenerateGradient { grad_norm, .. }) => {
                let mut row = vec![i.to_string(), "DEGENERATE".to_string()];
                row.extend((0..d).map(|_| String::new()));
                row.push(format!("{grad_norm:?}"));
                row.extend((0..d + 1).map(|_| String::new()));
                text.push_str(&row.join(","));
            }
            Err(e) => return Err(e.into()),
        }
        text.push('\n');
    }
    Ok(text)
}
