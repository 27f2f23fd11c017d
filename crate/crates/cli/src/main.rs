//! `he`: command-line front end for Hilbert-geometry computations.
//!
//! Results go to stdout as JSON (CSV for growth series). Exit codes: 0 ok,
//! 1 a check failed, 2 invalid input, 3 numerical failure.

mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hilbert_core::areas::{area, AreaKind};
use hilbert_core::busemann::busemann_density;
use hilbert_core::geometry::{make_body, make_nonint_example, Body, BodySpec, ConvexBody, Vector};
use hilbert_core::growth::{
    default_eps_grid, dim_entropy_bound, entropy_fit, growth_series_with, minkowski_dimension,
    nonint_growth_check, vertex_angles, GrowthConfig, GrowthMode, SeriesParts,
};
use hilbert_core::metric::{chord, hilbert_distance};
use hilbert_core::numerics::{linspace, logspace};
use hilbert_core::GeomError;
use serde::Serialize;
use serde_json::json;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "he", version, about = "Hilbert geometry of convex bodies")]
struct Cli {
    /// Worker threads for parallel quadratures (default: all cores).
    #[arg(long, global = true, env = "HE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a body specification.
    Body {
        #[command(subcommand)]
        action: BodyAction,
    },
    /// Hilbert distance between two interior points.
    Dist {
        #[command(flatten)]
        body: BodyArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
    },
    /// Finsler norm of a tangent vector at an interior point.
    Norm {
        #[command(flatten)]
        body: BodyArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
    },
    /// Busemann density at an interior point.
    Density {
        #[command(flatten)]
        body: BodyArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
    },
    /// Ball volumes and sphere lengths about the origin, as CSV.
    Growth {
        #[command(flatten)]
        body: BodyArg,
        #[command(flatten)]
        radii: RadiusArgs,
        #[arg(long, value_enum, default_value_t = Parts::Both)]
        parts: Parts,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Volume-entropy slope of log V or log A against r.
    Entropy {
        #[command(flatten)]
        body: BodyArg,
        #[command(flatten)]
        radii: RadiusArgs,
        #[arg(long, value_enum, default_value_t = Mode::Sphere)]
        mode: Mode,
        /// Fit window `lo,hi` (default: upper half of the radii, or the
        /// truncation-valid window for the non-integer example).
        #[arg(long, value_delimiter = ',')]
        window: Option<Vec<f64>>,
    },
    /// Centro-projective area of the boundary.
    Cparea {
        #[command(flatten)]
        body: BodyArg,
        /// Include the integrand samples.
        #[arg(long)]
        samples: bool,
    },
    /// Centro-affine area of the boundary.
    Caarea {
        #[command(flatten)]
        body: BodyArg,
        #[arg(long)]
        samples: bool,
    },
    /// Box-counting dimension of a polygon's vertex directions.
    Minkdim {
        #[command(flatten)]
        body: BodyArg,
        #[arg(long, default_value_t = 1e-4)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        eps_max: f64,
        #[arg(long, default_value_t = 20)]
        eps_count: usize,
    },
    /// Generate example bodies.
    Example {
        #[command(subcommand)]
        which: ExampleKind,
    },
    /// Run a verification suite.
    Check {
        /// One of parabola, pointwise-limit, jacobian, truncation,
        /// density-bound, coarea, invariance, schuett-werner.
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum BodyAction {
    Describe {
        #[command(flatten)]
        body: BodyArg,
    },
}

#[derive(Subcommand)]
enum ExampleKind {
    /// Polygon whose infinite limit has non-integer volume entropy.
    Nonint {
        #[arg(long, default_value_t = 3.0)]
        s: f64,
        #[arg(long, default_value_t = 2000)]
        terms: usize,
        #[arg(long, default_value_t = 0.9)]
        safety: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BodyArg {
    /// JSON body specification.
    #[arg(long = "body")]
    path: PathBuf,
}

#[derive(Args)]
struct RadiusArgs {
    #[arg(long, default_value_t = 0.5)]
    rmin: f64,
    #[arg(long, default_value_t = 8.0)]
    rmax: f64,
    #[arg(long, default_value_t = 32)]
    steps: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Parts {
    Both,
    Ball,
    Sphere,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ball,
    Sphere,
}

enum Failure {
    Validation(String),
    Numerical(String),
    /// A check ran and failed; the report is already printed.
    Check,
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Numerical(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn print_json(value: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    emit(&format!("{text}\n"))
}

/// Writes to stdout; a closed pipe ends the output quietly.
fn emit(text: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(invalid(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_spec(arg: &BodyArg) -> Result<BodySpec, Failure> {
    let text = std::fs::read_to_string(&arg.path)
        .map_err(|e| invalid(format!("{}: {e}", arg.path.display())))?;
    BodySpec::from_json(&text)
        .map_err(|e| invalid(format!("{}: {e}", arg.path.display())))
}

fn load(arg: &BodyArg) -> Result<(BodySpec, Body), Failure> {
    let spec = load_spec(arg)?;
    let body = make_body(&spec)?;
    Ok((spec, body))
}

fn point<const N: usize>(xs: &[f64], name: &str) -> Result<Vector<N>, Failure> {
    if xs.len() != N {
        return Err(invalid(format!(
            "--{name} needs {N} coordinates, got {}",
            xs.len()
        )));
    }
    Ok(Vector::<N>::from_column_slice(xs))
}

fn planar(body: &Body) -> Result<&dyn ConvexBody<2>, Failure> {
    Ok(body.planar()?.as_ref())
}

fn radii(args: &RadiusArgs) -> Result<Vec<f64>, Failure> {
    if !(args.rmin > 0.0 && args.rmin < args.rmax && args.rmax.is_finite()) || args.steps < 2 {
        return Err(invalid("need 0 < rmin < rmax and steps ≥ 2"));
    }
    Ok(linspace(args.rmin, args.rmax, args.steps))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Body {
            action: BodyAction::Describe { body },
        } => describe(&body),
        Command::Dist { body, x, y } => {
            let (_, b) = load(&body)?;
            let d = match &b {
                Body::Planar(k) => hilbert_distance(k.as_ref(), &point::<2>(&x, "x")?, &point::<2>(&y, "y")?)?,
                Body::Spatial(k) => hilbert_distance(k.as_ref(), &point::<3>(&x, "x")?, &point::<3>(&y, "y")?)?,
            };
            print_json(&json!({ "distance": d }))
        }
        Command::Norm { body, x, v } => {
            let (_, b) = load(&body)?;
            let c = match &b {
                Body::Planar(k) => chord(k.as_ref(), &point::<2>(&x, "x")?, &point::<2>(&v, "v")?)?,
                Body::Spatial(k) => chord(k.as_ref(), &point::<3>(&x, "x")?, &point::<3>(&v, "v")?)?,
            };
            print_json(&json!({ "norm": c.norm(), "t1": c.t1, "t2": c.t2 }))
        }
        Command::Density { body, x } => {
            let (_, b) = load(&body)?;
            match &b {
                Body::Planar(k) => print_json(&busemann_density(k.as_ref(), &point::<2>(&x, "x")?)?),
                Body::Spatial(k) => print_json(&busemann_density(k.as_ref(), &point::<3>(&x, "x")?)?),
            }
        }
        Command::Growth {
            body,
            radii: r,
            parts,
            out,
        } => {
            let (_, b) = load(&body)?;
            let parts = match parts {
                Parts::Both => SeriesParts::Both,
                Parts::Ball => SeriesParts::Ball,
                Parts::Sphere => SeriesParts::Sphere,
            };
            let series = growth_series_with(planar(&b)?, &radii(&r)?, parts, &GrowthConfig::default())?;
            let csv = series.to_csv();
            match out {
                Some(path) => write_text(&path, &csv),
                None => emit(&csv),
            }
        }
        Command::Entropy {
            body,
            radii: r,
            mode,
            window,
        } => entropy(&body, &r, mode, window),
        Command::Cparea { body, samples } => boundary_area(&body, AreaKind::CentroProjective, samples),
        Command::Caarea { body, samples } => boundary_area(&body, AreaKind::CentroAffine, samples),
        Command::Minkdim {
            body,
            eps_min,
            eps_max,
            eps_count,
        } => {
            let (_, b) = load(&body)?;
            let poly = planar(&b)?
                .as_polygon()
                .ok_or_else(|| invalid("minkdim needs a polygon body"))?;
            if !(eps_min > 0.0 && eps_min < eps_max) || eps_count < 4 {
                return Err(invalid("need 0 < eps-min < eps-max and eps-count ≥ 4"));
            }
            let grid = if (eps_min, eps_max, eps_count) == (1e-4, 1e-1, 20) {
                default_eps_grid()
            } else {
                logspace(eps_min, eps_max, eps_count)
            };
            let est = minkowski_dimension(&vertex_angles(poly), &grid)?;
            let bound = dim_entropy_bound(est.dimension.clamp(0.0, 1.0))?;
            print_json(&json!({ "estimate": est, "entropy_bound": bound }))
        }
        Command::Example {
            which:
                ExampleKind::Nonint {
                    s,
                    terms,
                    safety,
                    out,
                },
        } => {
            let ex = make_nonint_example(s, terms, safety)?;
            let spec = BodySpec::NonintExample { s, terms, safety };
            if let Some(path) = out {
                write_text(&path, &(spec.to_json() + "\n"))?;
            }
            print_json(&ex.summary())
        }
        Command::Check { suite, seed } => {
            let report = suites::run(&suite, seed).ok_or_else(|| {
                invalid(format!(
                    "unknown suite '{suite}'; expected one of {}",
                    suites::SUITES.join(", ")
                ))
            })??;
            print_json(&report)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn describe(arg: &BodyArg) -> Outcome {
    let (spec, body) = load(arg)?;
    let mut out = match &body {
        Body::Planar(b) => json!({
            "kind": b.kind(),
            "dimension": 2,
            "bounded": b.is_bounded(),
            "centrally_symmetric": b.is_centrally_symmetric(),
            "breakpoints": b.breakpoints().len(),
            "vertices": b.as_polygon().map(|p| p.len()),
        }),
        Body::Spatial(b) => json!({
            "kind": b.kind(),
            "dimension": 3,
            "bounded": b.is_bounded(),
            "centrally_symmetric": b.is_centrally_symmetric(),
        }),
    };
    if let BodySpec::NonintExample { s, terms, safety } = spec {
        out["nonint"] = json!(make_nonint_example(s, terms, safety)?.summary());
    }
    out["spec"] = json!(spec);
    print_json(&out)
}

fn entropy(arg: &BodyArg, r: &RadiusArgs, mode: Mode, window: Option<Vec<f64>>) -> Outcome {
    let window = match window.as_deref() {
        None => None,
        Some([lo, hi]) => Some([*lo, *hi]),
        Some(_) => return Err(invalid("--window takes exactly two values lo,hi")),
    };
    let spec = load_spec(arg)?;
    if let BodySpec::NonintExample { s, terms, safety } = spec {
        if matches!(mode, Mode::Ball) {
            return Err(invalid("the non-integer example is fitted in sphere mode"));
        }
        let ex = make_nonint_example(s, terms, safety)?;
        let rep = nonint_growth_check(&ex, window, r.steps.max(16))?;
        return print_json(&json!({
            "fit": rep.fit,
            "band": rep.band,
            "valid_radius": rep.valid_radius,
            "slope_in_band": rep.slope_in_band,
            "radii": rep.series.radii,
            "sphere": rep.series.sphere,
        }));
    }
    let body = make_body(&spec)?;
    let (parts, gm) = match mode {
        Mode::Ball => (SeriesParts::Ball, GrowthMode::Ball),
        Mode::Sphere => (SeriesParts::Sphere, GrowthMode::Sphere),
    };
    let series = growth_series_with(planar(&body)?, &radii(r)?, parts, &GrowthConfig::default())?;
    print_json(&json!({ "fit": entropy_fit(&series, window, gm)? }))
}

fn boundary_area(arg: &BodyArg, kind: AreaKind, samples: bool) -> Outcome {
    let (_, body) = load(arg)?;
    let mut res = match &body {
        Body::Planar(b) => area(b.as_ref(), kind)?,
        Body::Spatial(b) => area(b.as_ref(), kind)?,
    };
    if !samples {
        res.samples.clear();
    }
    print_json(&json!({
        "area": res.value,
        "kind": res.kind,
        "error_estimate": res.error_estimate,
        "nodes": res.nodes,
        "nonsmooth_nodes": res.nonsmooth_nodes,
        "factor_range": res.factor_range,
        "samples": if samples { json!(res.samples) } else { json!(null) },
    }))
}
