//! Command-line front end: tiling existence checks, packing
//! optimization, table and sweep emission, distances, ball volumes,
//! group relation checks and OBJ mesh export.
//!
//! Exit codes: 0 success, 1 geometric nonexistence (no such tiling,
//! sphere or geodesic), 2 bad arguments, 3 solver failure, 4 I/O.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nilpack::{
    arrangement_mesh, ball_volume, distance, match_table_row, packing_density, prism_mesh,
    reference_rows, solve_balanced, sphere_mesh, sweep, tiling_exists, write_obj, NilError,
    NilPoint, PackingResult, PrismTiling, SweepPoint,
};

#[derive(Parser)]
#[command(name = "nilpack", version, about = "Geodesic ball packings over the Nil prism tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Obj,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeshKind {
    Sphere,
    Prism,
    Arrangement,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether the tiling with p-gonal cells and q cells around
    /// each vertex fibre exists (prints true or false).
    Exists { p: u32, q: u32 },
    /// Solve for the balanced cell and report the optimal packing as
    /// JSON.
    Optimize {
        p: u32,
        q: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Write to a file instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Emit the packing table of a tiling: the built-in cell volumes,
    /// or a parameter grid when --x-range is given.
    Table {
        p: u32,
        q: u32,
        #[arg(long, value_name = "LO:HI:STEPS")]
        x_range: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Decimals in CSV output (default 4).
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Evaluate the packing on a parameter grid, keyed by the tiling
    /// parameter.
    Sweep {
        p: u32,
        q: u32,
        #[arg(long, value_name = "LO:HI:STEPS")]
        x_range: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Decimals in CSV output (default 4).
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Geodesic distance between two points in model coordinates.
    #[command(allow_negative_numbers = true)]
    Distance {
        x1: f64,
        y1: f64,
        z1: f64,
        x2: f64,
        y2: f64,
        z2: f64,
        /// Fixed number of decimals (full precision when omitted).
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Volume of the geodesic ball of the given radius.
    Volume {
        radius: f64,
        /// Fixed number of decimals (full precision when omitted).
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Check the group presentation of a tiling on random points and
    /// report the deviations.
    Verify {
        p: u32,
        q: u32,
        /// Tiling parameter.
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        /// Seed for the sample points.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Export a mesh as Wavefront OBJ.
    Mesh {
        #[arg(value_enum)]
        kind: MeshKind,
        p: Option<u32>,
        q: Option<u32>,
        /// Tiling parameter (defaults to the balanced cell).
        #[arg(long)]
        x: Option<f64>,
        /// Ball radius (required for spheres; arrangements default to
        /// the optimal packing radius).
        #[arg(long)]
        radius: Option<f64>,
        /// Latitude and longitude steps of sphere meshes.
        #[arg(long, default_value_t = 32)]
        res: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Obj)]
        format: OutputFormat,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// A failed run: exit code plus message. An empty message exits
/// silently (used by `exists`, where "false" is already on stdout).
struct Failure {
    code: u8,
    message: String,
}

impl From<NilError> for Failure {
    fn from(e: NilError) -> Self {
        let code = match e {
            NilError::Domain(_) => 2,
            NilError::NoSuchTiling { .. } | NilError::SphereRadius { .. } | NilError::BeyondCap => {
                1
            }
            NilError::Solver(_) => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 4, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Exists { p, q } => run_exists(p, q),
        Command::Optimize { p, q, format, out } => run_optimize(p, q, format, out.as_deref()),
        Command::Table { p, q, x_range, format, precision, out } => {
            run_table(p, q, x_range.as_deref(), format, precision, out.as_deref())
        }
        Command::Sweep { p, q, x_range, format, precision, out } => {
            run_sweep(p, q, &x_range, format, precision, out.as_deref())
        }
        Command::Distance { x1, y1, z1, x2, y2, z2, precision } => {
            let sol = distance(NilPoint::new(x1, y1, z1), NilPoint::new(x2, y2, z2))?;
            println!("{}", fmt_f64(sol.length, precision));
            Ok(())
        }
        Command::Volume { radius, precision } => {
            let volume = ball_volume(radius)?;
            println!("{}", fmt_f64(volume, precision));
            Ok(())
        }
        Command::Verify { p, q, x, seed } => run_verify(p, q, x, seed),
        Command::Mesh { kind, p, q, x, radius, res, format, out } => {
            run_mesh(kind, p, q, x, radius, res, format, out.as_deref())
        }
    }
}

fn run_exists(p: u32, q: u32) -> Result<(), Failure> {
    if p < 3 || q < 3 {
        return Err(NilError::domain(format!(
            "tiling parameters need p >= 3 and q >= 3; got ({p}, {q})"
        ))
        .into());
    }
    if tiling_exists(p, q) {
        println!("true");
        Ok(())
    } else {
        println!("false");
        Err(Failure { code: 1, message: String::new() })
    }
}

fn run_optimize(p: u32, q: u32, format: OutputFormat, out: Option<&Path>) -> Result<(), Failure> {
    require_format(format, &[OutputFormat::Json])?;
    let sol = solve_balanced(p, q, balance_tol()?)?;
    let r = &sol.result;
    let json = format!(
        "{{\"x_star\": {:?}, \"r_opt\": {:?}, \"prism_volume\": {:?}, \"density\": {:?}, \"kissing\": {}}}\n",
        sol.x_star, r.r_opt, r.prism_volume, r.density, r.kissing
    );
    emit(out, json.as_bytes())
}

fn run_table(
    p: u32,
    q: u32,
    x_range: Option<&str>,
    format: OutputFormat,
    precision: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    require_format(format, &[OutputFormat::Csv, OutputFormat::Json])?;
    let rows: Vec<PackingResult> = match x_range {
        None => {
            let targets = reference_rows(p, q).ok_or(NilError::NoSuchTiling { p, q })?;
            targets
                .iter()
                .map(|row| match_table_row(p, q, row.prism_volume))
                .collect::<Result<_, NilError>>()?
        }
        Some(spec) => {
            let (lo, hi, steps) = parse_range(spec)?;
            sweep(p, q, lo, hi, steps)?
                .into_iter()
                .map(|pt| pt.result)
                .collect::<Result<_, NilError>>()?
        }
    };
    let text = match format {
        OutputFormat::Csv => table_csv(&rows, precision.unwrap_or(4)),
        _ => table_json(&rows),
    };
    emit(out, text.as_bytes())
}

fn run_sweep(
    p: u32,
    q: u32,
    x_range: &str,
    format: OutputFormat,
    precision: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    require_format(format, &[OutputFormat::Csv, OutputFormat::Json])?;
    let (lo, hi, steps) = parse_range(x_range)?;
    let points = sweep(p, q, lo, hi, steps)?;
    let text = match format {
        OutputFormat::Csv => sweep_csv(&points, precision.unwrap_or(4)),
        _ => sweep_json(&points),
    };
    emit(out, text.as_bytes())
}

fn run_verify(p: u32, q: u32, x: f64, seed: u64) -> Result<(), Failure> {
    let tiling = PrismTiling::build(p, q, x)?;
    let report = tiling.verify_relations(100, seed);
    println!("order_a: {:?}", report.order_a);
    println!("order_b: {:?}", report.order_b);
    println!("screw_relator: {:?}", report.screw_relator);
    println!("tau_match: {:?}", report.tau_match);
    println!("tau_planar_drift: {:?}", report.tau_planar_drift);
    println!("fibre_alignment: {:?}", report.fibre_alignment);
    println!("max_deviation: {:?}", report.max_deviation());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_mesh(
    kind: MeshKind,
    p: Option<u32>,
    q: Option<u32>,
    x: Option<f64>,
    radius: Option<f64>,
    res: u32,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<(), Failure> {
    require_format(format, &[OutputFormat::Obj])?;
    let mesh = match kind {
        MeshKind::Sphere => {
            if p.is_some() || q.is_some() {
                return Err(NilError::domain("mesh sphere takes no (p, q) arguments").into());
            }
            let radius =
                radius.ok_or_else(|| NilError::domain("mesh sphere needs --radius"))?;
            sphere_mesh(radius, res, res)?
        }
        MeshKind::Prism => prism_mesh(&tiling_argument(p, q, x)?),
        MeshKind::Arrangement => {
            let tiling = tiling_argument(p, q, x)?;
            let radius = match radius {
                Some(r) => r,
                None => packing_density(&tiling)?.r_opt,
            };
            arrangement_mesh(&tiling, radius, res, res)?
        }
    };
    let mut bytes = Vec::new();
    write_obj(&mesh, &mut bytes)?;
    emit(out, &bytes)
}

/// Builds the tiling named on the command line, solving for the
/// balanced parameter when --x is omitted.
fn tiling_argument(p: Option<u32>, q: Option<u32>, x: Option<f64>) -> Result<PrismTiling, Failure> {
    let (p, q) = match (p, q) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(NilError::domain("this mesh kind needs the (p, q) pair").into()),
    };
    let x = match x {
        Some(x) => x,
        None => solve_balanced(p, q, balance_tol()?)?.x_star,
    };
    Ok(PrismTiling::build(p, q, x)?)
}

/// The NILPACK_TOL environment variable, when set, overrides the
/// balance solver tolerance.
fn balance_tol() -> Result<Option<f64>, Failure> {
    let raw = match std::env::var("NILPACK_TOL") {
        Err(std::env::VarError::NotPresent) => return Ok(None),
        Err(e) => return Err(NilError::domain(format!("NILPACK_TOL: {e}")).into()),
        Ok(raw) => raw,
    };
    let tol: f64 = raw
        .trim()
        .parse()
        .map_err(|_| NilError::domain(format!("NILPACK_TOL must be a positive number; got {raw:?}")))?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(
            NilError::domain(format!("NILPACK_TOL must be a positive number; got {raw:?}")).into()
        );
    }
    Ok(Some(tol))
}

fn require_format(got: OutputFormat, allowed: &[OutputFormat]) -> Result<(), Failure> {
    if allowed.contains(&got) {
        Ok(())
    } else {
        Err(NilError::domain("output format not supported by this command").into())
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64, usize), Failure> {
    let bad = || NilError::domain(format!("x-range must be LO:HI:STEPS; got {spec:?}"));
    let mut parts = spec.split(':');
    let (lo, hi, steps) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(lo), Some(hi), Some(steps), None) => (lo, hi, steps),
        _ => return Err(bad().into()),
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    Ok((lo, hi, steps))
}

fn fmt_f64(v: f64, precision: Option<usize>) -> String {
    match precision {
        Some(d) => format!("{v:.d$}"),
        None => format!("{v:?}"),
    }
}

fn table_csv(rows: &[PackingResult], d: usize) -> String {
    let mut out = String::from("radius,prism_volume,density,kissing_number\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.d$},{:.d$},{:.d$},{}",
            r.r_opt, r.prism_volume, r.density, r.kissing
        );
    }
    out
}

fn table_json(rows: &[PackingResult]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in rows.iter().enumerate() {
        let sep = if i + 1 == rows.len() { "" } else { "," };
        let _ = writeln!(
            out,
            "  {{\"radius\": {:?}, \"prism_volume\": {:?}, \"density\": {:?}, \"kissing_number\": {}}}{sep}",
            r.r_opt, r.prism_volume, r.density, r.kissing
        );
    }
    out.push_str("]\n");
    out
}

fn sweep_csv(points: &[SweepPoint], d: usize) -> String {
    let mut out = String::from("x,radius,prism_volume,density,kissing_number\n");
    for pt in points {
        // grid points without a valid packing are reported only in JSON
        if let Ok(r) = &pt.result {
            let _ = writeln!(
                out,
                "{:.d$},{:.d$},{:.d$},{:.d$},{}",
                pt.x, r.r_opt, r.prism_volume, r.density, r.kissing
            );
        }
    }
    out
}

fn sweep_json(points: &[SweepPoint]) -> String {
    let mut out = String::from("[\n");
    for (i, pt) in points.iter().enumerate() {
        let sep = if i + 1 == points.len() { "" } else { "," };
        match &pt.result {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "  {{\"x\": {:?}, \"radius\": {:?}, \"prism_volume\": {:?}, \"density\": {:?}, \"kissing_number\": {}}}{sep}",
                    pt.x, r.r_opt, r.prism_volume, r.density, r.kissing
                );
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "  {{\"x\": {:?}, \"error\": \"{}\"}}{sep}",
                    pt.x,
                    json_escape(&e.to_string())
                );
            }
        }
    }
    out.push_str("]\n");
    out
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}
