//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 usage
//! error, 3 runtime error (printed with its error name).

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::extend::{ExtendedVelocity, ExtensionConfig};
use crate::fields::{validate_scene, TwoPhaseScene, ValidationGrid};
use crate::integrate::{
    flow_map, integrate_surface, jacobian_flow, trace, trajectory_json, write_csv, IntegratorConfig, Scheme,
    Trajectory,
};
use crate::numfmt::g17;
use crate::regularize::trajectory_residual;
use crate::scenes::{self, BUILTINS};
use crate::verify::{gronwall_check, twin_experiment, UniquenessMonitor};
use crate::{Error, Point, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pathline", version, about = "Pathlines of two-phase velocity fields across a moving interface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the interface conditions of a scene.
    Validate(ValidateArgs),
    /// Trace pathlines with interface event detection.
    Trace(RunArgs),
    /// Follow the intrinsic interface velocity from points on the interface.
    Surface(RunArgs),
    /// Flow map of the extended interface velocity.
    Flow(FlowArgs),
    /// Twin experiments for the uniqueness diagnostics.
    Verify(VerifyArgs),
    /// List the built-in scenes.
    Scenes(ScenesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Rk4,
    Rk45,
}

#[derive(Debug, Args)]
struct SceneArg {
    /// Scene file, `builtin:NAME`, or a name on PATHLINE_SCENE_PATH.
    #[arg(long)]
    scene: String,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Suppress progress and summaries on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    scene: SceneArg,
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct IntegratorArgs {
    /// Initial point, comma-separated; repeat for several pathlines.
    #[arg(long = "x0", required = true, value_parser = parse_point, allow_hyphen_values = true)]
    x0: Vec<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long = "t-end", allow_hyphen_values = true)]
    t_end: f64,
    /// Step size (fixed for rk4, initial for rk45).
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Rk4)]
    scheme: SchemeArg,
    /// Local error tolerance of rk45.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long = "tol-event", default_value_t = 1e-10)]
    tol_event: f64,
    #[arg(long = "tol-grazing")]
    tol_grazing: Option<f64>,
    /// Skip the interface-condition validation of the scene.
    #[arg(long = "no-validate")]
    no_validate: bool,
    /// Seed for the validation sample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    scene: SceneArg,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[command(flatten)]
    scene: SceneArg,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// Also propagate the flow Jacobian (columns m11..mnn and det).
    #[arg(long)]
    jacobian: bool,
    /// Radial and angular quadrature nodes of the extension.
    #[arg(long, num_args = 2, value_names = ["RADIAL", "ANGULAR"])]
    quadrature: Option<Vec<usize>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    scene: SceneArg,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// Perturbation sizes of the twin experiment.
    #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-4,1e-5")]
    deltas: Vec<f64>,
    /// CSV of the φ, ψ series of the first perturbed twin.
    #[arg(long)]
    series: Option<std::path::PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ScenesArgs {
    /// Print the source of one built-in scene.
    #[arg(long)]
    show: Option<String>,
}

fn parse_point(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{c}`: {e}")))
        .collect()
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    Failed,
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Failed) => EXIT_FAIL,
        Err(e) => {
            let name = e.name();
            let msg = e.to_string();
            let msg = msg.strip_prefix(name).and_then(|m| m.strip_prefix(": ")).unwrap_or(&msg);
            eprintln!("error[{name}]: {msg}");
            match e {
                Error::InvalidInput(_) => EXIT_USAGE,
                _ => EXIT_RUNTIME,
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Validate(a) => cmd_validate(a),
        Command::Trace(a) => cmd_trace(a, false),
        Command::Surface(a) => cmd_trace(a, true),
        Command::Flow(a) => cmd_flow(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Scenes(a) => cmd_scenes(a),
    }
}

fn open_output(path: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<Outcome> {
    let scene = scenes::resolve(&a.scene.scene)?;
    let grid = ValidationGrid { seed: a.seed, ..ValidationGrid::default() };
    let report = validate_scene(&scene, &grid);
    let mut out = open_output(&a.output.out)?;
    match a.output.format {
        Some(Format::Json) => write_json(&mut out, &serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?)?,
        Some(Format::Csv) => {
            writeln!(out, "condition,max_residual,tolerance,samples,pass")?;
            for c in &report.conditions {
                writeln!(out, "{},{},{},{},{}", c.condition, g17(c.max_residual), g17(c.tolerance), c.samples, c.pass)?;
            }
        }
        None => writeln!(out, "{report}")?,
    }
    out.flush()?;
    Ok(if report.pass() { Outcome::Ok } else { Outcome::Failed })
}

/// Loads the scene, checks the points and runs validation unless disabled.
/// Returns `None` if validation failed (report already printed).
fn prepare(scene_arg: &SceneArg, ia: &IntegratorArgs, quiet: bool) -> Result<Option<(TwoPhaseScene, IntegratorConfig, Vec<Point>)>> {
    let scene = scenes::resolve(&scene_arg.scene)?;
    let scheme = match ia.scheme {
        SchemeArg::Rk4 => Scheme::Rk4,
        SchemeArg::Rk45 => Scheme::Rk45 { tol: ia.tol },
    };
    let cfg = IntegratorConfig {
        h: ia.h,
        scheme,
        tol_event: ia.tol_event,
        tol_grazing: ia.tol_grazing,
        ..IntegratorConfig::default()
    };
    cfg.check(scene.chart().width)?;
    let points: Vec<Point> = ia.x0.iter().map(|c| Point::from_column_slice(c)).collect();
    for p in &points {
        if p.len() != scene.dim() {
            return Err(Error::InvalidInput(format!(
                "--x0 has {} coordinates but scene `{}` has dimension {}",
                p.len(),
                scene.name,
                scene.dim()
            )));
        }
    }
    let tw = scene.time_window();
    for t in [ia.t0, ia.t_end] {
        if !tw.contains_closed(t) {
            return Err(Error::InvalidInput(format!(
                "time {t} is outside the scene window ({}, {})",
                tw.start, tw.end
            )));
        }
    }
    if !ia.no_validate {
        let report = validate_scene(&scene, &ValidationGrid { seed: ia.seed, ..ValidationGrid::default() });
        if !report.pass() {
            eprintln!("{report}");
            eprintln!("scene failed validation; rerun with --no-validate to trace anyway");
            return Ok(None);
        }
        if !quiet {
            eprintln!("scene {} validated", scene.name);
        }
    }
    Ok(Some((scene, cfg, points)))
}

fn cmd_trace(a: RunArgs, surface: bool) -> Result<Outcome> {
    let Some((scene, cfg, points)) = prepare(&a.scene, &a.integrator, a.output.quiet)? else {
        return Ok(Outcome::Failed);
    };
    let (t0, t_end) = (a.integrator.t0, a.integrator.t_end);
    let trajs: Vec<Trajectory> = points
        .par_iter()
        .map(|x0| if surface { integrate_surface(&scene, &cfg, t0, x0, t_end) } else { trace(&scene, &cfg, t0, x0, t_end) })
        .collect::<Result<_>>()?;
    let mut out = open_output(&a.output.out)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(&mut out, &trajs)?,
        Format::Json => {
            let docs: Vec<serde_json::Value> = trajs
                .iter()
                .map(|tr| {
                    let mut doc = trajectory_json(tr);
                    let cert = trajectory_residual(&scene, tr);
                    doc["diagnostics"]["max_inclusion_residual"] = json!(cert.max_residual);
                    doc
                })
                .collect();
            write_json(&mut out, &json!({ "scene": scene.name, "trajectories": docs }))?;
        }
    }
    out.flush()?;
    if !a.output.quiet {
        for (i, tr) in trajs.iter().enumerate() {
            eprintln!("trajectory {i}: {} samples, {} events", tr.sample_count(), tr.events.len());
        }
    }
    Ok(Outcome::Ok)
}

fn cmd_flow(a: FlowArgs) -> Result<Outcome> {
    let Some((scene, cfg, points)) = prepare(&a.scene, &a.integrator, a.output.quiet)? else {
        return Ok(Outcome::Failed);
    };
    let ext = match &a.quadrature {
        Some(q) => ExtensionConfig::with_resolution(scene.dim(), q[0], q[1])?,
        None => ExtensionConfig::default_for(scene.dim())?,
    };
    let (t0, t) = (a.integrator.t0, a.integrator.t_end);
    let n = scene.dim();
    let rows: Vec<(Point, Option<crate::Matrix>)> = if a.jacobian {
        points
            .par_iter()
            .map(|y| jacobian_flow(&scene, &ext, &cfg, t0, y, t).map(|j| (j.position, Some(j.matrix))))
            .collect::<Result<_>>()?
    } else {
        let field = ExtendedVelocity::new(scene.clone(), ext);
        flow_map(&field, &cfg, t0, &points, t)?.into_iter().map(|p| (p, None)).collect()
    };
    let mut out = open_output(&a.output.out)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut header = String::from("point,t0,t");
            (1..=n).for_each(|k| header.push_str(&format!(",y{k}")));
            (1..=n).for_each(|k| header.push_str(&format!(",x{k}")));
            if a.jacobian {
                for i in 1..=n {
                    (1..=n).for_each(|j| header.push_str(&format!(",m{i}{j}")));
                }
                header.push_str(",det");
            }
            writeln!(out, "{header}")?;
            for (k, (y, (x, m))) in points.iter().zip(&rows).enumerate() {
                let mut row = format!("{k},{},{}", g17(t0), g17(t));
                y.iter().chain(x.iter()).for_each(|v| row.push_str(&format!(",{}", g17(*v))));
                if let Some(m) = m {
                    for i in 0..n {
                        (0..n).for_each(|j| row.push_str(&format!(",{}", g17(m[(i, j)]))));
                    }
                    row.push_str(&format!(",{}", g17(m.determinant())));
                }
                writeln!(out, "{row}")?;
            }
        }
        Format::Json => {
            let docs: Vec<serde_json::Value> = points
                .iter()
                .zip(&rows)
                .map(|(y, (x, m))| {
                    let mut doc = json!({ "y": y.as_slice(), "x": x.as_slice() });
                    if let Some(m) = m {
                        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
                        doc["jacobian"] = json!(rows);
                        doc["det"] = json!(m.determinant());
                    }
                    doc
                })
                .collect();
            write_json(&mut out, &json!({ "scene": scene.name, "t0": t0, "t": t, "points": docs }))?;
        }
    }
    out.flush()?;
    Ok(Outcome::Ok)
}

fn cmd_verify(a: VerifyArgs) -> Result<Outcome> {
    let Some((scene, cfg, points)) = prepare(&a.scene, &a.integrator, a.output.quiet)? else {
        return Ok(Outcome::Failed);
    };
    let (t0, t_end) = (a.integrator.t0, a.integrator.t_end);
    let reports = points
        .iter()
        .map(|x0| twin_experiment(&scene, &cfg, t0, x0, &a.deltas, t_end))
        .collect::<Result<Vec<_>>>()?;
    if let (Some(path), Some(delta)) = (&a.series, a.deltas.first()) {
        let x0 = &points[0];
        let dir = Point::from_element(x0.len(), 1.0 / (x0.len() as f64).sqrt());
        let rk4 = IntegratorConfig { scheme: Scheme::Rk4, ..cfg };
        let base = trace(&scene, &rk4, t0, x0, t_end)?;
        let twin = trace(&scene, &rk4, t0, &(x0 + dir * *delta), t_end)?;
        let mon = UniquenessMonitor::new(&scene, &base, &twin);
        let series = mon.series(&mon.sample_times());
        let fit = gronwall_check(&series);
        let mut out = open_output(&Some(path.clone()))?;
        writeln!(out, "t,phi,psi,separation,excluded,envelope")?;
        for s in &series {
            let tau = (s.t - t0).abs();
            let envelope = (fit.phi0 + crate::verify::K_SLACK * tau) * (fit.k_fit * tau).exp();
            writeln!(out, "{},{},{},{},{},{}", g17(s.t), g17(s.phi), g17(s.psi), g17(s.separation), u8::from(s.excluded), g17(envelope))?;
        }
        out.flush()?;
    }
    let pass = reports.iter().all(|r| r.pass);
    let mut out = open_output(&a.output.out)?;
    write_json(&mut out, &json!({ "scene": scene.name, "pass": pass, "experiments": reports }))?;
    out.flush()?;
    if !a.output.quiet {
        for r in &reports {
            eprintln!(
                "x0 = {:?}: zero twins {}, continuity {} (gain spread {:.3}), gronwall {}",
                r.x0,
                verdict(r.zero_pass),
                verdict(r.continuity_pass),
                r.gain_spread,
                verdict(r.gronwall_pass)
            );
        }
    }
    Ok(if pass { Outcome::Ok } else { Outcome::Failed })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_scenes(a: ScenesArgs) -> Result<Outcome> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Some(name) = a.show {
        let src = scenes::builtin_source(name.trim_start_matches("builtin:"))
            .ok_or_else(|| Error::InvalidInput(format!("unknown built-in scene `{name}`")))?;
        write!(out, "{src}")?;
        return Ok(Outcome::Ok);
    }
    for s in BUILTINS {
        writeln!(out, "{:<20} {}", s.name, s.summary)?;
    }
    Ok(Outcome::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        run(std::iter::once("pathline").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(code(&["trace", "--x0", "0,-1", "--t0", "0", "--t-end", "2"]), EXIT_USAGE);
        assert_eq!(code(&["bogus"]), EXIT_USAGE);
        assert_eq!(code(&["trace", "--scene", "builtin:S1", "--x0", "0,-1,3", "--t0", "0", "--t-end", "2"]), EXIT_USAGE);
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("0,-1.5").unwrap(), vec![0.0, -1.5]);
        assert!(parse_point("0,a").is_err());
    }

    #[test]
    fn runtime_errors_exit_3() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("o.csv");
        let out = out.to_str().unwrap();
        let args = ["trace", "--scene", "builtin:S4-transversality", "--no-validate", "--x0", "0,-1", "--t0", "0", "--t-end", "3", "--out", out];
        assert_eq!(code(&args), EXIT_RUNTIME);
    }

    #[test]
    fn defect_scene_fails_validation() {
        assert_eq!(code(&["validate", "--scene", "builtin:S4-noslip"]), EXIT_FAIL);
    }
}
