//! Command-line front end: plan an instance, certify it against the
//! brute-force oracle, run the verification suite, or export waypoints.

mod instance;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dubins_sphere::geometry::sample_path;
use dubins_sphere::oracle::{self, GridSpec};
use dubins_sphere::planner;
use dubins_sphere::verification::{run_checks, VerifyConfig};

use instance::{Instance, InstanceArgs};
use report::{OracleSection, PlanReport, WaypointRow};

/// Exit codes: 0 success, 2 input or domain error, 3 internal consistency
/// failure (failed verification, empty candidate set).
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dubins-sphere",
    about = "Shortest geodesic-curvature-constrained paths on the unit sphere (free terminal heading)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct OutputFormat {
    /// Emit the machine-readable JSON report.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit the human-readable text report (default).
    #[arg(long)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all candidate paths and report the shortest.
    Plan {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also include N waypoints of the optimal path in the report.
        #[arg(long)]
        samples: Option<usize>,
        /// Sort the candidate list by ascending length.
        #[arg(long)]
        sorted: bool,
        #[command(flatten)]
        format: OutputFormat,
    },
    /// Plan, then certify against the brute-force grid oracle.
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Oracle lattice spacing in radians (default 2*pi/2000).
        #[arg(long)]
        grid_step: Option<f64>,
        /// Longest control word the oracle searches (1-3, default 3).
        #[arg(long)]
        max_segments: Option<usize>,
        /// Sort the candidate list by ascending length.
        #[arg(long)]
        sorted: bool,
        #[command(flatten)]
        format: OutputFormat,
    },
    /// Run the numeric verification suite and report PASS/FAIL per check.
    Verify {
        /// Number of radius samples for the replacement-gain sweep.
        #[arg(long, default_value_t = 1000)]
        dl_samples: usize,
        /// Override every check's threshold (falsifiability runs).
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        format: OutputFormat,
    },
    /// Sample waypoints of the optimal path into a columnar text file.
    Sample {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Number of waypoints (>= 2, default 100 or the instance option).
        #[arg(long)]
        samples: Option<usize>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

fn plan_error(e: dubins_sphere::Error) -> CliError {
    match e {
        dubins_sphere::Error::EmptyCandidateSet => CliError::Internal(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Plan {
            instance,
            samples,
            sorted,
            format,
        } => cmd_plan(&instance.resolve()?, samples, sorted, format),
        Command::Oracle {
            instance,
            grid_step,
            max_segments,
            sorted,
            format,
        } => {
            let instance = instance.resolve()?;
            cmd_oracle(&instance, grid_step, max_segments, sorted, format)
        }
        Command::Verify {
            dl_samples,
            tol,
            format,
        } => cmd_verify(dl_samples, tol, format),
        Command::Sample {
            instance,
            samples,
            out,
        } => {
            let instance = instance.resolve()?;
            let n = samples.or(instance.options.samples).unwrap_or(100);
            cmd_sample(&instance, n, out.as_deref())
        }
    }
}

fn build_plan(instance: &Instance) -> Result<planner::Plan, CliError> {
    planner::plan(&instance.r0, &instance.target, instance.r).map_err(plan_error)
}

fn cmd_plan(
    instance: &Instance,
    samples: Option<usize>,
    sorted: bool,
    format: OutputFormat,
) -> Result<(), CliError> {
    let plan = build_plan(instance)?;
    let waypoints = samples
        .or(instance.options.samples)
        .map(|n| waypoints_for(instance, &plan.optimal().segments, n))
        .transpose()?;
    let report = PlanReport::new(instance, &plan, sorted, waypoints, None);
    emit(&report, format)
}

fn cmd_oracle(
    instance: &Instance,
    grid_step: Option<f64>,
    max_segments: Option<usize>,
    sorted: bool,
    format: OutputFormat,
) -> Result<(), CliError> {
    let plan = build_plan(instance)?;
    let mut grid = GridSpec::default();
    if let Some(step) = grid_step.or(instance.options.grid_step) {
        grid.angle_step = step;
    }
    if let Some(max) = max_segments.or(instance.options.max_segments) {
        grid.max_segments = max;
    }
    let result = oracle::search(&instance.r0, &instance.target, instance.r, &grid)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let section = OracleSection::new(&result, plan.optimal().length);
    let report = PlanReport::new(instance, &plan, sorted, None, Some(section));
    emit(&report, format)
}

fn cmd_verify(dl_samples: usize, tol: Option<f64>, format: OutputFormat) -> Result<(), CliError> {
    let cfg = VerifyConfig {
        gain_samples: dl_samples,
        tolerance_override: tol,
    };
    let results = run_checks(&cfg);
    if format.json {
        let rows: Vec<serde_json::Value> = results
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "passed": c.passed,
                    "measured": c.measured,
                    "threshold": c.threshold,
                    "detail": c.detail,
                })
            })
            .collect();
        let doc = serde_json::json!({ "format": 1, "checks": rows });
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    } else {
        for c in &results {
            println!(
                "{} {} measured={:.3e} threshold={:.3e} ({})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.threshold,
                c.detail
            );
        }
    }
    if results.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(CliError::Internal("verification checks failed".into()))
    }
}

fn waypoints_for(
    instance: &Instance,
    segments: &[dubins_sphere::geometry::Segment],
    n: usize,
) -> Result<Vec<WaypointRow>, CliError> {
    let samples = sample_path(&instance.r0, segments, instance.r, n)
        .map_err(|e| CliError::Input(e.to_string()))?;

    // Segment index for each arc length, for the boundary marker column.
    let lengths: Vec<f64> = segments.iter().map(|s| s.arc_length(instance.r)).collect();
    let locate = |s: f64| -> (usize, &'static str) {
        if segments.is_empty() {
            return (0, "-");
        }
        let mut acc = 0.0;
        for (i, len) in lengths.iter().enumerate() {
            acc += len;
            if s < acc || i == lengths.len() - 1 {
                return (
                    i,
                    match segments[i].seg_type {
                        dubins_sphere::geometry::SegmentType::L => "L",
                        dubins_sphere::geometry::SegmentType::R => "R",
                        dubins_sphere::geometry::SegmentType::G => "G",
                    },
                );
            }
        }
        unreachable!("arc length within total")
    };

    Ok(samples
        .iter()
        .map(|(s, cfg)| {
            let pos = cfg.position();
            let tan = cfg.tangent();
            let (seg, ty) = locate(*s);
            WaypointRow {
                s: *s,
                x: pos.x,
                y: pos.y,
                z: pos.z,
                tx: tan.x,
                ty: tan.y,
                tz: tan.z,
                segment: seg,
                seg_type: ty,
            }
        })
        .collect())
}

fn cmd_sample(
    instance: &Instance,
    samples: usize,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let plan = build_plan(instance)?;
    let rows = waypoints_for(instance, &plan.optimal().segments, samples)?;
    let mut text = String::from("# s x y z tx ty tz segment type\n");
    for row in &rows {
        text.push_str(&format!(
            "{:.12} {:.12} {:.12} {:.12} {:.12} {:.12} {:.12} {} {}\n",
            row.s, row.x, row.y, row.z, row.tx, row.ty, row.tz, row.segment, row.seg_type
        ));
    }
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn emit(report: &PlanReport, format: OutputFormat) -> Result<(), CliError> {
    if format.json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        );
    } else {
        print!("{}", report.render_text());
    }
    Ok(())
}
