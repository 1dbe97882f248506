use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use grasstwin::actuation::{ramp_tracking_test, write_trace_csv, MotorState, DEFAULT_TRACKING_BAND};
use grasstwin::analysis::Report;
use grasstwin::appearance::Environment;
use grasstwin::calibration::CalibrationSet;
use grasstwin::display::{assemble, assemble_uncalibrated, assets, Animation, Display};
use grasstwin::frontdoor::config::Scene;
use grasstwin::frontdoor::protocol::DEFAULT_PORT;
use grasstwin::frontdoor::scheduler::Scheduler;
use grasstwin::frontdoor::server::{serve, ServeOptions};
use grasstwin::frontdoor::workflow::{calibrate_scene, evaluate_scene};
use log::info;

/// Digital twin of an actuated grass display.
#[derive(Parser)]
#[command(name = "grasstwin", version)]
struct Cli {
    /// Scene configuration (TOML). Defaults apply when omitted.
    #[arg(long, short, global = true, env = "GRASS_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample every pixel and write a calibration file.
    Calibrate {
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Sweep calibrated pixels and write report.{txt,csv,json}.
    Evaluate {
        #[arg(long)]
        calibration: PathBuf,
        /// Measurement viewpoints in degrees.
        #[arg(long, value_delimiter = ',')]
        viewpoints: Option<Vec<f64>>,
        /// Environment preset to measure under.
        #[arg(long)]
        environment: Option<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Play an animation file or a bundled animation (wave, heart, green).
    Play {
        #[arg(long, default_value = "wave")]
        animation: String,
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Write the playback report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Export the animation file instead of playing it.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Run the line-protocol server.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, env = "GRASS_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        fps: u8,
        /// Stop after this many frames.
        #[arg(long)]
        frames: Option<u64>,
    },
    /// Ramp-tracking test of one pixel's drivetrain.
    Track {
        /// Frame rates to test; a range like 1-11 or a list like 1,5,10.
        #[arg(long, default_value = "1-11")]
        fps: String,
        #[arg(long, default_value_t = DEFAULT_TRACKING_BAND)]
        band: i32,
        /// Write the trace of the last tested rate as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print a saved report.json.
    RenderReport {
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

enum Failure {
    Usage(String),
    Domain(grasstwin::Error),
}

impl From<grasstwin::Error> for Failure {
    fn from(e: grasstwin::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn require_file(path: &Path, what: &str) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{what} {} not found", path.display())))
    }
}

fn load_scene(path: Option<&Path>) -> CliResult<Scene> {
    match path {
        Some(p) => {
            require_file(p, "config")?;
            Ok(Scene::load(p)?)
        }
        None => Ok(Scene::default()),
    }
}

fn load_calibration(path: &Path) -> CliResult<CalibrationSet> {
    require_file(path, "calibration")?;
    Ok(CalibrationSet::load(path)?)
}

fn build_display(scene: &Scene, calibration: Option<&Path>) -> CliResult<Display> {
    let modules = scene.modules()?;
    let mut d = match calibration {
        Some(p) => assemble(modules, &load_calibration(p)?)?,
        None => assemble_uncalibrated(modules)?,
    };
    d.home_all()?;
    Ok(d)
}

fn parse_rates(spec: &str) -> CliResult<Vec<u32>> {
    let bad = || Failure::Usage(format!("bad fps list {spec:?}"));
    let mut out = Vec::new();
    for part in spec.split(',') {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.trim().parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

fn run(cli: Cli) -> CliResult {
    let scene = load_scene(cli.config.as_deref())?;
    match cli.command {
        Cmd::Calibrate { output } => {
            let set = calibrate_scene(&scene)?;
            set.save(&output)?;
            for p in set.pixels.iter().filter_map(|p| p.warning.as_ref()) {
                eprintln!("warning: {p}");
            }
            println!(
                "calibrated {} pixels; reference pixel {} OGCD {:.3}; wrote {}",
                set.pixels.len(),
                set.reference_pixel,
                set.reference_ogcd,
                output.display()
            );
        }
        Cmd::Evaluate {
            calibration,
            viewpoints,
            environment,
            out_dir,
        } => {
            let set = load_calibration(&calibration)?;
            let env = environment
                .map(|name| {
                    Environment::preset(&name)
                        .ok_or_else(|| Failure::Usage(format!("unknown environment {name:?}")))
                })
                .transpose()?;
            let report = evaluate_scene(&scene, &set, viewpoints, env)?;
            fs::create_dir_all(&out_dir)?;
            fs::write(out_dir.join("report.csv"), report.to_csv())?;
            fs::write(out_dir.join("report.txt"), report.to_text())?;
            fs::write(
                out_dir.join("report.json"),
                serde_json::to_string_pretty(&report).map_err(grasstwin::Error::from)?,
            )?;
            print!("{}", report.to_text());
        }
        Cmd::Play {
            animation,
            calibration,
            report,
            export,
        } => {
            let mut display = build_display(&scene, calibration.as_deref())?;
            let anim = if Path::new(&animation).is_file() {
                Animation::read_from(BufReader::new(File::open(&animation)?))?
            } else if assets::BUNDLED.contains(&animation.as_str()) {
                assets::bundled(&animation, display.width, display.height)?
            } else {
                return Err(Failure::Usage(format!(
                    "{animation:?} is neither a file nor one of {}",
                    assets::BUNDLED.join(", ")
                )));
            };
            if let Some(path) = export {
                anim.write_to(BufWriter::new(File::create(&path)?))?;
                println!("wrote {}", path.display());
                return Ok(());
            }
            let r = display.play(&anim)?;
            println!(
                "{} frames at {} fps; minimum settled fraction {:.4}",
                r.frames.len(),
                r.fps,
                r.min_settled_fraction()
            );
            if let Some(path) = report {
                fs::write(&path, serde_json::to_string_pretty(&r).map_err(grasstwin::Error::from)?)?;
            }
        }
        Cmd::Serve {
            bind,
            port,
            calibration,
            fps,
            frames,
        } => {
            let display = build_display(&scene, calibration.as_deref())?;
            let sched = Scheduler::new(display, scene.rig()?, fps)?;
            let opts = ServeOptions {
                frame_period: std::time::Duration::from_secs_f64(1.0 / fps.max(1) as f64),
                max_frames: frames,
            };
            info!("serving on {bind}:{port}");
            serve((bind.as_str(), port), sched, opts)?;
        }
        Cmd::Track { fps, band, trace } => {
            let rates = parse_rates(&fps)?;
            let start = MotorState::homed_at_origin();
            let mut last = None;
            for rate in rates {
                let r = ramp_tracking_test(&start, &scene.drivetrain, &scene.gains, rate, band)?;
                println!(
                    "fps {:>3}: {} (max |pv - sp| = {} counts, band {})",
                    rate,
                    if r.passed { "pass" } else { "fail" },
                    r.max_abs_error,
                    band
                );
                last = Some(r);
            }
            if let (Some(path), Some(r)) = (trace, last) {
                write_trace_csv(BufWriter::new(File::create(path)?), &r.trace)?;
            }
        }
        Cmd::RenderReport { report, format } => {
            require_file(&report, "report")?;
            let r: Report = serde_json::from_str(&fs::read_to_string(&report)?)
                .map_err(grasstwin::Error::from)?;
            let out = match format {
                Format::Text => r.to_text(),
                Format::Csv => r.to_csv(),
            };
            io::stdout().write_all(out.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
