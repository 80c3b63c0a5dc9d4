use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sbt_core::harness::{run_sweep, verify_lemmas, write_report, CurveSpec, ExperimentConfig, ForceSpec, DEFAULT_N_S, DEFAULT_N_THETA};
use sbt_core::residuals::cross_section;
use sbt_core::{par, sbt, QuadratureSpec, Result, SbtError, Vec3};

#[derive(Parser)]
#[command(name = "sbt", version, about = "Slender-body theory fields and residuals for closed fibers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the sampled moving frame of a centerline as CSV.
    Frame {
        geometry: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate velocity and pressure at points read from a CSV of x,y,z rows.
    Eval {
        geometry: PathBuf,
        force: PathBuf,
        points: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-section residuals at one fiber radius.
    Residuals {
        geometry: PathBuf,
        force: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_N_THETA)]
        ntheta: usize,
        #[arg(long, default_value_t = DEFAULT_N_S)]
        ns: usize,
        /// Where to write the per-section JSON and the summary CSV; JSON goes
        /// to stdout when omitted.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run an epsilon sweep described by a JSON config.
    Sweep {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check the tabulated integral constants against quadrature.
    VerifyLemmas,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| SbtError::ConfigInvalid(format!("{}: {e}", path.display())))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_points(path: &Path) -> Result<Vec<Vec3>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if v.len() == 3 => points.push(Vec3::new(v[0], v[1], v[2])),
            Err(_) if row == 0 => continue,
            _ => {
                return Err(SbtError::InvalidInput(format!(
                    "{}: row {} is not an x,y,z triple",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    Ok(points)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Frame { geometry, output: out } => {
            let frame = read_json::<CurveSpec>(&geometry)?.build()?;
            let mut w = output(&out)?;
            frame.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Eval {
            geometry,
            force,
            points,
            eps,
            output: out,
        } => {
            let frame = read_json::<CurveSpec>(&geometry)?.build()?;
            let force = read_json::<ForceSpec>(&force)?.build()?;
            frame.check_eps(eps)?;
            let spec = QuadratureSpec::for_eps(eps);
            let points = read_points(&points)?;
            let fields: Result<Vec<_>> = par::map(&points, |x| sbt::field_sample(&frame, &force, eps, x, &spec))
                .into_iter()
                .collect();
            let mut w = csv::Writer::from_writer(output(&out)?);
            w.write_record(["x", "y", "z", "ux", "uy", "uz", "p"])?;
            for (x, f) in points.iter().zip(fields?) {
                let u = f.velocity;
                w.write_record([x[0], x[1], x[2], u[0], u[1], u[2], f.pressure].iter().map(|v| format!("{v:.17e}")))?;
            }
            w.flush()?;
        }
        Command::Residuals {
            geometry,
            force,
            eps,
            ntheta,
            ns,
            out_dir,
        } => {
            let frame = read_json::<CurveSpec>(&geometry)?.build()?;
            let force = read_json::<ForceSpec>(&force)?.build()?;
            frame.check_eps(eps)?;
            if ns == 0 {
                return Err(SbtError::ConfigInvalid("--ns must be positive".into()));
            }
            let spec = QuadratureSpec::for_eps(eps);
            let s_grid: Vec<f64> = (0..ns).map(|i| i as f64 / ns as f64).collect();
            let reports: Result<Vec<_>> = par::map(&s_grid, |&s| cross_section(&frame, &force, eps, s, ntheta, &spec))
                .into_iter()
                .collect();
            let reports = reports?;
            let json = serde_json::to_string_pretty(&reports)?;
            match out_dir {
                None => println!("{json}"),
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join("cross_sections.json"), json)?;
                    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
                    w.write_record(["s", "force_residual", "ur_max", "centerline_residual_max"])?;
                    for r in &reports {
                        w.write_record(
                            [r.s, r.force_residual(), r.ur_max, r.centerline_residual_max]
                                .iter()
                                .map(|v| format!("{v:.17e}")),
                        )?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Sweep { config, out_dir } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            let dir = out_dir.or(cfg.output_dir.take());
            let report = run_sweep(&cfg)?;
            match dir {
                Some(dir) => write_report(&report, &dir)?,
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            for r in &report.records {
                eprintln!(
                    "eps {:.4e}  ur_max {:.4e}  force {:.4e}  centerline {:.4e}  ({:.2}s)",
                    r.eps, r.ur_max, r.force_residual_max, r.centerline_residual_max, r.runtime_seconds
                );
            }
            for f in &report.failures {
                eprintln!("eps {:.4e}  skipped: {}", f.eps, f.error);
            }
            for s in &report.slopes {
                eprintln!("{:<26} slope {:>7.4}  R² {:.5}  ({:?})", s.quantity, s.slope, s.r_squared, s.regressor);
            }
            if !report.failures.is_empty() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::VerifyLemmas => {
            let report = verify_lemmas();
            for c in &report.checks {
                println!(
                    "{:<24} expected {:.15}  computed {:.15}  error {:.2e}  {}",
                    c.name,
                    c.expected,
                    c.computed,
                    c.abs_error,
                    if c.passed { "ok" } else { "FAIL" }
                );
            }
            if !report.all_passed {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match par::with_threads(par::threads_from_env(), || run(cli.command)) {
        Ok(code) => code,
        // A closed stdout (e.g. piped into `head`) is not worth reporting.
        Err(SbtError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
