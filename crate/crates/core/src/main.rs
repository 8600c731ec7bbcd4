use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsphere::cli::{self, MeasureSource, RunConfig};
use qsphere::Result;

/// Spectral analysis of measures on the quaternionic sphere S^{4n-1}.
#[derive(Parser)]
#[command(name = "qsphere", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate every kernel up to --h-max and update the cache.
    Calibrate,
    /// Run the invariant suite; exits 1 if any check fails.
    Verify,
    /// Estimate the squared norm of every spectral component.
    Spectrum(MeasureArgs),
    /// Apply the cone multiplier and scan the result.
    Multiplier(MeasureArgs),
    /// Estimate the correlation dimension.
    Dimension(MeasureArgs),
    /// Check spectrum and dimension against the 4n-4 bound; exits 1 if inconsistent.
    Report(MeasureArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Measure file: `# n=<n>` header, then 4n coordinates and a weight per line.
    #[arg(required_unless_present = "fixture", conflicts_with = "fixture")]
    file: Option<PathBuf>,
    /// Built-in measure: uniform, point, subsphere:<k> or sp1-orbit.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args)]
struct Opts {
    /// Flat key=value file with defaults for the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    h_max: Option<usize>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
    /// Probe points for spectrum scans.
    #[arg(long, global = true)]
    probes: Option<usize>,
    /// Probe pairs per kernel calibration.
    #[arg(long, global = true)]
    calib_probes: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    /// Atom count for fixtures.
    #[arg(long, global = true)]
    atoms: Option<usize>,
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

impl Opts {
    fn apply(self, cfg: &mut RunConfig) {
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        take!(n => n, h_max => h_max, epsilon => epsilon, mc_samples => mc_samples, probes => probes,
              calib_probes => calib_probes, seed => seed, fd_step => fd_step, atoms => atoms, cache => cache_path);
        if self.out.is_some() {
            cfg.output_path = self.out;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
    }
}

fn source(args: MeasureArgs) -> MeasureSource {
    match (args.file, args.fixture) {
        (Some(f), _) => MeasureSource::File(f),
        (None, Some(name)) => MeasureSource::Fixture(name),
        (None, None) => unreachable!("clap requires one of them"),
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = RunConfig::default();
    cli::read_config_file(cli.opts.config.as_deref(), &mut cfg)?;
    cli.opts.apply(&mut cfg);
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| qsphere::Error::InvalidConfig(e.to_string()))?;
    }

    let load = |args: MeasureArgs| {
        let (mu, renormalized) = cli::load_measure(&source(args), &cfg)?;
        if renormalized > 0 {
            eprintln!("warning: renormalized {renormalized} atoms that were off the unit sphere");
        }
        Ok::<_, qsphere::Error>(mu)
    };

    match cli.command {
        Command::Calibrate => println!("{}", json(&cli::cmd_calibrate(&cfg)?)?),
        Command::Verify => {
            let summary = cli::cmd_verify(&cfg)?;
            print!("{}", summary.to_json()?);
            if !summary.passed {
                eprintln!("verify failed: {}", summary.failed.join(", "));
                return Ok(false);
            }
        }
        Command::Spectrum(args) => print!("{}", cli::cmd_spectrum(&load(args)?, &cfg)?.to_csv()),
        Command::Multiplier(args) => println!("{}", json(&cli::cmd_multiplier(&load(args)?, &cfg)?)?),
        Command::Dimension(args) => println!("{}", json(&cli::cmd_dimension(&load(args)?, &cfg)?)?),
        Command::Report(args) => {
            let report = cli::cmd_report(&load(args)?, &cfg)?;
            println!("{}", json(&report)?);
            if !report.consistent {
                eprintln!("report: measure `{}` is inconsistent with the dimension bound", report.measure);
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
