//! `vl`: field maps, spring-constant sweeps, ring detection, pattern motion
//! and atom trajectories for a pair of counter-propagating LG beams.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vortex_lattice::io::RunConfig;
use vortex_lattice::{Error, PhaseModel};

#[derive(Parser, Debug)]
#[command(name = "vl", version, about = "Interference lattices of shifted counter-propagating LG beams")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Worker threads (the VL_THREADS environment variable takes precedence).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Phase model used for forces; overrides the configuration.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Reduced,
    Full,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Amplitude, phase and intensity on every configured grid.
    FieldMap,
    /// Axial spring constant versus focal separation.
    SpringSweep,
    /// Ring lattice detection and comparison with the double-ring formulas.
    Rings,
    /// Rotation and axial drift of the pattern under a frequency offset.
    Ferris,
    /// Classical trajectory of one atom.
    Trajectory,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::FieldMap => "field-map",
            Command::SpringSweep => "spring-sweep",
            Command::Rings => "rings",
            Command::Ferris => "ferris",
            Command::Trajectory => "trajectory",
        }
    }
}

/// Exit codes: 2 configuration, 3 numerical or resolution, 4 I/O.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } => 2,
        Error::Io(_) | Error::Json(_) => 4,
        Error::Domain(_)
        | Error::DarkPoint { .. }
        | Error::Resolution(_)
        | Error::NoRings
        | Error::StepSize { .. }
        | Error::Divergence { .. } => 3,
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Error> {
    match std::env::var("VL_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("VL_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => match flag {
            Some(0) => Err(Error::Config("--threads must be positive".into())),
            other => Ok(other),
        },
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(n) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?;
    }
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut config = RunConfig::from_json(&text)?;
    match cli.mode {
        Some(Mode::Reduced) => config.set_phase_model(PhaseModel::Reduced),
        Some(Mode::Full) => config.set_phase_model(PhaseModel::Full),
        None => {}
    }
    std::fs::create_dir_all(&cli.out)?;
    commands::write_metadata(&cli.out, cli.command.name(), &config)?;
    match cli.command {
        Command::FieldMap => commands::field_map(&config, &cli.out),
        Command::SpringSweep => commands::spring_sweep(&config, &cli.out),
        Command::Rings => commands::rings(&config, &cli.out),
        Command::Ferris => commands::ferris(&config, &cli.out),
        Command::Trajectory => commands::trajectory(&config, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vl {}: {e}", cli.command.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
