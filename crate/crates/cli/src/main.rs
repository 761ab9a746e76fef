//! Sweep runner: reads a TOML run description, writes one CSV per output.
//!
//! Exit codes: 0 success, 2 configuration or parameter error, 3 lattice
//! sum not converged, 1 anything else.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dipmag::sweep::{run_phase_diagram, run_sweep, Output};
use dipmag::Error;

use config::{FileConfig, Overrides};

#[derive(Debug, Parser)]
#[command(name = "dipmag", version, about = "Magnon entanglement sweeps for dipole-coupled ferromagnet bilayers")]
struct Args {
    /// TOML run description; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// `infinite` or `finite:N`.
    #[arg(long)]
    lattice: Option<String>,
    #[arg(long)]
    l_min: Option<f64>,
    #[arg(long)]
    l_max: Option<f64>,
    #[arg(long)]
    l_count: Option<usize>,
    /// `log` or `linear`.
    #[arg(long)]
    spacing: Option<String>,
    /// Relative tolerance of the lattice sums.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated output names.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } => 3,
        Error::Domain(_) | Error::Size(_) => 2,
        _ => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn thread_pool() -> Result<rayon::ThreadPool, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MAGNON_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Domain(format!("MAGNON_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))
}

fn run(args: Args) -> Result<(), Error> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
            config::parse(&text)?
        }
        None => FileConfig::default(),
    };
    let flags = Overrides {
        out_dir: args.out_dir,
        lattice: args.lattice,
        l_min: args.l_min,
        l_max: args.l_max,
        l_count: args.l_count,
        spacing: args.spacing,
        tol: args.tol,
        outputs: args.outputs,
    };
    let config = file.resolve(&flags)?;
    let pool = thread_pool()?;

    pool.install(|| {
        if config.outputs.contains(&Output::PhaseDiagram) {
            let rows = run_phase_diagram(&config)?;
            eprintln!("phase_diagram: {} rows", rows.len());
        }
        if config.outputs.iter().any(|o| *o != Output::PhaseDiagram) {
            let out = run_sweep(&config)?;
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
        }
        Ok(())
    })
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
