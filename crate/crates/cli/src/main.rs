use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dpg_plate_cli::{config::parse_list, run_and_write, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "dpg-plate", version, about = "DPG convergence studies for the clamped Reissner-Mindlin plate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study on the clamped square plate benchmark.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Flat `key = value` configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trial polynomial degree p (≥ 1).
    #[arg(long)]
    degree: Option<String>,
    /// Plate thickness t.
    #[arg(long)]
    thickness: Option<String>,
    /// Poisson ratio ν.
    #[arg(long)]
    poisson: Option<String>,
    /// Shear correction factor κ.
    #[arg(long)]
    shear_correction: Option<String>,
    /// Mesh sequence: uniform | trapezoidal.
    #[arg(long)]
    mesh: Option<String>,
    /// Vertex offset of trapezoidal meshes, as a fraction of 1/N.
    #[arg(long)]
    distortion: Option<String>,
    /// Comma-separated, strictly increasing element counts per direction.
    #[arg(long)]
    refinements: Option<String>,
    /// Gauss points per direction (default p + 5).
    #[arg(long)]
    quad_points: Option<String>,
    /// Linear solver: cholesky | cg.
    #[arg(long)]
    solver: Option<String>,
    /// Write sampled fields of the finest mesh.
    #[arg(long)]
    emit_fields: bool,
    /// Samples per direction of the field grids.
    #[arg(long)]
    resolution: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let flags = [
        ("degree", &args.degree),
        ("thickness", &args.thickness),
        ("poisson", &args.poisson),
        ("shear_correction", &args.shear_correction),
        ("mesh", &args.mesh),
        ("distortion", &args.distortion),
        ("quad_points", &args.quad_points),
        ("solver", &args.solver),
        ("resolution", &args.resolution),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(r) = &args.refinements {
        cfg.refinements = parse_list("refinements", r)?;
    }
    if args.emit_fields {
        cfg.emit_fields = true;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let result = build_config(&args).and_then(|cfg| {
        let outcome = run_and_write(&cfg)?;
        Ok((cfg, outcome))
    });
    match result {
        Ok((cfg, outcome)) => {
            print!("{}", outcome.artifacts.get("summary.txt").unwrap_or_default());
            println!("artifacts written to {}", cfg.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
