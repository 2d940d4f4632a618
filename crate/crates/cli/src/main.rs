mod config;
mod run;

use clap::{Args, Parser, Subcommand};
use config::{Pipeline, RunConfig};
use noidkit::Error;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_AUDIT: u8 = 5;

#[derive(Parser)]
#[command(name = "noidkit", version, about = "Minimal-section pipelines and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rotational Scherk-type graph: height table and surface mesh.
    Scherk(Common),
    /// k-noid contours, truncation ladder, barrier and mirror curves.
    Knoid(Common),
    /// 2k-noid contours, ladder, containment and mirror curves.
    Noid2k(Common),
    /// Fan, twist and mirror-curve audit at the verticals of a k-noid piece.
    Sister(Common),
    /// Fast self-checks of reference surfaces, contours and export.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Sectioned key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra setting as section.key=value; may be repeated.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Exit with a nonzero code when an audit fails.
    #[arg(long)]
    strict: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        e if e.is_validation() => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

fn execute(pipeline: Pipeline, args: &Common) -> Result<bool, Error> {
    let mut cfg = RunConfig::load(pipeline, args.config.as_deref(), &args.set)?;
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    std::fs::create_dir_all(&cfg.out)?;
    cfg.resolved()
        .write_to_file(cfg.out.join("resolved.ini"))
        .map_err(Error::from)?;
    let dir = cfg.out.clone();
    let report = match pipeline {
        Pipeline::Scherk => run::scherk(&cfg, &dir)?,
        Pipeline::Knoid => run::knoid(&cfg, &dir)?,
        Pipeline::Noid2k => run::noid2k(&cfg, &dir)?,
        Pipeline::Sister => run::sister(&cfg, &dir)?,
        Pipeline::Verify => run::verify(&cfg, &dir)?,
    };
    run::write_report(&report, &dir)?;
    print!("{}", report.to_text());
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (pipeline, args) = match &cli.command {
        Command::Scherk(a) => (Pipeline::Scherk, a),
        Command::Knoid(a) => (Pipeline::Knoid, a),
        Command::Noid2k(a) => (Pipeline::Noid2k, a),
        Command::Sister(a) => (Pipeline::Sister, a),
        Command::Verify(a) => (Pipeline::Verify, a),
    };
    match execute(pipeline, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if args.strict || pipeline == Pipeline::Verify => ExitCode::from(EXIT_AUDIT),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
