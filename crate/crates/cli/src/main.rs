use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use orbit_designs::Error;

#[derive(Parser, Debug)]
#[command(
    name = "orbit-designs",
    version,
    about = "Spherical 2-design orbits of finite orthogonal groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose the representation into isotypic components.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Test whether the orbit of a vector is a spherical 2-design.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Inline JSON array, or a file holding one (or a construct report).
        vector: String,
        /// Rescale the vector to unit length first.
        #[arg(long)]
        normalize: bool,
    },
    /// Build a 2-design orbit in the selected components.
    Construct {
        #[command(flatten)]
        common: Common,
    },
    /// Check matrix-coefficient orthogonality and the trace formula per component.
    SchurCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Write the orbit of a vector as a point set.
    Export {
        #[command(flatten)]
        common: Common,
        /// Inline JSON array, or a file holding one (or a construct report).
        vector: String,
        #[arg(long)]
        normalize: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Group file (JSON with `dim`, `generators`, optional `tol`).
    pub group: PathBuf,
    /// Numerical tolerance; defaults to the file's value or 1e-9.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = orbit_designs::group::DEFAULT_MAX_ORDER)]
    pub max_order: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated component indices defining the target subrepresentation.
    #[arg(long, value_delimiter = ',')]
    pub components: Option<Vec<usize>>,
    /// Act by the regular representation of the generated group instead.
    #[arg(long)]
    pub regular: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Exit status for a finished run: 0 pass, 1 mathematical failure.
pub enum Verdict {
    Pass,
    Fail,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::MultiplicityExceedsDimension { .. }
        | Error::ComponentNotDesign { .. }
        | Error::ZeroProjection
        | Error::NotInSubspace { .. } => 1,
        Error::OrderCapExceeded { .. }
        | Error::DegenerateSplit { .. }
        | Error::UnexpectedCommutantDim(_)
        | Error::StructureMapFailure { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ORBIT_DESIGNS_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
