//! `dklattice` — verification suites, operator application, sparse assembly,
//! spectra, Duffin decomposition and the Cauchy marching solver for the
//! discrete Dirac-Kähler toolkit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dklattice::Complex64;
use dklattice_cli::commands::{self, EXIT_USAGE};
use dklattice_cli::config::{parse_boundary, parse_extents, RunConfig, ScalarMode};
use dklattice_cli::suites::Suite;

#[derive(Parser)]
#[command(
    name = "dklattice",
    version,
    about = "Discrete exterior calculus and the Dirac-Kähler system on a 4D Minkowski lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Lattice extents N0,N1,N2,N3 (N0 is the time axis)
    #[arg(long, default_value = "3,3,3,3", value_parser = parse_extents)]
    extents: [usize; 4],
    /// Boundary convention: zero | periodic
    #[arg(long, default_value = "zero", value_parser = parse_boundary)]
    boundary: dklattice::BoundaryMode,
    /// Coefficient field: integer | real | complex
    #[arg(long, default_value = "integer", value_parser = ScalarMode::parse)]
    scalar: ScalarMode,
    /// Seed for every pseudo-random draw
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Relative tolerance for floating identity checks
    #[arg(long, default_value_t = 1e-12)]
    tol_identity: f64,
    /// Relative tolerance for eigen-based constructions
    #[arg(long, default_value_t = 1e-8)]
    tol_eigen: f64,
    /// Output directory for reports and files
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            extents: self.extents,
            boundary: self.boundary,
            scalar: self.scalar,
            seed: self.seed,
            tol_identity: self.tol_identity,
            tol_eigen: self.tol_eigen,
            out_dir: self.out.clone(),
        }
    }
}

#[derive(Args, Clone)]
struct MassArgs {
    /// Real part of the mass parameter
    #[arg(long, default_value_t = 0.0)]
    mass_re: f64,
    /// Imaginary part of the mass parameter
    #[arg(long, default_value_t = 0.0)]
    mass_im: f64,
    /// Real part of the second mass parameter (two-mass system)
    #[arg(long, default_value_t = 0.0)]
    mass2_re: f64,
    /// Imaginary part of the second mass parameter
    #[arg(long, default_value_t = 0.0)]
    mass2_im: f64,
}

impl MassArgs {
    fn mass(&self) -> Complex64 {
        Complex64::new(self.mass_re, self.mass_im)
    }

    fn mass2(&self) -> Complex64 {
        Complex64::new(self.mass2_re, self.mass2_im)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite (exit 0 iff every check passes)
    Verify {
        /// calculus | duality | adjointness | dirac | duffin | gauge | all
        #[arg(value_parser = Suite::parse)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Apply an operator to a form file
    Apply {
        /// coboundary|codifferential|codifferential_star|star|star_inverse|laplacian|dirac_plus|dirac_minus
        op: String,
        /// Input form file (JSON interchange)
        #[arg(long)]
        input: PathBuf,
        /// Output form file
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Assemble an operator matrix (Matrix Market + JSON basis index)
    Assemble {
        /// e.g. coboundary_0, codifferential_2, star_1, laplacian_0, dirac_minus, dk, two_mass, duffin_0
        op: String,
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of an assembled operator (CSV: index, re, im, residual)
    Spectrum {
        op: String,
        /// Number of distinct eigenvalues to extract
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Numerical null space of an assembled operator
    Kernel {
        op: String,
        /// Relative singular-value threshold for the null space
        #[arg(long, default_value_t = 1e-10)]
        tol_kernel: f64,
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Split an inhomogeneous form into its four Duffin pairs
    Decompose {
        /// Input inhomogeneous form file
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        common: Common,
    },
    /// March Cauchy data through the sixteen-equation system
    March {
        /// Initial data: space-like components on t=1, time-like on t=0
        #[arg(long)]
        input: PathBuf,
        /// Number of full time steps
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        mass: MassArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Verify { suite, common } => {
            let cfg = common.config();
            commands::ensure_out_dir(&cfg)?;
            commands::cmd_verify(suite, &cfg)
        }
        Command::Apply {
            op,
            input,
            output,
            common,
        } => {
            let _ = common;
            commands::cmd_apply(&op, &input, &output)
        }
        Command::Assemble { op, mass, common } => {
            let cfg = common.config();
            commands::ensure_out_dir(&cfg)?;
            commands::cmd_assemble(&op, mass.mass(), mass.mass2(), &cfg)
        }
        Command::Spectrum {
            op,
            count,
            mass,
            common,
        } => {
            let cfg = common.config();
            commands::ensure_out_dir(&cfg)?;
            commands::cmd_spectrum(&op, count, mass.mass(), mass.mass2(), &cfg)
        }
        Command::Kernel {
            op,
            tol_kernel,
            mass,
            common,
        } => {
            let cfg = common.config();
            commands::ensure_out_dir(&cfg)?;
            commands::cmd_kernel(&op, mass.mass(), mass.mass2(), tol_kernel, &cfg)
        }
        Command::Decompose {
            input,
            mass,
            common,
        } => {
            let cfg = common.config();
            commands::ensure_out_dir(&cfg)?;
            commands::cmd_decompose(&input, mass.mass(), &cfg)
        }
        Command::March {
            input,
            steps,
            mass,
            common,
        } => {
            let cfg = common.config();
            commands::ensure_out_dir(&cfg)?;
            commands::cmd_march(&input, mass.mass(), steps, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = commands::error_exit_code(&err);
            ExitCode::from(code.max(EXIT_USAGE) as u8)
        }
    }
}
