mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Numerical laboratory for weighted composition operators on the disc.
#[derive(Debug, Parser)]
#[command(name = "wcolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Truncation order N of the finite sections.
    #[arg(long, default_value_t = 64)]
    pub trunc: usize,
    /// Sampling grid size (default depends on --trunc).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Sampling circle radius (default depends on --trunc).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub horizon: usize,
    /// Disc quadrature nodes as "Kr,Ktheta".
    #[arg(long, default_value = "48,128")]
    pub quad_nodes: String,
    /// Lambda in the H^2(d) transfer bound.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_cap: f64,
    /// Exit with status 3 on an inconclusive verdict.
    #[arg(long)]
    pub strict: bool,
    /// Directory for report.json (and trace.csv with --csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report to stdout.
    #[arg(long)]
    pub json: bool,
    /// Emit the trace as CSV.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    /// Weight: a coefficient array or a JSON object.
    #[arg(long, default_value = "[1]")]
    pub weight: String,
    /// Map as JSON, e.g. '{"kind":"series","coeffs":[0,0.5]}'.
    #[arg(long)]
    pub map: String,
    /// h2, a2, a2alpha:<a>, h2d:bergman:<a>, h2d:power:<a> or h2d:ones.
    #[arg(long, default_value = "h2")]
    pub space: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convergence mode of the iterates.
    Classify {
        #[command(flatten)]
        op: OperatorArgs,
        /// Assert that the essential spectral radius is below one.
        #[arg(long)]
        assert_re_below_one: bool,
        #[command(flatten)]
        common: Common,
    },
    /// T^n f by pointwise iteration and by matrix powers.
    Iterate {
        #[command(flatten)]
        op: OperatorArgs,
        /// Coefficients of f.
        #[arg(long, default_value = "[1]")]
        f: String,
        /// Number of iterations.
        #[arg(short = 'n', long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Isometry tests and constructions.
    Isometry {
        #[command(subcommand)]
        action: IsometryAction,
    },
    /// Spectrum formulas and the Gelfand radius estimate.
    Spectrum {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Transfers from other spaces.
    Transfer {
        #[command(subcommand)]
        action: TransferAction,
    },
    /// Power-boundedness and kernel-growth probes.
    Probe {
        #[command(flatten)]
        op: OperatorArgs,
        /// Base point of the kernel probe.
        #[arg(long, default_value = "0")]
        w0: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum IsometryAction {
    /// H^2 test, or the Bergman moment test on a2 spaces.
    Test {
        #[command(flatten)]
        op: OperatorArgs,
        /// Largest power in the moment test.
        #[arg(long, default_value_t = 10)]
        moments: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Build an isometric weight for a map and test it.
    Construct {
        #[arg(long)]
        map: String,
        /// h2, nfold or symmetric.
        #[arg(long, default_value = "h2")]
        kind: String,
        /// Inner factor theta (h2).
        #[arg(long)]
        theta: Option<String>,
        /// Covering multiplicity (nfold).
        #[arg(long)]
        cover: Option<u32>,
        /// Symmetry of the Blaschke product (symmetric).
        #[arg(long)]
        psi: Option<String>,
        /// Unimodular constant c.
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value_t = 10)]
        moments: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum TransferAction {
    /// C_Phi on the half-plane as a weighted operator on the disc.
    Halfplane {
        /// 'affine:a,b' or 'id'.
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        common: Common,
    },
    /// Hardy-Smirnoff weight for Phi = beta o psi o beta^-1 and its kernel probe.
    Smirnoff {
        /// Taylor coefficients of beta.
        #[arg(long)]
        beta: String,
        /// Disc map psi conjugated by beta.
        #[arg(long)]
        conjugate: String,
        #[arg(long, default_value = "0")]
        w0: String,
        #[command(flatten)]
        common: Common,
    },
    /// H^2(d) norm bound and iterate transfer.
    Weighted {
        #[command(flatten)]
        op: OperatorArgs,
        /// The H^2(d) space, e.g. h2d:power:-0.5.
        #[arg(long, default_value = "h2d:power:-0.5")]
        d: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let (common, result) = match cli.command {
        Command::Classify { op, assert_re_below_one, common } => {
            let r = commands::classify(&op, assert_re_below_one, &common);
            (common, r)
        }
        Command::Iterate { op, f, steps, common } => {
            let r = commands::iterate(&op, &f, steps, &common);
            (common, r)
        }
        Command::Isometry { action } => match action {
            IsometryAction::Test { op, moments, common } => {
                let r = commands::isometry_test(&op, moments, &common);
                (common, r)
            }
            IsometryAction::Construct { map, kind, theta, cover, psi, c, moments, common } => {
                let args = commands::ConstructArgs {
                    map,
                    kind,
                    theta,
                    cover,
                    psi,
                    c,
                    moments,
                };
                let r = commands::isometry_construct(&args, &common);
                (common, r)
            }
        },
        Command::Spectrum { op, common } => {
            let r = commands::spectrum(&op, &common);
            (common, r)
        }
        Command::Transfer { action } => match action {
            TransferAction::Halfplane { phi, common } => {
                let r = commands::transfer_halfplane(&phi, &common);
                (common, r)
            }
            TransferAction::Smirnoff { beta, conjugate, w0, common } => {
                let r = commands::transfer_smirnoff(&beta, &conjugate, &w0, &common);
                (common, r)
            }
            TransferAction::Weighted { op, d, common } => {
                let r = commands::transfer_weighted(&op, &d, &common);
                (common, r)
            }
        },
        Command::Probe { op, w0, common } => {
            let r = commands::probe(&op, &w0, &common);
            (common, r)
        }
    };
    match result.and_then(|out| commands::emit(&out, &common).map(|_| out)) {
        Ok(out) => {
            if common.strict && out.inconclusive {
                eprintln!("inconclusive verdict");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 2 } else { 1 })
        }
    }
}
