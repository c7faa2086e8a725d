use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use disciso_cli::{parse_angle, parse_triple, run, CommandKind, ExperimentConfig, UsageError};

#[derive(Parser, Debug)]
#[command(name = "disciso", version, about = "Experiments on discretized linear isometries of R^n")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Mean rate of injectivity per step over random sequences (CSV)
    TauCurve,
    /// Picture of the image set after k steps (PGM)
    GammaImage,
    /// Rate of injectivity of one sequence, with predictions for one step
    TauSingle,
    /// Difference frequencies of the image set (CSV)
    RhoMap,
    /// Cross-validation report; exit status 1 if any check fails
    Validate,
    /// Epsilon-translations of the image set (CSV)
    Translations,
    /// Apply the discretized rotations to a PGM/PPM raster
    RotateImage,
    /// Box-counting equidistribution discrepancy of P·x mod Z^n
    Equidistribution,
}

#[derive(Args, Debug)]
struct Opts {
    /// Dimension n
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,
    /// Window radius R (infinity norm)
    #[arg(long, global = true, default_value_t = 500.0)]
    radius: f64,
    /// Number of steps (default depends on the command)
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Number of independent trials
    #[arg(long, global = true, default_value_t = 50)]
    trials: usize,
    /// Master seed of every random draw
    #[arg(long, global = true, default_value_t = disciso_cli::config::DEFAULT_SEED)]
    seed: u64,
    /// Fixed rotation angle, e.g. pi/4 or 0.3
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_angle)]
    theta: Option<f64>,
    /// Fixed rational rotation p,q,r with p²+q²=r²
    #[arg(long, global = true, value_parser = parse_triple)]
    pythagorean: Option<[i64; 3]>,
    /// Difference box radius (search radius for translations)
    #[arg(long, global = true)]
    vmax: Option<i64>,
    /// Translation threshold
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Bins per axis for the discrepancy
    #[arg(long, global = true, default_value_t = 10)]
    bins: usize,
    /// Several step counts for gamma-image, e.g. 0,2,5,50
    #[arg(long, global = true, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    /// Input raster
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output file (stdout for text output when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn kind(cmd: Cmd) -> CommandKind {
    match cmd {
        Cmd::TauCurve => CommandKind::TauCurve,
        Cmd::GammaImage => CommandKind::GammaImage,
        Cmd::TauSingle => CommandKind::TauSingle,
        Cmd::RhoMap => CommandKind::RhoMap,
        Cmd::Validate => CommandKind::Validate,
        Cmd::Translations => CommandKind::Translations,
        Cmd::RotateImage => CommandKind::RotateImage,
        Cmd::Equidistribution => CommandKind::Equidistribution,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = kind(cli.command);
    let o = cli.opts;
    let config = ExperimentConfig {
        command,
        dim: o.dim,
        radius: o.radius,
        kmax: o.kmax.unwrap_or(command.default_kmax()),
        trials: o.trials,
        seed: o.seed,
        theta: o.theta,
        pythagorean: o.pythagorean,
        vmax: o.vmax,
        eps: o.eps,
        bins: o.bins,
        ks: o.ks,
        input: o.input,
        output: o.out,
    };
    match run(&config) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
