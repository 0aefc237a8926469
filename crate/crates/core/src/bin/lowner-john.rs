//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a proved bound failed, 2 usage or input error,
//! 3 solver failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use lowner_john::ellipsoids::{john_of_cube_section, lowner_symmetric};
use lowner_john::experiments::{
    conjecture_scan, run_suite, ExperimentKind, SubspaceSource, SuiteConfig, SuiteJob,
    EXPERIMENT_EPS,
};
use lowner_john::frames::project_standard_basis;
use lowner_john::majorization::{construct_realization, NormProfile};
use lowner_john::polytopes::{
    cross_projection, equality_subspace, estimate_volume, polytope_from_frame, volume,
};
use lowner_john::tolerances::{DEFAULT_EPS, K_EXACT};
use lowner_john::{Error, FrameSet, Subspace};

#[derive(Parser)]
#[command(
    name = "lowner-john",
    version,
    about = "Unit decompositions, Löwner/John ellipsoids and polytope volume bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a unit decomposition with prescribed squared norms.
    Realize {
        /// Comma-separated squared norms.
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Löwner or John ellipsoids; prints the volume ratio to the unit ball.
    Ellipsoid {
        #[command(subcommand)]
        which: EllipsoidCommand,
    },
    /// Exact (or estimated) volume of a cube section or cross-polytope projection.
    Volume {
        #[command(subcommand)]
        body: VolumeCommand,
    },
    /// Write the equality-case subspace for k | n.
    EqualityCase {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the bounds on random (or equality-case) subspaces; writes CSV.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "ellipsoid,volume")]
        experiments: Vec<String>,
        /// Use the equality-case subspace instead of random ones.
        #[arg(long)]
        equality: bool,
        #[arg(long, default_value_t = EXPERIMENT_EPS)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan random subspaces against the 2^{±(n-k)/2} bounds; prints JSON.
    ConjectureScan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Run a JSON suite configuration; writes CSV.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EllipsoidCommand {
    /// Löwner ellipsoid of the symmetric hull of a frame.
    Lowner {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// John ellipsoid of the cube section by a subspace.
    John {
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VolumeCommand {
    CubeSection(VolumeArgs),
    CrossProjection(VolumeArgs),
}

#[derive(clap::Args)]
struct VolumeArgs {
    #[arg(long)]
    subspace: PathBuf,
    /// Monte Carlo sample count, used when k exceeds the exact range.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Realize { c, k, out } => {
            let n = c.len();
            let frame = construct_realization(&NormProfile::new(k, c)?, n)?;
            write_json(&frame, out.as_deref())?;
        }
        Command::Ellipsoid { which } => match which {
            EllipsoidCommand::Lowner { frame, eps, out } => {
                let frame: FrameSet = read_json(&frame)?;
                let sol = lowner_symmetric(frame.vectors(), eps)?;
                if let Some(path) = out {
                    write_json(&sol.ellipsoid, Some(&path))?;
                }
                println!("{}", sol.ellipsoid.volume_ratio());
            }
            EllipsoidCommand::John { subspace, eps, out } => {
                let h: Subspace = read_json(&subspace)?;
                let e = john_of_cube_section(&h, eps)?;
                if let Some(path) = out {
                    write_json(&e, Some(&path))?;
                }
                println!("{}", e.volume_ratio());
            }
        },
        Command::Volume { body } => {
            let (args, section) = match body {
                VolumeCommand::CubeSection(a) => (a, true),
                VolumeCommand::CrossProjection(a) => (a, false),
            };
            let h: Subspace = read_json(&args.subspace)?;
            let frame = project_standard_basis(&h);
            let p = if section {
                polytope_from_frame(&frame)?
            } else {
                cross_projection(&frame)?
            };
            if h.k() <= K_EXACT {
                println!("{}", volume(&p)?);
            } else {
                let est = estimate_volume(&p, args.samples, args.seed)?;
                println!("{} ± {}", est.estimate, est.std_error);
            }
        }
        Command::EqualityCase { n, k, out } => {
            write_json(&equality_subspace(n, k)?, out.as_deref())?;
        }
        Command::Verify {
            n,
            k,
            trials,
            seed,
            experiments,
            equality,
            eps,
            out,
        } => {
            let experiments = experiments
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<ExperimentKind>())
                .collect::<Result<Vec<_>, _>>()?;
            let source = if equality {
                SubspaceSource::Equality
            } else {
                SubspaceSource::Haar
            };
            let config = SuiteConfig {
                jobs: vec![SuiteJob {
                    n,
                    k,
                    trials,
                    seed,
                    source,
                }],
                experiments,
                eps,
            };
            let output = run_suite(&config)?;
            write_text(&output.csv, out.as_deref())?;
            return Ok(output.exit_code() as u8);
        }
        Command::ConjectureScan { n, k, trials, seed } => {
            let summary = conjecture_scan(n, k, trials, seed)?;
            write_json(&summary, None)?;
            if !summary.ball2_violations.is_empty() {
                return Ok(1);
            }
        }
        Command::Suite { config, out } => {
            let config: SuiteConfig = read_json(&config)?;
            let output = run_suite(&config)?;
            write_text(&output.csv, out.as_deref())?;
            return Ok(output.exit_code() as u8);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::NotConverged { .. }
                | Error::NotPositiveDefinite
                | Error::RankDeficient { .. } => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
