//! `ptheta`: evaluation, verification pipelines and spectrum scans for the
//! partial theta function.
//!
//! Exit codes: 0 success, 1 verification failure (or a numerical failure
//! that prevented a verdict), 2 usage error.

mod commands;
mod manifest;
mod parse;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use commands::{Failure, Form, PipelineArg, SpectrumArgs, VerifyArgs};
use ptheta::verify::GridSpec;

#[derive(Debug, Parser)]
#[command(name = "ptheta", version, about = "Partial theta function: evaluation, certificates and spectra")]
struct Cli {
    /// Worker threads (default: all available cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct QArgs {
    /// Parameter q as `a+bi`.
    #[arg(long, value_parser = parse::parse_complex, allow_hyphen_values = true, conflicts_with = "q_polar")]
    q: Option<Complex64>,
    /// Parameter q as `r:theta`.
    #[arg(long, value_parser = parse::parse_polar, allow_hyphen_values = true)]
    q_polar: Option<Complex64>,
}

impl QArgs {
    fn get(&self) -> Option<Complex64> {
        self.q.or(self.q_polar)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate θ, a truncation, Θ*, or G at one point.
    Eval {
        #[command(flatten)]
        q: QArgs,
        /// Argument x as `a+bi`.
        #[arg(long, value_parser = parse::parse_complex, allow_hyphen_values = true)]
        x: Complex64,
        /// Truncation order (required for `--form trunc`).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "theta")]
        form: Form,
        /// Requested bound on the neglected tail.
        #[arg(long, default_value_t = 1e-15)]
        tail_tol: f64,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run a separation certificate and write it as JSON.
    Verify {
        #[arg(value_enum)]
        pipeline: PipelineArg,
        #[arg(long, env = "THETA_SPECTRUM_SEED", default_value_t = 0)]
        seed: u64,
        /// Certificate file; a `.manifest.json` is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Parameter for the `direct` pipeline.
        #[command(flatten)]
        q: QArgs,
        /// Number of leading zeros checked by `direct`.
        #[arg(long, default_value_t = ptheta::zeros::DEFAULT_KMAX)]
        kmax: usize,
        /// Number of radii of the `k2-grid` pipeline.
        #[arg(long, default_value_t = GridSpec::default().count)]
        grid_count: usize,
    },
    /// Locate spectral values of a truncation θ_k in a rectangle.
    Spectrum {
        #[arg(long)]
        k: usize,
        /// `re_lo:re_hi:im_lo:im_hi`.
        #[arg(long, value_parser = parse::parse_region, allow_hyphen_values = true)]
        region: [f64; 4],
        /// Lattice points per side.
        #[arg(long, default_value_t = 241)]
        grid: usize,
        #[arg(long, env = "THETA_SPECTRUM_SEED", default_value_t = 0)]
        seed: u64,
        /// Carry every value over to θ.
        #[arg(long)]
        refine_full: bool,
        /// Catalog JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Catalog as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Draw a catalog as an SVG scatter.
    Plot {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.309)]
        reference_radius: f64,
    },
}

fn run(cli: Cli, argv: &[String]) -> Result<(), Failure> {
    match cli.command {
        Command::Eval {
            q,
            x,
            k,
            form,
            tail_tol,
            json,
        } => {
            let q = q
                .get()
                .ok_or_else(|| Failure::Usage(anyhow::anyhow!("eval needs --q or --q-polar")))?;
            commands::eval(q, x, k, form, tail_tol, json)
        }
        Command::Verify {
            pipeline,
            seed,
            out,
            q,
            kmax,
            grid_count,
        } => commands::verify(
            VerifyArgs {
                pipeline,
                seed,
                out,
                q: q.get(),
                kmax,
                grid: GridSpec {
                    count: grid_count,
                    ..GridSpec::default()
                },
            },
            argv,
        ),
        Command::Spectrum {
            k,
            region,
            grid,
            seed,
            refine_full,
            out,
            csv,
        } => commands::spectrum(
            SpectrumArgs {
                k,
                region,
                grid,
                seed,
                refine_full,
                out,
                csv,
            },
            argv,
        ),
        Command::Plot {
            catalog,
            out,
            reference_radius,
        } => commands::plot(&catalog, &out, reference_radius, argv),
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("usage error: --threads must be at least 1");
            std::process::exit(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
    if let Err(e) = run(cli, &argv) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
