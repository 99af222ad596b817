//! `sensikit` command-line tool.
//!
//! Exit codes: 0 success, 2 usage, configuration or input errors, 3
//! degenerate data, 4 I/O failures.

mod commands;
mod settings;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sensikit::Error;

#[derive(Parser, Debug)]
#[command(name = "sensikit", version, about = "Sobol' and Cramer-von-Mises sensitivity indices")]
struct Cli {
    /// JSON document of default flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Model selection shared by every subcommand.
#[derive(Args, Debug, Default, Clone)]
pub struct ModelArgs {
    /// gfunction, linear, or a built-in name (constant, identity, ishigami).
    #[arg(long)]
    pub model: Option<String>,
    /// g-function coefficients, e.g. `1,2,3`.
    #[arg(long)]
    pub a: Option<String>,
    /// Linear model coefficient of the first input.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Input dimension; a list or range (`2..7`) where a study allows it.
    #[arg(long)]
    pub p: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate every first-order index from a data file or a model.
    Estimate {
        #[command(flatten)]
        model: ModelArgs,
        /// CSV file with header `x1,...,xp,y`.
        #[arg(long, value_name = "FILE")]
        data: Option<PathBuf>,
        /// rank-sobol, rank-cvm, pf-sn, pf-tn or pf-cvm.
        #[arg(long)]
        method: Option<String>,
        /// Sample size (rows for rank methods, N per design for Pick-Freeze).
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        /// Clamp outputs to `[-clip, clip]` before estimating.
        #[arg(long)]
        clip: Option<String>,
    },
    /// Run a replication study and write CSV (and SVG) reports.
    Study {
        /// convergence, mse, dimension or variance-compare.
        kind: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        /// Total model-call budget.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long)]
        reps: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        /// Pick-Freeze sizes for the convergence study.
        #[arg(long)]
        sizes: Option<String>,
        /// `start:stop:step` or a list of alpha values.
        #[arg(long)]
        alpha_grid: Option<String>,
        /// Pick-Freeze estimator compared with the rank estimator.
        #[arg(long)]
        pf_method: Option<String>,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Also write an SVG plot.
        #[arg(long)]
        svg: bool,
    },
    /// Rank estimate of one index with an asymptotic confidence interval.
    Ci {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_name = "FILE")]
        data: Option<PathBuf>,
        /// 1-based input index.
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        level: Option<String>,
        /// Estimate the variance from the sample alone.
        #[arg(long)]
        approx: bool,
        /// Outer Monte-Carlo draws for the model-based variance.
        #[arg(long)]
        n_mc: Option<String>,
    },
    /// Closed-form limiting variances for the linear model.
    AsymptVar {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        p: Option<String>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Degenerate(_) => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("SENSIKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("SENSIKIT_THREADS must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<String, Error> {
    configure_threads()?;
    let doc = settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Estimate {
            model,
            data,
            method,
            n,
            seed,
            clip,
        } => commands::estimate(&doc, &model, data, method, n, seed, clip),
        Command::Study {
            kind,
            model,
            budget,
            reps,
            seed,
            sizes,
            alpha_grid,
            pf_method,
            out,
            svg,
        } => commands::study(
            &doc,
            commands::StudyFlags {
                kind,
                model,
                budget,
                reps,
                seed,
                sizes,
                alpha_grid,
                pf_method,
                out,
                svg,
            },
        ),
        Command::Ci {
            model,
            data,
            index,
            n,
            seed,
            level,
            approx,
            n_mc,
        } => commands::ci(
            &doc,
            commands::CiFlags {
                model,
                data,
                index,
                n,
                seed,
                level,
                approx,
                n_mc,
            },
        ),
        Command::AsymptVar { alpha, p } => commands::asympt_var(&doc, alpha, p),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
