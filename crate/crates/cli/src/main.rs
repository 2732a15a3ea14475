//! `hypercert`: certified lower bounds for clipped ice-cream-cone volumes in
//! hyperbolic 3-space and the valence, rank and homology bounds built on them.
//!
//! Exit status: 0 on success, 1 when a certification or check fails, 2 for
//! invalid input (including an unmet rank-bound hypothesis).

mod args;
mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hypercert_core::Error;

use args::{Cli, Command, Format};
use commands::BoundArgs;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Invalid(String),
    Check(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Invalid(s) | CliError::Check(s) => f.write_str(s),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Uncertified { .. } | Error::PartitionCell { .. } | Error::Quadrature { .. }) => 1,
            CliError::Check(_) => 1,
            CliError::Core(_) | CliError::Invalid(_) | CliError::Io(_) => 2,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let quad = commands::quadrature(g.quad_tol)?;
    log::debug!("{g:?}");
    let report = match &cli.command {
        Command::Constants => commands::constants(&quad)?,
        Command::VerifyLemma => commands::verify_lemma(g.slack)?,
        Command::Certify {
            epsilon,
            r_big,
            c,
            max_depth,
        } => commands::certify(*epsilon, *r_big, *c, *max_depth, g.slack)?,
        Command::Optimize {
            epsilon,
            grid,
            max_depth,
        } => commands::optimize(*epsilon, grid, *max_depth, &quad)?,
        Command::Bound {
            volume,
            cusped,
            prime,
            epsilon,
            r_big,
            c,
        } => {
            let custom = match (epsilon, r_big, c) {
                (Some(e), Some(r), Some(c)) => Some((*e, *r, *c)),
                _ => None,
            };
            let a = BoundArgs {
                volume: *volume,
                cusped: *cusped,
                prime: *prime,
                custom,
            };
            commands::bound(&a, g.slack, &quad)?
        }
        Command::McCheck { shape, params } => commands::mc_check(*shape, params.as_deref(), g.samples, g.seed)?,
    };
    let text = match g.format {
        Format::Json => render::json(&report)? + "\n",
        Format::Csv => render::csv(&report)?,
        Format::Human => render::human(&report),
    };
    match &g.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if let commands::Report::McCheck(m) = &report {
        if !m.within_three_sigma {
            return Err(CliError::Check(format!(
                "Monte-Carlo estimate is {:.2} standard errors from the closed form",
                m.z_score
            )));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("HYPERCERT_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(Error::Uncertified { witness: cell, .. } | Error::PartitionCell { cell, .. }) = &e {
                eprintln!(
                    "witness cell: {}",
                    serde_json::to_string(cell.as_ref()).unwrap_or_else(|_| format!("{cell:?}"))
                );
            }
            ExitCode::from(e.exit_code())
        }
    }
}
