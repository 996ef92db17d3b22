//! `pdx`: paradoxical decompositions, invariant measures and crossed-product
//! witnesses from the command line.
//!
//! Exit status: 0 when a question was decided or a certificate verified,
//! 2 when a bounded search found nothing, 1 on any error.

mod cmd;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::io::{ParseError, Sink};

#[derive(Parser)]
#[command(name = "pdx", version, about = "Certificate-producing toolkit for paradoxical group actions")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for commands that fan out over independent inputs.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Words, balls, orders and colourings in free products of cyclic groups.
    #[command(subcommand)]
    Grp(cmd::grp::GrpCmd),
    /// Boolean algebra of clopen sets.
    #[command(subcommand)]
    Clopen(cmd::clopen::ClopenCmd),
    /// Search and verification of paradoxical decompositions.
    #[command(subcommand)]
    Paradox(cmd::paradox::ParadoxCmd),
    /// Exact LP for invariant measures on a finite window.
    #[command(subcommand)]
    Measure(cmd::measure::MeasureCmd),
    /// Bounded computations in the type semigroup.
    #[command(subcommand)]
    Tsg(cmd::tsg::TsgCmd),
    /// Symbolic crossed-product algebra.
    #[command(subcommand)]
    Cp(cmd::cp::CpCmd),
    /// Regenerate the bundled example corpus.
    Demo(cmd::demo::DemoArgs),
}

/// How a successful command ended.
pub enum Status {
    Decided,
    NotFound,
}

pub struct Ctx {
    pub sink: Sink,
    pub seed: u64,
}

fn error_code(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<paradox_core::Error>() {
        return e.code();
    }
    if err.downcast_ref::<ParseError>().is_some() || err.downcast_ref::<serde_json::Error>().is_some() {
        return "E_PARSE";
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return "E_IO";
    }
    "E_INTERNAL"
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let ctx = Ctx { sink: Sink { path: cli.output }, seed: cli.seed };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build()?;
    pool.install(|| match cli.command {
        Command::Grp(c) => cmd::grp::run(c, &ctx),
        Command::Clopen(c) => cmd::clopen::run(c, &ctx),
        Command::Paradox(c) => cmd::paradox::run(c, &ctx),
        Command::Measure(c) => cmd::measure::run(c, &ctx),
        Command::Tsg(c) => cmd::tsg::run(c, &ctx),
        Command::Cp(c) => cmd::cp::run(c, &ctx),
        Command::Demo(a) => cmd::demo::run(a, &ctx),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(Status::Decided) => ExitCode::SUCCESS,
        Ok(Status::NotFound) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error[{}]: {err:#}", error_code(&err));
            ExitCode::from(1)
        }
    }
}
