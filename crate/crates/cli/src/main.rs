//! `linctx`: type checking, evaluation, traces and context analysis for
//! linear PCF programs.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Output;

#[derive(Parser, Debug)]
#[command(
    name = "linctx",
    version,
    about = "Linear PCF: typing, reduction, traces and linear contexts"
)]
struct Cli {
    /// Human-readable output instead of JSON lines.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

/// Bounds and sampling settings shared by all commands.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Reduction steps per internal run.
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub fuel: u64,
    /// Maximum trace length.
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: u64,
    /// Argument pool file.
    #[arg(long, global = true)]
    pub pool: Option<PathBuf>,
    /// Natural-number literals `0..N` offered as arguments.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub pool_size: u64,
    /// Random seed; the LINCTX_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Generated instances per check.
    #[arg(long, global = true, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Language fragment for generated instances.
    #[arg(long, global = true, value_enum, default_value_t = FragmentArg::Both)]
    pub fragment: FragmentArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FragmentArg {
    Lpcf,
    Nlpcf,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the type of a closed program.
    Typecheck { file: PathBuf },
    /// Evaluate a program, exploring every choice.
    Eval { file: PathBuf },
    /// List the bounded traces of a program.
    Traces { file: PathBuf },
    /// Compare the bounded trace sets of two programs.
    Equiv { left: PathBuf, right: PathBuf },
    /// Classify each reduction of a plugged linear context.
    Lcr {
        /// Context file; the hole is the identifier `HOLE`.
        context: PathBuf,
        #[arg(long)]
        hole_type: String,
        program: PathBuf,
    },
    /// Build the context that recognises a trace.
    Scontext {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        hole_type: String,
    },
    /// Run a metatheory check (`all` runs every one, `list` names them).
    Check { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut run = cli.run.clone();
    if let Ok(seed) = std::env::var("LINCTX_SEED") {
        match seed.trim().parse() {
            Ok(s) => run.seed = s,
            Err(_) => {
                eprintln!("linctx: LINCTX_SEED must be a natural number, got `{seed}`");
                return ExitCode::from(2);
            }
        }
    }
    let mut out = Output::new(cli.pretty);
    let result = match &cli.command {
        Command::Typecheck { file } => commands::typecheck(&mut out, file),
        Command::Eval { file } => commands::eval(&mut out, &run, file),
        Command::Traces { file } => commands::traces(&mut out, &run, file),
        Command::Equiv { left, right } => commands::equiv(&mut out, &run, left, right),
        Command::Lcr {
            context,
            hole_type,
            program,
        } => commands::lcr(&mut out, context, hole_type, program),
        Command::Scontext { trace, hole_type } => commands::scontext(&mut out, trace, hole_type),
        Command::Check { name } => commands::check(&mut out, &run, name),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            out.error(&err);
            ExitCode::from(2)
        }
    }
}
