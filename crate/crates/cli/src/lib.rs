//! Command-line runner: configuration, persistence and the oracle-check gate.

pub mod cli;
pub mod commands;
pub mod error;
pub mod matrix;
pub mod output;
pub mod params;

use std::path::PathBuf;

use cli::{Cli, Command};
use commands::{Globals, DEFAULT_SEED};
use error::{CliError, CliResult};
use output::Format;
use params::ConfigFile;

pub fn run(cli: Cli) -> CliResult<()> {
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let fg = file.as_ref().map(|f| &f.globals);
    let globals = Globals {
        seed: cli.seed.or(fg.and_then(|g| g.seed)).unwrap_or(DEFAULT_SEED),
        out: cli
            .out
            .or_else(|| fg.and_then(|g| g.out.clone()))
            .unwrap_or_else(|| PathBuf::from("results")),
        format: cli.format.or(fg.and_then(|g| g.format)).unwrap_or(Format::Csv),
    };
    if let Some(n) = cli.threads.or(fg.and_then(|g| g.threads)) {
        if n == 0 {
            return Err(CliError::Config("threads must be positive".into()));
        }
        // fails only if a pool already exists, in which case it is reused
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let file = file.as_ref();
    let name = cli.command.name();
    match cli.command {
        Command::Entropy(a) => commands::matrices::run_entropy(ConfigFile::merge(file, name, &a)?, &globals),
        Command::Renyi(a) => commands::matrices::run_renyi(ConfigFile::merge(file, name, &a)?, &globals),
        Command::Relative(a) => commands::matrices::run_relative(ConfigFile::merge(file, name, &a)?, &globals),
        Command::OracleCheck(a) => commands::oracle::run(ConfigFile::merge(file, name, &a)?, &globals),
        Command::Kitaev(a) => commands::kitaev::run(ConfigFile::merge(file, name, &a)?, &globals),
        Command::Cfs(a) => commands::cfs::run(ConfigFile::merge(file, name, &a)?, &globals),
        Command::Diamond(a) => commands::diamond::run(ConfigFile::merge(file, name, &a)?, &globals),
        Command::RandomDensity(a) => {
            commands::matrices::run_random_density(ConfigFile::merge(file, name, &a)?, &globals)
        }
    }
}
