use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use giftex::behavior::FeatureSet;
use giftex::counting::{brute_force_count, count_trajectories, BRUTE_FORCE_MAX_PLAYERS};
use giftex::engine::StealLimits;
use giftex::harness::{
    export, game_rng, play, run_experiment, EffectReport, ExperimentConfig, ExperimentReport, ExportFormat, GameSetup,
    ModelKind,
};
use giftex::Error;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "giftex", version, about = "Simulate and count steal-and-displace gift exchanges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and print the outcome.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        players: u32,
        #[arg(long, env = "GIFTEX_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated subset of PI, SC, AD, BS (default: none).
        #[arg(long, default_value = "", value_parser = parse_features)]
        features: FeatureSet,
        #[arg(long, value_enum, default_value_t = Model::Independent)]
        model: Model,
        /// Print every action.
        #[arg(long)]
        trace: bool,
    },
    /// Run the 48-condition factorial experiment and export the summaries.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Games per condition (overrides the config file).
        #[arg(long)]
        games: Option<usize>,
        /// Base seed (overrides the config file).
        #[arg(long, env = "GIFTEX_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Worker threads (default: all cores).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: Option<u32>,
    },
    /// Print the exact number of game trajectories.
    Count {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        players: u32,
        /// Lifetime steal limit per gift; 0 means unlimited.
        #[arg(long, default_value_t = 0)]
        lifetime: u32,
        /// Include seat 1's final swap.
        #[arg(long)]
        with_swap: bool,
        /// Enumerate every trajectory instead of using the formula.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Independent,
    Correlated,
    Negative,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Independent => ModelKind::Independent,
            Model::Correlated => ModelKind::Correlated,
            Model::Negative => ModelKind::Negative,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_features(s: &str) -> Result<FeatureSet, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn simulate(players: u32, seed: u64, features: FeatureSet, model: ModelKind, trace: bool) -> giftex::Result<()> {
    let config = ExperimentConfig { n_players: players as usize, base_seed: seed, ..Default::default() };
    config.validate()?;
    let mut rng = game_rng(seed, model, 0);
    let setup = GameSetup::generate(&config, model, &mut rng)?;
    let result = play(&setup, &config, features, &mut rng)?;

    let mut out = io::stdout().lock();
    writeln!(out, "players {players}, model {model}, features {features}, seed {seed}")?;
    let strategies: Vec<String> =
        setup.strategies.iter().enumerate().map(|(i, k)| format!("P{}={k}", i + 1)).collect();
    writeln!(out, "strategies: {}", strategies.join(" "))?;
    if trace {
        for record in &result.trajectory {
            writeln!(out, "{record}")?;
        }
    }
    let allocation: Vec<String> =
        result.final_ownership.iter().enumerate().map(|(i, g)| format!("P{}:{g}", i + 1)).collect();
    writeln!(out, "final allocation: {}", allocation.join(" "))?;
    writeln!(out, "steals: {}", result.steal_count)?;
    let chains: Vec<String> = result.chain_lengths.iter().map(usize::to_string).collect();
    writeln!(out, "chain lengths: {}", chains.join(" "))?;
    Ok(())
}

fn experiment(
    config_path: Option<PathBuf>,
    games: Option<usize>,
    seed: Option<u64>,
    out: PathBuf,
    format: Format,
    jobs: Option<u32>,
) -> giftex::Result<()> {
    let mut config = match config_path {
        Some(path) => ExperimentConfig::load(&path).map_err(|e| match e {
            Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
            other => other,
        })?,
        None => ExperimentConfig::default(),
    };
    if let Some(games) = games {
        config.games_per_condition = games;
    }
    if let Some(seed) = seed {
        config.base_seed = seed;
    }
    config.validate()?;
    let summaries = run_experiment(&config, jobs.map(|j| j as usize))?;
    let effects = EffectReport::compute(&summaries)?;
    let report = ExperimentReport::new(config, summaries, effects);
    let format = match format {
        Format::Csv => ExportFormat::Csv,
        Format::Json => ExportFormat::Json,
    };
    let path = export(&report, format, &out)?;
    writeln!(
        io::stdout(),
        "{} conditions x {} games written to {}",
        report.conditions.len(),
        report.config.games_per_condition,
        path.display()
    )?;
    Ok(())
}

fn count(players: u32, lifetime: u32, with_swap: bool, oracle: bool) -> giftex::Result<()> {
    let n = players as usize;
    let mut total = if oracle {
        if n > BRUTE_FORCE_MAX_PLAYERS {
            return Err(Error::InvalidArgument(format!(
                "--oracle enumerates every trajectory and is limited to {BRUTE_FORCE_MAX_PLAYERS} players"
            )));
        }
        brute_force_count(n, StealLimits::new(1, lifetime))?
    } else {
        count_trajectories(n, lifetime)?
    };
    if with_swap {
        total *= n;
    }
    writeln!(io::stdout(), "{total}")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { players, seed, features, model, trace } => {
            simulate(players, seed, features, model.into(), trace)
        }
        Command::Experiment { config, games, seed, out, format, jobs } => {
            experiment(config, games, seed, out, format, jobs)
        }
        Command::Count { players, lifetime, with_swap, oracle } => count(players, lifetime, with_swap, oracle),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("giftex: {e}");
            match e {
                Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
