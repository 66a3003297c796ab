use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use applause::commands::{self, Session, MODEL_JSON};
use applause::data::Resources;
use applause::formats::read_model;
use applause::server::{self, AppState};
use applause::synth::{self, SynthOptions};
use applause::Config;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "applause", version, about = "Predict applause from talk transcripts")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "applause.toml")]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build labeled examples; writes dataset.jsonl and corpus_stats.json.
    Ingest,
    /// Extract features; writes features.csv.
    Features,
    /// Fit the model; writes model.json, coefficients.csv and diagnostics.json.
    Train,
    /// Per-family and overall cross-validated metrics; writes ablation.csv.
    Eval {
        /// Select the penalty separately inside each fold.
        #[arg(long)]
        nested: bool,
    },
    /// Accuracy against window size; writes window_curve.csv.
    Window {
        #[arg(long)]
        max_window: Option<usize>,
    },
    /// Relative feature importance; writes importance.csv.
    Importance,
    /// Score a draft read from --text or standard input; prints JSON.
    Score {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        text: Option<String>,
    },
    /// Serve the scoring API.
    Serve {
        #[arg(long)]
        addr: Option<String>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Write a synthetic corpus with a planted gratitude signal.
    Synth {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        talks: usize,
    },
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = Config::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    Ok(config)
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let session = |config: Config| Session::open(config);
    match &cli.command {
        Command::Ingest => print_paths(&commands::ingest(&session(load_config(&cli)?)?)?),
        Command::Features => print_paths(&commands::features(&session(load_config(&cli)?)?)?),
        Command::Train => print_paths(&commands::train(&session(load_config(&cli)?)?)?),
        Command::Eval { nested } => {
            let mut config = load_config(&cli)?;
            config.nested |= nested;
            print_paths(&commands::eval(&session(config)?)?)
        }
        Command::Window { max_window } => {
            let mut config = load_config(&cli)?;
            if let Some(w) = max_window {
                config.max_window = *w;
            }
            print_paths(&commands::window(&session(config)?)?)
        }
        Command::Importance => print_paths(&commands::importance(&session(load_config(&cli)?)?)?),
        Command::Score { model, text } => {
            let config = load_config(&cli)?;
            let model_path = model.clone().unwrap_or_else(|| config.out_dir.join(MODEL_JSON));
            let loaded = read_model(&model_path)?;
            let resources = Resources::load(&config)?;
            let text = match text {
                Some(t) => t.clone(),
                None => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
                    s
                }
            };
            let results = commands::score(&loaded.model, &resources, &text)?;
            println!("{}", serde_json::to_string_pretty(&results)?);
        }
        Command::Serve { addr, model } => {
            let config = load_config(&cli)?;
            let model_path = model.clone().unwrap_or_else(|| config.out_dir.join(MODEL_JSON));
            let loaded = read_model(&model_path)?;
            let state = AppState::new(loaded.model, Resources::load(&config)?, loaded.sha256)?;
            let addr = addr.clone().unwrap_or(config.addr.clone());
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(&addr, Arc::new(state), config.cors_origin.as_deref()))?;
        }
        Command::Synth { dir, talks } => {
            let mut opts = SynthOptions::fixture();
            opts.talks = *talks;
            if let Some(seed) = cli.seed {
                opts.seed = seed;
            }
            synth::write_corpus(dir, &synth::generate(&opts)).with_context(|| format!("writing {}", dir.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
