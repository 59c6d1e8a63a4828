mod commands;
mod manifest;
mod naming;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{build, eval, lm, perturb, report, stats, tokenize};

#[derive(Parser, Debug, Clone)]
#[command(name = "impl", version, about = "Build, perturb and evaluate parallel corpora")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every randomized step. Required by subcommands that sample.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory that receives outputs and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Worker threads (0 = all cores). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Ingest aligned sources, deduplicate, filter and split.
    BuildCorpus(build::BuildArgs),
    /// Train a BPE tokenizer or measure tokens per word.
    #[command(subcommand)]
    Tokenize(tokenize::TokenizeCommand),
    /// Write a perturbed variant of one language.
    Perturb(perturb::PerturbArgs),
    /// Train an n-gram model on the train split of a corpus file.
    TrainLm(lm::TrainArgs),
    /// Score a split with a model: perplexity report plus interchange scores.
    EvalPpl(lm::EvalArgs),
    /// Attested-minus-unattested generalization score over minimal pairs.
    Genscore(eval::GenscoreArgs),
    /// Cross-validated linear SVM over perplexity trajectories.
    Separability(eval::SeparabilityArgs),
    /// Corpus statistics and hypothesis tests.
    #[command(subcommand)]
    Stats(stats::StatsCommand),
    /// Plot perplexity trajectories as SVG.
    Report(report::ReportArgs),
    /// Re-run a recorded manifest and compare every output byte for byte.
    Replay(manifest::ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BuildCorpus(_) => "build-corpus",
            Command::Tokenize(_) => "tokenize",
            Command::Perturb(_) => "perturb",
            Command::TrainLm(_) => "train-lm",
            Command::EvalPpl(_) => "eval-ppl",
            Command::Genscore(_) => "genscore",
            Command::Separability(_) => "separability",
            Command::Stats(_) => "stats",
            Command::Report(_) => "report",
            Command::Replay(_) => "replay",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if cli.common.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.common.threads).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match commands::run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
