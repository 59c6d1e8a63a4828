use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use implang::eval::{self, FeatureLayout, SvmConfig, TrajectoryTable};
use implang::ngram::{self, ScoreFile};
use implang::nptree;

use crate::manifest::Run;
use crate::naming::ATTESTED;
use crate::Common;

#[derive(Args, Debug, Clone)]
pub struct GenscoreArgs {
    /// Minimal pairs written by an NP perturbation.
    #[arg(long)]
    pub pairs: PathBuf,

    /// Scores from the model trained on the attested variant, covering both
    /// sides of every pair.
    #[arg(long)]
    pub att_scores: PathBuf,

    /// Scores from the model trained on the perturbed variant.
    #[arg(long)]
    pub unatt_scores: PathBuf,

    #[arg(long, default_value = ATTESTED)]
    pub att_variant: String,

    /// Variant name of the perturbed side, e.g. `np:dnNa`.
    #[arg(long)]
    pub unatt_variant: String,

    /// Only use scores recorded at this checkpoint.
    #[arg(long)]
    pub checkpoint: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SeparabilityArgs {
    /// Trajectory table with `language variant label ppl@<ckpt>_s<seed>...` columns.
    #[arg(long)]
    pub trajectories: PathBuf,

    #[arg(long, default_value_t = SvmConfig::default().folds)]
    pub folds: usize,

    /// Regularization strength.
    #[arg(long, default_value_t = SvmConfig::default().lambda)]
    pub lambda: f64,

    #[arg(long, default_value_t = SvmConfig::default().iterations)]
    pub iterations: usize,

    /// `concat` keeps every (checkpoint, seed) value; `mean` averages seeds.
    #[arg(long, default_value = "concat")]
    pub layout: FeatureLayout,
}

fn load_scores(path: &PathBuf, checkpoint: &Option<String>, run: &mut Run) -> Result<ScoreFile> {
    let mut file = ngram::ingest_scores(run.input(path))?;
    if let Some(c) = checkpoint {
        file.records.retain(|r| &r.checkpoint == c);
        if file.records.is_empty() {
            bail!("{} has no scores at checkpoint `{c}`", path.display());
        }
    }
    Ok(file)
}

pub fn genscore(args: &GenscoreArgs, run: &mut Run) -> Result<()> {
    let pairs = nptree::read_pairs(run.input(&args.pairs))?;
    let att = load_scores(&args.att_scores, &args.checkpoint, run)?;
    let unatt = load_scores(&args.unatt_scores, &args.checkpoint, run)?;
    let joined = eval::join_minimal_pairs(&pairs, &att, &unatt, &args.att_variant, &args.unatt_variant)?;
    let result = eval::genscore(&joined)?;
    let mut indicators = String::from("#sentence_id\tatt_model_prefers_att\tunatt_model_prefers_unatt\n");
    for i in &result.indicators {
        indicators.push_str(&format!("{}\t{}\t{}\n", i.id, u8::from(i.att), u8::from(i.unatt)));
    }
    print!("{}", result.to_tsv());
    run.write("genscore.tsv", result.to_tsv())?;
    run.write("genscore.pairs.tsv", indicators)?;
    Ok(())
}

pub fn separability(args: &SeparabilityArgs, common: &Common, run: &mut Run) -> Result<()> {
    let seed = super::require_seed(common, "separability")?;
    let table = TrajectoryTable::load(run.input(&args.trajectories))?;
    let matrix = table.matrix(args.layout)?;
    let config = SvmConfig {
        folds: args.folds,
        lambda: args.lambda,
        iterations: args.iterations,
        seed,
    };
    let report = eval::svm_separability(&matrix, &config)?;
    let mut predictions = String::from("#language\tvariant\tlabel\tpredicted\tfold\n");
    for (i, row) in table.rows.iter().enumerate() {
        predictions.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            row.language, row.variant, row.label, report.predictions[i], report.folds[i]
        ));
    }
    print!("{}", report.to_tsv());
    run.write("separability.tsv", report.to_tsv())?;
    run.write("separability.predictions.tsv", predictions)?;
    Ok(())
}
