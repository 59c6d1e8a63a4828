use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::Args;
use implang::corpus::Split;
use implang::ngram::{
    scores_to_tsv, Aggregation, NgramConfig, NgramModel, PerplexityReport, ScoreRecord, Smoothing,
};
use rayon::prelude::*;

use crate::manifest::Run;
use crate::naming::{file_name, parse_file_name};
use crate::Common;

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    /// Corpus file; the model sees its train split, split on whitespace.
    #[arg(long)]
    pub corpus: PathBuf,

    /// Variant name for the model file (default: taken from the corpus file name).
    #[arg(long)]
    pub variant: Option<String>,

    #[arg(long, default_value_t = 3)]
    pub order: usize,

    /// `mle`, `wb` or `addk:<k>`.
    #[arg(long, default_value = "wb")]
    pub smoothing: Smoothing,

    /// Units seen fewer times than this become `<unk>`.
    #[arg(long, default_value_t = 2)]
    pub unk_threshold: u64,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,

    /// Corpus files to score; all must be the model's language. Repeatable.
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,

    #[arg(long, default_value = "test", value_parser = ["train", "test"])]
    pub split: String,

    /// `sentence` (geometric mean of sentence perplexities) or `token`.
    #[arg(long, default_value = "sentence")]
    pub aggregation: Aggregation,

    /// Checkpoint label recorded with every score.
    #[arg(long, default_value = "final")]
    pub checkpoint: String,

    /// Model variant name (default: taken from the model file name).
    #[arg(long)]
    pub model_variant: Option<String>,
}

fn variant_of(path: &std::path::Path, suffix: &str, given: &Option<String>) -> Result<(Option<String>, String)> {
    if let Some(v) = given {
        let lang = parse_file_name(path, suffix).map(|(l, _)| l);
        return Ok((lang, v.clone()));
    }
    parse_file_name(path, suffix)
        .map(|(l, v)| (Some(l), v))
        .ok_or_else(|| anyhow!("cannot read a variant from `{}`; pass it explicitly", path.display()))
}

pub fn train(args: &TrainArgs, run: &mut Run) -> Result<()> {
    let (lang, records) = super::read_language(&args.corpus, run)?;
    let (_, variant) = variant_of(&args.corpus, ".corpus.tsv", &args.variant)?;
    let sentences: Vec<Vec<String>> = records
        .iter()
        .filter(|(_, s)| *s == Split::Train)
        .map(|(r, _)| super::units(&r.text))
        .collect();
    if sentences.is_empty() {
        bail!("{} has no train records", args.corpus.display());
    }
    let config = NgramConfig {
        order: args.order,
        smoothing: args.smoothing,
        unk_threshold: args.unk_threshold,
    };
    let model = NgramModel::train(&sentences, config)?;
    run.write(&file_name(&lang, &variant, "model", "txt"), model.to_file_string())?;
    println!(
        "{lang}/{variant}: order {} {} model, |V| = {}, {} sentences",
        args.order,
        args.smoothing,
        model.support_size(),
        sentences.len()
    );
    Ok(())
}

pub fn eval(args: &EvalArgs, common: &Common, run: &mut Run) -> Result<()> {
    let model = NgramModel::load(run.input(&args.model))?;
    let (model_lang, model_variant) = variant_of(&args.model, ".model.txt", &args.model_variant)?;
    let split: Split = args.split.parse()?;
    let seed = common.seed.unwrap_or(0);
    let mut summary = String::from(
        "#variant\tsplit\tsentences\tperplexity\taggregation\tvocab_size\tinfinite\tcheckpoint\tseed\n",
    );
    let mut scores = Vec::new();
    let mut lang_seen = model_lang.clone();
    for path in &args.corpus {
        let (lang, records) = super::read_language(path, run)?;
        match &lang_seen {
            Some(l) if *l != lang => bail!("{} is `{lang}` but the model is `{l}`", path.display()),
            _ => lang_seen = Some(lang.clone()),
        }
        let (_, variant) = variant_of(path, ".corpus.tsv", &None)?;
        let test: Vec<(u64, Vec<String>)> = records
            .iter()
            .filter(|(_, s)| *s == split)
            .map(|(r, _)| (r.id, super::units(&r.text)))
            .collect();
        let scored: Vec<_> = test.par_iter().map(|(id, u)| (*id, model.score(u))).collect();
        let report = PerplexityReport::from_scores(&scored, args.aggregation, args.checkpoint.clone(), seed)?;
        if !report.infinite.is_empty() {
            log::warn!(
                "{variant}: {} sentences have zero probability; perplexity is infinite",
                report.infinite.len()
            );
        }
        run.write(&file_name(&lang, &variant, "ppl", "tsv"), report.per_sentence_tsv())?;
        summary.push_str(&format!(
            "{variant}\t{split}\t{}\t{}\t{}\t{}\t{}\t{}\t{seed}\n",
            scored.len(),
            report.corpus,
            args.aggregation_name(),
            model.support_size(),
            report.infinite.len(),
            args.checkpoint,
        ));
        scores.extend(scored.iter().map(|(id, s)| ScoreRecord {
            sentence_id: *id,
            variant: variant.clone(),
            log_prob: s.log_prob,
            unit_count: s.unit_count,
            checkpoint: args.checkpoint.clone(),
            seed,
        }));
    }
    let lang = lang_seen.expect("at least one corpus");
    let stage = format!("{}-model", crate::naming::encode_variant(&model_variant));
    print!("{summary}");
    run.write(&format!("{lang}.{stage}.summary.tsv"), summary)?;
    run.write(&format!("{lang}.{stage}.scores.tsv"), scores_to_tsv(&scores))?;
    Ok(())
}

impl EvalArgs {
    fn aggregation_name(&self) -> &'static str {
        match self.aggregation {
            Aggregation::SentenceGeometric => "sentence",
            Aggregation::TokenWeighted => "token",
        }
    }
}
