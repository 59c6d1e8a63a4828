pub mod build;
pub mod eval;
pub mod lm;
pub mod perturb;
pub mod report;
pub mod stats;
pub mod tokenize;

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use implang::corpus::{self, ParallelCorpus, SentenceRecord, Split};
use implang::tokenize::Tokenizer;

use crate::manifest::{self, Run};
use crate::{Cli, Command, Common};

pub fn run(cli: Cli, argv: Vec<String>) -> Result<()> {
    let Cli { common, command } = cli;
    if let Command::Replay(args) = &command {
        let n = manifest::replay(args, &common.out_dir)?;
        println!("replay reproduced {n} outputs");
        return Ok(());
    }
    let name = command.name();
    let mut run = Run::new(&common.out_dir)?;
    match command {
        Command::BuildCorpus(a) => build::run(&a, &common, &mut run)?,
        Command::Tokenize(a) => tokenize::run(&a, &mut run)?,
        Command::Perturb(a) => perturb::run(&a, &common, &mut run)?,
        Command::TrainLm(a) => lm::train(&a, &mut run)?,
        Command::EvalPpl(a) => lm::eval(&a, &common, &mut run)?,
        Command::Genscore(a) => eval::genscore(&a, &mut run)?,
        Command::Separability(a) => eval::separability(&a, &common, &mut run)?,
        Command::Stats(a) => stats::run(&a, &mut run)?,
        Command::Report(a) => report::run(&a, &mut run)?,
        Command::Replay(_) => unreachable!("handled above"),
    }
    run.finish(name, &argv, common.seed)?;
    Ok(())
}

pub fn require_seed(common: &Common, what: &str) -> Result<u64> {
    common
        .seed
        .ok_or_else(|| anyhow!("{what} is randomized and needs an explicit --seed"))
}

/// `whitespace`, `character`, or the path of a BPE tokenizer file.
pub fn load_tokenizer(spec: &str, run: &mut Run) -> Result<Tokenizer> {
    match spec {
        "whitespace" => Ok(Tokenizer::Whitespace),
        "character" => Ok(Tokenizer::Character),
        path => {
            let path = run.input(Path::new(path));
            Tokenizer::load(path).with_context(|| format!("loading tokenizer {}", path.display()))
        }
    }
}

pub fn read_corpus(paths: &[std::path::PathBuf], run: &mut Run) -> Result<ParallelCorpus> {
    for p in paths {
        run.input(p);
    }
    Ok(corpus::read_corpus(paths)?)
}

/// Records of a single-language corpus file, with their split labels.
pub fn read_language(path: &Path, run: &mut Run) -> Result<(String, Vec<(SentenceRecord, Split)>)> {
    let (records, splits) = corpus::read_language_file(run.input(path))?;
    let lang = records
        .first()
        .map(|r| r.lang.clone())
        .ok_or_else(|| anyhow!("{} holds no records", path.display()))?;
    if let Some(r) = records.iter().find(|r| r.lang != lang) {
        return Err(anyhow!("{} mixes languages `{lang}` and `{}`", path.display(), r.lang));
    }
    Ok((
        lang,
        records
            .into_iter()
            .map(|r| {
                let split = splits[&r.id];
                (r, split)
            })
            .collect(),
    ))
}

pub fn units(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}
