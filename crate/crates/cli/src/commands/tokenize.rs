use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};
use implang::corpus::Split;
use implang::tokenize::{self, Tokenizer};

use crate::manifest::Run;

#[derive(Subcommand, Debug, Clone)]
pub enum TokenizeCommand {
    /// Train a BPE tokenizer on the train split of one corpus file.
    Train(TrainArgs),
    /// Encode every record of a corpus file, one space-joined line per record.
    Encode(EncodeArgs),
    /// Tokens per word of one or more tokenizers over corpus files.
    Tcw(TcwArgs),
}

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Target vocabulary size (default: 40% of the training word types).
    #[arg(long)]
    pub vocab_size: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct EncodeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// `whitespace`, `character` or a tokenizer file.
    #[arg(long)]
    pub tokenizer: String,
}

#[derive(Args, Debug, Clone)]
pub struct TcwArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    /// `whitespace`, `character` or a tokenizer file. Repeatable.
    #[arg(long, required = true, num_args = 1..)]
    pub tokenizer: Vec<String>,
}

pub fn run(cmd: &TokenizeCommand, run: &mut Run) -> Result<()> {
    match cmd {
        TokenizeCommand::Train(a) => train(a, run),
        TokenizeCommand::Encode(a) => encode(a, run),
        TokenizeCommand::Tcw(a) => tcw(a, run),
    }
}

fn train(args: &TrainArgs, run: &mut Run) -> Result<()> {
    let (lang, records) = super::read_language(&args.corpus, run)?;
    let texts: Vec<&str> = records
        .iter()
        .filter(|(_, s)| *s == Split::Train)
        .map(|(r, _)| r.text.as_str())
        .collect();
    let size = args
        .vocab_size
        .unwrap_or_else(|| tokenize::vocab_heuristic(texts.iter().copied()));
    let tok = Tokenizer::train_bpe(texts.iter().copied(), size)?;
    let body = tok.to_file_string().expect("BPE tokenizers serialize");
    run.write(&format!("{lang}.bpe.tokenizer.txt"), body)?;
    println!("{lang}: trained {tok} on {} sentences", texts.len());
    Ok(())
}

fn encode(args: &EncodeArgs, run: &mut Run) -> Result<()> {
    let tok = super::load_tokenizer(&args.tokenizer, run)?;
    let (lang, records) = super::read_language(&args.corpus, run)?;
    let mut out = String::new();
    for (r, _) in &records {
        out.push_str(&format!("{}\t{}\n", r.id, tok.encode(&r.text).render()));
    }
    run.write(&format!("{lang}.encoded.tsv"), out)?;
    Ok(())
}

fn tcw(args: &TcwArgs, run: &mut Run) -> Result<()> {
    let tokenizers = args
        .tokenizer
        .iter()
        .map(|t| Ok((t.clone(), super::load_tokenizer(t, run)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = String::from("#lang\ttokenizer\ttokens\twords\ttcw\n");
    for path in &args.corpus {
        let (lang, records) = super::read_language(path, run)?;
        for (name, tok) in &tokenizers {
            let t = tokenize::tcw(tok, records.iter().map(|(r, _)| r.text.as_str()))?;
            out.push_str(&format!("{lang}\t{name}\t{}\t{}\t{:.6}\n", t.tokens, t.words, t.value()));
        }
    }
    print!("{out}");
    run.write("tcw.tsv", out)?;
    Ok(())
}
