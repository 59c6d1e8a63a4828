use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use implang::corpus::{self, AsciiScriptFilter, SourceFiles};

use crate::manifest::Run;
use crate::naming::{file_name, ATTESTED};
use crate::Common;

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    /// Source as TAG=DIR, where DIR holds one line-aligned `<lang>.txt` per
    /// language. Repeatable; ids follow source order.
    #[arg(long = "sources", alias = "source", required = true, value_parser = parse_source)]
    pub sources: Vec<(String, PathBuf)>,

    /// Languages to keep, comma-separated (default: all `.txt` files of the
    /// first source).
    #[arg(long, value_delimiter = ',')]
    pub langs: Vec<String>,

    /// Number of ids assigned to the test split.
    #[arg(long)]
    pub test_size: usize,

    /// Drop ids whose text in this language repeats an earlier id's text.
    #[arg(long)]
    pub dedup_lang: Option<String>,

    /// Drop ids whose text outside this language is mostly ASCII letters.
    #[arg(long)]
    pub ascii_filter: Option<String>,

    /// Language whose words are counted in the statistics (default: first).
    #[arg(long)]
    pub stats_lang: Option<String>,
}

fn parse_source(s: &str) -> Result<(String, PathBuf), String> {
    let (tag, dir) = s.split_once('=').ok_or_else(|| format!("expected TAG=DIR, got `{s}`"))?;
    if tag.is_empty() || dir.is_empty() {
        return Err(format!("expected TAG=DIR, got `{s}`"));
    }
    Ok((tag.to_string(), PathBuf::from(dir)))
}

fn languages_in(dir: &PathBuf) -> Result<Vec<String>> {
    let mut langs: Vec<String> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            name.strip_suffix(".txt").map(str::to_string)
        })
        .collect();
    langs.sort();
    Ok(langs)
}

pub fn run(args: &BuildArgs, common: &Common, run: &mut Run) -> Result<()> {
    let seed = super::require_seed(common, "build-corpus")?;
    let langs = if args.langs.is_empty() {
        languages_in(&args.sources[0].1)?
    } else {
        args.langs.clone()
    };
    if langs.is_empty() {
        bail!("no `<lang>.txt` files in {}", args.sources[0].1.display());
    }
    let sources: Vec<SourceFiles> = args
        .sources
        .iter()
        .map(|(tag, dir)| SourceFiles {
            tag: tag.clone(),
            files: langs
                .iter()
                .map(|l| {
                    let p = dir.join(format!("{l}.txt"));
                    run.input(&p);
                    (l.clone(), p)
                })
                .collect(),
        })
        .collect();
    let mut c = corpus::ingest(&sources)?;
    let ingested = c.len();
    if let Some(lang) = &args.dedup_lang {
        c = corpus::deduplicate(&c, lang)?;
    }
    let deduped = c.len();
    if let Some(key) = &args.ascii_filter {
        if !c.has_language(key) {
            bail!("filter language `{key}` not in corpus");
        }
        let f = AsciiScriptFilter::new(key.clone());
        c = corpus::filter_records(&c, |r| f.accepts(r));
    }
    let filtered = c.len();
    let c = corpus::make_splits(&c, args.test_size, seed)?;
    c.check_alignment()?;

    for lang in &langs {
        let path = run.output(&file_name(lang, ATTESTED, "corpus", "tsv"));
        corpus::write_language_file(&c, lang, &path)?;
    }
    let stats_lang = args.stats_lang.as_ref().unwrap_or(&langs[0]);
    let stats = corpus::stats(&c, stats_lang).map_err(|e| anyhow!(e))?;
    run.write("corpus.stats.tsv", stats.to_tsv())?;
    println!(
        "ingested {ingested} ids, {deduped} after dedup, {filtered} after filtering; {} test",
        args.test_size
    );
    print!("{}", stats.to_tsv());
    Ok(())
}
