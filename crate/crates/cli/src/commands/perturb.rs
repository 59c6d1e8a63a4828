use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use implang::corpus::{self, ParallelCorpus};
use implang::nptree::{self, CategoryMap, NpPattern};
use implang::perturb::{self, PerturbationSpec};

use crate::manifest::Run;
use crate::naming::file_name;
use crate::Common;

#[derive(Args, Debug, Clone)]
pub struct PerturbArgs {
    /// Corpus file of the language to perturb.
    #[arg(long)]
    pub corpus: PathBuf,

    /// Perturbation spec, e.g. `reverse_full`, `shuffle_local:w=3:unit=token`,
    /// or `np:<pattern>` with a pattern such as `dnNa` or `random`.
    #[arg(long, value_parser = valid_spec)]
    pub spec: String,

    /// `whitespace`, `character` or a tokenizer file; needed for `unit=token`.
    #[arg(long)]
    pub tokenizer: Option<String>,

    /// Bracketed trees, one per record in id order (NP specs only).
    #[arg(long)]
    pub trees: Option<PathBuf>,

    /// Category map file (NP specs only).
    #[arg(long, conflicts_with = "preset")]
    pub category_map: Option<PathBuf>,

    /// Built-in category map: english, italian, chinese or portuguese.
    #[arg(long)]
    pub preset: Option<String>,

    /// Undo the perturbation and fail unless every record comes back intact.
    #[arg(long)]
    pub verify_recovery: bool,
}

enum Spec {
    Sequence(PerturbationSpec),
    Np(NpPattern),
}

fn parse_spec(s: &str) -> Result<Spec> {
    if let Some(p) = s.strip_prefix("np:") {
        return Ok(Spec::Np(p.parse()?));
    }
    s.parse().map(Spec::Sequence).map_err(|e| {
        anyhow!("{e}; NP reorderings are written np:<pattern>")
    })
}

fn valid_spec(s: &str) -> Result<String, String> {
    parse_spec(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn single_language(c: &ParallelCorpus) -> Result<String> {
    let langs: Vec<&str> = c.languages().collect();
    match langs.as_slice() {
        [l] => Ok(l.to_string()),
        _ => bail!("expected one language in the corpus file, found {}", langs.len()),
    }
}

pub fn run(args: &PerturbArgs, common: &Common, run: &mut Run) -> Result<()> {
    let spec = parse_spec(&args.spec)?;
    let original = super::read_corpus(std::slice::from_ref(&args.corpus), run)?;
    let lang = single_language(&original)?;
    let out_name = |stage: &str, ext: &str| file_name(&lang, &args.spec, stage, ext);

    match spec {
        Spec::Sequence(spec) => {
            let tokenizer = args
                .tokenizer
                .as_deref()
                .map(|t| super::load_tokenizer(t, run))
                .transpose()?;
            let perturbed = perturb::perturb_corpus(&spec, &original, &lang, tokenizer.as_ref())?;
            if args.verify_recovery {
                verify(&spec, &original, &perturbed, &lang, tokenizer.as_ref())?;
            }
            let path = run.output(&out_name("corpus", "tsv"));
            corpus::write_language_file(&perturbed, &lang, &path)?;
            println!("{lang}: wrote {} records as {spec}", perturbed.len());
        }
        Spec::Np(pattern) => {
            if args.verify_recovery {
                bail!("NP reorderings are not invertible; --verify-recovery does not apply");
            }
            let seed = match pattern {
                NpPattern::Random => super::require_seed(common, "np:random")?,
                _ => common.seed.unwrap_or(0),
            };
            let trees_path = args.trees.as_ref().ok_or_else(|| anyhow!("NP specs need --trees"))?;
            let map = match (&args.category_map, &args.preset) {
                (Some(p), _) => CategoryMap::load(run.input(p))?,
                (None, Some(name)) => CategoryMap::preset(name)
                    .ok_or_else(|| anyhow!("unknown preset `{name}` (english, italian, chinese, portuguese)"))?,
                (None, None) => bail!("NP specs need --category-map or --preset"),
            };
            let ids = original.ids();
            let set = nptree::read_tree_file(run.input(trees_path), &ids)
                .with_context(|| format!("reading {}", trees_path.display()))?;
            for (id, e) in &set.failures {
                log::warn!("tree for id {id} unusable: {e}");
            }
            let (perturbed, report) =
                nptree::perturb_np_corpus(&original, &lang, &set.trees, pattern, &map, seed)?;
            let path = run.output(&out_name("corpus", "tsv"));
            corpus::write_language_file(&perturbed, &lang, &path)?;
            let pairs = nptree::extract_minimal_pairs(&original, &perturbed, &lang)?;
            run.write(&out_name("pairs", "tsv"), nptree::pairs_to_tsv(&pairs))?;
            let mut skipped = String::from("#sentence_id\treason\n");
            for (id, why) in &report.skipped {
                skipped.push_str(&format!("{id}\t{why}\n"));
            }
            run.write(&out_name("skipped", "tsv"), skipped)?;
            println!(
                "{lang}: wrote {} records as np:{pattern}; {} minimal pairs, {} skipped",
                perturbed.len(),
                pairs.len(),
                report.skipped.len()
            );
        }
    }
    Ok(())
}

fn verify(
    spec: &PerturbationSpec,
    original: &ParallelCorpus,
    perturbed: &ParallelCorpus,
    lang: &str,
    tokenizer: Option<&implang::tokenize::Tokenizer>,
) -> Result<()> {
    let recovered = perturb::recover_corpus(spec, perturbed, lang, tokenizer)?;
    let a = original.records(lang).expect("language present");
    let b = recovered.records(lang).expect("language present");
    let bad: Vec<u64> = a
        .iter()
        .zip(b)
        .filter(|(x, y)| !x.text.split_whitespace().eq(y.text.split_whitespace()))
        .map(|(x, _)| x.id)
        .collect();
    if !bad.is_empty() {
        let shown: Vec<String> = bad.iter().take(10).map(u64::to_string).collect();
        bail!(
            "recovery failed for {} of {} records (ids {})",
            bad.len(),
            a.len(),
            shown.join(", ")
        );
    }
    println!("recovery verified for {} records", a.len());
    Ok(())
}
