use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Subcommand};
use implang::corpus;
use implang::eval::{self, MwMethod, TrajectoryTable};

use crate::manifest::Run;

#[derive(Subcommand, Debug, Clone)]
pub enum StatsCommand {
    /// Sentence and word counts per source.
    Corpus(CorpusArgs),
    /// Welch's t-test between two samples, or per checkpoint against a baseline.
    Welch(WelchArgs),
    /// Two-sided Mann-Whitney U test.
    MannWhitney(MannWhitneyArgs),
    /// Spearman rank correlation.
    Spearman(SpearmanArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,

    /// Language whose words are counted (default: first corpus file).
    #[arg(long)]
    pub ref_lang: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct WelchArgs {
    /// First sample, comma-separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required_unless_present = "trajectories")]
    pub a: Vec<f64>,

    /// Second sample, comma-separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required_unless_present = "trajectories")]
    pub b: Vec<f64>,

    /// Bonferroni factor for the two-sample form.
    #[arg(long, default_value_t = 1)]
    pub comparisons: usize,

    /// Compare every variant against `--baseline` at each checkpoint, across
    /// seeds, correcting for the number of variants compared.
    #[arg(long, conflicts_with_all = ["a", "b"], requires = "baseline")]
    pub trajectories: Option<PathBuf>,

    #[arg(long)]
    pub baseline: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct MannWhitneyArgs {
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    pub a: Vec<f64>,

    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    pub b: Vec<f64>,

    /// Use the normal approximation even for small samples.
    #[arg(long)]
    pub approx: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SpearmanArgs {
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    pub x: Vec<f64>,

    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    pub y: Vec<f64>,
}

pub fn run(cmd: &StatsCommand, run: &mut Run) -> Result<()> {
    let (name, body) = match cmd {
        StatsCommand::Corpus(a) => ("corpus.stats.tsv", corpus_stats(a, run)?),
        StatsCommand::Welch(a) => ("welch.tsv", welch(a, run)?),
        StatsCommand::MannWhitney(a) => ("mann-whitney.tsv", mann_whitney(a)?),
        StatsCommand::Spearman(a) => ("spearman.tsv", spearman(a)?),
    };
    print!("{body}");
    run.write(name, body)?;
    Ok(())
}

fn corpus_stats(args: &CorpusArgs, run: &mut Run) -> Result<String> {
    let c = super::read_corpus(&args.corpus, run)?;
    let lang = match &args.ref_lang {
        Some(l) => l.clone(),
        None => {
            let (records, _) = corpus::read_language_file(&args.corpus[0])?;
            records
                .first()
                .map(|r| r.lang.clone())
                .ok_or_else(|| anyhow!("{} holds no records", args.corpus[0].display()))?
        }
    };
    Ok(corpus::stats(&c, &lang)?.to_tsv())
}

fn welch(args: &WelchArgs, run: &mut Run) -> Result<String> {
    let Some(path) = &args.trajectories else {
        let w = eval::welch_t(&args.a, &args.b, args.comparisons)?;
        return Ok(format!(
            "#t\tdf\tp_raw\tp_bonferroni\n{}\t{}\t{}\t{}\n",
            w.t, w.df, w.p_raw, w.p_bonferroni
        ));
    };
    let baseline = args.baseline.as_deref().expect("required by clap");
    let table = TrajectoryTable::load(run.input(path))?;
    let mut out = String::from("#language\tvariant\tcheckpoint\tt\tdf\tp_raw\tp_bonferroni\n");
    let mut languages: Vec<&str> = Vec::new();
    for r in &table.rows {
        if !languages.contains(&r.language.as_str()) {
            languages.push(&r.language);
        }
    }
    for lang in languages {
        let rows: Vec<_> = table.rows.iter().filter(|r| r.language == lang).collect();
        let base = rows
            .iter()
            .find(|r| r.variant == baseline)
            .ok_or_else(|| anyhow!("language `{lang}` has no `{baseline}` row"))?;
        let others: Vec<_> = rows.iter().filter(|r| r.variant != baseline).collect();
        if others.is_empty() {
            bail!("language `{lang}` has nothing to compare against `{baseline}`");
        }
        for row in &others {
            for c in table.checkpoints() {
                let w = eval::welch_t(
                    &table.at_checkpoint(row, c),
                    &table.at_checkpoint(base, c),
                    others.len(),
                )?;
                out.push_str(&format!(
                    "{lang}\t{}\t{c}\t{}\t{}\t{}\t{}\n",
                    row.variant, w.t, w.df, w.p_raw, w.p_bonferroni
                ));
            }
        }
    }
    Ok(out)
}

fn mann_whitney(args: &MannWhitneyArgs) -> Result<String> {
    let r = if args.approx {
        eval::mann_whitney_with(&args.a, &args.b, MwMethod::Normal)?
    } else {
        eval::mann_whitney(&args.a, &args.b)?
    };
    let method = match r.method {
        MwMethod::Exact => "exact",
        MwMethod::Normal => "normal",
    };
    Ok(format!(
        "#u\tu_a\tu_b\tw_a\tp_value\tmethod\n{}\t{}\t{}\t{}\t{}\t{method}\n",
        r.u(),
        r.u_a,
        r.u_b,
        r.w_a,
        r.p_value
    ))
}

fn spearman(args: &SpearmanArgs) -> Result<String> {
    let s = eval::spearman(&args.x, &args.y)?;
    let exact = s.p_exact.map_or_else(|| "NA".to_string(), |p| p.to_string());
    Ok(format!(
        "#rho\tn\tp_value\tp_exact\n{}\t{}\t{}\t{exact}\n",
        s.rho, s.n, s.p_value
    ))
}
