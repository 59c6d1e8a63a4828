use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use implang::eval::TrajectoryTable;

use crate::manifest::Run;
use crate::svg::{LineChart, Series};

#[derive(Args, Debug, Clone)]
pub struct ReportArgs {
    #[arg(long)]
    pub trajectories: PathBuf,

    /// Only plot these languages (default: all).
    #[arg(long, value_delimiter = ',')]
    pub langs: Vec<String>,

    /// Logarithmic perplexity axis.
    #[arg(long)]
    pub log_y: bool,
}

/// One chart per language: mean perplexity over seeds against checkpoint,
/// one line per variant.
pub fn run(args: &ReportArgs, run: &mut Run) -> Result<()> {
    let table = TrajectoryTable::load(run.input(&args.trajectories))?;
    let mut languages: Vec<&str> = Vec::new();
    for r in &table.rows {
        if !languages.contains(&r.language.as_str()) {
            languages.push(&r.language);
        }
    }
    if !args.langs.is_empty() {
        languages.retain(|l| args.langs.iter().any(|x| x == l));
    }
    if languages.is_empty() {
        bail!("no trajectories to plot");
    }
    let checkpoints = table.checkpoints();
    for lang in languages {
        let series = table
            .rows
            .iter()
            .filter(|r| r.language == lang)
            .map(|r| Series {
                name: r.variant.clone(),
                points: checkpoints
                    .iter()
                    .filter_map(|&c| {
                        let v = table.at_checkpoint(r, c);
                        (!v.is_empty()).then(|| (c as f64, v.iter().sum::<f64>() / v.len() as f64))
                    })
                    .collect(),
            })
            .collect();
        let chart = LineChart {
            title: format!("{lang}: perplexity by checkpoint"),
            x_label: "checkpoint".into(),
            y_label: "perplexity (mean over seeds)".into(),
            series,
            log_y: args.log_y,
        };
        let path = run.write(&format!("{lang}.trajectories.svg"), chart.render())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
