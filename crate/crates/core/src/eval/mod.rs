//! Learnability measures: GenScore over minimal pairs, the separability
//! probe over perplexity trajectories, and the hypothesis tests.

mod genscore;
mod stats;
mod svm;
mod trajectory;

pub use genscore::{genscore, GenScoreResult, MinimalPair, PairIndicator};
pub use stats::{
    average_ranks, bonferroni, mann_whitney, mann_whitney_with, normal_two_sided, spearman,
    student_t_two_sided, welch_t, MannWhitney, MwMethod, Spearman, Welch, MW_EXACT_MAX,
    SPEARMAN_EXACT_MAX,
};
pub use svm::{
    fold_assignment, macro_f1, svm_separability, LinearSvm, SeparabilityReport, Standardizer,
    SvmConfig,
};
pub use trajectory::{FeatureLayout, Label, TrajectoryMatrix, TrajectoryRow, TrajectoryTable};

use log::warn;

use crate::error::{Error, Result};
use crate::ngram::ScoreFile;
use crate::nptree::PairText;

/// Joins minimal pairs with the scores of the model trained on the attested
/// variant and the model trained on the perturbed one. Each score file must
/// carry both variant names. Pairs missing any of the four scores are
/// skipped with a warning; no overlap at all is an error.
pub fn join_minimal_pairs(
    pairs: &[PairText],
    att_scores: &ScoreFile,
    unatt_scores: &ScoreFile,
    att_variant: &str,
    unatt_variant: &str,
) -> Result<Vec<MinimalPair>> {
    let att = att_scores.index();
    let unatt = unatt_scores.index();
    let mut out = Vec::with_capacity(pairs.len());
    let mut missing = 0;
    for p in pairs {
        let lookup = |idx: &std::collections::HashMap<(u64, &str), &crate::ngram::ScoreRecord>, v: &str| {
            idx.get(&(p.id, v)).map(|r| r.log_prob)
        };
        let found = (
            lookup(&att, att_variant),
            lookup(&att, unatt_variant),
            lookup(&unatt, unatt_variant),
            lookup(&unatt, att_variant),
        );
        match found {
            (Some(a), Some(b), Some(c), Some(d)) => out.push(MinimalPair {
                id: p.id,
                s_att: p.attested.clone(),
                s_unatt: p.perturbed.clone(),
                logp_att_model: (a, b),
                logp_unatt_model: (c, d),
            }),
            _ => missing += 1,
        }
    }
    if out.is_empty() {
        return Err(Error::Data(format!(
            "no minimal pair has scores for both `{att_variant}` and `{unatt_variant}` under both models"
        )));
    }
    if missing > 0 {
        warn!("{missing} minimal pairs lack scores and were skipped");
    }
    Ok(out)
}
