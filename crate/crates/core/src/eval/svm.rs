//! Linear SVM separability probe.
//!
//! The classifier minimizes `λ‖w‖²/2 + mean hinge loss` by stochastic
//! subgradient steps with learning rate `1/(λt)` and projection onto the
//! ball of radius `1/√λ`. The bias is an extra weight on a constant feature.
//! Sample draws come from the seeded [`SplitMix64`] stream, so a run is a
//! pure function of its inputs.

use log::warn;
use rayon::prelude::*;

use super::trajectory::{Label, TrajectoryMatrix};
use crate::error::{Error, Result};
use crate::rng::{Domain, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub folds: usize,
    pub lambda: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            folds: 10,
            lambda: 0.01,
            iterations: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSvm {
    /// `y` holds `+1.0` / `-1.0`.
    pub fn train(x: &[Vec<f64>], y: &[f64], lambda: f64, iterations: usize, rng: &mut SplitMix64) -> Result<LinearSvm> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::Classification("training set is empty or misaligned".into()));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Argument(format!("regularization must be positive, got {lambda}")));
        }
        let dim = x[0].len();
        let mut w = vec![0.0; dim + 1];
        let radius = 1.0 / lambda.sqrt();
        for t in 1..=iterations {
            let i = rng.below(x.len() as u64) as usize;
            let xi = &x[i];
            let margin = y[i] * (dot(&w[..dim], xi) + w[dim]);
            let eta = 1.0 / (lambda * t as f64);
            let decay = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= decay);
            if margin < 1.0 {
                for (wj, xj) in w[..dim].iter_mut().zip(xi) {
                    *wj += eta * y[i] * xj;
                }
                w[dim] += eta * y[i];
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|v| *v *= s);
            }
        }
        let bias = w.pop().unwrap_or(0.0);
        Ok(LinearSvm { weights: w, bias })
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Positive scores are the impossible class.
    pub fn predict(&self, x: &[f64]) -> Label {
        if self.decision(x) > 0.0 {
            Label::Impossible
        } else {
            Label::Attested
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-dimension standardization fitted on one sample set. Dimensions with
/// zero variance are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub kept: Vec<usize>,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub dropped: Vec<usize>,
}

impl Standardizer {
    pub fn fit(rows: &[&Vec<f64>]) -> Standardizer {
        let dim = rows.first().map_or(0, |r| r.len());
        let n = rows.len() as f64;
        let mut s = Standardizer {
            kept: Vec::new(),
            mean: Vec::new(),
            scale: Vec::new(),
            dropped: Vec::new(),
        };
        for j in 0..dim {
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n;
            if var > 0.0 {
                s.kept.push(j);
                s.mean.push(m);
                s.scale.push(var.sqrt());
            } else {
                s.dropped.push(j);
            }
        }
        s
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        self.kept
            .iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(&j, (m, s))| (row[j] - m) / s)
            .collect()
    }
}

/// Fold index for every sample. Stratified when every class has at least
/// `folds` members: each class's shuffled indices are dealt round-robin,
/// continuing the count across classes. Otherwise all indices are shuffled
/// and dealt, and the second value is `false`.
pub fn fold_assignment(labels: &[Label], folds: usize, seed: u64) -> Result<(Vec<usize>, bool)> {
    if folds < 2 {
        return Err(Error::Argument(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() < folds {
        return Err(Error::Classification(format!(
            "{} samples cannot fill {folds} folds",
            labels.len()
        )));
    }
    let mut rng = SplitMix64::for_domain(Domain::CrossValidation, &[seed]);
    let classes = [Label::Attested, Label::Impossible];
    let by_class: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| (0..labels.len()).filter(|&i| labels[i] == *c).collect())
        .collect();
    let stratified = by_class.iter().all(|ix| ix.len() >= folds);
    let groups = if stratified {
        by_class
    } else {
        vec![(0..labels.len()).collect()]
    };
    let mut assignment = vec![0; labels.len()];
    let mut k = 0;
    for mut group in groups {
        rng.shuffle(&mut group);
        for i in group {
            assignment[i] = k % folds;
            k += 1;
        }
    }
    Ok((assignment, stratified))
}

/// Unweighted mean of per-class F1 over the classes that occur in either
/// the truth or the predictions. A class with no true or predicted positives
/// scores 0.
pub fn macro_f1(truth: &[Label], predicted: &[Label]) -> f64 {
    let mut total = 0.0;
    let mut classes = 0;
    for c in [Label::Attested, Label::Impossible] {
        let present = truth.iter().chain(predicted).any(|l| *l == c);
        if !present {
            continue;
        }
        classes += 1;
        let tp = truth.iter().zip(predicted).filter(|(t, p)| **t == c && **p == c).count();
        let fp = truth.iter().zip(predicted).filter(|(t, p)| **t != c && **p == c).count();
        let fn_ = truth.iter().zip(predicted).filter(|(t, p)| **t == c && **p != c).count();
        let denom = 2 * tp + fp + fn_;
        if denom > 0 {
            total += 2.0 * tp as f64 / denom as f64;
        }
    }
    if classes == 0 {
        0.0
    } else {
        total / classes as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityReport {
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
    /// Population standard deviation of the fold scores.
    pub sd_f1: f64,
    pub folds: Vec<usize>,
    /// Out-of-fold prediction for every sample.
    pub predictions: Vec<Label>,
    pub stratified: bool,
    pub warnings: Vec<String>,
}

impl SeparabilityReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("#fold\tmacro_f1\n");
        for (i, f) in self.fold_f1.iter().enumerate() {
            out.push_str(&format!("{i}\t{f}\n"));
        }
        out.push_str(&format!("mean\t{}\nsd\t{}\n", self.mean_f1, self.sd_f1));
        out
    }
}

/// K-fold cross-validated macro-F1 of a linear SVM separating attested from
/// impossible trajectories.
pub fn svm_separability(data: &TrajectoryMatrix, config: &SvmConfig) -> Result<SeparabilityReport> {
    let labels = &data.labels;
    if !labels.contains(&Label::Attested) || !labels.contains(&Label::Impossible) {
        return Err(Error::Classification("both attested and impossible samples are required".into()));
    }
    let (folds, stratified) = fold_assignment(labels, config.folds, config.seed)?;
    let mut warnings = Vec::new();
    if !stratified {
        warnings.push(format!(
            "a class has fewer than {} samples; using unstratified folds",
            config.folds
        ));
    }
    let results: Vec<Result<(Vec<(usize, Label)>, f64, Vec<usize>)>> = (0..config.folds)
        .into_par_iter()
        .map(|k| {
            let train: Vec<usize> = (0..labels.len()).filter(|&i| folds[i] != k).collect();
            let test: Vec<usize> = (0..labels.len()).filter(|&i| folds[i] == k).collect();
            let train_rows: Vec<&Vec<f64>> = train.iter().map(|&i| &data.features[i]).collect();
            let scaler = Standardizer::fit(&train_rows);
            let x: Vec<Vec<f64>> = train_rows.iter().map(|r| scaler.transform(r)).collect();
            let y: Vec<f64> = train
                .iter()
                .map(|&i| if labels[i] == Label::Impossible { 1.0 } else { -1.0 })
                .collect();
            let mut rng = SplitMix64::for_domain(Domain::SvmSampling, &[config.seed, k as u64]);
            let model = LinearSvm::train(&x, &y, config.lambda, config.iterations, &mut rng)?;
            let preds: Vec<(usize, Label)> = test
                .iter()
                .map(|&i| (i, model.predict(&scaler.transform(&data.features[i]))))
                .collect();
            let truth: Vec<Label> = test.iter().map(|&i| labels[i]).collect();
            let predicted: Vec<Label> = preds.iter().map(|p| p.1).collect();
            Ok((preds, macro_f1(&truth, &predicted), scaler.dropped))
        })
        .collect();
    let mut predictions = vec![Label::Attested; labels.len()];
    let mut fold_f1 = Vec::with_capacity(config.folds);
    for (k, r) in results.into_iter().enumerate() {
        let (preds, f1, dropped) = r?;
        if !dropped.is_empty() {
            warnings.push(format!("fold {k}: dropped zero-variance feature dimensions {dropped:?}"));
        }
        for (i, p) in preds {
            predictions[i] = p;
        }
        fold_f1.push(f1);
    }
    for w in &warnings {
        warn!("{w}");
    }
    let n = fold_f1.len() as f64;
    let mean_f1 = fold_f1.iter().sum::<f64>() / n;
    let sd_f1 = (fold_f1.iter().map(|f| (f - mean_f1).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SeparabilityReport {
        fold_f1,
        mean_f1,
        sd_f1,
        folds,
        predictions,
        stratified,
        warnings,
    })
}
