//! Rank correlation and two-sample tests.
//!
//! Student-t tail probabilities come from the regularized incomplete beta
//! function: for `t` with `df` degrees of freedom the two-sided p-value is
//! `I_{df/(df+t^2)}(df/2, 1/2)`.

use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// 1-based ranks with ties replaced by their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided tail probability of Student's t.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Two-sided tail probability of the standard normal.
pub fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Statistics(format!("{name} contains non-finite values")));
    }
    Ok(())
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Largest sample size for which the exact permutation p-value is computed.
pub const SPEARMAN_EXACT_MAX: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spearman {
    pub rho: f64,
    pub n: usize,
    /// Two-sided p from the t approximation with `n - 2` degrees of freedom.
    pub p_value: f64,
    /// Two-sided exact permutation p-value, for `n <= SPEARMAN_EXACT_MAX`.
    pub p_exact: Option<f64>,
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<Spearman> {
    if x.len() != y.len() {
        return Err(Error::Statistics(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Statistics("spearman needs at least 3 pairs".into()));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let rho = pearson(&rx, &ry)
        .ok_or_else(|| Error::Statistics("correlation undefined for a constant input".into()))?;
    let n = x.len();
    let df = (n - 2) as f64;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        student_t_two_sided(rho * (df / (1.0 - rho * rho)).sqrt(), df)
    };
    let p_exact = (n <= SPEARMAN_EXACT_MAX).then(|| exact_rank_permutation_p(&rx, &ry, rho));
    Ok(Spearman {
        rho,
        n,
        p_value,
        p_exact,
    })
}

fn exact_rank_permutation_p(rx: &[f64], ry: &[f64], rho: f64) -> f64 {
    // Heap's algorithm over permutations of ry.
    let n = ry.len();
    let mut perm = ry.to_vec();
    let mut c = vec![0usize; n];
    let tol = 1e-12;
    let threshold = rho.abs() - tol;
    let mut extreme = 0u64;
    let mut total = 0u64;
    let mut visit = |p: &[f64]| {
        total += 1;
        if pearson(rx, p).map_or(0.0, f64::abs) >= threshold {
            extreme += 1;
        }
    };
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    extreme as f64 / total as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Welch {
    pub t: f64,
    pub df: f64,
    pub p_raw: f64,
    /// `min(1, comparisons * p_raw)`.
    pub p_bonferroni: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Welch's unequal-variance t-test with a Bonferroni adjustment for
/// `comparisons` tests.
pub fn welch_t(a: &[f64], b: &[f64], comparisons: usize) -> Result<Welch> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Statistics("welch's t-test needs at least 2 values per sample".into()));
    }
    if comparisons == 0 {
        return Err(Error::Statistics("number of comparisons must be positive".into()));
    }
    check_finite("a", a)?;
    check_finite("b", b)?;
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sa = va / na;
    let sb = vb / nb;
    if sa + sb == 0.0 {
        return Err(Error::Statistics("both samples have zero variance".into()));
    }
    let t = (ma - mb) / (sa + sb).sqrt();
    let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let p_raw = student_t_two_sided(t, df);
    Ok(Welch {
        t,
        df,
        p_raw,
        p_bonferroni: bonferroni(p_raw, comparisons),
    })
}

pub fn bonferroni(p: f64, comparisons: usize) -> f64 {
    (p * comparisons as f64).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwMethod {
    /// Exhaustive enumeration of label assignments over the pooled ranks.
    Exact,
    /// Normal approximation with tie and continuity corrections.
    Normal,
}

/// Pooled sample size at or below which the exact distribution is used.
pub const MW_EXACT_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    pub u_a: f64,
    pub u_b: f64,
    /// Rank sum of sample `a` (Wilcoxon W).
    pub w_a: f64,
    pub p_value: f64,
    pub method: MwMethod,
}

impl MannWhitney {
    pub fn u(&self) -> f64 {
        self.u_a.min(self.u_b)
    }
}

/// Two-sided Mann-Whitney U test; exact when `|a| + |b| <= 12`.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    let method = if a.len() + b.len() <= MW_EXACT_MAX {
        MwMethod::Exact
    } else {
        MwMethod::Normal
    };
    mann_whitney_with(a, b, method)
}

pub fn mann_whitney_with(a: &[f64], b: &[f64], method: MwMethod) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Statistics("mann-whitney needs non-empty samples".into()));
    }
    check_finite("a", a)?;
    check_finite("b", b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = average_ranks(&pooled);
    let (na, nb) = (a.len(), b.len());
    let w_a: f64 = ranks[..na].iter().sum();
    let u_a = w_a - (na * (na + 1)) as f64 / 2.0;
    let u_b = (na * nb) as f64 - u_a;
    let mean = (na * nb) as f64 / 2.0;
    let p_value = match method {
        MwMethod::Exact => exact_u_p(&ranks, na, (u_a - mean).abs()),
        MwMethod::Normal => {
            let n = (na + nb) as f64;
            let mut sorted = pooled.clone();
            sorted.sort_by(f64::total_cmp);
            let mut tie_term = 0.0;
            let mut i = 0;
            while i < sorted.len() {
                let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
                let t = j as f64;
                tie_term += t * t * t - t;
                i += j;
            }
            let var = (na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
            if var <= 0.0 {
                1.0
            } else {
                let z = ((u_a - mean).abs() - 0.5).max(0.0) / var.sqrt();
                normal_two_sided(z)
            }
        }
    };
    Ok(MannWhitney {
        u_a,
        u_b,
        w_a,
        p_value,
        method,
    })
}

fn exact_u_p(ranks: &[f64], na: usize, observed_dev: f64) -> f64 {
    let n = ranks.len();
    let mean = (na * (n - na)) as f64 / 2.0;
    let offset = (na * (na + 1)) as f64 / 2.0;
    let mut extreme = 0u64;
    let mut total = 0u64;
    // Walk all na-subsets in lexicographic order.
    let mut idx: Vec<usize> = (0..na).collect();
    loop {
        let u = idx.iter().map(|&i| ranks[i]).sum::<f64>() - offset;
        total += 1;
        if (u - mean).abs() >= observed_dev - 1e-9 {
            extreme += 1;
        }
        let mut k = na;
        loop {
            if k == 0 {
                return extreme as f64 / total as f64;
            }
            k -= 1;
            if idx[k] < n - na + k {
                idx[k] += 1;
                for j in k + 1..na {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[1., 2., 2., 4., 5.]), [1., 2.5, 2.5, 4., 5.]);
        assert_eq!(average_ranks(&[3., 1., 2.]), [3., 1., 2.]);
        assert!(average_ranks(&[]).is_empty());
    }

    #[test]
    fn incomplete_beta_reference_values() {
        // t = 2.0, df = 10: two-sided p = 0.073388034770740...
        assert!((student_t_two_sided(2.0, 10.0) - 0.0733880347707404).abs() < 1e-10);
        // t = 1.0, df = 1 (Cauchy): p = 0.5 exactly
        assert!((student_t_two_sided(1.0, 1.0) - 0.5).abs() < 1e-12);
        // df = 2 closed form: p = 1 - |t| / sqrt(2 + t^2)
        for t in [0.3, 1.7, 4.2] {
            let closed = 1.0 - t / (2.0f64 + t * t).sqrt();
            assert!((student_t_two_sided(t, 2.0) - closed).abs() < 1e-10);
        }
        let p = normal_two_sided(1.959963984540054); assert!((p - 0.05).abs() < 1e-10, "{p}");
    }

    #[test]
    fn spearman_anchors() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0];
        assert_eq!(spearman(&x, &x).unwrap().rho, 1.0);
        let rev: Vec<f64> = x.iter().map(|v| -v).collect();
        let s = spearman(&x, &rev).unwrap();
        assert_eq!(s.rho, -1.0);
        assert_eq!(s.p_value, 0.0);
        assert!(matches!(spearman(&x, &[1.0; 5]), Err(Error::Statistics(_))));
        assert!(spearman(&x[..2], &x[..2]).is_err());
        assert!(spearman(&x, &x[..4]).is_err());
    }

    #[test]
    fn spearman_exact_for_perfect_order() {
        // Only the identity and full reversal reach |rho| = 1: 2 / 6!.
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let s = spearman(&x, &x).unwrap();
        assert!((s.p_exact.unwrap() - 2.0 / 720.0).abs() < 1e-15);
    }

    #[test]
    fn welch_anchors() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let w = welch_t(&a, &a, 12).unwrap();
        assert_eq!(w.t, 0.0);
        assert_eq!(w.p_raw, 1.0);
        assert_eq!(w.p_bonferroni, 1.0);
        assert_eq!(bonferroni(0.3, 5), 1.0);
        assert!((bonferroni(0.01, 5) - 0.05).abs() < 1e-15);
        assert!(welch_t(&[1.0, 1.0], &[2.0, 2.0], 1).is_err());
        assert!(welch_t(&[1.0], &[2.0, 3.0], 1).is_err());
    }

    #[test]
    fn welch_known_value() {
        // Classic textbook pair; reference from an independent t-test routine.
        let a = [27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4];
        let b = [27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4];
        let w = welch_t(&a, &b, 1).unwrap();
        assert!((w.t - -2.46).abs() < 0.005);
        assert!((w.df - 24.988).abs() < 0.01);
        assert!((w.p_raw - 0.021).abs() < 0.001);
    }

    #[test]
    fn mann_whitney_anchors() {
        let m = mann_whitney(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(m.u_a, 0.0);
        assert_eq!(m.u_b, 4.0);
        assert_eq!(m.w_a, 3.0);
        assert_eq!(m.method, MwMethod::Exact);
        // 2 of the 6 assignments are as extreme
        assert!((m.p_value - 2.0 / 6.0).abs() < 1e-15);
        assert!(mann_whitney(&[], &[1.0]).is_err());
        let tied = mann_whitney_with(&[1.0; 7], &[1.0; 8], MwMethod::Normal).unwrap();
        assert_eq!(tied.p_value, 1.0);
    }
}
