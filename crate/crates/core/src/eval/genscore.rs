use log::warn;

use crate::error::{Error, Result};

/// One attested/unattested sentence pair scored by the model trained on the
/// attested variant and by the model trained on the unattested variant.
/// Log-probabilities are natural-log totals.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalPair {
    pub id: u64,
    pub s_att: String,
    pub s_unatt: String,
    /// `(P_att(s_att), P_att(s_unatt))`.
    pub logp_att_model: (f64, f64),
    /// `(P_unatt(s_unatt), P_unatt(s_att))`.
    pub logp_unatt_model: (f64, f64),
}

impl MinimalPair {
    pub fn is_finite(&self) -> bool {
        let (a, b) = self.logp_att_model;
        let (c, d) = self.logp_unatt_model;
        [a, b, c, d].iter().all(|v| v.is_finite())
    }

    /// The same pair seen from the other model's side: roles of the two
    /// models and of the two sentences are exchanged.
    pub fn swapped(&self) -> MinimalPair {
        MinimalPair {
            id: self.id,
            s_att: self.s_unatt.clone(),
            s_unatt: self.s_att.clone(),
            logp_att_model: self.logp_unatt_model,
            logp_unatt_model: self.logp_att_model,
        }
    }
}

/// Per-pair outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairIndicator {
    pub id: u64,
    /// The attested model strictly prefers the attested sentence.
    pub att: bool,
    /// The unattested model strictly prefers the unattested sentence.
    pub unatt: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenScoreResult {
    pub genscore_att: f64,
    pub genscore_unatt: f64,
    pub delta: f64,
    /// Pairs that entered the score.
    pub n: usize,
    /// Pairs dropped for non-finite log-probabilities.
    pub excluded: usize,
    pub ties_att: usize,
    pub ties_unatt: usize,
    pub indicators: Vec<PairIndicator>,
}

impl GenScoreResult {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("#metric\tvalue\n");
        out.push_str(&format!("genscore_att\t{}\n", self.genscore_att));
        out.push_str(&format!("genscore_unatt\t{}\n", self.genscore_unatt));
        out.push_str(&format!("delta\t{}\n", self.delta));
        out.push_str(&format!("n\t{}\n", self.n));
        out.push_str(&format!("excluded\t{}\n", self.excluded));
        out.push_str(&format!("ties_att\t{}\n", self.ties_att));
        out.push_str(&format!("ties_unatt\t{}\n", self.ties_unatt));
        out
    }
}

/// Fractions of pairs on which each model strictly prefers the word order
/// it was trained on, and their difference. Ties count as failures.
pub fn genscore(pairs: &[MinimalPair]) -> Result<GenScoreResult> {
    if pairs.is_empty() {
        return Err(Error::Argument("genscore needs at least one minimal pair".into()));
    }
    let mut indicators = Vec::with_capacity(pairs.len());
    let (mut ties_att, mut ties_unatt, mut excluded) = (0, 0, 0);
    for p in pairs {
        if !p.is_finite() {
            excluded += 1;
            continue;
        }
        let (own_a, other_a) = p.logp_att_model;
        let (own_u, other_u) = p.logp_unatt_model;
        ties_att += usize::from(own_a == other_a);
        ties_unatt += usize::from(own_u == other_u);
        indicators.push(PairIndicator {
            id: p.id,
            att: own_a > other_a,
            unatt: own_u > other_u,
        });
    }
    if excluded > 0 {
        warn!("excluded {excluded} minimal pairs with non-finite log-probabilities");
    }
    let n = indicators.len();
    if n == 0 {
        return Err(Error::Data("every minimal pair has a non-finite log-probability".into()));
    }
    let att = indicators.iter().filter(|i| i.att).count();
    let unatt = indicators.iter().filter(|i| i.unatt).count();
    let genscore_att = att as f64 / n as f64;
    let genscore_unatt = unatt as f64 / n as f64;
    Ok(GenScoreResult {
        genscore_att,
        genscore_unatt,
        delta: genscore_att - genscore_unatt,
        n,
        excluded,
        ties_att,
        ties_unatt,
        indicators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(id: u64, att: (f64, f64), unatt: (f64, f64)) -> MinimalPair {
        MinimalPair {
            id,
            s_att: format!("a{id}"),
            s_unatt: format!("u{id}"),
            logp_att_model: att,
            logp_unatt_model: unatt,
        }
    }

    #[test]
    fn hand_counted_fractions() {
        let pairs = [
            pair(0, (-1.0, -2.0), (-1.0, -2.0)),
            pair(1, (-3.0, -2.0), (-1.0, -2.0)),
            pair(2, (-2.0, -2.0), (-5.0, -2.0)),
            pair(3, (-1.0, -9.0), (-4.0, -4.0)),
        ];
        let r = genscore(&pairs).unwrap();
        assert_eq!(r.n, 4);
        assert_eq!(r.genscore_att, 0.5);
        assert_eq!(r.genscore_unatt, 0.5);
        assert_eq!(r.delta, 0.0);
        assert_eq!((r.ties_att, r.ties_unatt), (1, 1));
    }

    #[test]
    fn non_finite_pairs_are_excluded() {
        let pairs = [
            pair(0, (-1.0, -2.0), (-1.0, -2.0)),
            pair(1, (f64::NEG_INFINITY, -2.0), (-1.0, -2.0)),
        ];
        let r = genscore(&pairs).unwrap();
        assert_eq!((r.n, r.excluded), (1, 1));
        assert!(matches!(genscore(&[]), Err(Error::Argument(_))));
        assert!(genscore(&pairs[1..]).is_err());
    }
}
