//! Sequence-level word-order perturbations and their inverses.
//!
//! Each perturbation is a permutation of the units of a sentence. A
//! permutation is represented as `order`, with `output[k] = input[order[k]]`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{ParallelCorpus, SentenceId};
use crate::error::{Error, Result};
use crate::rng::{invert, Domain, SplitMix64};
use crate::tokenize::{TokenSequence, Tokenizer};

/// What a perturbation permutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    /// Whitespace words.
    Word,
    /// Units from the supplied tokenizer.
    Token,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Word => "word",
            Unit::Token => "token",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perturbation {
    /// The unperturbed baseline (`shuffle_control`).
    Identity,
    ReverseFull,
    /// Window 2 swaps adjacent pairs; larger windows are each permuted by a
    /// seeded permutation keyed on (seed, window length, window index).
    ShuffleLocal { window: usize, seed: u64 },
    ShuffleEvenOdd,
    /// One permutation per sentence length, keyed on (seed, length).
    ShuffleDeterministic { seed: u64 },
    /// A fresh permutation per sentence, keyed on (seed, sentence id).
    ShuffleNondeterministic { seed: u64 },
}

impl Perturbation {
    pub fn name(&self) -> &'static str {
        match self {
            Perturbation::Identity => "identity",
            Perturbation::ReverseFull => "reverse_full",
            Perturbation::ShuffleLocal { .. } => "shuffle_local",
            Perturbation::ShuffleEvenOdd => "shuffle_even_odd",
            Perturbation::ShuffleDeterministic { .. } => "shuffle_deterministic",
            Perturbation::ShuffleNondeterministic { .. } => "shuffle_nondeterministic",
        }
    }

    pub fn default_unit(&self) -> Unit {
        match self {
            Perturbation::Identity | Perturbation::ReverseFull => Unit::Word,
            _ => Unit::Token,
        }
    }

    pub fn is_recoverable(&self) -> bool {
        !matches!(self, Perturbation::ShuffleNondeterministic { .. })
    }

    /// The permutation this perturbation applies to a sentence of `len`
    /// units. `sentence_id` only matters for the nondeterministic shuffle.
    pub fn order(&self, len: usize, sentence_id: SentenceId) -> Vec<usize> {
        match *self {
            Perturbation::Identity => (0..len).collect(),
            Perturbation::ReverseFull => (0..len).rev().collect(),
            Perturbation::ShuffleEvenOdd => (0..len).step_by(2).chain((1..len).step_by(2)).collect(),
            Perturbation::ShuffleLocal { window, seed } => local_order(len, window, seed),
            Perturbation::ShuffleDeterministic { seed } => {
                SplitMix64::for_domain(Domain::ShuffleDeterministic, &[seed, len as u64]).permutation(len)
            }
            Perturbation::ShuffleNondeterministic { seed } => {
                SplitMix64::for_domain(Domain::ShuffleNondeterministic, &[seed, sentence_id]).permutation(len)
            }
        }
    }
}

fn local_order(len: usize, window: usize, seed: u64) -> Vec<usize> {
    let mut order = Vec::with_capacity(len);
    for (index, start) in (0..len).step_by(window.max(1)).enumerate() {
        let size = window.min(len - start);
        if window == 2 {
            if size == 2 {
                order.extend([start + 1, start]);
            } else {
                order.push(start);
            }
        } else {
            let local = SplitMix64::for_domain(Domain::ShuffleLocal, &[seed, size as u64, index as u64])
                .permutation(size);
            order.extend(local.into_iter().map(|i| start + i));
        }
    }
    order
}

/// A perturbation plus the unit it operates on.
///
/// Serialized as a single token: the kind name followed by `:key=value`
/// parameters, e.g. `reverse_full`, `shuffle_local:w=3`,
/// `shuffle_deterministic:s=84:unit=word`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PerturbationSpec {
    pub kind: Perturbation,
    pub unit: Unit,
}

impl PerturbationSpec {
    pub fn new(kind: Perturbation) -> Self {
        PerturbationSpec {
            kind,
            unit: kind.default_unit(),
        }
    }

    pub fn with_unit(self, unit: Unit) -> Self {
        PerturbationSpec { unit, ..self }
    }

    /// Permuted copy of `seq`; the word map moves with its units.
    pub fn apply(&self, seq: &TokenSequence, sentence_id: SentenceId) -> TokenSequence {
        permute(seq, &self.kind.order(seq.len(), sentence_id))
    }

    pub fn recover(&self, seq: &TokenSequence) -> Result<TokenSequence> {
        Ok(permute(seq, &self.inverse_order(seq.len())?))
    }

    /// Recovers a plain unit list (e.g. parsed back from a rendered corpus).
    pub fn recover_units(&self, units: &[String]) -> Result<Vec<String>> {
        let inverse = self.inverse_order(units.len())?;
        Ok(inverse.iter().map(|&i| units[i].clone()).collect())
    }

    fn inverse_order(&self, len: usize) -> Result<Vec<usize>> {
        if !self.kind.is_recoverable() {
            return Err(Error::UnsupportedRecovery(self.to_string()));
        }
        Ok(invert(&self.kind.order(len, 0)))
    }
}

fn permute(seq: &TokenSequence, order: &[usize]) -> TokenSequence {
    TokenSequence {
        units: order.iter().map(|&i| seq.units[i].clone()).collect(),
        kind: seq.kind,
        word_map: order.iter().map(|&i| seq.word_map[i]).collect(),
    }
}

impl fmt::Display for PerturbationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        match self.kind {
            Perturbation::ShuffleLocal { window, seed } => {
                write!(f, ":w={window}")?;
                if seed != 0 {
                    write!(f, ":s={seed}")?;
                }
            }
            Perturbation::ShuffleDeterministic { seed } | Perturbation::ShuffleNondeterministic { seed } => {
                write!(f, ":s={seed}")?
            }
            _ => {}
        }
        if self.unit != self.kind.default_unit() {
            write!(f, ":unit={}", self.unit)?;
        }
        Ok(())
    }
}

pub const KIND_NAMES: [&str; 6] = [
    "identity",
    "reverse_full",
    "shuffle_local",
    "shuffle_even_odd",
    "shuffle_deterministic",
    "shuffle_nondeterministic",
];

impl FromStr for PerturbationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let mut window = None;
        let mut seed = None;
        let mut unit = None;
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("malformed parameter `{part}` in `{s}`")))?;
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| Error::Argument(format!("`{key}` expects an integer in `{s}`")))
            };
            match key {
                "w" => window = Some(int(value)? as usize),
                "s" => seed = Some(int(value)?),
                "unit" => {
                    unit = Some(match value {
                        "word" => Unit::Word,
                        "token" => Unit::Token,
                        _ => return Err(Error::Argument(format!("unknown unit `{value}`"))),
                    })
                }
                _ => return Err(Error::Argument(format!("unknown parameter `{key}` in `{s}`"))),
            }
        }
        let no_window = |kind: Perturbation| {
            if window.is_some() {
                Err(Error::Argument(format!("`w` only applies to shuffle_local, got `{s}`")))
            } else {
                Ok(kind)
            }
        };
        let no_seed = |kind: Perturbation| {
            if seed.is_some() {
                Err(Error::Argument(format!("`s` does not apply to `{name}`")))
            } else {
                no_window(kind)
            }
        };
        let need_seed = || seed.ok_or_else(|| Error::Argument(format!("`{name}` requires `s=<seed>`")));
        let kind = match name {
            "identity" | "shuffle_control" => no_seed(Perturbation::Identity)?,
            "reverse_full" => no_seed(Perturbation::ReverseFull)?,
            "shuffle_even_odd" => no_seed(Perturbation::ShuffleEvenOdd)?,
            "shuffle_local" => {
                let window = window.ok_or_else(|| Error::Argument("shuffle_local requires `w=<window>`".into()))?;
                if window == 0 {
                    return Err(Error::Argument("window must be at least 1".into()));
                }
                Perturbation::ShuffleLocal {
                    window,
                    seed: seed.unwrap_or(0),
                }
            }
            "shuffle_deterministic" => no_window(Perturbation::ShuffleDeterministic { seed: need_seed()? })?,
            "shuffle_nondeterministic" => no_window(Perturbation::ShuffleNondeterministic { seed: need_seed()? })?,
            other => {
                return Err(Error::Argument(format!(
                    "unknown perturbation `{other}`; expected one of {}",
                    KIND_NAMES.join(", ")
                )))
            }
        };
        let mut spec = PerturbationSpec::new(kind);
        if let Some(u) = unit {
            spec.unit = u;
        }
        Ok(spec)
    }
}

fn units_of(spec: &PerturbationSpec, text: &str, tokenizer: Option<&Tokenizer>) -> Result<TokenSequence> {
    match spec.unit {
        Unit::Word => Ok(TokenSequence::words(text)),
        Unit::Token => tokenizer
            .map(|t| t.encode(text))
            .ok_or_else(|| Error::Argument(format!("`{spec}` operates on tokens and needs a tokenizer"))),
    }
}

/// Perturbs every record of `lang`. The new text is the perturbed units
/// joined by single spaces. Other languages, ids and splits are untouched.
pub fn perturb_corpus(
    spec: &PerturbationSpec,
    corpus: &ParallelCorpus,
    lang: &str,
    tokenizer: Option<&Tokenizer>,
) -> Result<ParallelCorpus> {
    if spec.unit == Unit::Token && tokenizer.is_none() {
        return Err(Error::Argument(format!("`{spec}` operates on tokens and needs a tokenizer")));
    }
    if spec.kind == Perturbation::Identity && spec.unit == Unit::Word {
        return corpus.map_texts(lang, |r| Ok(r.text.clone()));
    }
    let records = corpus
        .records(lang)
        .ok_or_else(|| Error::Argument(format!("language `{lang}` not in corpus")))?;
    let texts: Vec<String> = records
        .par_iter()
        .map(|r| Ok(spec.apply(&units_of(spec, &r.text, tokenizer)?, r.id).render()))
        .collect::<Result<_>>()?;
    let by_id: std::collections::HashMap<SentenceId, &String> =
        records.iter().map(|r| r.id).zip(texts.iter()).collect();
    corpus.map_texts(lang, |r| Ok(by_id[&r.id].clone()))
}

/// Undoes [`perturb_corpus`] for recoverable specs. Token-unit corpora are
/// rebuilt through the tokenizer's word markers.
pub fn recover_corpus(
    spec: &PerturbationSpec,
    corpus: &ParallelCorpus,
    lang: &str,
    tokenizer: Option<&Tokenizer>,
) -> Result<ParallelCorpus> {
    if !spec.kind.is_recoverable() {
        return Err(Error::UnsupportedRecovery(spec.to_string()));
    }
    corpus.map_texts(lang, |r| {
        let units: Vec<String> = r.text.split_whitespace().map(str::to_string).collect();
        let recovered = spec.recover_units(&units)?;
        match spec.unit {
            Unit::Word => Ok(recovered.join(" ")),
            Unit::Token => tokenizer
                .ok_or_else(|| Error::Argument(format!("`{spec}` operates on tokens and needs a tokenizer")))?
                .decode_units(&recovered),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::UnitKind;

    fn seq(units: &[&str]) -> TokenSequence {
        TokenSequence::from_units(units.iter().copied(), UnitKind::Word)
    }

    fn apply(spec: &str, units: &[&str]) -> Vec<String> {
        spec.parse::<PerturbationSpec>().unwrap().apply(&seq(units), 0).units
    }

    #[test]
    fn fixed_kinds() {
        assert_eq!(apply("reverse_full", &["a", "b", "c"]), ["c", "b", "a"]);
        assert_eq!(
            apply("shuffle_even_odd", &["t0", "t1", "t2", "t3", "t4"]),
            ["t0", "t2", "t4", "t1", "t3"]
        );
        assert_eq!(apply("shuffle_local:w=2", &["a", "b", "c", "d", "e"]), ["b", "a", "d", "c", "e"]);
        assert_eq!(apply("shuffle_local:w=1", &["a", "b", "c"]), ["a", "b", "c"]);
        assert_eq!(apply("shuffle_even_odd", &["x"]), ["x"]);
        assert_eq!(apply("shuffle_even_odd", &["x", "y"]), ["x", "y"]);
        assert!(apply("shuffle_deterministic:s=21", &[]).is_empty());
    }

    #[test]
    fn even_odd_recovery() {
        let spec: PerturbationSpec = "shuffle_even_odd".parse().unwrap();
        let back = spec.recover(&seq(&["t0", "t2", "t4", "t1", "t3"])).unwrap();
        assert_eq!(back.units, ["t0", "t1", "t2", "t3", "t4"]);
    }

    #[test]
    fn deterministic_shuffle_depends_only_on_length() {
        let spec: PerturbationSpec = "shuffle_deterministic:s=84".parse().unwrap();
        let order = SplitMix64::for_domain(Domain::ShuffleDeterministic, &[84, 7]).permutation(7);
        let a: Vec<String> = (0..7).map(|i| format!("a{i}")).collect();
        let b: Vec<String> = (0..7).map(|i| format!("b{i}")).collect();
        let pa = spec.apply(&TokenSequence::from_units(a.clone(), UnitKind::Word), 1);
        let pb = spec.apply(&TokenSequence::from_units(b.clone(), UnitKind::Word), 2);
        for (k, &src) in order.iter().enumerate() {
            assert_eq!(pa.units[k], a[src]);
            assert_eq!(pb.units[k], b[src]);
        }
    }

    #[test]
    fn nondeterministic_varies_by_sentence_and_is_not_recoverable() {
        let spec: PerturbationSpec = "shuffle_nondeterministic:s=5".parse().unwrap();
        let s: Vec<String> = (0..12).map(|i| i.to_string()).collect();
        let s = TokenSequence::from_units(s, UnitKind::Word);
        assert_ne!(spec.apply(&s, 1), spec.apply(&s, 2));
        assert_eq!(spec.apply(&s, 1), spec.apply(&s, 1));
        assert!(matches!(spec.recover(&s), Err(Error::UnsupportedRecovery(_))));
    }

    #[test]
    fn spec_strings() {
        for s in [
            "identity",
            "reverse_full",
            "shuffle_local:w=3",
            "shuffle_local:w=3:s=9",
            "shuffle_even_odd",
            "shuffle_deterministic:s=84",
            "shuffle_nondeterministic:s=1:unit=word",
            "reverse_full:unit=token",
        ] {
            assert_eq!(s.parse::<PerturbationSpec>().unwrap().to_string(), s);
        }
        let canon: PerturbationSpec = "shuffle_local:unit=token:w=3".parse().unwrap();
        assert_eq!(canon.to_string(), "shuffle_local:w=3");
        assert_eq!(
            "shuffle_control".parse::<PerturbationSpec>().unwrap().kind,
            Perturbation::Identity
        );
        for bad in [
            "shuffle_local",
            "shuffle_local:w=0",
            "shuffle_deterministic",
            "reverse_full:s=3",
            "shuffle_deterministic:s=1:w=2",
            "scramble",
            "identity:unit=byte",
            "shuffle_local:w=x",
        ] {
            assert!(bad.parse::<PerturbationSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn unknown_kind_lists_valid_names() {
        let err = "scramble".parse::<PerturbationSpec>().unwrap_err().to_string();
        assert!(err.contains("shuffle_even_odd"));
    }

    #[test]
    fn word_map_moves_with_units() {
        let tok = Tokenizer::Character;
        let s = tok.encode("ab cde");
        let spec: PerturbationSpec = "reverse_full:unit=token".parse().unwrap();
        let p = spec.apply(&s, 0);
        assert_eq!(p.units, ["e", "d", "c", "b", "a"]);
        assert_eq!(p.word_map, [1, 1, 1, 0, 0]);
        assert_eq!(tok.decode(&spec.recover(&p).unwrap()), "ab cde");
    }
}
