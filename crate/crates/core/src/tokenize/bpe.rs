//! Word-internal byte-pair encoding over Unicode characters.
//!
//! The first character of every whitespace-delimited word is fused with
//! [`WORD_MARKER`] into a single base symbol (`▁c`), so the first unit of
//! each word carries the marker and the original spacing can be restored by
//! concatenation. A word never yields more units than it has characters.
//! Merges never cross word boundaries.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use super::{Vocab, BOS, EOS, UNK};
use crate::error::{Error, Result};

/// Marks the first unit of every word.
pub const WORD_MARKER: char = '\u{2581}';

type Pair = (u32, u32);

#[derive(Debug, Clone, PartialEq)]
pub struct Bpe {
    vocab: Vocab,
    merges: Vec<(String, String)>,
    ranks: HashMap<Pair, (usize, u32)>,
}

impl Bpe {
    /// Trains on the whitespace-split words of `sentences`.
    ///
    /// The base alphabet holds every character seen, both bare and fused
    /// with the word marker. The most frequent adjacent pair is merged until the vocabulary reaches
    /// `vocab_size` or no pair is left; equal counts go to the
    /// lexicographically smaller `(left, right)` pair.
    pub fn train<I, S>(sentences: I, vocab_size: usize) -> Result<Bpe>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut word_counts: HashMap<String, u64> = HashMap::new();
        for s in sentences {
            for w in s.as_ref().split_whitespace() {
                *word_counts.entry(w.to_string()).or_insert(0) += 1;
            }
        }
        if word_counts.is_empty() {
            return Err(Error::Training("cannot train a tokenizer on an empty corpus".into()));
        }

        let chars: BTreeSet<char> = word_counts.keys().flat_map(|w| w.chars()).collect();
        let alphabet: BTreeSet<String> = chars
            .iter()
            .flat_map(|&c| [c.to_string(), initial(c)])
            .collect();
        let base = alphabet.len() + 3;
        if vocab_size < base {
            return Err(Error::Argument(format!(
                "vocab size {vocab_size} is below the base alphabet plus specials ({base})"
            )));
        }

        let mut vocab = Vocab::with_specials();
        for sym in alphabet {
            vocab.push(sym);
        }

        let mut sorted_words: Vec<(String, u64)> = word_counts.into_iter().collect();
        sorted_words.sort_unstable();
        let mut words: Vec<(Vec<u32>, i64)> = sorted_words
            .iter()
            .map(|(w, c)| {
                let syms = base_symbols(w)
                    .map(|sym| vocab.id(&sym).expect("alphabet symbol"))
                    .collect();
                (syms, *c as i64)
            })
            .collect();

        let mut pair_counts: HashMap<Pair, i64> = HashMap::new();
        let mut pair_words: HashMap<Pair, HashSet<usize>> = HashMap::new();
        for (idx, (syms, count)) in words.iter().enumerate() {
            for p in syms.windows(2) {
                let pair = (p[0], p[1]);
                *pair_counts.entry(pair).or_insert(0) += count;
                pair_words.entry(pair).or_default().insert(idx);
            }
        }

        let mut merges = Vec::new();
        let mut ranks = HashMap::new();
        while vocab.len() < vocab_size {
            let Some(best) = best_pair(&pair_counts, &vocab) else {
                log::warn!(
                    "no pairs left after {} merges; vocabulary stops at {}",
                    merges.len(),
                    vocab.len()
                );
                break;
            };
            let merged = format!("{}{}", vocab.token(best.0), vocab.token(best.1));
            let merged_id = match vocab.id(&merged) {
                Some(id) => id,
                None => vocab.push(merged),
            };
            ranks.insert(best, (merges.len(), merged_id));
            merges.push((vocab.token(best.0).to_string(), vocab.token(best.1).to_string()));

            let mut affected: Vec<usize> = pair_words.remove(&best).unwrap_or_default().into_iter().collect();
            affected.sort_unstable();
            for idx in affected {
                let (syms, count) = &mut words[idx];
                for p in syms.windows(2) {
                    let pair = (p[0], p[1]);
                    if let Some(c) = pair_counts.get_mut(&pair) {
                        *c -= *count;
                    }
                }
                *syms = merge_pair(syms, best, merged_id);
                for p in syms.windows(2) {
                    let pair = (p[0], p[1]);
                    *pair_counts.entry(pair).or_insert(0) += *count;
                    pair_words.entry(pair).or_default().insert(idx);
                }
            }
            pair_counts.retain(|_, c| *c > 0);
        }

        Ok(Bpe { vocab, merges, ranks })
    }

    pub fn from_parts(vocab: Vocab, merges: Vec<(String, String)>) -> Result<Bpe> {
        let mut ranks = HashMap::new();
        for (rank, (l, r)) in merges.iter().enumerate() {
            let lookup = |t: &str| {
                vocab
                    .id(t)
                    .ok_or_else(|| Error::Config(format!("merge {rank} references unknown token `{t}`")))
            };
            let pair = (lookup(l)?, lookup(r)?);
            let merged = lookup(&format!("{l}{r}"))?;
            ranks.entry(pair).or_insert((rank, merged));
        }
        Ok(Bpe { vocab, merges, ranks })
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    /// Units for one word (without surrounding whitespace).
    pub fn encode_word(&self, word: &str) -> Vec<String> {
        let unk = self.vocab.id(UNK).expect("special");
        let mut syms: Vec<u32> = base_symbols(word)
            .map(|sym| self.vocab.id(&sym).unwrap_or(unk))
            .collect();
        loop {
            let best = syms
                .windows(2)
                .filter_map(|p| self.ranks.get(&(p[0], p[1])).map(|&(rank, id)| (rank, (p[0], p[1]), id)))
                .min_by_key(|&(rank, _, _)| rank);
            match best {
                Some((_, pair, id)) => syms = merge_pair(&syms, pair, id),
                None => break,
            }
        }
        syms.into_iter().map(|id| self.vocab.token(id).to_string()).collect()
    }

    /// `#vocab` section then `#merges` section.
    pub fn to_file_string(&self) -> String {
        let mut out = String::from("#vocab\n");
        for t in self.vocab.entries() {
            out.push_str(t);
            out.push('\n');
        }
        out.push_str("#merges\n");
        for (l, r) in &self.merges {
            out.push_str(&format!("{l} {r}\n"));
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Bpe> {
        enum Section {
            None,
            Vocab,
            Merges,
        }
        let mut section = Section::None;
        let mut vocab = Vocab::default();
        let mut merges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            match line {
                "#vocab" => section = Section::Vocab,
                "#merges" => section = Section::Merges,
                _ => match section {
                    Section::None if line.trim().is_empty() => {}
                    Section::None => return Err(Error::format(origin, i + 1, "content before `#vocab`")),
                    Section::Vocab => {
                        if vocab.id(line).is_some() {
                            return Err(Error::format(origin, i + 1, format!("duplicate token `{line}`")));
                        }
                        vocab.push(line.to_string());
                    }
                    Section::Merges => {
                        if line.is_empty() {
                            continue;
                        }
                        let mut parts = line.split(' ');
                        match (parts.next(), parts.next(), parts.next()) {
                            (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                                merges.push((l.to_string(), r.to_string()))
                            }
                            _ => return Err(Error::format(origin, i + 1, "expected `left right`")),
                        }
                    }
                },
            }
        }
        for special in [UNK, BOS, EOS] {
            if vocab.id(special).is_none() {
                return Err(Error::format(origin, 0, format!("missing special token `{special}`")));
            }
        }
        Bpe::from_parts(vocab, merges)
    }

    pub fn load(path: &Path) -> Result<Bpe> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Bpe::parse(&text, &path.display().to_string())
    }
}

fn initial(c: char) -> String {
    let mut s = String::with_capacity(c.len_utf8() + WORD_MARKER.len_utf8());
    s.push(WORD_MARKER);
    s.push(c);
    s
}

/// Marker-fused first character, then the remaining characters.
fn base_symbols(word: &str) -> impl Iterator<Item = String> + '_ {
    word.chars()
        .enumerate()
        .map(|(i, c)| if i == 0 { initial(c) } else { c.to_string() })
}

fn best_pair(counts: &HashMap<Pair, i64>, vocab: &Vocab) -> Option<Pair> {
    let mut best: Option<(Pair, i64)> = None;
    for (&pair, &count) in counts {
        if count <= 0 {
            continue;
        }
        best = match best {
            None => Some((pair, count)),
            Some((bp, bc)) => {
                let key = |p: Pair| (vocab.token(p.0), vocab.token(p.1));
                if count > bc || (count == bc && key(pair) < key(bp)) {
                    Some((pair, count))
                } else {
                    Some((bp, bc))
                }
            }
        };
    }
    best.map(|(p, _)| p)
}

fn merge_pair(syms: &[u32], pair: Pair, merged: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(syms.len());
    let mut i = 0;
    while i < syms.len() {
        if i + 1 < syms.len() && syms[i] == pair.0 && syms[i + 1] == pair.1 {
            out.push(merged);
            i += 2;
        } else {
            out.push(syms[i]);
            i += 1;
        }
    }
    out
}
