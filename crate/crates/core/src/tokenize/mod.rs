//! Tokenizers and tokenization-complexity metrics.

mod bpe;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

pub use bpe::{Bpe, WORD_MARKER};

use crate::error::{Error, Result};

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// Ordered, duplicate-free token inventory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    entries: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    /// A vocabulary holding only `<unk>`, `<s>` and `</s>`.
    pub fn with_specials() -> Self {
        let mut v = Vocab::default();
        for s in [UNK, BOS, EOS] {
            v.push(s.to_string());
        }
        v
    }

    /// Appends `token` if absent and returns its id.
    pub fn push(&mut self, token: String) -> u32 {
        if let Some(&id) = self.index.get(&token) {
            return id;
        }
        let id = self.entries.len() as u32;
        self.index.insert(token.clone(), id);
        self.entries.push(token);
        id
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.entries[id as usize]
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitKind {
    Word,
    Subword,
}

/// Units of one sentence plus the word each unit came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSequence {
    pub units: Vec<String>,
    pub kind: UnitKind,
    /// `word_map[i]` is the index of the whitespace word unit `i` belongs to.
    pub word_map: Vec<usize>,
}

impl TokenSequence {
    /// Whitespace words, one unit per word.
    pub fn words(text: &str) -> Self {
        let units: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        let word_map = (0..units.len()).collect();
        TokenSequence {
            units,
            kind: UnitKind::Word,
            word_map,
        }
    }

    /// Units taken as given, each its own word.
    pub fn from_units<I, S>(units: I, kind: UnitKind) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let units: Vec<String> = units.into_iter().map(Into::into).collect();
        let word_map = (0..units.len()).collect();
        TokenSequence { units, kind, word_map }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Units joined by single spaces.
    pub fn render(&self) -> String {
        self.units.join(" ")
    }

    /// True when the word map is non-decreasing and covers `0..=max` without gaps.
    pub fn has_ordered_word_map(&self) -> bool {
        let mut expected = 0usize;
        for (i, &w) in self.word_map.iter().enumerate() {
            if i == 0 {
                if w != 0 {
                    return false;
                }
            } else if w == expected + 1 {
                expected = w;
            } else if w != expected {
                return false;
            }
        }
        self.word_map.len() == self.units.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tokenizer {
    /// One unit per whitespace word; open vocabulary.
    Whitespace,
    /// One unit per character; open vocabulary.
    Character,
    Bpe(Bpe),
}

impl fmt::Display for Tokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tokenizer::Whitespace => f.write_str("whitespace"),
            Tokenizer::Character => f.write_str("character"),
            Tokenizer::Bpe(b) => write!(f, "bpe({})", b.vocab().len()),
        }
    }
}

impl Tokenizer {
    pub fn train_bpe<I, S>(sentences: I, vocab_size: usize) -> Result<Tokenizer>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Bpe::train(sentences, vocab_size).map(Tokenizer::Bpe)
    }

    pub fn load(path: &Path) -> Result<Tokenizer> {
        Bpe::load(path).map(Tokenizer::Bpe)
    }

    pub fn encode(&self, sentence: &str) -> TokenSequence {
        let mut units = Vec::new();
        let mut word_map = Vec::new();
        for (w, word) in sentence.split_whitespace().enumerate() {
            match self {
                Tokenizer::Whitespace => units.push(word.to_string()),
                Tokenizer::Character => units.extend(word.chars().map(String::from)),
                Tokenizer::Bpe(bpe) => units.extend(bpe.encode_word(word)),
            }
            word_map.resize(units.len(), w);
        }
        let kind = match self {
            Tokenizer::Whitespace => UnitKind::Word,
            _ => UnitKind::Subword,
        };
        TokenSequence { units, kind, word_map }
    }

    /// Inverse of [`encode`](Self::encode) for sequences in original order.
    /// Words are rebuilt from the word map, markers stripped, and joined
    /// with single spaces.
    pub fn decode(&self, seq: &TokenSequence) -> String {
        let mut words: Vec<String> = Vec::new();
        let mut last = None;
        for (unit, &w) in seq.units.iter().zip(&seq.word_map) {
            let piece = unit.replace(WORD_MARKER, "");
            if last == Some(w) {
                words.last_mut().expect("open word").push_str(&piece);
            } else {
                words.push(piece);
                last = Some(w);
            }
        }
        words.join(" ")
    }

    /// Rebuilds text from units alone, using whitespace or word markers as
    /// the word-boundary signal. Character units carry no boundary
    /// information, so this fails for the character tokenizer.
    pub fn decode_units(&self, units: &[String]) -> Result<String> {
        match self {
            Tokenizer::Whitespace => Ok(units.join(" ")),
            Tokenizer::Character => Err(Error::UnsupportedRecovery(
                "character units, which do not mark word boundaries".into(),
            )),
            Tokenizer::Bpe(_) => {
                let joined: String = units.concat();
                Ok(joined
                    .split(WORD_MARKER)
                    .filter(|w| !w.is_empty())
                    .collect::<Vec<_>>()
                    .join(" "))
            }
        }
    }

    pub fn to_file_string(&self) -> Option<String> {
        match self {
            Tokenizer::Bpe(b) => Some(b.to_file_string()),
            _ => None,
        }
    }
}

/// Token and word totals behind a token-per-word ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tcw {
    pub tokens: u64,
    pub words: u64,
}

impl Tcw {
    pub fn value(&self) -> f64 {
        self.tokens as f64 / self.words as f64
    }
}

/// Tokens emitted per whitespace word over a corpus.
pub fn tcw<I, S>(tok: &Tokenizer, sentences: I) -> Result<Tcw>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = Tcw { tokens: 0, words: 0 };
    for s in sentences {
        let s = s.as_ref();
        out.words += s.split_whitespace().count() as u64;
        out.tokens += tok.encode(s).len() as u64;
    }
    if out.words == 0 {
        return Err(Error::UndefinedMetric("token count per word over zero words".into()));
    }
    Ok(out)
}

/// `floor(0.4 * |V|)` for the whitespace word types of the corpus.
pub fn vocab_heuristic<I, S>(sentences: I) -> usize
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut types = HashSet::new();
    for s in sentences {
        for w in s.as_ref().split_whitespace() {
            if !types.contains(w) {
                types.insert(w.to_string());
            }
        }
    }
    types.len() * 2 / 5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units(seq: &TokenSequence) -> Vec<&str> {
        seq.units.iter().map(String::as_str).collect()
    }

    #[test]
    fn whitespace_and_character_encoding() {
        let s = Tokenizer::Whitespace.encode("a b c");
        assert_eq!(units(&s), ["a", "b", "c"]);
        assert_eq!(s.word_map, [0, 1, 2]);
        let c = Tokenizer::Character.encode("ab");
        assert_eq!(units(&c), ["a", "b"]);
        assert_eq!(c.word_map, [0, 0]);
        assert_eq!(Tokenizer::Character.decode(&Tokenizer::Character.encode("ab  cd")), "ab cd");
    }

    #[test]
    fn single_merge_on_repeated_pair() {
        // alphabet {a, ▁a} + 3 specials + 1 merge
        let tok = Bpe::train(["aa aa aa"], 2 + 3 + 1).unwrap();
        assert_eq!(tok.merges(), [("\u{2581}a".to_string(), "a".to_string())]);
        assert_eq!(tok.vocab().len(), 6);
    }

    #[test]
    fn bpe_rejects_bad_inputs() {
        assert!(matches!(Bpe::train(Vec::<&str>::new(), 100), Err(Error::Training(_))));
        assert!(matches!(Bpe::train(["  "], 100), Err(Error::Training(_))));
        assert!(matches!(Bpe::train(["abc"], 4), Err(Error::Argument(_))));
    }

    #[test]
    fn bpe_hand_segmentation() {
        // Words: "low" x2, "lower" x1, "lowest" x1
        // Pair counts at start: (▁l,o)=4 (o,w)=4 (w,e)=2 (e,r)=1 (e,s)=1 (s,t)=1
        // The tie at 4 breaks lexicographically: "o" < "▁l", so (o,w) first,
        // then (▁l,ow)=4, then (▁low,e)=2.
        let corpus = ["low low lower lowest"];
        let base = 2 * "lowerst".chars().collect::<std::collections::BTreeSet<_>>().len() + 3;
        let bpe = Bpe::train(corpus, base + 3).unwrap();
        let merges: Vec<(&str, &str)> = bpe.merges().iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        assert_eq!(merges, [("o", "w"), ("\u{2581}l", "ow"), ("\u{2581}low", "e")]);
        assert_eq!(bpe.encode_word("lowest"), ["\u{2581}lowe", "s", "t"]);
        assert_eq!(bpe.encode_word("slow"), ["\u{2581}s", "l", "ow"]);
    }

    #[test]
    fn unknown_characters_map_to_unk() {
        let tok = Tokenizer::train_bpe(["ab ab"], 8).unwrap();
        assert_eq!(tok.encode("ba").units, ["\u{2581}b", "a"]);
        let seq = tok.encode("abz");
        assert!(seq.units.contains(&UNK.to_string()));
    }

    #[test]
    fn file_round_trip() {
        let tok = Bpe::train(["the cat sat on the mat", "the dog"], 30).unwrap();
        let text = tok.to_file_string();
        assert!(text.starts_with("#vocab\n<unk>\n<s>\n</s>\n"));
        let back = Bpe::parse(&text, "mem").unwrap();
        assert_eq!(back, tok);
    }

    #[test]
    fn file_rejects_bad_merges() {
        let text = "#vocab\n<unk>\n<s>\n</s>\na\n#merges\na b\n";
        assert!(Bpe::parse(text, "mem").is_err());
        let text = "#vocab\n<unk>\n<s>\n</s>\na\n#merges\na\n";
        assert!(matches!(Bpe::parse(text, "mem"), Err(Error::Format { line: 7, .. })));
    }

    #[test]
    fn tcw_values() {
        assert_eq!(tcw(&Tokenizer::Character, ["ab cd"]).unwrap().value(), 2.0);
        assert_eq!(tcw(&Tokenizer::Whitespace, ["x y z", "w"]).unwrap().value(), 1.0);
        assert!(matches!(tcw(&Tokenizer::Whitespace, [" "]), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn vocab_heuristic_values() {
        assert_eq!(vocab_heuristic(["a b c d e f g h i j a b"]), 4);
        assert_eq!(vocab_heuristic(Vec::<String>::new()), 0);
    }

    #[test]
    fn decode_units_uses_markers() {
        let tok = Tokenizer::train_bpe(["hello world hello"], 20).unwrap();
        let seq = tok.encode("hello world");
        assert_eq!(tok.decode_units(&seq.units).unwrap(), "hello world");
        assert!(Tokenizer::Character.decode_units(&seq.units).is_err());
    }

    #[test]
    fn ordered_word_map() {
        let tok = Tokenizer::Character;
        assert!(tok.encode("ab c de").has_ordered_word_map());
        let mut s = tok.encode("ab c");
        s.word_map.swap(0, 2);
        assert!(!s.has_ordered_word_map());
    }
}
