//! Smoothed n-gram language models and perplexity.
//!
//! Each sentence is padded with `order - 1` begin markers and one end
//! marker. The end marker is predicted and counted in the sentence length;
//! the begin marker is never predicted, so the prediction support is the
//! vocabulary minus `<s>`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::SentenceId;
use crate::error::{Error, Result};
use crate::tokenize::{Vocab, BOS, EOS, UNK};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// Relative frequency; unseen events get probability zero.
    Mle,
    /// Add-k: `(c(h,w) + k) / (c(h) + k|V|)`.
    AddK(f64),
    /// Interpolated Witten-Bell down to a uniform distribution.
    WittenBell,
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothing::Mle => f.write_str("mle"),
            Smoothing::AddK(k) => write!(f, "addk:{k}"),
            Smoothing::WittenBell => f.write_str("wb"),
        }
    }
}

impl FromStr for Smoothing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(Smoothing::Mle),
            "wb" | "witten-bell" => Ok(Smoothing::WittenBell),
            _ => {
                let k = s
                    .strip_prefix("addk:")
                    .and_then(|k| k.parse::<f64>().ok())
                    .ok_or_else(|| Error::Argument(format!("unknown smoothing `{s}` (mle, wb, addk:<k>)")))?;
                if !(k > 0.0 && k.is_finite()) {
                    return Err(Error::Argument(format!("add-k constant must be positive, got {k}")));
                }
                Ok(Smoothing::AddK(k))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgramConfig {
    pub order: usize,
    pub smoothing: Smoothing,
    /// Units seen fewer times than this in training become `<unk>`.
    pub unk_threshold: u64,
}

impl Default for NgramConfig {
    fn default() -> Self {
        NgramConfig {
            order: 3,
            smoothing: Smoothing::WittenBell,
            unk_threshold: 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextCounts {
    next: HashMap<u32, u64>,
    total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    config: NgramConfig,
    vocab: Vocab,
    /// `tables[k]` maps a context of length `k` to its continuation counts.
    tables: Vec<HashMap<Vec<u32>, ContextCounts>>,
}

/// Log-probability of one sentence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceScore {
    /// Natural log; `-inf` when some event has probability zero.
    pub log_prob: f64,
    /// Predicted units including the end marker.
    pub unit_count: usize,
}

impl SentenceScore {
    pub fn perplexity(&self) -> f64 {
        (-self.log_prob / self.unit_count as f64).exp()
    }
}

const MODEL_HEADER: &str = "#ngram-model v1";

impl NgramModel {
    pub fn train<I, S>(sentences: I, config: NgramConfig) -> Result<NgramModel>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[String]>,
    {
        if config.order == 0 {
            return Err(Error::Argument("n-gram order must be at least 1".into()));
        }
        if let Smoothing::AddK(k) = config.smoothing {
            if !(k > 0.0) {
                return Err(Error::Argument("add-k constant must be positive".into()));
            }
        }
        let sentences: Vec<S> = sentences.into_iter().collect();
        if sentences.is_empty() {
            return Err(Error::Training("cannot train a language model on an empty corpus".into()));
        }

        let mut freq: HashMap<&str, u64> = HashMap::new();
        for s in &sentences {
            for u in s.as_ref() {
                *freq.entry(u.as_str()).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<&str> = freq
            .iter()
            .filter(|(u, &c)| c >= config.unk_threshold && ![UNK, BOS, EOS].contains(*u))
            .map(|(u, _)| *u)
            .collect();
        kept.sort_unstable();
        let mut vocab = Vocab::with_specials();
        for u in kept {
            vocab.push(u.to_string());
        }

        let mut model = NgramModel {
            config,
            vocab,
            tables: vec![HashMap::new(); config.order],
        };
        for s in &sentences {
            let ids = model.padded_ids(s.as_ref());
            for i in config.order - 1..ids.len() {
                for k in 0..config.order {
                    model.add_count(ids[i - k..i].to_vec(), ids[i], 1);
                }
            }
        }
        Ok(model)
    }

    fn add_count(&mut self, ctx: Vec<u32>, next: u32, count: u64) {
        let entry = self.tables[ctx.len()].entry(ctx).or_default();
        *entry.next.entry(next).or_insert(0) += count;
        entry.total += count;
    }

    fn padded_ids(&self, units: &[String]) -> Vec<u32> {
        let bos = self.vocab.id(BOS).expect("special");
        let eos = self.vocab.id(EOS).expect("special");
        let mut ids = vec![bos; self.config.order - 1];
        ids.extend(units.iter().map(|u| self.unit_id(u)));
        ids.push(eos);
        ids
    }

    fn unit_id(&self, unit: &str) -> u32 {
        self.vocab
            .id(unit)
            .filter(|_| unit != BOS)
            .unwrap_or_else(|| self.vocab.id(UNK).expect("special"))
    }

    pub fn config(&self) -> NgramConfig {
        self.config
    }

    pub fn order(&self) -> usize {
        self.config.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Size of the prediction support (every vocabulary entry except `<s>`).
    pub fn support_size(&self) -> usize {
        self.vocab.len() - 1
    }

    /// Ids of every unit that can be predicted.
    pub fn support(&self) -> Vec<u32> {
        let bos = self.vocab.id(BOS).expect("special");
        (0..self.vocab.len() as u32).filter(|&i| i != bos).collect()
    }

    /// `P(next | context)`. Only the last `order - 1` context ids are used;
    /// shorter contexts are taken as given.
    pub fn prob_ids(&self, context: &[u32], next: u32) -> f64 {
        let n = self.config.order;
        let ctx = &context[context.len().saturating_sub(n - 1)..];
        let v = self.support_size() as f64;
        let lookup = |h: &[u32]| self.tables[h.len()].get(h);
        match self.config.smoothing {
            Smoothing::Mle => match lookup(ctx) {
                Some(c) => c.next.get(&next).copied().unwrap_or(0) as f64 / c.total as f64,
                None => 0.0,
            },
            Smoothing::AddK(k) => {
                let (c, total) = lookup(ctx).map_or((0, 0), |c| (c.next.get(&next).copied().unwrap_or(0), c.total));
                (c as f64 + k) / (total as f64 + k * v)
            }
            Smoothing::WittenBell => {
                let mut p = 1.0 / v;
                for k in 0..=ctx.len() {
                    let h = &ctx[ctx.len() - k..];
                    if let Some(c) = lookup(h) {
                        let types = c.next.len() as f64;
                        let count = c.next.get(&next).copied().unwrap_or(0) as f64;
                        p = (count + types * p) / (c.total as f64 + types);
                    }
                }
                p
            }
        }
    }

    /// `P(next | context)` over unit strings; unknown units map to `<unk>`.
    pub fn prob(&self, context: &[&str], next: &str) -> f64 {
        let bos = self.vocab.id(BOS).expect("special");
        let ctx: Vec<u32> = context
            .iter()
            .map(|u| if *u == BOS { bos } else { self.unit_id(u) })
            .collect();
        self.prob_ids(&ctx, self.unit_id(next))
    }

    pub fn score(&self, units: &[String]) -> SentenceScore {
        let ids = self.padded_ids(units);
        let n = self.config.order;
        let log_prob = (n - 1..ids.len())
            .map(|i| self.prob_ids(&ids[i + 1 - n..i], ids[i]).ln())
            .sum();
        SentenceScore {
            log_prob,
            unit_count: units.len() + 1,
        }
    }

    /// Scores many sentences in parallel, preserving input order.
    pub fn score_all(&self, sentences: &[Vec<String>]) -> Vec<SentenceScore> {
        sentences.par_iter().map(|s| self.score(s)).collect()
    }

    /// Versioned text form: header, configuration, `#vocab`, then `#counts`
    /// lines `context<TAB>unit<TAB>count` sorted by context length, context
    /// and unit.
    pub fn to_file_string(&self) -> String {
        let mut out = format!(
            "{MODEL_HEADER}\norder\t{}\nsmoothing\t{}\nunk_threshold\t{}\n#vocab\n",
            self.config.order, self.config.smoothing, self.config.unk_threshold
        );
        for t in self.vocab.entries() {
            out.push_str(t);
            out.push('\n');
        }
        out.push_str("#counts\n");
        for table in &self.tables {
            let mut rows: Vec<(Vec<&str>, &str, u64)> = table
                .iter()
                .flat_map(|(ctx, c)| {
                    let ctx: Vec<&str> = ctx.iter().map(|&i| self.vocab.token(i)).collect();
                    c.next
                        .iter()
                        .map(move |(&w, &n)| (ctx.clone(), self.vocab.token(w), n))
                })
                .collect();
            rows.sort_unstable();
            for (ctx, w, n) in rows {
                out.push_str(&format!("{}\t{w}\t{n}\n", ctx.join(" ")));
            }
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<NgramModel> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, msg: &str| Error::format(origin, line, msg.to_string());
        match lines.next() {
            Some((_, MODEL_HEADER)) => {}
            _ => return Err(err(1, "missing `#ngram-model v1` header")),
        }
        let mut field = |name: &str| -> Result<String> {
            let (i, line) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
            line.strip_prefix(name)
                .and_then(|r| r.strip_prefix('\t'))
                .map(str::to_string)
                .ok_or_else(|| err(i + 1, &format!("expected `{name}`")))
        };
        let order: usize = field("order")?.parse().map_err(|_| err(2, "bad order"))?;
        let smoothing: Smoothing = field("smoothing")?.parse().map_err(|_| err(3, "bad smoothing"))?;
        let unk_threshold: u64 = field("unk_threshold")?.parse().map_err(|_| err(4, "bad unk_threshold"))?;
        if order == 0 {
            return Err(err(2, "order must be at least 1"));
        }
        match lines.next() {
            Some((_, "#vocab")) => {}
            _ => return Err(err(5, "expected `#vocab`")),
        }
        let mut vocab = Vocab::default();
        let mut model = None;
        for (i, line) in lines.by_ref() {
            if line == "#counts" {
                model = Some(NgramModel {
                    config: NgramConfig {
                        order,
                        smoothing,
                        unk_threshold,
                    },
                    vocab: std::mem::take(&mut vocab),
                    tables: vec![HashMap::new(); order],
                });
                break;
            }
            if vocab.contains(line) {
                return Err(err(i + 1, "duplicate vocabulary entry"));
            }
            vocab.push(line.to_string());
        }
        let mut model = model.ok_or_else(|| err(0, "missing `#counts` section"))?;
        for special in [UNK, BOS, EOS] {
            if !model.vocab.contains(special) {
                return Err(err(0, &format!("vocabulary lacks `{special}`")));
            }
        }
        for (i, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(i + 1, "expected `context<TAB>unit<TAB>count`"));
            }
            let id = |t: &str| model.vocab.id(t).ok_or_else(|| err(i + 1, &format!("unknown unit `{t}`")));
            let ctx = fields[0]
                .split(' ')
                .filter(|t| !t.is_empty())
                .map(id)
                .collect::<Result<Vec<_>>>()?;
            if ctx.len() >= order {
                return Err(err(i + 1, "context longer than order - 1"));
            }
            let next = id(fields[1])?;
            let count: u64 = fields[2].parse().map_err(|_| err(i + 1, "bad count"))?;
            model.add_count(ctx, next, count);
        }
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<NgramModel> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        NgramModel::parse(&text, &path.display().to_string())
    }
}

/// How per-sentence perplexities combine into one corpus value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// `exp(mean_i log ppl_i)`.
    #[default]
    SentenceGeometric,
    /// `exp(-sum_i log P_i / sum_i T_i)`.
    TokenWeighted,
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentence" => Ok(Aggregation::SentenceGeometric),
            "token" => Ok(Aggregation::TokenWeighted),
            _ => Err(Error::Argument(format!("unknown aggregation `{s}` (sentence, token)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerplexityReport {
    pub per_sentence: BTreeMap<SentenceId, f64>,
    pub corpus: f64,
    pub aggregation: Aggregation,
    /// Sentences with zero probability; when non-empty the corpus value is
    /// infinite.
    pub infinite: Vec<SentenceId>,
    pub checkpoint: String,
    pub seed: u64,
}

impl PerplexityReport {
    pub fn from_scores(
        scores: &[(SentenceId, SentenceScore)],
        aggregation: Aggregation,
        checkpoint: impl Into<String>,
        seed: u64,
    ) -> Result<PerplexityReport> {
        if scores.is_empty() {
            return Err(Error::Argument("perplexity over an empty test set".into()));
        }
        let infinite: Vec<SentenceId> = scores
            .iter()
            .filter(|(_, s)| !s.log_prob.is_finite())
            .map(|(id, _)| *id)
            .collect();
        let per_sentence = scores.iter().map(|(id, s)| (*id, s.perplexity())).collect();
        let corpus = if !infinite.is_empty() {
            f64::INFINITY
        } else {
            match aggregation {
                Aggregation::SentenceGeometric => {
                    let mean_log = scores
                        .iter()
                        .map(|(_, s)| -s.log_prob / s.unit_count as f64)
                        .sum::<f64>()
                        / scores.len() as f64;
                    mean_log.exp()
                }
                Aggregation::TokenWeighted => {
                    let lp: f64 = scores.iter().map(|(_, s)| s.log_prob).sum();
                    let t: usize = scores.iter().map(|(_, s)| s.unit_count).sum();
                    (-lp / t as f64).exp()
                }
            }
        };
        Ok(PerplexityReport {
            per_sentence,
            corpus,
            aggregation,
            infinite,
            checkpoint: checkpoint.into(),
            seed,
        })
    }

    /// `id  perplexity` rows.
    pub fn per_sentence_tsv(&self) -> String {
        let mut out = String::from("#sentence_id\tperplexity\n");
        for (id, p) in &self.per_sentence {
            out.push_str(&format!("{id}\t{p}\n"));
        }
        out
    }
}

/// Scores `test` and aggregates into a report.
pub fn perplexity(
    model: &NgramModel,
    test: &[(SentenceId, Vec<String>)],
    aggregation: Aggregation,
) -> Result<PerplexityReport> {
    let scores: Vec<(SentenceId, SentenceScore)> =
        test.par_iter().map(|(id, units)| (*id, model.score(units))).collect();
    PerplexityReport::from_scores(&scores, aggregation, "", 0)
}

/// One line of the score interchange format.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub sentence_id: SentenceId,
    pub variant: String,
    pub log_prob: f64,
    pub unit_count: usize,
    pub checkpoint: String,
    pub seed: u64,
}

impl ScoreRecord {
    pub fn score(&self) -> SentenceScore {
        SentenceScore {
            log_prob: self.log_prob,
            unit_count: self.unit_count,
        }
    }
}

pub const SCORE_HEADER: &str = "#sentence_id\tvariant\ttotal_logprob_nat\tunit_count\tcheckpoint\tseed";

pub fn scores_to_tsv(records: &[ScoreRecord]) -> String {
    let mut out = format!("{SCORE_HEADER}\n");
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.sentence_id, r.variant, r.log_prob, r.unit_count, r.checkpoint, r.seed
        ));
    }
    out
}

/// Parsed score file plus the number of duplicate keys overwritten.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreFile {
    pub records: Vec<ScoreRecord>,
    pub duplicates: usize,
}

impl ScoreFile {
    /// Record for `(id, variant)`, if any (first match across checkpoints).
    pub fn get(&self, id: SentenceId, variant: &str) -> Option<&ScoreRecord> {
        self.records.iter().find(|r| r.sentence_id == id && r.variant == variant)
    }

    pub fn index(&self) -> HashMap<(SentenceId, &str), &ScoreRecord> {
        let mut map = HashMap::new();
        for r in &self.records {
            map.entry((r.sentence_id, r.variant.as_str())).or_insert(r);
        }
        map
    }
}

/// Parses the interchange format. Lines starting with `#` are headers or
/// comments. Duplicate `(id, variant, checkpoint, seed)` keys keep the last
/// line, in the position of the first.
pub fn parse_scores(text: &str, origin: &str) -> Result<ScoreFile> {
    let mut records: Vec<ScoreRecord> = Vec::new();
    let mut position: HashMap<(SentenceId, String, String, u64), usize> = HashMap::new();
    let mut duplicates = 0;
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::format(origin, i + 1, msg.to_string());
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(err(&format!("expected 6 tab-separated fields, found {}", f.len())));
        }
        let record = ScoreRecord {
            sentence_id: f[0].parse().map_err(|_| err("sentence_id is not an integer"))?,
            variant: f[1].to_string(),
            log_prob: f[2].parse().map_err(|_| err("total_logprob_nat is not a number"))?,
            unit_count: f[3].parse().map_err(|_| err("unit_count is not an integer"))?,
            checkpoint: f[4].to_string(),
            seed: f[5].parse().map_err(|_| err("seed is not an integer"))?,
        };
        if record.unit_count == 0 {
            return Err(err("unit_count must be at least 1"));
        }
        if record.log_prob > 0.0 || record.log_prob.is_nan() {
            return Err(err("total_logprob_nat must be <= 0"));
        }
        let key = (
            record.sentence_id,
            record.variant.clone(),
            record.checkpoint.clone(),
            record.seed,
        );
        match position.get(&key) {
            Some(&at) => {
                duplicates += 1;
                records[at] = record;
            }
            None => {
                position.insert(key, records.len());
                records.push(record);
            }
        }
    }
    if duplicates > 0 {
        log::warn!("{origin}: {duplicates} duplicate score lines, last one kept");
    }
    Ok(ScoreFile { records, duplicates })
}

pub fn ingest_scores(path: &Path) -> Result<ScoreFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sents(lines: &[&str]) -> Vec<Vec<String>> {
        lines
            .iter()
            .map(|l| l.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    fn config(order: usize, smoothing: Smoothing, unk: u64) -> NgramConfig {
        NgramConfig {
            order,
            smoothing,
            unk_threshold: unk,
        }
    }

    #[test]
    fn unigram_mle_counts_end_marker() {
        let m = NgramModel::train(sents(&["a a b"]), config(1, Smoothing::Mle, 1)).unwrap();
        assert_eq!(m.prob(&[], "a"), 0.5);
        assert_eq!(m.prob(&[], "b"), 0.25);
        assert_eq!(m.prob(&[], EOS), 0.25);
    }

    #[test]
    fn bigram_addk_by_hand() {
        // "a b" and "b b": vocab <unk> <s> </s> a b -> support 4
        // c(<s>,a)=1 c(<s>,b)=1 c(<s>)=2 ; c(b,b)=1 c(b,</s>)=2 c(b)=3
        let m = NgramModel::train(sents(&["a b", "b b"]), config(2, Smoothing::AddK(1.0), 1)).unwrap();
        assert!((m.prob(&[BOS], "a") - 2.0 / 6.0).abs() < 1e-15);
        assert!((m.prob(&["b"], EOS) - 3.0 / 7.0).abs() < 1e-15);
        assert!((m.prob(&["a"], "a") - 1.0 / 5.0).abs() < 1e-15);
        // unseen context: uniform
        assert!((m.prob(&["zzz"], "a") - 0.25).abs() < 1e-15);
        // score of "a b": P(a|<s>) P(b|a) P(</s>|b) = 2/6 * 2/5 * 3/7
        let s = m.score(&sents(&["a b"])[0]);
        assert!((s.log_prob - (2.0f64 / 6.0 * 2.0 / 5.0 * 3.0 / 7.0).ln()).abs() < 1e-12);
        assert_eq!(s.unit_count, 3);
    }

    #[test]
    fn uniform_model_has_support_size_perplexity() {
        // counts a=2 b=2 </s>=2 <unk>=2 -> uniform over 4
        let m = NgramModel::train(sents(&["a b x", "b a y"]), config(1, Smoothing::Mle, 2)).unwrap();
        assert_eq!(m.support_size(), 4);
        let s = m.score(&sents(&["a b q"])[0]);
        assert!((s.log_prob - 4.0 * 0.25f64.ln()).abs() < 1e-12);
        let empty = m.score(&[]);
        assert_eq!(empty.unit_count, 1);
        assert!((empty.log_prob - 0.25f64.ln()).abs() < 1e-15);
        let test: Vec<(SentenceId, Vec<String>)> = sents(&["a", "b a x y"]).into_iter().enumerate().map(|(i, s)| (i as u64, s)).collect();
        let r = perplexity(&m, &test, Aggregation::SentenceGeometric).unwrap();
        assert!((r.corpus - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mle_unseen_is_infinite() {
        let m = NgramModel::train(sents(&["a b"]), config(2, Smoothing::Mle, 1)).unwrap();
        let test = vec![(7, sents(&["b a"])[0].clone()), (8, sents(&["a b"])[0].clone())];
        let r = perplexity(&m, &test, Aggregation::SentenceGeometric).unwrap();
        assert_eq!(r.infinite, vec![7]);
        assert!(r.corpus.is_infinite());
    }

    #[test]
    fn witten_bell_normalizes() {
        let m = NgramModel::train(
            sents(&["the cat sat", "the dog sat down", "a cat ran", "the cat ran down"]),
            config(3, Smoothing::WittenBell, 1),
        )
        .unwrap();
        let bos = m.vocab().id(BOS).unwrap();
        let mut contexts: Vec<Vec<u32>> = vec![vec![bos, bos], vec![99_999, 99_998]];
        for ctx in m.tables[2].keys() {
            contexts.push(ctx.clone());
        }
        for ctx in contexts {
            let total: f64 = m.support().iter().map(|&w| m.prob_ids(&ctx, w)).sum();
            assert!((total - 1.0).abs() < 1e-9, "{ctx:?}: {total}");
        }
    }

    #[test]
    fn empty_corpus_and_bad_config() {
        assert!(matches!(
            NgramModel::train(Vec::<Vec<String>>::new(), NgramConfig::default()),
            Err(Error::Training(_))
        ));
        assert!(NgramModel::train(sents(&["a"]), config(0, Smoothing::Mle, 1)).is_err());
        assert!("addk:0".parse::<Smoothing>().is_err());
        assert_eq!("addk:0.5".parse::<Smoothing>().unwrap(), Smoothing::AddK(0.5));
    }

    #[test]
    fn serialization_round_trip() {
        let m = NgramModel::train(sents(&["a b c a", "b c d"]), config(3, Smoothing::AddK(0.5), 1)).unwrap();
        let text = m.to_file_string();
        let back = NgramModel::parse(&text, "mem").unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_file_string(), text);
        let again = NgramModel::train(sents(&["a b c a", "b c d"]), config(3, Smoothing::AddK(0.5), 1)).unwrap();
        assert_eq!(again.to_file_string(), text);
    }

    #[test]
    fn score_file_parsing() {
        assert!(parse_scores("", "f").unwrap().records.is_empty());
        let text = format!("{SCORE_HEADER}\n1\tidentity\t-3.5\t4\tfinal\t0\n2\tidentity\t-1\t2\tfinal\t0\n3\tnp:Nnda\t-2\t3\tfinal\t0\n");
        assert_eq!(parse_scores(&text, "f").unwrap().records.len(), 3);
        let dup = "1\tidentity\t-3.5\t4\tfinal\t0\n1\tidentity\t-2.0\t4\tfinal\t0\n";
        let parsed = parse_scores(dup, "f").unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.duplicates, 1);
        assert_eq!(parsed.records[0].log_prob, -2.0);
        let bad = "1\tidentity\t-3.5\t4\tfinal\n";
        assert!(matches!(parse_scores(bad, "f"), Err(Error::Format { line: 1, .. })));
        assert!(parse_scores("1\tx\t0.5\t1\tc\t0\n", "f").is_err());
        assert!(parse_scores("1\tx\t-0.5\t0\tc\t0\n", "f").is_err());
    }
}
