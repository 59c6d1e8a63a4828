//! Sentence-aligned parallel corpora.
//!
//! A [`ParallelCorpus`] holds one ordered record list per language. Records
//! are keyed by a numeric id that is shared across languages, and every
//! operation here keeps the id sets of all languages identical.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::rng::{Domain, SplitMix64};

pub type SentenceId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    pub id: SentenceId,
    pub lang: String,
    pub source: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Split {
    #[default]
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::Argument(format!("unknown split `{other}`"))),
        }
    }
}

/// One input source: a tag and one line-aligned file per language.
#[derive(Debug, Clone)]
pub struct SourceFiles {
    pub tag: String,
    pub files: Vec<(String, PathBuf)>,
}

/// In-memory variant of [`SourceFiles`].
#[derive(Debug, Clone)]
pub struct SourceLines {
    pub tag: String,
    pub lines: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    languages: BTreeSet<String>,
    records: BTreeMap<String, Vec<SentenceRecord>>,
    splits: BTreeMap<SentenceId, Split>,
}

impl ParallelCorpus {
    /// Builds a corpus from already-aligned records. Each language's list is
    /// sorted by id; missing split entries default to train.
    pub fn from_records(
        records: BTreeMap<String, Vec<SentenceRecord>>,
        splits: BTreeMap<SentenceId, Split>,
    ) -> Result<Self> {
        let mut records = records;
        for list in records.values_mut() {
            list.sort_by_key(|r| r.id);
        }
        let languages: BTreeSet<String> = records.keys().cloned().collect();
        let mut corpus = ParallelCorpus {
            languages,
            records,
            splits: BTreeMap::new(),
        };
        corpus.check_alignment()?;
        corpus.splits = corpus
            .ids()
            .into_iter()
            .map(|id| (id, splits.get(&id).copied().unwrap_or_default()))
            .collect();
        Ok(corpus)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.languages.iter().map(String::as_str)
    }

    pub fn has_language(&self, lang: &str) -> bool {
        self.languages.contains(lang)
    }

    pub fn records(&self, lang: &str) -> Option<&[SentenceRecord]> {
        self.records.get(lang).map(Vec::as_slice)
    }

    pub fn split_of(&self, id: SentenceId) -> Option<Split> {
        self.splits.get(&id).copied()
    }

    pub fn splits(&self) -> &BTreeMap<SentenceId, Split> {
        &self.splits
    }

    /// Sorted ids. Identical for every language.
    pub fn ids(&self) -> Vec<SentenceId> {
        self.records
            .values()
            .next()
            .map(|list| list.iter().map(|r| r.id).collect())
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.records.values().next().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records of `lang` restricted to one split.
    pub fn split_records<'a>(
        &'a self,
        lang: &str,
        split: Split,
    ) -> impl Iterator<Item = &'a SentenceRecord> + 'a {
        self.records
            .get(lang)
            .into_iter()
            .flatten()
            .filter(move |r| self.splits.get(&r.id) == Some(&split))
    }

    /// Verifies alignment totality and per-id source agreement.
    pub fn check_alignment(&self) -> Result<()> {
        let mut iter = self.records.iter();
        let Some((first_lang, first)) = iter.next() else {
            return Ok(());
        };
        let mut seen = HashSet::with_capacity(first.len());
        for r in first {
            if !seen.insert(r.id) {
                return Err(Error::Alignment {
                    context: first_lang.clone(),
                    detail: format!("duplicate id {}", r.id),
                });
            }
        }
        for (lang, list) in iter {
            if list.len() != first.len() {
                return Err(Error::Alignment {
                    context: lang.clone(),
                    detail: format!("{} records, expected {}", list.len(), first.len()),
                });
            }
            for (a, b) in first.iter().zip(list) {
                if a.id != b.id {
                    return Err(Error::Alignment {
                        context: lang.clone(),
                        detail: format!("id {} not aligned with {}", b.id, a.id),
                    });
                }
                if a.source != b.source {
                    return Err(Error::Alignment {
                        context: lang.clone(),
                        detail: format!("id {} has source `{}` vs `{}`", a.id, b.source, a.source),
                    });
                }
            }
        }
        Ok(())
    }

    /// Replaces the text of every record of `lang` via `f`, leaving ids,
    /// sources and splits untouched.
    pub fn map_texts<F>(&self, lang: &str, f: F) -> Result<ParallelCorpus>
    where
        F: Fn(&SentenceRecord) -> Result<String>,
    {
        let list = self
            .records
            .get(lang)
            .ok_or_else(|| Error::Argument(format!("language `{lang}` not in corpus")))?;
        let mapped = list
            .iter()
            .map(|r| {
                Ok(SentenceRecord {
                    text: sanitize_text(&f(r)?),
                    ..r.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.clone();
        out.records.insert(lang.to_string(), mapped);
        Ok(out)
    }

    /// A corpus holding only `lang`.
    pub fn select_language(&self, lang: &str) -> Result<ParallelCorpus> {
        let list = self
            .records
            .get(lang)
            .ok_or_else(|| Error::Argument(format!("language `{lang}` not in corpus")))?;
        Ok(ParallelCorpus {
            languages: [lang.to_string()].into(),
            records: [(lang.to_string(), list.clone())].into(),
            splits: self.splits.clone(),
        })
    }

    fn retain_ids(&self, keep: &HashSet<SentenceId>) -> ParallelCorpus {
        ParallelCorpus {
            languages: self.languages.clone(),
            records: self
                .records
                .iter()
                .map(|(lang, list)| {
                    (
                        lang.clone(),
                        list.iter().filter(|r| keep.contains(&r.id)).cloned().collect(),
                    )
                })
                .collect(),
            splits: self
                .splits
                .iter()
                .filter(|(id, _)| keep.contains(id))
                .map(|(&id, &s)| (id, s))
                .collect(),
        }
    }
}

fn sanitize_text(line: &str) -> String {
    line.trim_end_matches(['\n', '\r']).replace('\t', " ")
}

/// Merges line-aligned sources into one corpus.
///
/// Ids are global line offsets in (source order, line order), starting at 0.
/// A line tuple in which any language's line is blank is dropped from every
/// language; its id is not reused.
pub fn ingest_lines(sources: &[SourceLines]) -> Result<ParallelCorpus> {
    let mut languages: Option<BTreeSet<String>> = None;
    let mut records: BTreeMap<String, Vec<SentenceRecord>> = BTreeMap::new();
    let mut next_id: SentenceId = 0;

    for source in sources {
        let mut langs = BTreeSet::new();
        for (lang, _) in &source.lines {
            if !langs.insert(lang.clone()) {
                return Err(Error::Config(format!(
                    "language `{lang}` listed twice in source `{}`",
                    source.tag
                )));
            }
        }
        match &languages {
            None => languages = Some(langs.clone()),
            Some(expected) if *expected != langs => {
                return Err(Error::Config(format!(
                    "source `{}` covers languages {:?}, expected {:?}",
                    source.tag, langs, expected
                )))
            }
            Some(_) => {}
        }
        let Some((_, first)) = source.lines.first() else {
            continue;
        };
        let n = first.len();
        if let Some((lang, lines)) = source.lines.iter().find(|(_, l)| l.len() != n) {
            return Err(Error::Alignment {
                context: format!("source `{}`", source.tag),
                detail: format!("`{lang}` has {} lines, expected {n}", lines.len()),
            });
        }
        for i in 0..n {
            let id = next_id + i as SentenceId;
            let texts: Vec<String> = source.lines.iter().map(|(_, l)| sanitize_text(&l[i])).collect();
            if texts.iter().any(|t| t.trim().is_empty()) {
                continue;
            }
            for ((lang, _), text) in source.lines.iter().zip(texts) {
                records.entry(lang.clone()).or_default().push(SentenceRecord {
                    id,
                    lang: lang.clone(),
                    source: source.tag.clone(),
                    text,
                });
            }
        }
        next_id += n as SentenceId;
    }

    for lang in languages.unwrap_or_default() {
        records.entry(lang).or_default();
    }
    ParallelCorpus::from_records(records, BTreeMap::new())
}

/// Reads each source's per-language files and merges them with
/// [`ingest_lines`].
pub fn ingest(sources: &[SourceFiles]) -> Result<ParallelCorpus> {
    let loaded = sources
        .iter()
        .map(|s| {
            let lines = s
                .files
                .iter()
                .map(|(lang, path)| Ok((lang.clone(), read_lines(path)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SourceLines {
                tag: s.tag.clone(),
                lines,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ingest_lines(&loaded)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

/// NFC, whitespace runs collapsed to one space, trimmed. Case is preserved.
pub fn normalize_for_dedup(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Drops every id whose `key_lang` text repeats an earlier id's text after
/// normalization. The first occurrence in id order survives.
pub fn deduplicate(corpus: &ParallelCorpus, key_lang: &str) -> Result<ParallelCorpus> {
    let list = corpus
        .records(key_lang)
        .ok_or_else(|| Error::Argument(format!("dedup language `{key_lang}` not in corpus")))?;
    let mut seen = HashSet::with_capacity(list.len());
    let keep: HashSet<SentenceId> = list
        .iter()
        .filter(|r| seen.insert(normalize_for_dedup(&r.text)))
        .map(|r| r.id)
        .collect();
    Ok(corpus.retain_ids(&keep))
}

/// Keeps an id only if `predicate` accepts its record in every language.
pub fn filter_records<P>(corpus: &ParallelCorpus, predicate: P) -> ParallelCorpus
where
    P: Fn(&SentenceRecord) -> bool,
{
    let rejected: HashSet<SentenceId> = corpus
        .records
        .values()
        .flatten()
        .filter(|r| !predicate(r))
        .map(|r| r.id)
        .collect();
    let keep = corpus.ids().into_iter().filter(|id| !rejected.contains(id)).collect();
    corpus.retain_ids(&keep)
}

/// Share of alphabetic characters that are ASCII letters. `None` when the
/// text has no alphabetic characters.
pub fn ascii_letter_ratio(text: &str) -> Option<f64> {
    let (ascii, total) = text
        .chars()
        .filter(|c| c.is_alphabetic())
        .fold((0usize, 0usize), |(a, t), c| (a + c.is_ascii_alphabetic() as usize, t + 1));
    (total > 0).then(|| ascii as f64 / total as f64)
}

/// Baseline stand-in for a language-ID model: rejects a record outside
/// `key_lang` whose letters are at least `threshold` ASCII. Only meaningful
/// for languages written in a non-Latin script.
#[derive(Debug, Clone)]
pub struct AsciiScriptFilter {
    pub key_lang: String,
    pub threshold: f64,
}

impl AsciiScriptFilter {
    pub fn new(key_lang: impl Into<String>) -> Self {
        AsciiScriptFilter {
            key_lang: key_lang.into(),
            threshold: 0.9,
        }
    }

    pub fn accepts(&self, record: &SentenceRecord) -> bool {
        record.lang == self.key_lang
            || ascii_letter_ratio(&record.text).map_or(true, |r| r < self.threshold)
    }
}

/// Assigns exactly `test_size` ids to the test split.
///
/// The sorted id list is shuffled with the `Split` stream keyed by `seed`;
/// the first `test_size` ids of the shuffled order become test.
pub fn make_splits(corpus: &ParallelCorpus, test_size: usize, seed: u64) -> Result<ParallelCorpus> {
    let mut ids = corpus.ids();
    if test_size > ids.len() {
        return Err(Error::Argument(format!(
            "test size {test_size} exceeds corpus size {}",
            ids.len()
        )));
    }
    SplitMix64::for_domain(Domain::Split, &[seed]).shuffle(&mut ids);
    let test: HashSet<SentenceId> = ids[..test_size].iter().copied().collect();
    let mut out = corpus.clone();
    out.splits = corpus
        .ids()
        .into_iter()
        .map(|id| (id, if test.contains(&id) { Split::Test } else { Split::Train }))
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceStats {
    pub source: String,
    pub sentences: u64,
    pub words: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusStats {
    /// Sources in order of first appearance by id.
    pub sources: Vec<SourceStats>,
}

impl CorpusStats {
    pub fn total_sentences(&self) -> u64 {
        self.sources.iter().map(|s| s.sentences).sum()
    }

    pub fn total_words(&self) -> u64 {
        self.sources.iter().map(|s| s.words).sum()
    }

    /// Tab-separated table: `source  sentences  words`, then an `overall` row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("#source\tsentences\twords\n");
        for s in &self.sources {
            out.push_str(&format!("{}\t{}\t{}\n", s.source, s.sentences, s.words));
        }
        out.push_str(&format!(
            "overall\t{}\t{}\n",
            self.total_sentences(),
            self.total_words()
        ));
        out
    }
}

pub fn stats(corpus: &ParallelCorpus, ref_lang: &str) -> Result<CorpusStats> {
    if corpus.is_empty() && corpus.languages.is_empty() {
        return Ok(CorpusStats::default());
    }
    let list = corpus
        .records(ref_lang)
        .ok_or_else(|| Error::Argument(format!("reference language `{ref_lang}` not in corpus")))?;
    let mut out: Vec<SourceStats> = Vec::new();
    for r in list {
        let words = r.text.split_whitespace().count() as u64;
        match out.iter_mut().find(|s| s.source == r.source) {
            Some(s) => {
                s.sentences += 1;
                s.words += words;
            }
            None => out.push(SourceStats {
                source: r.source.clone(),
                sentences: 1,
                words,
            }),
        }
    }
    Ok(CorpusStats { sources: out })
}

/// One record line: `id  lang  source  split  text`.
pub fn format_record(record: &SentenceRecord, split: Split) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}",
        record.id, record.lang, record.source, split, record.text
    )
}

pub fn write_language_file(corpus: &ParallelCorpus, lang: &str, path: &Path) -> Result<()> {
    let list = corpus
        .records(lang)
        .ok_or_else(|| Error::Argument(format!("language `{lang}` not in corpus")))?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in list {
        let split = corpus.split_of(r.id).unwrap_or_default();
        writeln!(w, "{}", format_record(r, split)).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parsed record file: records plus their split labels.
pub fn read_language_file(path: &Path) -> Result<(Vec<SentenceRecord>, BTreeMap<SentenceId, Split>)> {
    let display = path.display();
    let mut records = Vec::new();
    let mut splits = BTreeMap::new();
    for (i, line) in read_lines(path)?.into_iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(5, '\t');
        let mut next = |name: &str| {
            fields
                .next()
                .ok_or_else(|| Error::format(&display, i + 1, format!("missing field `{name}`")))
        };
        let id: SentenceId = next("id")?
            .parse()
            .map_err(|_| Error::format(&display, i + 1, "id is not an integer"))?;
        let lang = next("lang")?.to_string();
        let source = next("source")?.to_string();
        let split: Split = next("split")?
            .parse()
            .map_err(|e: Error| Error::format(&display, i + 1, e.to_string()))?;
        let text = next("text")?.to_string();
        splits.insert(id, split);
        records.push(SentenceRecord { id, lang, source, text });
    }
    Ok((records, splits))
}

/// Loads several per-language record files into one corpus.
pub fn read_corpus(paths: &[PathBuf]) -> Result<ParallelCorpus> {
    let mut records = BTreeMap::new();
    let mut splits: Option<BTreeMap<SentenceId, Split>> = None;
    for path in paths {
        let (list, s) = read_language_file(path)?;
        let lang = match list.first() {
            Some(r) => r.lang.clone(),
            None => language_from_file_name(path),
        };
        if let Some(prev) = &splits {
            if *prev != s {
                return Err(Error::Alignment {
                    context: path.display().to_string(),
                    detail: "split labels differ from the other language files".into(),
                });
            }
        }
        splits = Some(s);
        records.insert(lang, list);
    }
    ParallelCorpus::from_records(records, splits.unwrap_or_default())
}

fn language_from_file_name(path: &Path) -> String {
    path.file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.split('.').next())
        .unwrap_or_default()
        .to_string()
}
