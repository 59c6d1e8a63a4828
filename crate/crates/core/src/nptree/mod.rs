//! Noun-phrase word-order perturbations over constituency trees.
//!
//! Within every NP, the direct children whose labels fall in one of the four
//! categories (determiner, numeral, adjective, noun) are reordered to follow
//! a target pattern such as `dnNa`. Unclassified children keep their
//! positions; classified children move as whole subtrees and only among the
//! slots that classified children occupied.

mod category;
mod tree;

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

pub use category::{Category, CategoryMap};
pub use tree::Tree;

use crate::corpus::{ParallelCorpus, SentenceId, Split};
use crate::error::{Error, Result};
use crate::rng::{Domain, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NpPattern {
    /// Categories in surface order, e.g. `[Det, Num, Noun, Adj]` for `dnNa`.
    Order([Category; 4]),
    /// Words of classified children shuffled within each NP.
    Random,
}

/// Attestation of an NP order: how common it is across languages, and
/// whether it is derivable in Cinque's account of Universal 20.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attestation {
    pub typological: &'static str,
    pub theoretical: bool,
}

impl NpPattern {
    pub const NNDA: NpPattern = NpPattern::Order([Category::Noun, Category::Num, Category::Det, Category::Adj]);
    pub const ANND: NpPattern = NpPattern::Order([Category::Adj, Category::Num, Category::Noun, Category::Det]);
    pub const DANN: NpPattern = NpPattern::Order([Category::Det, Category::Adj, Category::Noun, Category::Num]);
    pub const DNAN: NpPattern = NpPattern::Order([Category::Det, Category::Num, Category::Adj, Category::Noun]);
    pub const DNNA: NpPattern = NpPattern::Order([Category::Det, Category::Num, Category::Noun, Category::Adj]);

    /// The five named orders followed by the random control.
    pub const STUDIED: [NpPattern; 6] = [
        NpPattern::NNDA,
        NpPattern::ANND,
        NpPattern::DANN,
        NpPattern::DNAN,
        NpPattern::DNNA,
        NpPattern::Random,
    ];

    pub fn attestation(&self) -> Option<Attestation> {
        let (typological, theoretical) = match *self {
            NpPattern::NNDA | NpPattern::ANND | NpPattern::Random => ("no", false),
            NpPattern::DANN => ("few", true),
            NpPattern::DNAN | NpPattern::DNNA => ("many", true),
            _ => return None,
        };
        Some(Attestation {
            typological,
            theoretical,
        })
    }

    fn rank(order: &[Category; 4], c: Category) -> usize {
        order.iter().position(|&o| o == c).expect("complete order")
    }
}

impl fmt::Display for NpPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NpPattern::Random => f.write_str("random"),
            NpPattern::Order(order) => order.iter().try_for_each(|c| write!(f, "{}", c.symbol())),
        }
    }
}

impl FromStr for NpPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "random" {
            return Ok(NpPattern::Random);
        }
        let cats: Vec<Category> = s
            .chars()
            .map(|c| match c {
                'd' | 'D' => Ok(Category::Det),
                'n' => Ok(Category::Num),
                'a' | 'A' => Ok(Category::Adj),
                'N' => Ok(Category::Noun),
                other => Err(Error::Argument(format!("unknown category symbol `{other}` in `{s}`"))),
            })
            .collect::<Result<_>>()?;
        let order: [Category; 4] = cats
            .try_into()
            .map_err(|_| Error::Argument(format!("NP pattern `{s}` must name four categories")))?;
        if Category::ALL.iter().any(|c| !order.contains(c)) {
            return Err(Error::Argument(format!("NP pattern `{s}` must use each of d, n, a, N once")));
        }
        Ok(NpPattern::Order(order))
    }
}

/// Reorders every NP of `tree`, innermost first.
///
/// `seed` and `sentence_id` only matter for [`NpPattern::Random`], where the
/// shuffle of the k-th NP (in bottom-up order) is keyed on
/// `(seed, sentence_id, k)`.
pub fn reorder_np(tree: &Tree, pattern: NpPattern, map: &CategoryMap, seed: u64, sentence_id: SentenceId) -> Tree {
    let mut out = tree.clone();
    let mut np_index = 0u64;
    reorder_node(&mut out, pattern, map, seed, sentence_id, &mut np_index);
    out
}

fn reorder_node(
    node: &mut Tree,
    pattern: NpPattern,
    map: &CategoryMap,
    seed: u64,
    sentence_id: SentenceId,
    np_index: &mut u64,
) {
    let Tree::Phrase { label, children } = node else {
        return;
    };
    for child in children.iter_mut() {
        reorder_node(child, pattern, map, seed, sentence_id, np_index);
    }
    if !map.is_np(label) {
        return;
    }
    let index = *np_index;
    *np_index += 1;

    let classified: Vec<(usize, Category)> = children
        .iter()
        .enumerate()
        .filter_map(|(i, c)| map.classify(c.label()).map(|cat| (i, cat)))
        .collect();
    if classified.is_empty() {
        return;
    }

    match pattern {
        NpPattern::Order(order) => {
            let mut moved = classified.clone();
            moved.sort_by_key(|&(i, cat)| (NpPattern::rank(&order, cat), i));
            let mut taken: Vec<Option<Tree>> = children.drain(..).map(Some).collect();
            let sources: Vec<Tree> = moved
                .iter()
                .map(|&(i, _)| taken[i].take().expect("each child moves once"))
                .collect();
            for (&(slot, _), subtree) in classified.iter().zip(sources) {
                taken[slot] = Some(subtree);
            }
            *children = taken.into_iter().map(|c| c.expect("all slots refilled")).collect();
        }
        NpPattern::Random => {
            let mut slots: Vec<&mut String> = Vec::new();
            let mut next = classified.iter().map(|&(i, _)| i).peekable();
            for (i, child) in children.iter_mut().enumerate() {
                if next.peek() == Some(&i) {
                    next.next();
                    slots.extend(child.leaf_words_mut());
                }
            }
            let words: Vec<String> = slots.iter().map(|w| (**w).clone()).collect();
            let order =
                SplitMix64::for_domain(Domain::NpRandom, &[seed, sentence_id, index]).permutation(words.len());
            for (slot, &src) in slots.into_iter().zip(&order) {
                *slot = words[src].clone();
            }
        }
    }
}

/// Outcome of perturbing a corpus: ids left unchanged because their tree was
/// missing, unparseable or did not match the sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NpReport {
    pub skipped: Vec<(SentenceId, String)>,
}

/// Trees read from a tree file, keyed by the id of the aligned record.
#[derive(Debug, Default)]
pub struct TreeSet {
    pub trees: HashMap<SentenceId, Tree>,
    pub failures: Vec<(SentenceId, String)>,
}

/// Reads one bracketed tree per line, aligned with `ids` (ascending order).
pub fn read_tree_file(path: &Path, ids: &[SentenceId]) -> Result<TreeSet> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let lines = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))?;
    if lines.len() != ids.len() {
        return Err(Error::Alignment {
            context: path.display().to_string(),
            detail: format!("{} trees for {} records", lines.len(), ids.len()),
        });
    }
    let mut set = TreeSet::default();
    for (&id, line) in ids.iter().zip(lines) {
        match Tree::parse(&line) {
            Ok(t) => {
                set.trees.insert(id, t);
            }
            Err(e) => set.failures.push((id, e.to_string())),
        }
    }
    Ok(set)
}

/// Rewrites each record of `lang` with the leaves of its reordered tree.
/// Records without a usable tree keep their text and are listed in the
/// report.
pub fn perturb_np_corpus(
    corpus: &ParallelCorpus,
    lang: &str,
    trees: &HashMap<SentenceId, Tree>,
    pattern: NpPattern,
    map: &CategoryMap,
    seed: u64,
) -> Result<(ParallelCorpus, NpReport)> {
    let mut report = NpReport::default();
    let records = corpus
        .records(lang)
        .ok_or_else(|| Error::Argument(format!("language `{lang}` not in corpus")))?;
    let mut texts = HashMap::with_capacity(records.len());
    for r in records {
        let Some(tree) = trees.get(&r.id) else {
            report.skipped.push((r.id, "no tree".into()));
            continue;
        };
        if !tree.leaves().into_iter().eq(r.text.split_whitespace()) {
            report.skipped.push((r.id, "tree leaves do not match the sentence".into()));
            continue;
        }
        texts.insert(r.id, reorder_np(tree, pattern, map, seed, r.id).sentence());
    }
    if !report.skipped.is_empty() {
        log::warn!("{} of {} records skipped during NP perturbation", report.skipped.len(), records.len());
    }
    let out = corpus.map_texts(lang, |r| Ok(texts.get(&r.id).cloned().unwrap_or_else(|| r.text.clone())))?;
    Ok((out, report))
}

/// An attested sentence and its NP-perturbed counterpart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairText {
    pub id: SentenceId,
    pub attested: String,
    pub perturbed: String,
}

/// Test-split ids of `lang` whose word sequences differ between the two
/// corpora.
pub fn extract_minimal_pairs(
    attested: &ParallelCorpus,
    perturbed: &ParallelCorpus,
    lang: &str,
) -> Result<Vec<PairText>> {
    let missing = || Error::Argument(format!("language `{lang}` not in both corpora"));
    let a = attested.records(lang).ok_or_else(missing)?;
    let p = perturbed.records(lang).ok_or_else(missing)?;
    if a.len() != p.len() || a.iter().zip(p).any(|(x, y)| x.id != y.id) {
        return Err(Error::Alignment {
            context: "minimal pairs".into(),
            detail: "attested and perturbed corpora hold different ids".into(),
        });
    }
    Ok(a.iter()
        .zip(p)
        .filter(|(x, _)| attested.split_of(x.id) == Some(Split::Test))
        .filter(|(x, y)| !x.text.split_whitespace().eq(y.text.split_whitespace()))
        .map(|(x, y)| PairText {
            id: x.id,
            attested: x.text.split_whitespace().collect::<Vec<_>>().join(" "),
            perturbed: y.text.split_whitespace().collect::<Vec<_>>().join(" "),
        })
        .collect())
}

/// `id  attested  perturbed`, one pair per line.
pub fn pairs_to_tsv(pairs: &[PairText]) -> String {
    pairs
        .iter()
        .map(|p| format!("{}\t{}\t{}\n", p.id, p.attested, p.perturbed))
        .collect()
}

pub fn read_pairs(path: &Path) -> Result<Vec<PairText>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::format(&origin, i + 1, "expected `id<TAB>attested<TAB>perturbed`"));
            }
            Ok(PairText {
                id: fields[0]
                    .parse()
                    .map_err(|_| Error::format(&origin, i + 1, "id is not an integer"))?,
                attested: fields[1].to_string(),
                perturbed: fields[2].to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_SENTENCE: &str = "(S (NP (PRP She)) (VP (VBD enjoyed) (NP (DT the) (CD three) \
        (ADJP (RB fantastically) (JJ interesting)) (NNS books)) (NP-ADV (DT a) (NN lot))) (. .))";

    fn reorder(pattern: &str) -> String {
        let t = Tree::parse(TABLE_SENTENCE).unwrap();
        reorder_np(&t, pattern.parse().unwrap(), &CategoryMap::english(), 0, 0).sentence()
    }

    #[test]
    fn pattern_names() {
        for p in NpPattern::STUDIED {
            assert_eq!(p.to_string().parse::<NpPattern>().unwrap(), p);
        }
        assert_eq!("DnAN".parse::<NpPattern>().unwrap(), NpPattern::DNAN);
        assert!("dnnN".parse::<NpPattern>().is_err());
        assert!("dna".parse::<NpPattern>().is_err());
        assert!("dnaX".parse::<NpPattern>().is_err());
        assert_eq!(NpPattern::DANN.attestation().unwrap().typological, "few");
        assert!("aNnd".parse::<NpPattern>().unwrap().attestation().is_none());
    }

    #[test]
    fn reproduces_the_worked_example() {
        assert_eq!(reorder("Nnda"), "She enjoyed books three the fantastically interesting a lot .");
        assert_eq!(reorder("anNd"), "She enjoyed fantastically interesting three books the a lot .");
        assert_eq!(reorder("daNn"), "She enjoyed the fantastically interesting books three a lot .");
        assert_eq!(reorder("dnaN"), "She enjoyed the three fantastically interesting books a lot .");
        assert_eq!(reorder("dnNa"), "She enjoyed the three books fantastically interesting a lot .");
    }

    #[test]
    fn random_permutes_words_inside_the_np_only() {
        let t = Tree::parse(TABLE_SENTENCE).unwrap();
        let a = reorder_np(&t, NpPattern::Random, &CategoryMap::english(), 3, 17);
        let b = reorder_np(&t, NpPattern::Random, &CategoryMap::english(), 3, 17);
        assert_eq!(a, b);
        let words = a.leaves();
        assert_eq!(&words[..2], ["She", "enjoyed"]);
        assert_eq!(&words[7..], ["a", "lot", "."]);
        let mut inner: Vec<&str> = words[2..7].to_vec();
        inner.sort_unstable();
        assert_eq!(inner, ["books", "fantastically", "interesting", "the", "three"]);
    }

    #[test]
    fn trees_without_nps_pass_through() {
        let t = Tree::parse("(S (VP (VB go) (ADVP (RB now))))").unwrap();
        for p in NpPattern::STUDIED {
            assert_eq!(reorder_np(&t, p, &CategoryMap::english(), 1, 1), t);
        }
    }

    #[test]
    fn nested_nps_move_as_nouns_in_ctb() {
        // Inner NP (NN) normalized first, then moved as a noun by the outer NP.
        let t = Tree::parse("(NP (DP (DT 这)) (QP (CD 三)) (NP (NN 书)))").unwrap();
        let out = reorder_np(&t, NpPattern::NNDA, &CategoryMap::chinese(), 0, 0);
        assert_eq!(out.sentence(), "书 三 这");
    }

    #[test]
    fn pairs_file_round_trip() {
        let pairs = vec![PairText {
            id: 4,
            attested: "the red car".into(),
            perturbed: "car red the".into(),
        }];
        let dir = std::env::temp_dir().join(format!("implang-pairs-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pairs.tsv");
        fs::write(&path, pairs_to_tsv(&pairs)).unwrap();
        assert_eq!(read_pairs(&path).unwrap(), pairs);
        fs::write(&path, "x\ty\n").unwrap();
        assert!(matches!(read_pairs(&path), Err(Error::Format { line: 1, .. })));
        fs::remove_dir_all(&dir).ok();
    }
}
