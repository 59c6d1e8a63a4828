use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// The four noun-phrase dependent categories of Greenberg's Universal 20.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Det,
    Num,
    Adj,
    Noun,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Det, Category::Num, Category::Adj, Category::Noun];

    /// Pattern letter: `d`, `n`, `a`, `N`.
    pub fn symbol(self) -> char {
        match self {
            Category::Det => 'd',
            Category::Num => 'n',
            Category::Adj => 'a',
            Category::Noun => 'N',
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Det => "det",
            Category::Num => "num",
            Category::Adj => "adj",
            Category::Noun => "noun",
        })
    }
}

/// Per-treebank assignment of node labels to categories, plus the labels
/// that open a noun phrase. Labels are stored uppercased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMap {
    np: BTreeSet<String>,
    sets: [BTreeSet<String>; 4],
}

fn upper_set(labels: &[&str]) -> BTreeSet<String> {
    labels.iter().map(|l| l.to_uppercase()).collect()
}

impl CategoryMap {
    /// Fails if a label appears in two category sets.
    pub fn new(
        np: &[&str],
        det: &[&str],
        num: &[&str],
        adj: &[&str],
        noun: &[&str],
    ) -> Result<CategoryMap> {
        CategoryMap::from_sets(
            upper_set(np),
            [upper_set(det), upper_set(num), upper_set(adj), upper_set(noun)],
        )
    }

    fn from_sets(np: BTreeSet<String>, sets: [BTreeSet<String>; 4]) -> Result<CategoryMap> {
        for i in 0..4 {
            for j in i + 1..4 {
                if let Some(label) = sets[i].intersection(&sets[j]).next() {
                    return Err(Error::Config(format!(
                        "label `{label}` is both {} and {}",
                        Category::ALL[i],
                        Category::ALL[j]
                    )));
                }
            }
        }
        Ok(CategoryMap { np, sets })
    }

    /// Penn Treebank (English).
    pub fn english() -> CategoryMap {
        CategoryMap::new(
            &["NP"],
            &["DT", "PRP$", "PDT", "POS"],
            &["QP", "$", "CD"],
            &["RB", "ADJP", "JJR", "JJS", "JJ"],
            &["NN", "NNS", "NNP", "NNPS"],
        )
        .expect("disjoint preset")
    }

    /// VIT (Italian).
    pub fn italian() -> CategoryMap {
        CategoryMap::new(
            &["SN"],
            &["DET"],
            &["NUM", "SQ"],
            &["ADJ", "SA"],
            &["NOUN", "PRON", "PROPN", "SYM", "X"],
        )
        .expect("disjoint preset")
    }

    /// Penn Chinese Treebank. `NP` is both the phrase label and a noun
    /// category member, so normalized inner NPs move as nouns.
    pub fn chinese() -> CategoryMap {
        CategoryMap::new(
            &["NP"],
            &["DT", "M", "CLP", "DP"],
            &["CD", "OD", "QP"],
            &["JJ", "ADJP", "DNP", "DEC", "DEG"],
            &["NN", "NP", "NR", "NT", "PRP", "PN", "FW"],
        )
        .expect("disjoint preset")
    }

    /// CINTIL (Portuguese).
    pub fn portuguese() -> CategoryMap {
        CategoryMap::new(
            &["NP"],
            &["DET", "D", "DEM", "POSS", "POSS'"],
            &["QNT", "QNT'", "NUM", "PERCENTP", "PERCENTP'", "CARD", "CARD'"],
            &["ADJ", "AP"],
            &["N'", "NOUN", "PRON"],
        )
        .expect("disjoint preset")
    }

    /// `english`, `italian`, `chinese`, `portuguese` (or `en`, `it`, `zh`, `pt`).
    pub fn preset(name: &str) -> Option<CategoryMap> {
        match name {
            "english" | "en" | "ptb" => Some(CategoryMap::english()),
            "italian" | "it" | "vit" => Some(CategoryMap::italian()),
            "chinese" | "zh" | "ctb" => Some(CategoryMap::chinese()),
            "portuguese" | "pt" | "cintil" => Some(CategoryMap::portuguese()),
            _ => None,
        }
    }

    pub fn is_np(&self, label: &str) -> bool {
        self.np.contains(&label.to_uppercase())
    }

    pub fn classify(&self, label: &str) -> Option<Category> {
        let label = label.to_uppercase();
        Category::ALL
            .into_iter()
            .zip(&self.sets)
            .find(|(_, set)| set.contains(&label))
            .map(|(c, _)| c)
    }

    /// Plain-text form with `#np`, `#det`, `#num`, `#adj`, `#noun` sections.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let sections = std::iter::once(("np", &self.np))
            .chain(["det", "num", "adj", "noun"].into_iter().zip(self.sets.iter()));
        for (name, labels) in sections {
            out.push_str(&format!("#{name}\n"));
            for l in labels {
                out.push_str(l);
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<CategoryMap> {
        let mut np = BTreeSet::new();
        let mut sets: [BTreeSet<String>; 4] = Default::default();
        let mut current: Option<usize> = None;
        let mut seen_np = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(section) = line.strip_prefix('#') {
                current = match section {
                    "np" => {
                        seen_np = true;
                        Some(4)
                    }
                    "det" => Some(0),
                    "num" => Some(1),
                    "adj" => Some(2),
                    "noun" => Some(3),
                    other => return Err(Error::format(origin, i + 1, format!("unknown section `#{other}`"))),
                };
                continue;
            }
            match current {
                None => return Err(Error::format(origin, i + 1, "label before any section")),
                Some(4) => {
                    np.insert(line.to_uppercase());
                }
                Some(k) => {
                    sets[k].insert(line.to_uppercase());
                }
            }
        }
        if !seen_np || np.is_empty() {
            return Err(Error::format(origin, 0, "missing `#np` labels"));
        }
        CategoryMap::from_sets(np, sets)
    }

    pub fn load(path: &Path) -> Result<CategoryMap> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CategoryMap::parse(&text, &path.display().to_string())
    }
}
