use std::fmt;

use crate::error::{Error, Result};

/// A bracketed constituency tree. Preterminals carry their word; every other
/// node carries at least one child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Phrase { label: String, children: Vec<Tree> },
    Terminal { label: String, word: String },
}

impl Tree {
    pub fn label(&self) -> &str {
        match self {
            Tree::Phrase { label, .. } | Tree::Terminal { label, .. } => label,
        }
    }

    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Tree::Terminal { word, .. } => out.push(word),
            Tree::Phrase { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Terminal { .. } => 1,
            Tree::Phrase { children, .. } => children.iter().map(Tree::leaf_count).sum(),
        }
    }

    /// Leaves joined by single spaces.
    pub fn sentence(&self) -> String {
        self.leaves().join(" ")
    }

    /// Mutable references to the leaf words in order.
    pub(crate) fn leaf_words_mut(&mut self) -> Vec<&mut String> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a mut Tree, out: &mut Vec<&'a mut String>) {
            match t {
                Tree::Terminal { word, .. } => out.push(word),
                Tree::Phrase { children, .. } => children.iter_mut().for_each(|c| walk(c, out)),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn parse(line: &str) -> Result<Tree> {
        let mut p = Parser { src: line, pos: 0 };
        p.skip_ws();
        let tree = p.node()?;
        p.skip_ws();
        if p.pos < line.len() {
            return Err(p.error("trailing input after tree"));
        }
        Ok(tree)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Terminal { label, word } => write!(f, "({label} {word})"),
            Tree::Phrase { label, children } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn atom(&mut self) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn node(&mut self) -> Result<Tree> {
        let open = self.pos;
        if self.peek() != Some('(') {
            return Err(self.error("expected `(`"));
        }
        self.pos += 1;
        self.skip_ws();
        let label = self.atom().to_string();
        let mut children = Vec::new();
        let mut word: Option<String> = None;
        loop {
            self.skip_ws();
            match self.peek() {
                None => {
                    return Err(Error::Parse {
                        offset: open,
                        message: "unbalanced brackets: node is never closed".into(),
                    })
                }
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some('(') => {
                    if word.is_some() {
                        return Err(self.error("leaf with children"));
                    }
                    children.push(self.node()?);
                }
                Some(_) => {
                    if word.is_some() {
                        return Err(self.error("node has more than one word"));
                    }
                    if !children.is_empty() {
                        return Err(self.error("leaf with children"));
                    }
                    word = Some(self.atom().to_string());
                }
            }
        }
        match word {
            Some(word) => {
                if label.is_empty() {
                    return Err(Error::Parse {
                        offset: open,
                        message: "terminal without a label".into(),
                    });
                }
                Ok(Tree::Terminal { label, word })
            }
            None if children.is_empty() => Err(Error::Parse {
                offset: open,
                message: "empty node".into(),
            }),
            None => Ok(Tree::Phrase { label, children }),
        }
    }
}
