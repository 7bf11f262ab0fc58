//! Document model and corpus readers.
//!
//! Three input formats are understood: bracketed constituency trees
//! ([`parse_bracketed`]), POS-tagged token streams ([`parse_tagged`]) and the
//! canonical one-document-per-line JSON format ([`read_jsonl`]). Tokenization
//! is always taken from the input; nothing here re-tokenizes text.

mod bracketed;
mod jsonl;
pub mod synth;
mod tagged;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bracketed::{parse_bracketed, parse_tree, write_bracketed};
pub use jsonl::{read_jsonl, write_jsonl, DocumentRecord, SentenceRecord};
pub use synth::{generate_synthetic, SynthSpec, MAX_PLANT_RATE};
pub use tagged::{parse_tagged, write_tagged};

/// Binary phenotype label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Case,
    Control,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Case => "case",
            Label::Control => "control",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "case" => Ok(Label::Case),
            "control" => Ok(Label::Control),
            other => Err(Error::Validation(format!(
                "unknown label `{other}` (expected case or control)"
            ))),
        }
    }
}

/// Display name for an optional label; unlabeled documents group under `unlabeled`.
pub fn label_name(label: Option<Label>) -> &'static str {
    label.map_or("unlabeled", Label::as_str)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub form: String,
    pub pos: Option<String>,
}

impl Token {
    pub fn new(form: impl Into<String>, pos: Option<String>) -> Result<Self> {
        let form = form.into();
        if form.is_empty() || form.chars().any(char::is_whitespace) {
            return Err(Error::Validation(format!(
                "token form `{form}` is empty or contains whitespace"
            )));
        }
        if let Some(p) = &pos {
            if p.is_empty() || p.chars().any(char::is_whitespace) {
                return Err(Error::Validation(format!(
                    "POS tag `{p}` on token `{form}` is empty or contains whitespace"
                )));
            }
        }
        Ok(Token { form, pos })
    }
}

/// A node in a constituency tree. Pre-terminals (the `(POS word)` nodes) carry
/// the index of their token; every other node has at least one child.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeNode {
    pub label: String,
    pub content: NodeContent,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeContent {
    Children(Vec<TreeNode>),
    Leaf(usize),
}

/// Strips PTB function tags and co-indices: `NP-SBJ`, `NP=2`, `NP-SBJ-1` all become `NP`.
/// Labels that start with `-` (`-NONE-`, `-LRB-`) are left alone.
pub fn normalize_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    match label.find(['-', '=']) {
        Some(i) => &label[..i],
        None => label,
    }
}

impl TreeNode {
    pub fn leaf(label: impl Into<String>, index: usize) -> Self {
        TreeNode {
            label: label.into(),
            content: NodeContent::Leaf(index),
        }
    }

    pub fn branch(label: impl Into<String>, children: Vec<TreeNode>) -> Self {
        TreeNode {
            label: label.into(),
            content: NodeContent::Children(children),
        }
    }

    /// Label with function tags and indices removed.
    pub fn category(&self) -> &str {
        normalize_label(&self.label)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.content, NodeContent::Leaf(_))
    }

    pub fn children(&self) -> &[TreeNode] {
        match &self.content {
            NodeContent::Children(c) => c,
            NodeContent::Leaf(_) => &[],
        }
    }

    /// Token span `[start, end)` covered by this node.
    pub fn span(&self) -> (usize, usize) {
        match &self.content {
            NodeContent::Leaf(i) => (*i, i + 1),
            NodeContent::Children(c) => {
                let start = c.first().map_or(0, |n| n.span().0);
                let end = c.last().map_or(0, |n| n.span().1);
                (start, end)
            }
        }
    }

    /// Visits every node top-down, left to right, with its token span.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a TreeNode, usize, usize)) {
        let (start, end) = self.span();
        f(self, start, end);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Leaf indices in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(&mut |n, s, _| {
            if n.is_leaf() {
                out.push(s);
            }
        });
        out
    }

    /// Renders the tree in bracketed notation using the sentence's token forms.
    pub fn render(&self, tokens: &[Token]) -> String {
        let mut out = String::new();
        self.render_into(tokens, &mut out);
        out
    }

    fn render_into(&self, tokens: &[Token], out: &mut String) {
        out.push('(');
        out.push_str(&self.label);
        match &self.content {
            NodeContent::Leaf(i) => {
                out.push(' ');
                out.push_str(&escape_form(&tokens[*i].form));
            }
            NodeContent::Children(children) => {
                for c in children {
                    out.push(' ');
                    c.render_into(tokens, out);
                }
            }
        }
        out.push(')');
    }

    fn validate_shape(&self) -> Result<()> {
        match &self.content {
            NodeContent::Leaf(_) => Ok(()),
            NodeContent::Children(c) if c.is_empty() => Err(Error::Validation(format!(
                "tree node `{}` has no children",
                self.label
            ))),
            NodeContent::Children(c) => c.iter().try_for_each(TreeNode::validate_shape),
        }
    }
}

pub(crate) fn escape_form(form: &str) -> String {
    form.replace('(', "-LRB-").replace(')', "-RRB-")
}

pub(crate) fn unescape_form(form: &str) -> String {
    form.replace("-LRB-", "(").replace("-RRB-", ")")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub tree: Option<TreeNode>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>, tree: Option<TreeNode>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Validation("sentence has no tokens".into()));
        }
        if let Some(t) = &tree {
            t.validate_shape()?;
            let leaves = t.leaves();
            if leaves.len() != tokens.len() || leaves.iter().enumerate().any(|(i, &l)| i != l) {
                return Err(Error::Validation(format!(
                    "tree leaves {:?} do not cover tokens 0..{}",
                    leaves,
                    tokens.len()
                )));
            }
        }
        Ok(Sentence { tokens, tree })
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.form.as_str())
    }

    pub fn has_pos(&self) -> bool {
        self.tokens.iter().all(|t| t.pos.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub label: Option<Label>,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        label: Option<Label>,
        sentences: Vec<Sentence>,
    ) -> Result<Self> {
        let doc_id = doc_id.into();
        if doc_id.is_empty() || doc_id.chars().any(char::is_whitespace) {
            return Err(Error::Validation(format!(
                "doc_id `{doc_id}` is empty or contains whitespace"
            )));
        }
        if sentences.is_empty() {
            return Err(Error::Validation(format!(
                "document {doc_id} has an empty body"
            )));
        }
        Ok(Document {
            doc_id,
            label,
            sentences,
        })
    }

    /// Lowercased token forms of the whole document, sentences concatenated.
    pub fn lowercase_tokens(&self) -> Vec<String> {
        self.sentences
            .iter()
            .flat_map(|s| s.forms().map(str::to_lowercase))
            .collect()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    pub fn has_trees(&self) -> bool {
        self.sentences.iter().all(|s| s.tree.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    label_counts: BTreeMap<Option<Label>, usize>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut label_counts = BTreeMap::new();
        for d in &documents {
            if !seen.insert(d.doc_id.as_str()) {
                return Err(Error::Validation(format!("duplicate doc_id {}", d.doc_id)));
            }
            *label_counts.entry(d.label).or_insert(0) += 1;
        }
        Ok(Corpus {
            documents,
            label_counts,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn label_counts(&self) -> &BTreeMap<Option<Label>, usize> {
        &self.label_counts
    }

    pub fn label_count(&self, label: Option<Label>) -> usize {
        self.label_counts.get(&label).copied().unwrap_or(0)
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn word_count(&self) -> usize {
        self.documents.iter().map(Document::word_count).sum()
    }
}

/// Parses a `#doc <doc_id> [label]` record header.
pub(crate) fn parse_header(line: &str, line_no: usize) -> Result<Option<(String, Option<Label>)>> {
    let Some(rest) = line.strip_prefix("#doc") else {
        return Ok(None);
    };
    if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
        return Ok(None);
    }
    let mut parts = rest.split_whitespace();
    let doc_id = parts
        .next()
        .ok_or_else(|| Error::parse(line_no, "record header without doc_id"))?;
    let label = parts
        .next()
        .map(|l| {
            l.parse::<Label>()
                .map_err(|_| Error::parse(line_no, format!("unknown label `{l}`")))
        })
        .transpose()?;
    if let Some(extra) = parts.next() {
        return Err(Error::parse(
            line_no,
            format!("unexpected field `{extra}` in record header"),
        ));
    }
    Ok(Some((doc_id.to_string(), label)))
}
