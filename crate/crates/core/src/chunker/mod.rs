//! NP/VP fragment extraction.
//!
//! [`extract_tree`] reads constituents off parse trees and keeps nested
//! qualifying nodes. [`extract_shallow`] is a flat POS-pattern chunker for
//! input without trees.

mod pool;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Sentence};
use crate::error::{Error, Result};

pub use pool::{
    build_pool, filter_rare, read_fragment_dump, write_fragment_dump, FragmentPool, FragmentRecord,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChunkKind {
    NP,
    VP,
}

impl ChunkKind {
    pub fn from_category(label: &str) -> Option<Self> {
        match label {
            "NP" => Some(ChunkKind::NP),
            "VP" => Some(ChunkKind::VP),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChunkKind::NP => "NP",
            ChunkKind::VP => "VP",
        }
    }
}

impl fmt::Display for ChunkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChunkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChunkKind::from_category(&s.to_ascii_uppercase()).ok_or_else(|| {
            Error::Validation(format!("unknown chunk kind `{s}` (expected NP or VP)"))
        })
    }
}

/// An extracted NP or VP with its source position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fragment {
    pub kind: ChunkKind,
    pub words: Vec<String>,
    pub doc_id: String,
    pub sent_idx: usize,
    pub span: (usize, usize),
}

impl Fragment {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn surface(&self) -> String {
        crate::index::surface_form(&self.words)
    }
}

/// Inclusive word-length bounds for extracted constituents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBounds {
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for LengthBounds {
    fn default() -> Self {
        LengthBounds {
            min_len: 2,
            max_len: 4,
        }
    }
}

impl LengthBounds {
    pub fn new(min_len: usize, max_len: usize) -> Result<Self> {
        if min_len < 1 || min_len > max_len {
            return Err(Error::Validation(format!(
                "length bounds must satisfy 1 <= min_len <= max_len, got {min_len}..{max_len}"
            )));
        }
        Ok(LengthBounds { min_len, max_len })
    }

    pub fn contains(&self, len: usize) -> bool {
        (self.min_len..=self.max_len).contains(&len)
    }
}

fn fragment(
    doc: &Document,
    sent_idx: usize,
    sentence: &Sentence,
    kind: ChunkKind,
    start: usize,
    end: usize,
) -> Fragment {
    Fragment {
        kind,
        words: sentence.tokens[start..end]
            .iter()
            .map(|t| t.form.clone())
            .collect(),
        doc_id: doc.doc_id.clone(),
        sent_idx,
        span: (start, end),
    }
}

/// Every NP/VP tree node whose word length lies within `bounds`, in document
/// order and top-down within a sentence. Nested qualifying nodes are all kept.
pub fn extract_tree(doc: &Document, bounds: LengthBounds) -> Result<Vec<Fragment>> {
    let mut out = Vec::new();
    for (sent_idx, sentence) in doc.sentences.iter().enumerate() {
        let tree = sentence.tree.as_ref().ok_or_else(|| Error::MissingTrees {
            doc_id: doc.doc_id.clone(),
        })?;
        tree.walk(&mut |node, start, end| {
            if node.is_leaf() {
                return;
            }
            if let Some(kind) = ChunkKind::from_category(node.category()) {
                if bounds.contains(end - start) {
                    out.push(fragment(doc, sent_idx, sentence, kind, start, end));
                }
            }
        });
    }
    Ok(out)
}

fn is_noun(tag: &str) -> bool {
    matches!(tag, "NN" | "NNS" | "NNP" | "NNPS")
}

fn is_adj(tag: &str) -> bool {
    matches!(tag, "JJ" | "JJR" | "JJS")
}

fn is_verb(tag: &str) -> bool {
    matches!(tag, "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ")
}

/// Length of the NP chunk `DT? (JJ|JJR|JJS)* (NN|NNS|NNP|NNPS)+` starting at `i`, or 0.
fn match_np(tags: &[&str], i: usize) -> usize {
    let mut j = i;
    if tags.get(j) == Some(&"DT") {
        j += 1;
    }
    while tags.get(j).is_some_and(|t| is_adj(t)) {
        j += 1;
    }
    let nouns_start = j;
    while tags.get(j).is_some_and(|t| is_noun(t)) {
        j += 1;
    }
    if j == nouns_start {
        0
    } else {
        j - i
    }
}

/// Length of the VP chunk `MD? (VB|VBD|VBG|VBN|VBP|VBZ)+ RB? NP?` starting at `i`, or 0.
fn match_vp(tags: &[&str], i: usize) -> usize {
    let mut j = i;
    if tags.get(j) == Some(&"MD") {
        j += 1;
    }
    let verbs_start = j;
    while tags.get(j).is_some_and(|t| is_verb(t)) {
        j += 1;
    }
    if j == verbs_start {
        return 0;
    }
    if tags.get(j) == Some(&"RB") {
        j += 1;
    }
    j += match_np(tags, j);
    j - i
}

fn flat_chunks(tags: &[&str], matcher: fn(&[&str], usize) -> usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        match matcher(tags, i) {
            0 => i += 1,
            n => {
                out.push((i, i + n));
                i += n;
            }
        }
    }
    out
}

/// Flat POS-pattern chunking: maximal, non-overlapping (per kind) NP and VP
/// matches scanned left to right, then filtered by `bounds`. Chunks are
/// ordered by start position within each sentence.
pub fn extract_shallow(doc: &Document, bounds: LengthBounds) -> Result<Vec<Fragment>> {
    let mut out = Vec::new();
    for (sent_idx, sentence) in doc.sentences.iter().enumerate() {
        let mut tags = Vec::with_capacity(sentence.tokens.len());
        for (token_idx, t) in sentence.tokens.iter().enumerate() {
            let pos = t.pos.as_deref().ok_or_else(|| Error::MissingPos {
                doc_id: doc.doc_id.clone(),
                sent_idx,
                token_idx,
            })?;
            tags.push(pos);
        }
        let mut chunks: Vec<(usize, usize, ChunkKind)> = flat_chunks(&tags, match_np)
            .into_iter()
            .map(|(s, e)| (s, e, ChunkKind::NP))
            .chain(
                flat_chunks(&tags, match_vp)
                    .into_iter()
                    .map(|(s, e)| (s, e, ChunkKind::VP)),
            )
            .filter(|(s, e, _)| bounds.contains(e - s))
            .collect();
        chunks.sort();
        out.extend(
            chunks
                .into_iter()
                .map(|(s, e, kind)| fragment(doc, sent_idx, sentence, kind, s, e)),
        );
    }
    Ok(out)
}

/// Tree extraction when every sentence has a tree, shallow chunking otherwise.
pub fn extract(doc: &Document, bounds: LengthBounds) -> Result<Vec<Fragment>> {
    if doc.has_trees() {
        extract_tree(doc, bounds)
    } else {
        extract_shallow(doc, bounds)
    }
}
