use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ChunkKind, Fragment};
use crate::corpus::{Corpus, Label};
use crate::error::{Error, Result};
use crate::index::DocIndex;

/// Fragments indexed by source label and kind, with corpus document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentPool {
    fragments: Vec<Fragment>,
    labels: Vec<Option<Label>>,
    by_label: BTreeMap<Option<Label>, Vec<usize>>,
    by_kind: BTreeMap<ChunkKind, Vec<usize>>,
    doc_freq: HashMap<String, usize>,
}

impl FragmentPool {
    fn assemble(
        fragments: Vec<Fragment>,
        labels: Vec<Option<Label>>,
        doc_freq: HashMap<String, usize>,
    ) -> Self {
        let mut by_label: BTreeMap<Option<Label>, Vec<usize>> = BTreeMap::new();
        let mut by_kind: BTreeMap<ChunkKind, Vec<usize>> = BTreeMap::new();
        for (i, (f, l)) in fragments.iter().zip(&labels).enumerate() {
            by_label.entry(*l).or_default().push(i);
            by_kind.entry(f.kind).or_default().push(i);
        }
        FragmentPool {
            fragments,
            labels,
            by_label,
            by_kind,
            doc_freq,
        }
    }

    /// Rebuilds a pool from fragments with known document frequencies (e.g. a fragment dump).
    pub fn from_parts(
        corpus: &Corpus,
        fragments: Vec<Fragment>,
        doc_freq: HashMap<String, usize>,
    ) -> Result<Self> {
        let labels = source_labels(corpus, &fragments)?;
        for f in &fragments {
            let form = f.surface();
            match doc_freq.get(&form) {
                Some(&n) if n >= 1 => {}
                _ => {
                    return Err(Error::Validation(format!(
                        "fragment `{form}` has no positive doc_freq"
                    )))
                }
            }
        }
        Ok(Self::assemble(fragments, labels, doc_freq))
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn label_of(&self, idx: usize) -> Option<Label> {
        self.labels[idx]
    }

    pub fn by_label(&self) -> &BTreeMap<Option<Label>, Vec<usize>> {
        &self.by_label
    }

    pub fn by_kind(&self) -> &BTreeMap<ChunkKind, Vec<usize>> {
        &self.by_kind
    }

    /// Indices of fragments with the given label and kind, in pool order.
    pub fn indices(&self, label: Option<Label>, kind: ChunkKind) -> Vec<usize> {
        self.by_label
            .get(&label)
            .map(|ids| {
                ids.iter()
                    .copied()
                    .filter(|&i| self.fragments[i].kind == kind)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn doc_freq(&self) -> &HashMap<String, usize> {
        &self.doc_freq
    }

    pub fn doc_freq_of(&self, fragment: &Fragment) -> usize {
        self.doc_freq.get(&fragment.surface()).copied().unwrap_or(0)
    }
}

fn source_labels(corpus: &Corpus, fragments: &[Fragment]) -> Result<Vec<Option<Label>>> {
    let labels: HashMap<&str, Option<Label>> = corpus
        .documents()
        .iter()
        .map(|d| (d.doc_id.as_str(), d.label))
        .collect();
    fragments
        .iter()
        .map(|f| {
            labels.get(f.doc_id.as_str()).copied().ok_or_else(|| {
                Error::Validation(format!("fragment references unknown document {}", f.doc_id))
            })
        })
        .collect()
}

/// Indexes fragments and computes each surface form's document frequency over
/// the full corpus token text (case-insensitive contiguous match).
pub fn build_pool(corpus: &Corpus, fragments: Vec<Fragment>) -> Result<FragmentPool> {
    let labels = source_labels(corpus, &fragments)?;
    let index = DocIndex::build(corpus, fragments.iter().map(Fragment::surface));
    let doc_freq = fragments
        .iter()
        .map(|f| {
            let form = f.surface();
            let n = index.doc_freq(&form);
            (form, n)
        })
        .collect();
    Ok(FragmentPool::assemble(fragments, labels, doc_freq))
}

/// Keeps fragments whose surface form occurs in at least `min_doc_freq` documents.
pub fn filter_rare(pool: &FragmentPool, min_doc_freq: usize) -> Result<FragmentPool> {
    if min_doc_freq == 0 {
        return Err(Error::Validation("min_doc_freq must be at least 1".into()));
    }
    let mut fragments = Vec::new();
    let mut labels = Vec::new();
    let mut doc_freq = HashMap::new();
    for (f, l) in pool.fragments.iter().zip(&pool.labels) {
        let form = f.surface();
        let n = pool.doc_freq.get(&form).copied().unwrap_or(0);
        if n >= min_doc_freq {
            fragments.push(f.clone());
            labels.push(*l);
            doc_freq.insert(form, n);
        }
    }
    Ok(FragmentPool::assemble(fragments, labels, doc_freq))
}

/// One line of the fragment dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentRecord {
    pub kind: ChunkKind,
    pub words: Vec<String>,
    pub doc_id: String,
    pub sent_idx: usize,
    pub span: [usize; 2],
    pub doc_freq: usize,
}

pub fn write_fragment_dump(pool: &FragmentPool, mut out: impl Write) -> std::io::Result<()> {
    for f in pool.fragments() {
        let rec = FragmentRecord {
            kind: f.kind,
            words: f.words.clone(),
            doc_id: f.doc_id.clone(),
            sent_idx: f.sent_idx,
            span: [f.span.0, f.span.1],
            doc_freq: pool.doc_freq_of(f),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a fragment dump back into a pool over `corpus`.
pub fn read_fragment_dump(corpus: &Corpus, input: &str) -> Result<FragmentPool> {
    let mut fragments = Vec::new();
    let mut doc_freq = HashMap::new();
    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: FragmentRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if rec.span[1] < rec.span[0] || rec.span[1] - rec.span[0] != rec.words.len() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "span does not match word count".into(),
            });
        }
        let f = Fragment {
            kind: rec.kind,
            words: rec.words,
            doc_id: rec.doc_id,
            sent_idx: rec.sent_idx,
            span: (rec.span[0], rec.span[1]),
        };
        doc_freq.insert(f.surface(), rec.doc_freq);
        fragments.push(f);
    }
    FragmentPool::from_parts(corpus, fragments, doc_freq)
}
