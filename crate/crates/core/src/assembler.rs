//! Synthesis of fragmented training examples.
//!
//! Each example concatenates two NPs and two VPs. All four parts come from
//! pairwise-distinct source documents that share the example's label, so
//! examples are assembled per label and the corpus label split carries over.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chunker::{ChunkKind, Fragment, FragmentPool};
use crate::corpus::{label_name, Corpus, Label};
use crate::error::{Error, Result};
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Reuse {
    #[default]
    None,
    WithReplacement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyConfig {
    pub seed: u64,
    pub order: [ChunkKind; 4],
    pub target_ratio: f64,
    pub reuse: Reuse,
    pub separator: String,
    /// Re-draw budget per example before it is skipped.
    pub max_redraws: usize,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            seed: 42,
            order: [ChunkKind::NP, ChunkKind::NP, ChunkKind::VP, ChunkKind::VP],
            target_ratio: 2.0,
            reuse: Reuse::None,
            separator: ". ".to_string(),
            max_redraws: 100,
        }
    }
}

impl AssemblyConfig {
    pub fn validate(&self) -> Result<()> {
        let nps = self.order.iter().filter(|k| **k == ChunkKind::NP).count();
        if nps != 2 {
            return Err(Error::Validation(format!(
                "part order {:?} must contain exactly two NP and two VP",
                self.order
            )));
        }
        if !(self.target_ratio > 0.0 && self.target_ratio.is_finite()) {
            return Err(Error::Validation(format!(
                "target_ratio must be positive, got {}",
                self.target_ratio
            )));
        }
        Ok(())
    }
}

/// Source position of a part. Present in memory and in provenance-bearing files only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub doc_id: String,
    pub sent_idx: usize,
    pub span: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Part {
    pub kind: ChunkKind,
    pub words: Vec<String>,
    pub source: Option<Provenance>,
}

impl From<&Fragment> for Part {
    fn from(f: &Fragment) -> Self {
        Part {
            kind: f.kind,
            words: f.words.clone(),
            source: Some(Provenance {
                doc_id: f.doc_id.clone(),
                sent_idx: f.sent_idx,
                span: [f.span.0, f.span.1],
            }),
        }
    }
}

impl Part {
    pub fn surface(&self) -> String {
        crate::index::surface_form(&self.words)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssembledExample {
    pub example_id: String,
    pub label: Option<Label>,
    /// Parts in rendering order.
    pub parts: Vec<Part>,
    pub text: String,
}

impl AssembledExample {
    pub fn word_count(&self) -> usize {
        self.parts.iter().map(|p| p.words.len()).sum()
    }
}

/// Joins parts in `cfg.order` with `cfg.separator`: the n-th NP slot takes the
/// n-th NP part, likewise for VPs.
pub fn render(example: &AssembledExample, cfg: &AssemblyConfig) -> String {
    arrange(&example.parts, &cfg.order)
        .iter()
        .map(|p| p.words.join(" "))
        .collect::<Vec<_>>()
        .join(&cfg.separator)
}

fn arrange<'a>(parts: &'a [Part], order: &[ChunkKind]) -> Vec<&'a Part> {
    let mut nps = parts.iter().filter(|p| p.kind == ChunkKind::NP);
    let mut vps = parts.iter().filter(|p| p.kind == ChunkKind::VP);
    order
        .iter()
        .filter_map(|k| match k {
            ChunkKind::NP => nps.next(),
            ChunkKind::VP => vps.next(),
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabelAssembly {
    pub source_docs: usize,
    pub requested: usize,
    pub emitted: usize,
    pub skipped: usize,
    /// Fewer than two fragments of some kind remained before the target was met.
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub examples: Vec<AssembledExample>,
    pub per_label: BTreeMap<String, LabelAssembly>,
}

impl Assembly {
    pub fn skipped(&self) -> usize {
        self.per_label.values().map(|l| l.skipped).sum()
    }
}

struct LabelDraw<'a> {
    pool: &'a FragmentPool,
    nps: Vec<usize>,
    vps: Vec<usize>,
    reuse: Reuse,
    max_redraws: usize,
}

impl LabelDraw<'_> {
    fn doc_of(&self, idx: usize) -> &str {
        &self.pool.fragments()[idx].doc_id
    }

    /// Draws two NPs then two VPs (positions into `self.nps`/`self.vps`) with
    /// pairwise-distinct documents. Conflicting draws are re-drawn; `None` once
    /// the budget is spent.
    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<([usize; 2], [usize; 2])> {
        let mut redraws = 0;
        let mut docs: Vec<&str> = Vec::with_capacity(4);
        let mut picks: [Vec<usize>; 2] = [Vec::with_capacity(2), Vec::with_capacity(2)];
        for (slot, list) in [&self.nps, &self.vps].into_iter().enumerate() {
            while picks[slot].len() < 2 {
                let pos = rng.random_range(0..list.len());
                let doc = self.doc_of(list[pos]);
                if picks[slot].contains(&pos) || docs.contains(&doc) {
                    redraws += 1;
                    if redraws > self.max_redraws {
                        return None;
                    }
                    continue;
                }
                picks[slot].push(pos);
                docs.push(doc);
            }
        }
        Some(([picks[0][0], picks[0][1]], [picks[1][0], picks[1][1]]))
    }

    fn take(&mut self, np: [usize; 2], vp: [usize; 2]) -> [usize; 4] {
        let out = [
            self.nps[np[0]],
            self.nps[np[1]],
            self.vps[vp[0]],
            self.vps[vp[1]],
        ];
        if self.reuse == Reuse::None {
            for (list, mut pos) in [(&mut self.nps, np), (&mut self.vps, vp)] {
                // remove the higher position first so swap_remove leaves the other intact
                pos.sort_unstable_by(|a, b| b.cmp(a));
                for p in pos {
                    list.swap_remove(p);
                }
            }
        }
        out
    }
}

/// Assembles examples per label. Emits `round(target_ratio * docs_with_label)`
/// examples per label unless the pool runs out first or draws are skipped.
pub fn assemble(pool: &FragmentPool, corpus: &Corpus, cfg: &AssemblyConfig) -> Result<Assembly> {
    cfg.validate()?;
    let mut drafts: Vec<(Option<Label>, [usize; 4])> = Vec::new();
    let mut per_label = BTreeMap::new();

    for (&label, &n_docs) in corpus.label_counts() {
        let name = label_name(label);
        let nps = pool.indices(label, ChunkKind::NP);
        let vps = pool.indices(label, ChunkKind::VP);
        let distinct_docs: HashSet<&str> = nps
            .iter()
            .chain(&vps)
            .map(|&i| pool.fragments()[i].doc_id.as_str())
            .collect();
        if nps.len() < 2 || vps.len() < 2 || distinct_docs.len() < 4 {
            return Err(Error::LabelPoolExhausted {
                label: name.to_string(),
                reason: format!(
                    "{} NP and {} VP fragments from {} distinct documents; need at least 2, 2 and 4",
                    nps.len(),
                    vps.len(),
                    distinct_docs.len()
                ),
            });
        }

        let mut rng = rng_for(cfg.seed, &format!("assemble/{name}"));
        let mut draw = LabelDraw {
            pool,
            nps,
            vps,
            reuse: cfg.reuse,
            max_redraws: cfg.max_redraws,
        };
        let requested = (cfg.target_ratio * n_docs as f64).round() as usize;
        let mut stats = LabelAssembly {
            source_docs: n_docs,
            requested,
            ..LabelAssembly::default()
        };
        for _ in 0..requested {
            if draw.nps.len() < 2 || draw.vps.len() < 2 {
                stats.exhausted = true;
                break;
            }
            match draw.draw(&mut rng) {
                Some((np, vp)) => {
                    drafts.push((label, draw.take(np, vp)));
                    stats.emitted += 1;
                }
                None => stats.skipped += 1,
            }
        }
        if stats.skipped > 0 || stats.exhausted {
            log::warn!(
                "label {name}: emitted {} of {} requested examples ({} skipped, exhausted: {})",
                stats.emitted,
                stats.requested,
                stats.skipped,
                stats.exhausted
            );
        }
        per_label.insert(name.to_string(), stats);
    }

    // Interleave labels in a seeded order so the release is not grouped by label.
    drafts.shuffle(&mut rng_for(cfg.seed, "assemble/order"));
    let width = drafts.len().to_string().len().max(6);
    let examples = drafts
        .into_iter()
        .enumerate()
        .map(|(i, (label, ids))| {
            let parts: Vec<Part> = ids
                .iter()
                .map(|&j| Part::from(&pool.fragments()[j]))
                .collect();
            let parts: Vec<Part> = arrange(&parts, &cfg.order).into_iter().cloned().collect();
            let mut ex = AssembledExample {
                example_id: format!("ex-{i:0width$}"),
                label,
                parts,
                text: String::new(),
            };
            ex.text = render(&ex, cfg);
            ex
        })
        .collect();
    Ok(Assembly {
        examples,
        per_label,
    })
}

/// Checks the structural invariants of one example: two NP and two VP parts
/// within the length bounds, pairwise-distinct source documents, and (when a
/// corpus is given) source labels equal to the example label.
pub fn validate_example(
    ex: &AssembledExample,
    corpus: Option<&Corpus>,
    min_len: usize,
    max_len: usize,
) -> Result<()> {
    let fail = |msg: String| {
        Err(Error::Validation(format!(
            "example {}: {msg}",
            ex.example_id
        )))
    };
    let nps = ex.parts.iter().filter(|p| p.kind == ChunkKind::NP).count();
    let vps = ex.parts.iter().filter(|p| p.kind == ChunkKind::VP).count();
    if ex.parts.len() != 4 || nps != 2 || vps != 2 {
        return fail(format!("{nps} NP and {vps} VP parts"));
    }
    if let Some(p) = ex
        .parts
        .iter()
        .find(|p| !(min_len..=max_len).contains(&p.words.len()))
    {
        return fail(format!(
            "part `{}` has {} words",
            p.words.join(" "),
            p.words.len()
        ));
    }
    let sources: Vec<&Provenance> = ex.parts.iter().filter_map(|p| p.source.as_ref()).collect();
    let docs: HashSet<&str> = sources.iter().map(|s| s.doc_id.as_str()).collect();
    if docs.len() != sources.len() {
        return fail("parts share a source document".into());
    }
    if let Some(corpus) = corpus {
        for s in sources {
            let doc = corpus.document(&s.doc_id).ok_or_else(|| {
                Error::Validation(format!("unknown source document {}", s.doc_id))
            })?;
            if doc.label != ex.label {
                return fail(format!(
                    "part from {} has label {}",
                    s.doc_id,
                    label_name(doc.label)
                ));
            }
        }
    }
    Ok(())
}
