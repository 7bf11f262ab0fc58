//! Privacy audit of a fragmented release.
//!
//! * [`audit_reduction`]: identifier words as a percentage of all words, full
//!   corpus against release.
//! * [`k_anonymity`]: for each released part, the number of reference
//!   documents containing it verbatim, plus example-level linkage rates.
//! * [`exposure`]: share of released parts that contain an identifier term.

mod lexicon;
mod report;
mod scan;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::assembler::AssembledExample;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::index::DocIndex;

pub use lexicon::{normalize_term, parse_wordlist, Category, IdentifierLexicon};
pub use report::{render_exposure_table, render_identifier_table, render_linkage_table};
pub use scan::{scan_identifiers, IdentifierCounts, IdentifierScanner, Match};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryRow {
    pub category: String,
    pub full_words: usize,
    pub frag_words: usize,
    pub full_pct: f64,
    pub frag_pct: f64,
    /// `full_pct / frag_pct`; `None` when the release has no such words.
    pub reduction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub categories: Vec<CategoryRow>,
    /// Union over categories: a word matched by several categories counts once.
    pub all: CategoryRow,
    pub full_total_words: usize,
    pub frag_total_words: usize,
}

fn row(
    category: &str,
    full_words: usize,
    frag_words: usize,
    full: &IdentifierCounts,
    frag: &IdentifierCounts,
) -> CategoryRow {
    let full_pct = full.pct(full_words);
    let frag_pct = frag.pct(frag_words);
    CategoryRow {
        category: category.to_string(),
        full_words,
        frag_words,
        full_pct,
        frag_pct,
        reduction: (frag_words > 0).then(|| full_pct / frag_pct),
    }
}

/// Identifier counts over the parts of a release (separators excluded).
pub fn scan_release(release: &[AssembledExample], lexicon: &IdentifierLexicon) -> IdentifierCounts {
    scan_identifiers(
        release
            .iter()
            .flat_map(|ex| ex.parts.iter().map(|p| p.words.as_slice())),
        lexicon,
    )
}

/// Identifier counts over every sentence of a corpus.
pub fn scan_corpus(corpus: &Corpus, lexicon: &IdentifierLexicon) -> IdentifierCounts {
    scan_identifiers(
        corpus.documents().iter().flat_map(|d| {
            d.sentences
                .iter()
                .map(|s| s.tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>())
        }),
        lexicon,
    )
}

pub fn audit_reduction(
    full: &Corpus,
    release: &[AssembledExample],
    lexicon: &IdentifierLexicon,
) -> Result<AuditReport> {
    if full.is_empty() || release.is_empty() {
        return Err(Error::Validation(
            "identifier audit needs a non-empty corpus and release".into(),
        ));
    }
    let full_counts = scan_corpus(full, lexicon);
    let frag_counts = scan_release(release, lexicon);
    let categories = full_counts
        .categories
        .iter()
        .enumerate()
        .map(|(i, c)| {
            row(
                c,
                full_counts.per_category[i],
                frag_counts.per_category[i],
                &full_counts,
                &frag_counts,
            )
        })
        .collect();
    Ok(AuditReport {
        categories,
        all: row(
            "all",
            full_counts.union,
            frag_counts.union,
            &full_counts,
            &frag_counts,
        ),
        full_total_words: full_counts.total_words,
        frag_total_words: frag_counts.total_words,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkageReport {
    pub n_examples: usize,
    pub n_parts: usize,
    /// k -> number of parts with that many matching reference documents.
    pub k_histogram: BTreeMap<usize, usize>,
    pub min_k: usize,
    /// Percentage of parts with exactly one matching reference document.
    pub pct_k1: f64,
    /// Percentage of examples with at least one part at k = 1.
    pub example_link_rate: f64,
    /// Percentage of examples whose parts' candidate document sets intersect.
    pub intersection_rate: f64,
}

/// Per-part candidate documents (positions in `reference`) for every example.
pub fn candidate_sets(release: &[AssembledExample], reference: &Corpus) -> Vec<Vec<Vec<u32>>> {
    let index = DocIndex::build(
        reference,
        release
            .iter()
            .flat_map(|ex| ex.parts.iter().map(|p| p.surface())),
    );
    release
        .iter()
        .map(|ex| {
            ex.parts
                .iter()
                .map(|p| index.docs(&p.surface()).to_vec())
                .collect()
        })
        .collect()
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn pct(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

/// Exact-match linkage audit of a release against a reference corpus.
pub fn k_anonymity(release: &[AssembledExample], reference: &Corpus) -> Result<LinkageReport> {
    if release.is_empty() {
        return Err(Error::Validation("cannot audit an empty release".into()));
    }
    let candidates = candidate_sets(release, reference);
    let mut k_histogram = BTreeMap::new();
    let mut n_parts = 0;
    let mut k1 = 0;
    let mut linked_examples = 0;
    let mut intersecting = 0;
    for parts in &candidates {
        let mut any_unique = false;
        for docs in parts {
            *k_histogram.entry(docs.len()).or_insert(0) += 1;
            n_parts += 1;
            if docs.len() == 1 {
                k1 += 1;
                any_unique = true;
            }
        }
        if any_unique {
            linked_examples += 1;
        }
        let common = parts
            .iter()
            .skip(1)
            .fold(parts.first().cloned().unwrap_or_default(), |acc, d| {
                intersect_sorted(&acc, d)
            });
        if !common.is_empty() {
            intersecting += 1;
        }
    }
    Ok(LinkageReport {
        n_examples: release.len(),
        n_parts,
        min_k: k_histogram.keys().next().copied().unwrap_or(0),
        k_histogram,
        pct_k1: pct(k1, n_parts),
        example_link_rate: pct(linked_examples, release.len()),
        intersection_rate: pct(intersecting, release.len()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposureReport {
    pub n_parts: usize,
    /// (category, fraction of parts containing at least one of its terms), in lexicon order.
    pub categories: Vec<(String, f64)>,
}

impl ExposureReport {
    pub fn get(&self, category: &str) -> Option<f64> {
        self.categories
            .iter()
            .find(|(c, _)| c == category)
            .map(|(_, v)| *v)
    }
}

/// Per category, the fraction of released parts with at least one identifier match.
pub fn exposure(
    release: &[AssembledExample],
    lexicon: &IdentifierLexicon,
) -> Result<ExposureReport> {
    if release.is_empty() {
        return Err(Error::Validation(
            "cannot compute exposure of an empty release".into(),
        ));
    }
    let scanner = IdentifierScanner::new(lexicon);
    let mut hits = vec![0usize; scanner.categories().len()];
    let mut n_parts = 0;
    for part in release.iter().flat_map(|ex| &ex.parts) {
        n_parts += 1;
        let mut seen = vec![false; hits.len()];
        for m in scanner.matches(&part.words) {
            for &c in m.categories {
                seen[c] = true;
            }
        }
        for (h, s) in hits.iter_mut().zip(seen) {
            *h += usize::from(s);
        }
    }
    Ok(ExposureReport {
        n_parts,
        categories: scanner
            .categories()
            .iter()
            .zip(hits)
            .map(|(c, h)| (c.clone(), h as f64 / n_parts as f64))
            .collect(),
    })
}
