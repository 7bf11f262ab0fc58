//! Train/test splitting, release files and release statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::assembler::{AssembledExample, Part, Provenance};
use crate::chunker::ChunkKind;
use crate::corpus::{label_name, Corpus, Document, Label};
use crate::error::{Error, Result};
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratify: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.10,
            seed: 42,
            stratify: true,
        }
    }
}

/// Minimum documents per label for a stratified split.
pub const MIN_DOCS_PER_LABEL: usize = 10;

/// Splits `total` test slots across groups by largest remainder, so the per-group
/// counts sum to exactly `total`. Ties go to the earlier group.
fn apportion(total: usize, fraction: f64, sizes: &[usize]) -> Vec<usize> {
    let quotas: Vec<f64> = sizes.iter().map(|&n| fraction * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &g in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[g] += 1;
    }
    counts
}

/// Holds out `round(test_fraction * N)` documents, stratified by label when
/// requested. Both halves keep the original document order.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "test_fraction must be in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    let n = corpus.len();
    let total = (spec.test_fraction * n as f64).round() as usize;
    if total == 0 || total >= n {
        return Err(Error::Validation(format!(
            "{n} documents are too few for test_fraction {}",
            spec.test_fraction
        )));
    }

    let mut groups: BTreeMap<Option<Label>, Vec<usize>> = BTreeMap::new();
    if spec.stratify {
        for (i, d) in corpus.documents().iter().enumerate() {
            groups.entry(d.label).or_default().push(i);
        }
        if let Some((l, g)) = groups.iter().find(|(_, g)| g.len() < MIN_DOCS_PER_LABEL) {
            return Err(Error::Validation(format!(
                "label {} has {} documents; a stratified split needs at least {MIN_DOCS_PER_LABEL}",
                label_name(*l),
                g.len()
            )));
        }
    } else {
        groups.insert(None, (0..n).collect());
    }

    let sizes: Vec<usize> = groups.values().map(Vec::len).collect();
    let quotas = apportion(total, spec.test_fraction, &sizes);
    let mut rng = rng_for(spec.seed, "split");
    let mut test_ids = HashSet::new();
    for (members, quota) in groups.into_values().zip(quotas) {
        let mut members = members;
        members.shuffle(&mut rng);
        test_ids.extend(members.into_iter().take(quota));
    }

    let (test, train): (Vec<_>, Vec<_>) = corpus
        .documents()
        .iter()
        .enumerate()
        .partition(|(i, _)| test_ids.contains(i));
    let collect =
        |v: Vec<(usize, &Document)>| Corpus::new(v.into_iter().map(|(_, d)| d.clone()).collect());
    Ok((collect(train)?, collect(test)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRecord {
    pub kind: ChunkKind,
    pub words: Vec<String>,
    pub doc_id: String,
    pub sent_idx: usize,
    pub span: [usize; 2],
}

/// One release line. Field order is fixed: example_id, label, text, parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseRecord {
    pub example_id: String,
    pub label: Option<Label>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<PartRecord>>,
}

fn to_record(ex: &AssembledExample, with_provenance: bool) -> Result<ReleaseRecord> {
    let parts = if with_provenance {
        let parts = ex
            .parts
            .iter()
            .map(|p| {
                let src = p.source.as_ref().ok_or_else(|| {
                    Error::Validation(format!(
                        "example {} has a part without provenance",
                        ex.example_id
                    ))
                })?;
                Ok(PartRecord {
                    kind: p.kind,
                    words: p.words.clone(),
                    doc_id: src.doc_id.clone(),
                    sent_idx: src.sent_idx,
                    span: src.span,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Some(parts)
    } else {
        None
    };
    Ok(ReleaseRecord {
        example_id: ex.example_id.clone(),
        label: ex.label,
        text: ex.text.clone(),
        parts,
    })
}

/// Writes release JSONL: UTF-8, LF line endings, one example per line.
pub fn write_release(
    examples: &[AssembledExample],
    mut out: impl Write,
    with_provenance: bool,
) -> Result<()> {
    let io = |e: std::io::Error| Error::io("<release>", e);
    for ex in examples {
        let rec = to_record(ex, with_provenance)?;
        serde_json::to_writer(&mut out, &rec).map_err(|e| io(e.into()))?;
        out.write_all(b"\n").map_err(io)?;
    }
    Ok(())
}

pub fn emit_release(
    examples: &[AssembledExample],
    path: &Path,
    with_provenance: bool,
) -> Result<()> {
    if examples.is_empty() {
        log::warn!("writing an empty release to {}", path.display());
    }
    let mut buf = Vec::new();
    write_release(examples, &mut buf, with_provenance)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Reads release JSONL. Examples from a file without provenance have no parts.
pub fn read_release(input: &str) -> Result<Vec<AssembledExample>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let rec: ReleaseRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            Ok(AssembledExample {
                example_id: rec.example_id,
                label: rec.label,
                text: rec.text,
                parts: rec
                    .parts
                    .unwrap_or_default()
                    .into_iter()
                    .map(|p| Part {
                        kind: p.kind,
                        words: p.words,
                        source: Some(Provenance {
                            doc_id: p.doc_id,
                            sent_idx: p.sent_idx,
                            span: p.span,
                        }),
                    })
                    .collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReleaseStats {
    pub n_examples: usize,
    pub label_counts: BTreeMap<String, usize>,
    pub mean_example_words: f64,
    pub max_example_words: usize,
    pub mean_part_words: f64,
    pub max_part_words: usize,
    pub n_source_docs: usize,
    pub examples_per_source_doc: f64,
}

/// Word-length statistics over example parts (separators excluded).
pub fn stats(examples: &[AssembledExample], source: &Corpus) -> Result<ReleaseStats> {
    if examples.is_empty() {
        return Err(Error::Validation(
            "release statistics need at least one example".into(),
        ));
    }
    let mut label_counts = BTreeMap::new();
    let mut example_words = 0usize;
    let mut max_example_words = 0;
    let mut part_words = 0usize;
    let mut n_parts = 0usize;
    let mut max_part_words = 0;
    for ex in examples {
        *label_counts
            .entry(label_name(ex.label).to_string())
            .or_insert(0) += 1;
        let w = ex.word_count();
        example_words += w;
        max_example_words = max_example_words.max(w);
        for p in &ex.parts {
            n_parts += 1;
            part_words += p.words.len();
            max_part_words = max_part_words.max(p.words.len());
        }
    }
    Ok(ReleaseStats {
        n_examples: examples.len(),
        label_counts,
        mean_example_words: example_words as f64 / examples.len() as f64,
        max_example_words,
        mean_part_words: if n_parts == 0 {
            0.0
        } else {
            part_words as f64 / n_parts as f64
        },
        max_part_words,
        n_source_docs: source.len(),
        examples_per_source_doc: if source.is_empty() {
            0.0
        } else {
            examples.len() as f64 / source.len() as f64
        },
    })
}

pub fn render_stats_table(s: &ReleaseStats) -> String {
    let mut out = String::new();
    writeln!(out, "examples                  {}", s.n_examples).unwrap();
    for (l, n) in &s.label_counts {
        writeln!(out, "  {l:<24}{n}").unwrap();
    }
    writeln!(out, "mean example words        {:.2}", s.mean_example_words).unwrap();
    writeln!(out, "max example words         {}", s.max_example_words).unwrap();
    writeln!(out, "mean part words           {:.2}", s.mean_part_words).unwrap();
    writeln!(out, "max part words            {}", s.max_part_words).unwrap();
    writeln!(out, "source documents          {}", s.n_source_docs).unwrap();
    writeln!(
        out,
        "examples per source doc   {:.3}",
        s.examples_per_source_doc
    )
    .unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Sentence, Token};

    fn corpus(n_case: usize, n_control: usize) -> Corpus {
        let s = Sentence::new(vec![Token::new("x", None).unwrap()], None).unwrap();
        let docs = (0..n_case + n_control)
            .map(|i| {
                let label = if i < n_case {
                    Label::Case
                } else {
                    Label::Control
                };
                Document::new(format!("d{i:03}"), Some(label), vec![s.clone()]).unwrap()
            })
            .collect();
        Corpus::new(docs).unwrap()
    }

    fn ids(c: &Corpus) -> HashSet<String> {
        c.documents().iter().map(|d| d.doc_id.clone()).collect()
    }

    #[test]
    fn stratified_counts() {
        let c = corpus(20, 180);
        let (train, test) = split(&c, &SplitSpec::default()).unwrap();
        assert_eq!(test.len(), 20);
        assert_eq!(test.label_count(Some(Label::Case)), 2);
        assert_eq!(test.label_count(Some(Label::Control)), 18);
        assert_eq!(train.len(), 180);
        assert!(ids(&train).is_disjoint(&ids(&test)));
        let union: HashSet<_> = ids(&train).union(&ids(&test)).cloned().collect();
        assert_eq!(union, ids(&c));
    }

    #[test]
    fn split_is_deterministic() {
        let c = corpus(20, 180);
        let a = split(&c, &SplitSpec::default()).unwrap();
        let b = split(&c, &SplitSpec::default()).unwrap();
        assert_eq!(a, b);
        let other = split(
            &c,
            &SplitSpec {
                seed: 9,
                ..SplitSpec::default()
            },
        )
        .unwrap();
        assert_ne!(ids(&a.1), ids(&other.1));
    }

    #[test]
    fn too_few_per_label() {
        let c = corpus(5, 100);
        assert!(matches!(
            split(&c, &SplitSpec::default()),
            Err(Error::Validation(_))
        ));
        let unstratified = SplitSpec {
            stratify: false,
            ..SplitSpec::default()
        };
        assert!(split(&c, &unstratified).is_ok());
        assert!(split(&corpus(1, 1), &unstratified).is_err());
    }

    #[test]
    fn apportion_sums_to_total() {
        assert_eq!(apportion(20, 0.1, &[20, 180]), vec![2, 18]);
        assert_eq!(apportion(3, 0.1, &[15, 15]), vec![2, 1]);
        assert_eq!(apportion(2, 0.1, &[15, 15]).iter().sum::<usize>(), 2);
    }

    fn example(words: &[&str]) -> AssembledExample {
        let kinds = [ChunkKind::NP, ChunkKind::NP, ChunkKind::VP, ChunkKind::VP];
        AssembledExample {
            example_id: "ex-1".into(),
            label: Some(Label::Case),
            parts: words
                .iter()
                .zip(kinds)
                .enumerate()
                .map(|(i, (w, kind))| Part {
                    kind,
                    words: w.split(' ').map(String::from).collect(),
                    source: Some(Provenance {
                        doc_id: format!("doc-{i}"),
                        sent_idx: 3,
                        span: [0, w.split(' ').count()],
                    }),
                })
                .collect(),
            text: words.join(". "),
        }
    }

    #[test]
    fn release_without_provenance_has_no_doc_ids() {
        let ex = example(&["a b", "c d", "e f", "g h"]);
        let mut buf = Vec::new();
        write_release(std::slice::from_ref(&ex), &mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"example_id\":\"ex-1\",\"label\":\"case\",\"text\":\"a b. c d. e f. g h\"}\n"
        );
        assert!(!text.contains("doc-"));

        let mut buf = Vec::new();
        write_release(std::slice::from_ref(&ex), &mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"parts\":[{\"kind\":\"NP\",\"words\":[\"a\",\"b\"],\"doc_id\":\"doc-0\",\"sent_idx\":3,\"span\":[0,2]}"));
        assert_eq!(read_release(&text).unwrap(), vec![ex]);
    }

    #[test]
    fn empty_release_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        emit_release(&[], &path, false).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 0);
    }

    #[test]
    fn stats_all_length_two() {
        let ex = example(&["a b", "c d", "e f", "g h"]);
        let s = stats(&[ex.clone(), ex], &corpus(10, 10)).unwrap();
        assert_eq!(s.mean_example_words, 8.0);
        assert_eq!(s.max_example_words, 8);
        assert_eq!(s.mean_part_words, 2.0);
        assert_eq!(s.examples_per_source_doc, 0.1);
        assert_eq!(s.label_counts["case"], 2);
        assert!(stats(&[], &corpus(1, 1)).is_err());
    }
}
