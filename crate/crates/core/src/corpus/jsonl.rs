use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{parse_tree, Corpus, Document, Label, Sentence, Token};
use crate::error::{Error, Result};

/// One line of the canonical document format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub label: Option<Label>,
    pub sentences: Vec<SentenceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub tokens: Vec<String>,
    pub pos: Vec<Option<String>>,
    pub tree: Option<String>,
}

impl From<&Document> for DocumentRecord {
    fn from(d: &Document) -> Self {
        DocumentRecord {
            doc_id: d.doc_id.clone(),
            label: d.label,
            sentences: d
                .sentences
                .iter()
                .map(|s| SentenceRecord {
                    tokens: s.tokens.iter().map(|t| t.form.clone()).collect(),
                    pos: s.tokens.iter().map(|t| t.pos.clone()).collect(),
                    tree: s.tree.as_ref().map(|t| t.render(&s.tokens)),
                })
                .collect(),
        }
    }
}

impl DocumentRecord {
    fn into_document(self, line_no: usize) -> Result<Document> {
        let mut sentences = Vec::with_capacity(self.sentences.len());
        for rec in self.sentences {
            if rec.pos.len() != rec.tokens.len() {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "{} tokens but {} POS entries",
                        rec.tokens.len(),
                        rec.pos.len()
                    ),
                ));
            }
            let tokens = rec
                .tokens
                .into_iter()
                .zip(rec.pos)
                .map(|(f, p)| Token::new(f, p))
                .collect::<Result<Vec<_>>>()?;
            let tree = match rec.tree {
                Some(t) => {
                    let parsed = parse_tree(&t, line_no)?;
                    if parsed.tokens.len() != tokens.len()
                        || parsed
                            .tokens
                            .iter()
                            .zip(&tokens)
                            .any(|(a, b)| a.form != b.form)
                    {
                        return Err(Error::parse(
                            line_no,
                            "tree words do not match sentence tokens",
                        ));
                    }
                    parsed.tree
                }
                None => None,
            };
            sentences.push(Sentence::new(tokens, tree)?);
        }
        Document::new(self.doc_id, self.label, sentences)
    }
}

/// Reads the canonical one-document-per-line JSON format.
pub fn read_jsonl(input: &str) -> Result<Corpus> {
    let mut docs = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: DocumentRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        docs.push(rec.into_document(idx + 1)?);
    }
    Corpus::new(docs)
}

pub fn write_jsonl(corpus: &Corpus, mut out: impl Write) -> std::io::Result<()> {
    for d in corpus.documents() {
        serde_json::to_writer(&mut out, &DocumentRecord::from(d))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
