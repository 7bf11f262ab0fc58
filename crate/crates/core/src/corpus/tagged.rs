use super::{parse_header, Corpus, Document, Label, Sentence, Token};
use crate::error::{Error, Result};

struct Record {
    doc_id: String,
    label: Option<Label>,
    sentences: Vec<Sentence>,
    // pending tokens of a column-format sentence
    column: Vec<Token>,
}

impl Record {
    fn flush_column(&mut self) -> Result<()> {
        if !self.column.is_empty() {
            let tokens = std::mem::take(&mut self.column);
            self.sentences.push(Sentence::new(tokens, None)?);
        }
        Ok(())
    }

    fn finish(mut self) -> Result<Document> {
        self.flush_column()?;
        Document::new(self.doc_id, self.label, self.sentences)
    }
}

fn tagged_token(form: &str, pos: &str, line_no: usize) -> Result<Token> {
    Token::new(form, Some(pos.to_string())).map_err(|e| Error::parse(line_no, e.to_string()))
}

/// Reads POS-tagged input: `#doc <doc_id> [label]` headers followed either by
/// inline sentences (`form/POS` pairs, one sentence per line) or by
/// tab-separated `form<TAB>POS` columns with blank-line sentence breaks.
pub fn parse_tagged(input: &str) -> Result<Corpus> {
    let mut docs = Vec::new();
    let mut current: Option<Record> = None;

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if let Some((doc_id, label)) = parse_header(line.trim(), line_no)? {
            if let Some(rec) = current.take() {
                docs.push(rec.finish()?);
            }
            current = Some(Record {
                doc_id,
                label,
                sentences: Vec::new(),
                column: Vec::new(),
            });
            continue;
        }
        if line.trim().is_empty() {
            if let Some(rec) = current.as_mut() {
                rec.flush_column()?;
            }
            continue;
        }
        let Some(rec) = current.as_mut() else {
            return Err(Error::parse(
                line_no,
                "tokens before the first `#doc` header",
            ));
        };

        if line.contains('\t') {
            let mut cols = line.split('\t');
            let form = cols.next().unwrap_or("").trim();
            let pos = cols.next().unwrap_or("").trim();
            if form.is_empty() || pos.is_empty() {
                return Err(Error::parse(line_no, "column token needs `form<TAB>POS`"));
            }
            rec.column.push(tagged_token(form, pos, line_no)?);
            continue;
        }

        rec.flush_column()?;
        let mut tokens = Vec::new();
        for (i, item) in line.split_whitespace().enumerate() {
            let (form, pos) = item
                .rsplit_once('/')
                .filter(|(f, p)| !f.is_empty() && !p.is_empty())
                .ok_or_else(|| {
                    Error::parse(
                        line_no,
                        format!("token {} `{item}` is missing the `/POS` separator", i + 1),
                    )
                })?;
            tokens.push(tagged_token(form, pos, line_no)?);
        }
        rec.sentences.push(Sentence::new(tokens, None)?);
    }
    if let Some(rec) = current {
        docs.push(rec.finish()?);
    }
    Corpus::new(docs)
}

/// Writes a corpus in the inline tagged format. Every token must carry a POS tag.
pub fn write_tagged(corpus: &Corpus, mut out: impl std::io::Write) -> Result<()> {
    let io = |e| Error::io("<tagged>", e);
    for d in corpus.documents() {
        super::bracketed::write_header(&mut out, d).map_err(io)?;
        for (sent_idx, s) in d.sentences.iter().enumerate() {
            let mut line = Vec::with_capacity(s.tokens.len());
            for (token_idx, t) in s.tokens.iter().enumerate() {
                let pos = t.pos.as_deref().ok_or_else(|| Error::MissingPos {
                    doc_id: d.doc_id.clone(),
                    sent_idx,
                    token_idx,
                })?;
                line.push(format!("{}/{pos}", t.form));
            }
            writeln!(out, "{}", line.join(" ")).map_err(io)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_tokens() {
        let c = parse_tagged("#doc d1 case\nthe/DT patient/NN denies/VBZ pain/NN\n").unwrap();
        let s = &c.documents()[0].sentences[0];
        assert_eq!(s.tokens.len(), 4);
        assert!(s.tree.is_none());
        assert_eq!(s.tokens[1].form, "patient");
        assert_eq!(s.tokens[1].pos.as_deref(), Some("NN"));
    }

    #[test]
    fn slash_inside_form_uses_last_separator() {
        let c = parse_tagged("#doc d1\n1/2/CD tab/NN\n").unwrap();
        assert_eq!(c.documents()[0].sentences[0].tokens[0].form, "1/2");
    }

    #[test]
    fn missing_separator_reports_position() {
        let err = parse_tagged("#doc d1\nthe/DT patient denies/VBZ\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("token 2"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_body_is_validation_error() {
        assert!(matches!(
            parse_tagged("#doc d1 control\n\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn column_format() {
        let c = parse_tagged("#doc d1\nthe\tDT\npatient\tNN\n\ndenies\tVBZ\n").unwrap();
        let d = &c.documents()[0];
        assert_eq!(d.sentences.len(), 2);
        assert_eq!(d.sentences[1].tokens[0].pos.as_deref(), Some("VBZ"));
    }
}
