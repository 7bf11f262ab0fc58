use super::{parse_header, unescape_form, Corpus, Document, Label, Sentence, Token, TreeNode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Lex<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Lex<'_>>> {
    let mut out = Vec::new();
    let mut depth: i64 = 0;
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                depth += 1;
                out.push(Lex::Open);
                i += 1;
            }
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::parse(
                        line_no,
                        "unbalanced parentheses: unexpected `)`",
                    ));
                }
                out.push(Lex::Close);
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !matches!(bytes[i], b'(' | b')')
                    && !bytes[i].is_ascii_whitespace()
                {
                    i += 1;
                }
                out.push(Lex::Atom(&line[start..i]));
            }
        }
    }
    if depth != 0 {
        return Err(Error::parse(line_no, "unbalanced parentheses"));
    }
    Ok(out)
}

struct TreeParser<'a> {
    lexemes: Vec<Lex<'a>>,
    pos: usize,
    line_no: usize,
    tokens: Vec<Token>,
}

impl<'a> TreeParser<'a> {
    fn node(&mut self) -> Result<TreeNode> {
        if self.lexemes.get(self.pos) != Some(&Lex::Open) {
            return Err(Error::parse(self.line_no, "expected `(`"));
        }
        self.pos += 1;
        let label = match self.lexemes.get(self.pos) {
            Some(Lex::Atom(a)) => {
                self.pos += 1;
                a.to_string()
            }
            // `( (S ...) )` wrapper with an empty root label
            _ => String::new(),
        };

        // Pre-terminal: `(POS word)`
        if let (Some(Lex::Atom(word)), Some(Lex::Close)) =
            (self.lexemes.get(self.pos), self.lexemes.get(self.pos + 1))
        {
            let word = *word;
            self.pos += 2;
            if label.is_empty() {
                return Err(Error::parse(
                    self.line_no,
                    format!("token `{word}` has no POS label"),
                ));
            }
            let index = self.tokens.len();
            let token = Token::new(unescape_form(word), Some(label.clone()))
                .map_err(|e| Error::parse(self.line_no, e.to_string()))?;
            self.tokens.push(token);
            return Ok(TreeNode::leaf(label, index));
        }

        let mut children = Vec::new();
        loop {
            match self.lexemes.get(self.pos) {
                Some(Lex::Close) => {
                    self.pos += 1;
                    break;
                }
                Some(Lex::Open) => children.push(self.node()?),
                Some(Lex::Atom(a)) => {
                    return Err(Error::parse(
                        self.line_no,
                        format!("bare word `{a}` mixed with constituents under `{label}`"),
                    ))
                }
                None => return Err(Error::parse(self.line_no, "unbalanced parentheses")),
            }
        }
        if children.is_empty() {
            return Err(Error::parse(
                self.line_no,
                format!("node `{label}` has zero children"),
            ));
        }
        Ok(TreeNode::branch(label, children))
    }
}

/// Parses one bracketed tree, returning the sentence it spans.
///
/// A PTB-style outer wrapper with an empty label, `( (S ...) )`, is removed.
pub fn parse_tree(line: &str, line_no: usize) -> Result<Sentence> {
    let lexemes = lex(line, line_no)?;
    let mut parser = TreeParser {
        lexemes,
        pos: 0,
        line_no,
        tokens: Vec::new(),
    };
    let mut root = parser.node()?;
    if parser.pos != parser.lexemes.len() {
        return Err(Error::parse(line_no, "trailing content after tree"));
    }
    while root.label.is_empty() && root.children().len() == 1 {
        root = root.children()[0].clone();
    }
    if root.label.is_empty() {
        return Err(Error::parse(line_no, "root node has no label"));
    }
    Sentence::new(parser.tokens, Some(root)).map_err(|e| Error::parse(line_no, e.to_string()))
}

/// Reads the bracketed format: `#doc <doc_id> [label]` headers, each followed
/// by one tree per line. Blank lines are ignored.
pub fn parse_bracketed(input: &str) -> Result<Corpus> {
    let mut docs = Vec::new();
    let mut current: Option<(String, Option<Label>, Vec<Sentence>)> = None;

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some((doc_id, label)) = parse_header(line, line_no)? {
            if let Some((id, l, s)) = current.take() {
                docs.push(Document::new(id, l, s)?);
            }
            current = Some((doc_id, label, Vec::new()));
            continue;
        }
        let Some((_, _, sentences)) = current.as_mut() else {
            return Err(Error::parse(line_no, "tree before the first `#doc` header"));
        };
        sentences.push(parse_tree(line, line_no)?);
    }
    if let Some((id, l, s)) = current {
        docs.push(Document::new(id, l, s)?);
    }
    Corpus::new(docs)
}

/// Writes a corpus in the bracketed format. Every sentence must carry a tree.
pub fn write_bracketed(corpus: &Corpus, mut out: impl std::io::Write) -> Result<()> {
    let io = |e| Error::io("<bracketed>", e);
    for d in corpus.documents() {
        write_header(&mut out, d).map_err(io)?;
        for s in &d.sentences {
            let tree = s.tree.as_ref().ok_or_else(|| Error::MissingTrees {
                doc_id: d.doc_id.clone(),
            })?;
            writeln!(out, "{}", tree.render(&s.tokens)).map_err(io)?;
        }
    }
    Ok(())
}

pub(crate) fn write_header(out: &mut impl std::io::Write, d: &Document) -> std::io::Result<()> {
    match d.label {
        Some(l) => writeln!(out, "#doc {} {l}", d.doc_id),
        None => writeln!(out, "#doc {}", d.doc_id),
    }
}
