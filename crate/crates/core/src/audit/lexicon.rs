use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

const CANONICAL_ORDER: [&str; 4] = ["name", "location", "occupation", "drug"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub terms: BTreeSet<String>,
}

/// Identifier terms grouped by category. A term may appear in several categories.
///
/// Categories are kept in a fixed order: `name`, `location`, `occupation`,
/// `drug`, then any custom categories alphabetically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentifierLexicon {
    categories: Vec<Category>,
}

fn category_rank(name: &str) -> (usize, &str) {
    let idx = CANONICAL_ORDER
        .iter()
        .position(|c| *c == name)
        .unwrap_or(CANONICAL_ORDER.len());
    (idx, name)
}

/// Lowercases a term and collapses internal whitespace.
pub fn normalize_term(term: &str) -> String {
    term.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a wordlist: one term per line, `#` starts a comment line.
pub fn parse_wordlist(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(normalize_term)
        .collect()
}

impl IdentifierLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds (or extends) a category. Terms are normalized; empty terms are rejected.
    pub fn insert<I, S>(&mut self, name: &str, terms: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.trim().to_lowercase();
        if name.is_empty() {
            return Err(Error::Validation("lexicon category name is empty".into()));
        }
        let mut set = BTreeSet::new();
        for t in terms {
            let t = normalize_term(t.as_ref());
            if t.is_empty() {
                return Err(Error::Validation(format!(
                    "empty term in lexicon category {name}"
                )));
            }
            set.insert(t);
        }
        match self.categories.iter_mut().find(|c| c.name == name) {
            Some(c) => c.terms.extend(set),
            None => {
                self.categories.push(Category { name, terms: set });
                self.categories
                    .sort_by(|a, b| category_rank(&a.name).cmp(&category_rank(&b.name)));
            }
        }
        Ok(())
    }

    /// Loads every non-hidden regular file in `dir`; the file stem is the category name.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let path = entry.path();
            let hidden = path
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with('.'));
            if path.is_file() && !hidden {
                paths.push(path);
            }
        }
        paths.sort();
        let mut lex = IdentifierLexicon::new();
        for path in paths {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| {
                    Error::Validation(format!("bad lexicon file name {}", path.display()))
                })?
                .to_string();
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let terms = parse_wordlist(&text);
            if terms.is_empty() {
                log::warn!(
                    "lexicon category `{stem}` ({}) has no terms",
                    path.display()
                );
            }
            lex.insert(&stem, terms)?;
        }
        Ok(lex)
    }

    /// The sample lexicons shipped with the crate.
    pub fn builtin() -> Self {
        let mut lex = IdentifierLexicon::new();
        for (name, text) in [
            ("name", include_str!("../../lexicons/name.txt")),
            ("location", include_str!("../../lexicons/location.txt")),
            ("occupation", include_str!("../../lexicons/occupation.txt")),
            ("drug", include_str!("../../lexicons/drug.txt")),
        ] {
            lex.insert(name, parse_wordlist(text))
                .expect("builtin lexicons are well-formed");
        }
        lex
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn category_names(&self) -> impl Iterator<Item = &str> {
        self.categories.iter().map(|c| c.name.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.categories.iter().all(|c| c.terms.is_empty())
    }
}
