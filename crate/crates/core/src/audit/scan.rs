use std::collections::HashMap;

use serde::Serialize;

use super::lexicon::IdentifierLexicon;

/// Compiled greedy longest-match scanner over a lexicon.
#[derive(Debug, Clone)]
pub struct IdentifierScanner {
    categories: Vec<String>,
    // joined lowercase term -> indices of categories containing it
    terms: HashMap<String, Vec<usize>>,
    max_len: usize,
}

/// Word counts from one scan. `per_category` follows the lexicon's category order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentifierCounts {
    pub categories: Vec<String>,
    pub per_category: Vec<usize>,
    /// Words matched by any category, each counted once.
    pub union: usize,
    pub total_words: usize,
}

impl IdentifierCounts {
    pub fn get(&self, category: &str) -> Option<usize> {
        self.categories
            .iter()
            .position(|c| c == category)
            .map(|i| self.per_category[i])
    }

    /// Percentage of total words, 0 when there are no words.
    pub fn pct(&self, words: usize) -> f64 {
        if self.total_words == 0 {
            0.0
        } else {
            100.0 * words as f64 / self.total_words as f64
        }
    }

    pub fn merge(&mut self, other: &IdentifierCounts) {
        debug_assert_eq!(self.categories, other.categories);
        for (a, b) in self.per_category.iter_mut().zip(&other.per_category) {
            *a += b;
        }
        self.union += other.union;
        self.total_words += other.total_words;
    }
}

/// A single greedy match: `len` tokens starting at `start`, credited to `categories`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match<'a> {
    pub start: usize,
    pub len: usize,
    pub categories: &'a [usize],
}

impl IdentifierScanner {
    pub fn new(lexicon: &IdentifierLexicon) -> Self {
        let mut terms: HashMap<String, Vec<usize>> = HashMap::new();
        let mut max_len = 0;
        let mut categories = Vec::new();
        for (idx, cat) in lexicon.categories().iter().enumerate() {
            categories.push(cat.name.clone());
            if cat.terms.is_empty() {
                log::warn!(
                    "lexicon category `{}` is empty; its counts will be zero",
                    cat.name
                );
            }
            for t in &cat.terms {
                max_len = max_len.max(t.split(' ').count());
                let entry = terms.entry(t.clone()).or_default();
                if !entry.contains(&idx) {
                    entry.push(idx);
                }
            }
        }
        IdentifierScanner {
            categories,
            terms,
            max_len,
        }
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn empty_counts(&self) -> IdentifierCounts {
        IdentifierCounts {
            categories: self.categories.clone(),
            per_category: vec![0; self.categories.len()],
            union: 0,
            total_words: 0,
        }
    }

    /// Greedy, case-insensitive longest match from left to right. Matches never overlap.
    pub fn matches<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Match<'_>> {
        let lower: Vec<String> = tokens.iter().map(|t| t.as_ref().to_lowercase()).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < lower.len() {
            let longest = self.max_len.min(lower.len() - i);
            let hit = (1..=longest).rev().find_map(|n| {
                self.terms
                    .get(&lower[i..i + n].join(" "))
                    .map(|cats| (n, cats.as_slice()))
            });
            match hit {
                Some((n, cats)) => {
                    out.push(Match {
                        start: i,
                        len: n,
                        categories: cats,
                    });
                    i += n;
                }
                None => i += 1,
            }
        }
        out
    }

    /// Counts identifier words in one token segment. Matches do not cross segments.
    pub fn scan<S: AsRef<str>>(&self, tokens: &[S]) -> IdentifierCounts {
        let mut counts = self.empty_counts();
        self.scan_into(tokens, &mut counts);
        counts
    }

    pub fn scan_into<S: AsRef<str>>(&self, tokens: &[S], counts: &mut IdentifierCounts) {
        counts.total_words += tokens.len();
        for m in self.matches(tokens) {
            counts.union += m.len;
            for &c in m.categories {
                counts.per_category[c] += m.len;
            }
        }
    }
}

/// Scans a sequence of token segments (sentences, fragment parts) and sums the counts.
pub fn scan_identifiers<I, T, S>(segments: I, lexicon: &IdentifierLexicon) -> IdentifierCounts
where
    I: IntoIterator<Item = T>,
    T: AsRef<[S]>,
    S: AsRef<str>,
{
    let scanner = IdentifierScanner::new(lexicon);
    let mut counts = scanner.empty_counts();
    for seg in segments {
        scanner.scan_into(seg.as_ref(), &mut counts);
    }
    counts
}
