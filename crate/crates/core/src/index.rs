//! Document-frequency index over lowercased contiguous token sequences.
//!
//! Only the query forms handed to [`DocIndex::build`] are indexed, which keeps
//! memory proportional to the fragment set rather than to every n-gram of the
//! corpus. A document's token text is its sentences concatenated in order.

use std::collections::{HashMap, HashSet};

use crate::corpus::Corpus;

/// Lowercased, single-space-joined surface form of a word sequence.
pub fn surface_form<S: AsRef<str>>(words: &[S]) -> String {
    words
        .iter()
        .map(|w| w.as_ref().to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct DocIndex {
    // form -> ascending distinct document positions within the corpus
    postings: HashMap<String, Vec<u32>>,
}

impl DocIndex {
    pub fn build<I>(corpus: &Corpus, queries: I) -> Self
    where
        I: IntoIterator<Item = String>,
    {
        let queries: HashSet<String> = queries.into_iter().collect();
        let mut lengths: Vec<usize> = queries
            .iter()
            .map(|q| q.split(' ').count())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        lengths.sort_unstable();

        let mut postings: HashMap<String, Vec<u32>> =
            queries.iter().map(|q| (q.clone(), Vec::new())).collect();
        for (d, doc) in corpus.documents().iter().enumerate() {
            let tokens = doc.lowercase_tokens();
            for &n in &lengths {
                if n == 0 || n > tokens.len() {
                    continue;
                }
                for window in tokens.windows(n) {
                    let form = window.join(" ");
                    if let Some(list) = postings.get_mut(&form) {
                        if list.last() != Some(&(d as u32)) {
                            list.push(d as u32);
                        }
                    }
                }
            }
        }
        DocIndex { postings }
    }

    /// Positions (in corpus order) of documents containing `form`; empty if none or not indexed.
    pub fn docs(&self, form: &str) -> &[u32] {
        self.postings.get(form).map_or(&[], Vec::as_slice)
    }

    pub fn doc_freq(&self, form: &str) -> usize {
        self.docs(form).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_tagged;

    #[test]
    fn counts_distinct_documents() {
        let c = parse_tagged(
            "#doc a\nDenies/VBZ pain/NN ./. denies/VBZ pain/NN\n#doc b\nhe/PRP denies/VBZ\npain/NN today/NN\n#doc c\npain/NN\n",
        )
        .unwrap();
        let idx = DocIndex::build(&c, ["denies pain".to_string(), "pain".to_string()]);
        // doc b matches across its sentence boundary
        assert_eq!(idx.docs("denies pain"), &[0, 1]);
        assert_eq!(idx.doc_freq("pain"), 3);
        assert_eq!(idx.doc_freq("absent"), 0);
    }

    #[test]
    fn surface_form_lowercases() {
        assert_eq!(surface_form(&["The", "PATIENT"]), "the patient");
    }
}
