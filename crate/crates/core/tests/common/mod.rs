#![allow(dead_code)]

use fragmix::assembler::{assemble, Assembly, AssemblyConfig};
use fragmix::chunker::{build_pool, extract, filter_rare, FragmentPool, LengthBounds};
use fragmix::corpus::{generate_synthetic, Corpus, SynthSpec};

/// NP/VP constituents of a raw bracketed tree with 2..=4 words, found by
/// scanning the string directly. Returns (category, start, end, words).
pub fn oracle_constituents(
    line: &str,
    min_len: usize,
    max_len: usize,
) -> Vec<(String, usize, usize, Vec<String>)> {
    let spaced = line.replace('(', " ( ").replace(')', " ) ");
    let toks: Vec<&str> = spaced.split_whitespace().collect();

    // open-bracket position -> (label, first word index); words counted as they appear
    let mut stack: Vec<(String, usize)> = Vec::new();
    let mut words: Vec<String> = Vec::new();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        match toks[i] {
            "(" => {
                let label = match toks.get(i + 1) {
                    Some(t) if *t != "(" && *t != ")" => {
                        i += 1;
                        t.to_string()
                    }
                    _ => String::new(),
                };
                // `(TAG word)` is a token, not a constituent
                if toks.get(i + 2) == Some(&")") && toks[i + 1] != "(" {
                    words.push(toks[i + 1].replace("-LRB-", "(").replace("-RRB-", ")"));
                    i += 3;
                    continue;
                }
                stack.push((label, words.len()));
                i += 1;
            }
            ")" => {
                let (label, start) = stack.pop().expect("balanced");
                spans.push((label, start, words.len()));
                i += 1;
            }
            w => panic!("unexpected bare token {w}"),
        }
    }
    let mut out = Vec::new();
    for (label, start, end) in spans {
        let base = if label.starts_with('-') {
            label.as_str()
        } else {
            label.split(['-', '=']).next().unwrap()
        };
        if (base == "NP" || base == "VP") && (min_len..=max_len).contains(&(end - start)) {
            out.push((base.to_string(), start, end, words[start..end].to_vec()));
        }
    }
    out
}

/// Each document's lowercased token text, sentences concatenated, padded with spaces.
pub fn doc_texts(corpus: &Corpus) -> Vec<String> {
    corpus
        .documents()
        .iter()
        .map(|d| {
            let words: Vec<String> = d
                .sentences
                .iter()
                .flat_map(|s| s.tokens.iter().map(|t| t.form.to_lowercase()))
                .collect();
            format!(" {} ", words.join(" "))
        })
        .collect()
}

/// Positions of documents whose text (see [`doc_texts`]) contains `words` contiguously.
pub fn brute_docs_in(texts: &[String], words: &[String]) -> Vec<usize> {
    let needle = format!(
        " {} ",
        words
            .iter()
            .map(|w| w.to_lowercase())
            .collect::<Vec<_>>()
            .join(" ")
    );
    texts
        .iter()
        .enumerate()
        .filter(|(_, t)| t.contains(&needle))
        .map(|(i, _)| i)
        .collect()
}

pub fn brute_docs(corpus: &Corpus, words: &[String]) -> Vec<usize> {
    brute_docs_in(&doc_texts(corpus), words)
}

pub fn synthetic(n_docs: usize, case_fraction: f64, seed: u64) -> Corpus {
    generate_synthetic(&SynthSpec {
        n_docs,
        case_fraction,
        seed,
        ..SynthSpec::default()
    })
    .unwrap()
}

pub fn pool_for(corpus: &Corpus, min_doc_freq: usize) -> FragmentPool {
    let bounds = LengthBounds::default();
    let frags = corpus
        .documents()
        .iter()
        .flat_map(|d| extract(d, bounds).unwrap())
        .collect();
    filter_rare(&build_pool(corpus, frags).unwrap(), min_doc_freq).unwrap()
}

pub fn assemble_with(corpus: &Corpus, min_doc_freq: usize, cfg: &AssemblyConfig) -> Assembly {
    assemble(&pool_for(corpus, min_doc_freq), corpus, cfg).unwrap()
}
