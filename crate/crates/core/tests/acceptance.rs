//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use fragmix::assembler::{AssembledExample, AssemblyConfig};
use fragmix::audit::{audit_reduction, k_anonymity, IdentifierLexicon};
use fragmix::chunker::{extract_tree, ChunkKind, LengthBounds};
use fragmix::cli::stages::sha256_hex;
use fragmix::cli::PipelineConfig;
use fragmix::corpus::{generate_synthetic, parse_tree, read_jsonl, Corpus, Document, Label};
use fragmix::dataset::{split, SplitSpec};

use common::{assemble_with, brute_docs_in, doc_texts, oracle_constituents, pool_for, synthetic};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn extraction_oracle() -> Outcome {
    let text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/trees.txt"),
    )
    .map_err(|e| e.to_string())?;
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| l.trim_start().starts_with('('))
        .collect();
    check(
        lines.len() >= 50,
        format!("only {} fixture trees", lines.len()),
    )?;
    let bounds = LengthBounds::new(2, 4).unwrap();
    let mut n = 0;
    for (i, line) in lines.iter().enumerate() {
        let doc = Document::new(
            "d",
            None,
            vec![parse_tree(line, i + 1).map_err(|e| e.to_string())?],
        )
        .unwrap();
        let got: BTreeSet<_> = extract_tree(&doc, bounds)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|f| (f.kind.as_str().to_string(), f.span.0, f.span.1, f.words))
            .collect();
        let want: BTreeSet<_> = oracle_constituents(line, 2, 4).into_iter().collect();
        check(
            got == want,
            format!("tree {} differs: got {got:?}, want {want:?}", i + 1),
        )?;
        n += want.len();
    }
    Ok(format!("{} trees, {n} fragments set-equal", lines.len()))
}

/// Exhaustive check of the four-source and label-purity rules against the corpus.
fn colocation_violations(release: &[AssembledExample], corpus: &Corpus) -> (usize, usize) {
    let mut dup = 0;
    let mut impure = 0;
    for ex in release {
        let docs: Vec<&str> = ex
            .parts
            .iter()
            .map(|p| p.source.as_ref().unwrap().doc_id.as_str())
            .collect();
        if docs.iter().collect::<HashSet<_>>().len() != docs.len() {
            dup += 1;
        }
        if docs
            .iter()
            .any(|d| corpus.document(d).map(|d| d.label) != Some(ex.label))
        {
            impure += 1;
        }
    }
    (dup, impure)
}

fn thousand_examples() -> (Corpus, Vec<AssembledExample>) {
    let corpus = synthetic(200, 0.10, 42);
    let cfg = AssemblyConfig {
        seed: 42,
        target_ratio: 5.0,
        ..AssemblyConfig::default()
    };
    let release = assemble_with(&corpus, 1, &cfg).examples;
    (corpus, release)
}

fn non_colocation() -> Outcome {
    let (corpus, release) = thousand_examples();
    check(
        release.len() == 1000,
        format!("assembled {} examples, expected 1000", release.len()),
    )?;
    let (dup, impure) = colocation_violations(&release, &corpus);
    check(
        dup == 0 && impure == 0,
        format!("{dup} with duplicate sources, {impure} label-impure"),
    )?;
    Ok("1000 examples, 0 duplicate source docs, 0 label-impure parts".into())
}

fn split_preservation() -> Outcome {
    let corpus = synthetic(200, 0.10, 42);
    let (train, _) = split(&corpus, &SplitSpec::default()).map_err(|e| e.to_string())?;
    let release = assemble_with(&train, 3, &AssemblyConfig::default()).examples;
    let cases = release
        .iter()
        .filter(|e| e.label == Some(Label::Case))
        .count();
    let frac = cases as f64 / release.len() as f64;
    check(
        (frac - 0.10).abs() <= 0.01,
        format!("case fraction {frac:.4}"),
    )?;
    Ok(format!(
        "case fraction {frac:.4} ({cases}/{})",
        release.len()
    ))
}

fn structure_bounds() -> Outcome {
    let (_, release) = thousand_examples();
    check(!release.is_empty(), "empty release")?;
    for ex in &release {
        let nps = ex.parts.iter().filter(|p| p.kind == ChunkKind::NP).count();
        let vps = ex.parts.iter().filter(|p| p.kind == ChunkKind::VP).count();
        check(
            ex.parts.len() == 4 && nps == 2 && vps == 2,
            format!("{}: {nps} NP, {vps} VP", ex.example_id),
        )?;
        check(
            ex.parts.iter().all(|p| (2..=4).contains(&p.words.len())),
            format!("{}: part outside 2-4 words", ex.example_id),
        )?;
        let total: usize = ex.parts.iter().map(|p| p.words.len()).sum();
        check(
            (8..=16).contains(&total),
            format!("{}: {total} words", ex.example_id),
        )?;
        check(
            ex.text.split_whitespace().count() == total,
            format!("{}: rendered text word count differs", ex.example_id),
        )?;
    }
    Ok(format!(
        "{} examples, 2 NP + 2 VP, parts 2-4 words, totals 8-16",
        release.len()
    ))
}

fn brute_k(release: &[AssembledExample], corpus: &Corpus) -> Vec<usize> {
    let texts = doc_texts(corpus);
    release
        .iter()
        .flat_map(|e| &e.parts)
        .map(|p| brute_docs_in(&texts, &p.words).len())
        .collect()
}

fn rare_filter() -> Outcome {
    let corpus = synthetic(200, 0.10, 42);
    let cfg = AssemblyConfig::default();

    let release = assemble_with(&corpus, 3, &cfg).examples;
    let report = k_anonymity(&release, &corpus).map_err(|e| e.to_string())?;
    let ks = brute_k(&release, &corpus);
    let brute_min = *ks.iter().min().unwrap();
    check(
        report.min_k == brute_min,
        format!("min_k {} but brute force {brute_min}", report.min_k),
    )?;
    check(
        report.min_k >= 3 && report.pct_k1 == 0.0,
        format!("k=3: min_k {} pct_k1 {}", report.min_k, report.pct_k1),
    )?;

    let pool = pool_for(&corpus, 1);
    let unique = pool
        .fragments()
        .iter()
        .filter(|f| pool.doc_freq_of(f) == 1)
        .count();
    check(unique > 0, "corpus has no unique phrases")?;
    let release1 = assemble_with(&corpus, 1, &cfg).examples;
    let report1 = k_anonymity(&release1, &corpus).map_err(|e| e.to_string())?;
    let ks1 = brute_k(&release1, &corpus);
    let brute_pct = 100.0 * ks1.iter().filter(|&&k| k == 1).count() as f64 / ks1.len() as f64;
    check(
        (report1.pct_k1 - brute_pct).abs() < 1e-9,
        format!("pct_k1 {} but brute force {brute_pct}", report1.pct_k1),
    )?;
    check(report1.pct_k1 > 0.0, "k=1: pct_k1 is 0")?;
    Ok(format!(
        "k=3: min_k {} pct_k1 0; k=1: pct_k1 {:.2}% ({unique} unique phrases); brute force agrees",
        report.min_k, report1.pct_k1
    ))
}

fn identifier_reduction() -> Outcome {
    let cfg =
        PipelineConfig::load(&root().join("configs/synthetic.toml")).map_err(|e| e.to_string())?;
    let corpus = generate_synthetic(&cfg.synth_spec().map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let (train, _) = split(&corpus, &cfg.split_spec()).map_err(|e| e.to_string())?;
    let release = assemble_with(
        &train,
        cfg.chunk.min_doc_freq,
        &cfg.assembly_config().unwrap(),
    )
    .examples;
    let lexicon: IdentifierLexicon = cfg.lexicon().map_err(|e| e.to_string())?;
    let report = audit_reduction(&train, &release, &lexicon).map_err(|e| e.to_string())?;
    for row in &report.categories {
        check(
            row.frag_pct <= row.full_pct,
            format!(
                "{}: frag {:.4}% > full {:.4}%",
                row.category, row.frag_pct, row.full_pct
            ),
        )?;
    }
    let all = &report.all;
    check(all.full_pct > 0.0, "no identifiers in the full corpus")?;
    check(
        all.full_pct >= 1.5 * all.frag_pct,
        format!("total {:.4}% -> {:.4}%", all.full_pct, all.frag_pct),
    )?;
    let factor = all
        .reduction
        .map_or("inf".to_string(), |r| format!("{r:.2}x"));
    Ok(format!(
        "total {:.4}% -> {:.4}% ({factor}); every category frag <= full",
        all.full_pct, all.frag_pct
    ))
}

fn run_all(out: &Path, extra: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_fragmix"))
        .env("RUST_LOG", "warn")
        .arg("--config")
        .arg(root().join("configs/synthetic.toml"))
        .arg("--output-dir")
        .arg(out)
        .args(extra)
        .arg("run-all")
        .output()
        .map_err(|e| e.to_string())?;
    check(
        o.status.success(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

const COMPARED: [&str; 5] = [
    "release.jsonl",
    "audit.json",
    "audit.txt",
    "stats.json",
    "stats.txt",
];

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_all(&a, &[])?;
    run_all(&b, &[])?;
    for name in COMPARED {
        let ha = sha256_hex(&std::fs::read(a.join(name)).map_err(|e| e.to_string())?);
        let hb = sha256_hex(&std::fs::read(b.join(name)).map_err(|e| e.to_string())?);
        check(ha == hb, format!("{name} differs"))?;
    }
    Ok(format!(
        "{} artifacts hash-equal across two runs",
        COMPARED.len()
    ))
}

fn privacy_gate() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_all(tmp.path(), &[])?;
    let release =
        std::fs::read_to_string(tmp.path().join("release.jsonl")).map_err(|e| e.to_string())?;
    let corpus = read_jsonl(
        &std::fs::read_to_string(tmp.path().join("corpus.jsonl")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    check(!release.is_empty(), "empty release")?;
    let leaked: Vec<&str> = corpus
        .documents()
        .iter()
        .map(|d| d.doc_id.as_str())
        .filter(|id| release.contains(id))
        .collect();
    if let Some(first) = leaked.first() {
        return Err(format!(
            "release contains {} doc ids, e.g. {first}",
            leaked.len()
        ));
    }
    check(!release.contains("doc_id"), "release has a doc_id field")?;

    // the internal file keeps provenance, so the search would find ids there
    let internal =
        std::fs::read_to_string(tmp.path().join("examples.jsonl")).map_err(|e| e.to_string())?;
    check(
        corpus
            .documents()
            .iter()
            .any(|d| internal.contains(&d.doc_id)),
        "search cannot detect ids",
    )?;
    Ok(format!(
        "0 of {} source doc ids found in release",
        corpus.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("extraction oracle", extraction_oracle),
        ("non-colocation", non_colocation),
        ("split preservation", split_preservation),
        ("structure bounds", structure_bounds),
        ("rare-filter guarantee", rare_filter),
        ("identifier reduction", identifier_reduction),
        ("determinism", determinism),
        ("privacy gate", privacy_gate),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
