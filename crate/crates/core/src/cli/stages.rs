//! Pipeline stages. Each stage reads its inputs from the output directory,
//! writes its artifacts there and appends one line to `manifest.jsonl`.
//!
//! | stage    | reads                          | writes                                 |
//! |----------|--------------------------------|----------------------------------------|
//! | ingest   | input files or `[synthetic]`   | corpus.jsonl, train.jsonl, test.jsonl  |
//! | extract  | train.jsonl                    | pool.jsonl                             |
//! | assemble | train.jsonl, pool.jsonl        | examples.jsonl, release.jsonl          |
//! | audit    | train.jsonl, examples.jsonl    | audit.json, audit.txt                  |
//! | stats    | train.jsonl, examples.jsonl    | stats.json, stats.txt                  |
//!
//! `examples.jsonl` always carries provenance and stays internal. `release.jsonl`
//! is the shareable file and carries provenance only with `--with-provenance`.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{InputFormat, PipelineConfig};
use crate::assembler::{assemble, AssembledExample};
use crate::audit::{
    audit_reduction, exposure, k_anonymity, render_exposure_table, render_identifier_table,
    render_linkage_table, AuditReport, ExposureReport, LinkageReport,
};
use crate::chunker::{build_pool, extract, filter_rare, read_fragment_dump, write_fragment_dump};
use crate::corpus::{
    generate_synthetic, parse_bracketed, parse_tagged, read_jsonl, write_jsonl, Corpus,
};
use crate::dataset::{read_release, render_stats_table, split, stats, write_release};
use crate::error::{Error, Result};

pub const CORPUS: &str = "corpus.jsonl";
pub const TRAIN: &str = "train.jsonl";
pub const TEST: &str = "test.jsonl";
pub const POOL: &str = "pool.jsonl";
pub const EXAMPLES: &str = "examples.jsonl";
pub const RELEASE: &str = "release.jsonl";
pub const AUDIT_JSON: &str = "audit.json";
pub const AUDIT_TXT: &str = "audit.txt";
pub const STATS_JSON: &str = "stats.json";
pub const STATS_TXT: &str = "stats.txt";
pub const MANIFEST: &str = "manifest.jsonl";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON form of a resolved config.
pub fn config_hash(cfg: &PipelineConfig) -> String {
    sha256_hex(&serde_json::to_vec(cfg).expect("config serializes"))
}

#[derive(Debug, Serialize)]
pub struct ManifestEntry<'a> {
    pub stage: &'a str,
    pub tool_version: &'a str,
    pub seed: u64,
    pub config_hash: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub details: Value,
    pub config: &'a PipelineConfig,
}

/// Bookkeeping for one stage run.
struct StageRun<'a> {
    cfg: &'a PipelineConfig,
    stage: &'static str,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl<'a> StageRun<'a> {
    fn new(cfg: &'a PipelineConfig, stage: &'static str) -> Self {
        StageRun {
            cfg,
            stage,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    fn out_path(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn read_input(&mut self, path: &Path, key: String) -> Result<String> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        self.inputs.insert(key, sha256_hex(&bytes));
        String::from_utf8(bytes)
            .map_err(|e| Error::Validation(format!("{} is not UTF-8: {e}", path.display())))
    }

    /// Reads an artifact produced by an earlier stage.
    fn read_artifact(
        &mut self,
        name: &str,
        artifact: &'static str,
        producer: &'static str,
    ) -> Result<String> {
        let path = self.out_path(name);
        if !path.is_file() {
            return Err(Error::MissingArtifact {
                artifact,
                path,
                stage: producer,
            });
        }
        self.read_input(&path, name.to_string())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let dir = &self.cfg.output_dir;
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = self.out_path(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn finish(self, details: Value) -> Result<()> {
        let entry = ManifestEntry {
            stage: self.stage,
            tool_version: crate::VERSION,
            seed: self.cfg.seed,
            config_hash: config_hash(self.cfg),
            inputs: self.inputs,
            outputs: self.outputs,
            details,
            config: self.cfg,
        };
        let path = self.cfg.output_dir.join(MANIFEST);
        let mut line = serde_json::to_vec(&entry).expect("manifest serializes");
        line.push(b'\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        f.write_all(&line).map_err(|e| Error::io(&path, e))?;
        log::info!("{} done", self.stage);
        Ok(())
    }
}

fn corpus_bytes(corpus: &Corpus) -> Vec<u8> {
    let mut buf = Vec::new();
    write_jsonl(corpus, &mut buf).expect("writing to memory");
    buf
}

fn read_train(run: &mut StageRun) -> Result<Corpus> {
    read_jsonl(&run.read_artifact(TRAIN, "training corpus", "ingest")?)
}

fn read_examples(run: &mut StageRun) -> Result<Vec<AssembledExample>> {
    read_release(&run.read_artifact(EXAMPLES, "assembled examples", "assemble")?)
}

/// Loads the configured input as one corpus.
pub fn load_input(cfg: &PipelineConfig) -> Result<Corpus> {
    let mut run = StageRun::new(cfg, "ingest");
    load_into(cfg, &mut run)
}

fn load_into(cfg: &PipelineConfig, run: &mut StageRun) -> Result<Corpus> {
    cfg.validate_inputs()?;
    let parse = match cfg.input.format {
        InputFormat::Synthetic => return generate_synthetic(&cfg.synth_spec()?),
        InputFormat::Bracketed => parse_bracketed,
        InputFormat::Tagged => parse_tagged,
        InputFormat::Jsonl => read_jsonl,
    };
    let mut docs = Vec::new();
    for path in &cfg.input.paths {
        let text = run.read_input(path, path.display().to_string())?;
        let part = parse(&text).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        })?;
        docs.extend(part.into_documents());
    }
    Corpus::new(docs)
}

pub fn ingest(cfg: &PipelineConfig) -> Result<()> {
    let mut run = StageRun::new(cfg, "ingest");
    let corpus = load_into(cfg, &mut run)?;
    let (train, test) = split(&corpus, &cfg.split_spec())?;
    run.write(CORPUS, &corpus_bytes(&corpus))?;
    run.write(TRAIN, &corpus_bytes(&train))?;
    run.write(TEST, &corpus_bytes(&test))?;
    let counts = |c: &Corpus| -> BTreeMap<String, usize> {
        c.label_counts()
            .iter()
            .map(|(l, n)| (crate::corpus::label_name(*l).to_string(), *n))
            .collect()
    };
    run.finish(json!({
        "documents": corpus.len(),
        "train": counts(&train),
        "test": counts(&test),
    }))
}

pub fn extract_stage(cfg: &PipelineConfig) -> Result<()> {
    let mut run = StageRun::new(cfg, "extract");
    let train = read_train(&mut run)?;
    let bounds = cfg.bounds()?;
    let mut fragments = Vec::new();
    for doc in train.documents() {
        fragments.extend(extract(doc, bounds)?);
    }
    let pool = build_pool(&train, fragments)?;
    let filtered = filter_rare(&pool, cfg.chunk.min_doc_freq)?;
    let mut buf = Vec::new();
    write_fragment_dump(&filtered, &mut buf).expect("writing to memory");
    run.write(POOL, &buf)?;
    run.finish(json!({
        "fragments_extracted": pool.len(),
        "fragments_kept": filtered.len(),
        "min_doc_freq": cfg.chunk.min_doc_freq,
    }))
}

pub fn assemble_stage(cfg: &PipelineConfig) -> Result<()> {
    let mut run = StageRun::new(cfg, "assemble");
    let pool_text = run.read_artifact(POOL, "fragment pool", "extract")?;
    let train = read_train(&mut run)?;
    let pool = read_fragment_dump(&train, &pool_text)?;
    let assembly = assemble(&pool, &train, &cfg.assembly_config()?)?;
    if assembly.examples.is_empty() {
        log::warn!("assembly produced no examples");
    }
    let mut internal = Vec::new();
    write_release(&assembly.examples, &mut internal, true)?;
    run.write(EXAMPLES, &internal)?;
    let mut release = Vec::new();
    write_release(&assembly.examples, &mut release, cfg.with_provenance)?;
    run.write(RELEASE, &release)?;
    run.finish(json!({
        "examples": assembly.examples.len(),
        "skipped": assembly.skipped(),
        "per_label": assembly.per_label,
        "with_provenance": cfg.with_provenance,
    }))
}

/// Everything the audit stage reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditBundle {
    pub identifiers: AuditReport,
    pub linkage: LinkageReport,
    pub exposure: ExposureReport,
}

pub fn render_audit(bundle: &AuditBundle) -> String {
    format!(
        "Identifiers (% of total words)\n\n{}\nLinkage against the source corpus\n\n{}\nPart exposure\n\n{}",
        render_identifier_table(&bundle.identifiers),
        render_linkage_table(&bundle.linkage),
        render_exposure_table(&bundle.exposure),
    )
}

pub fn audit_stage(cfg: &PipelineConfig) -> Result<()> {
    let mut run = StageRun::new(cfg, "audit");
    let examples = read_examples(&mut run)?;
    let train = read_train(&mut run)?;
    let lexicon = cfg.lexicon()?;
    let bundle = AuditBundle {
        identifiers: audit_reduction(&train, &examples, &lexicon)?,
        linkage: k_anonymity(&examples, &train)?,
        exposure: exposure(&examples, &lexicon)?,
    };
    let mut json = serde_json::to_vec_pretty(&bundle).expect("audit serializes");
    json.push(b'\n');
    run.write(AUDIT_JSON, &json)?;
    run.write(AUDIT_TXT, render_audit(&bundle).as_bytes())?;
    run.finish(json!({
        "all_reduction": bundle.identifiers.all.reduction,
        "min_k": bundle.linkage.min_k,
        "pct_k1": bundle.linkage.pct_k1,
    }))
}

pub fn stats_stage(cfg: &PipelineConfig) -> Result<()> {
    let mut run = StageRun::new(cfg, "stats");
    let examples = read_examples(&mut run)?;
    let train = read_train(&mut run)?;
    let s = stats(&examples, &train)?;
    let mut json = serde_json::to_vec_pretty(&s).expect("stats serialize");
    json.push(b'\n');
    run.write(STATS_JSON, &json)?;
    run.write(STATS_TXT, render_stats_table(&s).as_bytes())?;
    run.finish(json!({ "examples": s.n_examples }))
}

/// ingest → extract → assemble → audit → stats, starting a fresh manifest.
pub fn run_all(cfg: &PipelineConfig) -> Result<()> {
    cfg.validate_inputs()?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = dir.join(MANIFEST);
    std::fs::write(&manifest, b"").map_err(|e| Error::io(&manifest, e))?;
    ingest(cfg)?;
    extract_stage(cfg)?;
    assemble_stage(cfg)?;
    audit_stage(cfg)?;
    stats_stage(cfg)
}
