use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fragmix::assembler::assemble;
use fragmix::audit::{audit_reduction, exposure, k_anonymity, IdentifierLexicon};
use fragmix::chunker::{build_pool, extract, filter_rare};
use fragmix::cli::stages::{sha256_hex, AuditBundle};
use fragmix::cli::PipelineConfig;
use fragmix::corpus::{generate_synthetic, read_jsonl};
use fragmix::dataset::{read_release, split, write_release};
use serde_json::Value;

fn shipped_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/synthetic.toml")
}

fn fragmix(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fragmix"))
        .env("RUST_LOG", "warn")
        .arg("--config")
        .arg(shipped_config())
        .arg("--output-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("run fragmix")
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn error_json(o: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&o.stderr);
    let line = stderr.lines().last().expect("error line");
    serde_json::from_str(line).expect("one-line JSON error")
}

#[test]
fn assemble_before_extract_names_missing_pool() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fragmix(&["ingest"], dir.path()));
    let o = fragmix(&["assemble"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let err = error_json(&o);
    assert_eq!(err["error"], "missing_artifact");
    let msg = err["message"].as_str().unwrap();
    assert!(msg.contains("missing fragment pool artifact"), "{msg}");
    assert!(msg.contains("`extract`"), "{msg}");
}

#[test]
fn config_violation_fails_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = fragmix(&["--min-doc-freq", "0", "run-all"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "config");
    assert!(!out.exists());

    let o = fragmix(&["--order", "NP,VP,VP,VP", "run-all"], &out);
    assert_eq!(o.status.code(), Some(2));
    let o = fragmix(
        &[
            "--format",
            "bracketed",
            "--input",
            "/nonexistent/x.txt",
            "ingest",
        ],
        &out,
    );
    assert_eq!(o.status.code(), Some(2));
    let o = fragmix(&["--bogus", "run-all"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unreadable_input_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "#doc a case\n(S (NP (DT the)\n").unwrap();
    let o = fragmix(
        &[
            "--format",
            "bracketed",
            "--input",
            input.to_str().unwrap(),
            "ingest",
        ],
        &dir.path().join("o"),
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"], "parse");
}

#[test]
fn run_all_writes_artifacts_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fragmix(&["run-all"], dir.path()));
    let manifest: Vec<Value> = read(dir.path(), "manifest.jsonl")
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let stages: Vec<&str> = manifest
        .iter()
        .map(|m| m["stage"].as_str().unwrap())
        .collect();
    assert_eq!(stages, ["ingest", "extract", "assemble", "audit", "stats"]);
    for m in &manifest {
        assert_eq!(m["seed"], 42);
        assert_eq!(m["tool_version"], fragmix::VERSION);
        assert_eq!(m["config_hash"], manifest[0]["config_hash"]);
        for (name, hash) in m["outputs"].as_object().unwrap() {
            let bytes = std::fs::read(dir.path().join(name)).unwrap();
            assert_eq!(hash.as_str().unwrap(), sha256_hex(&bytes), "{name}");
        }
    }
    // stage inputs are earlier stage outputs
    assert_eq!(
        manifest[1]["inputs"]["train.jsonl"],
        manifest[0]["outputs"]["train.jsonl"]
    );
    assert_eq!(
        manifest[2]["inputs"]["pool.jsonl"],
        manifest[1]["outputs"]["pool.jsonl"]
    );

    // a second run starts a fresh manifest
    ok(&fragmix(&["run-all"], dir.path()));
    assert_eq!(read(dir.path(), "manifest.jsonl").lines().count(), 5);
}

#[test]
fn manifest_config_reproduces_a_stage() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fragmix(&["--seed", "7", "run-all"], dir.path()));
    let first: Value =
        serde_json::from_str(read(dir.path(), "manifest.jsonl").lines().nth(2).unwrap()).unwrap();
    assert_eq!(first["seed"], 7);
    let cfg: PipelineConfig = serde_json::from_value(first["config"].clone()).unwrap();
    let toml_path = dir.path().join("replay.toml");
    std::fs::write(&toml_path, toml::to_string(&cfg).unwrap()).unwrap();
    let release = read(dir.path(), "release.jsonl");
    std::fs::remove_file(dir.path().join("release.jsonl")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fragmix"))
        .env("RUST_LOG", "warn")
        .args(["--config", toml_path.to_str().unwrap(), "assemble"])
        .output()
        .unwrap();
    ok(&o);
    assert_eq!(read(dir.path(), "release.jsonl"), release);
}

#[test]
fn stagewise_equals_run_all() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ok(&fragmix(&["run-all"], a.path()));
    for stage in ["ingest", "extract", "assemble", "audit", "stats"] {
        ok(&fragmix(&[stage], b.path()));
    }
    for name in [
        "train.jsonl",
        "pool.jsonl",
        "release.jsonl",
        "audit.json",
        "audit.txt",
        "stats.json",
    ] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn cli_release_equals_library_release() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fragmix(&["run-all"], dir.path()));

    let cfg = PipelineConfig::load(&shipped_config()).unwrap();
    let corpus = generate_synthetic(&cfg.synth_spec().unwrap()).unwrap();
    let (train, _) = split(&corpus, &cfg.split_spec()).unwrap();
    let bounds = cfg.bounds().unwrap();
    let frags = train
        .documents()
        .iter()
        .flat_map(|d| extract(d, bounds).unwrap())
        .collect();
    let pool = filter_rare(&build_pool(&train, frags).unwrap(), cfg.chunk.min_doc_freq).unwrap();
    let asm = assemble(&pool, &train, &cfg.assembly_config().unwrap()).unwrap();
    let mut release = Vec::new();
    write_release(&asm.examples, &mut release, false).unwrap();
    assert_eq!(read(dir.path(), "release.jsonl").as_bytes(), &release[..]);
}

#[test]
fn cli_audit_equals_library_audit() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fragmix(&["run-all"], dir.path()));
    let train = read_jsonl(&read(dir.path(), "train.jsonl")).unwrap();
    let examples = read_release(&read(dir.path(), "examples.jsonl")).unwrap();
    let lexicon =
        IdentifierLexicon::from_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("lexicons"))
            .unwrap();
    let bundle = AuditBundle {
        identifiers: audit_reduction(&train, &examples, &lexicon).unwrap(),
        linkage: k_anonymity(&examples, &train).unwrap(),
        exposure: exposure(&examples, &lexicon).unwrap(),
    };
    let mut lib = serde_json::to_string_pretty(&bundle).unwrap();
    lib.push('\n');
    assert_eq!(read(dir.path(), "audit.json"), lib);
    assert_eq!(
        read(dir.path(), "audit.txt"),
        fragmix::cli::stages::render_audit(&bundle)
    );
}

#[test]
fn bracketed_file_input_matches_synthetic_source() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_file = dir.path().join("corpus.txt");
    ok(&fragmix(
        &[
            "synth",
            "--out",
            corpus_file.to_str().unwrap(),
            "--as",
            "bracketed",
        ],
        &dir.path().join("x"),
    ));
    let from_file = dir.path().join("file");
    let from_synth = dir.path().join("synth");
    ok(&fragmix(
        &[
            "--format",
            "bracketed",
            "--input",
            corpus_file.to_str().unwrap(),
            "run-all",
        ],
        &from_file,
    ));
    ok(&fragmix(&["run-all"], &from_synth));
    assert_eq!(
        read(&from_file, "release.jsonl"),
        read(&from_synth, "release.jsonl")
    );
}

#[test]
fn tagged_input_runs_through_shallow_chunker() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_file = dir.path().join("corpus.tagged");
    ok(&fragmix(
        &[
            "synth",
            "--out",
            corpus_file.to_str().unwrap(),
            "--as",
            "tagged",
        ],
        &dir.path().join("x"),
    ));
    let out = dir.path().join("out");
    ok(&fragmix(
        &[
            "--format",
            "tagged",
            "--input",
            corpus_file.to_str().unwrap(),
            "run-all",
        ],
        &out,
    ));
    let stats: Value = serde_json::from_str(&read(&out, "stats.json")).unwrap();
    assert!(stats["n_examples"].as_u64().unwrap() > 0);
}

#[test]
fn provenance_flag_controls_release_fields() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fragmix(&["--with-provenance", "run-all"], dir.path()));
    let line = read(dir.path(), "release.jsonl");
    let first: Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(first["parts"].as_array().unwrap().len(), 4);
    assert!(first["parts"][0]["doc_id"]
        .as_str()
        .unwrap()
        .starts_with("doc-"));
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_fragmix"))
        .arg("--help")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("run-all"));
}
