//! Command-line front end. Settings come from an optional TOML file; any flag
//! given on the command line overrides the file.

mod config;
pub mod stages;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{
    AssemblySection, ChunkSection, InputFormat, InputSection, PipelineConfig, SplitSection,
    SyntheticSection,
};

use crate::chunker::ChunkKind;
use crate::corpus::{generate_synthetic, write_bracketed, write_jsonl};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "fragmix",
    version,
    about = "Fragment labeled documents into recombined training examples"
)]
struct Cli {
    /// TOML pipeline config.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic corpus built from the `[synthetic]` settings.
    Synth {
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long = "as", value_enum, default_value = "jsonl")]
        write_as: WriteFormat,
    },
    /// Read the input corpus and split it into train and test.
    Ingest,
    /// Extract NP/VP fragments from the training split and drop rare ones.
    Extract,
    /// Combine fragments into examples and write the release.
    Assemble,
    /// Identifier, linkage and exposure audit of the assembled examples.
    Audit,
    /// Release statistics.
    Stats,
    /// Run every stage in order with a fresh manifest.
    #[command(alias = "run_all")]
    RunAll,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WriteFormat {
    Jsonl,
    Bracketed,
    Tagged,
}

/// Flags that override config file values.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub min_doc_freq: Option<usize>,
    #[arg(long, global = true)]
    pub min_len: Option<usize>,
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    #[arg(long, global = true)]
    pub target_ratio: Option<f64>,
    /// Part order, e.g. `NP,NP,VP,VP`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub order: Option<Vec<String>>,
    /// Keep source doc ids and spans in release.jsonl.
    #[arg(long, global = true)]
    pub with_provenance: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<InputFormat>,
    /// Input file; repeat for several.
    #[arg(long = "input", global = true, value_name = "FILE")]
    pub inputs: Vec<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub lexicon_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut PipelineConfig) -> Result<()> {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.min_doc_freq {
            cfg.chunk.min_doc_freq = v;
        }
        if let Some(v) = self.min_len {
            cfg.chunk.min_len = v;
        }
        if let Some(v) = self.max_len {
            cfg.chunk.max_len = v;
        }
        if let Some(v) = self.target_ratio {
            cfg.assembly.target_ratio = v;
        }
        if let Some(order) = &self.order {
            cfg.assembly.order = order
                .iter()
                .map(|s| s.trim().parse::<ChunkKind>())
                .collect::<Result<_>>()
                .map_err(|e| Error::Config(format!("--order: {e}")))?;
        }
        if self.with_provenance {
            cfg.with_provenance = true;
        }
        if let Some(f) = self.format {
            cfg.input.format = f;
        }
        if !self.inputs.is_empty() {
            cfg.input.paths = self.inputs.clone();
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.clone();
        }
        if let Some(d) = &self.lexicon_dir {
            cfg.lexicon_dir = Some(d.clone());
        }
        Ok(())
    }
}

fn resolve(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    cli.overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Synth { out, write_as } => {
            let corpus = generate_synthetic(&cfg.synth_spec()?)?;
            let mut buf = Vec::new();
            match write_as {
                WriteFormat::Jsonl => {
                    write_jsonl(&corpus, &mut buf).map_err(|e| Error::io(out, e))?
                }
                WriteFormat::Bracketed => write_bracketed(&corpus, &mut buf)?,
                WriteFormat::Tagged => crate::corpus::write_tagged(&corpus, &mut buf)?,
            }
            std::fs::write(out, buf).map_err(|e| Error::io(out, e))
        }
        Command::Ingest => stages::ingest(&cfg),
        Command::Extract => stages::extract_stage(&cfg),
        Command::Assemble => stages::assemble_stage(&cfg),
        Command::Audit => stages::audit_stage(&cfg),
        Command::Stats => stages::stats_stage(&cfg),
        Command::RunAll => stages::run_all(&cfg),
    }
}

/// One-line JSON error for stderr.
pub fn error_line(err: &Error) -> String {
    serde_json::json!({
        "error": err.kind(),
        "exit_code": err.exit_code(),
        "message": err.to_string(),
    })
    .to_string()
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)
        .map_err(|e| Error::Config(e.to_string().trim().replace('\n', " ")))?;
    dispatch(&cli)
}

/// Process entry point; returns the exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = Error::Config(e.to_string().trim().replace('\n', " "));
            eprintln!("{}", error_line(&err));
            return err.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", error_line(&err));
            err.exit_code()
        }
    }
}
