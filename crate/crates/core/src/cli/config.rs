use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::assembler::{AssemblyConfig, Reuse};
use crate::audit::IdentifierLexicon;
use crate::chunker::{ChunkKind, LengthBounds};
use crate::corpus::{SynthSpec, MAX_PLANT_RATE};
use crate::dataset::SplitSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Bracketed,
    Tagged,
    Jsonl,
    /// Generate the corpus from the `[synthetic]` section instead of reading files.
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub format: InputFormat,
    pub paths: Vec<PathBuf>,
}

impl Default for InputSection {
    fn default() -> Self {
        InputSection {
            format: InputFormat::Synthetic,
            paths: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSection {
    pub n_docs: usize,
    pub case_fraction: f64,
    pub sentences_per_doc: [usize; 2],
    pub plant_rates: BTreeMap<String, f64>,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        let d = SynthSpec::default();
        SyntheticSection {
            n_docs: d.n_docs,
            case_fraction: d.case_fraction,
            sentences_per_doc: [d.sentences_per_doc.0, d.sentences_per_doc.1],
            plant_rates: d.plant_rates,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChunkSection {
    pub min_len: usize,
    pub max_len: usize,
    pub min_doc_freq: usize,
}

impl Default for ChunkSection {
    fn default() -> Self {
        let b = LengthBounds::default();
        ChunkSection {
            min_len: b.min_len,
            max_len: b.max_len,
            min_doc_freq: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssemblySection {
    pub order: Vec<ChunkKind>,
    pub target_ratio: f64,
    pub reuse: Reuse,
    pub separator: String,
    pub max_redraws: usize,
}

impl Default for AssemblySection {
    fn default() -> Self {
        let d = AssemblyConfig::default();
        AssemblySection {
            order: d.order.to_vec(),
            target_ratio: d.target_ratio,
            reuse: d.reuse,
            separator: d.separator,
            max_redraws: d.max_redraws,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub test_fraction: f64,
    pub stratify: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitSpec::default();
        SplitSection {
            test_fraction: d.test_fraction,
            stratify: d.stratify,
        }
    }
}

/// Everything a pipeline run depends on. One seed drives every stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Directory of `<category>.txt` word lists; the built-in lists when unset.
    pub lexicon_dir: Option<PathBuf>,
    pub with_provenance: bool,
    pub input: InputSection,
    pub synthetic: SyntheticSection,
    pub chunk: ChunkSection,
    pub assembly: AssemblySection,
    pub split: SplitSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            output_dir: PathBuf::from("fragmix-out"),
            lexicon_dir: None,
            with_provenance: false,
            input: InputSection::default(),
            synthetic: SyntheticSection::default(),
            chunk: ChunkSection::default(),
            assembly: AssemblySection::default(),
            split: SplitSection::default(),
        }
    }
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    /// Reads a TOML config. Relative paths inside it are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        rebase(base, &mut cfg.output_dir);
        if let Some(dir) = cfg.lexicon_dir.as_mut() {
            rebase(base, dir);
        }
        for p in &mut cfg.input.paths {
            rebase(base, p);
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    /// Checks every setting before any stage runs.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| match e {
            Error::Validation(msg) => Error::Config(msg),
            other => other,
        };
        self.bounds().map_err(cfg_err)?;
        if self.chunk.min_doc_freq == 0 {
            return Err(Error::Config(
                "chunk.min_doc_freq must be at least 1".into(),
            ));
        }
        self.assembly_config()?.validate().map_err(cfg_err)?;
        if self.assembly.separator.is_empty() {
            return Err(Error::Config("assembly.separator must not be empty".into()));
        }
        let tf = self.split.test_fraction;
        if !(tf > 0.0 && tf < 1.0) {
            return Err(Error::Config(format!(
                "split.test_fraction must be in (0, 1), got {tf}"
            )));
        }
        if let Some(dir) = &self.lexicon_dir {
            if !dir.is_dir() {
                return Err(Error::Config(format!(
                    "lexicon_dir {} is not a directory",
                    dir.display()
                )));
            }
        }
        match self.input.format {
            InputFormat::Synthetic => self.validate_synthetic(),
            _ => Ok(()),
        }
    }

    fn validate_synthetic(&self) -> Result<()> {
        let s = &self.synthetic;
        if s.n_docs == 0 {
            return Err(Error::Config("synthetic.n_docs must be positive".into()));
        }
        if !(0.0..=1.0).contains(&s.case_fraction) {
            return Err(Error::Config(format!(
                "synthetic.case_fraction must be in [0, 1], got {}",
                s.case_fraction
            )));
        }
        let [lo, hi] = s.sentences_per_doc;
        if lo == 0 || lo > hi {
            return Err(Error::Config(format!(
                "synthetic.sentences_per_doc must satisfy 1 <= min <= max, got [{lo}, {hi}]"
            )));
        }
        for (cat, &rate) in &s.plant_rates {
            if !(0.0..=MAX_PLANT_RATE).contains(&rate) {
                return Err(Error::Config(format!(
                    "synthetic.plant_rates.{cat} must be in [0, {MAX_PLANT_RATE}], got {rate}"
                )));
            }
        }
        Ok(())
    }

    /// Input files must exist when a stage is about to read them.
    pub fn validate_inputs(&self) -> Result<()> {
        if self.input.format == InputFormat::Synthetic {
            return Ok(());
        }
        if self.input.paths.is_empty() {
            return Err(Error::Config(format!(
                "input.paths is empty for format `{}`",
                self.input.format.to_possible_value().unwrap().get_name()
            )));
        }
        for p in &self.input.paths {
            if !p.is_file() {
                return Err(Error::Config(format!(
                    "input file {} does not exist",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    pub fn bounds(&self) -> Result<LengthBounds> {
        LengthBounds::new(self.chunk.min_len, self.chunk.max_len)
    }

    pub fn assembly_config(&self) -> Result<AssemblyConfig> {
        let order: [ChunkKind; 4] =
            self.assembly
                .order
                .clone()
                .try_into()
                .map_err(|o: Vec<_>| {
                    Error::Config(format!(
                        "assembly.order needs exactly four parts, got {}",
                        o.len()
                    ))
                })?;
        Ok(AssemblyConfig {
            seed: self.seed,
            order,
            target_ratio: self.assembly.target_ratio,
            reuse: self.assembly.reuse,
            separator: self.assembly.separator.clone(),
            max_redraws: self.assembly.max_redraws,
        })
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            test_fraction: self.split.test_fraction,
            seed: self.seed,
            stratify: self.split.stratify,
        }
    }

    pub fn lexicon(&self) -> Result<IdentifierLexicon> {
        match &self.lexicon_dir {
            Some(dir) => IdentifierLexicon::from_dir(dir),
            None => Ok(IdentifierLexicon::builtin()),
        }
    }

    pub fn synth_spec(&self) -> Result<SynthSpec> {
        let s = &self.synthetic;
        Ok(SynthSpec {
            n_docs: s.n_docs,
            case_fraction: s.case_fraction,
            sentences_per_doc: (s.sentences_per_doc[0], s.sentences_per_doc[1]),
            plant_rates: s.plant_rates.clone(),
            lexicon: self.lexicon()?,
            seed: self.seed,
        })
    }
}
