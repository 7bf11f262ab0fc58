//! Corpus fragmentation for privacy-safer text sharing.
//!
//! Sensitive labeled documents are cut into short NP and VP constituents,
//! rare constituents are dropped, and the rest are recombined into synthetic
//! training examples whose four parts always come from four different source
//! documents of the same label. The audit module measures how many identifier
//! words survive and how easily released parts link back to a source document.
//!
//! Pipeline: [`corpus`] → [`dataset::split`] → [`chunker`] →
//! [`chunker::filter_rare`] → [`assembler::assemble`] →
//! [`dataset::emit_release`] → [`audit`] → [`dataset::stats`].

pub mod assembler;
pub mod audit;
pub mod chunker;
pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod index;
pub mod seed;

pub use error::{Error, Result};

/// Tool version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
