//! C ABI for fragmix.
//!
//! Objects are opaque handles created by `fragmix_*` constructors and released
//! with the matching `*_free` function. Every fallible call returns a status
//! code (`FRAGMIX_OK` on success) and writes its result through an out pointer.
//! After a failure, `fragmix_last_error()` describes it; the message belongs
//! to the calling thread and stays valid until that thread's next call.
//! Handles are not synchronized; share one across threads only with external
//! locking.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fragmix::assembler::{assemble, AssembledExample, AssemblyConfig};
use fragmix::audit::k_anonymity;
use fragmix::chunker::{build_pool, extract, filter_rare, FragmentPool, LengthBounds};
use fragmix::corpus::{
    generate_synthetic, parse_bracketed, parse_tagged, read_jsonl, Corpus, SynthSpec,
};
use fragmix::dataset::write_release;
use fragmix::Error;

pub const FRAGMIX_OK: i32 = 0;
/// A required pointer argument was null.
pub const FRAGMIX_ERR_NULL: i32 = 1;
/// A string argument was not valid UTF-8.
pub const FRAGMIX_ERR_UTF8: i32 = 2;
pub const FRAGMIX_ERR_PARSE: i32 = 3;
pub const FRAGMIX_ERR_VALIDATION: i32 = 4;
/// Input lacks trees or POS tags, or a label has too few fragments.
pub const FRAGMIX_ERR_DATA: i32 = 5;
pub const FRAGMIX_ERR_CONFIG: i32 = 6;
pub const FRAGMIX_ERR_IO: i32 = 7;
/// An internal panic was caught at the boundary.
pub const FRAGMIX_ERR_PANIC: i32 = 99;

pub const FRAGMIX_FORMAT_BRACKETED: i32 = 0;
pub const FRAGMIX_FORMAT_TAGGED: i32 = 1;
pub const FRAGMIX_FORMAT_JSONL: i32 = 2;

/// A parsed or generated corpus.
pub struct FragmixCorpus(Corpus);

/// A rare-filtered fragment pool built from one corpus.
pub struct FragmixPool(FragmentPool);

/// Assembled examples.
pub struct FragmixRelease(Vec<AssembledExample>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } => FRAGMIX_ERR_PARSE,
            Error::Validation(_) => FRAGMIX_ERR_VALIDATION,
            Error::MissingTrees { .. }
            | Error::MissingPos { .. }
            | Error::LabelPoolExhausted { .. } => FRAGMIX_ERR_DATA,
            Error::Config(_) => FRAGMIX_ERR_CONFIG,
            Error::MissingArtifact { .. } | Error::Io { .. } => FRAGMIX_ERR_IO,
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FRAGMIX_ERR_NULL, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FRAGMIX_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FRAGMIX_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(FRAGMIX_ERR_UTF8, format!("`{what}`: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fragmix_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the last failed call on this thread, or null if it succeeded.
#[no_mangle]
pub extern "C" fn fragmix_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses `text` in one of the `FRAGMIX_FORMAT_*` formats.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fragmix_corpus_parse(
    text: *const c_char,
    format: i32,
    out: *mut *mut FragmixCorpus,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(text, "text")?;
        let corpus = match format {
            FRAGMIX_FORMAT_BRACKETED => parse_bracketed(text)?,
            FRAGMIX_FORMAT_TAGGED => parse_tagged(text)?,
            FRAGMIX_FORMAT_JSONL => read_jsonl(text)?,
            other => {
                return Err(Failure(
                    FRAGMIX_ERR_CONFIG,
                    format!("unknown format code {other}"),
                ))
            }
        };
        put(out, FragmixCorpus(corpus));
        Ok(())
    })
}

/// Generates a synthetic corpus with the built-in lexicons and default plant rates.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fragmix_corpus_synthetic(
    n_docs: usize,
    case_fraction: f64,
    seed: u64,
    out: *mut *mut FragmixCorpus,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = SynthSpec {
            n_docs,
            case_fraction,
            seed,
            ..SynthSpec::default()
        };
        put(out, FragmixCorpus(generate_synthetic(&spec)?));
        Ok(())
    })
}

/// Number of documents, or 0 for a null handle.
///
/// # Safety
/// `corpus` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fragmix_corpus_len(corpus: *const FragmixCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corpus` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fragmix_corpus_free(corpus: *mut FragmixCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Extracts fragments of `min_len..=max_len` words and keeps those occurring in
/// at least `min_doc_freq` documents.
///
/// # Safety
/// `corpus` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fragmix_pool_build(
    corpus: *const FragmixCorpus,
    min_len: usize,
    max_len: usize,
    min_doc_freq: usize,
    out: *mut *mut FragmixPool,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let corpus = &handle(corpus, "corpus")?.0;
        let bounds = LengthBounds::new(min_len, max_len)?;
        let mut fragments = Vec::new();
        for doc in corpus.documents() {
            fragments.extend(extract(doc, bounds)?);
        }
        let pool = filter_rare(&build_pool(corpus, fragments)?, min_doc_freq)?;
        put(out, FragmixPool(pool));
        Ok(())
    })
}

/// # Safety
/// `pool` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fragmix_pool_len(pool: *const FragmixPool) -> usize {
    pool.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `pool` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fragmix_pool_free(pool: *mut FragmixPool) {
    if !pool.is_null() {
        drop(Box::from_raw(pool));
    }
}

/// Assembles examples with the default part order, separator and reuse policy.
///
/// # Safety
/// `pool` must have been built from `corpus`; both must be live handles and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fragmix_assemble(
    pool: *const FragmixPool,
    corpus: *const FragmixCorpus,
    seed: u64,
    target_ratio: f64,
    out: *mut *mut FragmixRelease,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let pool = &handle(pool, "pool")?.0;
        let corpus = &handle(corpus, "corpus")?.0;
        let cfg = AssemblyConfig {
            seed,
            target_ratio,
            ..AssemblyConfig::default()
        };
        cfg.validate()?;
        let assembly = assemble(pool, corpus, &cfg)?;
        put(out, FragmixRelease(assembly.examples));
        Ok(())
    })
}

/// # Safety
/// `release` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fragmix_release_len(release: *const FragmixRelease) -> usize {
    release.as_ref().map_or(0, |r| r.0.len())
}

/// Serializes the release as JSONL into a new string owned by the caller;
/// free it with `fragmix_string_free`.
///
/// # Safety
/// `release` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fragmix_release_to_jsonl(
    release: *const FragmixRelease,
    with_provenance: bool,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let release = &handle(release, "release")?.0;
        let mut buf = Vec::new();
        write_release(release, &mut buf, with_provenance)?;
        let s = CString::new(buf).map_err(|e| Failure(FRAGMIX_ERR_VALIDATION, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Linkage audit of `release` against `reference`: smallest candidate-set size
/// and the percentage of parts that match exactly one document.
///
/// # Safety
/// Both handles must be live; `min_k` and `pct_k1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fragmix_k_anonymity(
    release: *const FragmixRelease,
    reference: *const FragmixCorpus,
    min_k: *mut usize,
    pct_k1: *mut f64,
) -> i32 {
    guard(|| {
        if min_k.is_null() || pct_k1.is_null() {
            return Err(null("min_k/pct_k1"));
        }
        let release = &handle(release, "release")?.0;
        let reference = &handle(reference, "reference")?.0;
        let report = k_anonymity(release, reference)?;
        *min_k = report.min_k;
        *pct_k1 = report.pct_k1;
        Ok(())
    })
}

/// # Safety
/// `release` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fragmix_release_free(release: *mut FragmixRelease) {
    if !release.is_null() {
        drop(Box::from_raw(release));
    }
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fragmix_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
