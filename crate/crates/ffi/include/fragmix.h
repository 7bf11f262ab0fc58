#ifndef FRAGMIX_H
#define FRAGMIX_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FRAGMIX_OK 0

// A required pointer argument was null.
#define FRAGMIX_ERR_NULL 1

// A string argument was not valid UTF-8.
#define FRAGMIX_ERR_UTF8 2

#define FRAGMIX_ERR_PARSE 3

#define FRAGMIX_ERR_VALIDATION 4

// Input lacks trees or POS tags, or a label has too few fragments.
#define FRAGMIX_ERR_DATA 5

#define FRAGMIX_ERR_CONFIG 6

#define FRAGMIX_ERR_IO 7

// An internal panic was caught at the boundary.
#define FRAGMIX_ERR_PANIC 99

#define FRAGMIX_FORMAT_BRACKETED 0

#define FRAGMIX_FORMAT_TAGGED 1

#define FRAGMIX_FORMAT_JSONL 2

// A parsed or generated corpus.
typedef struct FragmixCorpus FragmixCorpus;

// A rare-filtered fragment pool built from one corpus.
typedef struct FragmixPool FragmixPool;

// Assembled examples.
typedef struct FragmixRelease FragmixRelease;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *fragmix_version(void);

// Message for the last failed call on this thread, or null if it succeeded.
const char *fragmix_last_error(void);

// Parses `text` in one of the `FRAGMIX_FORMAT_*` formats.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a writable pointer.
int32_t fragmix_corpus_parse(const char *text, int32_t format, struct FragmixCorpus **out);

// Generates a synthetic corpus with the built-in lexicons and default plant rates.
//
// # Safety
// `out` must be a writable pointer.
int32_t fragmix_corpus_synthetic(size_t n_docs,
                                 double case_fraction,
                                 uint64_t seed,
                                 struct FragmixCorpus **out);

// Number of documents, or 0 for a null handle.
//
// # Safety
// `corpus` must be null or a live handle.
size_t fragmix_corpus_len(const struct FragmixCorpus *corpus);

// # Safety
// `corpus` must be null or a handle not yet freed.
void fragmix_corpus_free(struct FragmixCorpus *corpus);

// Extracts fragments of `min_len..=max_len` words and keeps those occurring in
// at least `min_doc_freq` documents.
//
// # Safety
// `corpus` must be a live handle and `out` a writable pointer.
int32_t fragmix_pool_build(const struct FragmixCorpus *corpus,
                           size_t min_len,
                           size_t max_len,
                           size_t min_doc_freq,
                           struct FragmixPool **out);

// # Safety
// `pool` must be null or a live handle.
size_t fragmix_pool_len(const struct FragmixPool *pool);

// # Safety
// `pool` must be null or a handle not yet freed.
void fragmix_pool_free(struct FragmixPool *pool);

// Assembles examples with the default part order, separator and reuse policy.
//
// # Safety
// `pool` must have been built from `corpus`; both must be live handles and
// `out` a writable pointer.
int32_t fragmix_assemble(const struct FragmixPool *pool,
                         const struct FragmixCorpus *corpus,
                         uint64_t seed,
                         double target_ratio,
                         struct FragmixRelease **out);

// # Safety
// `release` must be null or a live handle.
size_t fragmix_release_len(const struct FragmixRelease *release);

// Serializes the release as JSONL into a new string owned by the caller;
// free it with `fragmix_string_free`.
//
// # Safety
// `release` must be a live handle and `out` a writable pointer.
int32_t fragmix_release_to_jsonl(const struct FragmixRelease *release,
                                 bool with_provenance,
                                 char **out);

// Linkage audit of `release` against `reference`: smallest candidate-set size
// and the percentage of parts that match exactly one document.
//
// # Safety
// Both handles must be live; `min_k` and `pct_k1` must be writable.
int32_t fragmix_k_anonymity(const struct FragmixRelease *release,
                            const struct FragmixCorpus *reference,
                            size_t *min_k,
                            double *pct_k1);

// # Safety
// `release` must be null or a handle not yet freed.
void fragmix_release_free(struct FragmixRelease *release);

// Frees a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void fragmix_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRAGMIX_H */
