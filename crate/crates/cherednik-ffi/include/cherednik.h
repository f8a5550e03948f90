#ifndef CHEREDNIK_H
#define CHEREDNIK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of an FFI call. Values 0–3 mirror the command-line exit codes.
typedef enum ChdStatus {
  // Everything checked out.
  CHD_STATUS_OK = 0,
  // A computed value disagrees with the bundled one.
  CHD_STATUS_MISMATCH = 1,
  // Input data is missing or malformed.
  CHD_STATUS_DATA_ERROR = 2,
  // The constraints leave more than one completion, or the search stopped early.
  CHD_STATUS_AMBIGUOUS = 3,
  // A null pointer or a string that is not valid UTF-8 was passed.
  CHD_STATUS_INVALID_ARGUMENT = 4,
  // The library panicked; the handle arguments should be considered unusable.
  CHD_STATUS_PANIC = 5,
} ChdStatus;

// Loaded decomposition-matrix data.
typedef struct ChdDataSet ChdDataSet;

// The outcome of one query, renderable as text or JSON.
typedef struct ChdReport ChdReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Opens a data directory, or the default one when `dir` is null (the
// `CHEREDNIK_DATA_DIR` environment variable, then the bundled copy).
//
// On success `*out` receives a handle to release with [`chd_dataset_free`].
//
// # Safety
// `dir` must be null or a valid NUL-terminated string; `out` must be valid for writes.
enum ChdStatus chd_dataset_open(const char *dir, struct ChdDataSet **out);

// Releases a data set. Null is ignored.
//
// # Safety
// `ds` must be null or a handle from [`chd_dataset_open`] not yet freed.
void chd_dataset_free(struct ChdDataSet *ds);

// Number of blocks in the data set, or -1 when they cannot be loaded.
//
// # Safety
// `ds` must be null or a live data-set handle.
int64_t chd_dataset_block_count(const struct ChdDataSet *ds);

// Checks bundled data for one block (`GROUP/c_P_Q/name` or a file path), or
// for every block when `block` is null.
//
// # Safety
// `ds` must be a live data-set handle, `block` null or a valid string and
// `out` valid for writes. Free `*out` with [`chd_report_free`].
enum ChdStatus chd_verify(const struct ChdDataSet *ds, const char *block, struct ChdReport **out);

// Completes a block's decomposition matrix together with its sign-dual
// block, using the bundled parabolic context when `use_context` is true.
// `search_cap` bounds the entries tried (0 selects the default).
//
// # Safety
// `ds` must be a live data-set handle, `block` a valid string and `out`
// valid for writes. Free `*out` with [`chd_report_free`].
enum ChdStatus chd_solve(const struct ChdDataSet *ds,
                         const char *block,
                         bool use_context,
                         uint32_t search_cap,
                         struct ChdReport **out);

// Graded character, support and dimension of `L(label)` in `block`, or the
// supports of every simple of the block when `label` is null.
//
// # Safety
// `ds` must be a live data-set handle, `block` a valid string, `label` null
// or a valid string and `out` valid for writes.
enum ChdStatus chd_character(const struct ChdDataSet *ds,
                             const char *block,
                             const char *label,
                             struct ChdReport **out);

// Status of a report (never `InvalidArgument` or `Panic` for a live handle).
//
// # Safety
// `r` must be null or a live report handle.
enum ChdStatus chd_report_status(const struct ChdReport *r);

// Pretty-printed JSON for a report; free with [`chd_string_free`]. Null on a null handle.
//
// # Safety
// `r` must be null or a live report handle.
char *chd_report_json(const struct ChdReport *r);

// Human-readable text for a report; free with [`chd_string_free`]. Null on a null handle.
//
// # Safety
// `r` must be null or a live report handle.
char *chd_report_text(const struct ChdReport *r);

// Releases a report. Null is ignored.
//
// # Safety
// `r` must be null or a report handle not yet freed.
void chd_report_free(struct ChdReport *r);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void chd_string_free(char *s);

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *chd_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *chd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEREDNIK_H */
