//! C ABI for the `cherednik` toolkit.
//!
//! Two opaque handles cross the boundary: a [`ChdDataSet`] (bundled or
//! on-disk data) and a [`ChdReport`] (the outcome of one verify, solve or
//! character query). Every fallible call returns a [`ChdStatus`] whose
//! numeric values match the command-line exit codes; the message of the most
//! recent failure on the calling thread is available from
//! [`chd_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cherednik::functors::load_contexts;
use cherednik::repdata::DataSet;
use cherednik::report::{
    char_section, load_block_id, solve_block, support_section, verify_block, with_dual, RunReport, Section, Status,
};
use cherednik::solver::{ConstraintConfig, SolverContext};

/// Result of an FFI call. Values 0–3 mirror the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChdStatus {
    /// Everything checked out.
    Ok = 0,
    /// A computed value disagrees with the bundled one.
    Mismatch = 1,
    /// Input data is missing or malformed.
    DataError = 2,
    /// The constraints leave more than one completion, or the search stopped early.
    Ambiguous = 3,
    /// A null pointer or a string that is not valid UTF-8 was passed.
    InvalidArgument = 4,
    /// The library panicked; the handle arguments should be considered unusable.
    Panic = 5,
}

impl From<Status> for ChdStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Pass => ChdStatus::Ok,
            Status::Mismatch => ChdStatus::Mismatch,
            Status::DataError => ChdStatus::DataError,
            Status::Ambiguous => ChdStatus::Ambiguous,
        }
    }
}

/// Loaded decomposition-matrix data.
pub struct ChdDataSet {
    data: DataSet,
}

/// The outcome of one query, renderable as text or JSON.
pub struct ChdReport {
    report: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, turning panics into [`ChdStatus::Panic`].
fn guard(f: impl FnOnce() -> ChdStatus) -> ChdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            ChdStatus::Panic
        }
    }
}

/// Borrows a required C string argument.
///
/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, ChdStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(ChdStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        ChdStatus::InvalidArgument
    })
}

fn into_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Stores `report` in `*out` and returns its status. The first note of the
/// most severe failing section, if any, becomes the last error message.
///
/// # Safety
/// `out` must be valid for writes.
unsafe fn emit(report: RunReport, out: *mut *mut ChdReport) -> ChdStatus {
    let status = ChdStatus::from(report.status);
    if let Some(s) = report
        .sections
        .iter()
        .find(|s| s.status == report.status && s.status != Status::Pass)
    {
        set_error(s.notes.first().cloned().unwrap_or_else(|| s.title.clone()));
    }
    *out = Box::into_raw(Box::new(ChdReport { report }));
    status
}

/// Opens a data directory, or the default one when `dir` is null (the
/// `CHEREDNIK_DATA_DIR` environment variable, then the bundled copy).
///
/// On success `*out` receives a handle to release with [`chd_dataset_free`].
///
/// # Safety
/// `dir` must be null or a valid NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chd_dataset_open(dir: *const c_char, out: *mut *mut ChdDataSet) -> ChdStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return ChdStatus::InvalidArgument;
        }
        *out = ptr::null_mut();
        let dir = if dir.is_null() {
            None
        } else {
            match arg(dir, "dir") {
                Ok(d) => Some(Path::new(d)),
                Err(s) => return s,
            }
        };
        match DataSet::load_default(dir) {
            Ok(data) => {
                *out = Box::into_raw(Box::new(ChdDataSet { data }));
                ChdStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                ChdStatus::DataError
            }
        }
    })
}

/// Releases a data set. Null is ignored.
///
/// # Safety
/// `ds` must be null or a handle from [`chd_dataset_open`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chd_dataset_free(ds: *mut ChdDataSet) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of blocks in the data set, or -1 when they cannot be loaded.
///
/// # Safety
/// `ds` must be null or a live data-set handle.
#[no_mangle]
pub unsafe extern "C" fn chd_dataset_block_count(ds: *const ChdDataSet) -> i64 {
    let Some(ds) = ds.as_ref() else { return -1 };
    ds.data.all_blocks().map_or(-1, |b| b.len() as i64)
}

/// Checks bundled data for one block (`GROUP/c_P_Q/name` or a file path), or
/// for every block when `block` is null.
///
/// # Safety
/// `ds` must be a live data-set handle, `block` null or a valid string and
/// `out` valid for writes. Free `*out` with [`chd_report_free`].
#[no_mangle]
pub unsafe extern "C" fn chd_verify(
    ds: *const ChdDataSet,
    block: *const c_char,
    out: *mut *mut ChdReport,
) -> ChdStatus {
    guard(|| {
        let (Some(ds), false) = (ds.as_ref(), out.is_null()) else {
            set_error("null handle");
            return ChdStatus::InvalidArgument;
        };
        let cfg = ConstraintConfig::default();
        let mut report = RunReport::new("verify");
        let blocks = if block.is_null() {
            ds.data.all_blocks()
        } else {
            match arg(block, "block") {
                Ok(id) => load_block_id(&ds.data, id).map(|b| vec![b]),
                Err(s) => return s,
            }
        };
        match blocks {
            Ok(bs) => bs.iter().for_each(|b| report.push(verify_block(b, &cfg))),
            Err(e) => report.push(Section::from_error("verify", &e)),
        }
        emit(report, out)
    })
}

/// Completes a block's decomposition matrix together with its sign-dual
/// block, using the bundled parabolic context when `use_context` is true.
/// `search_cap` bounds the entries tried (0 selects the default).
///
/// # Safety
/// `ds` must be a live data-set handle, `block` a valid string and `out`
/// valid for writes. Free `*out` with [`chd_report_free`].
#[no_mangle]
pub unsafe extern "C" fn chd_solve(
    ds: *const ChdDataSet,
    block: *const c_char,
    use_context: bool,
    search_cap: u32,
    out: *mut *mut ChdReport,
) -> ChdStatus {
    guard(|| {
        let (Some(ds), false) = (ds.as_ref(), out.is_null()) else {
            set_error("null handle");
            return ChdStatus::InvalidArgument;
        };
        let id = match arg(block, "block") {
            Ok(id) => id,
            Err(s) => return s,
        };
        let mut cfg = ConstraintConfig::default();
        if search_cap > 0 {
            cfg.search_cap = search_cap;
        }
        let mut report = RunReport::new(format!("solve {id}"));
        let run = || -> cherednik::Result<Section> {
            cfg.validate()?;
            let b = with_dual(&ds.data, &load_block_id(&ds.data, id)?)?;
            let contexts = if use_context {
                load_contexts(&ds.data)?
            } else {
                Vec::new()
            };
            let ctx = SolverContext::for_block(&contexts, &ds.data, &b);
            Ok(solve_block(&b, ctx, &cfg))
        };
        report.push(run().unwrap_or_else(|e| Section::from_error(id, &e)));
        emit(report, out)
    })
}

/// Graded character, support and dimension of `L(label)` in `block`, or the
/// supports of every simple of the block when `label` is null.
///
/// # Safety
/// `ds` must be a live data-set handle, `block` a valid string, `label` null
/// or a valid string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chd_character(
    ds: *const ChdDataSet,
    block: *const c_char,
    label: *const c_char,
    out: *mut *mut ChdReport,
) -> ChdStatus {
    guard(|| {
        let (Some(ds), false) = (ds.as_ref(), out.is_null()) else {
            set_error("null handle");
            return ChdStatus::InvalidArgument;
        };
        let id = match arg(block, "block") {
            Ok(id) => id,
            Err(s) => return s,
        };
        let label = if label.is_null() {
            None
        } else {
            match arg(label, "label") {
                Ok(l) => Some(l),
                Err(s) => return s,
            }
        };
        let mut report = RunReport::new(format!("char {id}"));
        let section = match load_block_id(&ds.data, id) {
            Ok(b) => match label {
                Some(l) => char_section(&b, l),
                None => support_section(&b),
            },
            Err(e) => Section::from_error(id, &e),
        };
        report.push(section);
        emit(report, out)
    })
}

/// Status of a report (never `InvalidArgument` or `Panic` for a live handle).
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn chd_report_status(r: *const ChdReport) -> ChdStatus {
    match r.as_ref() {
        Some(r) => r.report.status.into(),
        None => ChdStatus::InvalidArgument,
    }
}

/// Pretty-printed JSON for a report; free with [`chd_string_free`]. Null on a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn chd_report_json(r: *const ChdReport) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| into_string(r.report.to_json()))
}

/// Human-readable text for a report; free with [`chd_string_free`]. Null on a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn chd_report_text(r: *const ChdReport) -> *mut c_char {
    r.as_ref()
        .map_or(ptr::null_mut(), |r| into_string(r.report.render_text()))
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `r` must be null or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chd_report_free(r: *mut ChdReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn chd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_match_exit_codes() {
        for s in [Status::Pass, Status::Mismatch, Status::DataError, Status::Ambiguous] {
            assert_eq!(ChdStatus::from(s) as i32, s.exit_code());
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            assert_eq!(
                chd_dataset_open(ptr::null(), ptr::null_mut()),
                ChdStatus::InvalidArgument
            );
            let mut r = ptr::null_mut();
            assert_eq!(chd_verify(ptr::null(), ptr::null(), &mut r), ChdStatus::InvalidArgument);
            assert!(!chd_last_error_message().is_null());
            assert_eq!(chd_report_status(ptr::null()), ChdStatus::InvalidArgument);
            assert!(chd_report_json(ptr::null()).is_null());
            assert_eq!(chd_dataset_block_count(ptr::null()), -1);
        }
    }

    #[test]
    fn version_is_the_crate_version() {
        let v = unsafe { CStr::from_ptr(chd_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
