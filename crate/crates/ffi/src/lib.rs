//! C ABI over the `cdwsd` engine.
//!
//! Every function returns a [`CdwsdStatus`]; results come back through out
//! pointers. On failure, `cdwsd_last_error_message` describes the most
//! recent error on the calling thread. Strings handed out by the library
//! must be released with `cdwsd_string_free`, taxonomies with
//! `cdwsd_taxonomy_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cdwsd::density::{conceptual_density, solve_nhyp, DensityError, DensityParams};
use cdwsd::taxonomy::TaxonomyError;
use cdwsd::wsd::WsdError;
use cdwsd::{disambiguate_document, ConceptStats, Taxonomy, WindowConfig};
use libc::c_char;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdwsdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidTaxonomy = 5,
    UnknownSynset = 6,
    InvalidArgument = 7,
    Panic = 8,
}

/// Loaded taxonomy. Opaque to C callers.
pub struct CdwsdTaxonomy {
    inner: Taxonomy,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CdwsdStatus, String);

impl From<TaxonomyError> for Failure {
    fn from(e: TaxonomyError) -> Self {
        let status = match &e {
            TaxonomyError::Io(_) => CdwsdStatus::Io,
            TaxonomyError::Encoding { .. } | TaxonomyError::Syntax { .. } => CdwsdStatus::Parse,
            TaxonomyError::UnknownSynset(_) => CdwsdStatus::UnknownSynset,
            _ => CdwsdStatus::InvalidTaxonomy,
        };
        Failure(status, e.to_string())
    }
}

impl From<DensityError> for Failure {
    fn from(e: DensityError) -> Self {
        Failure(CdwsdStatus::InvalidArgument, e.to_string())
    }
}

impl From<WsdError> for Failure {
    fn from(e: WsdError) -> Self {
        Failure(CdwsdStatus::InvalidArgument, e.to_string())
    }
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

/// Run `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CdwsdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CdwsdStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CdwsdStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(CdwsdStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(CdwsdStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(CdwsdStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn taxonomy<'a>(t: *const CdwsdTaxonomy) -> Result<&'a Taxonomy, Failure> {
    t.as_ref()
        .map(|t| &t.inner)
        .ok_or_else(|| Failure(CdwsdStatus::NullPointer, "taxonomy handle is null".into()))
}

fn boxed(t: Taxonomy) -> *mut CdwsdTaxonomy {
    Box::into_raw(Box::new(CdwsdTaxonomy { inner: t }))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cdwsd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Load a taxonomy file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_taxonomy_load_file(path: *const c_char, out: *mut *mut CdwsdTaxonomy) -> CdwsdStatus {
    guard(|| {
        let path = text(path, "path")?;
        let file = File::open(path).map_err(|e| Failure(CdwsdStatus::Io, format!("{path}: {e}")))?;
        let t = cdwsd::load_taxonomy(BufReader::new(file))?;
        write(out, boxed(t))
    })
}

/// Load a taxonomy from its text form.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_taxonomy_load_str(source: *const c_char, out: *mut *mut CdwsdTaxonomy) -> CdwsdStatus {
    guard(|| {
        let t: Taxonomy = text(source, "source")?.parse()?;
        write(out, boxed(t))
    })
}

/// # Safety
/// `t` must come from one of the load functions and not be used afterwards.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_taxonomy_free(t: *mut CdwsdTaxonomy) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live taxonomy handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_taxonomy_synset_count(t: *const CdwsdTaxonomy, out: *mut usize) -> CdwsdStatus {
    guard(|| write(out, taxonomy(t)?.len()))
}

/// Size of the subhierarchy under `id`, the synset itself included.
///
/// # Safety
/// `t` must be a live taxonomy handle, `id` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_taxonomy_descendants(
    t: *const CdwsdTaxonomy,
    id: *const c_char,
    out: *mut u64,
) -> CdwsdStatus {
    guard(|| write(out, taxonomy(t)?.descendants(text(id, "synset id")?)?))
}

/// # Safety
/// Same contract as `cdwsd_taxonomy_descendants`.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_taxonomy_height(
    t: *const CdwsdTaxonomy,
    id: *const c_char,
    out: *mut u32,
) -> CdwsdStatus {
    guard(|| write(out, taxonomy(t)?.height(text(id, "synset id")?)?))
}

/// # Safety
/// Same contract as `cdwsd_taxonomy_descendants`.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_taxonomy_nhyp(t: *const CdwsdTaxonomy, id: *const c_char, out: *mut f64) -> CdwsdStatus {
    guard(|| write(out, taxonomy(t)?.nhyp(text(id, "synset id")?)?))
}

/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_solve_nhyp(descendants: u64, height: u32, out: *mut f64) -> CdwsdStatus {
    guard(|| write(out, solve_nhyp(descendants, height)?))
}

/// Density of a concept with the given subhierarchy shape and mark count.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_conceptual_density(
    descendants: u64,
    height: u32,
    marks: usize,
    alpha: f64,
    beta: f64,
    out: *mut f64,
) -> CdwsdStatus {
    guard(|| {
        let stats = ConceptStats::new(descendants, height)?;
        let params = DensityParams::new(alpha, beta)?;
        write(out, conceptual_density(&stats, marks, &params)?)
    })
}

/// Disambiguate a whitespace-separated lemma stream. Lemmas unknown to the
/// taxonomy are skipped. On success `*out` holds one
/// `position\tlemma\tSTATUS\tkeys` line per known lemma; release it with
/// `cdwsd_string_free`.
///
/// # Safety
/// `t` must be a live taxonomy handle, `lemmas` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_disambiguate(
    t: *const CdwsdTaxonomy,
    lemmas: *const c_char,
    window: usize,
    alpha: f64,
    beta: f64,
    out: *mut *mut c_char,
) -> CdwsdStatus {
    guard(|| {
        let t = taxonomy(t)?;
        let (positions, known): (Vec<usize>, Vec<&str>) = text(lemmas, "lemmas")?
            .split_whitespace()
            .enumerate()
            .filter(|(_, w)| t.contains_lemma(w))
            .unzip();
        let cfg = WindowConfig::new(window, DensityParams::new(alpha, beta)?)?;
        let mut tsv = String::new();
        for (mut o, pos) in disambiguate_document(t, &known, &cfg)?.into_iter().zip(positions) {
            o.position = pos;
            tsv.push_str(&o.to_tsv_line(t));
            tsv.push('\n');
        }
        let s = CString::new(tsv).map_err(|_| Failure(CdwsdStatus::InvalidUtf8, "output contains NUL".into()))?;
        write(out, s.into_raw())
    })
}

/// # Safety
/// `s` must be a string returned by this library, not freed before. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cdwsd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
