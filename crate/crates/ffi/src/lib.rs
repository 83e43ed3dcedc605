//! C ABI over the stancegraph library.
//!
//! Every fallible function returns an [`SgStatus`] and writes results
//! through out-pointers. On failure, `sg_last_error()` returns a message
//! for the calling thread. Handles are opaque and must be released with
//! the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stancegraph::analytics;
use stancegraph::ingest::{self, AnnotationSet, IndexedAnnotations};
use stancegraph::mace::{self, AggregationResult, MaceConfig};
use stancegraph::stats;
use stancegraph::{Error, SentenceGraph, StanceDistribution, StanceLabel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    Undefined = 6,
    Remote = 7,
    Panic = 8,
}

/// A labeled or unlabeled tuple store.
pub struct SgStore {
    graphs: Vec<SentenceGraph>,
}

/// Crowd annotations of one dataset.
pub struct SgAnnotations {
    set: AnnotationSet,
    indexed: IndexedAnnotations,
}

/// Result of fitting MACE to an [`SgAnnotations`].
pub struct SgAggregation {
    result: AggregationResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SgStatus {
    match e {
        Error::Io { .. } => SgStatus::Io,
        Error::Parse { .. } => SgStatus::Parse,
        Error::Undefined(_) => SgStatus::Undefined,
        Error::Transport { .. } | Error::Http { .. } | Error::RemoteItem { .. } => SgStatus::Remote,
        _ => SgStatus::Validation,
    }
}

fn fail(status: SgStatus, message: impl Into<String>) -> SgStatus {
    set_error(message.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SgStatus>) -> SgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(SgStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: stancegraph::Result<T>) -> Result<T, SgStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, SgStatus> {
    if p.is_null() {
        return Err(fail(SgStatus::NullArgument, "path is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SgStatus::InvalidArgument, "path is not valid UTF-8"))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, SgStatus> {
    p.as_mut()
        .ok_or_else(|| fail(SgStatus::NullArgument, "output pointer is null"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, SgStatus> {
    p.as_ref().ok_or_else(|| fail(SgStatus::NullArgument, "handle is null"))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn sg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Name of label `index` (0 = "CT+" ... 5 = "NE"), or NULL if out of range.
#[no_mangle]
pub extern "C" fn sg_label_name(index: u32) -> *const c_char {
    const NAMES: [&str; 6] = ["CT+\0", "CT-\0", "PR+\0", "PS+\0", "Uu\0", "NE\0"];
    match StanceLabel::from_index(index as usize) {
        Some(l) => NAMES[l.index()].as_ptr().cast(),
        None => ptr::null(),
    }
}

/// Reads a tuple store (JSONL).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_store_read(path: *const c_char, out_store: *mut *mut SgStore) -> SgStatus {
    guard(|| {
        let out_store = out(out_store)?;
        let graphs = lib(ingest::read_tuples(path_arg(path)?))?;
        *out_store = Box::into_raw(Box::new(SgStore { graphs }));
        Ok(())
    })
}

/// # Safety
/// `store` must come from `sg_store_read` and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sg_store_free(store: *mut SgStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Number of sentences and tuples in a store.
///
/// # Safety
/// `store` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_store_counts(
    store: *const SgStore,
    out_sentences: *mut usize,
    out_tuples: *mut usize,
) -> SgStatus {
    guard(|| {
        let s = handle(store)?;
        let (sentences, tuples) = (out(out_sentences)?, out(out_tuples)?);
        *sentences = s.graphs.len();
        *tuples = s.graphs.iter().map(|g| g.tuples().len()).sum();
        Ok(())
    })
}

/// Share of PR+/PS+ among non-NE stances, of the author only or of all sources.
///
/// # Safety
/// `store` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_hedging_uncertainty(
    store: *const SgStore,
    author_only: bool,
    out_hedged: *mut usize,
    out_epistemic: *mut usize,
    out_ratio: *mut f64,
) -> SgStatus {
    guard(|| {
        let s = handle(store)?;
        let (hedged, epistemic, ratio) = (out(out_hedged)?, out(out_epistemic)?, out(out_ratio)?);
        let r = lib(analytics::hedging_uncertainty(&s.graphs, author_only))?;
        *hedged = r.hedged;
        *epistemic = r.epistemic;
        *ratio = r.uncertainty;
        Ok(())
    })
}

/// Reads an annotation CSV (`#labels=` line, then item_id,annotator_id,label).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_annotations_read(
    path: *const c_char,
    out_annotations: *mut *mut SgAnnotations,
) -> SgStatus {
    guard(|| {
        let out_annotations = out(out_annotations)?;
        let set = lib(ingest::read_annotations(path_arg(path)?))?;
        let indexed = set.indexed();
        *out_annotations = Box::into_raw(Box::new(SgAnnotations { set, indexed }));
        Ok(())
    })
}

/// # Safety
/// `annotations` must come from `sg_annotations_read`. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sg_annotations_free(annotations: *mut SgAnnotations) {
    if !annotations.is_null() {
        drop(Box::from_raw(annotations));
    }
}

/// Number of items, annotators and labels.
///
/// # Safety
/// `annotations` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_annotations_counts(
    annotations: *const SgAnnotations,
    out_items: *mut usize,
    out_annotators: *mut usize,
    out_labels: *mut usize,
) -> SgStatus {
    guard(|| {
        let a = handle(annotations)?;
        *out(out_items)? = a.indexed.items.len();
        *out(out_annotators)? = a.indexed.annotators.len();
        *out(out_labels)? = a.set.labels.len();
        Ok(())
    })
}

/// # Safety
/// `annotations` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn sg_raw_agreement(annotations: *const SgAnnotations, out_value: *mut f64) -> SgStatus {
    guard(|| {
        let a = handle(annotations)?;
        *out(out_value)? = lib(stats::raw_agreement(&a.indexed))?;
        Ok(())
    })
}

/// Krippendorff's alpha with the nominal metric.
///
/// # Safety
/// `annotations` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn sg_krippendorff_alpha(annotations: *const SgAnnotations, out_value: *mut f64) -> SgStatus {
    guard(|| {
        let a = handle(annotations)?;
        *out(out_value)? = lib(stats::krippendorff_alpha(&a.indexed))?;
        Ok(())
    })
}

/// Fits MACE. A negative `smoothing` selects the default of 0.1 / K.
///
/// # Safety
/// `annotations` must be a live handle and `out_aggregation` valid.
#[no_mangle]
pub unsafe extern "C" fn sg_mace_fit(
    annotations: *const SgAnnotations,
    iters: u32,
    restarts: u32,
    smoothing: f64,
    seed: u64,
    out_aggregation: *mut *mut SgAggregation,
) -> SgStatus {
    guard(|| {
        let a = handle(annotations)?;
        let out_aggregation = out(out_aggregation)?;
        let config = MaceConfig {
            iters: iters as usize,
            restarts: restarts as usize,
            smoothing: (smoothing >= 0.0).then_some(smoothing),
            seed,
        };
        let (_, result) = lib(mace::em_fit(&a.indexed, &config))?;
        *out_aggregation = Box::into_raw(Box::new(SgAggregation { result }));
        Ok(())
    })
}

/// # Safety
/// `aggregation` must come from `sg_mace_fit`. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sg_aggregation_free(aggregation: *mut SgAggregation) {
    if !aggregation.is_null() {
        drop(Box::from_raw(aggregation));
    }
}

/// Number of aggregated items; items are numbered by first appearance in
/// the annotation file.
///
/// # Safety
/// `aggregation` must be a live handle and `out_items` valid.
#[no_mangle]
pub unsafe extern "C" fn sg_aggregation_item_count(
    aggregation: *const SgAggregation,
    out_items: *mut usize,
) -> SgStatus {
    guard(|| {
        *out(out_items)? = handle(aggregation)?.result.hard_labels.len();
        Ok(())
    })
}

fn item_index(agg: &SgAggregation, item: usize) -> Result<usize, SgStatus> {
    if item < agg.result.hard_labels.len() {
        Ok(item)
    } else {
        Err(fail(SgStatus::InvalidArgument, format!("item {item} out of range")))
    }
}

/// Most probable label of `item` and the posterior entropy in nats.
///
/// # Safety
/// `aggregation` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sg_aggregation_item(
    aggregation: *const SgAggregation,
    item: usize,
    out_label: *mut usize,
    out_entropy: *mut f64,
) -> SgStatus {
    guard(|| {
        let agg = handle(aggregation)?;
        let i = item_index(agg, item)?;
        *out(out_label)? = agg.result.hard_labels[i];
        *out(out_entropy)? = agg.result.entropies[i];
        Ok(())
    })
}

/// Posterior probability of `label` for `item`.
///
/// # Safety
/// `aggregation` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn sg_aggregation_posterior(
    aggregation: *const SgAggregation,
    item: usize,
    label: usize,
    out_value: *mut f64,
) -> SgStatus {
    guard(|| {
        let agg = handle(aggregation)?;
        let row = &agg.result.posteriors[item_index(agg, item)?];
        let p = row
            .get(label)
            .ok_or_else(|| fail(SgStatus::InvalidArgument, format!("label {label} out of range")))?;
        *out(out_value)? = *p;
        Ok(())
    })
}

/// Final marginal log-likelihood of the selected restart.
///
/// # Safety
/// `aggregation` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn sg_aggregation_log_likelihood(
    aggregation: *const SgAggregation,
    out_value: *mut f64,
) -> SgStatus {
    guard(|| {
        let agg = handle(aggregation)?;
        *out(out_value)? = *agg.result.log_likelihood.last().expect("trace is never empty");
        Ok(())
    })
}

/// Macro F1 over six-way label indices, over all present classes and
/// without NE. Scores are fractions in [0, 1].
///
/// # Safety
/// `gold` and `pred` must point to `n` readable bytes each.
#[no_mangle]
pub unsafe extern "C" fn sg_macro_f1(
    gold: *const u8,
    pred: *const u8,
    n: usize,
    out_all: *mut f64,
    out_non_ne: *mut f64,
) -> SgStatus {
    guard(|| {
        if n > 0 && (gold.is_null() || pred.is_null()) {
            return Err(fail(SgStatus::NullArgument, "label array is null"));
        }
        let labels = |p: *const u8| -> Result<Vec<StanceLabel>, SgStatus> {
            if n == 0 {
                return Ok(Vec::new());
            }
            std::slice::from_raw_parts(p, n)
                .iter()
                .map(|&i| {
                    StanceLabel::from_index(i as usize)
                        .ok_or_else(|| fail(SgStatus::InvalidArgument, format!("label index {i} out of range")))
                })
                .collect()
        };
        let r = lib(stats::macro_f1(&labels(gold)?, &labels(pred)?))?;
        *out(out_all)? = r.macro_f1_all;
        *out(out_non_ne)? = r.macro_f1_non_ne;
        Ok(())
    })
}

/// (P(CT+) − P(CT−)) / (1 − P(NE)) of a six-way distribution.
///
/// # Safety
/// `probs` must point to 6 readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_expected_stance(probs: *const f64, out_value: *mut f64) -> SgStatus {
    guard(|| {
        if probs.is_null() {
            return Err(fail(SgStatus::NullArgument, "probs is null"));
        }
        let mut p = [0.0; 6];
        p.copy_from_slice(std::slice::from_raw_parts(probs, 6));
        let dist = lib(StanceDistribution::new(p))?;
        *out(out_value)? = lib(analytics::expected_stance(&dist))?;
        Ok(())
    })
}
