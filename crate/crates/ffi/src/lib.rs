//! C ABI for evoboss.
//!
//! Objects are opaque handles created by `*_load`/`*_new`/`evoboss_run_*` and
//! released with the matching `*_free`. Fallible functions return an
//! [`EvobossStatus`] and write results through out-pointers; the message of
//! the last failure on the calling thread is available from
//! [`evoboss_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use evoboss::acquisition::expected_improvement;
use evoboss::baselines::{run_random, run_recombination, run_smw};
use evoboss::boes::{run_boes, RunConfig};
use evoboss::embeddings::{onehot_store, synth_store, EmbeddingStore};
use evoboss::evaluation::{ndcg, Gain};
use evoboss::landscape::{
    enumerate_variants, infer_positions, load_landscape, load_landscape_with_meta, Landscape,
    Variant,
};
use evoboss::trace::RunTrace;
use evoboss::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvobossStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    Budget = 5,
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvobossGain {
    Linear = 0,
    Exponential = 1,
}

/// Longest variant word a record can hold, including the terminating NUL.
pub const EVOBOSS_VARIANT_CAPACITY: usize = 16;

/// One screened variant of a trace.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct EvobossRecord {
    pub step: usize,
    /// NUL-terminated variant word.
    pub variant: [c_char; EVOBOSS_VARIANT_CAPACITY],
    pub fitness: f64,
    pub best: f64,
    /// NaN when the screen was not chosen by a fitted model.
    pub theta: f64,
}

pub struct EvobossLandscape(Landscape);
pub struct EvobossStore(EmbeddingStore);
pub struct EvobossTrace(RunTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EvobossStatus {
    match e {
        Error::Io { .. } => EvobossStatus::Io,
        Error::Parse { .. }
        | Error::StoreFormat(_)
        | Error::DuplicateVariant(_)
        | Error::DimensionMismatch { .. } => EvobossStatus::Format,
        Error::InvalidVariant { .. } | Error::InvalidInput(_) | Error::MissingEmbedding(_) => {
            EvobossStatus::InvalidArgument
        }
        Error::BudgetExhausted(_) | Error::DuplicateScreen(_) | Error::SearchSpaceExhausted => {
            EvobossStatus::Budget
        }
        Error::NotPositiveDefinite { .. } => EvobossStatus::Numerical,
    }
}

struct Failure(EvobossStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EvobossStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EvobossStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            EvobossStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(EvobossStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EvobossStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn start_variant(landscape: &Landscape, word: *const c_char) -> Result<Variant, Failure> {
    match opt_str_arg(word, "start")? {
        None => Ok(landscape.wild_type().clone()),
        Some(w) => Ok(Variant::parse(w)?),
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn evoboss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a `variant,fitness` CSV. `meta_path` may be NULL.
///
/// # Safety
/// Path arguments must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_landscape_load(
    csv_path: *const c_char,
    meta_path: *const c_char,
    out: *mut *mut EvobossLandscape,
) -> EvobossStatus {
    guard(|| {
        let csv = PathBuf::from(str_arg(csv_path, "csv_path")?);
        let landscape = match opt_str_arg(meta_path, "meta_path")? {
            Some(meta) => load_landscape_with_meta(&csv, meta)?,
            None => load_landscape(&csv, infer_positions(&csv)?)?,
        };
        put(out, EvobossLandscape(landscape))
    })
}

/// Number of mutated positions, or 0 for NULL.
///
/// # Safety
/// `landscape` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn evoboss_landscape_positions(landscape: *const EvobossLandscape) -> usize {
    landscape.as_ref().map_or(0, |l| l.0.n())
}

/// Fitness of `word`; unmeasured variants have fitness 0.
///
/// # Safety
/// `landscape` must be a live handle, `word` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_landscape_fitness(
    landscape: *const EvobossLandscape,
    word: *const c_char,
    out: *mut f64,
) -> EvobossStatus {
    guard(|| {
        let l = handle(landscape, "landscape")?;
        let v = Variant::parse(str_arg(word, "word")?)?;
        if v.len() != l.0.n() {
            return Err(Failure(
                EvobossStatus::InvalidArgument,
                format!("{v} does not have {} residues", l.0.n()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = l.0.fitness(&v);
        Ok(())
    })
}

/// # Safety
/// `landscape` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evoboss_landscape_free(landscape: *mut EvobossLandscape) {
    if !landscape.is_null() {
        drop(Box::from_raw(landscape));
    }
}

/// Loads a store from its index and matrix files.
///
/// # Safety
/// Path arguments must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_store_load(
    index_path: *const c_char,
    matrix_path: *const c_char,
    out: *mut *mut EvobossStore,
) -> EvobossStatus {
    guard(|| {
        let idx = str_arg(index_path, "index_path")?;
        let emb = str_arg(matrix_path, "matrix_path")?;
        put(out, EvobossStore(EmbeddingStore::load(idx, emb)?))
    })
}

/// Seeded synthetic store over all `20^n` variants.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_store_synthetic(
    n: usize,
    dim: usize,
    seed: u64,
    out: *mut *mut EvobossStore,
) -> EvobossStatus {
    guard(|| put(out, EvobossStore(synth_store(&enumerate_variants(n)?, dim, seed)?)))
}

/// One-hot store over all `20^n` variants.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_store_onehot(n: usize, out: *mut *mut EvobossStore) -> EvobossStatus {
    guard(|| put(out, EvobossStore(onehot_store(&enumerate_variants(n)?)?)))
}

/// # Safety
/// `store` must be a live handle; path arguments NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn evoboss_store_save(
    store: *const EvobossStore,
    index_path: *const c_char,
    matrix_path: *const c_char,
) -> EvobossStatus {
    guard(|| {
        let s = handle(store, "store")?;
        s.0.save(str_arg(index_path, "index_path")?, str_arg(matrix_path, "matrix_path")?)?;
        Ok(())
    })
}

/// # Safety
/// `store` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn evoboss_store_len(store: *const EvobossStore) -> usize {
    store.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `store` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn evoboss_store_dim(store: *const EvobossStore) -> usize {
    store.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `store` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evoboss_store_free(store: *mut EvobossStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Embedding-space Bayesian optimization with the default configuration.
/// `start` may be NULL for the wild type.
///
/// # Safety
/// Handles must be live; `start` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_run_boes(
    landscape: *const EvobossLandscape,
    store: *const EvobossStore,
    start: *const c_char,
    budget: usize,
    seed: u64,
    out: *mut *mut EvobossTrace,
) -> EvobossStatus {
    guard(|| {
        let l = handle(landscape, "landscape")?;
        let s = handle(store, "store")?;
        let config = RunConfig {
            seed,
            ..RunConfig::new(start_variant(&l.0, start)?, budget)
        };
        put(out, EvobossTrace(run_boes(&config, &l.0, &s.0)?))
    })
}

/// Single-mutation walk. `start` may be NULL for the wild type.
///
/// # Safety
/// `landscape` must be live; `start` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_run_smw(
    landscape: *const EvobossLandscape,
    start: *const c_char,
    budget: usize,
    seed: u64,
    out: *mut *mut EvobossTrace,
) -> EvobossStatus {
    guard(|| {
        let l = handle(landscape, "landscape")?;
        let v = start_variant(&l.0, start)?;
        put(out, EvobossTrace(run_smw(&l.0, &v, budget, seed)?))
    })
}

/// Single-mutant screen followed by recombination of the `top_k` best residues per position.
///
/// # Safety
/// `landscape` must be live; `start` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_run_recombination(
    landscape: *const EvobossLandscape,
    start: *const c_char,
    budget: usize,
    top_k: usize,
    seed: u64,
    out: *mut *mut EvobossTrace,
) -> EvobossStatus {
    guard(|| {
        let l = handle(landscape, "landscape")?;
        let v = start_variant(&l.0, start)?;
        put(out, EvobossTrace(run_recombination(&l.0, &v, budget, top_k, seed)?))
    })
}

/// # Safety
/// `landscape` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_run_random(
    landscape: *const EvobossLandscape,
    budget: usize,
    seed: u64,
    out: *mut *mut EvobossTrace,
) -> EvobossStatus {
    guard(|| {
        let l = handle(landscape, "landscape")?;
        put(out, EvobossTrace(run_random(&l.0, budget, seed)?))
    })
}

/// Reads a JSON-lines trace.
///
/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_trace_read(
    path: *const c_char,
    out: *mut *mut EvobossTrace,
) -> EvobossStatus {
    guard(|| put(out, EvobossTrace(RunTrace::read_jsonl(str_arg(path, "path")?)?)))
}

/// Number of screens in the trace, or 0 for NULL.
///
/// # Safety
/// `trace` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn evoboss_trace_len(trace: *const EvobossTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_trace_record(
    trace: *const EvobossTrace,
    index: usize,
    out: *mut EvobossRecord,
) -> EvobossStatus {
    guard(|| {
        let t = handle(trace, "trace")?;
        let r = t.0.records.get(index).ok_or_else(|| {
            Failure(
                EvobossStatus::InvalidArgument,
                format!("record {index} out of range for a trace of {}", t.0.len()),
            )
        })?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut variant = [0 as c_char; EVOBOSS_VARIANT_CAPACITY];
        for (dst, b) in variant.iter_mut().zip(r.variant.bytes().take(EVOBOSS_VARIANT_CAPACITY - 1)) {
            *dst = b as c_char;
        }
        *out = EvobossRecord {
            step: r.step,
            variant,
            fitness: r.fitness,
            best: r.best,
            theta: r.theta.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn evoboss_trace_write(
    trace: *const EvobossTrace,
    path: *const c_char,
) -> EvobossStatus {
    guard(|| {
        let t = handle(trace, "trace")?;
        t.0.write_jsonl(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `trace` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evoboss_trace_free(trace: *mut EvobossTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// NDCG of the ranking induced by `predicted` against `truth`, both of length `len`.
///
/// # Safety
/// `predicted` and `truth` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evoboss_ndcg(
    predicted: *const f64,
    truth: *const f64,
    len: usize,
    gain: EvobossGain,
    out: *mut f64,
) -> EvobossStatus {
    guard(|| {
        if predicted.is_null() || truth.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let gain = match gain {
            EvobossGain::Linear => Gain::Linear,
            EvobossGain::Exponential => Gain::Exponential,
        };
        let p = std::slice::from_raw_parts(predicted, len);
        let t = std::slice::from_raw_parts(truth, len);
        *out = ndcg(p, t, gain)?;
        Ok(())
    })
}

/// Expected improvement over `f_best` of a Gaussian with mean `mu` and variance `var`.
#[no_mangle]
pub extern "C" fn evoboss_expected_improvement(mu: f64, var: f64, f_best: f64) -> f64 {
    expected_improvement(mu, var, f_best)
}
