//! C ABI over the `gsh` library.
//!
//! Streams and samples are opaque handles created and destroyed through
//! this API. Every fallible function returns a [`GshStatus`]; on failure a
//! description is available from [`gsh_last_error_message`] on the same
//! thread. Out-parameters are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use gsh::{
    exact_count, ingest_edge_list, run, EdgeStream, Error, Mode, SampleEstimates, SampleState,
    SamplerConfig, Statistic,
};

/// Result codes. `GSH_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GshStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    EmptyGraph = 5,
    Unsupported = 6,
    Undefined = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GshStatistic {
    Edges = 0,
    Triangles = 1,
    Wedges = 2,
    Clustering = 3,
    Nodes = 4,
}

impl From<GshStatistic> for Statistic {
    fn from(s: GshStatistic) -> Statistic {
        match s {
            GshStatistic::Edges => Statistic::Edges,
            GshStatistic::Triangles => Statistic::Triangles,
            GshStatistic::Wedges => Statistic::Wedges,
            GshStatistic::Clustering => Statistic::Clustering,
            GshStatistic::Nodes => Statistic::Nodes,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GshSamplerConfig {
    pub p: f64,
    pub q: f64,
    /// When set, edges that close a held triangle are kept with probability 1.
    pub triangle_closure: bool,
    pub seed: u64,
}

/// One held edge. `class_bits` is 0 for p, 1 for q, 2 for probability one.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GshSampledEdge {
    pub a: u64,
    pub b: u64,
    pub class_bits: u8,
    /// Zero-based stream position.
    pub arrival: usize,
    pub probability: f64,
}

/// `variance`, `lb` and `ub` are meaningful only when `has_variance` is set.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GshEstimate {
    pub estimate: f64,
    pub variance: f64,
    pub lb: f64,
    pub ub: f64,
    pub has_variance: bool,
    /// The clustering variance approximation was negative and clamped to 0.
    pub variance_clamped: bool,
}

/// `alpha` is meaningful only when `has_alpha` is set.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GshExact {
    pub n: u64,
    pub n_k: u64,
    pub n_t: u64,
    pub n_lambda: u64,
    pub alpha: f64,
    pub has_alpha: bool,
    pub density: f64,
}

/// An edge stream in arrival order.
pub struct GshStream(EdgeStream);

/// A held sample; estimates are computed on first use and cached.
pub struct GshSample {
    state: SampleState,
    estimates: OnceLock<SampleEstimates>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GshStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => GshStatus::Parse,
            Error::Io(_) | Error::Read { .. } | Error::Json(_) => GshStatus::Io,
            Error::EmptyGraph | Error::EmptyStream => GshStatus::EmptyGraph,
            Error::DirectedTriangleClosure | Error::UnsupportedDirected(_) => {
                GshStatus::Unsupported
            }
            Error::Undefined(_) => GshStatus::Undefined,
            _ => GshStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GshStatus::NullPointer, format!("{what} is null"))
}

fn set_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GshStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            GshStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(Some(message));
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(Some(format!("panic: {message}")));
            GshStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| null(what))
}

fn mode(directed: bool) -> Mode {
    if directed {
        Mode::Directed
    } else {
        Mode::Undirected
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the last failed call on this thread, or null after a
/// successful call. The pointer stays valid until the next call into this
/// library from the same thread.
#[no_mangle]
pub extern "C" fn gsh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gsh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reads an edge list file: two integer node ids per line, `#` and `%`
/// comment lines, extra columns ignored, self-loops and duplicates dropped.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsh_stream_from_file(
    path: *const c_char,
    directed: bool,
    out: *mut *mut GshStream,
) -> GshStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(GshStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let file = File::open(Path::new(path)).map_err(|source| Error::Read {
            path: path.into(),
            source,
        })?;
        let (stream, _) = ingest_edge_list(BufReader::new(file), mode(directed))?;
        *out = boxed(GshStream(stream));
        Ok(())
    })
}

/// Builds a stream from `n_edges` pairs laid out as
/// `[a0, b0, a1, b1, ...]`. Self-loops are rejected; duplicates are dropped.
///
/// # Safety
/// `pairs` must point to `2 * n_edges` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn gsh_stream_from_edges(
    pairs: *const u64,
    n_edges: usize,
    directed: bool,
    out: *mut *mut GshStream,
) -> GshStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if pairs.is_null() {
            return Err(null("pairs"));
        }
        let flat = std::slice::from_raw_parts(pairs, 2 * n_edges);
        let pairs: Vec<(u64, u64)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let stream = EdgeStream::from_pairs(mode(directed), &pairs)?;
        if stream.is_empty() {
            return Err(Error::EmptyGraph.into());
        }
        *out = boxed(GshStream(stream));
        Ok(())
    })
}

/// Number of edges; 0 for a null handle.
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsh_stream_len(stream: *const GshStream) -> usize {
    stream.as_ref().map_or(0, |s| s.0.len())
}

/// A new stream holding a seeded uniform permutation of `stream`.
///
/// # Safety
/// `stream` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsh_stream_permute(
    stream: *const GshStream,
    seed: u64,
    out: *mut *mut GshStream,
) -> GshStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let stream = stream.as_ref().ok_or_else(|| null("stream"))?;
        *out = boxed(GshStream(stream.0.permute(seed)));
        Ok(())
    })
}

/// Exact counts of the full stream.
///
/// # Safety
/// `stream` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsh_stream_exact(
    stream: *const GshStream,
    out: *mut GshExact,
) -> GshStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let stream = stream.as_ref().ok_or_else(|| null("stream"))?;
        let e = exact_count(&stream.0);
        *out = GshExact {
            n: e.n,
            n_k: e.n_k,
            n_t: e.n_t,
            n_lambda: e.n_lambda,
            alpha: e.alpha.unwrap_or(f64::NAN),
            has_alpha: e.alpha.is_some(),
            density: e.density,
        };
        Ok(())
    })
}

/// # Safety
/// `stream` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsh_stream_free(stream: *mut GshStream) {
    if !stream.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(stream))));
    }
}

/// One pass of the sampler over `stream` in its current order.
///
/// # Safety
/// `stream` must be a live handle, `config` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gsh_sample_run(
    stream: *const GshStream,
    config: *const GshSamplerConfig,
    out: *mut *mut GshSample,
) -> GshStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let stream = stream.as_ref().ok_or_else(|| null("stream"))?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let config = SamplerConfig {
            p: c.p,
            q: c.q,
            triangle_closure: c.triangle_closure,
            seed: c.seed,
        };
        let state = run(&stream.0, config)?;
        *out = boxed(GshSample {
            state,
            estimates: OnceLock::new(),
        });
        Ok(())
    })
}

/// Number of held edges; 0 for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsh_sample_len(sample: *const GshSample) -> usize {
    sample.as_ref().map_or(0, |s| s.state.len())
}

/// The `index`-th held edge in arrival order.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsh_sample_edge(
    sample: *const GshSample,
    index: usize,
    out: *mut GshSampledEdge,
) -> GshStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let sample = sample.as_ref().ok_or_else(|| null("sample"))?;
        let held = sample.state.held().get(index).ok_or_else(|| {
            Failure(
                GshStatus::InvalidArgument,
                format!(
                    "index {index} out of range for {} held edges",
                    sample.state.len()
                ),
            )
        })?;
        *out = GshSampledEdge {
            a: held.edge.a.0,
            b: held.edge.b.0,
            class_bits: held.class.bits(),
            arrival: held.arrival,
            probability: sample.state.probability(index),
        };
        Ok(())
    })
}

/// Estimate, variance estimate and 95% bounds of one statistic. Returns
/// `GSH_STATUS_UNDEFINED` for clustering when no wedge was sampled and
/// `GSH_STATUS_UNSUPPORTED` for triangle statistics of a directed sample.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsh_sample_estimate(
    sample: *const GshSample,
    statistic: GshStatistic,
    out: *mut GshEstimate,
) -> GshStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let sample = sample.as_ref().ok_or_else(|| null("sample"))?;
        let estimates = sample
            .estimates
            .get_or_init(|| SampleEstimates::compute(&sample.state, true));
        let report = estimates.report(statistic.into())?;
        let estimate = report
            .estimate
            .ok_or(Error::Undefined("clustering coefficient"))?;
        *out = GshEstimate {
            estimate,
            variance: report.variance.unwrap_or(f64::NAN),
            lb: report.lb.unwrap_or(f64::NAN),
            ub: report.ub.unwrap_or(f64::NAN),
            has_variance: report.variance.is_some(),
            variance_clamped: report.variance_clamped,
        };
        Ok(())
    })
}

/// # Safety
/// `sample` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsh_sample_free(sample: *mut GshSample) {
    if !sample.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sample))));
    }
}
