//! C ABI for the `negtype` library.
//!
//! Objects are opaque handles created by the `nt_metric_*` constructors and
//! `nt_analyze`, and released with the matching `*_free`. Every fallible call returns an
//! [`NtStatus`]; on failure [`nt_last_error`] describes the problem. Vertex
//! indices are 0-based; error messages number points from 1, like the
//! command-line tool.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use negtype::closed_forms::{gamma_cycle, gamma_discrete};
use negtype::gap::{analyze, EnumOptions, GapAnalysis, GapOptions, Method};
use negtype::metric::{
    gen_cycle, gen_discrete, gen_random_tree, path_metric, power_matrix, validate_metric, Edge,
    MetricSpace, WeightedGraph,
};
use negtype::{Error, SymMatrix, Tolerances, Verdict};

/// Status codes. Values 1 through 6 match the exit codes of the
/// command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NtStatus {
    Ok = 0,
    Failure = 1,
    ParseError = 2,
    NotAMetric = 3,
    PositiveDirectionMissing = 4,
    TooLarge = 5,
    OracleMismatch = 6,
    NullPointer = 7,
    InvalidArgument = 8,
    /// The requested value does not exist for this input, e.g. `Γ` of a
    /// space that is not of negative type.
    NoValue = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NtVerdict {
    NotNegativeType = 0,
    NegativeTypeNonStrict = 1,
    StrictNegativeType = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NtMethod {
    All = 0,
    Enumerate = 1,
    Opnorm = 2,
    Binary = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NtGapOptions {
    pub method: NtMethod,
    /// Largest size for exhaustive enumeration.
    pub max_n: usize,
    pub parallel: bool,
    /// Use branch-and-bound above `max_n`.
    pub bnb: bool,
    pub bnb_budget: u64,
    pub singular_tol: f64,
    pub eig_tol: f64,
    pub strict_tol: f64,
}

/// A validated finite metric space.
pub struct NtMetric {
    space: MetricSpace,
}

/// Classification and, for strict inputs, the gap.
pub struct NtAnalysis {
    inner: GapAnalysis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NtStatus {
    match e.exit_code() {
        2 => NtStatus::ParseError,
        3 => NtStatus::NotAMetric,
        4 => NtStatus::PositiveDirectionMissing,
        5 => NtStatus::TooLarge,
        6 => NtStatus::OracleMismatch,
        _ => match e {
            Error::InvalidSize(_) | Error::InvalidExponent(_) | Error::EvenCycle(_) => {
                NtStatus::InvalidArgument
            }
            _ => NtStatus::Failure,
        },
    }
}

struct Fail(NtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NtStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, recording the error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NtStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NtStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn in_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn emit_metric(space: MetricSpace, out: &mut *mut NtMetric) {
    *out = Box::into_raw(Box::new(NtMetric { space }));
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn nt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a metric space from a row-major `n × n` distance matrix.
///
/// # Safety
/// `distances` must point to `n * n` readable doubles and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_from_matrix(
    distances: *const f64,
    n: usize,
    out: *mut *mut NtMetric,
) -> NtStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Fail(NtStatus::InvalidArgument, format!("n = {n} is too large")))?;
        let d = in_slice(distances, len, "distances")?;
        let rows: Vec<Vec<f64>> = d.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        emit_metric(validate_metric(&SymMatrix::from_rows(&rows)?)?, out);
        Ok(())
    })
}

/// Builds the shortest-path metric of a connected weighted graph on `n`
/// vertices with `m` edges `(from[k], to[k], weight[k])`.
///
/// # Safety
/// `from`, `to` and `weight` must each point to `m` readable elements and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_from_edges(
    n: usize,
    from: *const usize,
    to: *const usize,
    weight: *const f64,
    m: usize,
    out: *mut *mut NtMetric,
) -> NtStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let from = in_slice(from, m, "from")?;
        let to = in_slice(to, m, "to")?;
        let weight = in_slice(weight, m, "weight")?;
        let edges = (0..m)
            .map(|k| Edge {
                i: from[k],
                j: to[k],
                w: weight[k],
            })
            .collect();
        emit_metric(path_metric(&WeightedGraph::new(n, edges)?)?, out);
        Ok(())
    })
}

/// The discrete metric space on `n` points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_discrete(n: usize, out: *mut *mut NtMetric) -> NtStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        emit_metric(gen_discrete(n)?, out);
        Ok(())
    })
}

/// The unit-weight cycle on `n` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_cycle(n: usize, out: *mut *mut NtMetric) -> NtStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        emit_metric(path_metric(&gen_cycle(n)?)?, out);
        Ok(())
    })
}

/// A seeded random weighted tree on `n` vertices with weights drawn
/// uniformly from `[weight_min, weight_max]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_random_tree(
    n: usize,
    weight_min: f64,
    weight_max: f64,
    seed: u64,
    out: *mut *mut NtMetric,
) -> NtStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        emit_metric(
            path_metric(&gen_random_tree(n, (weight_min, weight_max), seed)?)?,
            out,
        );
        Ok(())
    })
}

/// Number of distinct points; zero for a null handle.
///
/// # Safety
/// `metric` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_len(metric: *const NtMetric) -> usize {
    metric.as_ref().map_or(0, |m| m.space.n())
}

/// Distance between points `i` and `j`.
///
/// # Safety
/// `metric` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_distance(
    metric: *const NtMetric,
    i: usize,
    j: usize,
    out: *mut f64,
) -> NtStatus {
    guard(|| {
        let m = metric.as_ref().ok_or_else(|| null("metric"))?;
        let out = out_ref(out, "out")?;
        let n = m.space.n();
        if i >= n || j >= n {
            return Err(Fail(
                NtStatus::InvalidArgument,
                format!("index out of range for n = {n}"),
            ));
        }
        *out = m.space.d(i, j);
        Ok(())
    })
}

/// # Safety
/// `metric` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nt_metric_free(metric: *mut NtMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Default options: all three formulas, enumeration up to n = 24 in
/// parallel, no branch-and-bound.
#[no_mangle]
pub extern "C" fn nt_gap_options_default() -> NtGapOptions {
    let g = GapOptions::default();
    NtGapOptions {
        method: NtMethod::All,
        max_n: g.enumeration.max_n,
        parallel: g.enumeration.parallel,
        bnb: g.bnb,
        bnb_budget: g.bnb_budget,
        singular_tol: g.tols.singular,
        eig_tol: g.tols.eig,
        strict_tol: g.tols.strict,
    }
}

fn gap_options(o: &NtGapOptions) -> GapOptions {
    GapOptions {
        method: match o.method {
            NtMethod::All => Method::All,
            NtMethod::Enumerate => Method::Enumerate,
            NtMethod::Opnorm => Method::Opnorm,
            NtMethod::Binary => Method::Binary,
        },
        enumeration: EnumOptions {
            max_n: o.max_n,
            parallel: o.parallel,
        },
        bnb: o.bnb,
        bnb_budget: o.bnb_budget,
        tols: Tolerances {
            singular: o.singular_tol,
            eig: o.eig_tol,
            strict: o.strict_tol,
        },
    }
}

/// Classifies `metric` at exponent `p` and computes the gap for strict
/// inputs. `options` may be null for the defaults.
///
/// # Safety
/// `metric` must be a live handle, `options` null or readable, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn nt_analyze(
    metric: *const NtMetric,
    p: f64,
    options: *const NtGapOptions,
    out: *mut *mut NtAnalysis,
) -> NtStatus {
    guard(|| {
        let m = metric.as_ref().ok_or_else(|| null("metric"))?;
        let out = out_ref(out, "out")?;
        let opts = options.as_ref().map(gap_options).unwrap_or_default();
        let inner = analyze(&power_matrix(&m.space, p)?, &opts)?;
        *out = Box::into_raw(Box::new(NtAnalysis { inner }));
        Ok(())
    })
}

/// # Safety
/// `analysis` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nt_analysis_free(analysis: *mut NtAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

unsafe fn analysis<'a>(a: *const NtAnalysis) -> Result<&'a GapAnalysis, Fail> {
    a.as_ref().map(|a| &a.inner).ok_or_else(|| null("analysis"))
}

/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nt_analysis_verdict(
    analysis: *const NtAnalysis,
    out: *mut NtVerdict,
) -> NtStatus {
    guard(|| {
        let a = self::analysis(analysis)?;
        *out_ref(out, "out")? = match a.report.verdict {
            Verdict::NotNegativeType => NtVerdict::NotNegativeType,
            Verdict::NegativeTypeNonStrict => NtVerdict::NegativeTypeNonStrict,
            Verdict::StrictNegativeType => NtVerdict::StrictNegativeType,
        };
        Ok(())
    })
}

/// `Γ`; zero for non-strict inputs, [`NtStatus::NoValue`] when the space is
/// not of negative type.
///
/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nt_analysis_gamma(analysis: *const NtAnalysis, out: *mut f64) -> NtStatus {
    guard(|| {
        let a = self::analysis(analysis)?;
        let out = out_ref(out, "out")?;
        *out = a
            .gamma()
            .ok_or_else(|| Fail(NtStatus::NoValue, "not of negative type: no gap".into()))?;
        Ok(())
    })
}

fn gap(a: &GapAnalysis) -> Result<&negtype::GapResult, Fail> {
    a.gap.as_ref().ok_or_else(|| {
        Fail(
            NtStatus::NoValue,
            "no gap computed: input is not of strict negative type".into(),
        )
    })
}

/// `β = 2/Γ`, strict inputs only.
///
/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nt_analysis_beta(analysis: *const NtAnalysis, out: *mut f64) -> NtStatus {
    guard(|| {
        let g = gap(self::analysis(analysis)?)?;
        *out_ref(out, "out")? = g.beta;
        Ok(())
    })
}

/// False when branch-and-bound ran out of budget and `β` is a lower bound.
///
/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nt_analysis_certified(
    analysis: *const NtAnalysis,
    out: *mut bool,
) -> NtStatus {
    guard(|| {
        let g = gap(self::analysis(analysis)?)?;
        *out_ref(out, "out")? = g.certified;
        Ok(())
    })
}

/// Copies the maximizing sign vector (entries ±1, first entry +1) into
/// `buf`, which must hold at least `len` = number of points entries.
///
/// # Safety
/// `analysis` must be a live handle and `buf` must point to `len` writable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn nt_analysis_sign_vector(
    analysis: *const NtAnalysis,
    buf: *mut i8,
    len: usize,
) -> NtStatus {
    guard(|| {
        let g = gap(self::analysis(analysis)?)?;
        copy_out(&g.s_star, buf, len)
    })
}

/// Copies the extremal vector `y₀` (with `‖y₀‖₁ = β`) into `buf`.
///
/// # Safety
/// `analysis` must be a live handle and `buf` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn nt_analysis_witness(
    analysis: *const NtAnalysis,
    buf: *mut f64,
    len: usize,
) -> NtStatus {
    guard(|| {
        let g = gap(self::analysis(analysis)?)?;
        copy_out(&g.witness_y0, buf, len)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, len: usize) -> Result<(), Fail> {
    if len < src.len() {
        return Err(Fail(
            NtStatus::BufferTooSmall,
            format!("buffer holds {len} entries, need {}", src.len()),
        ));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    slice::from_raw_parts_mut(buf, src.len()).copy_from_slice(src);
    Ok(())
}

/// Closed-form `Γ` of the discrete space on `n` points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nt_closed_form_gamma_discrete(n: usize, out: *mut f64) -> NtStatus {
    guard(|| {
        *out_ref(out, "out")? = gamma_discrete(n)?.gamma;
        Ok(())
    })
}

/// Closed-form `Γ` of the unit-weight cycle on `n` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nt_closed_form_gamma_cycle(n: usize, out: *mut f64) -> NtStatus {
    guard(|| {
        *out_ref(out, "out")? = gamma_cycle(n)?.gamma;
        Ok(())
    })
}
