//! C interface to `topoband`.
//!
//! Models are opaque handles created from a spec string such as
//! `"model=qahe2d m=1"` and released with [`tb_model_free`]. Every fallible
//! call returns a [`TbStatus`]; on failure the message is available from
//! [`tb_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use topoband::greens::{g0_from_model, n3_invariant};
use topoband::invariants::{
    chern_number_2d, gauss_degree, second_chern_4d, winding_number_1d, winding_number_3d, z2_index_2d,
    z2_strong_3d,
};
use topoband::ktable::{is_even_entry, table_entry};
use topoband::models::d_vector_model;
use topoband::symmetry::{preset_unitary, CartanLabel, SymmetryCandidate, SymmetryKind};
use topoband::{build_model, BlochModel, Error, InvariantResult, ModelSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A precondition of the requested computation does not hold
    /// (gap closed, symmetry missing, grid too coarse, ...).
    Precondition = 3,
    NotConverged = 4,
    Internal = 5,
    Panic = 6,
}

/// Opaque model handle.
pub struct TbModel {
    inner: BlochModel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TbInvariant {
    pub raw: f64,
    pub value: i64,
    pub residual: f64,
    pub grid: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TbZ2Indices {
    pub strong: bool,
    pub weak: [bool; 3],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TbGroup {
    /// Number of Z summands.
    pub z: usize,
    /// Number of Z2 summands.
    pub z2: usize,
    /// Set when every realized Z value is even.
    pub even: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> TbStatus {
    match err {
        Error::NotConverged { .. } => TbStatus::NotConverged,
        Error::Io(_) | Error::Json(_) => TbStatus::Internal,
        Error::Parse(_) | Error::Usage(_) | Error::UnknownModel(_) | Error::UnknownParameter(_) | Error::UnknownLabel(_) => {
            TbStatus::InvalidArgument
        }
        _ => TbStatus::Precondition,
    }
}

fn guard<F: FnOnce() -> Result<(), TbStatus>>(f: F) -> TbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside topoband".into());
            TbStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, TbStatus>;
}

impl<T> OrStatus<T> for topoband::Result<T> {
    fn or_status(self) -> Result<T, TbStatus> {
        self.map_err(|e| {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        })
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TbStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(TbStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        TbStatus::InvalidArgument
    })
}

unsafe fn model_ref<'a>(m: *const TbModel) -> Result<&'a BlochModel, TbStatus> {
    if m.is_null() {
        set_error("null model handle".into());
        return Err(TbStatus::NullPointer);
    }
    Ok(&(*m).inner)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), TbStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(TbStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

fn to_c(r: &InvariantResult) -> TbInvariant {
    TbInvariant {
        raw: r.raw,
        value: r.value,
        residual: r.residual,
        grid: r.grid,
    }
}

fn candidate(kind: SymmetryKind, preset: &str, n: usize) -> topoband::Result<SymmetryCandidate> {
    SymmetryCandidate::new(kind, preset_unitary(preset, n)?)
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a registered model from a spec such as `"model=ssh1d t1=0 t2=1"`.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_model_new(spec: *const c_char, out: *mut *mut TbModel) -> TbStatus {
    guard(|| {
        let text = read_str(spec)?;
        let spec = text.parse::<ModelSpec>().or_status()?;
        let model = build_model(&spec).or_status()?;
        write_out(out, Box::into_raw(Box::new(TbModel { inner: model })))
    })
}

/// Releases a handle from [`tb_model_new`]. NULL is ignored.
///
/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_model_free(model: *mut TbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Momentum-space dimension of the model, 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_model_dim(model: *const TbModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.dim)
}

/// Number of orbitals, 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_model_n_orb(model: *const TbModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.n_orb)
}

/// First Chern number of a 2D model.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_chern_number(model: *const TbModel, grid: usize, out: *mut TbInvariant) -> TbStatus {
    guard(|| {
        let r = chern_number_2d(model_ref(model)?, grid).or_status()?;
        write_out(out, to_c(&r))
    })
}

/// Second Chern number of a 4D model.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_second_chern_number(model: *const TbModel, grid: usize, out: *mut TbInvariant) -> TbStatus {
    guard(|| {
        let r = second_chern_4d(model_ref(model)?, grid).or_status()?;
        write_out(out, to_c(&r))
    })
}

/// Winding number of a chiral model in one or three dimensions. `chiral` is a
/// preset name (`pauli_z`, ...) or inline row-major matrix entries.
///
/// # Safety
/// `model` must be a live handle, `chiral` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_winding_number(
    model: *const TbModel,
    chiral: *const c_char,
    grid: usize,
    out: *mut TbInvariant,
) -> TbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let s = candidate(SymmetryKind::Chiral, read_str(chiral)?, m.n_orb).or_status()?;
        let r = match m.dim {
            1 => winding_number_1d(m, &s, grid),
            _ => winding_number_3d(m, &s, grid),
        }
        .or_status()?;
        write_out(out, to_c(&r))
    })
}

/// Z2 index of a 2D time-reversal invariant model; `tr` names the unitary
/// part of Θ (`kramers`, ...).
///
/// # Safety
/// `model` must be a live handle, `tr` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_z2_index(model: *const TbModel, tr: *const c_char, grid: usize, out: *mut TbInvariant) -> TbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let t = candidate(SymmetryKind::TimeReversal, read_str(tr)?, m.n_orb).or_status()?;
        let r = z2_index_2d(m, &t, grid).or_status()?;
        write_out(out, to_c(&r))
    })
}

/// Strong and weak Z2 indices of a 3D time-reversal invariant model.
///
/// # Safety
/// `model` must be a live handle, `tr` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_z2_indices_3d(model: *const TbModel, tr: *const c_char, grid: usize, out: *mut TbZ2Indices) -> TbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let t = candidate(SymmetryKind::TimeReversal, read_str(tr)?, m.n_orb).or_status()?;
        let r = z2_strong_3d(m, &t, grid).or_status()?;
        write_out(
            out,
            TbZ2Indices {
                strong: r.strong,
                weak: r.weak,
            },
        )
    })
}

/// Degree of the normalized d-vector of a Dirac-type model given by spec.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_gauss_degree(spec: *const c_char, grid: usize, out: *mut TbInvariant) -> TbStatus {
    guard(|| {
        let spec = read_str(spec)?.parse::<ModelSpec>().or_status()?;
        let model = d_vector_model(&spec).or_status()?;
        let r = gauss_degree(&model, grid).or_status()?;
        write_out(out, to_c(&r))
    })
}

/// Green's-function invariant of the non-interacting Green's function of a
/// 2D model.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_n3_invariant(model: *const TbModel, kgrid: usize, wquad: usize, out: *mut TbInvariant) -> TbStatus {
    guard(|| {
        let g = g0_from_model(model_ref(model)?).or_status()?;
        let r = n3_invariant(&g, kgrid, wquad).or_status()?;
        write_out(out, to_c(&r))
    })
}

/// Classification group of Cartan class `label` in dimension `dim`.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_table_entry(label: *const c_char, dim: usize, out: *mut TbGroup) -> TbStatus {
    guard(|| {
        let label = read_str(label)?.parse::<CartanLabel>().or_status()?;
        let g = table_entry(label, dim);
        write_out(
            out,
            TbGroup {
                z: g.z,
                z2: g.z2,
                even: is_even_entry(label, dim),
            },
        )
    })
}
