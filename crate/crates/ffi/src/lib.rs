//! C ABI for `fpdim`.
//!
//! Every function returns an [`FpdimStatus`]; results go through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`fpdim_last_error`]. Partitions are passed as a pointer to their parts
//! and a length; trailing zeros are allowed. Product tables live behind the
//! opaque [`FpdimTable`] handle, released with [`fpdim_table_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fpdim::closed_form::rho_closed_form;
use fpdim::lr::lr_coefficient;
use fpdim::partition::hook_dimension;
use fpdim::quantum::{build_table_shared, multiplication_matrix, ProductMode, ProductTable};
use fpdim::spectral::{spectral_radius, SparseMatrix, SpectralOptions};
use fpdim::{Error, GrContext, Partition};

/// Product mode selector: quantum product at `q = 1`.
pub const FPDIM_MODE_QUANTUM: u32 = 0;
/// Product mode selector: classical cup product truncated to the box.
pub const FPDIM_MODE_CLASSICAL: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpdimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    InvariantViolation = 4,
    Overflow = 5,
    NonConvergence = 6,
    Cache = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// A quantum or classical product table of one Grassmannian.
pub struct FpdimTable {
    table: ProductTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> FpdimStatus {
    match err {
        Error::Parameter(_) => FpdimStatus::InvalidArgument,
        Error::Domain(_) => FpdimStatus::Domain,
        Error::InvariantViolation(_) => FpdimStatus::InvariantViolation,
        Error::Overflow(_) => FpdimStatus::Overflow,
        Error::NonConvergence { .. } => FpdimStatus::NonConvergence,
        Error::Cache(_) => FpdimStatus::Cache,
        Error::Io(_) => FpdimStatus::Io,
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (FpdimStatus, String)>) -> FpdimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpdimStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FpdimStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (FpdimStatus, String)>;
}

impl<T> IntoFfi<T> for fpdim::Result<T> {
    fn ffi(self) -> Result<T, (FpdimStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (FpdimStatus, String) {
    (FpdimStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `parts` must point to `len` readable values, or `len` must be 0.
unsafe fn read_partition(
    parts: *const usize,
    len: usize,
    what: &str,
) -> Result<Partition, (FpdimStatus, String)> {
    let slice = if len == 0 {
        &[][..]
    } else if parts.is_null() {
        return Err(null(what));
    } else {
        std::slice::from_raw_parts(parts, len)
    };
    Partition::new(slice.to_vec()).ffi()
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (FpdimStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn options(tol: f64, max_iter: usize) -> SpectralOptions {
    SpectralOptions { tol, max_iter }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fpdim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fpdim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// `ρ_{k,λ}(x)` by the closed form; requires `x > k + λ_1 − 1`.
///
/// # Safety
/// `parts` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_rho(
    k: usize,
    parts: *const usize,
    len: usize,
    x: f64,
    out: *mut f64,
) -> FpdimStatus {
    guard(|| {
        let lambda = read_partition(parts, len, "parts")?;
        write(out, rho_closed_form(&lambda, k, x).ffi()?, "out")
    })
}

/// `dim S_λ(C^k)`; `FPDIM_STATUS_OVERFLOW` if it does not fit in 64 bits.
///
/// # Safety
/// `parts` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_hook_dimension(
    k: usize,
    parts: *const usize,
    len: usize,
    out: *mut u64,
) -> FpdimStatus {
    guard(|| {
        let lambda = read_partition(parts, len, "parts")?;
        let dim = hook_dimension(&lambda, k).ffi()?;
        let dim = u64::try_from(&dim).map_err(|_| {
            (
                FpdimStatus::Overflow,
                format!("dim S_{lambda}(C^{k}) = {dim} exceeds 64 bits"),
            )
        })?;
        write(out, dim, "out")
    })
}

/// Littlewood–Richardson coefficient `c^ν_{λμ}`.
///
/// # Safety
/// Each part pointer must point to its length in values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_lr_coefficient(
    lambda: *const usize,
    lambda_len: usize,
    mu: *const usize,
    mu_len: usize,
    nu: *const usize,
    nu_len: usize,
    out: *mut u64,
) -> FpdimStatus {
    guard(|| {
        let lambda = read_partition(lambda, lambda_len, "lambda")?;
        let mu = read_partition(mu, mu_len, "mu")?;
        let nu = read_partition(nu, nu_len, "nu")?;
        write(out, lr_coefficient(&lambda, &mu, &nu), "out")
    })
}

/// Spectral radius of a nonnegative `dim × dim` row-major matrix.
///
/// # Safety
/// `entries` must point to `dim * dim` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_spectral_radius(
    dim: usize,
    entries: *const f64,
    tol: f64,
    max_iter: usize,
    out: *mut f64,
) -> FpdimStatus {
    guard(|| {
        let count = dim
            .checked_mul(dim)
            .ok_or_else(|| (FpdimStatus::Overflow, "matrix size overflows".to_string()))?;
        if dim == 0 {
            return Err((FpdimStatus::InvalidArgument, "matrix dimension is 0".into()));
        }
        if entries.is_null() {
            return Err(null("entries"));
        }
        let values = std::slice::from_raw_parts(entries, count);
        let rows: Vec<Vec<f64>> = values.chunks(dim).map(<[f64]>::to_vec).collect();
        let est =
            spectral_radius(&SparseMatrix::from_dense(&rows), &options(tol, max_iter)).ffi()?;
        write(out, est.radius, "out")
    })
}

/// Builds the product table of `Gr(k, n)` in the given `FPDIM_MODE_*`.
///
/// # Safety
/// `out` must be writable. The handle must be released with `fpdim_table_free`.
#[no_mangle]
pub unsafe extern "C" fn fpdim_table_new(
    k: usize,
    n: usize,
    mode: u32,
    out: *mut *mut FpdimTable,
) -> FpdimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mode = match mode {
            FPDIM_MODE_QUANTUM => ProductMode::Quantum,
            FPDIM_MODE_CLASSICAL => ProductMode::ClassicalTruncated,
            other => {
                return Err((
                    FpdimStatus::InvalidArgument,
                    format!("unknown mode {other}"),
                ))
            }
        };
        let ctx = GrContext::new(k, n).ffi()?;
        let table = build_table_shared(ctx.into(), mode).ffi()?;
        out.write(Box::into_raw(Box::new(FpdimTable { table })));
        Ok(())
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must come from `fpdim_table_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fpdim_table_free(table: *mut FpdimTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// # Safety
/// `table` must be null or a live handle.
unsafe fn table_ref<'a>(
    table: *const FpdimTable,
) -> Result<&'a ProductTable, (FpdimStatus, String)> {
    table
        .as_ref()
        .map(|t| &t.table)
        .ok_or_else(|| null("table"))
}

fn check_index(table: &ProductTable, i: usize) -> Result<(), (FpdimStatus, String)> {
    if i < table.rank() {
        Ok(())
    } else {
        Err((
            FpdimStatus::InvalidArgument,
            format!("index {i} out of range for rank {}", table.rank()),
        ))
    }
}

/// Number of Schubert classes in the table's basis.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_table_rank(
    table: *const FpdimTable,
    out: *mut usize,
) -> FpdimStatus {
    guard(|| write(out, table_ref(table)?.rank(), "out"))
}

/// Copies the parts of basis element `index` into `parts` and stores their
/// count in `out_len`. With too small a buffer, returns
/// `FPDIM_STATUS_BUFFER_TOO_SMALL` and still stores the required length.
///
/// # Safety
/// `table` must be a live handle; `parts` must have room for `capacity`
/// values (or be null with `capacity` 0); `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_table_basis_element(
    table: *const FpdimTable,
    index: usize,
    parts: *mut usize,
    capacity: usize,
    out_len: *mut usize,
) -> FpdimStatus {
    guard(|| {
        let table = table_ref(table)?;
        check_index(table, index)?;
        let lambda = &table.ctx().basis()[index];
        write(out_len, lambda.length(), "out_len")?;
        if lambda.length() > capacity {
            return Err((
                FpdimStatus::BufferTooSmall,
                format!("need room for {} parts", lambda.length()),
            ));
        }
        if lambda.length() > 0 {
            if parts.is_null() {
                return Err(null("parts"));
            }
            ptr::copy_nonoverlapping(lambda.parts().as_ptr(), parts, lambda.length());
        }
        Ok(())
    })
}

/// Structure constant: coefficient of `q^d σ_ν` in `σ_i σ_j`, all given by
/// basis index.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_table_coefficient(
    table: *const FpdimTable,
    i: usize,
    j: usize,
    nu: usize,
    d: usize,
    out: *mut u64,
) -> FpdimStatus {
    guard(|| {
        let table = table_ref(table)?;
        for idx in [i, j, nu] {
            check_index(table, idx)?;
        }
        let nu = &table.ctx().basis()[nu];
        write(out, table.get(i, j).coefficient(nu, d), "out")
    })
}

/// Frobenius–Perron dimension of basis element `index`: the spectral radius
/// of its multiplication matrix at `q = 1`.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpdim_table_fpdim(
    table: *const FpdimTable,
    index: usize,
    tol: f64,
    max_iter: usize,
    out: *mut f64,
) -> FpdimStatus {
    guard(|| {
        let table = table_ref(table)?;
        check_index(table, index)?;
        let lambda = &table.ctx().basis()[index];
        let matrix = multiplication_matrix(lambda, table).ffi()?;
        let est = spectral_radius(&matrix.to_sparse(), &options(tol, max_iter)).ffi()?;
        write(out, est.radius, "out")
    })
}
