//! C ABI for `moving_box`.
//!
//! Objects are opaque heap handles created by `mb_*_new`/`mb_law_*` and
//! released with the matching `mb_*_free`. Every fallible call returns an
//! [`MbStatus`]; the message of the most recent failure on the calling
//! thread is available through [`mb_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use moving_box::verify::fd_spectrum;
use moving_box::{BoundaryLaw, Error, Family, MovingSolution, PotentialModel};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidLaw = 2,
    OutsideHorizon = 3,
    OutsideBox = 4,
    Singular = 5,
    DeletedLevel = 6,
    Unsupported = 7,
    Numerical = 8,
    InvalidArgument = 9,
    Panic = 10,
}

/// Potential family selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbFamily {
    Well = 0,
    Susy1 = 1,
    Susy2J0 = 2,
    Susy2J1 = 3,
}

impl From<MbFamily> for Family {
    fn from(f: MbFamily) -> Self {
        Family::ALL[f as usize]
    }
}

/// Boundary law handle.
pub struct MbLaw(BoundaryLaw);

/// Fixed-domain potential handle.
pub struct MbModel(PotentialModel);

/// Moving-wall wavefunction handle.
pub struct MbSolution(MovingSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MbStatus {
    match err {
        Error::InvalidLaw(_) => MbStatus::InvalidLaw,
        Error::OutsideHorizon { .. } => MbStatus::OutsideHorizon,
        Error::OutsideBox { .. } => MbStatus::OutsideBox,
        Error::Singular(_) => MbStatus::Singular,
        Error::DeletedLevel(_) => MbStatus::DeletedLevel,
        Error::CaseIComposite | Error::UnsupportedSeed(_) => MbStatus::Unsupported,
        Error::NodalSeed(_)
        | Error::VanishingWronskian(_)
        | Error::VanishingBeta(_)
        | Error::Quadrature(_)
        | Error::Eigensolver(_) => MbStatus::Numerical,
        Error::InvalidGrid(_) | Error::InvalidSuperposition(_) | Error::InvalidArgument(_) => {
            MbStatus::InvalidArgument
        }
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F>(f: F) -> MbStatus
where
    F: FnOnce() -> Result<(), MbError>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MbStatus::Ok,
        Ok(Err(MbError::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            MbStatus::NullPointer
        }
        Ok(Err(MbError::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MbStatus::Panic
        }
    }
}

enum MbError {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for MbError {
    fn from(e: Error) -> Self {
        MbError::Lib(e)
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, MbError> {
    p.as_ref().ok_or(MbError::Null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &'static str) -> Result<(), MbError> {
    if p.is_null() {
        return Err(MbError::Null(what));
    }
    p.write(value);
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// including the terminator, or 0 when no error has been recorded.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn mb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// `L(t) = sqrt(λt² + μt + ν)` on `[0, t_max]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_law_case1(lambda: f64, mu: f64, nu: f64, t_max: f64, out: *mut *mut MbLaw) -> MbStatus {
    guard(|| {
        let law = BoundaryLaw::case1(lambda, mu, nu, t_max)?;
        write(out, Box::into_raw(Box::new(MbLaw(law))), "out")
    })
}

/// `L(t) = L0 + v t` on `[0, t_max]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_law_linear(l0: f64, v: f64, t_max: f64, out: *mut *mut MbLaw) -> MbStatus {
    guard(|| {
        let law = BoundaryLaw::linear(l0, v, t_max)?;
        write(out, Box::into_raw(Box::new(MbLaw(law))), "out")
    })
}

/// # Safety
/// `law` must come from an `mb_law_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mb_law_free(law: *mut MbLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// `L`, `L̇` and `L̈` at time `t`. Any output pointer may be null.
///
/// # Safety
/// `law` must be a live handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn mb_law_eval(
    law: *const MbLaw,
    t: f64,
    length: *mut f64,
    velocity: *mut f64,
    acceleration: *mut f64,
) -> MbStatus {
    guard(|| {
        let s = as_ref(law, "law")?.0.eval(t)?;
        for (p, v) in [(length, s.length), (velocity, s.velocity), (acceleration, s.acceleration)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Rescaled clock `τ(t) = ∫₀ᵗ ds / L²`.
///
/// # Safety
/// `law` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_law_tau(law: *const MbLaw, t: f64, out: *mut f64) -> MbStatus {
    guard(|| {
        let tau = as_ref(law, "law")?.0.tau(t)?;
        write(out, tau, "out")
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_model_new(family: MbFamily, out: *mut *mut MbModel) -> MbStatus {
    guard(|| {
        let model = PotentialModel::new(family.into());
        write(out, Box::into_raw(Box::new(MbModel(model))), "out")
    })
}

/// Copy of `model` with the harmonic term `c1 q²/4` added. Such models
/// only support potential evaluation and the numerical spectrum.
///
/// # Safety
/// `model` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_model_with_case1(model: *const MbModel, c1: f64, out: *mut *mut MbModel) -> MbStatus {
    guard(|| {
        let m = as_ref(model, "model")?.0.clone().with_case1(c1);
        write(out, Box::into_raw(Box::new(MbModel(m))), "out")
    })
}

/// # Safety
/// `model` must come from `mb_model_*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mb_model_free(model: *mut MbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Fixed-domain potential at `q`.
///
/// # Safety
/// `model` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_model_potential(model: *const MbModel, q: f64, out: *mut f64) -> MbStatus {
    guard(|| {
        let v = as_ref(model, "model")?.0.potential(q)?;
        write(out, v, "out")
    })
}

/// Energy of level `n`.
///
/// # Safety
/// `model` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_model_energy(model: *const MbModel, n: usize, out: *mut f64) -> MbStatus {
    guard(|| {
        let e = as_ref(model, "model")?.0.energy(n)?;
        write(out, e, "out")
    })
}

/// Normalized stationary mode `Q_n(q)`.
///
/// # Safety
/// `model` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_model_mode_value(model: *const MbModel, n: usize, q: f64, out: *mut f64) -> MbStatus {
    guard(|| {
        let v = as_ref(model, "model")?.0.mode(n)?.eval(q)?;
        write(out, v, "out")
    })
}

/// Lowest `k` finite-difference eigenvalues (Richardson-extrapolated
/// between `n_x` and `2 n_x`), written to `out[0..k]`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for `k` doubles.
#[no_mangle]
pub unsafe extern "C" fn mb_fd_spectrum(model: *const MbModel, n_x: usize, k: usize, out: *mut f64) -> MbStatus {
    guard(|| {
        let m = as_ref(model, "model")?;
        if out.is_null() {
            return Err(MbError::Null("out"));
        }
        let values = fd_spectrum(&m.0, n_x, k)?;
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

/// Superposition `Σ c_n ψ_n` with `c_n = coeff_re[i] + i·coeff_im[i]` for
/// `n = levels[i]`, normalized on construction. `coeff_im` may be null.
///
/// # Safety
/// Handles must be live; arrays must hold `count` elements; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_solution_new(
    model: *const MbModel,
    law: *const MbLaw,
    levels: *const usize,
    coeff_re: *const f64,
    coeff_im: *const f64,
    count: usize,
    out: *mut *mut MbSolution,
) -> MbStatus {
    guard(|| {
        let m = as_ref(model, "model")?;
        let l = as_ref(law, "law")?;
        if count > 0 && (levels.is_null() || coeff_re.is_null()) {
            return Err(MbError::Null("levels/coeff_re"));
        }
        let coeffs: Vec<(usize, Complex64)> = (0..count)
            .map(|i| {
                let im = if coeff_im.is_null() { 0.0 } else { *coeff_im.add(i) };
                (*levels.add(i), Complex64::new(*coeff_re.add(i), im))
            })
            .collect();
        let sol = MovingSolution::superpose(&m.0, &l.0, &coeffs)?;
        write(out, Box::into_raw(Box::new(MbSolution(sol))), "out")
    })
}

/// # Safety
/// `sol` must come from `mb_solution_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mb_solution_free(sol: *mut MbSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// `ψ(x, t)`.
///
/// # Safety
/// `sol` must be a live handle; `re` and `im` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_solution_psi(sol: *const MbSolution, t: f64, x: f64, re: *mut f64, im: *mut f64) -> MbStatus {
    guard(|| {
        let psi = as_ref(sol, "solution")?.0.psi(t, x)?;
        write(re, psi.re, "re")?;
        write(im, psi.im, "im")
    })
}

/// Physical potential `V(x, t)` seen by the solution.
///
/// # Safety
/// `sol` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mb_solution_potential(sol: *const MbSolution, t: f64, x: f64, out: *mut f64) -> MbStatus {
    guard(|| {
        let v = as_ref(sol, "solution")?.0.potential(t, x)?;
        write(out, v, "out")
    })
}
