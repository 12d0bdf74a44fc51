//! C ABI over `fmfg-core`.
//!
//! Every entry point returns an [`FmfgStatus`]; on failure the message is
//! kept in a thread-local slot readable through [`fmfg_last_error`]. Panics
//! are caught at the boundary and reported as [`FmfgStatus::Panic`].
//! Handles are opaque and must be released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fmfg_core::io::{load_config, LoadedConfig};
use fmfg_core::mfg::{solve_mfg_fixed_point, SolutionPair};
use fmfg_core::semigroup::{heat_step, EvolutionOperator};
use fmfg_core::spectral::fractional_laplacian;
use fmfg_core::{make_grid, Error, SpectralField};

/// Result codes. `Ok` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmfgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Assumption = 4,
    Solver = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Loaded problem plus solver settings.
pub struct FmfgConfig {
    inner: LoadedConfig,
}

/// Converged (or last) iterate of a fixed-point solve.
pub struct FmfgSolution {
    inner: SolutionPair,
}

/// Scalar summary of a solve.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FmfgDiagnostics {
    pub outer_iterations: u32,
    pub converged: bool,
    pub final_gap: f64,
    pub hjb_residual: f64,
    pub fp_residual: f64,
    pub min_density: f64,
    pub mass_error_max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> FmfgStatus {
    match e {
        Error::Config { .. } => FmfgStatus::Config,
        Error::Assumption { .. } => FmfgStatus::Assumption,
        Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::GridMismatch { .. } | Error::NonFiniteSymbol { .. } => {
            FmfgStatus::InvalidArgument
        }
        Error::Io(_) | Error::Format(_) | Error::Json(_) | Error::Csv(_) => FmfgStatus::Io,
        _ => FmfgStatus::Solver,
    }
}

fn guard(f: impl FnOnce() -> Result<(), FmfgStatus>) -> FmfgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FmfgStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FmfgStatus::Panic
        }
    }
}

fn check<T>(r: fmfg_core::Result<T>) -> Result<T, FmfgStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), FmfgStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(FmfgStatus::NullPointer);
    }
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fmfg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn fmfg_clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn fmfg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads and validates a TOML config.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fmfg_config_load(path: *const c_char, out: *mut *mut FmfgConfig) -> FmfgStatus {
    guard(|| {
        non_null(path, "path")?;
        non_null(out, "out")?;
        let path = CStr::from_ptr(path).to_str().map_err(|_| {
            set_error("path is not valid UTF-8");
            FmfgStatus::InvalidArgument
        })?;
        let cfg = check(load_config(path))?;
        *out = Box::into_raw(Box::new(FmfgConfig { inner: cfg }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from [`fmfg_config_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmfg_config_free(cfg: *mut FmfgConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Number of grid nodes `n^d` of the configured problem.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fmfg_config_grid_len(cfg: *const FmfgConfig, out: *mut usize) -> FmfgStatus {
    guard(|| {
        non_null(cfg, "cfg")?;
        non_null(out, "out")?;
        *out = (*cfg).inner.problem.grid().len();
        Ok(())
    })
}

/// Runs the damped fixed-point solver. A non-converged run still returns
/// `Ok` with a handle; inspect the diagnostics.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fmfg_solve(cfg: *const FmfgConfig, out: *mut *mut FmfgSolution) -> FmfgStatus {
    guard(|| {
        non_null(cfg, "cfg")?;
        non_null(out, "out")?;
        let c = &(*cfg).inner;
        let sol = check(solve_mfg_fixed_point(&c.problem, &c.solver))?;
        *out = Box::into_raw(Box::new(FmfgSolution { inner: sol }));
        Ok(())
    })
}

/// # Safety
/// `sol` must come from [`fmfg_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmfg_solution_free(sol: *mut FmfgSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fmfg_solution_diagnostics(sol: *const FmfgSolution, out: *mut FmfgDiagnostics) -> FmfgStatus {
    guard(|| {
        non_null(sol, "sol")?;
        non_null(out, "out")?;
        let d = &(*sol).inner.diagnostics;
        *out = FmfgDiagnostics {
            outer_iterations: d.outer_iterations as u32,
            converged: d.converged,
            final_gap: d.final_fixed_point_gap,
            hjb_residual: d.hjb_residual,
            fp_residual: d.fp_residual,
            min_density: d.fp.min_density,
            mass_error_max: d.fp.mass_error_max,
        };
        Ok(())
    })
}

/// Number of time steps `Nt`; the solution holds `Nt + 1` levels.
///
/// # Safety
/// `sol` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fmfg_solution_nt(sol: *const FmfgSolution, out: *mut usize) -> FmfgStatus {
    guard(|| {
        non_null(sol, "sol")?;
        non_null(out, "out")?;
        *out = (*sol).inner.m.nt();
        Ok(())
    })
}

unsafe fn copy_level(
    traj: &fmfg_core::Trajectory,
    level: usize,
    buf: *mut f64,
    len: usize,
) -> Result<(), FmfgStatus> {
    non_null(buf, "buf")?;
    if level > traj.nt() {
        set_error(format!("level {level} out of range 0..={}", traj.nt()));
        return Err(FmfgStatus::InvalidArgument);
    }
    let values = traj.at(level).values();
    if len < values.len() {
        set_error(format!("buffer holds {len} values, need {}", values.len()));
        return Err(FmfgStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Copies `u` at time level `level` (row-major, `n^d` values) into `buf`.
///
/// # Safety
/// `sol` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fmfg_solution_copy_u(sol: *const FmfgSolution, level: usize, buf: *mut f64, len: usize) -> FmfgStatus {
    guard(|| {
        non_null(sol, "sol")?;
        copy_level(&(*sol).inner.u, level, buf, len)
    })
}

/// Copies `m` at time level `level` into `buf`.
///
/// # Safety
/// As [`fmfg_solution_copy_u`].
#[no_mangle]
pub unsafe extern "C" fn fmfg_solution_copy_m(sol: *const FmfgSolution, level: usize, buf: *mut f64, len: usize) -> FmfgStatus {
    guard(|| {
        non_null(sol, "sol")?;
        copy_level(&(*sol).inner.m, level, buf, len)
    })
}

unsafe fn grid_field(dim: u32, n: u32, values: *const f64) -> Result<SpectralField, FmfgStatus> {
    non_null(values, "values")?;
    let grid = check(make_grid(dim as usize, n as usize))?;
    let data = std::slice::from_raw_parts(values, grid.len()).to_vec();
    check(SpectralField::from_values(&grid, data))
}

/// `out = (-Δ)^s input` on the `n^d` grid.
///
/// # Safety
/// `input` and `out` must each hold `n^d` doubles.
#[no_mangle]
pub unsafe extern "C" fn fmfg_fractional_laplacian(dim: u32, n: u32, s: f64, input: *const f64, out: *mut f64) -> FmfgStatus {
    guard(|| {
        non_null(out, "out")?;
        let f = grid_field(dim, n, input)?;
        let g = check(fractional_laplacian(&f, s))?;
        ptr::copy_nonoverlapping(g.values().as_ptr(), out, g.values().len());
        Ok(())
    })
}

/// `out = exp(-t(σ(-Δ) + (-Δ)^s)) input`.
///
/// # Safety
/// `input` and `out` must each hold `n^d` doubles.
#[no_mangle]
pub unsafe extern "C" fn fmfg_heat_step(
    dim: u32,
    n: u32,
    s: f64,
    sigma: f64,
    t: f64,
    input: *const f64,
    out: *mut f64,
) -> FmfgStatus {
    guard(|| {
        non_null(out, "out")?;
        let f = grid_field(dim, n, input)?;
        let op = check(EvolutionOperator::new(s, sigma))?;
        let g = check(heat_step(&f, t, &op))?;
        ptr::copy_nonoverlapping(g.values().as_ptr(), out, g.values().len());
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, FmfgStatus::Panic);
        let msg = unsafe { CStr::from_ptr(fmfg_last_error()) }.to_str().unwrap().to_owned();
        assert_eq!(msg, "panic: boom");
    }
}
