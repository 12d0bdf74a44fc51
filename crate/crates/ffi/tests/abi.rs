use std::ffi::{CStr, CString};
use std::ptr;

use fmfg_ffi::*;

const BENCH: &str = r#"
d = 1
n = 32
s = 0.75
T = 0.25
Nt = 100
gamma = 1.5
coupling_mode = "monotone"

[c_field]
type = "constant"
value = 0.5

[kernel]
kappa = 4.0

[m0]
type = "von_mises"
center = [0.5]
concentration = 1.0

[uT]
type = "cosine"
amplitude = 0.2

[solver]
integrator = "etd1"
"#;

fn write_config(dir: &tempfile::TempDir, text: &str) -> CString {
    let path = dir.path().join("c.toml");
    std::fs::write(&path, text).unwrap();
    CString::new(path.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = fmfg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, BENCH);
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(fmfg_config_load(path.as_ptr(), &mut cfg), FmfgStatus::Ok);
        let mut len = 0usize;
        assert_eq!(fmfg_config_grid_len(cfg, &mut len), FmfgStatus::Ok);
        assert_eq!(len, 32);

        let mut sol = ptr::null_mut();
        assert_eq!(fmfg_solve(cfg, &mut sol), FmfgStatus::Ok);
        let mut diag = FmfgDiagnostics::default();
        assert_eq!(fmfg_solution_diagnostics(sol, &mut diag), FmfgStatus::Ok);
        assert!(diag.converged);
        assert!(diag.final_gap < 1e-6);

        let mut nt = 0usize;
        assert_eq!(fmfg_solution_nt(sol, &mut nt), FmfgStatus::Ok);
        assert_eq!(nt, 100);
        let mut m = vec![0.0; len];
        assert_eq!(fmfg_solution_copy_m(sol, nt, m.as_mut_ptr(), m.len()), FmfgStatus::Ok);
        let mean = m.iter().sum::<f64>() / len as f64;
        assert!((mean - 1.0).abs() < 1e-12);

        let mut short = vec![0.0; len - 1];
        assert_eq!(fmfg_solution_copy_u(sol, 0, short.as_mut_ptr(), short.len()), FmfgStatus::BufferTooSmall);
        assert!(last_error().contains("buffer"));
        assert_eq!(fmfg_solution_copy_u(sol, nt + 1, m.as_mut_ptr(), m.len()), FmfgStatus::InvalidArgument);

        fmfg_solution_free(sol);
        fmfg_config_free(cfg);
    }
}

#[test]
fn config_errors_carry_assumption() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, &BENCH.replace("gamma = 1.5", "gamma = 2.5"));
    let mut cfg = ptr::null_mut();
    let status = unsafe { fmfg_config_load(path.as_ptr(), &mut cfg) };
    assert_eq!(status, FmfgStatus::Config);
    assert!(cfg.is_null());
    let msg = last_error();
    assert!(msg.contains("γ ∈ (1,2]"), "{msg}");
    fmfg_clear_error();
    assert!(fmfg_last_error().is_null());
}

#[test]
fn missing_file_is_io() {
    let path = CString::new("/nonexistent/fmfg.toml").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { fmfg_config_load(path.as_ptr(), &mut cfg) }, FmfgStatus::Io);
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(fmfg_config_load(ptr::null(), &mut cfg), FmfgStatus::NullPointer);
        assert!(last_error().contains("path"));
        let mut sol = ptr::null_mut();
        assert_eq!(fmfg_solve(ptr::null(), &mut sol), FmfgStatus::NullPointer);
        assert_eq!(fmfg_heat_step(1, 8, 0.5, 0.0, 0.1, ptr::null(), ptr::null_mut()), FmfgStatus::NullPointer);
        fmfg_config_free(ptr::null_mut());
        fmfg_solution_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(fmfg_config_load(ptr::null(), &mut cfg), FmfgStatus::NullPointer);
    }
    std::thread::spawn(|| assert!(fmfg_last_error().is_null())).join().unwrap();
    assert!(!fmfg_last_error().is_null());
}

#[test]
fn heat_step_on_cosine() {
    let n = 16;
    let s = 0.6;
    let t = 0.05;
    let input: Vec<f64> = (0..n).map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()).collect();
    let mut out = vec![0.0; n];
    let status = unsafe { fmfg_heat_step(1, n as u32, s, 0.0, t, input.as_ptr(), out.as_mut_ptr()) };
    assert_eq!(status, FmfgStatus::Ok);
    let factor = (-t * (2.0 * std::f64::consts::PI).powf(2.0 * s)).exp();
    for (a, b) in input.iter().zip(&out) {
        assert!((a * factor - b).abs() < 1e-13);
    }

    let mut lap = vec![0.0; n];
    let status = unsafe { fmfg_fractional_laplacian(1, n as u32, s, input.as_ptr(), lap.as_mut_ptr()) };
    assert_eq!(status, FmfgStatus::Ok);
    let lam = (2.0 * std::f64::consts::PI).powf(2.0 * s);
    for (a, b) in input.iter().zip(&lap) {
        assert!((a * lam - b).abs() < 1e-12 * lam);
    }
}

#[test]
fn bad_grid_is_invalid_argument() {
    let input = [0.0; 7];
    let mut out = [0.0; 7];
    let status = unsafe { fmfg_heat_step(1, 7, 0.5, 0.0, 0.1, input.as_ptr(), out.as_mut_ptr()) };
    assert_eq!(status, FmfgStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    let status = unsafe { fmfg_heat_step(1, 8, 0.5, 0.0, -1.0, [0.0; 8].as_ptr(), out.as_mut_ptr()) };
    assert_ne!(status, FmfgStatus::Ok);
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(fmfg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
