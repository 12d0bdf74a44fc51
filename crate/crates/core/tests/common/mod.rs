#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use fmfg_core::fokker_planck::solve_fp_forward;
use fmfg_core::hjb::{check_comparison_bound, comparison_bound_rhs, solve_hjb_backward};
use fmfg_core::io::{load_config, LoadedConfig};
use fmfg_core::mfg::SolverConfig;
use fmfg_core::model::{Coupling, CouplingMode, Hamiltonian, MFGProblem};
use fmfg_core::semigroup::{trapezoid, Trajectory};
use fmfg_core::spectral::gradient;
use fmfg_core::{make_grid, EvolutionOperator, Integrator, SpectralField, VectorField};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub fn bench() -> LoadedConfig {
    load_config(config_path("bench.toml")).expect("shipped benchmark config loads")
}

/// `(∫₀ᵀ ‖a(t) - b(t)‖₂² dt)^{1/2}` by the trapezoid rule.
pub fn l2_qt(a: &Trajectory, b: &Trajectory) -> f64 {
    let sq: Vec<f64> = a
        .fields()
        .iter()
        .zip(b.fields())
        .map(|(x, y)| x.sub(y).l2_norm().powi(2))
        .collect();
    trapezoid(&sq, a.dt()).sqrt()
}

fn sample(horizon: f64, nt: usize, f: impl Fn(f64) -> SpectralField) -> Trajectory {
    Trajectory::new(horizon, (0..=nt).map(|i| f(horizon * i as f64 / nt as f64)).collect()).unwrap()
}

fn lambda1(s: f64) -> f64 {
    EvolutionOperator::new(s, 0.0).unwrap().lambda([1, 0])
}

pub struct HjbCase {
    pub l2_error: f64,
    pub comparison_slack: f64,
    pub comparison_rhs: f64,
}

/// Recovers `u*(x,t) = e^{-t}cos(2πx)` from the coupling field
/// `V = -∂_t u* + (-Δ)^s u* + H(x, Du*)` on `[0, T]`, `d = 1`, `σ = 0`.
pub fn manufactured_hjb(n: usize, nt: usize) -> HjbCase {
    let (s, horizon) = (0.75, 0.5);
    let g = make_grid(1, n).unwrap();
    let ham = Hamiltonian::new(1.5, SpectralField::constant(&g, 0.5)).unwrap();
    let exact_at = |t: f64| SpectralField::from_fn(&g, |x| (-t).exp() * (2.0 * PI * x[0]).cos());
    let problem = MFGProblem::new(
        s,
        0.0,
        horizon,
        ham.clone(),
        Coupling::gaussian(&g, 4.0, 0.0, CouplingMode::Monotone).unwrap(),
        SpectralField::constant(&g, 1.0),
        exact_at(horizon),
    )
    .unwrap();
    let lam = lambda1(s);
    let v = sample(horizon, nt, |t| {
        let u = exact_at(t);
        u.scaled(1.0 + lam).add(&ham.value(&gradient(&u)).unwrap())
    });
    let config = SolverConfig { nt, integrator: Integrator::Etd1, ..Default::default() };
    let (u, _) = solve_hjb_backward(&problem, &v, &config).unwrap();
    let exact = sample(horizon, nt, exact_at);
    HjbCase {
        l2_error: l2_qt(&u, &exact),
        comparison_slack: check_comparison_bound(&u, &problem, &v),
        comparison_rhs: comparison_bound_rhs(&problem, &v),
    }
}

pub struct FpCase {
    pub l2_error: f64,
    pub mass_error: f64,
}

/// Recovers `m*(x,t) = 1 + ½e^{-t}cos(2πx)` with the drift
/// `b = q/m*`, `q = ½e^{-t}(1-λ₁) sin(2πx)/2π`, which makes
/// `∂_t m* + (-Δ)^s m* + ∂_x(b m*) = 0`.
pub fn manufactured_fp(n: usize, nt: usize) -> FpCase {
    let (s, horizon) = (0.75, 0.5);
    let g = make_grid(1, n).unwrap();
    let exact_at = |t: f64| SpectralField::from_fn(&g, |x| 1.0 + 0.5 * (-t).exp() * (2.0 * PI * x[0]).cos());
    let problem = MFGProblem::new(
        s,
        0.0,
        horizon,
        Hamiltonian::new(1.5, SpectralField::constant(&g, 0.5)).unwrap(),
        Coupling::gaussian(&g, 4.0, 0.0, CouplingMode::Monotone).unwrap(),
        exact_at(0.0),
        SpectralField::zeros(&g),
    )
    .unwrap();
    let lam = lambda1(s);
    let drift: Trajectory<VectorField> = Trajectory::new(
        horizon,
        (0..=nt)
            .map(|i| {
                let t = horizon * i as f64 / nt as f64;
                let b = SpectralField::from_fn(&g, |x| {
                    let q = 0.5 * (-t).exp() * (1.0 - lam) * (2.0 * PI * x[0]).sin() / (2.0 * PI);
                    q / (1.0 + 0.5 * (-t).exp() * (2.0 * PI * x[0]).cos())
                });
                VectorField::new(vec![b]).unwrap()
            })
            .collect(),
    )
    .unwrap();
    let config = SolverConfig { nt, integrator: Integrator::Etd1, dealias: false, ..Default::default() };
    let (m, _) = solve_fp_forward(&problem, &drift, &config).unwrap();
    let exact = sample(horizon, nt, exact_at);
    let mass_error = m.fields().iter().map(|f| (f.mean() - 1.0).abs()).fold(0.0, f64::max);
    FpCase { l2_error: l2_qt(&m, &exact), mass_error }
}

/// Observed orders `log₂(e_k / e_{k+1})` across consecutive halvings.
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
