//! Forward fractional Fokker-Planck solver in divergence form with the mass,
//! positivity, energy and weak-formulation monitors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::hjb::relative_midpoint_norm;
use crate::mfg::SolverConfig;
use crate::model::MFGProblem;
use crate::semigroup::{trapezoid, DriftTrajectory, EvolutionOperator, LinearPropagator, Trajectory};
use crate::spectral::{dealias, divergence, gradient};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FPDiagnostics {
    pub mass_error_max: f64,
    pub min_density: f64,
    pub energy_residual: f64,
    pub sup_norm: f64,
    /// `max over Q_T of [div b]⁻`.
    pub k_hat: f64,
    /// `‖m₀‖_∞ e^{K̂T}`.
    pub sup_bound: f64,
    pub sup_bound_holds: bool,
    /// `σ∫‖Dm‖² + ∫‖(-Δ)^{s/2}m‖²`.
    pub dissipation: f64,
    pub gronwall_holds: bool,
    pub weak_residual: f64,
    /// Set when `min_density` fell below the configured floor.
    pub negativity_flagged: bool,
}

/// Explicit divergence source `-div(b m)` in coefficient space.
fn transport_source(b: &VectorField, m: &SpectralField, dealiased: bool) -> Result<Vec<Complex64>> {
    let flux = b.weighted(m)?;
    let flux = if dealiased { flux.map_components(dealias) } else { flux };
    Ok(divergence(&flux)?.coeffs().iter().map(|c| -c).collect())
}

/// Steps `∂_t m + A m + div(b m) = 0` from `start`, one step per drift level:
/// step `j` uses `drifts[j]` and the density at level `j`. Returns
/// `drifts.len() + 1` levels. Shared by the forward and adjoint solvers.
pub(crate) fn march_continuity(
    start: &SpectralField,
    drifts: &[VectorField],
    prop: &LinearPropagator,
    dealiased: bool,
) -> Result<Vec<SpectralField>> {
    let mut levels = Vec::with_capacity(drifts.len() + 1);
    levels.push(start.clone());
    for (j, b) in drifts.iter().enumerate() {
        let m = &levels[j];
        let next = if b.max_magnitude() == 0.0 {
            prop.step_coeffs(m, None)
        } else {
            prop.step_coeffs(m, Some(&transport_source(b, m, dealiased)?))
        };
        if !next.is_finite() {
            return Err(Error::NonFinite { solver: "fokker-planck", step: j + 1 });
        }
        levels.push(next);
    }
    Ok(levels)
}

/// The forward march from `m₀` without diagnostics.
pub(crate) fn march_fp(problem: &MFGProblem, drift: &DriftTrajectory, config: &SolverConfig) -> Result<Trajectory> {
    let dt = problem.horizon() / config.nt as f64;
    let prop = LinearPropagator::new(problem.grid(), &problem.operator(), dt, config.integrator)?;
    let levels = march_continuity(problem.m0(), &drift.fields()[..config.nt], &prop, config.dealias)?;
    Trajectory::new(problem.horizon(), levels)
}

pub fn solve_fp_forward(
    problem: &MFGProblem,
    drift: &DriftTrajectory,
    config: &SolverConfig,
) -> Result<(Trajectory, FPDiagnostics)> {
    config.validate()?;
    problem.grid().ensure_same(drift.grid())?;
    if drift.nt() != config.nt {
        return Err(Error::invalid(format!("drift has Nt={}, solver expects {}", drift.nt(), config.nt)));
    }
    let dt = problem.horizon() / config.nt as f64;
    let cfl = dt * drift.fields().iter().map(VectorField::max_magnitude).fold(0.0, f64::max) / problem.grid().h();
    if cfl > 1.0 {
        log::warn!("transport CFL number {cfl:.3} exceeds 1; consider a larger Nt");
    }
    let m = march_fp(problem, drift, config)?;
    let mut diag = stability_report(&m, drift, &problem.operator())?;
    diag.energy_residual = energy_identity_residual(&m, drift, problem)?;
    diag.weak_residual = weak_residual(&m, drift, problem)?;
    let floor = -config.negativity_floor * diag.sup_norm;
    diag.negativity_flagged = diag.min_density < floor;
    if diag.negativity_flagged {
        log::warn!("density undershoot {} below floor {floor}", diag.min_density);
    }
    Ok((m, diag))
}

/// `Σ_k λ(k)|m̂(k)|²` over non-Nyquist modes, i.e. `⟨A m, m⟩`.
fn dissipation_rate(m: &SpectralField, op: &EvolutionOperator) -> f64 {
    let grid = m.grid();
    m.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = grid.wavevector(i);
            if grid.is_nyquist(k) {
                0.0
            } else {
                op.lambda(k) * c.norm_sqr()
            }
        })
        .sum()
}

/// Defect of the integrated energy identity
/// `½‖m(T)‖² - ½‖m(0)‖² + ∫⟨Am,m⟩ + ½∫∫div(b) m² = 0`, relative to the sum of
/// the magnitudes of its terms.
pub fn energy_identity_residual(m: &Trajectory, drift: &DriftTrajectory, problem: &MFGProblem) -> Result<f64> {
    let op = problem.operator();
    let per_level: Vec<(f64, f64)> = m
        .fields()
        .par_iter()
        .zip(drift.fields().par_iter())
        .map(|(f, b)| {
            let div_term = if b.max_magnitude() == 0.0 {
                0.0
            } else {
                divergence(b)?.inner(&f.mul(f))
            };
            Ok((dissipation_rate(f, &op), div_term))
        })
        .collect::<Result<Vec<_>>>()?;
    let diss: Vec<f64> = per_level.iter().map(|p| p.0).collect();
    let div: Vec<f64> = per_level.iter().map(|p| p.1).collect();
    let e0 = 0.5 * m.first().l2_norm().powi(2);
    let e1 = 0.5 * m.last().l2_norm().powi(2);
    let d = trapezoid(&diss, m.dt());
    let t = 0.5 * trapezoid(&div, m.dt());
    let defect = e1 - e0 + d + t;
    let scale = e0 + e1 + d.abs() + t.abs();
    Ok(if scale > 0.0 { defect.abs() / scale } else { defect.abs() })
}

/// Sup norm, mass drift, positivity and dissipation monitors, with the
/// comparison bound `‖m‖_∞ <= ‖m₀‖_∞ e^{K̂T}` and the discrete Grönwall form
/// of the energy inequality.
pub fn stability_report(m: &Trajectory, drift: &DriftTrajectory, op: &EvolutionOperator) -> Result<FPDiagnostics> {
    const TOL: f64 = 1e-6;
    let k_hat = drift
        .fields()
        .par_iter()
        .map(|b| Ok(divergence(b)?.min().min(0.0).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let sup_norm = m.sup_norm();
    let sup_bound = m.first().max_abs() * (k_hat * m.horizon()).exp();
    let mass_error_max = m.fields().iter().map(|f| (f.mean() - 1.0).abs()).fold(0.0, f64::max);
    let min_density = m.fields().iter().map(SpectralField::min).fold(f64::INFINITY, f64::min);
    let diss: Vec<f64> = m.fields().par_iter().map(|f| dissipation_rate(f, op)).collect();
    let l2sq: Vec<f64> = m.fields().iter().map(|f| f.l2_norm().powi(2)).collect();
    let dissipation = trapezoid(&diss, m.dt());
    let lhs = 0.5 * l2sq[l2sq.len() - 1] + dissipation;
    let rhs = 0.5 * l2sq[0] + 0.5 * k_hat * trapezoid(&l2sq, m.dt());
    Ok(FPDiagnostics {
        mass_error_max,
        min_density,
        energy_residual: 0.0,
        sup_norm,
        k_hat,
        sup_bound,
        sup_bound_holds: sup_norm <= sup_bound * (1.0 + TOL),
        dissipation,
        gronwall_holds: lhs <= rhs * (1.0 + TOL),
        weak_residual: 0.0,
        negativity_flagged: false,
    })
}

/// Number of space-time test functions in the weak residual.
pub const WEAK_BASIS_SIZE: usize = 32;

fn spatial_basis(dim: usize) -> Vec<([i64; 2], bool)> {
    // (wavevector, use sine)
    if dim == 1 {
        vec![
            ([0, 0], false),
            ([1, 0], false),
            ([1, 0], true),
            ([2, 0], false),
            ([2, 0], true),
            ([3, 0], false),
            ([3, 0], true),
            ([4, 0], false),
        ]
    } else {
        vec![
            ([0, 0], false),
            ([1, 0], false),
            ([1, 0], true),
            ([0, 1], false),
            ([0, 1], true),
            ([1, 1], false),
            ([1, 1], true),
            ([1, -1], false),
        ]
    }
}

/// Residual of the weak formulation
/// `∫∫ m(-∂_tφ + Aφ - b·Dφ) - ∫m₀φ(·,0) = 0` over the products of 8 low
/// Fourier modes with `cos(π(2l+1)t/2T)`, `l = 0..4` (all vanish at `t = T`).
/// Returns the ℓ² norm of the defects relative to the ℓ² norm of the summed
/// term magnitudes.
pub fn weak_residual(m: &Trajectory, drift: &DriftTrajectory, problem: &MFGProblem) -> Result<f64> {
    let grid = m.grid().clone();
    let op = problem.operator();
    let horizon = m.horizon();
    let spatial: Vec<(SpectralField, SpectralField, VectorField)> = spatial_basis(grid.dim())
        .into_iter()
        .map(|(k, sine)| {
            let psi = SpectralField::from_fn(&grid, |x| {
                let ph = 2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
                if sine {
                    ph.sin()
                } else {
                    ph.cos()
                }
            });
            let a_psi = op.apply(&psi);
            let d_psi = gradient(&psi);
            (psi, a_psi, d_psi)
        })
        .collect();
    let omegas: Vec<f64> = (0..WEAK_BASIS_SIZE / spatial.len())
        .map(|l| PI * (2 * l + 1) as f64 / (2.0 * horizon))
        .collect();
    // per level and spatial function: ⟨m,ψ⟩, ⟨m,Aψ⟩, ⟨m b,Dψ⟩
    let pairings: Vec<Vec<[f64; 3]>> = m
        .fields()
        .par_iter()
        .zip(drift.fields().par_iter())
        .map(|(f, b)| {
            let mb = b.weighted(f)?;
            spatial
                .iter()
                .map(|(psi, a_psi, d_psi)| Ok([f.inner(psi), f.inner(a_psi), mb.dot(d_psi)?.mean()]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let times = m.times();
    let mut defect_sq = 0.0;
    let mut scale_sq = 0.0;
    for (j, (psi, _, _)) in spatial.iter().enumerate() {
        let initial = problem.m0().inner(psi);
        for &w in &omegas {
            let dt_term: Vec<f64> = times.iter().zip(&pairings).map(|(t, p)| w * (w * t).sin() * p[j][0]).collect();
            let a_term: Vec<f64> = times.iter().zip(&pairings).map(|(t, p)| (w * t).cos() * p[j][1]).collect();
            let b_term: Vec<f64> = times.iter().zip(&pairings).map(|(t, p)| (w * t).cos() * p[j][2]).collect();
            // -∂_tθ = w sin(wt) for θ = cos(wt)
            let terms = [
                trapezoid(&dt_term, m.dt()),
                trapezoid(&a_term, m.dt()),
                -trapezoid(&b_term, m.dt()),
                -initial,
            ];
            let defect: f64 = terms.iter().sum();
            let scale: f64 = terms.iter().map(|v| v.abs()).sum();
            defect_sq += defect * defect;
            scale_sq += scale * scale;
        }
    }
    Ok(if scale_sq > 0.0 { (defect_sq / scale_sq).sqrt() } else { defect_sq.sqrt() })
}

/// Relative L²(Q_T) residual of `∂_t m + A m + div(b m)` with centered time
/// differences and level-averaged spatial terms.
pub fn fp_centered_residual(m: &Trajectory, drift: &DriftTrajectory, problem: &MFGProblem) -> Result<f64> {
    let op = problem.operator();
    let dt = m.dt();
    let levels: Vec<(SpectralField, SpectralField)> = m
        .fields()
        .par_iter()
        .zip(drift.fields().par_iter())
        .map(|(f, b)| Ok((op.apply(f), divergence(&b.weighted(f)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<[f64; 5]> = (0..m.nt())
        .into_par_iter()
        .map(|i| {
            let dtm = m.at(i + 1).sub(m.at(i)).scaled(1.0 / dt);
            let am = levels[i].0.add(&levels[i + 1].0).scaled(0.5);
            let tr = levels[i].1.add(&levels[i + 1].1).scaled(0.5);
            let r = dtm.add(&am).add(&tr);
            [r.l2_norm().powi(2), dtm.l2_norm().powi(2), am.l2_norm().powi(2), tr.l2_norm().powi(2), 0.0]
        })
        .collect();
    Ok(relative_midpoint_norm(&parts, dt))
}
