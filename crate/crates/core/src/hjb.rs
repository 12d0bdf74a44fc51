//! Backward fractional Hamilton-Jacobi-Bellman solver, its adjoint, and the
//! comparison, semiconcavity and duality monitors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::fokker_planck::march_continuity;
use crate::mfg::SolverConfig;
use crate::model::MFGProblem;
use crate::semigroup::{trapezoid, DriftTrajectory, LinearPropagator, Trajectory};
use crate::spectral::{dealias, gradient, second_difference_hessian_bound};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HJBDiagnostics {
    pub sup_norm_bound_slack: f64,
    pub semiconcavity_constant: f64,
    pub lipschitz_constant: f64,
    pub residual_l2: f64,
}

/// `H(x, Du)` with optional two-thirds dealiasing.
pub fn hamiltonian_term(problem: &MFGProblem, u: &SpectralField, dealiased: bool) -> Result<SpectralField> {
    let ham = problem.hamiltonian();
    if ham.is_zero() {
        return Ok(SpectralField::zeros(u.grid()));
    }
    let h = ham.value(&gradient(u))?;
    Ok(if dealiased { dealias(&h) } else { h })
}

fn check_levels(problem: &MFGProblem, field: &Trajectory, config: &SolverConfig, what: &str) -> Result<()> {
    problem.grid().ensure_same(field.grid())?;
    if field.nt() != config.nt || (field.horizon() - problem.horizon()).abs() > 1e-12 * problem.horizon() {
        return Err(Error::invalid(format!(
            "{what} has Nt={} on [0,{}], solver expects Nt={} on [0,{}]",
            field.nt(),
            field.horizon(),
            config.nt,
            problem.horizon()
        )));
    }
    Ok(())
}

/// Marches `u` backward from `u(T) = u_T`:
/// `u^i = a·u^{i+1} + b·(V^{i+1} - H(x, Du^{i+1}))` mode-wise, with `(a, b)` from
/// the configured integrator.
pub fn solve_hjb_backward(
    problem: &MFGProblem,
    v_field: &Trajectory,
    config: &SolverConfig,
) -> Result<(Trajectory, HJBDiagnostics)> {
    let u = march_hjb(problem, v_field, config)?;
    let diagnostics = hjb_diagnostics(problem, &u, v_field, config)?;
    if let Some(ceiling) = config.residual_ceiling {
        if diagnostics.residual_l2 > ceiling {
            return Err(Error::Solver(format!(
                "hjb residual {} exceeds the configured ceiling {ceiling}",
                diagnostics.residual_l2
            )));
        }
    }
    Ok((u, diagnostics))
}

/// The backward march without diagnostics.
pub(crate) fn march_hjb(problem: &MFGProblem, v_field: &Trajectory, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    check_levels(problem, v_field, config, "coupling field")?;
    let grid = problem.grid();
    let nt = config.nt;
    let dt = problem.horizon() / nt as f64;
    let prop = LinearPropagator::new(grid, &problem.operator(), dt, config.integrator)?;
    let mut levels = vec![problem.u_t().clone(); nt + 1];
    for i in (0..nt).rev() {
        let next = &levels[i + 1];
        let source = v_field.at(i + 1).sub(&hamiltonian_term(problem, next, config.dealias)?);
        let u = prop.step(next, Some(&source));
        if !u.is_finite() {
            return Err(Error::NonFinite { solver: "hjb", step: nt - i });
        }
        levels[i] = u;
    }
    Trajectory::new(problem.horizon(), levels)
}

pub fn hjb_diagnostics(
    problem: &MFGProblem,
    u: &Trajectory,
    v_field: &Trajectory,
    config: &SolverConfig,
) -> Result<HJBDiagnostics> {
    let per_level: Vec<(f64, f64)> = u
        .fields()
        .par_iter()
        .map(|f| {
            let semi = second_difference_hessian_bound(f).into_iter().fold(f64::NEG_INFINITY, f64::max);
            (semi, gradient(f).max_magnitude())
        })
        .collect();
    Ok(HJBDiagnostics {
        sup_norm_bound_slack: check_comparison_bound(u, problem, v_field),
        semiconcavity_constant: per_level.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
        lipschitz_constant: per_level.iter().map(|p| p.1).fold(0.0, f64::max),
        residual_l2: hjb_centered_residual(problem, u, v_field, config.dealias)?,
    })
}

/// Right side of the comparison bound,
/// `‖u_T‖_∞ + T(‖V‖_∞ + ‖H(·,0)‖_∞)`; the family has `H(·,0) = 0`.
pub fn comparison_bound_rhs(problem: &MFGProblem, v_field: &Trajectory) -> f64 {
    problem.u_t().max_abs() + problem.horizon() * v_field.sup_norm()
}

/// `RHS - ‖u‖_{∞,grid}`; the bound holds when this is `>= -1e-6·RHS`.
pub fn check_comparison_bound(u: &Trajectory, problem: &MFGProblem, v_field: &Trajectory) -> f64 {
    comparison_bound_rhs(problem, v_field) - u.sup_norm()
}

/// Relative L²(Q_T) residual of `-∂_t u + A u + H(x,Du) - V` with the time
/// derivative centered at half steps and the other terms averaged between
/// neighbouring levels. Normalized by the sum of the term norms.
pub fn hjb_centered_residual(problem: &MFGProblem, u: &Trajectory, v_field: &Trajectory, dealiased: bool) -> Result<f64> {
    let op = problem.operator();
    let dt = u.dt();
    let levels: Vec<(SpectralField, SpectralField)> = u
        .fields()
        .par_iter()
        .map(|f| Ok((op.apply(f), hamiltonian_term(problem, f, dealiased)?)))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<[f64; 5]> = (0..u.nt())
        .into_par_iter()
        .map(|i| {
            let dtu = u.at(i + 1).sub(u.at(i)).scaled(1.0 / dt);
            let au = levels[i].0.add(&levels[i + 1].0).scaled(0.5);
            let h = levels[i].1.add(&levels[i + 1].1).scaled(0.5);
            let v = v_field.at(i).add(v_field.at(i + 1)).scaled(0.5);
            let r = dtu.scaled(-1.0).add(&au).add(&h).sub(&v);
            [
                r.l2_norm().powi(2),
                dtu.l2_norm().powi(2),
                au.l2_norm().powi(2),
                h.l2_norm().powi(2),
                v.l2_norm().powi(2),
            ]
        })
        .collect();
    Ok(relative_midpoint_norm(&parts, dt))
}

/// `‖r‖ / Σ‖term‖` from per-interval squared L² norms (midpoint rule).
pub(crate) fn relative_midpoint_norm(parts: &[[f64; 5]], dt: f64) -> f64 {
    let mut sums = [0.0; 5];
    for p in parts {
        for (s, v) in sums.iter_mut().zip(p) {
            *s += v * dt;
        }
    }
    let scale: f64 = sums[1..].iter().map(|v| v.sqrt()).sum();
    if scale == 0.0 {
        return sums[0].sqrt();
    }
    sums[0].sqrt() / scale
}

/// Drift `-D_pH(x, Du)` at every level of `u`.
pub fn optimal_drift(problem: &MFGProblem, u: &Trajectory) -> Result<DriftTrajectory> {
    let ham = problem.hamiltonian();
    let fields = u
        .fields()
        .par_iter()
        .map(|f| {
            if ham.is_zero() {
                Ok(VectorField::zeros(f.grid()))
            } else {
                Ok(ham.grad_p(&gradient(f))?.scaled(-1.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(u.horizon(), fields)
}

/// Solves the adjoint equation
/// `∂_tρ - σΔρ + (-Δ)^sρ - div(D_pH(x,Du)ρ) = 0` forward on `[t_τ, T]`
/// with `ρ(t_τ) = ρ_τ`. Returns the trajectory on `[t_τ, T]`.
pub fn solve_adjoint(
    rho_tau: &SpectralField,
    u: &Trajectory,
    problem: &MFGProblem,
    tau_index: usize,
    config: &SolverConfig,
) -> Result<Trajectory> {
    problem.grid().ensure_same(rho_tau.grid())?;
    if tau_index >= u.nt() {
        return Err(Error::invalid(format!("tau index {tau_index} must be below Nt={}", u.nt())));
    }
    let drift = optimal_drift(problem, u)?;
    let prop = LinearPropagator::new(problem.grid(), &problem.operator(), u.dt(), config.integrator)?;
    let levels = march_continuity(rho_tau, &drift.fields()[tau_index..u.nt()], &prop, config.dealias)?;
    let floor = -config.negativity_floor * levels.iter().map(SpectralField::max_abs).fold(0.0, f64::max);
    if let Some((i, f)) = levels.iter().enumerate().find(|(_, f)| f.min() < floor) {
        return Err(Error::Solver(format!(
            "adjoint density {} at step {i} is below the floor {floor}",
            f.min()
        )));
    }
    Trajectory::new(u.horizon() - u.time(tau_index), levels)
}

/// Both sides of the representation formula
/// `∫u(τ)ρ_τ = ∫u(T)ρ(T) + ∫∫Vρ + ∫∫(D_pH·Du - H)ρ`, returning
/// `|LHS - RHS| / (|LHS| + |RHS| + 1e-300)`.
pub fn duality_residual(
    u: &Trajectory,
    rho: &Trajectory,
    v_field: &Trajectory,
    problem: &MFGProblem,
    tau_index: usize,
) -> Result<f64> {
    let steps = u.nt() - tau_index;
    if rho.nt() != steps {
        return Err(Error::invalid(format!(
            "adjoint has {} steps, expected {steps} from tau index {tau_index}",
            rho.nt()
        )));
    }
    let ham = problem.hamiltonian();
    let integrand = (0..=steps)
        .into_par_iter()
        .map(|j| {
            let i = tau_index + j;
            let du = gradient(u.at(i));
            let lagr = if ham.is_zero() {
                SpectralField::zeros(u.grid())
            } else {
                ham.grad_p(&du)?.dot(&du)?.sub(&ham.value(&du)?)
            };
            Ok(v_field.at(i).add(&lagr).inner(rho.at(j)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let lhs = u.at(tau_index).inner(rho.first());
    let rhs = u.last().inner(rho.last()) + trapezoid(&integrand, u.dt());
    Ok((lhs - rhs).abs() / (lhs.abs() + rhs.abs() + 1e-300))
}
