//! The coupled system: damped fixed-point loop, vanishing-viscosity sweep,
//! short-time Picard contraction and uniqueness experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, random_density, CorpusSpec};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fokker_planck::{fp_centered_residual, march_fp, solve_fp_forward, FPDiagnostics};
use crate::hjb::{hamiltonian_term, hjb_centered_residual, hjb_diagnostics, march_hjb, optimal_drift, HJBDiagnostics};
use crate::model::{coupling_apply, wasserstein1, CouplingMode, MFGProblem};
use crate::report::loglog_slope;
use crate::semigroup::{heat_step, trapezoid, Integrator, LinearPropagator, Trajectory};
use crate::spaces::bessel_norm;
use crate::spectral::gradient;

/// Distance between density trajectories used by the outer loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryMetric {
    /// `sup_t ‖m₁(t) - m₂(t)‖₂`
    #[default]
    L2Traj,
    /// `sup_t 𝐝₁(m₁(t), m₂(t))`
    D1Sup,
}

impl std::str::FromStr for TrajectoryMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2_traj" => Ok(Self::L2Traj),
            "d1_sup" => Ok(Self::D1Sup),
            other => Err(Error::invalid(format!("unknown metric `{other}` (expected l2_traj or d1_sup)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub nt: usize,
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub integrator: Integrator,
    pub dealias: bool,
    pub metric: TrajectoryMetric,
    /// Optional hard ceiling on the HJB residual after a standalone solve.
    pub residual_ceiling: Option<f64>,
    /// Densities below `-negativity_floor·‖m‖_∞` are flagged.
    pub negativity_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nt: 200,
            damping: 0.5,
            tol: 1e-6,
            max_iter: 60,
            integrator: Integrator::Imex,
            dealias: true,
            metric: TrajectoryMetric::L2Traj,
            residual_ceiling: None,
            negativity_floor: 1e-3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::invalid(format!("damping must lie in (0,1], got {}", self.damping)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.nt < 8 {
            return Err(Error::invalid(format!("nt must be at least 8, got {}", self.nt)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if !(self.negativity_floor >= 0.0) {
            return Err(Error::invalid("negativity_floor must be nonnegative"));
        }
        Ok(())
    }
}

pub fn trajectory_metric(a: &Trajectory, b: &Trajectory, metric: TrajectoryMetric) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    if a.nt() != b.nt() {
        return Err(Error::invalid("trajectories have different time grids"));
    }
    match metric {
        TrajectoryMetric::L2Traj => Ok(a.sup_l2_distance(b)),
        TrajectoryMetric::D1Sup => Ok(a
            .fields()
            .par_iter()
            .zip(b.fields().par_iter())
            .map(|(x, y)| wasserstein1(x, y))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MfgDiagnostics {
    pub hjb: HJBDiagnostics,
    pub fp: FPDiagnostics,
    pub outer_iterations: usize,
    pub final_fixed_point_gap: f64,
    pub converged: bool,
    pub gap_history: Vec<f64>,
    pub final_damping: f64,
    /// Distance moved by one more undamped application of the map.
    pub consistency_gap: f64,
    pub hjb_residual: f64,
    pub fp_residual: f64,
}

#[derive(Clone, Debug)]
pub struct SolutionPair {
    pub u: Trajectory,
    pub m: Trajectory,
    pub diagnostics: MfgDiagnostics,
}

/// `t -> F[m(t)]`.
pub fn coupling_trajectory(problem: &MFGProblem, m: &Trajectory) -> Result<Trajectory> {
    let fields = m
        .fields()
        .par_iter()
        .map(|f| coupling_apply(problem.coupling(), f))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(m.horizon(), fields)
}

/// One application of the fixed-point map: `μ -> u[F[μ]] -> m[-D_pH(Du)]`.
pub fn best_response(problem: &MFGProblem, mu: &Trajectory, config: &SolverConfig) -> Result<(Trajectory, Trajectory)> {
    let v = coupling_trajectory(problem, mu)?;
    let u = march_hjb(problem, &v, config)?;
    let drift = optimal_drift(problem, &u)?;
    let m = march_fp(problem, &drift, config)?;
    Ok((u, m))
}

pub fn solve_mfg_fixed_point(problem: &MFGProblem, config: &SolverConfig) -> Result<SolutionPair> {
    config.validate()?;
    let init = Trajectory::constant(problem.horizon(), config.nt, problem.m0())?;
    solve_mfg_fixed_point_from(problem, config, init)
}

/// Damped iteration `m ← (1-δ)m + δ·T(m)` from a given density trajectory.
/// The damping is halved whenever the gap grows twice in a row. Reaching
/// `max_iter` is reported through `converged = false`, not as an error.
pub fn solve_mfg_fixed_point_from(problem: &MFGProblem, config: &SolverConfig, init: Trajectory) -> Result<SolutionPair> {
    config.validate()?;
    problem.grid().ensure_same(init.grid())?;
    if init.nt() != config.nt {
        return Err(Error::invalid(format!("initial guess has Nt={}, expected {}", init.nt(), config.nt)));
    }
    let wrap = |iteration: usize| move |e: Error| Error::OuterIteration { solver: "mfg", iteration, source: Box::new(e) };

    let mut m = init;
    let mut delta = config.damping;
    let mut gaps: Vec<f64> = Vec::new();
    let mut rises = 0;
    let mut converged = false;
    let decoupled = problem.coupling().amplitude() == 0.0;

    // With F ≡ 0 the map ignores its argument, so one application is exact.
    if decoupled {
        let (_, next) = best_response(problem, &m, config).map_err(wrap(1))?;
        gaps.push(trajectory_metric(&next, &m, config.metric)?);
        m = next;
        converged = true;
    }
    while !converged && gaps.len() < config.max_iter {
        let iteration = gaps.len() + 1;
        let (_, image) = best_response(problem, &m, config).map_err(wrap(iteration))?;
        let fields = m
            .fields()
            .iter()
            .zip(image.fields())
            .map(|(old, new)| old.scaled(1.0 - delta).add(&new.scaled(delta)))
            .collect();
        let next = Trajectory::new(problem.horizon(), fields)?;
        let gap = trajectory_metric(&next, &m, config.metric)?;
        if !gap.is_finite() {
            return Err(wrap(iteration)(Error::NonFinite { solver: "mfg", step: iteration }));
        }
        if let Some(&prev) = gaps.last() {
            rises = if gap > prev { rises + 1 } else { 0 };
            if rises >= 2 {
                delta *= 0.5;
                rises = 0;
                log::info!("outer iteration {iteration}: gap rose twice, damping halved to {delta}");
            }
        }
        log::debug!("outer iteration {iteration}: gap {gap:.3e}");
        gaps.push(gap);
        m = next;
        converged = gap < config.tol;
    }

    let iterations = gaps.len();
    let v = coupling_trajectory(problem, &m)?;
    let u = march_hjb(problem, &v, config).map_err(wrap(iterations + 1))?;
    let drift = optimal_drift(problem, &u)?;
    let (m_out, fp) = solve_fp_forward(problem, &drift, config).map_err(wrap(iterations + 1))?;
    let hjb = hjb_diagnostics(problem, &u, &v, config)?;
    let consistency_gap = trajectory_metric(&m_out, &m, config.metric)?;
    let mut pair = SolutionPair {
        u,
        m: m_out,
        diagnostics: MfgDiagnostics {
            hjb,
            fp,
            outer_iterations: iterations,
            final_fixed_point_gap: if decoupled { consistency_gap } else { gaps.last().copied().unwrap_or(0.0) },
            converged,
            gap_history: gaps,
            final_damping: delta,
            consistency_gap,
            hjb_residual: 0.0,
            fp_residual: 0.0,
        },
    };
    let (hr, fr) = mfg_residual(problem, &pair, config)?;
    pair.diagnostics.hjb_residual = hr;
    pair.diagnostics.fp_residual = fr;
    Ok(pair)
}

/// Centered-in-time residuals `(hjb, fp)` of both equations, each relative to
/// the norms of its terms.
pub fn mfg_residual(problem: &MFGProblem, pair: &SolutionPair, config: &SolverConfig) -> Result<(f64, f64)> {
    let v = coupling_trajectory(problem, &pair.m)?;
    let hjb = hjb_centered_residual(problem, &pair.u, &v, config.dealias)?;
    let drift = optimal_drift(problem, &pair.u)?;
    let fp = fp_centered_residual(&pair.m, &drift, problem)?;
    Ok((hjb, fp))
}

/// Allowed relative growth between consecutive rungs that still counts as
/// decreasing.
pub const SWEEP_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub sigmas: Vec<f64>,
    pub sup_errors_u: Vec<f64>,
    pub lp_errors_du: Vec<f64>,
    pub weak_gaps_m: Vec<f64>,
    /// Geometric-mean gap ratio of the outer loop at each rung.
    pub contraction_factors: Vec<f64>,
    pub semiconcavity: Vec<f64>,
    pub lipschitz: Vec<f64>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    /// `"sup"` or `"l2_hs"` (L²(0,T; H^s_2)) for the m gaps.
    pub m_metric: String,
    pub pass: bool,
}

fn decreasing_tail(errors: &[f64], count: usize) -> bool {
    let start = errors.len().saturating_sub(count);
    errors[start..].windows(2).all(|w| w[1] < w[0] * (1.0 + SWEEP_SLACK))
}

fn observed_contraction(gaps: &[f64]) -> f64 {
    let g: Vec<f64> = gaps.iter().copied().filter(|v| *v > 0.0).collect();
    if g.len() < 2 {
        return 0.0;
    }
    (g[g.len() - 1] / g[0]).powf(1.0 / (g.len() - 1) as f64)
}

/// Solves at every `σ` of a descending ladder ending at zero and measures the
/// distance to the `σ = 0` solution. The pass flag requires the sup error of
/// `u` and the L²(Q_T) error of `Du` to decrease (up to [`SWEEP_SLACK`]) over
/// the last three positive rungs.
pub fn vanishing_viscosity_sweep(problem: &MFGProblem, sigmas: &[f64], config: &SolverConfig) -> Result<SweepReport> {
    if sigmas.len() < 2 || *sigmas.last().unwrap() != 0.0 {
        return Err(Error::invalid("sigma ladder must have at least two entries and end at 0"));
    }
    if sigmas.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::invalid("sigma ladder must be strictly descending"));
    }
    let solutions = sigmas
        .par_iter()
        .map(|&sigma| solve_mfg_fixed_point(&problem.with_sigma(sigma)?, config))
        .collect::<Result<Vec<_>>>()?;
    let reference = solutions.last().unwrap();
    let weak = problem.s() < 0.5;
    let s = problem.s();
    let rungs = &solutions[..solutions.len() - 1];
    let measured = rungs
        .par_iter()
        .map(|sol| -> Result<(f64, f64, f64)> {
            let sup_u = sol.u.sup_distance(&reference.u);
            let du_sq: Vec<f64> = sol
                .u
                .fields()
                .iter()
                .zip(reference.u.fields())
                .map(|(a, b)| gradient(&a.sub(b)).norm_squared().mean())
                .collect();
            let du = trapezoid(&du_sq, sol.u.dt()).sqrt();
            let gap = if weak {
                let sq = sol
                    .m
                    .fields()
                    .iter()
                    .zip(reference.m.fields())
                    .map(|(a, b)| Ok(bessel_norm(&a.sub(b), s, 2.0)?.powi(2)))
                    .collect::<Result<Vec<_>>>()?;
                trapezoid(&sq, sol.m.dt()).sqrt()
            } else {
                sol.m.sup_distance(&reference.m)
            };
            Ok((sup_u, du, gap))
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_errors_u: Vec<f64> = measured.iter().map(|m| m.0).collect();
    let lp_errors_du: Vec<f64> = measured.iter().map(|m| m.1).collect();
    let converged: Vec<bool> = solutions.iter().map(|s| s.diagnostics.converged).collect();
    for (sigma, ok) in sigmas.iter().zip(&converged) {
        if !ok {
            log::warn!("sweep rung sigma={sigma} did not converge");
        }
    }
    let pass = decreasing_tail(&sup_errors_u, 3) && decreasing_tail(&lp_errors_du, 3) && converged.iter().all(|c| *c);
    Ok(SweepReport {
        sigmas: sigmas.to_vec(),
        sup_errors_u,
        lp_errors_du,
        weak_gaps_m: measured.iter().map(|m| m.2).collect(),
        contraction_factors: solutions.iter().map(|s| observed_contraction(&s.diagnostics.gap_history)).collect(),
        semiconcavity: solutions.iter().map(|s| s.diagnostics.hjb.semiconcavity_constant).collect(),
        lipschitz: solutions.iter().map(|s| s.diagnostics.hjb.lipschitz_constant).collect(),
        iterations: solutions.iter().map(|s| s.diagnostics.outer_iterations).collect(),
        converged,
        m_metric: if weak { "l2_hs" } else { "sup" }.into(),
        pass,
    })
}

/// Number of undamped Picard iterates used to estimate each `L(T)`.
pub const PICARD_ITERATIONS: usize = 10;

/// Relative tolerance on the slope of `log L` against `log T`.
pub const PICARD_SLOPE_BAND: f64 = 0.3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub horizons: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    /// Successive iterate gaps for each horizon.
    pub gaps: Vec<Vec<f64>>,
    pub fitted_slope: Option<f64>,
    pub expected_slope: f64,
    pub p: f64,
    pub contracts_at_smallest: bool,
    pub increasing: bool,
    pub slope_in_band: bool,
}

impl PicardReport {
    pub fn pass(&self) -> bool {
        self.contracts_at_smallest && self.increasing && self.slope_in_band
    }
}

/// State `(v, m)` of the forward-forward system, with `v(τ) = u(T - τ)`.
struct PicardState {
    v: Vec<SpectralField>,
    m: Vec<SpectralField>,
}

/// One application of the Duhamel map with ETD stepping:
/// `v̂(τ) = 𝒯_τ u_T + ∫𝒯_{τ-r}(F[m(T-r)] - H(Dv(r))) dr` and
/// `m̂(t) = 𝒯_t m₀ + ∫𝒯_{t-r} div(D_pH(Dv(T-r)) m(r)) dr`.
fn duhamel_map(problem: &MFGProblem, state: &PicardState, prop: &LinearPropagator, dealiased: bool) -> Result<PicardState> {
    let nt = state.v.len() - 1;
    let mut v = Vec::with_capacity(nt + 1);
    v.push(problem.u_t().clone());
    for i in 0..nt {
        let source = coupling_apply(problem.coupling(), &state.m[nt - i])?
            .sub(&hamiltonian_term(problem, &state.v[i], dealiased)?);
        let next = prop.step(&v[i], Some(&source));
        if !next.is_finite() {
            return Err(Error::NonFinite { solver: "picard", step: i + 1 });
        }
        v.push(next);
    }
    let ham = problem.hamiltonian();
    let mut m = Vec::with_capacity(nt + 1);
    m.push(problem.m0().clone());
    for j in 0..nt {
        let b = if ham.is_zero() {
            crate::field::VectorField::zeros(problem.grid())
        } else {
            ham.grad_p(&gradient(&state.v[nt - j]))?.scaled(-1.0)
        };
        // march_continuity with a frozen argument density: source from state.m[j]
        let flux = b.weighted(&state.m[j])?;
        let flux = if dealiased { flux.map_components(crate::spectral::dealias) } else { flux };
        let source = crate::spectral::divergence(&flux)?.scaled(-1.0);
        let next = prop.step(&m[j], Some(&source));
        if !next.is_finite() {
            return Err(Error::NonFinite { solver: "picard", step: j + 1 });
        }
        m.push(next);
    }
    Ok(PicardState { v, m })
}

/// `‖v₁-v₂‖_{X^{2s}_p} + ‖m₁-m₂‖_{X^{2s-1}_p}` with `X^μ_p = C([0,T]; H^μ_p)`.
fn picard_distance(a: &PicardState, b: &PicardState, s: f64, p: f64) -> Result<f64> {
    let sup = |x: &[SpectralField], y: &[SpectralField], mu: f64| -> Result<f64> {
        Ok(x.par_iter()
            .zip(y.par_iter())
            .map(|(f, g)| bessel_norm(&f.sub(g), mu, p))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max))
    };
    Ok(sup(&a.v, &b.v, 2.0 * s)? + sup(&a.m, &b.m, 2.0 * s - 1.0)?)
}

/// Empirical Lipschitz factor of the Duhamel map for each horizon: the
/// tail geometric mean of successive gap ratios over [`PICARD_ITERATIONS`]
/// undamped iterates started from `(u_T, m₀)` held constant in time. The
/// integrator is forced to ETD1.
pub fn picard_short_time(problem: &MFGProblem, config: &SolverConfig, horizons: &[f64], p: f64) -> Result<PicardReport> {
    let s = problem.s();
    if s <= 0.5 {
        return Err(Error::Assumption {
            assumption: "s ∈ (1/2,1)".into(),
            detail: format!("short-time contraction needs s > 1/2, got s = {s}"),
        });
    }
    if horizons.is_empty() || horizons.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("horizons must be a nonempty ascending ladder"));
    }
    config.validate()?;
    let cfg = SolverConfig { integrator: Integrator::Etd1, ..*config };
    let results = horizons
        .par_iter()
        .map(|&horizon| -> Result<(f64, Vec<f64>)> {
            let pb = problem.with_horizon(horizon)?;
            let prop = LinearPropagator::new(pb.grid(), &pb.operator(), horizon / cfg.nt as f64, cfg.integrator)?;
            let mut state = PicardState {
                v: vec![pb.u_t().clone(); cfg.nt + 1],
                m: vec![pb.m0().clone(); cfg.nt + 1],
            };
            let mut gaps = Vec::with_capacity(PICARD_ITERATIONS);
            for _ in 0..PICARD_ITERATIONS {
                let next = duhamel_map(&pb, &state, &prop, cfg.dealias)?;
                gaps.push(picard_distance(&next, &state, s, p)?);
                state = next;
            }
            Ok((observed_contraction_strict(&gaps), gaps))
        })
        .collect::<Result<Vec<_>>>()?;
    let factors: Vec<f64> = results.iter().map(|r| r.0).collect();
    let expected = (2.0 * s - 1.0) / (2.0 * s);
    let slope = loglog_slope(horizons, &factors);
    Ok(PicardReport {
        horizons: horizons.to_vec(),
        gaps: results.into_iter().map(|r| r.1).collect(),
        fitted_slope: slope,
        expected_slope: expected,
        p,
        contracts_at_smallest: factors[0] < 1.0,
        increasing: factors.windows(2).all(|w| w[1] > w[0]),
        slope_in_band: slope.is_some_and(|v| (v - expected).abs() <= PICARD_SLOPE_BAND * expected),
        contraction_factors: factors,
    })
}

/// Geometric mean of successive gap ratios, skipping the first ratio (it
/// mostly reflects the initial iterate). Ratios alternate with period two, so
/// an even number of them is kept. A gap that drops to zero gives factor 0.
fn observed_contraction_strict(gaps: &[f64]) -> f64 {
    let tail = if gaps.len() >= 4 { &gaps[1..] } else { gaps };
    let tail = if tail.len() % 2 == 0 { &tail[..tail.len() - 1] } else { tail };
    if tail.len() < 2 || tail.iter().any(|g| *g == 0.0) {
        return 0.0;
    }
    (tail[tail.len() - 1] / tail[0]).powf(1.0 / (tail.len() - 1) as f64)
}

/// Initial density trajectories for the uniqueness experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialGuess {
    /// `m⁽⁰⁾(t) = m₀`.
    Stationary,
    /// Heat-smoothed mixture `(1-a)m₀ + a·ρ` with a seeded random density `ρ`,
    /// constant in time.
    Perturbed { seed: u64, amplitude: f64 },
}

impl InitialGuess {
    pub fn build(&self, problem: &MFGProblem, nt: usize) -> Result<Trajectory> {
        let m = match *self {
            InitialGuess::Stationary => problem.m0().clone(),
            InitialGuess::Perturbed { seed, amplitude } => {
                if !(0.0..=1.0).contains(&amplitude) {
                    return Err(Error::invalid(format!("perturbation amplitude must lie in [0,1], got {amplitude}")));
                }
                let mut r = corpus::rng(seed);
                let spec = CorpusSpec::quarter_band(problem.grid(), 1.0);
                let rho = random_density(problem.grid(), &spec, 0.9, &mut r);
                let mix = problem.m0().scaled(1.0 - amplitude).add(&rho.scaled(amplitude));
                heat_step(&mix, 1e-3, &problem.operator())?
            }
        };
        Trajectory::constant(problem.horizon(), nt, &m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub inits: Vec<InitialGuess>,
    /// `‖u_a - u_b‖_{∞,Q} + metric(m_a, m_b)` for every pair `a < b`.
    pub pairwise_gaps: Vec<f64>,
    pub max_gap: f64,
    pub converged: Vec<bool>,
    pub iterations: Vec<usize>,
    pub tol: f64,
    /// `None` outside the monotone regime, where no claim is made.
    pub pass: Option<bool>,
}

pub fn uniqueness_experiment(problem: &MFGProblem, inits: &[InitialGuess], config: &SolverConfig) -> Result<UniquenessReport> {
    if inits.len() < 2 {
        return Err(Error::invalid("need at least two initial guesses"));
    }
    let branches = inits
        .par_iter()
        .map(|init| solve_mfg_fixed_point_from(problem, config, init.build(problem, config.nt)?))
        .collect::<Result<Vec<_>>>()?;
    let mut pairwise = Vec::new();
    for a in 0..branches.len() {
        for b in (a + 1)..branches.len() {
            let du = branches[a].u.sup_distance(&branches[b].u);
            let dm = trajectory_metric(&branches[a].m, &branches[b].m, config.metric)?;
            pairwise.push(du + dm);
        }
    }
    let max_gap = pairwise.iter().copied().fold(0.0, f64::max);
    let converged: Vec<bool> = branches.iter().map(|b| b.diagnostics.converged).collect();
    let pass = (problem.coupling().mode() == CouplingMode::Monotone)
        .then(|| converged.iter().all(|c| *c) && max_gap < 10.0 * config.tol);
    Ok(UniquenessReport {
        inits: inits.to_vec(),
        pairwise_gaps: pairwise,
        max_gap,
        converged,
        iterations: branches.iter().map(|b| b.diagnostics.outer_iterations).collect(),
        tol: config.tol,
        pass,
    })
}
