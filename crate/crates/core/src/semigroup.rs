//! The fractional heat semigroup, its viscous extension and linear time
//! stepping, plus decay-rate measurements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{fractional_symbol, FourierSymbol, SpectralField, VectorField};
use crate::grid::PeriodicGrid;
use crate::report::{loglog_slope, InequalityReport};
use crate::spaces::bessel_norm;

/// Generator `σ(-Δ) + (-Δ)^s` with symbol `σ(2π|k|)² + (2π|k|)^{2s}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionOperator {
    pub s: f64,
    pub sigma: f64,
}

impl EvolutionOperator {
    pub fn new(s: f64, sigma: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid(format!("fractional order must lie in (0,1), got {s}")));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("viscosity must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { s, sigma })
    }

    pub fn lambda(&self, k: [i64; 2]) -> f64 {
        let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
        self.sigma * 4.0 * std::f64::consts::PI.powi(2) * k2 + fractional_symbol(k, self.s)
    }

    pub fn symbol(&self) -> FourierSymbol {
        let op = *self;
        FourierSymbol::real(format!("generator(s={}, sigma={})", op.s, op.sigma), move |k| op.lambda(k))
    }

    /// `A f` for the generator `A`. The Nyquist mode is dropped.
    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        let grid = f.grid();
        let coeffs = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = grid.wavevector(i);
                if grid.is_nyquist(k) {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * self.lambda(k)
                }
            })
            .collect();
        SpectralField::from_coeffs_unchecked(grid, coeffs)
    }
}

/// Linear integrator for `∂_t f + A f = g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Implicit Euler on `A`, explicit source.
    #[default]
    Imex,
    /// First-order exponential time differencing; exact on the linear part.
    Etd1,
}

impl std::str::FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imex" => Ok(Integrator::Imex),
            "etd1" => Ok(Integrator::Etd1),
            other => Err(Error::invalid(format!("unknown integrator `{other}` (expected imex or etd1)"))),
        }
    }
}

/// Per-mode factors of one step `ĉ' = a(k) ĉ + b(k) ĝ`, precomputed for a
/// fixed step size.
#[derive(Clone, Debug)]
pub struct LinearPropagator {
    grid: PeriodicGrid,
    decay: Vec<f64>,
    forcing: Vec<f64>,
}

impl LinearPropagator {
    pub fn new(grid: &PeriodicGrid, op: &EvolutionOperator, dt: f64, integrator: Integrator) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        let mut decay = Vec::with_capacity(grid.len());
        let mut forcing = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let lam = op.lambda(grid.wavevector(i));
            let (a, b) = match integrator {
                Integrator::Imex => (1.0 / (1.0 + dt * lam), dt / (1.0 + dt * lam)),
                Integrator::Etd1 => {
                    let x = dt * lam;
                    // φ₁(x)·dt with a series near zero to avoid cancellation
                    let phi = if x < 1e-8 { dt * (1.0 - 0.5 * x) } else { -(-x).exp_m1() / lam };
                    ((-x).exp(), phi)
                }
            };
            decay.push(a);
            forcing.push(b);
        }
        Ok(Self {
            grid: grid.clone(),
            decay,
            forcing,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Advances `f` by one step with explicit source `g` given in
    /// coefficient space (or no source).
    pub fn step_coeffs(&self, f: &SpectralField, source: Option<&[Complex64]>) -> SpectralField {
        let fc = f.coeffs();
        let coeffs: Vec<Complex64> = match source {
            Some(g) => fc
                .iter()
                .zip(g)
                .zip(self.decay.iter().zip(&self.forcing))
                .map(|((c, s), (a, b))| c * a + s * b)
                .collect(),
            None => fc.iter().zip(&self.decay).map(|(c, a)| c * a).collect(),
        };
        SpectralField::from_coeffs_unchecked(&self.grid, coeffs)
    }

    pub fn step(&self, f: &SpectralField, source: Option<&SpectralField>) -> SpectralField {
        self.step_coeffs(f, source.map(|s| s.coeffs()))
    }
}

/// Exact semigroup `e^{-tA} f`.
pub fn heat_step(f: &SpectralField, t: f64, op: &EvolutionOperator) -> Result<SpectralField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("evolution time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * (-t * op.lambda(grid.wavevector(i))).exp())
        .collect();
    Ok(SpectralField::from_coeffs_unchecked(grid, coeffs))
}

/// One implicit-Euler IMEX step: `(I + dt A)^{-1}(f + dt g)`.
pub fn imex_step(f: &SpectralField, source: &SpectralField, dt: f64, op: &EvolutionOperator) -> Result<SpectralField> {
    imex_step_with(f, source, dt, op, Integrator::Imex)
}

pub fn imex_step_with(
    f: &SpectralField,
    source: &SpectralField,
    dt: f64,
    op: &EvolutionOperator,
    integrator: Integrator,
) -> Result<SpectralField> {
    f.grid().ensure_same(source.grid())?;
    let prop = LinearPropagator::new(f.grid(), op, dt, integrator)?;
    Ok(prop.step(f, Some(source)))
}

/// Time-indexed fields on the uniform grid `t_i = i·T/Nt`, `i = 0..=Nt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<F = SpectralField> {
    horizon: f64,
    fields: Vec<F>,
}

pub type DriftTrajectory = Trajectory<VectorField>;

pub trait OnGrid {
    fn on_grid(&self) -> &PeriodicGrid;
}

impl OnGrid for SpectralField {
    fn on_grid(&self) -> &PeriodicGrid {
        self.grid()
    }
}

impl OnGrid for VectorField {
    fn on_grid(&self) -> &PeriodicGrid {
        self.grid()
    }
}

impl<F: OnGrid> Trajectory<F> {
    pub fn new(horizon: f64, fields: Vec<F>) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
        }
        if fields.len() < 2 {
            return Err(Error::invalid("a trajectory needs at least two time levels"));
        }
        let grid = fields[0].on_grid();
        for f in &fields[1..] {
            grid.ensure_same(f.on_grid())?;
        }
        Ok(Self { horizon, fields })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.fields[0].on_grid()
    }
}

impl<F> Trajectory<F> {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of steps `Nt`.
    pub fn nt(&self) -> usize {
        self.fields.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.nt() as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.fields.len()).map(|i| self.time(i)).collect()
    }

    pub fn fields(&self) -> &[F] {
        &self.fields
    }

    pub fn at(&self, i: usize) -> &F {
        &self.fields[i]
    }

    pub fn first(&self) -> &F {
        &self.fields[0]
    }

    pub fn last(&self) -> &F {
        &self.fields[self.fields.len() - 1]
    }

    pub fn into_fields(self) -> Vec<F> {
        self.fields
    }

    pub fn map<G>(&self, f: impl FnMut(&F) -> G) -> Trajectory<G> {
        Trajectory {
            horizon: self.horizon,
            fields: self.fields.iter().map(f).collect(),
        }
    }

    /// Time reversal `t -> T - t`.
    pub fn reversed(&self) -> Trajectory<F>
    where
        F: Clone,
    {
        Trajectory {
            horizon: self.horizon,
            fields: self.fields.iter().rev().cloned().collect(),
        }
    }

    /// Every `stride`-th level; `Nt` must be divisible by `stride`.
    pub fn subsampled(&self, stride: usize) -> Result<Trajectory<F>>
    where
        F: Clone,
    {
        if stride == 0 || self.nt() % stride != 0 || self.nt() / stride < 1 {
            return Err(Error::invalid(format!("cannot subsample Nt={} by {stride}", self.nt())));
        }
        Ok(Trajectory {
            horizon: self.horizon,
            fields: self.fields.iter().step_by(stride).cloned().collect(),
        })
    }
}

impl Trajectory<SpectralField> {
    /// A constant-in-time trajectory.
    pub fn constant(horizon: f64, nt: usize, field: &SpectralField) -> Result<Self> {
        Self::new(horizon, vec![field.clone(); nt + 1])
    }

    /// `sup_t sup_x |f|`.
    pub fn sup_norm(&self) -> f64 {
        self.fields.iter().map(SpectralField::max_abs).fold(0.0, f64::max)
    }

    /// `sup_t ‖f(t) - g(t)‖₂`.
    pub fn sup_l2_distance(&self, other: &Self) -> f64 {
        self.fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b).l2_norm())
            .fold(0.0, f64::max)
    }

    /// `sup_t sup_x |f(t) - g(t)|`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b).max_abs())
            .fold(0.0, f64::max)
    }

    /// Trapezoid-in-time L²(Q_T) norm of the difference.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let sq: Vec<f64> = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b).l2_norm().powi(2))
            .collect();
        trapezoid(&sq, self.dt()).sqrt()
    }
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(samples: &[f64], dt: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = samples[1..n - 1].iter().sum();
            dt * (inner + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}

/// Exact orbit `t -> e^{-tA} f` sampled on `Nt + 1` uniform levels.
pub fn semigroup_orbit(f: &SpectralField, horizon: f64, nt: usize, op: &EvolutionOperator) -> Result<Trajectory> {
    let fields = (0..=nt)
        .map(|i| heat_step(f, horizon * i as f64 / nt as f64, op))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(horizon, fields)
}

/// Relative tolerance on decay exponents.
pub const RATE_TOLERANCE: f64 = 0.1;

fn check_ladder(times: &[f64]) -> Result<()> {
    if times.len() < 4 {
        return Err(Error::invalid(format!("need at least 4 time points, got {}", times.len())));
    }
    if times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time ladder must be positive and increasing"));
    }
    Ok(())
}

/// Smoothing-rate check `‖e^{-tA} f‖_{ν+γ,p} <= C t^{-γ/2s} ‖f‖_{ν,p}` on a
/// single field.
///
/// `fitted_exponent` is the log-log slope over the whole ladder. On a finite
/// grid every field is eventually smooth, so only the small-time end can
/// contradict the bound: the run passes when the slope over the lower half
/// of the ladder is no steeper than `-γ/2s` (within [`RATE_TOLERANCE`]) and
/// the empirical constant stays finite.
pub fn measure_decay_rate(
    f: &SpectralField,
    nu: f64,
    gamma: f64,
    p: f64,
    op: &EvolutionOperator,
    times: &[f64],
) -> Result<InequalityReport> {
    check_ladder(times)?;
    if gamma < 0.0 {
        return Err(Error::invalid("gamma must be >= 0"));
    }
    let rate = gamma / (2.0 * op.s);
    let base = bessel_norm(f, nu, p)?;
    if base == 0.0 {
        return Err(Error::invalid("decay rate needs a nonzero field"));
    }
    let norms = times
        .iter()
        .map(|&t| bessel_norm(&heat_step(f, t, op)?, nu + gamma, p))
        .collect::<Result<Vec<_>>>()?;
    let fitted = loglog_slope(times, &norms);
    let half = times.len().div_ceil(2).max(2);
    let early = loglog_slope(&times[..half], &norms[..half]);
    let worst = times
        .iter()
        .zip(&norms)
        .map(|(t, n)| t.powf(rate) * n / base)
        .fold(0.0, f64::max);
    let tol = RATE_TOLERANCE * rate.max(1e-9);
    let pass = worst.is_finite() && early.map_or(true, |e| e >= -rate - tol);
    let mut report = InequalityReport::new("semigroup_decay")
        .with_config(json!({"nu": nu, "gamma": gamma, "p": p, "s": op.s, "sigma": op.sigma, "times": times}))
        .constant("expected_exponent", -rate);
    if let Some(e) = early {
        report = report.constant("early_exponent", e);
    }
    report.samples = times.len();
    report.worst_ratio = worst;
    report.fitted_exponent = fitted;
    report.pass = pass;
    Ok(report)
}

/// Geometric ladder on which `t^a e^{-tλ(k)}` peaks at a resolved mode for
/// `a = rate`: from `rate/λ(k_max)` to `rate/λ(1)`, where `k_max` is the
/// largest non-Nyquist mode. Outside it the sup over a corpus is pinned to
/// the lowest or highest mode and decays exponentially or saturates.
pub fn resolvable_ladder(grid: &PeriodicGrid, op: &EvolutionOperator, rate: f64, count: usize) -> Result<Vec<f64>> {
    if !(rate > 0.0) || count < 4 {
        return Err(Error::invalid("resolvable ladder needs rate > 0 and at least 4 points"));
    }
    let kmax = (grid.n() / 2 - 1) as i64;
    let lo = rate / op.lambda([kmax, 0]);
    let hi = rate / op.lambda([1, 0]);
    Ok(crate::report::geometric_ladder(lo, hi, count))
}

/// `sup_f ‖e^{-tA} f‖_{ν+γ,p} / ‖f‖_{ν,p}` over the corpus at each time.
pub fn corpus_decay_profile(
    corpus: &[SpectralField],
    nu: f64,
    gamma: f64,
    p: f64,
    op: &EvolutionOperator,
    times: &[f64],
) -> Result<Vec<f64>> {
    let bases = corpus.iter().map(|f| bessel_norm(f, nu, p)).collect::<Result<Vec<_>>>()?;
    times
        .iter()
        .map(|&t| {
            let mut best: f64 = 0.0;
            for (f, b) in corpus.iter().zip(&bases) {
                if *b > 0.0 {
                    best = best.max(bessel_norm(&heat_step(f, t, op)?, nu + gamma, p)? / b);
                }
            }
            Ok(best)
        })
        .collect()
}

/// Same measurement taking, at each time, the supremum of
/// `‖e^{-tA} f‖_{ν+γ,p} / ‖f‖_{ν,p}` over a corpus. This approximates the
/// operator norm, whose exponent should match `-γ/2s`; pass requires the
/// fitted slope within [`RATE_TOLERANCE`] relative of it.
pub fn measure_decay_rate_corpus(
    corpus: &[SpectralField],
    nu: f64,
    gamma: f64,
    p: f64,
    op: &EvolutionOperator,
    times: &[f64],
) -> Result<InequalityReport> {
    check_ladder(times)?;
    if corpus.is_empty() {
        return Err(Error::invalid("empty corpus"));
    }
    let rate = gamma / (2.0 * op.s);
    let sups = corpus_decay_profile(corpus, nu, gamma, p, op, times)?;
    let fitted = loglog_slope(times, &sups);
    let worst = times
        .iter()
        .zip(&sups)
        .map(|(t, n)| t.powf(rate) * n)
        .fold(0.0, f64::max);
    let pass = match fitted {
        Some(e) => (e + rate).abs() <= RATE_TOLERANCE * rate.max(1e-9) && worst.is_finite(),
        None => false,
    };
    let mut report = InequalityReport::new("semigroup_decay_sup")
        .with_config(json!({"nu": nu, "gamma": gamma, "p": p, "s": op.s, "sigma": op.sigma, "times": times}))
        .constant("expected_exponent", -rate);
    report.samples = corpus.len();
    report.worst_ratio = worst;
    report.fitted_exponent = fitted;
    report.pass = pass;
    Ok(report)
}

/// Continuity at `t = 0`: `‖e^{-tA} f - f‖_p <= C t^{θ/s} ‖f‖_{2θ,p}`.
pub fn measure_continuity_rate(
    f: &SpectralField,
    theta: f64,
    p: f64,
    op: &EvolutionOperator,
    times: &[f64],
) -> Result<InequalityReport> {
    if !(theta > 0.0 && theta <= op.s) {
        return Err(Error::invalid(format!("theta must lie in (0, s], got {theta}")));
    }
    check_ladder(times)?;
    let rate = theta / op.s;
    let base = bessel_norm(f, 2.0 * theta, p)?;
    let diffs = times
        .iter()
        .map(|&t| Ok(heat_step(f, t, op)?.sub(f).lp_norm(p)))
        .collect::<Result<Vec<_>>>()?;
    let fitted = loglog_slope(times, &diffs);
    let worst = if base > 0.0 {
        times
            .iter()
            .zip(&diffs)
            .map(|(t, d)| d / (t.powf(rate) * base))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let pass = worst.is_finite() && fitted.map_or(true, |e| e >= rate - RATE_TOLERANCE);
    let mut report = InequalityReport::new("semigroup_continuity")
        .with_config(json!({"theta": theta, "p": p, "s": op.s, "sigma": op.sigma, "times": times}))
        .constant("expected_exponent", rate);
    report.samples = times.len();
    report.worst_ratio = worst;
    report.fitted_exponent = fitted;
    report.pass = pass;
    Ok(report)
}

/// Empirical constant of the maximal-regularity estimate for
/// `∂_t u + (-Δ)^s u = g`, `u(0) = u₀`:
/// `‖u‖_{ℋ^{2s}_p} / (‖g‖_{L^p(Q_T)} + ‖u₀‖_{2s-2s/p+ε,p})`.
///
/// `u` is propagated with `integrator` on the time grid of `source`; the
/// parabolic norm is `(∫‖u‖_{2s,p}^p)^{1/p} + (∫‖∂_t u‖_p^p)^{1/p}` with
/// `∂_t u = g - (-Δ)^s u`.
pub fn parabolic_regularity_constant(
    u0: &SpectralField,
    source: &Trajectory,
    s: f64,
    p: f64,
    eps: f64,
    integrator: Integrator,
) -> Result<f64> {
    let op = EvolutionOperator::new(s, 0.0)?;
    let prop = LinearPropagator::new(u0.grid(), &op, source.dt(), integrator)?;
    let mut u = u0.clone();
    let mut space = Vec::with_capacity(source.nt() + 1);
    let mut time = Vec::with_capacity(source.nt() + 1);
    let mut forcing = Vec::with_capacity(source.nt() + 1);
    for i in 0..=source.nt() {
        if i > 0 {
            u = prop.step(&u, Some(source.at(i - 1)));
        }
        let g = source.at(i);
        space.push(bessel_norm(&u, 2.0 * s, p)?.powf(p));
        time.push(g.sub(&op.apply(&u)).lp_norm(p).powf(p));
        forcing.push(g.lp_norm(p).powf(p));
    }
    let dt = source.dt();
    let lhs = trapezoid(&space, dt).powf(1.0 / p) + trapezoid(&time, dt).powf(1.0 / p);
    let rhs = trapezoid(&forcing, dt).powf(1.0 / p) + bessel_norm(u0, 2.0 * s - 2.0 * s / p + eps, p)?;
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::report::geometric_ladder;
    use std::f64::consts::PI;

    fn cosine(n: usize) -> SpectralField {
        let g = make_grid(1, n).unwrap();
        SpectralField::from_fn(&g, |x| (2.0 * PI * x[0]).cos())
    }

    #[test]
    fn cosine_decays_at_its_eigenvalue() {
        let f = cosine(32);
        for s in [0.3, 0.5, 0.75] {
            let op = EvolutionOperator::new(s, 0.0).unwrap();
            let t = 0.07;
            let out = heat_step(&f, t, &op).unwrap();
            let factor = (-t * (2.0 * PI).powf(2.0 * s)).exp();
            for (o, v) in out.values().iter().zip(f.values()) {
                assert!((o - factor * v).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_time_is_identity_and_negative_time_fails() {
        let f = cosine(16);
        let op = EvolutionOperator::new(0.5, 0.1).unwrap();
        assert_eq!(heat_step(&f, 0.0, &op).unwrap().values(), f.values());
        assert!(heat_step(&f, -1.0, &op).is_err());
    }

    #[test]
    fn constant_source_step_both_integrators() {
        let g = make_grid(1, 16).unwrap();
        let op = EvolutionOperator::new(0.6, 0.05).unwrap();
        let zero = SpectralField::zeros(&g);
        let c = SpectralField::constant(&g, 2.0);
        for integ in [Integrator::Imex, Integrator::Etd1] {
            let out = imex_step_with(&zero, &c, 0.01, &op, integ).unwrap();
            for v in out.values() {
                assert!((v - 0.02).abs() < 1e-15);
            }
        }
        assert!(imex_step(&zero, &c, 0.0, &op).is_err());
        let same = imex_step(&c, &zero, 0.3, &op).unwrap();
        for v in same.values() {
            assert!((v - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn operator_validation() {
        assert!(EvolutionOperator::new(0.0, 0.0).is_err());
        assert!(EvolutionOperator::new(1.0, 0.0).is_err());
        assert!(EvolutionOperator::new(0.5, -0.1).is_err());
        let op = EvolutionOperator::new(0.5, 0.2).unwrap();
        assert_eq!(op.lambda([0, 0]), 0.0);
    }

    #[test]
    fn decay_report_single_mode_and_gamma_zero() {
        let f = cosine(32);
        let op = EvolutionOperator::new(0.75, 0.0).unwrap();
        let times = geometric_ladder(1e-3, 1.0, 8);
        let r = measure_decay_rate(&f, 0.0, 1.5, 2.0, &op, &times).unwrap();
        assert!(r.pass);
        assert!(r.fitted_exponent.unwrap() < -1.0);
        let r0 = measure_decay_rate(&f, 0.0, 0.0, 2.0, &op, &times).unwrap();
        assert!(r0.fitted_exponent.unwrap() <= 0.0);
        assert!(measure_decay_rate(&f, 0.0, 1.0, 2.0, &op, &times[..3]).is_err());
    }

    #[test]
    fn continuity_single_mode() {
        let f = cosine(32);
        let op = EvolutionOperator::new(0.5, 0.0).unwrap();
        let times = geometric_ladder(1e-6, 1e-3, 8);
        let r = measure_continuity_rate(&f, 0.5, 2.0, &op, &times).unwrap();
        assert!(r.pass);
        assert!((r.fitted_exponent.unwrap() - 1.0).abs() < 1e-2);
        let c = SpectralField::constant(f.grid(), 3.0);
        let rc = measure_continuity_rate(&c, 0.5, 2.0, &op, &times).unwrap();
        assert!(rc.pass);
        assert_eq!(rc.worst_ratio, 0.0);
        assert!(measure_continuity_rate(&f, 0.7, 2.0, &op, &times).is_err());
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let samples: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        assert!((trapezoid(&samples, 0.1) - 0.5).abs() < 1e-14);
    }
}
