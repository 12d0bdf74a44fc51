use std::f64::consts::PI;

use fmfg_core::corpus::{band_limited_field, random_density, rng, shell_corpus, CorpusSpec};
use fmfg_core::semigroup::{
    heat_step, imex_step_with, measure_continuity_rate, measure_decay_rate_corpus, resolvable_ladder, semigroup_orbit,
    LinearPropagator,
};
use fmfg_core::spectral::fractional_laplacian;
use fmfg_core::{make_grid, EvolutionOperator, Integrator, PeriodicGrid, SpectralField};
use proptest::prelude::*;

fn density(g: &PeriodicGrid, seed: u64) -> SpectralField {
    random_density(g, &CorpusSpec::quarter_band(g, 1.0), 0.8, &mut rng(seed))
}

#[test]
fn pure_mode_decays_at_its_eigenvalue() {
    let g = make_grid(2, 16).unwrap();
    let op = EvolutionOperator::new(0.6, 0.01).unwrap();
    let f = SpectralField::from_fn(&g, |x| (2.0 * PI * (2.0 * x[0] - 3.0 * x[1])).sin());
    let lam = 0.01 * 4.0 * PI * PI * 13.0 + (2.0 * PI * 13f64.sqrt()).powf(1.2);
    for t in [1e-3, 1e-2, 0.1] {
        let out = heat_step(&f, t, &op).unwrap();
        assert!(out.sub(&f.scaled((-t * lam).exp())).max_abs() < 1e-13);
    }
}

#[test]
fn semigroup_property_and_commutation() {
    let g = make_grid(1, 64).unwrap();
    let op = EvolutionOperator::new(0.4, 0.0).unwrap();
    let f = band_limited_field(&g, &CorpusSpec::quarter_band(&g, 0.5), &mut rng(3));
    let (t, s) = (0.013, 0.021);
    let two = heat_step(&heat_step(&f, t, &op).unwrap(), s, &op).unwrap();
    let one = heat_step(&f, t + s, &op).unwrap();
    assert!(two.sub(&one).max_abs() < 1e-13);
    let a = fractional_laplacian(&heat_step(&f, t, &op).unwrap(), 0.4).unwrap();
    let b = heat_step(&fractional_laplacian(&f, 0.4).unwrap(), t, &op).unwrap();
    assert!(a.sub(&b).max_abs() < 1e-11 * a.max_abs().max(1.0));
}

#[test]
fn orbit_is_sampled_on_uniform_grid() {
    let g = make_grid(1, 32).unwrap();
    let op = EvolutionOperator::new(0.5, 0.0).unwrap();
    let f = density(&g, 1);
    let orbit = semigroup_orbit(&f, 0.2, 10, &op).unwrap();
    assert_eq!(orbit.nt(), 10);
    assert!((orbit.dt() - 0.02).abs() < 1e-15);
    assert_eq!(orbit.first(), &f);
    assert!(orbit.last().sub(&heat_step(&f, 0.2, &op).unwrap()).max_abs() < 1e-15);
}

/// Scalar oracle: a single mode `ĉ' = -λĉ + g` has the closed form
/// `ĉ(t) = g/λ + (ĉ₀ - g/λ)e^{-λt}`.
#[test]
fn first_order_convergence_on_scalar_mode() {
    let g = make_grid(1, 16).unwrap();
    let op = EvolutionOperator::new(0.75, 0.0).unwrap();
    let lam = (2.0 * PI).powf(1.5);
    let mode = SpectralField::from_fn(&g, |x| (2.0 * PI * x[0]).cos());
    let source = mode.scaled(3.0);
    let horizon = 0.2;
    let exact = mode.scaled(3.0 / lam + (1.0 - 3.0 / lam) * (-lam * horizon).exp());
    let errs: Vec<f64> = [50usize, 100, 200, 400]
        .iter()
        .map(|&nt| {
            let dt = horizon / nt as f64;
            let prop = LinearPropagator::new(&g, &op, dt, Integrator::Imex).unwrap();
            let mut f = mode.clone();
            for _ in 0..nt {
                f = prop.step(&f, Some(&source));
            }
            f.sub(&exact).max_abs()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.9, "errors {errs:?}");
    }
    // ETD1 is exact for a time-independent source
    let prop = LinearPropagator::new(&g, &op, horizon, Integrator::Etd1).unwrap();
    assert!(prop.step(&mode, Some(&source)).sub(&exact).max_abs() < 1e-13);
}

#[test]
fn imex_helper_matches_propagator() {
    let g = make_grid(1, 32).unwrap();
    let op = EvolutionOperator::new(0.3, 0.05).unwrap();
    let f = density(&g, 2);
    let src = band_limited_field(&g, &CorpusSpec::quarter_band(&g, 1.0), &mut rng(4));
    let prop = LinearPropagator::new(&g, &op, 0.01, Integrator::Imex).unwrap();
    let a = imex_step_with(&f, &src, 0.01, &op, Integrator::Imex).unwrap();
    assert!(a.sub(&prop.step(&f, Some(&src))).max_abs() < 1e-15);
}

#[test]
fn corpus_decay_exponent_matches_rate() {
    let g = make_grid(1, 256).unwrap();
    let corpus = shell_corpus(&g, 120, 7);
    for s in [0.3, 0.75] {
        let op = EvolutionOperator::new(s, 0.0).unwrap();
        let gamma = 2.0 * s;
        let times = resolvable_ladder(&g, &op, 1.0, 8).unwrap();
        let rep = measure_decay_rate_corpus(&corpus, 0.0, gamma, 2.0, &op, &times).unwrap();
        let slope = rep.fitted_exponent.unwrap();
        assert!((slope + 1.0).abs() < 0.1, "s={s} slope={slope}");
        assert!(rep.pass);
    }
}

#[test]
fn continuity_exponent_on_smooth_field() {
    let g = make_grid(1, 64).unwrap();
    let op = EvolutionOperator::new(0.75, 0.0).unwrap();
    let f = band_limited_field(&g, &CorpusSpec::quarter_band(&g, 2.0), &mut rng(8));
    let lam = op.lambda([16, 0]);
    let times = fmfg_core::report::geometric_ladder(1e-4 / lam, 1e-1 / lam, 8);
    for theta in [0.375, 0.75] {
        let rep = measure_continuity_rate(&f, theta, 2.0, &op, &times).unwrap();
        assert!(rep.pass, "theta={theta} slope={:?}", rep.fitted_exponent);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heat_preserves_mass_and_contracts(seed in any::<u64>(), s in 0.1f64..0.95, sigma in 0.0f64..0.1, t in 1e-4f64..0.5) {
        let g = make_grid(1, 32).unwrap();
        let op = EvolutionOperator::new(s, sigma).unwrap();
        let f = density(&g, seed);
        let out = heat_step(&f, t, &op).unwrap();
        prop_assert!((out.mean() - f.mean()).abs() < 1e-14);
        prop_assert!(out.l2_norm() <= f.l2_norm() * (1.0 + 1e-14));
        prop_assert!(out.sub(&SpectralField::constant(&g, f.mean())).l2_norm()
            <= f.sub(&SpectralField::constant(&g, f.mean())).l2_norm() * (1.0 + 1e-14));
    }

    #[test]
    fn heat_keeps_smooth_densities_positive(seed in any::<u64>(), s in 0.1f64..0.95, t in 1e-4f64..0.5) {
        let g = make_grid(1, 32).unwrap();
        let op = EvolutionOperator::new(s, 0.0).unwrap();
        let f = density(&g, seed);
        let out = heat_step(&f, t, &op).unwrap();
        prop_assert!(out.min() >= f.min().min(out.mean()) - 1e-12);
        prop_assert!(out.max() <= f.max() + 1e-12);
    }

    #[test]
    fn propagators_conserve_mass(seed in any::<u64>(), dt in 1e-4f64..0.1, etd in any::<bool>()) {
        let g = make_grid(2, 8).unwrap();
        let op = EvolutionOperator::new(0.5, 0.01).unwrap();
        let integrator = if etd { Integrator::Etd1 } else { Integrator::Imex };
        let prop = LinearPropagator::new(&g, &op, dt, integrator).unwrap();
        let f = density(&g, seed);
        prop_assert!((prop.step(&f, None).mean() - f.mean()).abs() < 1e-14);
    }
}
