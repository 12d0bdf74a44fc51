//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails. Tolerances are the constants below.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::Instant;

use fmfg_core::corpus::{band_limited_corpus, rng, random_density, shell_corpus, CorpusSpec};
use fmfg_core::hjb::{duality_residual, solve_adjoint};
use fmfg_core::mfg::{
    coupling_trajectory, picard_short_time, solve_mfg_fixed_point, uniqueness_experiment, vanishing_viscosity_sweep,
    InitialGuess, SolutionPair, SolverConfig,
};
use fmfg_core::model::{Coupling, CouplingMode, Hamiltonian, MFGProblem};
use fmfg_core::report::geometric_ladder;
use fmfg_core::semigroup::{heat_step, measure_continuity_rate, measure_decay_rate_corpus, resolvable_ladder};
use fmfg_core::spaces::{
    verify_chain_rule, verify_interpolation_inequality, verify_kato_ponce, verify_time_embedding_corpus, Composition,
    LeibnizExponents, VerifyOptions,
};
use fmfg_core::spectral::fractional_laplacian;
use fmfg_core::{apply_multiplier, make_grid, EvolutionOperator, FourierSymbol, SpectralField};

const EIGEN_TOL: f64 = 1e-12;
/// Off-mode error relative to `λ_max‖f‖_∞`: roundoff in the input FFT
/// amplified by the largest symbol.
const LEAKAGE_TOL: f64 = 1e-14;
const IBP_TOL: f64 = 1e-10;
const ISOMETRY_TOL: f64 = 1e-10;
const SEMIGROUP_LAW_TOL: f64 = 1e-10;
const DECAY_REL_TOL: f64 = 0.1;
const CONTINUITY_SLACK: f64 = 0.1;
const MIN_ORDER: f64 = 0.9;
const PLATEAU_TOL: f64 = 0.05;
const MASS_TOL: f64 = 1e-12;
const ENERGY_TOL: f64 = 1e-3;
const ENERGY_HALVING: f64 = 1.7;
const DUALITY_NONLINEAR_TOL: f64 = 1e-3;
const DUALITY_LINEAR_TOL: f64 = 1e-8;
const COMPARISON_TOL: f64 = 1e-6;
const SEMICONCAVITY_RATIO: f64 = 1.5;
const FIXED_POINT_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-3;
const MAX_OUTER: usize = 60;
const SIGMA_LADDER: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 0.0];
const PICARD_HORIZONS: [f64; 4] = [0.05, 0.1, 0.2, 0.4];
const VERIFY_SAMPLES: usize = 200;
const VERIFY_SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).max_abs() / b.max_abs().max(1e-300)
}

fn spectral_exactness() -> Outcome {
    let mut eigen: f64 = 0.0;
    let mut leakage: f64 = 0.0;
    let mut grid_raw: f64 = 0.0;
    let mut ibp: f64 = 0.0;
    let mut iso: f64 = 0.0;
    for (dim, n) in [(1, 64), (1, 256), (2, 32), (2, 64)] {
        let g = make_grid(dim, n).unwrap();
        for s in [0.1, 0.3, 0.5, 0.75, 0.95] {
            for k in [[1i64, 0], [5, 0], [3, 4], [0, 9]] {
                if dim == 1 && k[1] != 0 {
                    continue;
                }
                let f = SpectralField::from_fn(&g, |x| (2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1])).sin());
                let lam = (2.0 * PI * ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt()).powf(2.0 * s);
                let out = fractional_laplacian(&f, s).unwrap();
                // the mode itself, through its Fourier coefficient
                let i = (0..g.len()).find(|&i| g.wavevector(i) == k).unwrap();
                let c = out.coeffs()[i];
                eigen = eigen.max((c - f.coeffs()[i] * lam).norm() / (lam * f.coeffs()[i].norm()));
                // roundoff in the other modes, against the largest symbol on the grid
                let lam_max = (2.0 * PI * (n as f64 / 2.0) * (dim as f64).sqrt()).powf(2.0 * s);
                grid_raw = grid_raw.max(max_rel(&out, &f.scaled(lam)));
                leakage = leakage.max(out.sub(&f.scaled(lam)).max_abs() / (lam_max * f.max_abs()));
            }
        }
        let corpus = band_limited_corpus(&g, &CorpusSpec::quarter_band(&g, 0.5), 20, 11);
        for pair in corpus.chunks(2) {
            let (f, h) = (&pair[0], &pair[1]);
            for s in [0.2, 0.5, 0.8] {
                let lhs = fractional_laplacian(f, s).unwrap().inner(h);
                let rhs = fractional_laplacian(f, s / 2.0).unwrap().inner(&fractional_laplacian(h, s / 2.0).unwrap());
                ibp = ibp.max((lhs - rhs).abs() / (f.l2_norm() * h.l2_norm()));
            }
            for mu in [0.5, 1.5, 2.0] {
                let up = apply_multiplier(f, &FourierSymbol::bessel(mu)).unwrap();
                let back = apply_multiplier(&up, &FourierSymbol::bessel(-mu)).unwrap();
                iso = iso.max(max_rel(&back, f));
                // the unit-modulus multiplier e^{iθ(k)} with odd θ is an L² isometry
                let phase = FourierSymbol::new("phase", |k| {
                    num_complex::Complex64::from_polar(1.0, (k[0] as f64 * 0.7 + k[1] as f64 * 0.3).atan())
                });
                let rotated = apply_multiplier(f, &phase).unwrap();
                iso = iso.max((rotated.l2_norm() - f.l2_norm()).abs() / f.l2_norm());
            }
        }
    }
    outcome(
        eigen < EIGEN_TOL && leakage < LEAKAGE_TOL && ibp < IBP_TOL && iso < ISOMETRY_TOL,
        format!(
            "eigen {eigen:.1e} (grid sup {grid_raw:.1e}, leakage {leakage:.1e}) ibp {ibp:.1e} isometry {iso:.1e}"
        ),
    )
}

fn semigroup_laws() -> Outcome {
    let mut law: f64 = 0.0;
    let g = make_grid(1, 64).unwrap();
    for (seed, s, sigma) in [(1, 0.3, 0.0), (2, 0.75, 0.0), (3, 0.5, 0.01)] {
        let op = EvolutionOperator::new(s, sigma).unwrap();
        let f = random_density(&g, &CorpusSpec::quarter_band(&g, 1.0), 0.8, &mut rng(seed));
        let (t1, t2) = (0.007, 0.019);
        let a = heat_step(&f, t1, &op).unwrap();
        law = law.max((a.l2_norm() - f.l2_norm()).max(0.0));
        law = law.max((a.max() - f.max()).max(0.0)).max((f.min() - a.min()).max(0.0));
        law = law.max((a.mean() - f.mean()).abs());
        let composed = heat_step(&a, t2, &op).unwrap();
        law = law.max(max_rel(&composed, &heat_step(&f, t1 + t2, &op).unwrap()));
        let lhs = fractional_laplacian(&a, s).unwrap();
        let rhs = heat_step(&fractional_laplacian(&f, s).unwrap(), t1, &op).unwrap();
        law = law.max(max_rel(&lhs, &rhs));
    }

    let fine = make_grid(1, 256).unwrap();
    let corpus = shell_corpus(&fine, VERIFY_SAMPLES, VERIFY_SEED);
    let mut slopes = Vec::new();
    let mut decay_ok = true;
    for (s, rate) in [(0.3, 1.0), (0.5, 1.0), (0.75, 1.0), (0.75, 0.5)] {
        let op = EvolutionOperator::new(s, 0.0).unwrap();
        let times = resolvable_ladder(&fine, &op, rate, 8).unwrap();
        let rep = measure_decay_rate_corpus(&corpus, 0.0, rate * 2.0 * s, 2.0, &op, &times).unwrap();
        let slope = rep.fitted_exponent.unwrap_or(f64::NAN);
        decay_ok &= (slope + rate).abs() <= DECAY_REL_TOL * rate;
        slopes.push(format!("{slope:.3}/{:.2}", -rate));
    }

    let op = EvolutionOperator::new(0.75, 0.0).unwrap();
    let smooth = band_limited_corpus(&g, &CorpusSpec::quarter_band(&g, 1.0), 20, VERIFY_SEED);
    let lam = op.lambda([16, 0]);
    let times = geometric_ladder(1e-4 / lam, 1e-1 / lam, 8);
    let mut worst_margin = f64::INFINITY;
    for theta in [0.375, 0.75] {
        for f in &smooth {
            let rep = measure_continuity_rate(f, theta, 2.0, &op, &times).unwrap();
            let e = rep.fitted_exponent.unwrap_or(f64::NAN);
            worst_margin = worst_margin.min(e - (theta / 0.75 - CONTINUITY_SLACK));
        }
    }
    outcome(
        law < SEMIGROUP_LAW_TOL && decay_ok && worst_margin >= 0.0,
        format!("laws {law:.1e} decay slopes [{}] continuity margin {worst_margin:.3}", slopes.join(", ")),
    )
}

fn manufactured() -> Outcome {
    let hjb: Vec<f64> = [100, 200].iter().map(|&nt| common::manufactured_hjb(64, nt).l2_error).collect();
    let fp: Vec<f64> = [100, 200].iter().map(|&nt| common::manufactured_fp(64, nt).l2_error).collect();
    let (ho, fo) = (common::orders(&hjb)[0], common::orders(&fp)[0]);
    let hjb_plateau = common::manufactured_hjb(32, 200).l2_error / common::manufactured_hjb(128, 200).l2_error - 1.0;
    let fp_plateau = common::manufactured_fp(32, 200).l2_error / common::manufactured_fp(128, 200).l2_error - 1.0;
    outcome(
        ho >= MIN_ORDER && fo >= MIN_ORDER && hjb_plateau.abs() < PLATEAU_TOL && fp_plateau.abs() < PLATEAU_TOL,
        format!("order hjb {ho:.3} fp {fo:.3}; n 32->128 drift hjb {hjb_plateau:.1e} fp {fp_plateau:.1e}"),
    )
}

fn mass_error(sol: &SolutionPair) -> f64 {
    sol.m.fields().iter().map(|f| (f.mean() - 1.0).abs()).fold(0.0, f64::max)
}

fn conservation_and_energy(bench: &SolutionPair, problem: &MFGProblem, config: &SolverConfig) -> Outcome {
    let coarse = solve_mfg_fixed_point(problem, &SolverConfig { nt: config.nt / 2, ..*config }).unwrap();
    let mass = mass_error(bench)
        .max(mass_error(&coarse))
        .max(common::manufactured_fp(64, 200).mass_error);
    let (e_fine, e_coarse) = (bench.diagnostics.fp.energy_residual, coarse.diagnostics.fp.energy_residual);
    let ratio = e_coarse / e_fine;
    outcome(
        mass < MASS_TOL && e_fine < ENERGY_TOL && ratio >= ENERGY_HALVING,
        format!("mass {mass:.1e} energy {e_fine:.2e} (Nt/2: {e_coarse:.2e}, ratio {ratio:.2})"),
    )
}

fn duality(bench: &SolutionPair, problem: &MFGProblem, config: &SolverConfig) -> Outcome {
    let g = problem.grid().clone();
    let v = coupling_trajectory(problem, &bench.m).unwrap();
    let nt = config.nt;
    let mut nonlinear: f64 = 0.0;
    for (rho_tau, tau) in [(problem.m0().clone(), 0), (SpectralField::constant(&g, 1.0), nt / 2)] {
        let rho = solve_adjoint(&rho_tau, &bench.u, problem, tau, config).unwrap();
        nonlinear = nonlinear.max(duality_residual(&bench.u, &rho, &v, problem, tau).unwrap());
    }
    let linear_problem = problem
        .with_hamiltonian(Hamiltonian::new(problem.hamiltonian().gamma(), SpectralField::zeros(&g)).unwrap())
        .unwrap()
        .with_coupling(Coupling::gaussian(&g, 4.0, 0.0, CouplingMode::Monotone).unwrap())
        .unwrap();
    let lin = solve_mfg_fixed_point(&linear_problem, config).unwrap();
    let v0 = coupling_trajectory(&linear_problem, &lin.m).unwrap();
    let mut linear: f64 = 0.0;
    for tau in [0, nt / 4, nt / 2] {
        let rho = solve_adjoint(linear_problem.m0(), &lin.u, &linear_problem, tau, config).unwrap();
        linear = linear.max(duality_residual(&lin.u, &rho, &v0, &linear_problem, tau).unwrap());
    }
    outcome(
        nonlinear < DUALITY_NONLINEAR_TOL && linear < DUALITY_LINEAR_TOL,
        format!("nonlinear {nonlinear:.2e} linear {linear:.2e}"),
    )
}

fn comparison(solutions: &[(&str, &SolutionPair)]) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut names = Vec::new();
    for (name, sol) in solutions {
        let slack = sol.diagnostics.hjb.sup_norm_bound_slack;
        let rhs = slack + sol.u.sup_norm();
        worst = worst.min(slack / rhs);
        names.push(*name);
    }
    let manufactured = common::manufactured_hjb(64, 200);
    worst = worst.min(manufactured.comparison_slack / manufactured.comparison_rhs);
    outcome(
        worst >= -COMPARISON_TOL,
        format!("min slack/RHS {worst:.3e} over {} + manufactured", names.join(", ")),
    )
}

fn fixed_point(bench: &SolutionPair) -> Outcome {
    let d = &bench.diagnostics;
    outcome(
        d.converged
            && d.final_fixed_point_gap < FIXED_POINT_TOL
            && d.hjb_residual < RESIDUAL_TOL
            && d.fp_residual < RESIDUAL_TOL
            && d.outer_iterations <= MAX_OUTER,
        format!(
            "{} iterations, gap {:.2e}, residuals hjb {:.2e} fp {:.2e}",
            d.outer_iterations, d.final_fixed_point_gap, d.hjb_residual, d.fp_residual
        ),
    )
}

fn run_cli_twice(dir: &std::path::Path) -> (bool, usize) {
    let text = fs::read_to_string(common::config_path("bench.toml")).unwrap().replace("Nt = 1000", "Nt = 200");
    let cfg = dir.join("bench.toml");
    fs::write(&cfg, text).unwrap();
    let mut snaps = Vec::new();
    for run in ["a", "b"] {
        let out = dir.join(run);
        for args in [
            vec!["solve"],
            vec!["verify", "--suite", "spaces", "--samples", "40"],
            vec!["sweep", "--sigmas", "0.1,0.01,0"],
        ] {
            let sub = out.join(args[0]);
            let status = Command::new(env!("CARGO_BIN_EXE_fmfg"))
                .args(&args[..1])
                .arg(&cfg)
                .arg("-o")
                .arg(&sub)
                .args(&args[1..])
                .output()
                .unwrap();
            assert!(status.status.code().is_some());
        }
        let mut files = Vec::new();
        let mut stack = vec![out.clone()];
        while let Some(d) = stack.pop() {
            for entry in fs::read_dir(&d).unwrap() {
                let p = entry.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                    continue;
                }
                let rel = p.strip_prefix(&out).unwrap().display().to_string();
                let mut bytes = fs::read(&p).unwrap();
                if rel.split('/').count() == 2 && rel.ends_with("/manifest.json") {
                    let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                    let obj = v.as_object_mut().unwrap();
                    obj.remove("created_at");
                    obj.remove("output_dir");
                    bytes = serde_json::to_vec(&v).unwrap();
                }
                files.push((rel, bytes));
            }
        }
        files.sort();
        snaps.push(files);
    }
    (snaps[0] == snaps[1], snaps[0].len())
}

fn main() {
    let started = Instant::now();
    let cfg = common::bench();
    let problem = cfg.problem.clone();
    let config = cfg.solver;
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    results.push(("1 spectral exactness", spectral_exactness()));
    results.push(("2 semigroup laws and rates", semigroup_laws()));
    results.push(("3 manufactured solutions", manufactured()));

    let bench = solve_mfg_fixed_point(&problem, &config).unwrap();
    results.push(("4 conservation and energy", conservation_and_energy(&bench, &problem, &config)));
    results.push(("5 duality identity", duality(&bench, &problem, &config)));

    let sweep = vanishing_viscosity_sweep(&problem, &SIGMA_LADDER, &config).unwrap();
    let low_s = MFGProblem::new(
        0.3,
        0.0,
        problem.horizon(),
        problem.hamiltonian().clone(),
        problem.coupling().clone(),
        problem.m0().clone(),
        problem.u_t().clone(),
    )
    .unwrap();
    let sweep_low = vanishing_viscosity_sweep(&low_s, &SIGMA_LADDER, &config).unwrap();
    let sigma_point_one = solve_mfg_fixed_point(&problem.with_sigma(0.1).unwrap(), &config).unwrap();
    results.push((
        "6 comparison bound",
        comparison(&[("benchmark", &bench), ("sigma=0.1", &sigma_point_one)]),
    ));

    let semi = &sweep.semiconcavity;
    let ratio = semi[semi.len() - 1] / semi[0];
    results.push((
        "7 sigma-uniform semiconcavity",
        outcome(
            ratio <= SEMICONCAVITY_RATIO,
            format!("sigma=0 {:.4} / sigma=0.1 {:.4} = {ratio:.3}", semi[semi.len() - 1], semi[0]),
        ),
    ));
    results.push(("8 fixed-point convergence", fixed_point(&bench)));

    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" ");
    results.push((
        "9 vanishing viscosity",
        outcome(
            sweep.pass && sweep_low.pass,
            format!(
                "s=0.75 sup u [{}] L2 Du [{}]; s=0.3 sup u [{}] L2 Du [{}] ({} m gaps)",
                fmt(&sweep.sup_errors_u),
                fmt(&sweep.lp_errors_du),
                fmt(&sweep_low.sup_errors_u),
                fmt(&sweep_low.lp_errors_du),
                sweep_low.m_metric
            ),
        ),
    ));

    let mut inits = vec![InitialGuess::Stationary];
    inits.extend((0..3).map(|seed| InitialGuess::Perturbed { seed, amplitude: 0.5 }));
    let uniq = uniqueness_experiment(&problem, &inits, &config).unwrap();
    results.push((
        "10 monotone uniqueness",
        outcome(
            uniq.pass == Some(true),
            format!("max pairwise gap {:.2e} (limit {:.0e}), iterations {:?}", uniq.max_gap, 10.0 * config.tol, uniq.iterations),
        ),
    ));

    let picard = picard_short_time(&problem, &config, &PICARD_HORIZONS, 2.0).unwrap();
    results.push((
        "11 short-time contraction",
        outcome(
            picard.pass(),
            format!(
                "L(T) [{}] slope {:.3} (expected {:.3})",
                picard.contraction_factors.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" "),
                picard.fitted_slope.unwrap_or(f64::NAN),
                picard.expected_slope
            ),
        ),
    ));

    let opts = VerifyOptions::default();
    let mut suite_ok = true;
    let mut worst = Vec::new();
    for n in [64, 128] {
        let g = make_grid(1, n).unwrap();
        let s = problem.s();
        let mut reps = vec![verify_interpolation_inequality(&g, s, 2.0, VERIFY_SEED, VERIFY_SAMPLES, &opts).unwrap()];
        let e = LeibnizExponents { p: 2.0, p1: 4.0, q1: 4.0, p2: 4.0, q2: 4.0 };
        reps.push(verify_kato_ponce(&g, s, &e, VERIFY_SEED + 1, VERIFY_SAMPLES, &opts).unwrap());
        for (j, psi) in Composition::ALL.iter().enumerate() {
            reps.push(verify_chain_rule(&g, s, 2.0, *psi, VERIFY_SEED + 2 + j as u64, VERIFY_SAMPLES, &opts).unwrap());
        }
        reps.push(
            verify_time_embedding_corpus(&g, s, 2.0, 0.75 * s, 0.1, VERIFY_SEED + 10, VERIFY_SAMPLES, &opts).unwrap(),
        );
        suite_ok &= reps.iter().all(|r| r.pass && r.worst_ratio.is_finite());
        let top = reps.iter().map(|r| r.worst_ratio).fold(0.0, f64::max);
        worst.push(format!("n={n}: {} reports, worst ratio {top:.3}", reps.len()));
    }
    results.push(("12 function-space verifiers", outcome(suite_ok, worst.join("; "))));

    let dir = tempfile::tempdir().unwrap();
    let (same, files) = run_cli_twice(dir.path());
    results.push((
        "13 determinism",
        outcome(same, format!("{files} output files compared across two runs")),
    ));

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed in {:.0?}", results.len() - failed, results.len(), started.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
