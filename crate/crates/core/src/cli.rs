//! Command-line entry points. Every subcommand writes a manifest, a JSON
//! report and at least one CSV into the output directory.

use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::corpus::shell_corpus;
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64, Command, ExperimentManifest, LoadedConfig, Provenance, TrajectoryManifest};
use crate::mfg::{
    picard_short_time, solve_mfg_fixed_point, uniqueness_experiment, vanishing_viscosity_sweep, InitialGuess,
};
use crate::model::{verify_coupling_assumptions, verify_hamiltonian_assumptions, CouplingMode};
use crate::report::InequalityReport;
use crate::semigroup::{corpus_decay_profile, measure_continuity_rate, measure_decay_rate_corpus, resolvable_ladder};
use crate::spaces::{
    verify_chain_rule, verify_interpolation_inequality, verify_kato_ponce, verify_time_embedding_corpus, Composition,
    LeibnizExponents, VerifyOptions,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fmfg", version, about = "Fractional mean field game solver and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment config.
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(short, long, default_value = "fmfg-out")]
    out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Spaces,
    Hamiltonian,
    Coupling,
    Semigroup,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Damped fixed-point solve of the coupled system.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Vanishing-viscosity sweep over a descending σ ladder ending at 0.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        sigmas: Vec<f64>,
    },
    /// Short-time contraction of the undamped Duhamel iteration.
    Picard {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        horizons: Vec<f64>,
        /// Integrability exponent of the contraction norms.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Solves from several initial density trajectories and compares.
    Uniqueness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        inits: usize,
        /// Mixing weight of the random density in perturbed starts.
        #[arg(long, default_value_t = 0.5)]
        amplitude: f64,
    },
    /// Sampled inequality verifiers.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Smoothing-rate measurement of the fractional heat semigroup.
    Semigroup {
        #[command(flatten)]
        common: Common,
        /// ν γ p
        #[arg(long, num_args = 3, value_names = ["NU", "GAMMA", "P"], required = true)]
        decay: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code: 0 when every pass flag holds, 1 when one fails or a solver errors,
/// 2 on usage or config errors.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e @ (Error::Config { .. } | Error::InvalidArgument(_))) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

struct Run {
    cfg: LoadedConfig,
    prov: Provenance,
    out: PathBuf,
    command: Command,
}

impl Run {
    fn start(common: Common, command: Command) -> Result<Self> {
        // a config that cannot be read is a usage error, not a run failure
        let mut cfg = io::load_config(&common.config).map_err(|e| match e {
            Error::Io(io) => Error::Config { path: common.config.clone(), message: format!("cannot read: {io}") },
            e => e,
        })?;
        if let Some(seed) = common.seed {
            cfg.seed = seed;
        }
        fs::create_dir_all(&common.out)?;
        let prov = Provenance::new(cfg.seed, cfg.config_hash.clone());
        Ok(Self { cfg, prov, out: common.out, command })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn finish<T: Serialize>(&self, report: &T, pass: bool, summary: &str) -> Result<bool> {
        io::write_report(self.path("report.json"), &self.prov, report)?;
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let manifest = ExperimentManifest {
            command: self.command,
            config_path: self.cfg.path.clone(),
            output_dir: self.out.clone(),
            seed: self.cfg.seed,
            created_at,
            code_version: self.prov.code_version.clone(),
            config_hash: self.prov.config_hash.clone(),
            pass,
        };
        io::write_json(self.path("manifest.json"), &manifest)?;
        println!("{summary}");
        println!("{}: {}", if pass { "PASS" } else { "FAIL" }, self.out.display());
        Ok(pass)
    }
}

fn dispatch(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Solve { common } => solve(Run::start(common, Command::Solve)?),
        Cmd::Sweep { common, sigmas } => sweep(Run::start(common, Command::Sweep)?, &sigmas),
        Cmd::Picard { common, horizons, p } => picard(Run::start(common, Command::Picard)?, &horizons, p),
        Cmd::Uniqueness { common, inits, amplitude } => {
            uniqueness(Run::start(common, Command::Uniqueness)?, inits, amplitude)
        }
        Cmd::Verify { common, suite, samples } => verify(Run::start(common, Command::Verify)?, suite, samples),
        Cmd::Semigroup { common, decay, samples } => {
            semigroup(Run::start(common, Command::Semigroup)?, decay[0], decay[1], decay[2], samples)
        }
    }
}

fn coords_header(dim: usize) -> Vec<&'static str> {
    if dim == 1 {
        vec!["x"]
    } else {
        vec!["x1", "x2"]
    }
}

fn solve(run: Run) -> Result<bool> {
    let problem = &run.cfg.problem;
    let sol = solve_mfg_fixed_point(problem, &run.cfg.solver)?;
    let d = &sol.diagnostics;
    let s = problem.s();
    let sigma = problem.sigma();
    for (traj, kind) in [(&sol.u, "u"), (&sol.m, "m")] {
        let manifest = TrajectoryManifest {
            horizon: traj.horizon(),
            nt: traj.nt(),
            s,
            sigma,
            kind: kind.into(),
            provenance: Some(run.prov.clone()),
        };
        io::save_trajectory(traj, run.path(kind), &manifest)?;
    }

    let rows: Vec<Vec<String>> =
        d.gap_history.iter().enumerate().map(|(i, g)| vec![(i + 1).to_string(), fmt_f64(*g)]).collect();
    io::write_csv(run.path("convergence.csv"), &run.prov, &["iteration", "gap"], &rows)?;

    let rows: Vec<Vec<String>> = (0..=sol.m.nt())
        .map(|i| {
            let (u, m) = (sol.u.at(i), sol.m.at(i));
            vec![fmt_f64(sol.m.time(i)), fmt_f64(u.max_abs()), fmt_f64(m.min()), fmt_f64(m.max()), fmt_f64(m.mean())]
        })
        .collect();
    io::write_csv(run.path("timeseries.csv"), &run.prov, &["t", "u_sup", "m_min", "m_max", "m_mean"], &rows)?;

    let grid = problem.grid();
    let (u0, mt) = (sol.u.first(), sol.m.last());
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            let x = grid.coords(i);
            let mut row: Vec<String> = x[..grid.dim()].iter().map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(u0.values()[i]));
            row.push(fmt_f64(mt.values()[i]));
            row
        })
        .collect();
    let mut header = coords_header(grid.dim());
    header.extend(["u_t0", "m_tT"]);
    io::write_csv(run.path("snapshot.csv"), &run.prov, &header, &rows)?;

    let summary = format!(
        "solve: converged={} iterations={} gap={:.3e} hjb_residual={:.3e} fp_residual={:.3e}",
        d.converged, d.outer_iterations, d.final_fixed_point_gap, d.hjb_residual, d.fp_residual
    );
    run.finish(d, d.converged, &summary)
}

fn sweep(run: Run, sigmas: &[f64]) -> Result<bool> {
    let r = vanishing_viscosity_sweep(&run.cfg.problem, sigmas, &run.cfg.solver)?;
    let last = r.sigmas.len() - 1;
    let err = |v: &[f64], i: usize| if i < last { fmt_f64(v[i]) } else { fmt_f64(0.0) };
    let rows: Vec<Vec<String>> = (0..r.sigmas.len())
        .map(|i| {
            vec![
                fmt_f64(r.sigmas[i]),
                err(&r.sup_errors_u, i),
                err(&r.lp_errors_du, i),
                err(&r.weak_gaps_m, i),
                fmt_f64(r.semiconcavity[i]),
                fmt_f64(r.lipschitz[i]),
                fmt_f64(r.contraction_factors[i]),
                r.iterations[i].to_string(),
                r.converged[i].to_string(),
            ]
        })
        .collect();
    io::write_csv(
        run.path("sweep.csv"),
        &run.prov,
        &["sigma", "sup_error_u", "l2_error_du", "gap_m", "semiconcavity", "lipschitz", "contraction", "iterations", "converged"],
        &rows,
    )?;
    let summary = format!("sweep: {} rungs, m metric {}, sup errors {:?}", r.sigmas.len(), r.m_metric, r.sup_errors_u);
    run.finish(&r, r.pass, &summary)
}

fn picard(run: Run, horizons: &[f64], p: f64) -> Result<bool> {
    let r = picard_short_time(&run.cfg.problem, &run.cfg.solver, horizons, p)?;
    let rows: Vec<Vec<String>> = r
        .horizons
        .iter()
        .zip(&r.contraction_factors)
        .zip(&r.gaps)
        .map(|((t, l), g)| vec![fmt_f64(*t), fmt_f64(*l), fmt_f64(g[0]), fmt_f64(*g.last().unwrap_or(&0.0))])
        .collect();
    io::write_csv(run.path("picard.csv"), &run.prov, &["T", "L", "first_gap", "last_gap"], &rows)?;
    let summary = format!(
        "picard: L={:?} slope={:?} expected={:.4}",
        r.contraction_factors, r.fitted_slope, r.expected_slope
    );
    run.finish(&r, r.pass(), &summary)
}

fn uniqueness(run: Run, inits: usize, amplitude: f64) -> Result<bool> {
    if inits < 2 {
        return Err(Error::invalid("--inits must be at least 2"));
    }
    let mut guesses = vec![InitialGuess::Stationary];
    guesses.extend((1..inits as u64).map(|j| InitialGuess::Perturbed { seed: run.cfg.seed.wrapping_add(j), amplitude }));
    let r = uniqueness_experiment(&run.cfg.problem, &guesses, &run.cfg.solver)?;
    let mut rows = Vec::new();
    let mut k = 0;
    for a in 0..guesses.len() {
        for b in (a + 1)..guesses.len() {
            rows.push(vec![a.to_string(), b.to_string(), fmt_f64(r.pairwise_gaps[k])]);
            k += 1;
        }
    }
    io::write_csv(run.path("uniqueness.csv"), &run.prov, &["init_a", "init_b", "gap"], &rows)?;
    let pass = match r.pass {
        Some(p) => p,
        None => r.converged.iter().all(|c| *c),
    };
    let monotone = run.cfg.problem.coupling().mode() == CouplingMode::Monotone;
    let summary = format!("uniqueness: max gap {:.3e} (tol {:.1e}), monotone={monotone}", r.max_gap, r.tol);
    run.finish(&r, pass, &summary)
}

fn report_rows(reports: &[InequalityReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.samples.to_string(),
                fmt_f64(r.worst_ratio),
                r.fitted_exponent.map(fmt_f64).unwrap_or_default(),
                r.pass.to_string(),
            ]
        })
        .collect()
}

const REPORT_HEADER: [&str; 5] = ["name", "samples", "worst_ratio", "fitted_exponent", "pass"];

fn verify(run: Run, suite: Suite, samples: usize) -> Result<bool> {
    let problem = &run.cfg.problem;
    let grid = problem.grid();
    let s = problem.s();
    let seed = run.cfg.seed;
    let opts = VerifyOptions::default();
    let reports = match suite {
        Suite::Spaces => {
            let mut out = vec![verify_interpolation_inequality(grid, s, 2.0, seed, samples, &opts)?];
            let e = LeibnizExponents { p: 2.0, p1: 4.0, q1: 4.0, p2: 4.0, q2: 4.0 };
            out.push(verify_kato_ponce(grid, s, &e, seed.wrapping_add(1), samples, &opts)?);
            for (j, psi) in Composition::ALL.iter().enumerate() {
                out.push(verify_chain_rule(grid, s, 2.0, *psi, seed.wrapping_add(2 + j as u64), samples, &opts)?);
            }
            let beta = 0.75 * s;
            out.push(verify_time_embedding_corpus(grid, s, 2.0, beta, 0.1, seed.wrapping_add(10), samples, &opts)?);
            out
        }
        Suite::Hamiltonian => vec![verify_hamiltonian_assumptions(problem.hamiltonian(), seed, samples)?],
        Suite::Coupling => vec![verify_coupling_assumptions(problem.coupling(), seed, samples)?],
        Suite::Semigroup => {
            let op = problem.operator();
            let corpus = shell_corpus(grid, samples, seed);
            let mut out = Vec::new();
            for rate in [1.0, 0.5] {
                let times = resolvable_ladder(grid, &op, rate, 8)?;
                out.push(measure_decay_rate_corpus(&corpus, 0.0, rate * 2.0 * s, 2.0, &op, &times)?.with_seed(seed));
            }
            let smooth = crate::corpus::band_limited_corpus(
                grid,
                &crate::corpus::CorpusSpec::quarter_band(grid, 1.0),
                samples.min(20),
                seed,
            );
            // small-time window below the fastest rate in the band
            let lam = op.lambda([(grid.n() / 4) as i64, 0]);
            let times = crate::report::geometric_ladder(1e-4 / lam, 1e-1 / lam, 8);
            for theta in [0.5 * s, s] {
                let runs = smooth
                    .iter()
                    .map(|f| measure_continuity_rate(f, theta, 2.0, &op, &times))
                    .collect::<Result<Vec<_>>>()?;
                let mut r = runs
                    .iter()
                    .min_by(|a, b| a.fitted_exponent.partial_cmp(&b.fitted_exponent).unwrap())
                    .cloned()
                    .unwrap_or_else(|| InequalityReport::new("semigroup_continuity"));
                r.samples = runs.len();
                r.worst_ratio = runs.iter().map(|x| x.worst_ratio).fold(0.0, f64::max);
                r.pass = runs.iter().all(|x| x.pass);
                out.push(r.with_seed(seed));
            }
            out
        }
    };
    io::write_csv(run.path("verify.csv"), &run.prov, &REPORT_HEADER, &report_rows(&reports))?;
    let pass = reports.iter().all(|r| r.pass);
    let summary = reports
        .iter()
        .map(|r| format!("{:<22} worst={:<12.4e} pass={}", r.name, r.worst_ratio, r.pass))
        .collect::<Vec<_>>()
        .join("\n");
    run.finish(&reports, pass, &summary)
}

fn semigroup(run: Run, nu: f64, gamma: f64, p: f64, samples: usize) -> Result<bool> {
    let problem = &run.cfg.problem;
    let op = problem.operator();
    if !(gamma > 0.0) {
        return Err(Error::invalid("--decay needs γ > 0"));
    }
    let rate = gamma / (2.0 * problem.s());
    let times = resolvable_ladder(problem.grid(), &op, rate, 8)?;
    let corpus = shell_corpus(problem.grid(), samples, run.cfg.seed);
    let report = measure_decay_rate_corpus(&corpus, nu, gamma, p, &op, &times)?.with_seed(run.cfg.seed);
    let sups = corpus_decay_profile(&corpus, nu, gamma, p, &op, &times)?;
    let rows: Vec<Vec<String>> = times
        .iter()
        .zip(&sups)
        .map(|(t, v)| vec![fmt_f64(*t), fmt_f64(*v), fmt_f64(t.powf(-rate))])
        .collect();
    io::write_csv(run.path("decay.csv"), &run.prov, &["t", "sup_ratio", "reference_t_pow"], &rows)?;
    let summary = format!(
        "semigroup decay: fitted {:?}, expected {:.4}",
        report.fitted_exponent,
        -rate
    );
    let pass = report.pass;
    run.finish(&report, pass, &summary)
}
