//! Monge-Kantorovich distance between grid densities.
//!
//! Only the difference `m₁ - m₂` enters (`W₁` with a metric cost is the
//! Kantorovich-Rubinstein norm of the difference), so slightly negative
//! iterates are accepted. In 1D the value is exact; in 2D it is an entropic
//! approximation and is used only as a diagnostic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::SpectralField;

/// Allowed difference between the grid means of the two inputs.
pub const MASS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinkhornOptions {
    /// Final entropic regularization.
    pub eps_floor: f64,
    /// Geometric factor between annealing stages.
    pub eps_decay: f64,
    pub max_iter_per_stage: usize,
    /// Stop a stage when the row marginal error drops below this.
    pub tol: f64,
}

impl Default for SinkhornOptions {
    fn default() -> Self {
        Self {
            eps_floor: 1e-3,
            eps_decay: 0.5,
            max_iter_per_stage: 300,
            tol: 1e-10,
        }
    }
}

pub fn wasserstein1(m1: &SpectralField, m2: &SpectralField) -> Result<f64> {
    wasserstein1_with(m1, m2, &SinkhornOptions::default())
}

pub fn wasserstein1_with(m1: &SpectralField, m2: &SpectralField, opts: &SinkhornOptions) -> Result<f64> {
    m1.grid().ensure_same(m2.grid())?;
    let (a, b) = (m1.mean(), m2.mean());
    if (a - b).abs() > MASS_TOL {
        return Err(Error::invalid(format!("mass mismatch: grid means {a} and {b}")));
    }
    let diff: Vec<f64> = m1.values().iter().zip(m2.values()).map(|(x, y)| x - y).collect();
    if m1.grid().dim() == 1 {
        Ok(periodic_w1_1d(&diff, m1.grid().h()))
    } else {
        Ok(sinkhorn_w1(m1, &diff, opts))
    }
}

/// `min_c Σ_j |F_j - c| h` with `F` the cumulative sum of the signed
/// density difference; the minimizer is a median of `F`.
pub fn periodic_w1_1d(diff: &[f64], h: f64) -> f64 {
    let mut cum = Vec::with_capacity(diff.len());
    let mut acc = 0.0;
    for d in diff {
        acc += d * h;
        cum.push(acc);
    }
    let mut sorted = cum.clone();
    sorted.sort_by(f64::total_cmp);
    let c = sorted[sorted.len() / 2];
    cum.iter().map(|f| (f - c).abs()).sum::<f64>() * h
}

fn sinkhorn_w1(m: &SpectralField, diff: &[f64], opts: &SinkhornOptions) -> f64 {
    let grid = m.grid();
    let w = 1.0 / grid.len() as f64;
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (i, &d) in diff.iter().enumerate() {
        if d > 0.0 {
            src.push((i, d * w));
        } else if d < 0.0 {
            dst.push((i, -d * w));
        }
    }
    let mass_a: f64 = src.iter().map(|x| x.1).sum();
    let mass_b: f64 = dst.iter().map(|x| x.1).sum();
    let mass = 0.5 * (mass_a + mass_b);
    if mass <= 0.0 || src.is_empty() || dst.is_empty() {
        return 0.0;
    }
    let log_a: Vec<f64> = src.iter().map(|x| (x.1 / mass_a).ln()).collect();
    let log_b: Vec<f64> = dst.iter().map(|x| (x.1 / mass_b).ln()).collect();
    let cost: Vec<Vec<f64>> = src
        .par_iter()
        .map(|&(i, _)| {
            let xi = grid.coords(i);
            dst.iter().map(|&(j, _)| grid.torus_distance(xi, grid.coords(j))).collect()
        })
        .collect();

    let mut f = vec![0.0; src.len()];
    let mut g = vec![0.0; dst.len()];
    let mut eps = cost.iter().flatten().copied().fold(0.0, f64::max).max(opts.eps_floor);
    loop {
        for _ in 0..opts.max_iter_per_stage {
            f = (0..src.len())
                .into_par_iter()
                .map(|i| -eps * log_sum_exp(dst.len(), |j| (g[j] - cost[i][j]) / eps + log_b[j]))
                .collect();
            g = (0..dst.len())
                .into_par_iter()
                .map(|j| -eps * log_sum_exp(src.len(), |i| (f[i] - cost[i][j]) / eps + log_a[i]))
                .collect();
            let err: f64 = (0..src.len())
                .map(|i| {
                    let row: f64 = (0..dst.len())
                        .map(|j| ((f[i] + g[j] - cost[i][j]) / eps + log_a[i] + log_b[j]).exp())
                        .sum();
                    (row - log_a[i].exp()).abs()
                })
                .sum();
            if err < opts.tol {
                break;
            }
        }
        if eps <= opts.eps_floor {
            break;
        }
        eps = (eps * opts.eps_decay).max(opts.eps_floor);
    }
    let transport: f64 = (0..src.len())
        .into_par_iter()
        .map(|i| {
            (0..dst.len())
                .map(|j| ((f[i] + g[j] - cost[i][j]) / eps + log_a[i] + log_b[j]).exp() * cost[i][j])
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    mass * transport
}

fn log_sum_exp(len: usize, term: impl Fn(usize) -> f64) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for k in 0..len {
        max = max.max(term(k));
    }
    if !max.is_finite() {
        return max;
    }
    let s: f64 = (0..len).map(|k| (term(k) - max).exp()).sum();
    max + s.ln()
}
