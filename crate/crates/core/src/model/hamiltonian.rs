//! The Hamiltonian family `H(x,p) = c(x)((1+|p|²)^{γ/2} - 1)`.

use rand::Rng;
use serde_json::json;

use crate::corpus;
use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::report::InequalityReport;
use crate::spectral::gradient;

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    gamma: f64,
    c: SpectralField,
}

impl Hamiltonian {
    /// Requires `γ ∈ (1,2]` and `c >= 0` on the grid. `c ≡ 0` is accepted and
    /// gives `H ≡ 0`.
    pub fn new(gamma: f64, c: SpectralField) -> Result<Self> {
        if !(gamma > 1.0 && gamma <= 2.0) {
            return Err(Error::Assumption {
                assumption: "γ ∈ (1,2]".into(),
                detail: format!("gamma = {gamma}"),
            });
        }
        if !c.is_finite() || c.min() < 0.0 {
            return Err(Error::Assumption {
                assumption: "c(x) >= 0".into(),
                detail: format!("min c = {}", c.min()),
            });
        }
        Ok(Self { gamma, c })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c_field(&self) -> &SpectralField {
        &self.c
    }

    /// True when `c ≡ 0`, so `H` and all its derivatives vanish.
    pub fn is_zero(&self) -> bool {
        self.c.max_abs() == 0.0
    }

    fn check(&self, p: &VectorField) -> Result<()> {
        self.c.grid().ensure_same(p.grid())
    }

    pub fn value(&self, p: &VectorField) -> Result<SpectralField> {
        self.check(p)?;
        let g = self.gamma;
        let q = p.norm_squared();
        Ok(self.c.zip_map_unchecked(&q, |c, q2| c * ((1.0 + q2).powf(g / 2.0) - 1.0)))
    }

    /// `D_pH = c γ (1+|p|²)^{γ/2-1} p`.
    pub fn grad_p(&self, p: &VectorField) -> Result<VectorField> {
        self.check(p)?;
        let g = self.gamma;
        let q = p.norm_squared();
        let w = self.c.zip_map_unchecked(&q, |c, q2| c * g * (1.0 + q2).powf(g / 2.0 - 1.0));
        p.weighted(&w)
    }

    pub fn hess_pp(&self, p: &VectorField) -> Result<SymmetricMatrixField> {
        self.check(p)?;
        let dim = p.grid().dim();
        let len = p.grid().len();
        let mut entries = Vec::with_capacity(len);
        for i in 0..len {
            let pi = node_vector(p, i);
            entries.push(hess_at(self.c.values()[i], self.gamma, pi, dim));
        }
        Ok(SymmetricMatrixField { dim, entries })
    }
}

fn node_vector(p: &VectorField, i: usize) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (axis, comp) in p.components().iter().enumerate() {
        out[axis] = comp.values()[i];
    }
    out
}

fn norm2(p: [f64; 2]) -> f64 {
    p[0] * p[0] + p[1] * p[1]
}

/// Pointwise `H(x,p)` for a given `c(x)`.
pub fn h_at(c: f64, gamma: f64, p: [f64; 2]) -> f64 {
    c * ((1.0 + norm2(p)).powf(gamma / 2.0) - 1.0)
}

pub fn grad_at(c: f64, gamma: f64, p: [f64; 2]) -> [f64; 2] {
    let w = c * gamma * (1.0 + norm2(p)).powf(gamma / 2.0 - 1.0);
    [w * p[0], w * p[1]]
}

/// `D²_{pp}H = cγ q^{γ/2-1} [I + (γ-2) q⁻¹ p⊗p]`, packed as `(11, 12, 22)`.
pub fn hess_at(c: f64, gamma: f64, p: [f64; 2], dim: usize) -> [f64; 3] {
    let q = 1.0 + norm2(p);
    let w = c * gamma * q.powf(gamma / 2.0 - 1.0);
    let r = (gamma - 2.0) / q;
    if dim == 1 {
        [w * (1.0 + r * p[0] * p[0]), 0.0, 0.0]
    } else {
        [w * (1.0 + r * p[0] * p[0]), w * r * p[0] * p[1], w * (1.0 + r * p[1] * p[1])]
    }
}

/// Per-node symmetric matrices, packed `(a11, a12, a22)`; in 1D only `a11`
/// is meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrixField {
    pub dim: usize,
    pub entries: Vec<[f64; 3]>,
}

impl SymmetricMatrixField {
    /// Smallest eigenvalue at each node.
    pub fn min_eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().map(|m| min_eigenvalue(*m, self.dim)).collect()
    }
}

pub fn min_eigenvalue(m: [f64; 3], dim: usize) -> f64 {
    if dim == 1 {
        return m[0];
    }
    let tr = m[0] + m[2];
    let det = m[0] * m[2] - m[1] * m[1];
    let disc = ((tr * tr) / 4.0 - det).max(0.0).sqrt();
    tr / 2.0 - disc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianOrder {
    Value,
    GradP,
    HessPP,
}

#[derive(Clone, Debug)]
pub enum HamiltonianEval {
    Value(SpectralField),
    GradP(VectorField),
    HessPP(SymmetricMatrixField),
}

pub fn evaluate_hamiltonian(ham: &Hamiltonian, p: &VectorField, order: HamiltonianOrder) -> Result<HamiltonianEval> {
    Ok(match order {
        HamiltonianOrder::Value => HamiltonianEval::Value(ham.value(p)?),
        HamiltonianOrder::GradP => HamiltonianEval::GradP(ham.grad_p(p)?),
        HamiltonianOrder::HessPP => HamiltonianEval::HessPP(ham.hess_pp(p)?),
    })
}

/// Largest `|p|` sampled by [`verify_hamiltonian_assumptions`].
pub const MOMENTUM_CAP: f64 = 10.0;

/// Fits the growth constants of the structural assumptions on random
/// samples `(x, p, q, ξ)` with `|p|, |q| <= MOMENTUM_CAP`.
///
/// Each assumption has the form `A <= C·B + C̃` or `A >= C·B - c`. The
/// leading constant is fitted on the large-momentum samples
/// (`|p| >= MOMENTUM_CAP/2`) and the additive one is then the smallest value
/// making the inequality hold on every sample. The lower bound on the
/// Hessian is only fitted for `|p| >= 1`: for `γ < 2` the weight
/// `|p|^{γ-2}` blows up at the origin while this family stays smooth there.
pub fn verify_hamiltonian_assumptions(ham: &Hamiltonian, seed: u64, samples: usize) -> Result<InequalityReport> {
    let grid = ham.c.grid().clone();
    let dim = grid.dim();
    let gamma = ham.gamma;
    let dc = gradient(&ham.c);
    let d2c: Vec<VectorField> = dc.components().iter().map(gradient).collect();
    let mut r = corpus::rng(seed);

    let random_vec = |r: &mut corpus::CorpusRng, radius: f64| -> [f64; 2] {
        let mut v = [0.0; 2];
        for c in v.iter_mut().take(dim) {
            *c = r.random_range(-1.0..1.0);
        }
        let n = norm2(v).sqrt();
        if n == 0.0 {
            return [0.0; 2];
        }
        [v[0] * radius / n, v[1] * radius / n]
    };

    // (A, B) pairs per assumption
    let mut h1 = Vec::new();
    let mut h2 = Vec::new();
    let mut h3 = Vec::new();
    let mut h4 = Vec::new();
    let mut h5 = Vec::new();
    let mut min_eig = f64::INFINITY;
    let mut h_min = f64::INFINITY;

    for sample in 0..samples.max(1) {
        let node = r.random_range(0..grid.len());
        let c = ham.c.values()[node];
        let radius = if sample == 0 { 0.0 } else { r.random_range(0.0..MOMENTUM_CAP) };
        let p = random_vec(&mut r, radius);
        let q_radius = r.random_range(0.0..MOMENTUM_CAP);
        let q = random_vec(&mut r, q_radius);
        let xi = random_vec(&mut r, 1.0);
        let pn = norm2(p).sqrt();
        let qn = norm2(q).sqrt();

        let hp = h_at(c, gamma, p);
        h_min = h_min.min(hp);
        let gp = grad_at(c, gamma, p);
        h1.push((pn, gp[0] * p[0] + gp[1] * p[1] - hp, pn.powf(gamma)));

        let diff = norm2([p[0] - q[0], p[1] - q[1]]).sqrt();
        h2.push((pn.max(qn), hp - h_at(c, gamma, q), (pn.powf(gamma - 1.0) + qn.powf(gamma - 1.0)) * diff));

        // D²_xx H = D²c · (q^{γ/2} - 1), Frobenius norm
        let mut d2 = 0.0;
        for row in &d2c {
            for comp in row.components() {
                d2 += comp.values()[node].powi(2);
            }
        }
        let radial = (1.0 + pn * pn).powf(gamma / 2.0) - 1.0;
        h3.push((pn, d2.sqrt() * radial, pn.powf(gamma)));

        // D²_px H = Dc ⊗ γ q^{γ/2-1} p
        let dcn = dc.components().iter().map(|f| f.values()[node].powi(2)).sum::<f64>().sqrt();
        h4.push((pn, dcn * gamma * (1.0 + pn * pn).powf(gamma / 2.0 - 1.0) * pn, pn.powf(gamma - 1.0)));

        let hess = hess_at(c, gamma, p, dim);
        min_eig = min_eig.min(min_eigenvalue(hess, dim));
        let quad = if dim == 1 {
            hess[0] * xi[0] * xi[0]
        } else {
            hess[0] * xi[0] * xi[0] + 2.0 * hess[1] * xi[0] * xi[1] + hess[2] * xi[1] * xi[1]
        };
        if pn >= 1.0 {
            h5.push((pn, quad, pn.powf(gamma - 2.0) * norm2(xi)));
        }
    }

    let (c1, a1) = fit_lower(&h1);
    let (c2, _) = fit_upper(&h2, false);
    let (c3, a3) = fit_upper(&h3, true);
    let (c4, a4) = fit_upper(&h4, true);
    let (c5, a5) = fit_lower(&h5);

    let constants = [c1, a1, c2, c3, a3, c4, a4, c5, a5];
    let mut report = InequalityReport::new("hamiltonian_assumptions")
        .with_seed(seed)
        .with_config(json!({"gamma": gamma, "momentum_cap": MOMENTUM_CAP, "dim": dim}))
        .with_note("lower Hessian bound fitted on |p| >= 1 only")
        .constant("C_H(H1)", c1)
        .constant("c_H(H1)", a1)
        .constant("C_H(H2)", c2)
        .constant("C_H(H3)", c3)
        .constant("C~_H(H3)", a3)
        .constant("C_H(H4)", c4)
        .constant("C~_H(H4)", a4)
        .constant("C_H(H5)", c5)
        .constant("C~_H(H5)", a5)
        .constant("min_eig_D2pp", min_eig)
        .constant("min_H", h_min);
    report.samples = samples;
    report.worst_ratio = c2.max(c3).max(c4);
    report.pass = constants.iter().all(|v| v.is_finite()) && c1 > 0.0 && c5 > 0.0 && min_eig >= -1e-10 && h_min >= 0.0;
    Ok(report)
}

/// `A >= C·B - c`: `C` is the smallest ratio on large samples, `c` the
/// smallest nonnegative offset making every sample hold.
fn fit_lower(pts: &[(f64, f64, f64)]) -> (f64, f64) {
    let c = pts
        .iter()
        .filter(|(pn, _, b)| *pn >= MOMENTUM_CAP / 2.0 && *b > 0.0)
        .map(|(_, a, b)| a / b)
        .fold(f64::INFINITY, f64::min);
    let c = if c.is_finite() { c } else { 0.0 };
    let off = pts.iter().map(|(_, a, b)| c * b - a).fold(0.0, f64::max);
    (c, off)
}

/// `A <= C·B + C̃`. With `additive = false` the constant is the plain
/// supremum of `A/B` over all samples with `B > 0`.
fn fit_upper(pts: &[(f64, f64, f64)], additive: bool) -> (f64, f64) {
    if !additive {
        let mut c: f64 = 0.0;
        for (_, a, b) in pts {
            if *b > 0.0 {
                c = c.max(a / b);
            } else if *a > 0.0 {
                c = f64::INFINITY;
            }
        }
        return (c, 0.0);
    }
    let c = pts
        .iter()
        .filter(|(pn, _, b)| *pn >= MOMENTUM_CAP / 2.0 && *b > 0.0)
        .map(|(_, a, b)| a / b)
        .fold(0.0, f64::max);
    let off = pts.iter().map(|(_, a, b)| a - c * b).fold(0.0, f64::max);
    (c, off)
}
