//! Real periodic fields with cached Fourier coefficients, vector fields and
//! Fourier multipliers.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// A real-valued periodic function sampled on a [`PeriodicGrid`].
///
/// The Fourier coefficients are computed lazily on first use and normalized
/// so that `coeffs()[0]` is the grid mean. Once built, a field never changes.
#[derive(Clone)]
pub struct SpectralField {
    grid: PeriodicGrid,
    values: Vec<f64>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl SpectralField {
    pub fn from_values(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "expected {} samples for {grid}, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self::from_values_unchecked(grid, values))
    }

    pub(crate) fn from_values_unchecked(grid: &PeriodicGrid, values: Vec<f64>) -> Self {
        Self {
            grid: grid.clone(),
            values,
            coeffs: OnceLock::new(),
        }
    }

    /// Samples `f` at every node. The closure receives `[x1, x2]`; `x2` is
    /// zero in one dimension.
    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self::from_values_unchecked(grid, values)
    }

    pub fn constant(grid: &PeriodicGrid, c: f64) -> Self {
        Self::from_values_unchecked(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Builds a field from coefficients (FFT order). The coefficients are
    /// first projected onto the Hermitian-symmetric subspace so the result
    /// is real.
    pub fn from_coeffs(grid: &PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients for {grid}, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self::from_coeffs_unchecked(grid, coeffs))
    }

    pub(crate) fn from_coeffs_unchecked(grid: &PeriodicGrid, coeffs: Vec<Complex64>) -> Self {
        let sym = hermitian_part(grid, &coeffs);
        let values = grid.inverse(sym.clone());
        let cache = OnceLock::new();
        let _ = cache.set(sym);
        Self {
            grid: grid.clone(),
            values,
            coeffs: cache,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| self.grid.forward(&self.values))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `(mean |f|^p)^{1/p}` by the rectangle rule.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p == 2.0 {
            return self.l2_norm();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (s / self.values.len() as f64).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Grid mean of the pointwise product, i.e. the L² pairing on the torus.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        s / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpectralField {
        Self::from_values_unchecked(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &SpectralField, f: impl Fn(f64, f64) -> f64) -> Result<SpectralField> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.zip_map_unchecked(other, f))
    }

    pub(crate) fn zip_map_unchecked(&self, other: &SpectralField, f: impl Fn(f64, f64) -> f64) -> SpectralField {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_values_unchecked(&self.grid, values)
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        self.map(|v| a * v)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> SpectralField {
        self.zip_map_unchecked(other, |x, y| x + a * y)
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        self.zip_map_unchecked(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.zip_map_unchecked(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &SpectralField) -> SpectralField {
        self.zip_map_unchecked(other, |x, y| x * y)
    }
}

impl fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("mean", &self.mean())
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

/// Projection `c(k) -> (c(k) + conj c(-k)) / 2`.
pub(crate) fn hermitian_part(grid: &PeriodicGrid, coeffs: &[Complex64]) -> Vec<Complex64> {
    (0..coeffs.len())
        .map(|i| {
            let j = grid.mirror_index(i);
            (coeffs[i] + coeffs[j].conj()) * 0.5
        })
        .collect()
}

/// `d` scalar components on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    components: Vec<SpectralField>,
}

impl VectorField {
    pub fn new(components: Vec<SpectralField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::invalid("vector field needs at least one component"))?;
        if components.len() != first.grid().dim() {
            return Err(Error::invalid(format!(
                "vector field on a {}D grid needs {} components, got {}",
                first.grid().dim(),
                first.grid().dim(),
                components.len()
            )));
        }
        for c in &components[1..] {
            first.grid().ensure_same(c.grid())?;
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self {
            components: (0..grid.dim()).map(|_| SpectralField::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &SpectralField {
        &self.components[axis]
    }

    /// Pointwise squared magnitude `|v(x)|²`.
    pub fn norm_squared(&self) -> SpectralField {
        let grid = self.grid();
        let values = (0..grid.len())
            .map(|i| self.components.iter().map(|c| c.values()[i].powi(2)).sum())
            .collect();
        SpectralField::from_values_unchecked(grid, values)
    }

    pub fn magnitude(&self) -> SpectralField {
        self.norm_squared().map(f64::sqrt)
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &VectorField) -> Result<SpectralField> {
        self.grid().ensure_same(other.grid())?;
        let grid = self.grid();
        let values = (0..grid.len())
            .map(|i| {
                self.components
                    .iter()
                    .zip(&other.components)
                    .map(|(a, b)| a.values()[i] * b.values()[i])
                    .sum()
            })
            .collect();
        Ok(SpectralField::from_values_unchecked(grid, values))
    }

    /// Multiplies every component by the scalar field `w`.
    pub fn weighted(&self, w: &SpectralField) -> Result<VectorField> {
        self.grid().ensure_same(w.grid())?;
        Ok(VectorField {
            components: self.components.iter().map(|c| c.mul(w)).collect(),
        })
    }

    pub fn scaled(&self, a: f64) -> VectorField {
        VectorField {
            components: self.components.iter().map(|c| c.scaled(a)).collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// Sup over nodes of the pointwise magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().max_abs()
    }

    pub fn map_components(&self, f: impl Fn(&SpectralField) -> SpectralField) -> VectorField {
        VectorField {
            components: self.components.iter().map(f).collect(),
        }
    }
}

type SymbolFn = dyn Fn([i64; 2]) -> Complex64 + Send + Sync;

/// A Fourier multiplier `k -> λ(k)`.
///
/// Multipliers built for differentiation or fractional powers drop the
/// unpaired Nyquist mode so their output stays real and symmetric.
#[derive(Clone)]
pub struct FourierSymbol {
    label: String,
    eval: Arc<SymbolFn>,
    drop_nyquist: bool,
}

impl FourierSymbol {
    pub fn new(label: impl Into<String>, eval: impl Fn([i64; 2]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            drop_nyquist: false,
        }
    }

    pub fn real(label: impl Into<String>, eval: impl Fn([i64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(label, move |k| Complex64::new(eval(k), 0.0))
    }

    pub fn dropping_nyquist(mut self) -> Self {
        self.drop_nyquist = true;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn drops_nyquist(&self) -> bool {
        self.drop_nyquist
    }

    pub fn eval(&self, k: [i64; 2]) -> Complex64 {
        (self.eval)(k)
    }

    /// The identity multiplier.
    pub fn identity() -> Self {
        Self::real("identity", |_| 1.0)
    }

    /// Bessel potential `(1 + 4π²|k|²)^{μ/2}`.
    pub fn bessel(mu: f64) -> Self {
        Self::real(format!("bessel(mu={mu})"), move |k| {
            let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
            (1.0 + 4.0 * std::f64::consts::PI.powi(2) * k2).powf(mu / 2.0)
        })
    }

    /// Fractional Laplacian `(2π|k|)^{2s}`; zero at `k = 0`.
    pub fn fractional_laplacian(s: f64) -> Self {
        Self::real(format!("frac_laplacian(s={s})"), move |k| fractional_symbol(k, s)).dropping_nyquist()
    }

    /// `-Δ`, i.e. `(2π|k|)²`.
    pub fn neg_laplacian() -> Self {
        Self::real("neg_laplacian", |k| {
            let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
            4.0 * std::f64::consts::PI.powi(2) * k2
        })
        .dropping_nyquist()
    }

    /// `∂/∂x_axis`, i.e. `2πi k_axis`.
    pub fn derivative(axis: usize) -> Self {
        Self::new(format!("d/dx{}", axis + 1), move |k| {
            Complex64::new(0.0, 2.0 * std::f64::consts::PI * k[axis] as f64)
        })
        .dropping_nyquist()
    }
}

impl fmt::Debug for FourierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierSymbol")
            .field("label", &self.label)
            .field("drop_nyquist", &self.drop_nyquist)
            .finish()
    }
}

pub(crate) fn fractional_symbol(k: [i64; 2], s: f64) -> f64 {
    let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
    if k2 == 0.0 {
        0.0
    } else {
        (4.0 * std::f64::consts::PI.powi(2) * k2).powf(s)
    }
}

/// Multiplies every Fourier coefficient of `f` by `sym`.
///
/// When the symbol is exactly one at every represented mode the input is
/// returned unchanged, bit for bit.
pub fn apply_multiplier(f: &SpectralField, sym: &FourierSymbol) -> Result<SpectralField> {
    let grid = f.grid();
    let mut lambdas = Vec::with_capacity(grid.len());
    let mut identity = true;
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        let mut lam = sym.eval(k);
        if !lam.re.is_finite() || !lam.im.is_finite() {
            return Err(Error::NonFiniteSymbol {
                label: sym.label().to_string(),
                k: k[..grid.dim()].to_vec(),
            });
        }
        if sym.drops_nyquist() && grid.is_nyquist(k) {
            lam = Complex64::new(0.0, 0.0);
        }
        identity &= lam == Complex64::new(1.0, 0.0);
        lambdas.push(lam);
    }
    if identity {
        return Ok(f.clone());
    }
    let coeffs = f.coeffs().iter().zip(&lambdas).map(|(c, l)| c * l).collect();
    Ok(SpectralField::from_coeffs_unchecked(grid, coeffs))
}
