//! Nonlocal regularizing couplings built from a band-limited Gaussian kernel.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::{self, random_density, CorpusSpec};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::PeriodicGrid;
use crate::model::wasserstein::wasserstein1;
use crate::report::InequalityReport;
use crate::spaces::hessian_frobenius;
use crate::spectral::gradient;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    /// `F[m] = k⋆(k⋆m)`
    #[default]
    Monotone,
    /// `F[m] = k⋆m`
    Generic,
    /// `F[m] = -k⋆(k⋆m)`
    Anti,
}

impl std::str::FromStr for CouplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotone" => Ok(Self::Monotone),
            "generic" => Ok(Self::Generic),
            "anti" => Ok(Self::Anti),
            other => Err(Error::invalid(format!("unknown coupling mode `{other}`"))),
        }
    }
}

/// Mean deviation above which [`coupling_apply`] logs a warning.
pub const MASS_WARN_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Coupling {
    grid: PeriodicGrid,
    mode: CouplingMode,
    kappa: f64,
    amplitude: f64,
    kernel_hat: Vec<f64>,
    /// Combined multiplier applied to `m̂`, amplitude included.
    effective_hat: Vec<f64>,
    c_f: f64,
}

impl Coupling {
    /// Kernel `k̂(k) = exp(-|k|²/κ²)` for `|k| <= n/4`, zero above; the
    /// coupling is scaled by `amplitude` (zero gives `F ≡ 0`).
    pub fn gaussian(grid: &PeriodicGrid, kappa: f64, amplitude: f64, mode: CouplingMode) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!("kernel width kappa must be positive, got {kappa}")));
        }
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::invalid(format!("kernel amplitude must be nonnegative, got {amplitude}")));
        }
        let band = grid.n() as f64 / 4.0;
        let kernel_hat: Vec<f64> = (0..grid.len())
            .map(|i| {
                let k2 = grid.k_squared(grid.wavevector(i));
                if k2.sqrt() <= band {
                    (-k2 / (kappa * kappa)).exp()
                } else {
                    0.0
                }
            })
            .collect();
        let effective_hat: Vec<f64> = kernel_hat
            .iter()
            .map(|&k| match mode {
                CouplingMode::Monotone => amplitude * k * k,
                CouplingMode::Generic => amplitude * k,
                CouplingMode::Anti => -amplitude * k * k,
            })
            .collect();
        let effective = SpectralField::from_coeffs_unchecked(
            grid,
            effective_hat.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        );
        Ok(Self {
            grid: grid.clone(),
            mode,
            kappa,
            amplitude,
            kernel_hat,
            effective_hat,
            c_f: effective.max_abs(),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn mode(&self) -> CouplingMode {
        self.mode
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `k̂` in FFT order.
    pub fn kernel_hat(&self) -> &[f64] {
        &self.kernel_hat
    }

    pub fn kernel(&self) -> SpectralField {
        SpectralField::from_coeffs_unchecked(
            &self.grid,
            self.kernel_hat.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// `max |K|` of the effective convolution kernel `K`; `‖F[m]‖_∞ <= c_f ‖m‖₁`.
    pub fn c_f(&self) -> f64 {
        self.c_f
    }

    pub fn with_mode(&self, mode: CouplingMode) -> Result<Self> {
        Self::gaussian(&self.grid, self.kappa, self.amplitude, mode)
    }
}

/// `F[m]` as a mode-wise product.
pub fn coupling_apply(coupling: &Coupling, m: &SpectralField) -> Result<SpectralField> {
    coupling.grid.ensure_same(m.grid())?;
    let mean = m.mean();
    if (mean - 1.0).abs() > MASS_WARN_TOL {
        log::warn!("coupling applied to a field with mean {mean}");
    }
    let coeffs = m
        .coeffs()
        .iter()
        .zip(&coupling.effective_hat)
        .map(|(c, k)| c * k)
        .collect();
    let out = SpectralField::from_coeffs_unchecked(&coupling.grid, coeffs);
    let bound = coupling.c_f * m.lp_norm(1.0);
    if out.max_abs() > bound * (1.0 + 1e-9) + 1e-14 {
        log::warn!("coupling output {} exceeds the kernel bound {bound}", out.max_abs());
    }
    Ok(out)
}

/// `∫(F[m₁] - F[m₂])(m₁ - m₂)` as a grid mean.
pub fn monotonicity_integral(coupling: &Coupling, m1: &SpectralField, m2: &SpectralField) -> Result<f64> {
    let dm = m1.zip_map(m2, |a, b| a - b)?;
    let df = coupling_apply(coupling, m1)?.sub(&coupling_apply(coupling, m2)?);
    Ok(df.inner(&dm))
}

/// Sup of value, gradient magnitude and Hessian Frobenius norm: a `C²`
/// stand-in for the `C^{2+α}` norm.
pub fn c2_surrogate_norm(f: &SpectralField) -> f64 {
    f.max_abs() + gradient(f).max_magnitude() + hessian_frobenius(f).max_abs()
}

/// Lipschitz check of `F` from densities (under `𝐝₁`) to the `C²`
/// surrogate, over random density pairs and small translations.
pub fn verify_coupling_assumptions(coupling: &Coupling, seed: u64, samples: usize) -> Result<InequalityReport> {
    let grid = coupling.grid.clone();
    let spec = CorpusSpec::quarter_band(&grid, 1.0);
    let mut r = corpus::rng(seed);
    let mut pairs = Vec::with_capacity(samples);
    for i in 0..samples {
        let m1 = random_density(&grid, &spec, 0.8, &mut r);
        let m2 = if i % 4 == 3 {
            // one-node translate
            let n = grid.n();
            let values = (0..grid.len())
                .map(|f| {
                    let [a, b] = grid.multi_index(f);
                    m1.values()[grid.flat_index([(a + n - 1) % n, b])]
                })
                .collect();
            SpectralField::from_values_unchecked(&grid, values)
        } else {
            random_density(&grid, &spec, 0.8, &mut r)
        };
        pairs.push((m1, m2));
    }
    let ratios = pairs
        .par_iter()
        .map(|(m1, m2)| -> Result<Option<f64>> {
            let d1 = wasserstein1(m1, m2)?;
            if d1 == 0.0 {
                return Ok(None);
            }
            let df = coupling_apply(coupling, m1)?.sub(&coupling_apply(coupling, m2)?);
            Ok(Some(c2_surrogate_norm(&df) / d1))
        })
        .collect::<Result<Vec<_>>>()?;
    let used: Vec<f64> = ratios.into_iter().flatten().collect();
    let worst = used.iter().copied().fold(0.0, f64::max);
    let mut report = InequalityReport::new("coupling_lipschitz")
        .with_seed(seed)
        .with_config(json!({
            "kappa": coupling.kappa,
            "amplitude": coupling.amplitude,
            "mode": coupling.mode,
            "dim": grid.dim(),
            "n": grid.n(),
        }))
        .with_note("C^2 surrogate (sup of value, gradient, Hessian) stands in for C^{2+alpha}")
        .constant("C_F", worst)
        .constant("c_f_sup_bound", coupling.c_f);
    report.samples = used.len();
    report.worst_ratio = worst;
    report.pass = worst.is_finite();
    Ok(report)
}
