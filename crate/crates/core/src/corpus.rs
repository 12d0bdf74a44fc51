//! Seeded random test fields: band-limited power-law fields and densities.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::field::SpectralField;
use crate::grid::PeriodicGrid;

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of the random corpus: modes with `|k| <= max_mode` carry
/// complex-Gaussian coefficients scaled by `(1 + |k|)^{-decay}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusSpec {
    pub max_mode: f64,
    pub decay: f64,
    pub zero_mean: bool,
}

impl CorpusSpec {
    /// Modes up to `n/4`, power-law decay `r`.
    pub fn quarter_band(grid: &PeriodicGrid, decay: f64) -> Self {
        Self {
            max_mode: grid.n() as f64 / 4.0,
            decay,
            zero_mean: false,
        }
    }
}

pub fn band_limited_field(grid: &PeriodicGrid, spec: &CorpusSpec, rng: &mut CorpusRng) -> SpectralField {
    let coeffs: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let k = grid.wavevector(i);
            let kn = grid.k_squared(k).sqrt();
            // draw unconditionally so the stream does not depend on the band
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if kn > spec.max_mode || grid.is_nyquist(k) || (spec.zero_mean && kn == 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(re, im) * (1.0 + kn).powf(-spec.decay)
            }
        })
        .collect();
    SpectralField::from_coeffs_unchecked(grid, coeffs)
}

pub fn band_limited_corpus(grid: &PeriodicGrid, spec: &CorpusSpec, count: usize, seed: u64) -> Vec<SpectralField> {
    let mut r = rng(seed);
    (0..count).map(|_| band_limited_field(grid, spec, &mut r)).collect()
}

/// Rough corpus for operator-norm sweeps: each field carries random
/// coefficients on one thin shell `k_j <= |k| < 1.25 k_j`, with the shells
/// `k_j` geometric between 1 and the largest non-Nyquist mode. Fields are
/// drawn round-robin over the shells, so any `count >= shells` covers every
/// frequency scale.
pub fn shell_corpus(grid: &PeriodicGrid, count: usize, seed: u64) -> Vec<SpectralField> {
    let kmax = (grid.n() / 2 - 1) as f64;
    let mut shells = Vec::new();
    let mut k = 1.0;
    while k <= kmax {
        shells.push(k);
        k *= 1.25;
    }
    let mut r = rng(seed);
    (0..count)
        .map(|j| {
            let lo = shells[j % shells.len()];
            let spec = CorpusSpec { max_mode: (1.25 * lo).min(kmax), decay: 0.0, zero_mean: true };
            let f = band_limited_field(grid, &spec, &mut r);
            let coeffs = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| if grid.k_squared(grid.wavevector(i)).sqrt() < lo { Complex64::new(0.0, 0.0) } else { *c })
                .collect();
            SpectralField::from_coeffs_unchecked(grid, coeffs)
        })
        .collect()
}

/// Smooth positive density with grid mean exactly one: `1 + a·g/‖g‖_∞` for a
/// zero-mean band-limited `g`, with `0 <= a < 1`.
pub fn random_density(grid: &PeriodicGrid, spec: &CorpusSpec, amplitude: f64, rng: &mut CorpusRng) -> SpectralField {
    let spec = CorpusSpec { zero_mean: true, ..*spec };
    let g = band_limited_field(grid, &spec, rng);
    let scale = g.max_abs();
    let mut coeffs = g.coeffs().to_vec();
    let a = if scale > 0.0 { amplitude / scale } else { 0.0 };
    for c in &mut coeffs {
        *c *= a;
    }
    coeffs[0] = Complex64::new(1.0, 0.0);
    SpectralField::from_coeffs_unchecked(grid, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn corpus_is_reproducible_and_band_limited() {
        let g = make_grid(1, 32).unwrap();
        let spec = CorpusSpec::quarter_band(&g, 1.0);
        let a = band_limited_corpus(&g, &spec, 3, 11);
        let b = band_limited_corpus(&g, &spec, 3, 11);
        assert_eq!(a, b);
        for f in &a {
            for (i, c) in f.coeffs().iter().enumerate() {
                if g.k_squared(g.wavevector(i)).sqrt() > 8.0 {
                    assert!(c.norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn densities_are_positive_with_unit_mass() {
        let g = make_grid(2, 16).unwrap();
        let spec = CorpusSpec::quarter_band(&g, 1.5);
        let mut r = rng(3);
        for _ in 0..5 {
            let m = random_density(&g, &spec, 0.8, &mut r);
            assert!(m.min() > 0.0);
            assert!((m.mean() - 1.0).abs() < 1e-13);
        }
    }
}
