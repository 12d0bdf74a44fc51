//! Spectral differential operators on the torus.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{apply_multiplier, FourierSymbol, SpectralField, VectorField};

/// `(-Δ)^s f` with symbol `(2π|k|)^{2s}`, for `0 < s < 1`.
pub fn fractional_laplacian(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("fractional order must lie in (0,1), got {s}")));
    }
    apply_multiplier(f, &FourierSymbol::fractional_laplacian(s))
}

/// `(-Δ)^s f` for any `s > 0`. Used internally for half powers and for the
/// `s → 1` comparison with the ordinary Laplacian.
pub(crate) fn fractional_power(f: &SpectralField, s: f64) -> SpectralField {
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
                c * crate::field::fractional_symbol(k, s)
            }
        })
        .collect();
    SpectralField::from_coeffs_unchecked(grid, coeffs)
}

/// Spectral Laplacian `Δf`, symbol `-(2π|k|)²`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    fractional_power(f, 1.0).scaled(-1.0)
}

pub fn gradient(f: &SpectralField) -> VectorField {
    let grid = f.grid();
    let components = (0..grid.dim())
        .map(|axis| {
            let coeffs = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let k = grid.wavevector(i);
                    if grid.is_nyquist(k) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c * Complex64::new(0.0, 2.0 * std::f64::consts::PI * k[axis] as f64)
                    }
                })
                .collect();
            SpectralField::from_coeffs_unchecked(grid, coeffs)
        })
        .collect();
    VectorField::new(components).expect("gradient components share the grid")
}

/// `div v`; the zero mode of the result is exactly zero.
pub fn divergence(v: &VectorField) -> Result<SpectralField> {
    let grid = v.grid();
    for c in v.components() {
        grid.ensure_same(c.grid())?;
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (axis, comp) in v.components().iter().enumerate() {
        for (i, c) in comp.coeffs().iter().enumerate() {
            let k = grid.wavevector(i);
            if !grid.is_nyquist(k) && k[axis] != 0 {
                acc[i] += c * Complex64::new(0.0, 2.0 * std::f64::consts::PI * k[axis] as f64);
            }
        }
    }
    acc[0] = Complex64::new(0.0, 0.0);
    Ok(SpectralField::from_coeffs_unchecked(grid, acc))
}

/// Two-thirds rule: zero every coefficient with some `|k_j| > n/3`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let cutoff = grid.n() as f64 / 3.0;
    let mut touched = false;
    let coeffs: Vec<Complex64> = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = grid.wavevector(i);
            if k[..grid.dim()].iter().any(|&kj| (kj.abs() as f64) > cutoff) {
                if *c != Complex64::new(0.0, 0.0) {
                    touched = true;
                }
                Complex64::new(0.0, 0.0)
            } else {
                *c
            }
        })
        .collect();
    if !touched {
        return f.clone();
    }
    SpectralField::from_coeffs_unchecked(grid, coeffs)
}

/// Largest centered second difference along each direction.
///
/// Directions are the axes in 1D and the axes plus both diagonals in 2D.
/// The returned value per direction is
/// `max_x (f(x+hξ) - 2f(x) + f(x-hξ)) / (h²|ξ|²)`, an upper bound monitor
/// for `ξ·D²f ξ / |ξ|²`.
pub fn second_difference_hessian_bound(f: &SpectralField) -> Vec<f64> {
    let grid = f.grid();
    let n = grid.n() as i64;
    let h = grid.h();
    let dirs: &[[i64; 2]] = if grid.dim() == 1 {
        &[[1, 0]]
    } else {
        &[[1, 0], [0, 1], [1, 1], [1, -1]]
    };
    let vals = f.values();
    dirs.iter()
        .map(|dir| {
            let len2 = (dir[0] * dir[0] + dir[1] * dir[1]) as f64;
            let shift = |flat: usize, sign: i64| -> usize {
                let [i, j] = grid.multi_index(flat);
                let ii = (i as i64 + sign * dir[0]).rem_euclid(n) as usize;
                let jj = (j as i64 + sign * dir[1]).rem_euclid(n) as usize;
                grid.flat_index([ii, jj])
            };
            (0..grid.len())
                .map(|x| (vals[shift(x, 1)] - 2.0 * vals[x] + vals[shift(x, -1)]) / (h * h * len2))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}
