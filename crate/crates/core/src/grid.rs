//! Uniform periodic grids on the unit torus and the FFT plans attached to them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform discretization of the unit torus in one or two dimensions.
///
/// Nodes sit at `x_j = j * h` with `h = 1 / n`. Multi-dimensional arrays are
/// stored row-major with the first coordinate varying slowest. Cloning is
/// cheap: the FFT plans are shared.
#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl PeriodicGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n must be even, got {n}")));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n must be at least 8, got {n}")));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner { dim, n, forward, inverse }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.inner.n as f64
    }

    /// Total number of nodes, `n^d`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(self.inner.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-axis integer indices of a flat node index.
    pub fn multi_index(&self, flat: usize) -> [usize; 2] {
        let n = self.n();
        match self.dim() {
            1 => [flat, 0],
            _ => [flat / n, flat % n],
        }
    }

    pub fn flat_index(&self, idx: [usize; 2]) -> usize {
        match self.dim() {
            1 => idx[0],
            _ => idx[0] * self.n() + idx[1],
        }
    }

    /// Coordinates of node `flat` in `[0,1)^d`. Unused components are zero.
    pub fn coords(&self, flat: usize) -> [f64; 2] {
        let h = self.h();
        let [i, j] = self.multi_index(flat);
        [i as f64 * h, j as f64 * h]
    }

    /// Signed wavevector stored at position `flat` of a coefficient array.
    /// Components lie in `{-n/2, ..., n/2 - 1}`.
    pub fn wavevector(&self, flat: usize) -> [i64; 2] {
        let [i, j] = self.multi_index(flat);
        let k0 = self.signed_mode(i);
        let k1 = if self.dim() == 2 { self.signed_mode(j) } else { 0 };
        [k0, k1]
    }

    fn signed_mode(&self, j: usize) -> i64 {
        let n = self.n() as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Flat position of the wavevector `-k` (indices taken mod n).
    pub fn mirror_index(&self, flat: usize) -> usize {
        let n = self.n();
        let [i, j] = self.multi_index(flat);
        let mi = (n - i) % n;
        match self.dim() {
            1 => mi,
            _ => mi * n + (n - j) % n,
        }
    }

    /// True when some component of `k` is the unpaired Nyquist mode `-n/2`.
    pub fn is_nyquist(&self, k: [i64; 2]) -> bool {
        let half = (self.n() / 2) as i64;
        k[..self.dim()].iter().any(|&c| c == -half)
    }

    /// Squared Euclidean length of the wavevector, restricted to the active axes.
    pub fn k_squared(&self, k: [i64; 2]) -> f64 {
        k[..self.dim()].iter().map(|&c| (c * c) as f64).sum()
    }

    /// Forward DFT normalized so that coefficient zero is the grid mean.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.len());
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Inverse of [`forward`](Self::forward); returns the real part.
    pub fn inverse(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.len());
        self.transform(&mut coeffs, false);
        coeffs.into_iter().map(|c| c.re).collect()
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let plan = if forward { &self.inner.forward } else { &self.inner.inverse };
        plan.process(buf);
        if self.dim() == 2 {
            let n = self.n();
            transpose_square(buf, n);
            plan.process(buf);
            transpose_square(buf, n);
        }
    }

    pub(crate) fn same_as(&self, other: &PeriodicGrid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || (self.dim() == other.dim() && self.n() == other.n())
    }

    pub(crate) fn ensure_same(&self, other: &PeriodicGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }

    /// Geodesic distance on the unit torus.
    pub fn torus_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let mut sq = 0.0;
        for axis in 0..self.dim() {
            let mut d = (a[axis] - b[axis]).abs() % 1.0;
            if d > 0.5 {
                d = 1.0 - d;
            }
            sq += d * d;
        }
        sq.sqrt()
    }
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for PeriodicGrid {}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("dim", &self.dim())
            .field("n", &self.n())
            .finish()
    }
}

impl fmt::Display for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D grid n={}", self.dim(), self.n())
    }
}

/// Builds a grid, validating `d ∈ {1,2}` and `n` even with `n ≥ 8`.
pub fn make_grid(dim: usize, n: usize) -> Result<PeriodicGrid> {
    PeriodicGrid::new(dim, n)
}
