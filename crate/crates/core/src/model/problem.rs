use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::PeriodicGrid;
use crate::model::coupling::Coupling;
use crate::model::hamiltonian::Hamiltonian;
use crate::semigroup::EvolutionOperator;

/// Tolerance on the grid mean of `m₀`.
pub const MASS_TOL: f64 = 1e-8;

/// One Fourier term `a cos(2πk·x) + b sin(2πk·x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Closed-form grid data used for `c`, `m₀` and `u_T` in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `mean + amplitude cos(2πk·x)`
    Cosine {
        #[serde(default)]
        mean: f64,
        amplitude: f64,
        #[serde(default = "unit_mode")]
        k: Vec<i64>,
    },
    /// `Π_j exp(concentration cos 2π(x_j - center_j))`, rescaled to grid
    /// mean `mass`.
    VonMises {
        center: Vec<f64>,
        concentration: f64,
        #[serde(default = "one")]
        mass: f64,
    },
    Modes {
        #[serde(default)]
        mean: f64,
        terms: Vec<ModeTerm>,
    },
}

fn unit_mode() -> Vec<i64> {
    vec![1]
}

fn one() -> f64 {
    1.0
}

fn dot(k: &[i64], x: [f64; 2]) -> f64 {
    k.iter().zip(x).map(|(&k, x)| k as f64 * x).sum()
}

impl Profile {
    pub fn sample(&self, grid: &PeriodicGrid) -> Result<SpectralField> {
        let check_k = |k: &[i64]| -> Result<()> {
            if k.is_empty() || k.len() > grid.dim() {
                return Err(Error::invalid(format!(
                    "wavevector {k:?} has more components than the {}D grid",
                    grid.dim()
                )));
            }
            Ok(())
        };
        let f = match self {
            Profile::Constant { value } => SpectralField::constant(grid, *value),
            Profile::Cosine { mean, amplitude, k } => {
                check_k(k)?;
                SpectralField::from_fn(grid, |x| mean + amplitude * (2.0 * PI * dot(k, x)).cos())
            }
            Profile::VonMises { center, concentration, mass } => {
                if center.len() != grid.dim() {
                    return Err(Error::invalid(format!("von Mises center needs {} components", grid.dim())));
                }
                let raw = SpectralField::from_fn(grid, |x| {
                    center
                        .iter()
                        .enumerate()
                        .map(|(j, c)| (concentration * (2.0 * PI * (x[j] - c)).cos()).exp())
                        .product()
                });
                let scale = mass / raw.mean();
                raw.scaled(scale)
            }
            Profile::Modes { mean, terms } => {
                for t in terms {
                    check_k(&t.k)?;
                }
                SpectralField::from_fn(grid, |x| {
                    mean + terms
                        .iter()
                        .map(|t| {
                            let ph = 2.0 * PI * dot(&t.k, x);
                            t.cos * ph.cos() + t.sin * ph.sin()
                        })
                        .sum::<f64>()
                })
            }
        };
        if !f.is_finite() {
            return Err(Error::invalid(format!("profile {self:?} is not finite on the grid")));
        }
        Ok(f)
    }
}

/// Full problem datum for the fractional MFG system.
#[derive(Clone, Debug)]
pub struct MFGProblem {
    s: f64,
    sigma: f64,
    horizon: f64,
    ham: Hamiltonian,
    coupling: Coupling,
    m0: SpectralField,
    u_t: SpectralField,
}

impl MFGProblem {
    pub fn new(
        s: f64,
        sigma: f64,
        horizon: f64,
        ham: Hamiltonian,
        coupling: Coupling,
        m0: SpectralField,
        u_t: SpectralField,
    ) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Assumption {
                assumption: "s ∈ (0,1)".into(),
                detail: format!("s = {s}"),
            });
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be nonnegative, got {sigma}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(format!("horizon T must be positive, got {horizon}")));
        }
        let grid = m0.grid();
        grid.ensure_same(u_t.grid())?;
        grid.ensure_same(ham.c_field().grid())?;
        grid.ensure_same(coupling.grid())?;
        check_initial_density(&m0)?;
        if !u_t.is_finite() {
            return Err(Error::invalid("terminal datum u_T is not finite"));
        }
        Ok(Self {
            s,
            sigma,
            horizon,
            ham,
            coupling,
            m0,
            u_t,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.m0.grid()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.ham
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn m0(&self) -> &SpectralField {
        &self.m0
    }

    pub fn u_t(&self) -> &SpectralField {
        &self.u_t
    }

    pub fn operator(&self) -> EvolutionOperator {
        EvolutionOperator::new(self.s, self.sigma).expect("validated at construction")
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.s, sigma, self.horizon, self.ham.clone(), self.coupling.clone(), self.m0.clone(), self.u_t.clone())
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.s, self.sigma, horizon, self.ham.clone(), self.coupling.clone(), self.m0.clone(), self.u_t.clone())
    }

    pub fn with_coupling(&self, coupling: Coupling) -> Result<Self> {
        Self::new(self.s, self.sigma, self.horizon, self.ham.clone(), coupling, self.m0.clone(), self.u_t.clone())
    }

    pub fn with_hamiltonian(&self, ham: Hamiltonian) -> Result<Self> {
        Self::new(self.s, self.sigma, self.horizon, ham, self.coupling.clone(), self.m0.clone(), self.u_t.clone())
    }

    pub fn with_data(&self, m0: SpectralField, u_t: SpectralField) -> Result<Self> {
        Self::new(self.s, self.sigma, self.horizon, self.ham.clone(), self.coupling.clone(), m0, u_t)
    }
}

/// Assumption (I): `m₀ >= 0` at every node and grid mean one.
pub fn check_initial_density(m0: &SpectralField) -> Result<()> {
    if let Some((node, v)) = m0.values().iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::Assumption {
            assumption: "(I)".into(),
            detail: format!("m0 negative at node {node} (value {v})"),
        });
    }
    let mean = m0.mean();
    if (mean - 1.0).abs() > MASS_TOL {
        return Err(Error::Assumption {
            assumption: "(I)".into(),
            detail: format!("∫m₀(x)dx = 1 violated: grid mean is {mean}"),
        });
    }
    Ok(())
}
