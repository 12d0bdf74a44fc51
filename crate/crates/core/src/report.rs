//! Empirical-constant reports shared by every verifier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of a sampled inequality check.
///
/// `worst_ratio` is the largest observed LHS/RHS quotient with the unknown
/// constant stripped. The analytic constants are not known explicitly, so the
/// `ceiling` used for `pass` is an engineering choice and is recorded as such.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    pub samples: usize,
    pub worst_ratio: f64,
    pub fitted_exponent: Option<f64>,
    pub pass: bool,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub ceiling: Option<f64>,
    #[serde(default)]
    pub note: Option<String>,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            worst_ratio: 0.0,
            fitted_exponent: None,
            pass: false,
            seed: None,
            config: serde_json::Value::Object(Default::default()),
            constants: BTreeMap::new(),
            ceiling: None,
            note: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = config;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn constant(mut self, key: impl Into<String>, value: f64) -> Self {
        self.constants.insert(key.into(), value);
        self
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Least-squares slope of `ln y` against `ln x`. Points with non-positive
/// coordinates are skipped; `None` when fewer than two remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_slope(&pts)
}

pub(crate) fn linear_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// `count` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_ladder(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
}
