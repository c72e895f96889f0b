use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TesterError;

/// Which accuracy parameter the fitting branch hands to the split search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitEpsilon {
    /// `eps / c2`
    Plain,
    /// `eps / (c2 * k^5)`
    KScaled,
}

/// Every tunable constant of the search.
///
/// Defaults are set empirically: `p = 1`, a small main-loop multiplier and
/// single-start suffix sampling keep runs that end in `Fail` affordable
/// while dense inputs are still found with high probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmConstants {
    /// Main-loop iteration multiplier.
    pub c1: f64,
    /// Iteration multiplier of the split search.
    pub split_c1: f64,
    /// Divisor of the accuracy handed to the split search.
    pub c2: f64,
    pub split_epsilon: SplitEpsilon,
    /// Coefficients `a_0, a_1, ...` of `P(x) = sum a_i x^i`; `p = max(1, P(k log2(1/eps)))`.
    pub p_coeffs: Vec<f64>,
    /// Sample-Suffix: points per scale are `ceil(suffix_scale_multiplier / alpha_hat)`.
    pub suffix_scale_multiplier: f64,
    /// Sample-Suffix: starts per density guess are
    /// `ceil(suffix_rep_multiplier * (alpha_hat / eps) * ln(3 / delta))`.
    pub suffix_rep_multiplier: f64,
    /// Views with at most this many positions are read in full and solved exactly.
    pub exact_scan_below: usize,
    /// Nested calls read their view in full whenever that is no more
    /// expensive than their worst-case query bound.
    pub scan_when_cheaper: bool,
}

impl Default for AlgorithmConstants {
    fn default() -> Self {
        AlgorithmConstants {
            c1: 0.001,
            split_c1: 1.0,
            c2: 6.0,
            split_epsilon: SplitEpsilon::KScaled,
            p_coeffs: vec![1.0],
            suffix_scale_multiplier: 4.0,
            suffix_rep_multiplier: 1.0,
            exact_scan_below: 16,
            scan_when_cheaper: true,
        }
    }
}

fn ceil_count(x: f64) -> u64 {
    if x.is_nan() || x <= 1.0 {
        1
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil() as u64
    }
}

impl AlgorithmConstants {
    /// Loads constants from a `.toml` or `.json` file; missing fields keep defaults.
    pub fn load(path: &Path) -> Result<Self, TesterError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TesterError::Config(format!("{}: {e}", path.display())))?;
        let consts: AlgorithmConstants = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| TesterError::Config(e.to_string()))?,
            Some("json") => {
                serde_json::from_str(&text).map_err(|e| TesterError::Config(e.to_string()))?
            }
            _ => {
                return Err(TesterError::Config(format!(
                    "{}: expected a .toml or .json file",
                    path.display()
                )))
            }
        };
        consts.validate()?;
        Ok(consts)
    }

    pub fn validate(&self) -> Result<(), TesterError> {
        let positive = [
            ("c1", self.c1),
            ("split_c1", self.split_c1),
            ("c2", self.c2),
            ("suffix_scale_multiplier", self.suffix_scale_multiplier),
            ("suffix_rep_multiplier", self.suffix_rep_multiplier),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TesterError::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.p_coeffs.is_empty() || self.p_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(TesterError::Config("p_coeffs must be a non-empty list of finite numbers".into()));
        }
        Ok(())
    }

    /// `p = max(1, P(k log2(1/eps)))`.
    pub fn p(&self, k: usize, eps: f64) -> f64 {
        let x = k as f64 * (1.0 / eps).log2();
        let val = self.p_coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        val.max(1.0)
    }

    /// Spacing factor `4p / eps` of the overshoot intervals.
    pub fn spacing(&self, k: usize, eps: f64) -> f64 {
        4.0 * self.p(k, eps) / eps
    }

    pub fn main_iterations(&self, k: usize, eps: f64, delta: f64) -> u64 {
        let k5 = (k as f64).powi(5);
        ceil_count(self.c1 * (1.0 / delta).log2() * self.p(k, eps) * k5 / (eps * eps))
    }

    pub fn split_iterations(&self, k: usize, eps: f64, delta: f64, xi: f64) -> u64 {
        ceil_count(self.split_c1 * k as f64 / (eps * xi * xi) * (1.0 / delta).log2())
    }

    pub fn split_eps(&self, k: usize, eps: f64) -> f64 {
        match self.split_epsilon {
            SplitEpsilon::Plain => eps / self.c2,
            SplitEpsilon::KScaled => eps / (self.c2 * (k as f64).powi(5)),
        }
    }

    /// Number of density guesses `alpha_hat = 2^-j`, `j = 0..=ceil(log2(1/eps)) + 2`.
    pub fn suffix_guesses(&self, eps: f64) -> u32 {
        (1.0 / eps).log2().ceil().max(0.0) as u32 + 3
    }

    pub fn suffix_starts(&self, eps: f64, delta: f64, alpha_hat: f64) -> u64 {
        ceil_count(self.suffix_rep_multiplier * (alpha_hat / eps) * (3.0 / delta).ln())
    }

    pub fn suffix_points_per_scale(&self, alpha_hat: f64) -> u64 {
        ceil_count(self.suffix_scale_multiplier / alpha_hat)
    }
}
