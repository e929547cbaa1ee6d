//! Empirical constants for inequalities whose implied constants are not known.
//!
//! Defaults come from sweeps run with this crate; a JSON file (passed on the
//! command line or through `CHARMOMENTS_CALIBRATION`) overrides any subset.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CALIBRATION_ENV: &str = "CHARMOMENTS_CALIBRATION";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Calibration {
    /// Largest accepted ratio LHS / RHS in the even-moment lemma.
    pub evenmoment_c_max: f64,
    /// Accepted window for (rough count) / ((B - A) / log y).
    pub sieve_ratio_min: f64,
    pub sieve_ratio_max: f64,
    /// Constant `c` in `R^{1/(k-1)} <= (1 + c e^{-J}) U`.
    pub domination_c: f64,
    /// Additive slack on the prime cosine-sum bounds.
    pub cosine_slack: f64,
    /// Constant in `|g(t + alpha) - g(t)| <= c * scale`.
    pub lipschitz_c: f64,
    /// Multiplier on the Euler-product error bracket.
    pub euler_bracket_factor: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            evenmoment_c_max: 4.0,
            sieve_ratio_min: 0.1,
            sieve_ratio_max: 10.0,
            domination_c: 8.0,
            cosine_slack: 3.0,
            lipschitz_c: 4.0,
            euler_bracket_factor: 10.0,
        }
    }
}

impl Calibration {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("bad calibration file {}: {e}", path.display())))
    }

    /// Explicit path first, then the environment variable, then defaults.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::from_path(p);
        }
        match std::env::var_os(CALIBRATION_ENV) {
            Some(p) if !p.is_empty() => Self::from_path(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}
