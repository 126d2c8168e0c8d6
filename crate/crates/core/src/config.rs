use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{
    fibonacci_sphere_rotated, DirectionSet, DEFAULT_DIRECTIONS, DEFAULT_KNN, DEFAULT_THRESHOLDS, MIN_DIRECTIONS,
};
use crate::surfaces::{DEFAULT_N_PHI, DEFAULT_N_THETA, MIN_N_PHI, MIN_N_THETA};

pub const DEFAULT_SEED: u64 = 20260;

/// Oracle and mesh settings shared by every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub directions: usize,
    pub knn: usize,
    pub thresholds: Vec<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
    pub seed: u64,
    /// Azimuth shift of the Fibonacci spiral.
    pub azimuth_offset: f64,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            directions: DEFAULT_DIRECTIONS,
            knn: DEFAULT_KNN,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            n_theta: DEFAULT_N_THETA,
            n_phi: DEFAULT_N_PHI,
            seed: DEFAULT_SEED,
            azimuth_offset: 0.0,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.directions < MIN_DIRECTIONS {
            return Err(Error::Domain { what: "directions", value: self.directions as f64 });
        }
        if self.knn == 0 || self.knn >= self.directions {
            return Err(Error::Domain { what: "knn", value: self.knn as f64 });
        }
        if self.n_theta < MIN_N_THETA {
            return Err(Error::Domain { what: "n_theta", value: self.n_theta as f64 });
        }
        if self.n_phi < MIN_N_PHI {
            return Err(Error::Domain { what: "n_phi", value: self.n_phi as f64 });
        }
        if self.thresholds.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for &t in &self.thresholds {
            if !(t > 0.0 && t <= 0.5) {
                return Err(Error::Domain { what: "threshold_fraction", value: t });
            }
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("thresholds must be strictly ascending".into()));
        }
        if !self.azimuth_offset.is_finite() {
            return Err(Error::Domain { what: "azimuth_offset", value: self.azimuth_offset });
        }
        Ok(())
    }

    pub fn direction_set(&self) -> Result<DirectionSet> {
        self.validate()?;
        fibonacci_sphere_rotated(self.directions, self.knn, self.azimuth_offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.directions, 5000);
        assert_eq!(c.knn, 12);
        assert_eq!((c.n_theta, c.n_phi), (100, 200));
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = RunConfig::default();
        let bad = [
            RunConfig { directions: 50, ..base.clone() },
            RunConfig { knn: 0, ..base.clone() },
            RunConfig { thresholds: vec![0.02, 0.01], ..base.clone() },
            RunConfig { thresholds: vec![], ..base.clone() },
            RunConfig { n_theta: 4, ..base.clone() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
