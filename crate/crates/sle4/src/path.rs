//! Real-valued processes on a uniform time grid.

use crate::error::{SimError, SimResult};
use serde::{Deserialize, Serialize};

/// A real process sampled on the uniform grid `t0 + k·dt`.
///
/// Houses driving functions, Brownian paths and wedge radial processes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplePath {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> SimResult<Self> {
        if !(dt > 0.0) {
            return Err(SimError::invalid(format!("SamplePath dt must be > 0, got {dt}")));
        }
        if values.is_empty() {
            return Err(SimError::invalid("SamplePath values must be non-empty"));
        }
        Ok(SamplePath { t0, dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last grid time covered by the path.
    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.values.len() - 1) as f64
    }

    /// Grid index for time `t`, rounded down; errors outside the grid span.
    pub fn index_at(&self, t: f64) -> SimResult<usize> {
        let k = ((t - self.t0) / self.dt + 1e-9).floor();
        if k < 0.0 || k as usize >= self.values.len() {
            return Err(SimError::invalid(format!(
                "time {t} outside path span [{}, {}]",
                self.t0,
                self.t_end()
            )));
        }
        Ok(k as usize)
    }

    /// Value at the grid point at or just below `t`.
    pub fn value_at(&self, t: f64) -> SimResult<f64> {
        Ok(self.values[self.index_at(t)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(SamplePath::new(0.0, 0.0, vec![1.0]).is_err());
        assert!(SamplePath::new(0.0, 0.1, vec![]).is_err());
    }

    #[test]
    fn index_rounds_down() {
        let p = SamplePath::new(0.0, 0.5, vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(p.index_at(0.74).unwrap(), 1);
        assert_eq!(p.index_at(1.0).unwrap(), 2);
        assert!(p.index_at(1.6).is_err());
        assert!(p.index_at(-0.2).is_err());
    }
}
