use alloc::vec::Vec;

use super::{check_len, TopoptError};

/// `g = Σ x̃_i v_i / (v̄ V) − 1 ≤ 0`, with `V` the volume of the whole
/// design domain, active elements included.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeConstraint {
    pub vbar: f64,
    pub total_volume: f64,
}

impl VolumeConstraint {
    pub fn new(vbar: f64, element_volumes: &[f64]) -> Result<Self, TopoptError> {
        if !(vbar > 0.0 && vbar <= 1.0) {
            return Err(TopoptError::Config(alloc::format!(
                "volume fraction must lie in (0, 1], got {vbar}"
            )));
        }
        Ok(Self {
            vbar,
            total_volume: element_volumes.iter().sum(),
        })
    }

    pub fn value(&self, densities: &[f64], element_volumes: &[f64]) -> Result<f64, TopoptError> {
        check_len(element_volumes.len(), densities.len())?;
        let used: f64 = densities.iter().zip(element_volumes).map(|(x, v)| x * v).sum();
        Ok(used / (self.vbar * self.total_volume) - 1.0)
    }

    /// `∂g/∂x̃`.
    pub fn gradient(&self, element_volumes: &[f64]) -> Vec<f64> {
        let s = self.vbar * self.total_volume;
        element_volumes.iter().map(|v| v / s).collect()
    }

    pub fn is_feasible(&self, g: f64) -> bool {
        g <= 0.0
    }
}
