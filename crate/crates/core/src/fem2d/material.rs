use crate::math::{powf, powi};

use super::FemError;

/// Isotropic linear-elastic solid with SIMP penalization powers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    /// Young's modulus of the solid (Pa).
    pub e0: f64,
    /// Modulus assigned to void (Pa).
    pub e_min: f64,
    pub nu: f64,
    /// Density (kg/m³).
    pub rho: f64,
    /// Stiffness penalization power.
    pub pl: f64,
    /// Mass penalization power below the density threshold.
    pub ql: f64,
}

impl Material {
    /// Structural steel: E = 210 GPa, ν = 0.3, ρ = 7850 kg/m³,
    /// `E_min = 1e-9·E0`, `pl = 3`, `ql = 6`.
    pub fn steel() -> Self {
        let e0 = 210e9;
        Self {
            e0,
            e_min: 1e-9 * e0,
            nu: 0.3,
            rho: 7850.0,
            pl: 3.0,
            ql: 6.0,
        }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if !(self.e0 > 0.0 && self.e0.is_finite()) {
            return Err(FemError::InvalidMaterial("e0 must be positive"));
        }
        if !(self.e_min > 0.0 && self.e_min < 1e-3 * self.e0) {
            return Err(FemError::InvalidMaterial("e_min must satisfy 0 < e_min << e0"));
        }
        if !(self.nu >= 0.0 && self.nu < 0.5) {
            return Err(FemError::InvalidMaterial("nu must lie in [0, 0.5)"));
        }
        if !(self.rho > 0.0) {
            return Err(FemError::InvalidMaterial("rho must be positive"));
        }
        if !(self.pl > 1.0) {
            return Err(FemError::InvalidMaterial("pl must exceed 1"));
        }
        if !(self.ql > 1.0) {
            return Err(FemError::InvalidMaterial("ql must exceed 1"));
        }
        Ok(())
    }

    /// Penalized modulus `E_min + x^pl (E0 − E_min)`.
    #[inline]
    pub fn modulus(&self, x: f64) -> f64 {
        self.e_min + pow(x, self.pl) * (self.e0 - self.e_min)
    }

    #[inline]
    pub fn modulus_derivative(&self, x: f64) -> f64 {
        self.pl * pow(x, self.pl - 1.0) * (self.e0 - self.e_min)
    }

    /// Element stiffness scale relative to the solid element.
    #[inline]
    pub fn stiffness_factor(&self, x: f64) -> f64 {
        self.modulus(x) / self.e0
    }

    #[inline]
    pub fn stiffness_factor_derivative(&self, x: f64) -> f64 {
        self.modulus_derivative(x) / self.e0
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::steel()
    }
}

/// Integer powers go through repeated squaring so that common cases such as
/// `x^3` are exact and cheap.
#[inline]
pub(crate) fn pow(x: f64, p: f64) -> f64 {
    if p == (p as i32) as f64 {
        powi(x, p as i32)
    } else {
        powf(x, p)
    }
}

/// How element mass scales with relative density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MassInterpolation {
    /// `x` above `threshold`, `x^ql` at or below it.
    Piecewise { threshold: f64 },
    /// `x` everywhere.
    Linear,
    /// `x^pl`, the same power as the stiffness.
    StiffnessPower,
}

impl Default for MassInterpolation {
    fn default() -> Self {
        Self::Piecewise { threshold: 0.1 }
    }
}

impl MassInterpolation {
    pub fn factor(&self, x: f64, material: &Material) -> f64 {
        match *self {
            Self::Piecewise { threshold } => {
                if x > threshold {
                    x
                } else {
                    pow(x, material.ql)
                }
            }
            Self::Linear => x,
            Self::StiffnessPower => pow(x, material.pl),
        }
    }

    pub fn derivative(&self, x: f64, material: &Material) -> f64 {
        match *self {
            Self::Piecewise { threshold } => {
                if x > threshold {
                    1.0
                } else {
                    material.ql * pow(x, material.ql - 1.0)
                }
            }
            Self::Linear => 1.0,
            Self::StiffnessPower => material.pl * pow(x, material.pl - 1.0),
        }
    }
}
