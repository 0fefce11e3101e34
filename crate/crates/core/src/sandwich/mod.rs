//! Conventional prismatic sandwich beams: parametric web, corrugated, X and
//! Y cores with optional end joints, idealized as plane frames of
//! Euler–Bernoulli plates of unit depth.
//!
//! Design variables are in millimetres; models and results are SI.

mod analysis;
mod design;
mod frame;

pub use analysis::{fundamental_frequency, FrameSystem};
pub use design::{repair_y_heights, CoreType, SandwichDesign, Variable, Y_HEIGHT_LIMIT};
pub use frame::{faces_only, generate_geometry, FrameModel, Member, MemberKind, JOINT_SPAN};

use alloc::string::String;
use alloc::vec::Vec;

use crate::fem2d::Material;
use crate::linalg::{Cholesky, LinalgError};
use crate::math::sqrt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SandwichError {
    #[error("design outside bounds: {}", .0.join(", "))]
    Bounds(Vec<String>),
    #[error("beam length {0} m must be positive")]
    Length(f64),
    #[error("frame model is not connected")]
    Disconnected,
    #[error("frame stiffness is singular")]
    Singular,
    #[error(transparent)]
    Eigen(LinalgError),
}

/// Default beam span (m).
pub const BEAM_LENGTH: f64 = 1.0;
/// Default top pressure (Pa).
pub const PRESSURE: f64 = 50e3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    /// kg/m²
    pub area_density: f64,
    /// Largest member stress (Pa).
    pub max_vm: f64,
    /// Hz
    pub f1: f64,
}

/// Which responses [`evaluate_with`] computes. Skipped ones are NaN.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Responses {
    pub stress: bool,
    pub frequency: bool,
}

impl Responses {
    pub const ALL: Self = Self {
        stress: true,
        frequency: true,
    };
    pub const STRESS: Self = Self {
        stress: true,
        frequency: false,
    };
    pub const FREQUENCY: Self = Self {
        stress: false,
        frequency: true,
    };
}

/// Plate volume per unit panel area of the periodic core (m).
fn core_thickness_equivalent(design: &SandwichDesign) -> f64 {
    let mm = 1e-3;
    let (s, tw) = (design.s * mm, design.t_w * mm);
    let h = design.core_height() * mm;
    let diag = |rise: f64| sqrt(s * s + rise * rise);
    match design.core_type {
        CoreType::Web => tw * h / s,
        CoreType::Corrugated => tw * diag(h) / s,
        CoreType::X => 2.0 * tw * diag(h) / s,
        CoreType::Y => tw * (design.h_l * mm + 2.0 * diag(design.h_h * mm)) / (2.0 * s),
    }
}

/// Closed-form mass per unit outside-view area (kg/m²) of a beam of span
/// `length`. Without joints this is the periodic panel value and does not
/// depend on `length`; joint plates are spread over the full length
/// including both joints.
pub fn area_density(design: &SandwichDesign, length: f64, material: &Material) -> f64 {
    let mm = 1e-3;
    let panel = 2.0 * design.t_f * mm + core_thickness_equivalent(design);
    if !design.with_joints {
        return material.rho * panel;
    }
    let h = design.core_height() * mm;
    let joints = 2.0 * (2.0 * JOINT_SPAN + h) * design.t_j * mm;
    material.rho * (panel * length + joints) / (length + 2.0 * JOINT_SPAN)
}

/// Evaluates the design as a steel beam of span `length` under `load`.
pub fn evaluate(design: &SandwichDesign, load: f64, length: f64) -> Result<EvalResult, SandwichError> {
    evaluate_with(design, load, length, &Material::steel(), Responses::ALL)
}

pub fn evaluate_with(
    design: &SandwichDesign,
    load: f64,
    length: f64,
    material: &Material,
    responses: Responses,
) -> Result<EvalResult, SandwichError> {
    let model = frame::build(design, length, load)?;
    let system = FrameSystem::assemble(&model, material)?;
    let mut result = EvalResult {
        area_density: area_density(design, length, material),
        max_vm: f64::NAN,
        f1: f64::NAN,
    };
    if responses.stress {
        let factor = Cholesky::factor(&system.stiffness).map_err(|_| SandwichError::Singular)?;
        let u = factor.solve(&system.load);
        result.max_vm = system.max_stress(&model, material, &u);
    }
    if responses.frequency {
        result.f1 = fundamental_frequency(&system)?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn web_core_example_area_density() {
        let d = SandwichDesign::new(CoreType::Web, 1.0, 2.5, 37.0, 100.0);
        let rho = area_density(&d, 1.0, &Material::steel());
        assert!((rho - 7850.0 * (0.002 + 0.0025 * 0.037 / 0.1)).abs() < 1e-12);
        assert!((rho - 22.96).abs() < 0.01);
    }

    #[test]
    fn closed_form_matches_member_sum_on_commensurate_designs() {
        let mat = Material::steel();
        let designs = [
            SandwichDesign::new(CoreType::Web, 1.0, 2.5, 37.0, 100.0),
            SandwichDesign::new(CoreType::Corrugated, 2.0, 3.0, 20.0, 50.0),
            SandwichDesign::new(CoreType::X, 3.0, 4.0, 30.0, 125.0),
            SandwichDesign::y_core(1.5, 2.5, 20.0, 8.0, 62.5),
            SandwichDesign::new(CoreType::Corrugated, 2.0, 3.0, 20.0, 50.0).with_joints(2.5),
            SandwichDesign::y_core(1.5, 2.5, 20.0, 8.0, 62.5).with_joints(1.0),
        ];
        for d in designs {
            let model = generate_geometry(&d, 1.0).unwrap();
            let closed = area_density(&d, 1.0, &mat);
            assert!((model.area_density(mat.rho) - closed).abs() < 1e-10, "{d:?}");
        }
    }

    #[test]
    fn face_contribution_is_linear() {
        let mat = Material::steel();
        let a = SandwichDesign::new(CoreType::X, 1.0, 3.0, 20.0, 80.0);
        let b = SandwichDesign { t_f: 2.0, ..a };
        let core = area_density(&a, 1.0, &mat) - 2.0 * mat.rho * 1e-3;
        assert!((area_density(&b, 1.0, &mat) - core - 2.0 * (2.0 * mat.rho * 1e-3)).abs() < 1e-12);
        let web = SandwichDesign { core_type: CoreType::Web, ..a };
        let corr = SandwichDesign { core_type: CoreType::Corrugated, ..a };
        assert!(area_density(&corr, 1.0, &mat) > area_density(&web, 1.0, &mat));
    }
}
