use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::fem2d::Material;
use crate::sandwich::{
    evaluate_with, repair_y_heights, CoreType, Responses, SandwichDesign, Variable,
};

use super::Problem;

/// The second objective next to area density.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizingObjective {
    /// Largest member stress (Pa).
    Stress,
    /// Negated fundamental frequency (Hz), so that it is minimized.
    Frequency,
}

/// Sizing of one core type as a two-objective problem over the core
/// variables in millimetres: `[area density, max stress or −f1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SizingProblem {
    pub core_type: CoreType,
    pub with_joints: bool,
    pub objective: SizingObjective,
    /// Pressure on the top face (Pa).
    pub load: f64,
    /// Beam span (m).
    pub length: f64,
    pub material: Material,
    variables: Vec<Variable>,
    bounds: Vec<(f64, f64)>,
}

impl SizingProblem {
    pub fn new(core_type: CoreType, with_joints: bool, objective: SizingObjective) -> Self {
        let variables = SandwichDesign::variables(core_type, with_joints);
        let bounds = variables.iter().map(|v| v.bounds()).collect();
        Self {
            core_type,
            with_joints,
            objective,
            load: crate::sandwich::PRESSURE,
            length: crate::sandwich::BEAM_LENGTH,
            material: Material::steel(),
            variables,
            bounds,
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn design(&self, genes: &[f64]) -> SandwichDesign {
        SandwichDesign::from_genes(self.core_type, self.with_joints, genes)
    }
}

impl Problem for SizingProblem {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn n_objectives(&self) -> usize {
        2
    }

    fn repair(&self, genes: &mut [f64]) {
        let pos = |v| self.variables.iter().position(|&x| x == v);
        if let (Some(i), Some(j)) = (pos(Variable::Hh), pos(Variable::Hl)) {
            let (hh, hl) = repair_y_heights(genes[i], genes[j]);
            genes[i] = hh;
            genes[j] = hl;
        }
    }

    fn evaluate(&self, genes: &[f64]) -> Result<Vec<f64>, alloc::string::String> {
        let design = self.design(genes);
        design.validate().map_err(|e| e.to_string())?;
        let responses = match self.objective {
            SizingObjective::Stress => Responses::STRESS,
            SizingObjective::Frequency => Responses::FREQUENCY,
        };
        let r = evaluate_with(&design, self.load, self.length, &self.material, responses)
            .map_err(|e| e.to_string())?;
        Ok(match self.objective {
            SizingObjective::Stress => vec![r.area_density, r.max_vm],
            SizingObjective::Frequency => vec![r.area_density, -r.f1],
        })
    }
}
