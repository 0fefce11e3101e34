use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::SandwichError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoreType {
    Web,
    Corrugated,
    X,
    Y,
}

impl CoreType {
    pub const ALL: [CoreType; 4] = [Self::Web, Self::Corrugated, Self::X, Self::Y];

    pub fn name(self) -> &'static str {
        match self {
            Self::Web => "web",
            Self::Corrugated => "corrugated",
            Self::X => "x",
            Self::Y => "y",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for CoreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Design variables of the sizing problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variable {
    /// Face thickness.
    Tf,
    /// Core plate thickness.
    Tw,
    /// Core height.
    Hc,
    /// Y-core upper (leg) height.
    Hh,
    /// Y-core lower (stem) height.
    Hl,
    /// Core spacing.
    S,
    /// Joint plate thickness.
    Tj,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tf => "t_f",
            Self::Tw => "t_w",
            Self::Hc => "h_c",
            Self::Hh => "h_h",
            Self::Hl => "h_l",
            Self::S => "s",
            Self::Tj => "t_j",
        }
    }

    /// Variable bounds in mm.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Self::Tf => (1.0, 4.0),
            Self::Tw => (2.5, 5.0),
            Self::Hc => (10.0, 37.0),
            Self::Hh | Self::Hl => (1.0, 36.0),
            Self::S => (30.0, 150.0),
            Self::Tj => (1.0, 3.0),
        }
    }
}

/// Upper limit on `h_h + h_l` (mm).
pub const Y_HEIGHT_LIMIT: f64 = 37.0;

/// One sandwich beam. Lengths are in millimetres. For the Y core the core
/// height is `h_h + h_l` and `h_c` is ignored; `h_h` and `h_l` are ignored
/// for the other cores, as is `t_j` without joints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichDesign {
    pub core_type: CoreType,
    pub t_f: f64,
    pub t_w: f64,
    pub h_c: f64,
    pub h_h: f64,
    pub h_l: f64,
    pub s: f64,
    pub t_j: f64,
    pub with_joints: bool,
}

impl SandwichDesign {
    pub fn new(core_type: CoreType, t_f: f64, t_w: f64, h_c: f64, s: f64) -> Self {
        Self {
            core_type,
            t_f,
            t_w,
            h_c,
            h_h: h_c / 2.0,
            h_l: h_c / 2.0,
            s,
            t_j: 3.0,
            with_joints: false,
        }
    }

    pub fn y_core(t_f: f64, t_w: f64, h_h: f64, h_l: f64, s: f64) -> Self {
        Self {
            h_h,
            h_l,
            ..Self::new(CoreType::Y, t_f, t_w, h_h + h_l, s)
        }
    }

    pub fn with_joints(mut self, t_j: f64) -> Self {
        self.with_joints = true;
        self.t_j = t_j;
        self
    }

    /// Distance between the face plates (mm).
    pub fn core_height(&self) -> f64 {
        match self.core_type {
            CoreType::Y => self.h_h + self.h_l,
            _ => self.h_c,
        }
    }

    /// The free variables of this core type, in gene order.
    pub fn variables(core_type: CoreType, with_joints: bool) -> Vec<Variable> {
        use Variable::*;
        let mut v = match core_type {
            CoreType::Y => alloc::vec![Tf, Tw, Hh, Hl, S],
            _ => alloc::vec![Tf, Tw, Hc, S],
        };
        if with_joints {
            v.push(Tj);
        }
        v
    }

    pub fn get(&self, var: Variable) -> f64 {
        match var {
            Variable::Tf => self.t_f,
            Variable::Tw => self.t_w,
            Variable::Hc => self.h_c,
            Variable::Hh => self.h_h,
            Variable::Hl => self.h_l,
            Variable::S => self.s,
            Variable::Tj => self.t_j,
        }
    }

    pub fn set(&mut self, var: Variable, value: f64) {
        match var {
            Variable::Tf => self.t_f = value,
            Variable::Tw => self.t_w = value,
            Variable::Hc => self.h_c = value,
            Variable::Hh => self.h_h = value,
            Variable::Hl => self.h_l = value,
            Variable::S => self.s = value,
            Variable::Tj => self.t_j = value,
        }
        if self.core_type == CoreType::Y {
            self.h_c = self.h_h + self.h_l;
        }
    }

    pub fn genes(&self) -> Vec<f64> {
        Self::variables(self.core_type, self.with_joints)
            .into_iter()
            .map(|v| self.get(v))
            .collect()
    }

    pub fn from_genes(core_type: CoreType, with_joints: bool, genes: &[f64]) -> Self {
        let mut d = Self::new(core_type, 1.0, 2.5, 10.0, 30.0);
        d.with_joints = with_joints;
        for (var, &g) in Self::variables(core_type, with_joints).iter().zip(genes) {
            d.set(*var, g);
        }
        d
    }

    /// Checks the variable bounds, listing every offending variable.
    pub fn validate(&self) -> Result<(), SandwichError> {
        let mut bad: Vec<String> = Vec::new();
        for var in Self::variables(self.core_type, self.with_joints) {
            let (lo, hi) = var.bounds();
            let v = self.get(var);
            if !(v >= lo && v <= hi) {
                bad.push(alloc::format!("{} = {v} outside [{lo}, {hi}]", var.name()));
            }
        }
        if self.core_type == CoreType::Y && !(self.h_h + self.h_l <= Y_HEIGHT_LIMIT) {
            bad.push(alloc::format!(
                "h_h + h_l = {} exceeds {Y_HEIGHT_LIMIT}",
                self.h_h + self.h_l
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(SandwichError::Bounds(bad))
        }
    }
}

/// Scales `h_h` and `h_l` proportionally onto `h_h + h_l = 37` when their
/// sum exceeds it.
pub fn repair_y_heights(h_h: f64, h_l: f64) -> (f64, f64) {
    let sum = h_h + h_l;
    if sum <= Y_HEIGHT_LIMIT {
        return (h_h, h_l);
    }
    let f = Y_HEIGHT_LIMIT / sum;
    let (lo, _) = Variable::Hh.bounds();
    let hh = (h_h * f).max(lo);
    let hl = (h_l * f).max(lo);
    // The floor can push the sum back up by a rounding margin; trim the
    // larger part.
    let over = hh + hl - Y_HEIGHT_LIMIT;
    if over > 0.0 {
        if hh >= hl {
            (hh - over, hl)
        } else {
            (hh, hl - over)
        }
    } else {
        (hh, hl)
    }
}
