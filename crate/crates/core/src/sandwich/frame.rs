use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::math::{abs, ceil, round, sqrt};

use super::design::{CoreType, SandwichDesign};
use super::SandwichError;

/// Span of each end joint (m).
pub const JOINT_SPAN: f64 = 0.12;

const MM: f64 = 1e-3;
const COINCIDENT: f64 = 1e-9;
const GRID: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemberKind {
    TopFace,
    BottomFace,
    Core,
    Joint,
}

/// One beam element of unit depth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Member {
    pub nodes: [usize; 2],
    /// Plate thickness (m).
    pub thickness: f64,
    pub kind: MemberKind,
    /// Downward pressure on the member (Pa).
    pub pressure: f64,
}

/// Plane frame idealization of a sandwich beam strip.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameModel {
    /// Node positions (m).
    pub nodes: Vec<[f64; 2]>,
    pub members: Vec<Member>,
    pub clamped: Vec<usize>,
    /// Overall length including joints (m).
    pub length: f64,
    /// Loaded beam span (m).
    pub span: f64,
}

impl FrameModel {
    pub fn member_length(&self, m: &Member) -> f64 {
        let [a, b] = m.nodes;
        let (pa, pb) = (self.nodes[a], self.nodes[b]);
        sqrt((pb[0] - pa[0]) * (pb[0] - pa[0]) + (pb[1] - pa[1]) * (pb[1] - pa[1]))
    }

    /// Σ length × thickness per unit depth (m²).
    pub fn plate_area(&self) -> f64 {
        self.members.iter().map(|m| self.member_length(m) * m.thickness).sum()
    }

    /// Mass per unit outside-view area (kg/m²).
    pub fn area_density(&self, rho: f64) -> f64 {
        rho * self.plate_area() / self.length
    }

    /// Whitespace-separated node and member tables.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes: id x_m y_m clamped");
        for (i, p) in self.nodes.iter().enumerate() {
            let c = u8::from(self.clamped.contains(&i));
            let _ = writeln!(out, "{i} {:.9} {:.9} {c}", p[0], p[1]);
        }
        let _ = writeln!(out, "# members: id node_a node_b thickness_m kind pressure_pa");
        for (i, m) in self.members.iter().enumerate() {
            let kind = match m.kind {
                MemberKind::TopFace => "top",
                MemberKind::BottomFace => "bottom",
                MemberKind::Core => "core",
                MemberKind::Joint => "joint",
            };
            let _ = writeln!(
                out,
                "{i} {} {} {:.9} {kind} {}",
                m.nodes[0], m.nodes[1], m.thickness, m.pressure
            );
        }
        out
    }

    /// True when every node is reachable from the first one.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for m in &self.members {
            adj[m.nodes[0]].push(m.nodes[1]);
            adj[m.nodes[1]].push(m.nodes[0]);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Straight plate between two points, before splitting and meshing.
#[derive(Clone, Copy, Debug)]
struct Plate {
    a: [f64; 2],
    b: [f64; 2],
    thickness: f64,
    kind: MemberKind,
    pressure: f64,
}

#[derive(Default)]
struct Builder {
    plates: Vec<Plate>,
}

impl Builder {
    fn plate(&mut self, a: [f64; 2], b: [f64; 2], thickness: f64, kind: MemberKind, pressure: f64) {
        self.plates.push(Plate {
            a,
            b,
            thickness,
            kind,
            pressure,
        });
    }

    /// Splits plates at every endpoint lying on them, subdivides each piece
    /// into elements no longer than `max_element`, and merges coincident
    /// nodes.
    fn finish(self, max_element: f64, clamp_x: &[f64], length: f64, span: f64) -> FrameModel {
        let mut points: Vec<[f64; 2]> = Vec::new();
        for p in &self.plates {
            for q in [p.a, p.b] {
                if !points.iter().any(|r| close(*r, q)) {
                    points.push(q);
                }
            }
        }
        let mut nodes: Vec<[f64; 2]> = Vec::new();
        let mut index: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut node_of = |q: [f64; 2], nodes: &mut Vec<[f64; 2]>| -> usize {
            let key = (round(q[0] / GRID) as i64, round(q[1] / GRID) as i64);
            // A point rounding into a neighbouring cell still merges.
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(&i) = index.get(&(key.0 + dx, key.1 + dy)) {
                        if close(nodes[i], q) {
                            return i;
                        }
                    }
                }
            }
            nodes.push(q);
            index.insert(key, nodes.len() - 1);
            nodes.len() - 1
        };
        let mut members = Vec::new();
        for p in &self.plates {
            let d = [p.b[0] - p.a[0], p.b[1] - p.a[1]];
            let len = sqrt(d[0] * d[0] + d[1] * d[1]);
            let mut cuts: Vec<f64> = vec![0.0, 1.0];
            for q in &points {
                let t = ((q[0] - p.a[0]) * d[0] + (q[1] - p.a[1]) * d[1]) / (len * len);
                if t > 0.0 && t < 1.0 {
                    let foot = [p.a[0] + t * d[0], p.a[1] + t * d[1]];
                    if close(foot, *q) && !cuts.iter().any(|c| abs(c - t) * len < COINCIDENT) {
                        cuts.push(t);
                    }
                }
            }
            cuts.sort_by(f64::total_cmp);
            for w in cuts.windows(2) {
                let piece = (w[1] - w[0]) * len;
                let n = (ceil(piece / max_element - 1e-9) as usize).max(1);
                let mut prev = node_of(at(p, w[0]), &mut nodes);
                for k in 1..=n {
                    let t = w[0] + (w[1] - w[0]) * k as f64 / n as f64;
                    let next = node_of(at(p, t), &mut nodes);
                    members.push(Member {
                        nodes: [prev, next],
                        thickness: p.thickness,
                        kind: p.kind,
                        pressure: p.pressure,
                    });
                    prev = next;
                }
            }
        }
        let clamped = (0..nodes.len())
            .filter(|&i| clamp_x.iter().any(|x| abs(nodes[i][0] - x) < COINCIDENT))
            .collect();
        FrameModel {
            nodes,
            members,
            clamped,
            length,
            span,
        }
    }
}

fn at(p: &Plate, t: f64) -> [f64; 2] {
    [p.a[0] + t * (p.b[0] - p.a[0]), p.a[1] + t * (p.b[1] - p.a[1])]
}

fn close(a: [f64; 2], b: [f64; 2]) -> bool {
    abs(a[0] - b[0]) < COINCIDENT && abs(a[1] - b[1]) < COINCIDENT
}

/// Number of repeats of `period` fitted into `length`, at least `min`.
fn repeats(length: f64, period: f64, min: usize) -> usize {
    (round(length / period) as usize).max(min)
}

/// Builds the frame of `design` over a beam of `length` metres loaded by
/// `pressure`. Both faces are clamped at the outer ends; with joints the
/// clamps move to the girder side of the joint plates.
///
/// Core repeats are fitted to the span: the spacing used is
/// `length / round(length / s)` so that the core closes at both ends. End
/// webs and Y stems sit on the supports and are shared with the
/// neighbouring panel, so they carry half the plate thickness.
pub fn generate_geometry(design: &SandwichDesign, length: f64) -> Result<FrameModel, SandwichError> {
    build(design, length, 0.0)
}

pub(crate) fn build(design: &SandwichDesign, length: f64, pressure: f64) -> Result<FrameModel, SandwichError> {
    design.validate()?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(SandwichError::Length(length));
    }
    let h = design.core_height() * MM;
    let s = design.s * MM;
    let (tf, tw) = (design.t_f * MM, design.t_w * MM);
    let x0 = if design.with_joints { JOINT_SPAN } else { 0.0 };
    let x1 = x0 + length;
    let mut b = Builder::default();

    b.plate([x0, h], [x1, h], tf, MemberKind::TopFace, pressure);
    b.plate([x0, 0.0], [x1, 0.0], tf, MemberKind::BottomFace, 0.0);

    let core = |b: &mut Builder, p: [f64; 2], q: [f64; 2], t: f64| b.plate(p, q, t, MemberKind::Core, 0.0);
    match design.core_type {
        CoreType::Web => {
            let n = repeats(length, s, 1);
            for k in 0..=n {
                let x = x0 + length * k as f64 / n as f64;
                let t = if k == 0 || k == n { tw / 2.0 } else { tw };
                core(&mut b, [x, 0.0], [x, h], t);
            }
        }
        CoreType::Corrugated => {
            let n = repeats(length, s, 1);
            for k in 0..n {
                let (xa, xb) = (x0 + length * k as f64 / n as f64, x0 + length * (k + 1) as f64 / n as f64);
                let (ya, yb) = if k % 2 == 0 { (0.0, h) } else { (h, 0.0) };
                core(&mut b, [xa, ya], [xb, yb], tw);
            }
        }
        CoreType::X => {
            let n = repeats(length, s, 1);
            for k in 0..n {
                let (xa, xb) = (x0 + length * k as f64 / n as f64, x0 + length * (k + 1) as f64 / n as f64);
                let mid = [(xa + xb) / 2.0, h / 2.0];
                for (p, q) in [([xa, 0.0], [xb, h]), ([xa, h], [xb, 0.0])] {
                    core(&mut b, p, mid, tw);
                    core(&mut b, mid, q, tw);
                }
            }
        }
        CoreType::Y => {
            // Stems every second position, legs to the top face between them.
            let periods = repeats(length, 2.0 * s, 1);
            let n = 2 * periods;
            let hl = design.h_l * MM;
            for k in (0..=n).step_by(2) {
                let x = x0 + length * k as f64 / n as f64;
                let t = if k == 0 || k == n { tw / 2.0 } else { tw };
                core(&mut b, [x, 0.0], [x, hl], t);
                for side in [-1i64, 1] {
                    let j = k as i64 + side;
                    if j >= 0 && j <= n as i64 {
                        let xt = x0 + length * j as f64 / n as f64;
                        core(&mut b, [x, hl], [xt, h], tw);
                    }
                }
            }
        }
    }

    let mut clamp_x = vec![x0, x1];
    let mut total = length;
    if design.with_joints {
        let tj = design.t_j * MM;
        let end = x1 + JOINT_SPAN;
        for (outer, inner) in [(0.0, x0), (end, x1)] {
            b.plate([outer, h], [inner, h], tj, MemberKind::Joint, 0.0);
            b.plate([outer, 0.0], [inner, 0.0], tj, MemberKind::Joint, 0.0);
            b.plate([inner, 0.0], [inner, h], tj, MemberKind::Joint, 0.0);
        }
        clamp_x = vec![0.0, end];
        total = end;
    }

    let max_element = s.min(h) / 10.0;
    let model = b.finish(max_element, &clamp_x, total, length);
    if !model.is_connected() {
        return Err(SandwichError::Disconnected);
    }
    Ok(model)
}

/// Both faces alone, clamped at the ends: two independent plates.
pub fn faces_only(t_f: f64, h_c: f64, length: f64, elements: usize) -> FrameModel {
    let (tf, h) = (t_f * MM, h_c * MM);
    let mut b = Builder::default();
    b.plate([0.0, h], [length, h], tf, MemberKind::TopFace, 0.0);
    b.plate([0.0, 0.0], [length, 0.0], tf, MemberKind::BottomFace, 0.0);
    b.finish(length / elements as f64, &[0.0, length], length, length)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn web() -> SandwichDesign {
        SandwichDesign::new(CoreType::Web, 1.0, 2.5, 37.0, 100.0)
    }

    fn count_vertical_webs(m: &FrameModel) -> usize {
        let mut xs: Vec<f64> = Vec::new();
        for mem in m.members.iter().filter(|m| m.kind == MemberKind::Core) {
            let x = m.nodes[mem.nodes[0]][0];
            if !xs.iter().any(|v| abs(v - x) < 1e-9) {
                xs.push(x);
            }
        }
        xs.len()
    }

    #[test]
    fn web_core_has_one_web_per_spacing_plus_one() {
        let m = generate_geometry(&web(), 1.0).unwrap();
        assert_eq!(count_vertical_webs(&m), 11);
        assert!(m.is_connected());
        // Every plate piece is meshed finely enough.
        let max = 0.037f64.min(0.1) / 10.0;
        assert!(m.members.iter().all(|mem| m.member_length(mem) <= max + 1e-12));
    }

    #[test]
    fn clamps_sit_on_the_end_lines() {
        let m = generate_geometry(&web(), 1.0).unwrap();
        assert!(!m.clamped.is_empty());
        for &c in &m.clamped {
            let x = m.nodes[c][0];
            assert!(x.abs() < 1e-12 || (x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn corrugated_diagonals_have_the_expected_length() {
        let d = SandwichDesign::new(CoreType::Corrugated, 2.0, 3.0, 30.0, 50.0);
        let m = generate_geometry(&d, 1.0).unwrap();
        let core: f64 = m
            .members
            .iter()
            .filter(|x| x.kind == MemberKind::Core)
            .map(|x| m.member_length(x))
            .sum();
        let per_half_period = (0.05f64 * 0.05 + 0.03 * 0.03).sqrt();
        assert!((core - 20.0 * per_half_period).abs() < 1e-12);
    }

    #[test]
    fn x_core_diagonals_share_the_crossing_node() {
        let d = SandwichDesign::new(CoreType::X, 2.0, 3.0, 20.0, 100.0);
        let m = generate_geometry(&d, 1.0).unwrap();
        let mid = m
            .nodes
            .iter()
            .position(|p| (p[0] - 0.05).abs() < 1e-12 && (p[1] - 0.01).abs() < 1e-12)
            .unwrap();
        let degree = m.members.iter().filter(|x| x.nodes.contains(&mid)).count();
        assert_eq!(degree, 4);
    }

    #[test]
    fn y_core_with_short_stem_is_nearly_corrugated() {
        let y = SandwichDesign::y_core(2.0, 3.0, 29.0, 1.0, 50.0);
        let c = SandwichDesign::new(CoreType::Corrugated, 2.0, 3.0, 30.0, 50.0);
        let my = generate_geometry(&y, 1.0).unwrap();
        let mc = generate_geometry(&c, 1.0).unwrap();
        // Every Y core node lies within 1 mm of the corrugated core line.
        let core_nodes = |m: &FrameModel| -> Vec<[f64; 2]> {
            m.members
                .iter()
                .filter(|x| x.kind == MemberKind::Core)
                .flat_map(|x| x.nodes.map(|i| m.nodes[i]))
                .collect()
        };
        let segs: Vec<([f64; 2], [f64; 2])> = mc
            .members
            .iter()
            .filter(|x| x.kind == MemberKind::Core)
            .map(|x| (mc.nodes[x.nodes[0]], mc.nodes[x.nodes[1]]))
            .collect();
        let dist = |p: [f64; 2], (a, b): ([f64; 2], [f64; 2])| {
            let d = [b[0] - a[0], b[1] - a[1]];
            let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]))
                .clamp(0.0, 1.0);
            ((p[0] - a[0] - t * d[0]).powi(2) + (p[1] - a[1] - t * d[1]).powi(2)).sqrt()
        };
        for p in core_nodes(&my) {
            let best = segs.iter().map(|s| dist(p, *s)).fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-3 + 1e-12, "{p:?} is {best} m away");
        }
    }

    #[test]
    fn joints_extend_the_model_and_move_the_clamps() {
        let d = web().with_joints(2.0);
        let m = generate_geometry(&d, 1.0).unwrap();
        assert!((m.length - 1.24).abs() < 1e-12);
        assert_eq!(m.clamped.len(), 4);
        assert!(m.members.iter().any(|x| x.kind == MemberKind::Joint));
    }

    #[test]
    fn table_lists_every_node_and_member() {
        let m = generate_geometry(&web(), 1.0).unwrap();
        let t = m.to_table();
        assert_eq!(t.lines().count(), m.nodes.len() + m.members.len() + 2);
    }

    #[test]
    fn out_of_bounds_designs_are_rejected() {
        let mut d = web();
        d.s = 10.0;
        assert!(matches!(generate_geometry(&d, 1.0), Err(SandwichError::Bounds(_))));
    }
}
