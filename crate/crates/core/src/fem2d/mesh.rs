use alloc::vec::Vec;

use crate::math::{abs, round};

use super::FemError;

/// Vertical boundary of the rectangular domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
}

/// Fully fixed band of nodes on a vertical edge. `y_range` is given as
/// fractions of the domain height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClampSpec {
    pub edge: Edge,
    pub y_range: (f64, f64),
}

impl ClampSpec {
    pub fn full(edge: Edge) -> Self {
        Self {
            edge,
            y_range: (0.0, 1.0),
        }
    }
}

/// Supports and loading of the beam domain.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySpec {
    pub clamps: Vec<ClampSpec>,
    /// Downward pressure on the top edge (Pa).
    pub pressure: f64,
    /// Loaded part of the top edge, `(x_start, x_end)` in metres; `None`
    /// loads the whole edge.
    pub pressure_span: Option<(f64, f64)>,
}

impl BoundarySpec {
    /// Both vertical edges fully clamped, uniform pressure on the top edge.
    pub fn clamped_both_ends(pressure: f64) -> Self {
        Self {
            clamps: alloc::vec![ClampSpec::full(Edge::Left), ClampSpec::full(Edge::Right)],
            pressure,
            pressure_span: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureEdge {
    pub nodes: [usize; 2],
    /// Pa, acting in −y.
    pub pressure: f64,
}

/// Structured grid of square bilinear quads.
///
/// Nodes are numbered column by column, `node(i, j) = i·(ny+1) + j` with `j`
/// counted upwards from the bottom edge, and elements the same way,
/// `element(ix, iy) = ix·ny + iy`. Element nodes run counter-clockwise from
/// the lower-left corner.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadMesh {
    pub nx: usize,
    pub ny: usize,
    pub element_size: f64,
    pub thickness: f64,
    pub node_coords: Vec<[f64; 2]>,
    pub clamped_node_sets: Vec<Vec<usize>>,
    pub pressure_edges: Vec<PressureEdge>,
}

fn divide(extent: f64, size: f64, what: &'static str) -> Result<usize, FemError> {
    let ratio = extent / size;
    let n = round(ratio);
    if n < 1.0 || abs(ratio - n) > 1e-9 * ratio.max(1.0) {
        return Err(FemError::Dimension {
            what,
            extent,
            element_size: size,
        });
    }
    Ok(n as usize)
}

/// Meshes a `length × height` rectangle with square elements.
pub fn build_mesh(
    length: f64,
    height: f64,
    element_size: f64,
    bc: &BoundarySpec,
) -> Result<QuadMesh, FemError> {
    if !(length > 0.0 && height > 0.0 && element_size > 0.0) {
        return Err(FemError::NonPositive("mesh dimensions"));
    }
    let nx = divide(length, element_size, "length")?;
    let ny = divide(height, element_size, "height")?;

    let mut node_coords = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            node_coords.push([i as f64 * element_size, j as f64 * element_size]);
        }
    }

    let mut clamped_node_sets = Vec::new();
    for clamp in &bc.clamps {
        let i = match clamp.edge {
            Edge::Left => 0,
            Edge::Right => nx,
        };
        let (lo, hi) = clamp.y_range;
        let set: Vec<usize> = (0..=ny)
            .filter(|&j| {
                let frac = j as f64 / ny as f64;
                frac >= lo - 1e-12 && frac <= hi + 1e-12
            })
            .map(|j| i * (ny + 1) + j)
            .collect();
        if !set.is_empty() {
            clamped_node_sets.push(set);
        }
    }
    if clamped_node_sets.is_empty() {
        return Err(FemError::NoSupports);
    }

    let mut pressure_edges = Vec::new();
    if bc.pressure != 0.0 {
        for i in 0..nx {
            let mid = (i as f64 + 0.5) * element_size;
            let inside = match bc.pressure_span {
                Some((a, b)) => mid >= a && mid <= b,
                None => true,
            };
            if inside {
                pressure_edges.push(PressureEdge {
                    nodes: [i * (ny + 1) + ny, (i + 1) * (ny + 1) + ny],
                    pressure: bc.pressure,
                });
            }
        }
    }

    Ok(QuadMesh {
        nx,
        ny,
        element_size,
        thickness: 1.0,
        node_coords,
        clamped_node_sets,
        pressure_edges,
    })
}

impl QuadMesh {
    pub fn n_elements(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_nodes()
    }

    pub fn length(&self) -> f64 {
        self.nx as f64 * self.element_size
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.element_size
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 1) + j
    }

    #[inline]
    pub fn element_index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    #[inline]
    pub fn element_ij(&self, e: usize) -> (usize, usize) {
        (e / self.ny, e % self.ny)
    }

    /// Corner nodes, counter-clockwise from lower-left.
    #[inline]
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let (i, j) = self.element_ij(e);
        [
            self.node(i, j),
            self.node(i + 1, j),
            self.node(i + 1, j + 1),
            self.node(i, j + 1),
        ]
    }

    pub fn element_dofs(&self, e: usize) -> [usize; 8] {
        let n = self.element_nodes(e);
        [
            2 * n[0],
            2 * n[0] + 1,
            2 * n[1],
            2 * n[1] + 1,
            2 * n[2],
            2 * n[2] + 1,
            2 * n[3],
            2 * n[3] + 1,
        ]
    }

    pub fn element_centroid(&self, e: usize) -> [f64; 2] {
        let (i, j) = self.element_ij(e);
        [
            (i as f64 + 0.5) * self.element_size,
            (j as f64 + 0.5) * self.element_size,
        ]
    }

    pub fn element_area(&self) -> f64 {
        self.element_size * self.element_size
    }

    pub fn element_volume(&self) -> f64 {
        self.element_area() * self.thickness
    }

    pub fn is_clamped(&self, node: usize) -> bool {
        self.clamped_node_sets.iter().any(|s| s.contains(&node))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clamp_both() -> BoundarySpec {
        BoundarySpec::clamped_both_ends(50e3)
    }

    #[test]
    fn beam_grid_counts() {
        let mesh = build_mesh(1.0, 0.045, 0.005, &clamp_both()).unwrap();
        assert_eq!((mesh.nx, mesh.ny), (200, 9));
        assert_eq!(mesh.n_elements(), 1800);
        assert_eq!(mesh.n_nodes(), 201 * 10);
        assert_eq!(mesh.clamped_node_sets.len(), 2);
        assert!(mesh.clamped_node_sets.iter().all(|s| s.len() == 10));
        assert_eq!(mesh.pressure_edges.len(), 200);
    }

    #[test]
    fn millimetre_grid() {
        let mesh = build_mesh(1.0, 0.045, 0.001, &clamp_both()).unwrap();
        assert_eq!((mesh.nx, mesh.ny), (1000, 45));
    }

    #[test]
    fn rejects_non_divisible_height() {
        let err = build_mesh(1.0, 0.04, 0.003, &clamp_both()).unwrap_err();
        assert!(matches!(err, FemError::Dimension { .. }));
    }

    #[test]
    fn rejects_missing_supports() {
        let bc = BoundarySpec {
            clamps: Vec::new(),
            pressure: 1.0,
            pressure_span: None,
        };
        assert!(matches!(
            build_mesh(1.0, 0.045, 0.005, &bc),
            Err(FemError::NoSupports)
        ));
    }

    #[test]
    fn elements_are_counter_clockwise() {
        let mesh = build_mesh(0.02, 0.01, 0.005, &clamp_both()).unwrap();
        for e in 0..mesh.n_elements() {
            let n = mesh.element_nodes(e);
            let p: Vec<[f64; 2]> = n.iter().map(|&k| mesh.node_coords[k]).collect();
            let mut area2 = 0.0;
            for a in 0..4 {
                let b = (a + 1) % 4;
                area2 += p[a][0] * p[b][1] - p[b][0] * p[a][1];
            }
            assert!(area2 > 0.0);
            let mut sorted = n;
            sorted.sort_unstable();
            assert!(sorted.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn clamp_band_selects_partial_edge() {
        let bc = BoundarySpec {
            clamps: alloc::vec![ClampSpec {
                edge: Edge::Left,
                y_range: (0.5, 1.0)
            }],
            pressure: 0.0,
            pressure_span: None,
        };
        let mesh = build_mesh(0.02, 0.04, 0.005, &bc).unwrap();
        assert_eq!(mesh.clamped_node_sets[0], alloc::vec![4, 5, 6, 7, 8]);
        assert!(mesh.pressure_edges.is_empty());
    }
}
