//! Interval and disk meshes with boundary quadrature.
//!
//! Both mesh families are structured so that the discrete boundary measure is
//! trivial to state exactly: the interval boundary carries the counting
//! measure (weight 1 at each endpoint), the polygonal disk boundary carries
//! the uniform weight `2π/n_theta` at each outer-ring node. All boundary
//! functionals in the crate are quadratures against these weights, so σ(∂Ω)
//! totals are mesh-size independent by construction.
//!
//! The disk triangulation fans `n_theta` sectors around a center vertex and
//! splits each annular trapezoid along the same rotational diagonal, which
//! keeps the cell set invariant under the cyclic rotation group
//! `C_{n_theta}`. The diagonal orientation is chosen so the assembled
//! stiffness matrix has no positive off-diagonal entries (checked in the
//! assembly tests); that sign structure is what makes the discrete Neumann
//! semigroup positivity-preserving and is relied on throughout the
//! positivity module.

use serde::Serialize;

use crate::error::{Error, Result};

/// Finite symmetry group a mesh is invariant under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymmetryTag {
    /// x ↦ -x on a symmetric interval.
    Reflection1D,
    /// Rotation by 2π/n on the disk (cells included, not just vertices).
    Cyclic(usize),
}

/// P1 mesh of an interval or a disk.
///
/// `boundary_nodes` and `boundary_weights` are index-aligned; on the disk the
/// boundary nodes are ordered by angle `2πk/n_theta` starting at the positive
/// x-axis, on the interval they are `[left end, right end]`.
#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    pub dim: usize,
    /// Vertex coordinates, each of length `dim`.
    pub vertices: Vec<Vec<f64>>,
    /// Index pairs (1D) or counterclockwise index triples (2D).
    pub cells: Vec<Vec<usize>>,
    pub boundary_nodes: Vec<usize>,
    /// Quadrature weight of the discrete boundary measure at each boundary node.
    pub boundary_weights: Vec<f64>,
    pub symmetry_tag: Option<SymmetryTag>,
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary_nodes.len()
    }

    /// Total mass of the discrete boundary measure σ(∂Ω).
    pub fn boundary_sigma_total(&self) -> f64 {
        self.boundary_weights.iter().sum()
    }

    /// Largest cell diameter; the resolution scale `h` used by time floors
    /// and fit preconditions.
    pub fn max_cell_diameter(&self) -> f64 {
        let mut h: f64 = 0.0;
        for cell in &self.cells {
            for (a, &ia) in cell.iter().enumerate() {
                for &ib in cell.iter().skip(a + 1) {
                    let d: f64 = self.vertices[ia]
                        .iter()
                        .zip(&self.vertices[ib])
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum();
                    h = h.max(d.sqrt());
                }
            }
        }
        h
    }

    /// Angle `2πk/n_theta` of the k-th boundary node of a disk mesh.
    ///
    /// Uses the construction ordering rather than `atan2` so that sign tests
    /// against quadrant boundaries are exact.
    pub fn boundary_angle(&self, k: usize) -> Result<f64> {
        if self.dim != 2 {
            return Err(Error::InvalidArgument(
                "boundary angles are defined on disk meshes only".into(),
            ));
        }
        let m = self.n_boundary();
        if k >= m {
            return Err(Error::InvalidArgument(format!(
                "boundary node index {k} out of range (have {m})"
            )));
        }
        Ok(2.0 * std::f64::consts::PI * k as f64 / m as f64)
    }

    /// Position within `boundary_nodes` of a global vertex index, if any.
    pub fn boundary_position(&self, vertex: usize) -> Option<usize> {
        self.boundary_nodes.iter().position(|&v| v == vertex)
    }
}

/// Equispaced interval mesh of `[a, b]` with `n` cells (`n + 1` vertices).
///
/// Boundary weights are 1 at each endpoint (counting measure). The mesh is
/// tagged with the reflection group exactly when the interval is symmetric.
pub fn build_interval_mesh(a: f64, b: f64, n: usize) -> Result<Mesh> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "interval requires a < b, got a = {a}, b = {b}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "interval needs at least two cells, got {n}"
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(
            "interval endpoints must be finite".into(),
        ));
    }
    let h = (b - a) / n as f64;
    let vertices: Vec<Vec<f64>> = (0..=n).map(|i| vec![a + h * i as f64]).collect();
    let cells: Vec<Vec<usize>> = (0..n).map(|i| vec![i, i + 1]).collect();
    let symmetric = (a + b).abs() <= 1e-14 * (b - a).abs();
    Ok(Mesh {
        dim: 1,
        vertices,
        cells,
        boundary_nodes: vec![0, n],
        boundary_weights: vec![1.0, 1.0],
        symmetry_tag: symmetric.then_some(SymmetryTag::Reflection1D),
    })
}

/// Structured polar mesh of the unit disk: rings at radii `j/n_r`, `n_theta`
/// equal sectors, plus the center vertex. Invariant under `C_{n_theta}`.
///
/// `n_theta` must be even (≥ 8) so the mesh supports the quarter-turn and
/// reflection vertex symmetries used elsewhere; `n_r ≥ 2` keeps the inner
/// fan separate from the boundary ring.
pub fn build_disk_mesh(n_r: usize, n_theta: usize) -> Result<Mesh> {
    if n_r < 2 {
        return Err(Error::InvalidArgument(format!(
            "disk needs n_r ≥ 2, got {n_r}"
        )));
    }
    if n_theta < 8 {
        return Err(Error::InvalidArgument(format!(
            "disk needs n_theta ≥ 8, got {n_theta}"
        )));
    }
    if n_theta % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "disk needs an even n_theta (reflection symmetry of the vertex set), got {n_theta}"
        )));
    }
    let m = n_theta;
    let idx = |ring: usize, i: usize| -> usize { 1 + (ring - 1) * m + (i % m) };

    let mut vertices = vec![vec![0.0, 0.0]];
    for ring in 1..=n_r {
        let r = ring as f64 / n_r as f64;
        for i in 0..m {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            vertices.push(vec![r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut cells = Vec::with_capacity(m * (2 * n_r - 1));
    for i in 0..m {
        cells.push(vec![0, idx(1, i), idx(1, i + 1)]);
    }
    for ring in 1..n_r {
        for i in 0..m {
            // Consistent diagonal from inner node i to outer node i+1: the
            // same split in every sector keeps the triangulation invariant
            // under rotation by one sector.
            cells.push(vec![idx(ring, i), idx(ring + 1, i), idx(ring + 1, i + 1)]);
            cells.push(vec![idx(ring, i), idx(ring + 1, i + 1), idx(ring, i + 1)]);
        }
    }

    let boundary_nodes: Vec<usize> = (0..m).map(|i| idx(n_r, i)).collect();
    let w = 2.0 * std::f64::consts::PI / m as f64;
    Ok(Mesh {
        dim: 2,
        vertices,
        cells,
        boundary_nodes,
        boundary_weights: vec![w; m],
        symmetry_tag: Some(SymmetryTag::Cyclic(m)),
    })
}
