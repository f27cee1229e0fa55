//! P1 finite element assembly of the heat form with boundary coupling.
//!
//! The assembled bilinear form is
//!
//! ```text
//! a_B[u, v] = ∫_Ω a(x) ∇u·∇v dx + ⟨B γu, γv⟩_∂Ω
//! ```
//!
//! realized as the matrix `A_B = K + γᵀ W B_h γ` where γ selects boundary
//! nodal values and W is the diagonal of boundary weights. The mass matrix is
//! lumped (row sums placed on the diagonal). Lumping matters: it keeps
//! `M⁻¹A_B` sign-structured exactly like `A_B`, so the discrete semigroup is
//! positivity-preserving precisely when −A_B is Metzler, which is the bridge
//! every positivity test in the crate relies on. Consistent mass would blur
//! that correspondence with O(h) mass coupling across neighbors.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::boundary::DiscreteBoundaryOperator;
use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::linalg;

/// Radially symmetric coefficient profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialCoefficient {
    /// a(x) = 1 + |x|².
    OnePlusR2,
}

/// Symbolic diffusion coefficient; always an isotropic field a(x)·I, which
/// covers every supported example and keeps the coefficient symmetric and
/// rotation-invariant by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSpec {
    Constant(f64),
    Radial(RadialCoefficient),
}

/// Diffusion coefficient plus its declared ellipticity lower bound.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientField {
    pub spec: CoefficientSpec,
    /// Claimed lower bound α with a(x) ≥ α; validated on every cell sample
    /// point during assembly.
    pub declared_alpha: f64,
}

impl CoefficientField {
    /// Field with the natural (sharp on the supported domains) lower bound.
    pub fn new(spec: CoefficientSpec) -> Result<Self> {
        let declared_alpha = match spec {
            CoefficientSpec::Constant(c) => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "constant coefficient must be positive, got {c}"
                    )));
                }
                c
            }
            // 1 + |x|² ≥ 1 on both supported domains.
            CoefficientSpec::Radial(RadialCoefficient::OnePlusR2) => 1.0,
        };
        Ok(Self {
            spec,
            declared_alpha,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.spec {
            CoefficientSpec::Constant(c) => c,
            CoefficientSpec::Radial(RadialCoefficient::OnePlusR2) => {
                1.0 + x.iter().map(|v| v * v).sum::<f64>()
            }
        }
    }
}

/// The discretized problem: all matrices realizing the form a_B on a mesh.
#[derive(Debug)]
pub struct AssembledProblem {
    pub mesh: Mesh,
    pub coefficient: CoefficientField,
    pub boundary: DiscreteBoundaryOperator,
    /// Lumped mass diagonal; entries are the nodal volume shares.
    pub mass: DVector<f64>,
    /// Stiffness K with K𝟏 = 0.
    pub stiffness: DMatrix<f64>,
    /// Full form matrix A_B = K + γᵀ W B_h γ.
    pub a_b: DMatrix<f64>,
    garding: OnceLock<(f64, f64)>,
}

/// Assemble the P1 problem. The coefficient is sampled at cell midpoints
/// (centroids in 2D); a sample below the declared ellipticity bound aborts
/// with the offending cell.
pub fn assemble(
    mesh: &Mesh,
    coefficient: CoefficientField,
    boundary: DiscreteBoundaryOperator,
) -> Result<AssembledProblem> {
    if boundary.n() != mesh.n_boundary() {
        return Err(Error::InvalidArgument(format!(
            "boundary operator has {} nodes but the mesh has {}",
            boundary.n(),
            mesh.n_boundary()
        )));
    }
    let n = mesh.n_vertices();
    let mut mass = DVector::zeros(n);
    let mut stiffness = DMatrix::zeros(n, n);

    for (ci, cell) in mesh.cells.iter().enumerate() {
        let mid: Vec<f64> = (0..mesh.dim)
            .map(|d| cell.iter().map(|&v| mesh.vertices[v][d]).sum::<f64>() / cell.len() as f64)
            .collect();
        let a = coefficient.eval(&mid);
        if a < coefficient.declared_alpha - 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "coefficient value {a} at the midpoint of cell {ci} violates the declared \
                 ellipticity bound {}",
                coefficient.declared_alpha
            )));
        }
        match mesh.dim {
            1 => {
                let (i, j) = (cell[0], cell[1]);
                let h = (mesh.vertices[j][0] - mesh.vertices[i][0]).abs();
                if h <= 0.0 {
                    return Err(Error::InvalidArgument(format!("cell {ci} has zero length")));
                }
                mass[i] += h / 2.0;
                mass[j] += h / 2.0;
                let k = a / h;
                stiffness[(i, i)] += k;
                stiffness[(j, j)] += k;
                stiffness[(i, j)] -= k;
                stiffness[(j, i)] -= k;
            }
            2 => {
                let p: Vec<&Vec<f64>> = cell.iter().map(|&v| &mesh.vertices[v]).collect();
                let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
                if det <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "cell {ci} is degenerate or misoriented"
                    )));
                }
                let area = det / 2.0;
                // Barycentric gradients: ∇λ_i = (b_i, c_i)/(2·area) with the
                // standard cyclic edge differences.
                let mut b = [0.0; 3];
                let mut c = [0.0; 3];
                for i in 0..3 {
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    b[i] = p[j][1] - p[k][1];
                    c[i] = p[k][0] - p[j][0];
                }
                for i in 0..3 {
                    mass[cell[i]] += area / 3.0;
                    for j in 0..3 {
                        stiffness[(cell[i], cell[j])] +=
                            a * (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
                    }
                }
            }
            d => return Err(Error::InvalidArgument(format!("unsupported dimension {d}"))),
        }
    }

    let mut a_b = stiffness.clone();
    for (bi, &vi) in mesh.boundary_nodes.iter().enumerate() {
        for (bj, &vj) in mesh.boundary_nodes.iter().enumerate() {
            a_b[(vi, vj)] += boundary.weights[bi] * boundary.matrix[(bi, bj)];
        }
    }

    Ok(AssembledProblem {
        mesh: mesh.clone(),
        coefficient,
        boundary,
        mass,
        stiffness,
        a_b,
        garding: OnceLock::new(),
    })
}

/// Outcome of the locality probe: the first disjoint-support pair on which
/// the form does not vanish, if any.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalityReport {
    pub is_local: bool,
    /// (i, j, a_B[φ_i, φ_j]) for the witnessing vertex pair.
    pub witness: Option<(usize, usize, f64)>,
}

impl AssembledProblem {
    pub fn n(&self) -> usize {
        self.mass.len()
    }

    /// Boundary-node selector γ as an m×n matrix.
    pub fn trace_matrix(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.mesh.n_boundary(), self.n());
        for (bi, &vi) in self.mesh.boundary_nodes.iter().enumerate() {
            g[(bi, vi)] = 1.0;
        }
        g
    }

    /// −M⁻¹ A_B, the generator of the discrete semigroup.
    pub fn generator(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut g = self.a_b.clone();
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] /= -self.mass[i];
            }
        }
        g
    }

    /// ⟨u, v⟩_M = Σ mᵢ uᵢ vᵢ, the discrete L²(Ω) inner product.
    pub fn m_inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.iter()
            .zip(v.iter())
            .zip(self.mass.iter())
            .map(|((a, b), m)| m * a * b)
            .sum()
    }

    pub fn m_norm(&self, u: &DVector<f64>) -> f64 {
        self.m_inner(u, u).max(0.0).sqrt()
    }

    /// Total volume |Ω| of the discretized domain.
    pub fn volume(&self) -> f64 {
        self.mass.sum()
    }

    /// The Gårding pair (c, ω): c = α/2 and the smallest ω ≥ 0 (to 1e−6)
    /// with sym(A_B) + ωM − cK ⪰ −1e−10. Cached after the first call.
    pub fn garding_constants(&self) -> (f64, f64) {
        *self.garding.get_or_init(|| {
            let c = self.coefficient.declared_alpha / 2.0;
            let base = (&self.a_b + self.a_b.transpose()) * 0.5 - &self.stiffness * c;
            let scale = 1.0 + base.abs().max();
            let psd = |omega: f64| -> bool {
                let mut g = base.clone();
                for i in 0..self.n() {
                    g[(i, i)] += omega * self.mass[i] + 1e-10 * scale;
                }
                // Cholesky succeeds exactly on (semi)definite matrices; the
                // diagonal shift implements the −1e−10·scale allowance.
                g.cholesky().is_some()
            };
            if psd(0.0) {
                return (c, 0.0);
            }
            let mut hi = 1.0;
            while !psd(hi) {
                hi *= 2.0;
                if hi > 1e12 {
                    // Unreachable for bounded B_h; surface a huge ω rather
                    // than looping forever.
                    return (c, hi);
                }
            }
            let mut lo = 0.0;
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                if psd(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (c, hi)
        })
    }

    /// Smallest eigenvalue of sym(A_B) + ωM − cK for the stored pair: the
    /// numeric certificate behind [`Self::garding_constants`].
    pub fn garding_certificate(&self) -> f64 {
        let (c, omega) = self.garding_constants();
        let mut g = (&self.a_b + self.a_b.transpose()) * 0.5 - &self.stiffness * c;
        for i in 0..self.n() {
            g[(i, i)] += omega * self.mass[i];
        }
        let (eigs, _) = linalg::sym_eigen(&g);
        eigs[0]
    }

    /// Probe form locality: a_B[φ_i, φ_j] over vertex pairs whose hat
    /// functions have disjoint supports (no shared cell). A nonzero value is
    /// exactly the non-locality the boundary operator introduces.
    pub fn check_locality(&self) -> LocalityReport {
        let n = self.n();
        let mut adjacent = vec![false; n * n];
        for cell in &self.mesh.cells {
            for &i in cell {
                for &j in cell {
                    adjacent[i * n + j] = true;
                }
            }
        }
        let scale = 1.0 + self.a_b.abs().max();
        for i in 0..n {
            for j in 0..n {
                if !adjacent[i * n + j] {
                    let value = self.a_b[(j, i)];
                    if value.abs() > 1e-12 * scale {
                        return LocalityReport {
                            is_local: false,
                            witness: Some((i, j, value)),
                        };
                    }
                }
            }
        }
        LocalityReport {
            is_local: true,
            witness: None,
        }
    }

    /// Matrix rows in coordinate text format: one `i j value` line per
    /// structurally nonzero entry of A_B.
    pub fn coo_lines(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n() {
            for j in 0..self.n() {
                let v = self.a_b[(i, j)];
                if v != 0.0 {
                    out.push_str(&format!("{i} {j} {v:.17e}\n"));
                }
            }
        }
        out
    }
}
