//! Finite symmetry groups acting on meshes: verified permutation actions,
//! M-orthogonal symmetric projections, equivariance defects, and the
//! smallness threshold under which the leading eigenfunction inherits the
//! symmetry of the problem.
//!
//! Nothing here is assumed: a requested group action is rebuilt from index
//! arithmetic and then checked against the actual vertex coordinates, the
//! group axioms, and invariance of mass and stiffness. Meshes that do not
//! support the requested group (wrong divisor, reflection against the
//! diagonal orientation of the triangulation) are refused with the first
//! offending vertex or cell named.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::assembly::AssembledProblem;
use crate::error::{Error, Result};
use crate::geometry::{Mesh, SymmetryTag};
use crate::linalg;
use crate::spectral::leading_mode;

/// The symmetry groups the laboratory understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupKind {
    /// x ↦ −x on a symmetric interval.
    Reflection1D,
    /// Rotations by multiples of 2π/k on the disk.
    CyclicRotation(usize),
    /// Rotations and reflections on the disk. Refused for this mesh family:
    /// the consistent diagonal orientation of the triangulation is chiral.
    DihedralOnDisk(usize),
}

/// A verified group action: one vertex permutation and one boundary-node
/// permutation per group element, the identity first.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub kind: GroupKind,
    pub vertex_perms: Vec<Vec<usize>>,
    pub boundary_perms: Vec<Vec<usize>>,
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(i) = a[b[i]].
    b.iter().map(|&i| a[i]).collect()
}

fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &j)| i == j)
}

/// Check that `perm` maps each vertex onto the vertex at `map(position)`,
/// naming the first vertex that fails.
fn verify_coordinates(
    mesh: &Mesh,
    perm: &[usize],
    map: &dyn Fn(&[f64]) -> Vec<f64>,
    label: &str,
) -> Result<()> {
    let diam = 2.0 * mesh.max_cell_diameter().max(1.0);
    for (v, pos) in mesh.vertices.iter().enumerate() {
        let image = map(pos);
        let target = &mesh.vertices[perm[v]];
        let err: f64 = image
            .iter()
            .zip(target.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if err > 1e-10 * diam {
            return Err(Error::InvalidArgument(format!(
                "{label} maps vertex {v} at {pos:?} to {image:?}, which is not the mesh \
                 vertex {} at {target:?}",
                perm[v]
            )));
        }
    }
    Ok(())
}

/// Build and verify the permutation action of `kind` on `mesh`: coordinates
/// match, cells map to cells, the permutations form a group, and the
/// boundary permutations are the trace of the vertex ones.
pub fn build_group_action(mesh: &Mesh, kind: GroupKind) -> Result<GroupAction> {
    let n = mesh.n_vertices();
    let m = mesh.n_boundary();
    let (vertex_perms, boundary_perms): (Vec<Vec<usize>>, Vec<Vec<usize>>) = match kind {
        GroupKind::Reflection1D => {
            if mesh.dim != 1 {
                return Err(Error::InvalidArgument(
                    "the reflection group acts on interval meshes".into(),
                ));
            }
            if mesh.symmetry_tag != Some(SymmetryTag::Reflection1D) {
                return Err(Error::InvalidArgument(
                    "the interval is not symmetric about the origin; \
                     no reflection action exists"
                        .into(),
                ));
            }
            let refl: Vec<usize> = (0..n).map(|i| n - 1 - i).collect();
            verify_coordinates(mesh, &refl, &|p| vec![-p[0]], "reflection")?;
            (vec![(0..n).collect(), refl], vec![vec![0, 1], vec![1, 0]])
        }
        GroupKind::CyclicRotation(k) => {
            if mesh.dim != 2 {
                return Err(Error::InvalidArgument(
                    "cyclic rotations act on disk meshes".into(),
                ));
            }
            if k == 0 {
                return Err(Error::InvalidArgument(
                    "the trivial group order 0 is not a group".into(),
                ));
            }
            let sectors = match mesh.symmetry_tag {
                Some(SymmetryTag::Cyclic(s)) => s,
                _ => {
                    return Err(Error::InvalidArgument(
                        "the mesh carries no rotational structure".into(),
                    ))
                }
            };
            if sectors % k != 0 {
                let theta0 = mesh.boundary_angle(0)?;
                let image = theta0 + 2.0 * std::f64::consts::PI / k as f64;
                return Err(Error::InvalidArgument(format!(
                    "rotation by 2π/{k} maps the boundary vertex at angle {theta0:.6} to \
                     angle {image:.6}, which is not a mesh vertex: {k} does not divide \
                     the {sectors} sectors"
                )));
            }
            let shift = sectors / k;
            let rings = (n - 1) / sectors;
            let idx = |ring: usize, i: usize| 1 + (ring - 1) * sectors + (i % sectors);
            let mut vps = Vec::with_capacity(k);
            let mut bps = Vec::with_capacity(k);
            for g in 0..k {
                let s = g * shift;
                let mut perm = vec![0usize; n];
                for ring in 1..=rings {
                    for i in 0..sectors {
                        perm[idx(ring, i)] = idx(ring, i + s);
                    }
                }
                let phi = 2.0 * std::f64::consts::PI * s as f64 / sectors as f64;
                let (sin, cos) = phi.sin_cos();
                verify_coordinates(
                    mesh,
                    &perm,
                    &move |p| vec![cos * p[0] - sin * p[1], sin * p[0] + cos * p[1]],
                    &format!("rotation by {g}·2π/{k}"),
                )?;
                vps.push(perm);
                bps.push((0..m).map(|b| (b + s) % m).collect());
            }
            (vps, bps)
        }
        GroupKind::DihedralOnDisk(_) => {
            if mesh.dim != 2 {
                return Err(Error::InvalidArgument(
                    "the dihedral group acts on disk meshes".into(),
                ));
            }
            // The reflection θ ↦ −θ maps vertices to vertices, but every
            // cell's diagonal runs from ring r sector i to ring r+1 sector
            // i+1; the image diagonal runs backwards. Find the first such
            // cell and refuse honestly.
            let sectors = match mesh.symmetry_tag {
                Some(SymmetryTag::Cyclic(s)) => s,
                _ => {
                    return Err(Error::InvalidArgument(
                        "the mesh carries no rotational structure".into(),
                    ))
                }
            };
            let n_v = mesh.n_vertices();
            let idx = |ring: usize, i: usize| 1 + (ring - 1) * sectors + (i % sectors);
            let refl = |v: usize| -> usize {
                if v == 0 {
                    0
                } else {
                    let ring = (v - 1) / sectors + 1;
                    let i = (v - 1) % sectors;
                    idx(ring, sectors - i)
                }
            };
            let perm: Vec<usize> = (0..n_v).map(refl).collect();
            let cell_set: std::collections::BTreeSet<Vec<usize>> = mesh
                .cells
                .iter()
                .map(|c| {
                    let mut s = c.clone();
                    s.sort_unstable();
                    s
                })
                .collect();
            for (ci, cell) in mesh.cells.iter().enumerate() {
                let mut image: Vec<usize> = cell.iter().map(|&v| perm[v]).collect();
                image.sort_unstable();
                if !cell_set.contains(&image) {
                    return Err(Error::InvalidArgument(format!(
                        "the reflection θ ↦ −θ sends cell {ci} {cell:?} to vertex set \
                         {image:?}, which is not a cell: the triangulation's diagonal \
                         orientation is chiral, so only the cyclic subgroup acts; \
                         request a rotation group instead"
                    )));
                }
            }
            unreachable!("the consistent-diagonal triangulation is never reflection symmetric");
        }
    };

    // Cells map to cells under every element.
    let cell_set: std::collections::BTreeSet<Vec<usize>> = mesh
        .cells
        .iter()
        .map(|c| {
            let mut s = c.clone();
            s.sort_unstable();
            s
        })
        .collect();
    for (g, perm) in vertex_perms.iter().enumerate() {
        for (ci, cell) in mesh.cells.iter().enumerate() {
            let mut image: Vec<usize> = cell.iter().map(|&v| perm[v]).collect();
            image.sort_unstable();
            if !cell_set.contains(&image) {
                return Err(Error::InvalidArgument(format!(
                    "group element {g} sends cell {ci} to a vertex set that is not a cell"
                )));
            }
        }
    }
    // Group axioms: identity first, closure, inverses.
    if !is_identity(&vertex_perms[0]) {
        return Err(Error::InvalidArgument(
            "the first group element must be the identity".into(),
        ));
    }
    let perm_set: std::collections::BTreeSet<Vec<usize>> = vertex_perms.iter().cloned().collect();
    for a in &vertex_perms {
        for b in &vertex_perms {
            if !perm_set.contains(&compose(a, b)) {
                return Err(Error::InvalidArgument(
                    "the permutations are not closed".into(),
                ));
            }
        }
        if !vertex_perms.iter().any(|b| is_identity(&compose(a, b))) {
            return Err(Error::InvalidArgument(
                "a group element has no inverse".into(),
            ));
        }
    }
    // Boundary permutations are the trace of the vertex ones.
    for (vp, bp) in vertex_perms.iter().zip(&boundary_perms) {
        for (b, &v) in mesh.boundary_nodes.iter().enumerate() {
            if vp[v] != mesh.boundary_nodes[bp[b]] {
                return Err(Error::InvalidArgument(format!(
                    "boundary permutation disagrees with the vertex permutation at \
                     boundary node {b}"
                )));
            }
        }
    }
    Ok(GroupAction {
        kind,
        vertex_perms,
        boundary_perms,
    })
}

impl GroupAction {
    pub fn order(&self) -> usize {
        self.vertex_perms.len()
    }

    /// Check T_gᵀ M T_g = M and T_gᵀ K T_g = K entrywise through the
    /// permutations; returns the worst relative defect.
    pub fn invariance_defect(&self, problem: &AssembledProblem) -> f64 {
        let n = problem.n();
        let k_scale = 1.0 + problem.stiffness.abs().max();
        let m_scale = 1.0 + problem.mass.max();
        let mut worst: f64 = 0.0;
        for perm in &self.vertex_perms {
            for i in 0..n {
                worst = worst.max((problem.mass[perm[i]] - problem.mass[i]).abs() / m_scale);
                for j in 0..n {
                    let d = problem.stiffness[(perm[i], perm[j])] - problem.stiffness[(i, j)];
                    worst = worst.max(d.abs() / k_scale);
                }
            }
        }
        worst
    }

    /// Worst commutation defect max_g ‖op T_g − T_g op‖_max / ‖op‖_max for
    /// an operator in vertex space.
    pub fn equivariance_defect(&self, op: &DMatrix<f64>) -> f64 {
        permutation_commutator(op, &self.vertex_perms)
    }

    /// Same, for an operator on boundary nodes.
    pub fn boundary_equivariance_defect(&self, op: &DMatrix<f64>) -> f64 {
        permutation_commutator(op, &self.boundary_perms)
    }
}

fn permutation_commutator(op: &DMatrix<f64>, perms: &[Vec<usize>]) -> f64 {
    let n = op.nrows();
    let scale = 1.0 + op.abs().max();
    let mut worst: f64 = 0.0;
    for perm in perms {
        let mut inv = vec![0usize; n];
        for (i, &pi) in perm.iter().enumerate() {
            inv[pi] = i;
        }
        // (op T_g)_{ij} = op_{i, perm(j)} and (T_g op)_{ij} = op_{perm⁻¹(i), j}.
        for i in 0..n {
            for j in 0..n {
                let d = op[(i, perm[j])] - op[(inv[i], j)];
                worst = worst.max(d.abs());
            }
        }
    }
    worst / scale
}

/// The averaged projections onto the symmetric subspace, in vertex space
/// (P) and on the boundary (Q).
#[derive(Debug, Clone)]
pub struct SymmetricProjection {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

/// P = |G|⁻¹ Σ_g T_g and its boundary counterpart, verified to be an
/// M-orthogonal projection that fixes constants and intertwines the trace.
pub fn symmetric_projection(
    action: &GroupAction,
    problem: &AssembledProblem,
) -> Result<SymmetricProjection> {
    let n = problem.n();
    let m = problem.boundary.n();
    let order = action.order() as f64;
    let mut p: DMatrix<f64> = DMatrix::zeros(n, n);
    for perm in &action.vertex_perms {
        for j in 0..n {
            p[(perm[j], j)] += 1.0 / order;
        }
    }
    let mut q: DMatrix<f64> = DMatrix::zeros(m, m);
    for perm in &action.boundary_perms {
        for j in 0..m {
            q[(perm[j], j)] += 1.0 / order;
        }
    }
    let idem = (&p * &p - &p).abs().max();
    if idem > 1e-12 {
        return Err(Error::Numerical(format!(
            "projection is not idempotent: {idem:.3e}"
        )));
    }
    let mut adj: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            adj = adj.max((problem.mass[i] * p[(i, j)] - problem.mass[j] * p[(j, i)]).abs());
        }
    }
    if adj > 1e-12 * (1.0 + problem.mass.max()) {
        return Err(Error::Numerical(format!(
            "projection is not self-adjoint in the mass inner product: {adj:.3e}"
        )));
    }
    let ones = DVector::from_element(n, 1.0);
    if (&p * &ones - &ones).abs().max() > 1e-12 {
        return Err(Error::Numerical("projection does not fix constants".into()));
    }
    // γP = Qγ entrywise: P restricted to boundary rows/columns equals Q on
    // boundary nodes and vanishes on interior columns of boundary rows.
    for (bi, &vi) in problem.mesh.boundary_nodes.iter().enumerate() {
        for j in 0..n {
            let lhs = p[(vi, j)];
            let rhs = problem
                .mesh
                .boundary_nodes
                .iter()
                .position(|&v| v == j)
                .map_or(0.0, |bj| q[(bi, bj)]);
            if (lhs - rhs).abs() > 1e-12 {
                return Err(Error::Numerical(
                    "trace does not intertwine the bulk and boundary projections".into(),
                ));
            }
        }
    }
    Ok(SymmetricProjection { p, q })
}

/// Verdict of the scalar-coefficient argument: averaging a symmetric 2×2
/// matrix over a cyclic rotation group of order ≥ 3 leaves only multiples
/// of the identity, while the skew generator J survives averaging, so an
/// equivariant symmetric diffusion coefficient is necessarily scalar, and
/// the restriction to a(x)·I loses nothing.
#[derive(Debug, Clone, Serialize)]
pub enum CommutantCheck {
    NotApplicable {
        reason: String,
    },
    Verified {
        /// Worst deviation of averaged random symmetric matrices from λI.
        symmetric_defect: f64,
        /// ‖averaged J − (tr/2)I‖, which stays at 1: the commutant is not
        /// trivial, only its symmetric part is.
        skew_survival: f64,
    },
}

/// Average symmetric matrices (and J) over the rotation group of order k.
pub fn scalar_commutant_check(k: usize, trials: usize) -> Result<CommutantCheck> {
    if k < 3 {
        return Ok(CommutantCheck::NotApplicable {
            reason: format!(
                "rotation by π is central, so order {k} constrains nothing beyond symmetry"
            ),
        });
    }
    let average = |s: &DMatrix<f64>| -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(2, 2);
        for g in 0..k {
            let phi = 2.0 * std::f64::consts::PI * g as f64 / k as f64;
            let (sin, cos) = phi.sin_cos();
            let r = DMatrix::from_row_slice(2, 2, &[cos, -sin, sin, cos]);
            acc += &r * s * r.transpose();
        }
        acc / k as f64
    };
    let mut symmetric_defect: f64 = 0.0;
    for t in 0..trials.max(1) {
        // Deterministic spread of symmetric test matrices.
        let (a, b, c) = (
            (t as f64 * 0.713).sin(),
            (t as f64 * 1.37).cos(),
            (t as f64 * 0.29).sin(),
        );
        let s = DMatrix::from_row_slice(2, 2, &[1.0 + a, b, b, 1.0 + c]);
        let avg = average(&s);
        let lambda = (avg[(0, 0)] + avg[(1, 1)]) / 2.0;
        let d = (&avg - DMatrix::from_diagonal_element(2, 2, lambda))
            .abs()
            .max();
        symmetric_defect = symmetric_defect.max(d);
    }
    let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let avg_j = average(&j);
    let skew_survival = (&avg_j - DMatrix::from_diagonal_element(2, 2, 0.0))
        .abs()
        .max();
    Ok(CommutantCheck::Verified {
        symmetric_defect,
        skew_survival,
    })
}

/// The pieces of the smallness threshold β = α / ((c₀ + 1)·c₁).
#[derive(Debug, Clone, Serialize)]
pub struct BetaBreakdown {
    /// 1/λ_min of the Neumann form on the non-symmetric subspace: the
    /// Poincaré constant transverse to the symmetry.
    pub c0: f64,
    /// λ_max of the boundary mass against M + K: the trace constant.
    pub c1: f64,
    pub beta: f64,
}

/// Compute the threshold under which boundary perturbations cannot push the
/// leading eigenfunction out of the symmetric subspace.
pub fn beta_constant(problem: &AssembledProblem, action: &GroupAction) -> Result<BetaBreakdown> {
    let proj = symmetric_projection(action, problem)?;
    let n = problem.n();
    let sqrt_m: Vec<f64> = problem.mass.iter().map(|&x| x.sqrt()).collect();
    // Orthonormal basis of the non-symmetric subspace: eigenvectors of the
    // symmetrized projector with eigenvalue 0.
    let mut p_hat = proj.p.clone();
    for i in 0..n {
        for j in 0..n {
            p_hat[(i, j)] *= sqrt_m[i] / sqrt_m[j];
        }
    }
    let (pvals, pvecs) = linalg::sym_eigen(&p_hat);
    let kernel: Vec<usize> = (0..n).filter(|&i| pvals[i] < 0.5).collect();
    if kernel.is_empty() {
        return Err(Error::InvalidArgument(
            "the group acts trivially: every function is symmetric and no \
             transverse Poincaré constant exists"
                .into(),
        ));
    }
    let r = kernel.len();
    let mut z = DMatrix::zeros(n, r);
    for (col, &i) in kernel.iter().enumerate() {
        z.set_column(col, &pvecs.column(i));
    }
    let mut k_hat = problem.stiffness.clone();
    for i in 0..n {
        for j in 0..n {
            k_hat[(i, j)] /= sqrt_m[i] * sqrt_m[j];
        }
    }
    let restricted = z.transpose() * &k_hat * &z;
    let (kvals, _) = linalg::sym_eigen(&restricted);
    if kvals[0] <= 0.0 {
        return Err(Error::Numerical(format!(
            "transverse Neumann eigenvalue {:.3e} is not positive; the projector \
             kernel still contains near-constants",
            kvals[0]
        )));
    }
    let c0 = 1.0 / kvals[0];

    // c₁: boundary mass form against the full H¹ form M + K.
    let mut boundary_mass = DMatrix::zeros(n, n);
    for (bi, &vi) in problem.mesh.boundary_nodes.iter().enumerate() {
        boundary_mass[(vi, vi)] = problem.boundary.weights[bi];
    }
    let mut h1 = problem.stiffness.clone();
    for i in 0..n {
        h1[(i, i)] += problem.mass[i];
    }
    let (tvals, _) = linalg::sym_generalized_eigen_spd(&boundary_mass, &h1)?;
    let c1 = tvals[n - 1];
    let alpha = problem.coefficient.declared_alpha;
    Ok(BetaBreakdown {
        c0,
        c1,
        beta: alpha / ((c0 + 1.0) * c1),
    })
}

/// Outcome of the invariant-leading-mode verification.
#[derive(Debug, Clone, Serialize)]
pub enum InvariantModeOutcome {
    /// A hypothesis fails; the theorem says nothing here.
    NotApplicable {
        failed_hypothesis: String,
    },
    Verified(InvariantModeReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantModeReport {
    pub spectral_bound: f64,
    pub beta: f64,
    /// Norm of the boundary operator restricted to mean-zero data.
    pub restricted_norm: f64,
    /// ‖(I − P)u‖_{L²} of the leading eigenfunction.
    pub asymmetry: f64,
}

/// Check the hypotheses of the symmetric-ground-state statement one by one
/// (self-adjointness, equivariance, negativity on constants, smallness of
/// the mean-zero part), and when they all hold verify the conclusion: the
/// spectral bound is positive and the leading eigenfunction is invariant.
pub fn verify_invariant_leading_eigenfunction(
    problem: &AssembledProblem,
    action: &GroupAction,
) -> Result<InvariantModeOutcome> {
    let b = &problem.boundary;
    if !b.is_weighted_self_adjoint(1e-10) {
        return Ok(InvariantModeOutcome::NotApplicable {
            failed_hypothesis: "the boundary operator is not self-adjoint on L²(∂Ω)".into(),
        });
    }
    let eq_defect = action.boundary_equivariance_defect(&b.matrix);
    if eq_defect > 1e-10 {
        return Ok(InvariantModeOutcome::NotApplicable {
            failed_hypothesis: format!(
                "the boundary operator is not equivariant (defect {eq_defect:.3e})"
            ),
        });
    }
    let ones = DVector::from_element(b.n(), 1.0);
    let on_constants = b.weighted_inner(&b.apply(&ones), &ones);
    if on_constants >= 0.0 {
        return Ok(InvariantModeOutcome::NotApplicable {
            failed_hypothesis: format!(
                "⟨B𝟏, 𝟏⟩ = {on_constants:.6e} is not negative; nothing forces growth"
            ),
        });
    }
    let breakdown = beta_constant(problem, action)?;
    let restricted_norm = b.weighted_norms().l2_on_mean_zero;
    if restricted_norm > breakdown.beta {
        return Ok(InvariantModeOutcome::NotApplicable {
            failed_hypothesis: format!(
                "the mean-zero part of B has norm {restricted_norm:.6} above the \
                 threshold β = {:.6}",
                breakdown.beta
            ),
        });
    }
    // Hypotheses hold: the conclusion must too.
    let (lambda, u) = leading_mode(problem)?;
    let spectral_bound = -lambda;
    if spectral_bound <= 0.0 {
        return Err(Error::Verification(format!(
            "hypotheses hold but the spectral bound {spectral_bound:.6e} is not positive"
        )));
    }
    let proj = symmetric_projection(action, problem)?;
    let asym_vec = &u - &proj.p * &u;
    let asymmetry = problem.m_norm(&asym_vec);
    if asymmetry > 1e-6 {
        return Err(Error::Verification(format!(
            "hypotheses hold but the leading eigenfunction has asymmetry {asymmetry:.3e}"
        )));
    }
    Ok(InvariantModeOutcome::Verified(InvariantModeReport {
        spectral_bound,
        beta: breakdown.beta,
        restricted_norm,
        asymmetry,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, CoefficientField, CoefficientSpec};
    use crate::boundary::{discretize, BoundaryFn, BoundaryOperatorSpec};
    use crate::geometry::{build_disk_mesh, build_interval_mesh};
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn interval_problem(n: usize, spec: &BoundaryOperatorSpec) -> AssembledProblem {
        let mesh = build_interval_mesh(-1.0, 1.0, n).unwrap();
        let op = discretize(spec, &mesh).unwrap();
        assemble(
            &mesh,
            CoefficientField::new(CoefficientSpec::Constant(1.0)).unwrap(),
            op,
        )
        .unwrap()
    }

    fn disk_problem(n_r: usize, n_theta: usize, spec: &BoundaryOperatorSpec) -> AssembledProblem {
        let mesh = build_disk_mesh(n_r, n_theta).unwrap();
        let op = discretize(spec, &mesh).unwrap();
        assemble(
            &mesh,
            CoefficientField::new(CoefficientSpec::Constant(1.0)).unwrap(),
            op,
        )
        .unwrap()
    }

    fn coupling(b: f64) -> BoundaryOperatorSpec {
        BoundaryOperatorSpec::ExplicitMatrix {
            entries: vec![vec![-2.0 * b, b], vec![b, -2.0 * b]],
        }
    }

    #[test]
    fn reflection_action_is_verified_and_invariant() {
        let p = interval_problem(30, &BoundaryOperatorSpec::Zero);
        let action = build_group_action(&p.mesh, GroupKind::Reflection1D).unwrap();
        assert_eq!(action.order(), 2);
        assert!(action.invariance_defect(&p) <= 1e-12);

        let off_center = build_interval_mesh(0.0, 1.0, 10).unwrap();
        assert!(build_group_action(&off_center, GroupKind::Reflection1D).is_err());
    }

    #[test]
    fn cyclic_actions_require_a_divisor_of_the_sectors() {
        let p = disk_problem(3, 16, &BoundaryOperatorSpec::Zero);
        for k in [2usize, 4, 8, 16] {
            let action = build_group_action(&p.mesh, GroupKind::CyclicRotation(k)).unwrap();
            assert_eq!(action.order(), k);
            assert!(action.invariance_defect(&p) <= 1e-10);
        }
        let mesh = build_disk_mesh(4, 16).unwrap();
        let err = build_group_action(&mesh, GroupKind::CyclicRotation(5)).unwrap_err();
        assert!(err.to_string().contains("does not divide"));
    }

    #[test]
    fn dihedral_reflections_are_refused_with_the_offending_cell() {
        let mesh = build_disk_mesh(2, 16).unwrap();
        let err = build_group_action(&mesh, GroupKind::DihedralOnDisk(4)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("chiral") && msg.contains("cell"));
    }

    #[test]
    fn projection_is_an_m_orthogonal_projection_fixing_constants() {
        let p = disk_problem(2, 16, &BoundaryOperatorSpec::Zero);
        let action = build_group_action(&p.mesh, GroupKind::CyclicRotation(16)).unwrap();
        let proj = symmetric_projection(&action, &p).unwrap();
        // Range = radially symmetric functions: rank 1 + n_rings... on this
        // mesh: center and two rings, so rank 3.
        let rank = proj.p.trace().round() as usize;
        assert_eq!(rank, 3);
        // Trace orthogonality of the splitting.
        let u = DVector::from_fn(p.n(), |i, _| (i as f64 * 0.61).sin());
        let v = DVector::from_fn(p.n(), |i, _| (i as f64 * 1.13).cos());
        let pu = &proj.p * &u;
        let qv = &v - &proj.p * &v;
        assert!(p.m_inner(&pu, &qv).abs() <= 1e-12 * p.m_norm(&u) * p.m_norm(&v));
    }

    #[test]
    fn equivariance_defect_separates_isotropic_from_directional_operators() {
        let iso = disk_problem(
            2,
            16,
            &BoundaryOperatorSpec::Convolution {
                q_hat: BTreeMap::from([(0, -0.1), (2, 0.05)]),
            },
        );
        let action = build_group_action(&iso.mesh, GroupKind::CyclicRotation(16)).unwrap();
        assert!(action.boundary_equivariance_defect(&iso.boundary.matrix) <= 1e-12);
        assert!(action.equivariance_defect(&iso.a_b) <= 1e-10);

        let dir = disk_problem(
            2,
            16,
            &BoundaryOperatorSpec::RankOne {
                v: BoundaryFn::Cos(1),
            },
        );
        assert!(action.boundary_equivariance_defect(&dir.boundary.matrix) > 1e-3);
    }

    #[test]
    fn commutant_of_a_rotation_group_has_scalar_symmetric_part() {
        match scalar_commutant_check(3, 8).unwrap() {
            CommutantCheck::Verified {
                symmetric_defect,
                skew_survival,
            } => {
                assert!(symmetric_defect <= 1e-12);
                assert_relative_eq!(skew_survival, 1.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            scalar_commutant_check(2, 8).unwrap(),
            CommutantCheck::NotApplicable { .. }
        ));
    }

    #[test]
    fn transverse_poincare_constant_approaches_the_odd_neumann_mode() {
        let p = interval_problem(200, &BoundaryOperatorSpec::Zero);
        let action = build_group_action(&p.mesh, GroupKind::Reflection1D).unwrap();
        let breakdown = beta_constant(&p, &action).unwrap();
        // Smallest odd Neumann eigenvalue on (−1, 1) is (π/2)², so c₀ tends
        // to (2/π)².
        let continuum = (2.0 / std::f64::consts::PI).powi(2);
        assert!((breakdown.c0 - continuum).abs() / continuum <= 0.02);
        assert!(breakdown.c1 > 0.0 && breakdown.beta > 0.0);
    }

    #[test]
    fn small_coupling_gives_a_symmetric_ground_state_and_large_does_not_apply() {
        let p = interval_problem(120, &coupling(0.1));
        let action = build_group_action(&p.mesh, GroupKind::Reflection1D).unwrap();
        match verify_invariant_leading_eigenfunction(&p, &action).unwrap() {
            InvariantModeOutcome::Verified(r) => {
                assert!(r.spectral_bound > 0.05);
                assert!(r.restricted_norm <= r.beta);
                assert!(r.asymmetry <= 1e-6);
                // The mean-zero block of the coupling has norm 3b.
                assert_relative_eq!(r.restricted_norm, 0.3, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }

        // Triple the coupling: the mean-zero norm passes β and the theorem
        // has nothing to say, even though the conclusion may well persist.
        let p = interval_problem(120, &coupling(0.2));
        match verify_invariant_leading_eigenfunction(&p, &action).unwrap() {
            InvariantModeOutcome::NotApplicable { failed_hypothesis } => {
                assert!(failed_hypothesis.contains("threshold"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn isotropic_attraction_on_the_disk_has_a_rotation_invariant_ground_state() {
        let p = disk_problem(
            2,
            16,
            &BoundaryOperatorSpec::Convolution {
                q_hat: BTreeMap::from([(0, -0.1)]),
            },
        );
        let action = build_group_action(&p.mesh, GroupKind::CyclicRotation(16)).unwrap();
        match verify_invariant_leading_eigenfunction(&p, &action).unwrap() {
            InvariantModeOutcome::Verified(r) => {
                assert!(r.spectral_bound > 0.1);
                assert!(r.restricted_norm <= 1e-10);
                assert!(r.asymmetry <= 1e-8);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn skew_boundary_operators_are_excluded_by_the_first_hypothesis() {
        let p = disk_problem(
            2,
            16,
            &BoundaryOperatorSpec::RotationCommutator {
                angle: std::f64::consts::FRAC_PI_2,
            },
        );
        let action = build_group_action(&p.mesh, GroupKind::CyclicRotation(16)).unwrap();
        match verify_invariant_leading_eigenfunction(&p, &action).unwrap() {
            InvariantModeOutcome::NotApplicable { failed_hypothesis } => {
                assert!(failed_hypothesis.contains("self-adjoint"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
