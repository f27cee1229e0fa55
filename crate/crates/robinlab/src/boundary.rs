//! The boundary operator catalogue and its nodal discretization.
//!
//! A boundary operator B acts on L²(∂Ω) with the discrete measure carried by
//! the mesh: ⟨f, g⟩_∂Ω = Σᵢ wᵢ fᵢ gᵢ. Operators are described symbolically by
//! [`BoundaryOperatorSpec`] and discretized to an m×m nodal matrix `B_h`
//! together with the weight vector, packaged as [`DiscreteBoundaryOperator`].
//!
//! Discretization conventions, chosen so that the discrete form
//! 𝔟[f, g] = ⟨B_h f, g⟩_∂Ω is a consistent quadrature of ∫(Bf)ḡ dσ:
//! - integral operators carry the measure as a right weighting
//!   (`B_h[i][j] = k(xᵢ, xⱼ)·wⱼ`),
//! - the adjoint is taken in the weighted metric: B* = W⁻¹ B_hᵀ W,
//! - the convolution variant is defined through its Fourier multipliers
//!   (B e_k = q_k e_k), which reproduces ⟨B𝟏, 𝟏⟩ = 2π q₀ exactly.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::linalg;

/// Scalar function on the boundary, evaluated at boundary nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFn {
    Constant(f64),
    /// cos(kθ) in the boundary angle; disk meshes only.
    Cos(usize),
    /// sin(kθ) in the boundary angle; disk meshes only.
    Sin(usize),
    /// Explicit nodal values, one per boundary node.
    Values(Vec<f64>),
}

impl BoundaryFn {
    /// Nodal values of the function in boundary-node order.
    pub fn eval_on(&self, mesh: &Mesh) -> Result<DVector<f64>> {
        let m = mesh.n_boundary();
        match self {
            BoundaryFn::Constant(c) => {
                if !c.is_finite() {
                    return Err(Error::InvalidArgument(
                        "boundary function must be bounded".into(),
                    ));
                }
                Ok(DVector::from_element(m, *c))
            }
            BoundaryFn::Cos(k) => {
                let mut v = DVector::zeros(m);
                for i in 0..m {
                    v[i] = (*k as f64 * mesh.boundary_angle(i)?).cos();
                }
                Ok(v)
            }
            BoundaryFn::Sin(k) => {
                let mut v = DVector::zeros(m);
                for i in 0..m {
                    v[i] = (*k as f64 * mesh.boundary_angle(i)?).sin();
                }
                Ok(v)
            }
            BoundaryFn::Values(vals) => {
                if vals.len() != m {
                    return Err(Error::InvalidArgument(format!(
                        "boundary function has {} values but the mesh has {m} boundary nodes",
                        vals.len()
                    )));
                }
                if vals.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "boundary function must be bounded".into(),
                    ));
                }
                Ok(DVector::from_column_slice(vals))
            }
        }
    }
}

/// Two-point kernel k(x, y) on ∂Ω × ∂Ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFn {
    Constant(f64),
    /// cos(θ_x − θ_y); disk meshes only.
    CosAngleDiff,
}

impl KernelFn {
    fn eval(&self, mesh: &Mesh, i: usize, j: usize) -> Result<f64> {
        match self {
            KernelFn::Constant(c) => {
                if !c.is_finite() {
                    return Err(Error::InvalidArgument("kernel must be bounded".into()));
                }
                Ok(*c)
            }
            KernelFn::CosAngleDiff => Ok((mesh.boundary_angle(i)? - mesh.boundary_angle(j)?).cos()),
        }
    }
}

/// Symbolic description of a boundary operator.
///
/// In JSON configs the variants appear externally tagged in snake case, e.g.
/// `"zero"`, `{"rank_one": {"v": {"cos": 1}}}`,
/// `{"convolution": {"q_hat": {"0": -0.1}}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryOperatorSpec {
    Zero,
    /// Bf = β·f for a bounded real β.
    Multiplication {
        beta: BoundaryFn,
    },
    /// (Bf)(x) = ∫ k(x, y) f(y) dσ(y).
    Kernel {
        kernel: KernelFn,
    },
    /// Bf = ⟨f, v⟩_∂Ω·v with a mean-zero profile v (so that B𝟏 = 0).
    RankOne {
        v: BoundaryFn,
    },
    /// Bf = f∘R_angle − f∘R_angle⁻¹ for the counterclockwise rotation
    /// R_angle; the angle must be a whole number of sectors.
    RotationCommutator {
        angle: f64,
    },
    /// Real circulant acting as q_k on the Fourier mode e^{ikθ}; modes not
    /// listed in `q_hat` get multiplier 0.
    Convolution {
        q_hat: BTreeMap<i64, f64>,
    },
    /// Raw m×m matrix on nodal boundary values.
    ExplicitMatrix {
        entries: Vec<Vec<f64>>,
    },
}

/// Boundary operator discretized on the mesh's boundary nodes.
#[derive(Debug, Clone)]
pub struct DiscreteBoundaryOperator {
    /// Nodal action: (Bf)ᵢ = Σⱼ matrix[(i, j)]·fⱼ.
    pub matrix: DMatrix<f64>,
    /// Boundary quadrature weights w (the diagonal of W).
    pub weights: DVector<f64>,
}

/// Operator norms of `B_h` in the weighted boundary metrics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightedNorms {
    /// L²(σ) operator norm.
    pub l2: f64,
    /// L¹(σ) operator norm.
    pub l1: f64,
    /// L∞ operator norm (max absolute row sum of the nodal matrix).
    pub linf: f64,
    /// L²(σ) norm of the restriction to {f : Σ wᵢfᵢ = 0}.
    pub l2_on_mean_zero: f64,
}

impl DiscreteBoundaryOperator {
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn apply(&self, f: &DVector<f64>) -> DVector<f64> {
        &self.matrix * f
    }

    /// ⟨f, g⟩_∂Ω = Σ wᵢ fᵢ gᵢ.
    pub fn weighted_inner(&self, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
        f.iter()
            .zip(g.iter())
            .zip(self.weights.iter())
            .map(|((a, b), w)| w * a * b)
            .sum()
    }

    /// The boundary form 𝔟[f, g] = ⟨B f, g⟩_∂Ω.
    pub fn form(&self, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
        let bf = self.apply(f);
        self.weighted_inner(&bf, g)
    }

    /// Adjoint in the weighted metric: W⁻¹ B_hᵀ W.
    pub fn weighted_adjoint(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut adj = self.matrix.transpose();
        for i in 0..n {
            for j in 0..n {
                adj[(i, j)] *= self.weights[j] / self.weights[i];
            }
        }
        adj
    }

    pub fn is_weighted_self_adjoint(&self, tol: f64) -> bool {
        let defect = (self.weighted_adjoint() - &self.matrix).abs().max();
        defect <= tol * (1.0 + self.matrix.abs().max())
    }

    /// The matrix W^{1/2} B_h W^{−1/2}: the same operator expressed on the
    /// measure-preserving (orthonormal) nodal basis of L²(σ).
    pub fn measure_preserving_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut c = self.matrix.clone();
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] *= (self.weights[i] / self.weights[j]).sqrt();
            }
        }
        c
    }

    /// Whether B + B* ⪰ 0 in the weighted metric, i.e. the symmetric part of
    /// W B_h is positive semidefinite; `margin` is its smallest eigenvalue.
    pub fn symmetric_part_bound(&self) -> f64 {
        let n = self.n();
        let mut wb = self.matrix.clone();
        for i in 0..n {
            for j in 0..n {
                wb[(i, j)] *= self.weights[i];
            }
        }
        let sym = (&wb + wb.transpose()) * 0.5;
        let (eigs, _) = linalg::sym_eigen(&sym);
        eigs[0]
    }

    pub fn is_accretive(&self, tol: f64) -> bool {
        self.symmetric_part_bound() >= -tol * (1.0 + self.matrix.abs().max())
    }

    /// Entrywise absolute value: the minimal positive operator S with
    /// |B f| ≤ S |f| componentwise.
    pub fn modulus(&self) -> DiscreteBoundaryOperator {
        DiscreteBoundaryOperator {
            matrix: self.matrix.abs(),
            weights: self.weights.clone(),
        }
    }

    pub fn weighted_norms(&self) -> WeightedNorms {
        let n = self.n();
        let c = self.measure_preserving_matrix();
        let l2 = linalg::spectral_norm(&c);

        let mut l1: f64 = 0.0;
        for j in 0..n {
            let col: f64 = (0..n)
                .map(|i| self.weights[i] * self.matrix[(i, j)].abs())
                .sum();
            l1 = l1.max(col / self.weights[j]);
        }

        let mut linf: f64 = 0.0;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.matrix[(i, j)].abs()).sum();
            linf = linf.max(row);
        }

        // Mean-zero f ⟺ W^{1/2}f ⊥ W^{1/2}𝟏, so restrict C to that
        // hyperplane by the rank-one orthogonal projector.
        let mut w_half = DVector::zeros(n);
        for i in 0..n {
            w_half[i] = self.weights[i].sqrt();
        }
        let w_hat = &w_half / w_half.norm();
        let proj = DMatrix::identity(n, n) - &w_hat * w_hat.transpose();
        let l2_on_mean_zero = linalg::spectral_norm(&(&c * proj));

        WeightedNorms {
            l2,
            l1,
            linf,
            l2_on_mean_zero,
        }
    }
}

/// Discretize a symbolic boundary operator on a mesh.
pub fn discretize(spec: &BoundaryOperatorSpec, mesh: &Mesh) -> Result<DiscreteBoundaryOperator> {
    let m = mesh.n_boundary();
    let weights = DVector::from_iterator(m, mesh.boundary_weights.iter().copied());
    let matrix = match spec {
        BoundaryOperatorSpec::Zero => DMatrix::zeros(m, m),
        BoundaryOperatorSpec::Multiplication { beta } => {
            DMatrix::from_diagonal(&beta.eval_on(mesh)?)
        }
        BoundaryOperatorSpec::Kernel { kernel } => {
            let mut b = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    b[(i, j)] = kernel.eval(mesh, i, j)? * weights[j];
                }
            }
            b
        }
        BoundaryOperatorSpec::RankOne { v } => {
            let vals = v.eval_on(mesh)?;
            let mean: f64 = (0..m).map(|i| weights[i] * vals[i]).sum();
            if mean.abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "rank-one profile must have zero boundary mean (so that B𝟏 = 0); \
                     got ∫v dσ = {mean:.3e}"
                )));
            }
            let mut b = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    b[(i, j)] = vals[i] * vals[j] * weights[j];
                }
            }
            b
        }
        BoundaryOperatorSpec::RotationCommutator { angle } => {
            if mesh.dim != 2 {
                return Err(Error::InvalidArgument(
                    "rotation operators need a disk mesh".into(),
                ));
            }
            if m % 4 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "rotation operators need n_theta divisible by 4 \
                     (the quarter turn must be a mesh symmetry), got {m}"
                )));
            }
            let sectors = angle * m as f64 / (2.0 * std::f64::consts::PI);
            let k = sectors.round();
            if (sectors - k).abs() > 1e-9 || !k.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "rotation angle {angle} is {sectors:.6} sectors; \
                     it must be a whole number of sectors of 2π/{m}"
                )));
            }
            let k = (k as i64).rem_euclid(m as i64) as usize;
            // (f∘R)(θᵢ) = f(θᵢ − angle) = f at node i−k; the commutator is
            // the difference of the two opposite shifts.
            let mut b = DMatrix::zeros(m, m);
            for i in 0..m {
                b[(i, (i + m - k) % m)] += 1.0;
                b[(i, (i + k) % m)] -= 1.0;
            }
            b
        }
        BoundaryOperatorSpec::Convolution { q_hat } => {
            if mesh.dim != 2 {
                return Err(Error::InvalidArgument(
                    "convolution operators need a disk mesh".into(),
                ));
            }
            build_convolution_matrix(q_hat, m)?
        }
        BoundaryOperatorSpec::ExplicitMatrix { entries } => {
            if entries.len() != m || entries.iter().any(|r| r.len() != m) {
                return Err(Error::InvalidArgument(format!(
                    "explicit boundary matrix must be {m}×{m} for this mesh"
                )));
            }
            if entries.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(
                    "boundary matrix entries must be finite".into(),
                ));
            }
            DMatrix::from_fn(m, m, |i, j| entries[i][j])
        }
    };
    Ok(DiscreteBoundaryOperator { matrix, weights })
}

/// Multiplier q_k for a mode, looking both signs up so that sparse maps can
/// give either; conflicting values for k and −k have no real circulant.
fn mode_multiplier(q_hat: &BTreeMap<i64, f64>, k: i64) -> Result<f64> {
    match (q_hat.get(&k), q_hat.get(&-k)) {
        (Some(a), Some(b)) if (a - b).abs() > 1e-14 * (1.0 + a.abs()) => {
            Err(Error::InvalidArgument(format!(
                "multipliers for modes ±{k} differ ({a} vs {b}); \
                 a real symmetric convolution kernel needs q_k = q_{{-k}}"
            )))
        }
        (Some(a), _) | (_, Some(a)) => Ok(*a),
        (None, None) => Ok(0.0),
    }
}

fn build_convolution_matrix(q_hat: &BTreeMap<i64, f64>, m: usize) -> Result<DMatrix<f64>> {
    let nyquist = (m / 2) as i64;
    for (&k, &q) in q_hat {
        if !q.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "multiplier for mode {k} must be finite"
            )));
        }
        if k.abs() > nyquist && q != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "mode {k} is beyond the mesh Nyquist mode ±{nyquist} and would alias; \
                 refine n_theta or drop the mode"
            )));
        }
    }
    // Sum of spectral projectors: q_k(c_k c_kᵀ + s_k s_kᵀ) over the real
    // Fourier basis of the uniform boundary grid. This is the real circulant
    // with eigenvalue q_k on e^{ikθ}.
    let mut b = DMatrix::zeros(m, m);
    let tau = 2.0 * std::f64::consts::PI / m as f64;
    for k in 0..=nyquist {
        let q = mode_multiplier(q_hat, k)?;
        if q == 0.0 {
            continue;
        }
        let scale = if k == 0 || k == nyquist {
            1.0 / m as f64
        } else {
            2.0 / m as f64
        };
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] += q * scale * (tau * k as f64 * (i as f64 - j as f64)).cos();
            }
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_disk_mesh, build_interval_mesh};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn disk_op(spec: &BoundaryOperatorSpec, n_theta: usize) -> DiscreteBoundaryOperator {
        let mesh = build_disk_mesh(2, n_theta).unwrap();
        discretize(spec, &mesh).unwrap()
    }

    #[test]
    fn zero_operator_is_the_zero_matrix() {
        let op = disk_op(&BoundaryOperatorSpec::Zero, 8);
        assert_eq!(op.matrix, DMatrix::zeros(8, 8));
        let norms = op.weighted_norms();
        assert_eq!(
            (norms.l2, norms.l1, norms.linf, norms.l2_on_mean_zero),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn constant_multiplication_has_matching_norms() {
        let spec = BoundaryOperatorSpec::Multiplication {
            beta: BoundaryFn::Constant(-2.5),
        };
        let op = disk_op(&spec, 16);
        let norms = op.weighted_norms();
        assert_relative_eq!(norms.l2, 2.5, epsilon = 1e-12);
        assert_relative_eq!(norms.l1, 2.5, epsilon = 1e-12);
        assert_relative_eq!(norms.linf, 2.5, epsilon = 1e-12);
        assert!(op.is_weighted_self_adjoint(1e-12));
    }

    #[test]
    fn rank_one_cosine_annihilates_constants() {
        let spec = BoundaryOperatorSpec::RankOne {
            v: BoundaryFn::Cos(1),
        };
        let op = disk_op(&spec, 16);
        let ones = DVector::from_element(16, 1.0);
        assert!(op.apply(&ones).abs().max() <= 1e-12);
        assert!(op.is_weighted_self_adjoint(1e-12));
    }

    #[test]
    fn rank_one_with_nonzero_mean_is_rejected() {
        let mesh = build_disk_mesh(2, 16).unwrap();
        let spec = BoundaryOperatorSpec::RankOne {
            v: BoundaryFn::Constant(1.0),
        };
        let err = discretize(&spec, &mesh).unwrap_err();
        assert!(err.to_string().contains("zero boundary mean"));
    }

    #[test]
    fn convolution_acts_as_its_multipliers() {
        let spec = BoundaryOperatorSpec::Convolution {
            q_hat: BTreeMap::from([(0, -0.1)]),
        };
        let op = disk_op(&spec, 32);
        let ones = DVector::from_element(32, 1.0);
        let b_ones = op.apply(&ones);
        for i in 0..32 {
            assert_relative_eq!(b_ones[i], -0.1, epsilon = 1e-12);
        }
        // ⟨B𝟏, 𝟏⟩_∂Ω = 2π·q₀.
        assert_relative_eq!(
            op.form(&ones, &ones),
            -0.1 * 2.0 * std::f64::consts::PI,
            epsilon = 1e-12
        );
        // A mode listed only with its negative index acts on both signs.
        let spec2 = BoundaryOperatorSpec::Convolution {
            q_hat: BTreeMap::from([(-2, 0.5)]),
        };
        let op2 = disk_op(&spec2, 32);
        let mesh = build_disk_mesh(2, 32).unwrap();
        let c2 = BoundaryFn::Cos(2).eval_on(&mesh).unwrap();
        let diff = (op2.apply(&c2) - &c2 * 0.5).abs().max();
        assert!(diff <= 1e-12);
    }

    #[test]
    fn convolution_norms_follow_the_multipliers() {
        let q = BTreeMap::from([(0, -0.1), (1, 0.05), (3, -0.2)]);
        let op = disk_op(&BoundaryOperatorSpec::Convolution { q_hat: q.clone() }, 32);
        let norms = op.weighted_norms();
        assert_relative_eq!(norms.l2, 0.2, epsilon = 1e-10);
        let q_l1: f64 = q.values().map(|v| v.abs()).sum();
        assert!(norms.l2 <= q_l1 + 1e-12);
        assert!(op.is_weighted_self_adjoint(1e-10));
        // Mode 0 alone is invisible on mean-zero data.
        let bose = disk_op(
            &BoundaryOperatorSpec::Convolution {
                q_hat: BTreeMap::from([(0, -0.1)]),
            },
            32,
        );
        assert!(bose.weighted_norms().l2_on_mean_zero <= 1e-12);
    }

    #[test]
    fn convolution_rejects_conflicting_and_aliasing_modes() {
        let mesh = build_disk_mesh(2, 16).unwrap();
        let conflict = BoundaryOperatorSpec::Convolution {
            q_hat: BTreeMap::from([(1, 0.5), (-1, 0.25)]),
        };
        assert!(discretize(&conflict, &mesh)
            .unwrap_err()
            .to_string()
            .contains("q_k = q_{-k}"));
        let alias = BoundaryOperatorSpec::Convolution {
            q_hat: BTreeMap::from([(9, 1.0)]),
        };
        assert!(discretize(&alias, &mesh)
            .unwrap_err()
            .to_string()
            .contains("Nyquist"));
    }

    #[test]
    fn rotation_commutator_is_a_signed_shift_pair() {
        let spec = BoundaryOperatorSpec::RotationCommutator {
            angle: std::f64::consts::FRAC_PI_2,
        };
        let op = disk_op(&spec, 16);
        // Quarter turn on 16 sectors shifts by 4.
        let mut f = DVector::zeros(16);
        f[0] = 1.0;
        let bf = op.apply(&f);
        for i in 0..16 {
            let expected = match i {
                4 => 1.0,
                12 => -1.0,
                _ => 0.0,
            };
            assert_relative_eq!(bf[i], expected);
        }
        // Weighted-skew-adjointness: B_hᵀ W = −W B_h.
        let defect = (op.weighted_adjoint() + &op.matrix).abs().max();
        assert!(defect <= 1e-12);
    }

    #[test]
    fn rotation_commutator_validity_checks() {
        let mesh10 = build_disk_mesh(2, 10).unwrap();
        let quarter = BoundaryOperatorSpec::RotationCommutator {
            angle: std::f64::consts::FRAC_PI_2,
        };
        assert!(discretize(&quarter, &mesh10)
            .unwrap_err()
            .to_string()
            .contains("divisible by 4"));
        let mesh16 = build_disk_mesh(2, 16).unwrap();
        let crooked = BoundaryOperatorSpec::RotationCommutator { angle: 0.3 };
        assert!(discretize(&crooked, &mesh16)
            .unwrap_err()
            .to_string()
            .contains("whole number of sectors"));
        let interval = build_interval_mesh(-1.0, 1.0, 4).unwrap();
        assert!(discretize(&quarter, &interval).is_err());
    }

    #[test]
    fn kernel_discretization_carries_right_weights() {
        let mesh = build_disk_mesh(2, 8).unwrap();
        let op = discretize(
            &BoundaryOperatorSpec::Kernel {
                kernel: KernelFn::Constant(3.0),
            },
            &mesh,
        )
        .unwrap();
        let w = 2.0 * std::f64::consts::PI / 8.0;
        for i in 0..8 {
            for j in 0..8 {
                assert_relative_eq!(op.matrix[(i, j)], 3.0 * w, epsilon = 1e-14);
            }
        }
        assert!(op.is_weighted_self_adjoint(1e-12));
    }

    #[test]
    fn kernel_quadrature_converges_under_refinement() {
        // ⟨B cosθ, cosθ⟩ for the cos(θ−φ) kernel is π² in the continuum;
        // refining n_theta must change the value by O(n_theta⁻²) or better.
        let value_at = |m: usize| -> f64 {
            let mesh = build_disk_mesh(2, m).unwrap();
            let op = discretize(
                &BoundaryOperatorSpec::Kernel {
                    kernel: KernelFn::CosAngleDiff,
                },
                &mesh,
            )
            .unwrap();
            let f = BoundaryFn::Cos(1).eval_on(&mesh).unwrap();
            op.form(&f, &f)
        };
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(value_at(16), pi2, epsilon = 1e-10);
        assert!((value_at(32) - value_at(16)).abs() <= 10.0 / (16.0 * 16.0));
    }

    #[test]
    fn explicit_matrix_must_match_boundary_size() {
        let mesh = build_interval_mesh(-1.0, 1.0, 4).unwrap();
        let good = BoundaryOperatorSpec::ExplicitMatrix {
            entries: vec![vec![-2.0, 1.0], vec![1.0, -2.0]],
        };
        let op = discretize(&good, &mesh).unwrap();
        assert_eq!(op.matrix[(0, 1)], 1.0);
        let bad = BoundaryOperatorSpec::ExplicitMatrix {
            entries: vec![vec![1.0]],
        };
        assert!(discretize(&bad, &mesh).is_err());
    }

    #[test]
    fn modulus_is_entrywise_absolute_value() {
        let mesh = build_interval_mesh(-1.0, 1.0, 4).unwrap();
        let spec = BoundaryOperatorSpec::ExplicitMatrix {
            entries: vec![vec![-2.0, 1.0], vec![1.0, -2.0]],
        };
        let op = discretize(&spec, &mesh).unwrap();
        let s = op.modulus();
        assert_eq!(
            s.matrix,
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])
        );
    }

    #[test]
    fn accretivity_detects_the_sign_of_the_symmetric_part() {
        let mesh = build_interval_mesh(-1.0, 1.0, 4).unwrap();
        let psd = discretize(
            &BoundaryOperatorSpec::ExplicitMatrix {
                entries: vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            },
            &mesh,
        )
        .unwrap();
        assert!(psd.is_accretive(1e-12));
        let neg = discretize(
            &BoundaryOperatorSpec::Multiplication {
                beta: BoundaryFn::Constant(-1.0),
            },
            &mesh,
        )
        .unwrap();
        assert!(!neg.is_accretive(1e-12));
        let skew = disk_op(
            &BoundaryOperatorSpec::RotationCommutator {
                angle: std::f64::consts::FRAC_PI_2,
            },
            16,
        );
        assert!(skew.symmetric_part_bound().abs() <= 1e-12);
    }

    #[test]
    fn specs_round_trip_through_json() {
        let specs = vec![
            BoundaryOperatorSpec::Zero,
            BoundaryOperatorSpec::Multiplication {
                beta: BoundaryFn::Values(vec![1.0, -1.0]),
            },
            BoundaryOperatorSpec::RankOne {
                v: BoundaryFn::Cos(1),
            },
            BoundaryOperatorSpec::RotationCommutator { angle: 1.5 },
            BoundaryOperatorSpec::Convolution {
                q_hat: BTreeMap::from([(0, -0.1), (2, 0.3)]),
            },
            BoundaryOperatorSpec::Kernel {
                kernel: KernelFn::CosAngleDiff,
            },
        ];
        for spec in specs {
            let text = serde_json::to_string(&spec).unwrap();
            let back: BoundaryOperatorSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
    }

    proptest! {
        // |B f| ≤ modulus(B) |f| componentwise, for arbitrary matrices.
        #[test]
        fn modulus_dominates_componentwise(
            entries in proptest::collection::vec(-10.0f64..10.0, 25),
            f in proptest::collection::vec(-10.0f64..10.0, 5),
        ) {
            let mesh = build_disk_mesh(2, 10).unwrap();
            let rows: Vec<Vec<f64>> = entries.chunks(5).map(|c| {
                let mut row = c.to_vec();
                row.extend_from_slice(&[0.0; 5]);
                row
            }).collect();
            let mut full = rows;
            full.extend(std::iter::repeat(vec![0.0; 10]).take(5));
            let op = discretize(&BoundaryOperatorSpec::ExplicitMatrix { entries: full }, &mesh).unwrap();
            let s = op.modulus();
            let mut fv = DVector::zeros(10);
            for (i, x) in f.iter().enumerate() { fv[i] = *x; }
            let bf = op.apply(&fv).abs();
            let sf = s.apply(&fv.abs());
            for i in 0..10 {
                prop_assert!(bf[i] <= sf[i] + 1e-12);
            }
        }
    }
}
