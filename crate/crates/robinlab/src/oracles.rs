//! Closed-form and brute-force reference solutions.
//!
//! Two independent oracles back the acceptance tests:
//!
//! - the explicit interval spectrum: on (−1, 1) with the two-point boundary
//!   matrix b·{{−2, 1}, {1, −2}}, positive eigenvalues of −L_B are μ² where μ
//!   solves one of the branch equations f₁(μ) = μ·tanh μ = b (even, cosh
//!   profile) or f₂(μ) = (1/3)μ·coth μ = b (odd, sinh profile);
//! - the per-Fourier-mode radial solver for convolution operators on the
//!   disk, cross-checked against a power-series evaluation of the modified
//!   Bessel functions I₀, I₁.
//!
//! Everything here is deliberately independent of the FEM assembly path:
//! bisection on scalar equations, a one-dimensional radial discretization
//! with its own quadrature, and series Bessel evaluation. The only routine
//! that touches the assembled problem is [`oracle_vs_fem`], the convergence
//! bridge that compares the two paths.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::assembly::{assemble, CoefficientField, CoefficientSpec};
use crate::boundary::{discretize, BoundaryOperatorSpec};
use crate::error::{Error, Result};
use crate::geometry::build_interval_mesh;
use crate::linalg;

/// f₁(μ) = μ·tanh μ; strictly increasing from 0 on [0, ∞).
pub fn f1(mu: f64) -> f64 {
    mu * mu.tanh()
}

/// f₂(μ) = (1/3)·μ·coth μ; strictly increasing from 1/3 on [0, ∞).
pub fn f2(mu: f64) -> f64 {
    if mu == 0.0 {
        1.0 / 3.0
    } else {
        mu / (3.0 * mu.tanh())
    }
}

/// Bisection for g(μ) = target with strictly increasing g, starting from a
/// bracket grown geometrically from (0, 1].
fn bisect_increasing(g: impl Fn(f64) -> f64, target: f64) -> Result<f64> {
    let mut hi = 1.0;
    let mut grow = 0;
    while g(hi) < target {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::Numerical(format!(
                "no bracket found for target {target}; function stays below it"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Which branch equation a root solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    F1,
    F2,
}

/// Spatial profile of the eigenfunction on (−1, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Profile {
    /// Even: cosh(μx).
    Cosh,
    /// Odd: sinh(μx).
    Sinh,
}

/// One root of a branch equation: eigenvalue μ² of −L_B with its profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntervalBranchRoot {
    pub branch: Branch,
    pub b: f64,
    pub mu: f64,
    /// Eigenvalue of −L_B; the assembled pencil (A_B, M) sees −λ.
    pub lambda: f64,
    pub profile: Profile,
}

/// The positive point spectrum of the interval example at parameter b.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalSpectrum {
    /// Roots ordered by μ.
    pub roots: Vec<IntervalBranchRoot>,
    /// b = 1/3 exactly: eigenvalue 0 appears, spanned by ψ(x) = x.
    pub zero_eigenvalue: bool,
    /// The two branches cross (b = f₁(μ*) = f₂(μ*)): the leading eigenvalue
    /// has a two-dimensional eigenspace.
    pub double_root: bool,
}

/// Positive eigenvalues of −L_B for the interval example, found by bisection
/// on the branch equations. The F2 root exists exactly when b > 1/3.
pub fn interval_example_spectrum(b: f64) -> Result<IntervalSpectrum> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "the interval example needs b > 0, got {b}"
        )));
    }
    let mut roots = Vec::new();
    let mu1 = bisect_increasing(f1, b)?;
    roots.push(IntervalBranchRoot {
        branch: Branch::F1,
        b,
        mu: mu1,
        lambda: mu1 * mu1,
        profile: Profile::Cosh,
    });
    if b > 1.0 / 3.0 + 1e-14 {
        let mu2 = bisect_increasing(f2, b)?;
        roots.push(IntervalBranchRoot {
            branch: Branch::F2,
            b,
            mu: mu2,
            lambda: mu2 * mu2,
            profile: Profile::Sinh,
        });
    }
    roots.sort_by(|x, y| x.mu.total_cmp(&y.mu));
    let double_root =
        roots.len() == 2 && (roots[0].mu - roots[1].mu).abs() <= 1e-9 * (1.0 + roots[1].mu);
    Ok(IntervalSpectrum {
        roots,
        zero_eigenvalue: (b - 1.0 / 3.0).abs() <= 1e-12,
        double_root,
    })
}

/// The branch crossing μ* = arctanh(1/√3) where f₁ = f₂ and the leading
/// eigenspace becomes two-dimensional.
pub fn crossing_point() -> f64 {
    (1.0 / 3.0f64.sqrt()).atanh()
}

/// Sampled (μ, f₁(μ), f₂(μ)) rows for plotting the branch curves.
pub fn branch_table(mu_max: f64, samples: usize) -> Vec<(f64, f64, f64)> {
    (1..=samples)
        .map(|i| {
            let mu = mu_max * i as f64 / samples as f64;
            (mu, f1(mu), f2(mu))
        })
        .collect()
}

/// Modified Bessel function I₀ by power series; ample accuracy for |z| ≤ 10.
pub fn bessel_i0(z: f64) -> f64 {
    let q = z * z / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Modified Bessel function I₁ by power series.
pub fn bessel_i1(z: f64) -> f64 {
    let q = z * z / 4.0;
    let mut term = z / 2.0;
    let mut sum = term;
    for k in 1..200 {
        term *= q / ((k * (k + 1)) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Left side of the mode-0 eigenvalue condition for a convolution operator
/// with multiplier q₀ < 0 on the disk: the eigenvalue s of −L_B solves
/// √s·I₁(√s)/I₀(√s) = −q₀ (from u = I₀(√s·r) and the Robin condition at
/// r = 1, using I₀′ = I₁).
pub fn bose_mode0_condition(s: f64) -> f64 {
    let r = s.max(0.0).sqrt();
    r * bessel_i1(r) / bessel_i0(r)
}

/// Smallest eigenvalue of one angular Fourier mode.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModeEigenvalue {
    pub k: i64,
    /// Multiplier q_k applied as the Robin coefficient at r = 1.
    pub q: f64,
    /// Smallest pencil eigenvalue of this mode; the corresponding
    /// eigenvalue of −L_B is −lambda.
    pub lambda: f64,
}

/// Eigenvalue table of a convolution-type operator on the disk, one radial
/// problem per angular mode.
#[derive(Debug, Clone, Serialize)]
pub struct ModeTable {
    pub entries: Vec<ModeEigenvalue>,
    /// s(−L_B) = −min over modes of the smallest pencil eigenvalue.
    pub spectral_bound: f64,
    pub minimizing_mode: i64,
    /// Radial profile u(r) of the minimizing mode, sampled at the radial
    /// nodes (r, u).
    pub radial_profile: Vec<(f64, f64)>,
}

/// Radial P1 discretization of mode k: the form
/// ∫₀¹ (u′v′ + k²/r²·uv) r dr + q_k·u(1)v(1) against the mass ∫ uv·r dr,
/// with u(0) = 0 enforced for k ≥ 1. Returns the smallest eigenpair.
fn radial_mode_smallest(k: u64, q: f64, n_radial: usize) -> Result<(f64, Vec<(f64, f64)>)> {
    let n = n_radial;
    let h = 1.0 / n as f64;
    let mut a = DMatrix::zeros(n + 1, n + 1);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for c in 0..n {
        let r0 = c as f64 * h;
        let r1 = r0 + h;
        let rm = 0.5 * (r0 + r1);
        // ∫ r·u′v′ over the cell, exact for P1.
        let kloc = rm / h;
        a[(c, c)] += kloc;
        a[(c + 1, c + 1)] += kloc;
        a[(c, c + 1)] -= kloc;
        a[(c + 1, c)] -= kloc;
        // Consistent mass ∫ φᵢφⱼ·r dr, exact.
        m[(c, c)] += h * (3.0 * r0 + r1) / 12.0;
        m[(c + 1, c + 1)] += h * (r0 + 3.0 * r1) / 12.0;
        m[(c, c + 1)] += h * (r0 + r1) / 12.0;
        m[(c + 1, c)] += h * (r0 + r1) / 12.0;
        if k > 0 {
            // Angular potential k²/r, midpoint-sampled; the first cell's
            // singular weight only multiplies functions vanishing at 0.
            let pot = (k * k) as f64 / rm;
            a[(c, c)] += pot * h / 3.0;
            a[(c + 1, c + 1)] += pot * h / 3.0;
            a[(c, c + 1)] += pot * h / 6.0;
            a[(c + 1, c)] += pot * h / 6.0;
        }
    }
    a[(n, n)] += q;

    let (lambda, vec_full) = if k == 0 {
        let (vals, vecs) = linalg::sym_generalized_eigen_spd(&a, &m)?;
        (vals[0], vecs.column(0).into_owned())
    } else {
        // Dirichlet at r = 0: drop the first row and column.
        let ar = a.view((1, 1), (n, n)).into_owned();
        let mr = m.view((1, 1), (n, n)).into_owned();
        let (vals, vecs) = linalg::sym_generalized_eigen_spd(&ar, &mr)?;
        let mut full = DVector::zeros(n + 1);
        full.rows_mut(1, n).copy_from(&vecs.column(0));
        (vals[0], full)
    };
    // Sign-normalize so the profile is positive at the boundary.
    let sign = if vec_full[n] < 0.0 { -1.0 } else { 1.0 };
    let profile: Vec<(f64, f64)> = (0..=n)
        .map(|i| (i as f64 * h, sign * vec_full[i]))
        .collect();
    Ok((lambda, profile))
}

/// Per-mode smallest eigenvalues for a convolution operator with the given
/// multipliers, over |k| ≤ k_max.
pub fn disk_mode_spectrum(
    q_hat: &BTreeMap<i64, f64>,
    k_max: u64,
    n_radial: usize,
) -> Result<ModeTable> {
    if n_radial < 32 {
        return Err(Error::InvalidArgument(format!(
            "radial oracle needs n_radial ≥ 32, got {n_radial}"
        )));
    }
    let lookup = |k: i64| -> f64 {
        q_hat
            .get(&k)
            .or_else(|| q_hat.get(&-k))
            .copied()
            .unwrap_or(0.0)
    };
    let mut entries = Vec::new();
    let mut best: Option<(f64, i64, Vec<(f64, f64)>)> = None;
    for k in -(k_max as i64)..=(k_max as i64) {
        let q = lookup(k);
        let (lambda, profile) = radial_mode_smallest(k.unsigned_abs(), q, n_radial)?;
        entries.push(ModeEigenvalue { k, q, lambda });
        if best.as_ref().map_or(true, |(l, _, _)| lambda < *l) {
            best = Some((lambda, k, profile));
        }
    }
    let (min_lambda, minimizing_mode, radial_profile) = best.unwrap();
    Ok(ModeTable {
        entries,
        spectral_bound: -min_lambda,
        minimizing_mode,
        radial_profile,
    })
}

/// One resolution row of the oracle-vs-FEM comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub fem: f64,
    pub oracle: f64,
    pub error: f64,
}

/// Convergence of the assembled interval problem against the bisection
/// oracle: leading pencil eigenvalue vs −μ² at each resolution, plus the
/// observed order between the last two rows.
pub fn oracle_vs_fem_interval(b: f64, resolutions: &[usize]) -> Result<(Vec<ConvergenceRow>, f64)> {
    if resolutions.len() < 2 {
        return Err(Error::InvalidArgument(
            "convergence study needs at least two resolutions".into(),
        ));
    }
    let spectrum = interval_example_spectrum(b)?;
    // Largest mu leads; past the branch crossing that is the F2 root.
    let lambda_oracle = -spectrum.roots.last().expect("b > 0 has a root").lambda;
    let mut rows = Vec::new();
    for &n in resolutions {
        let mesh = build_interval_mesh(-1.0, 1.0, n)?;
        let spec = BoundaryOperatorSpec::ExplicitMatrix {
            entries: vec![vec![-2.0 * b, b], vec![b, -2.0 * b]],
        };
        let op = discretize(&spec, &mesh)?;
        let coeff = CoefficientField::new(CoefficientSpec::Constant(1.0))?;
        let problem = assemble(&mesh, coeff, op)?;
        let (vals, _) = linalg::sym_generalized_eigen(&problem.a_b, &problem.mass)?;
        rows.push(ConvergenceRow {
            resolution: n,
            fem: vals[0],
            oracle: lambda_oracle,
            error: (vals[0] - lambda_oracle).abs(),
        });
    }
    let last = rows.len() - 1;
    let ratio = rows[last - 1].error / rows[last].error.max(1e-300);
    let step = rows[last].resolution as f64 / rows[last - 1].resolution as f64;
    let order = ratio.log2() / step.log2();
    Ok((rows, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Roots of μ·tanh μ = b, frozen from high-precision bisection.
    const MU_B01: f64 = 0.3215959046912104;
    const MU_B02: f64 = 0.46267898967939717;
    const MU_B03: f64 = 0.57666221654507644;
    const MU_B13: f64 = 0.6114532915782877;
    const MU_F1_B2: f64 = 2.0653381389747047;
    const MU_F2_B2: f64 = 5.9999262590301809;
    const MU_STAR: f64 = 0.65847894846240835;
    const B_STAR: f64 = 0.38017299815047317;
    const BOSE_S: f64 = 0.20508383809369445;

    #[test]
    fn branch_functions_have_the_right_limits() {
        assert_eq!(f1(0.0), 0.0);
        assert_relative_eq!(f2(1e-8), 1.0 / 3.0, epsilon = 1e-10);
        assert_relative_eq!(f2(0.0), 1.0 / 3.0);
    }

    #[test]
    fn branch_functions_are_strictly_increasing() {
        let mut prev1 = f1(0.0);
        let mut prev2 = f2(0.0);
        for i in 1..=10_000 {
            let mu = i as f64 * 1e-3;
            let (v1, v2) = (f1(mu), f2(mu));
            assert!(v1 > prev1, "f1 not increasing at μ = {mu}");
            assert!(v2 > prev2, "f2 not increasing at μ = {mu}");
            prev1 = v1;
            prev2 = v2;
        }
    }

    #[test]
    fn frozen_f1_roots() {
        for (b, expected) in [
            (0.1, MU_B01),
            (0.2, MU_B02),
            (0.3, MU_B03),
            (1.0 / 3.0, MU_B13),
        ] {
            let spectrum = interval_example_spectrum(b).unwrap();
            let root = spectrum.roots[0];
            assert_eq!(root.branch, Branch::F1);
            assert_eq!(root.profile, Profile::Cosh);
            assert_relative_eq!(root.mu, expected, epsilon = 1e-12);
            assert!((f1(root.mu) - b).abs() <= 1e-12);
            assert_relative_eq!(root.lambda, expected * expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn both_branches_appear_past_the_threshold() {
        let spectrum = interval_example_spectrum(2.0).unwrap();
        assert_eq!(spectrum.roots.len(), 2);
        assert_relative_eq!(spectrum.roots[0].mu, MU_F1_B2, epsilon = 1e-11);
        assert_relative_eq!(spectrum.roots[1].mu, MU_F2_B2, epsilon = 1e-11);
        assert_eq!(spectrum.roots[1].branch, Branch::F2);
        assert_eq!(spectrum.roots[1].profile, Profile::Sinh);
        assert!((f2(spectrum.roots[1].mu) - 2.0).abs() <= 1e-12);
        assert!(!spectrum.zero_eigenvalue);
        assert!(!spectrum.double_root);
    }

    #[test]
    fn threshold_and_crossing_flags() {
        let at_third = interval_example_spectrum(1.0 / 3.0).unwrap();
        assert!(at_third.zero_eigenvalue);
        assert_eq!(at_third.roots.len(), 1);

        let at_star = interval_example_spectrum(B_STAR).unwrap();
        assert!(at_star.double_root, "roots {:?}", at_star.roots);
        assert!((at_star.roots[0].mu - MU_STAR).abs() <= 1e-9);

        assert!(interval_example_spectrum(0.0).is_err());
        assert!(interval_example_spectrum(-1.0).is_err());
    }

    #[test]
    fn crossing_point_matches_the_branch_equations() {
        let mu = crossing_point();
        assert_relative_eq!(mu, MU_STAR, epsilon = 1e-15);
        // Printed to six decimals the crossing reads 0.658479.
        assert_eq!(format!("{mu:.6}"), "0.658479");
        assert!((f1(mu) - f2(mu)).abs() <= 1e-12);
        assert!((mu.tanh() * mu.tanh() - 1.0 / 3.0).abs() <= 1e-14);
        assert!((f1(mu) - B_STAR).abs() <= 1e-13);
    }

    #[test]
    fn bessel_series_match_reference_values() {
        assert_relative_eq!(bessel_i0(1.0), 1.2660658777520084, epsilon = 1e-14);
        assert_relative_eq!(bessel_i1(1.0), 0.5651591039924850, epsilon = 1e-14);
        assert_relative_eq!(bessel_i0(2.0), 2.2795853023360673, epsilon = 1e-14);
        assert_relative_eq!(bessel_i1(2.0), 1.5906368546373291, epsilon = 1e-14);
        assert_eq!(bessel_i0(0.0), 1.0);
        assert_eq!(bessel_i1(0.0), 0.0);
    }

    #[test]
    fn bose_condition_root_is_frozen() {
        // Solve √s·I₁(√s)/I₀(√s) = 0.1 independently of the radial solver.
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if bose_mode0_condition(mid) < 0.1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        assert_relative_eq!(s, BOSE_S, epsilon = 1e-12);
    }

    #[test]
    fn radial_solver_neumann_mode_is_flat() {
        let table = disk_mode_spectrum(&BTreeMap::new(), 2, 64).unwrap();
        let mode0 = table.entries.iter().find(|e| e.k == 0).unwrap();
        assert!(mode0.lambda.abs() <= 1e-9);
        assert!(table.spectral_bound.abs() <= 1e-9);
        assert_eq!(table.minimizing_mode, 0);
    }

    #[test]
    fn radial_solver_reproduces_the_bessel_eigenvalue() {
        let q = BTreeMap::from([(0, -0.1)]);
        let table = disk_mode_spectrum(&q, 3, 512).unwrap();
        assert!(table.spectral_bound > 0.0);
        assert_eq!(table.minimizing_mode, 0);
        let s = table.spectral_bound;
        assert!((bose_mode0_condition(s) - 0.1).abs() <= 1e-4);
        assert!((s - BOSE_S).abs() <= 1e-5);
        // The ground profile is strictly positive away from nothing: I₀ > 0.
        assert!(table.radial_profile.iter().all(|&(_, u)| u > 0.0));
    }

    #[test]
    fn mode_table_is_symmetric_and_ordered() {
        let q = BTreeMap::from([(0, -0.1), (1, 0.05)]);
        let table = disk_mode_spectrum(&q, 2, 128).unwrap();
        let get = |k: i64| table.entries.iter().find(|e| e.k == k).unwrap().lambda;
        assert_relative_eq!(get(1), get(-1), epsilon = 1e-12);
        assert_relative_eq!(get(2), get(-2), epsilon = 1e-12);
        // The angular potential pushes higher modes up; the bound stays with
        // mode 0 under this small perturbation.
        assert!(get(1) > get(0));
        assert_eq!(table.minimizing_mode, 0);
    }

    #[test]
    fn fem_converges_to_the_oracle_eigenvalue() {
        let (rows, order) = oracle_vs_fem_interval(0.2, &[50, 100, 200]).unwrap();
        assert!(rows[0].error > rows[1].error && rows[1].error > rows[2].error);
        assert!(order >= 1.8, "observed order {order:.2}");
        assert_relative_eq!(rows[2].oracle, -(MU_B02 * MU_B02), epsilon = 1e-12);
    }
}
