//! Dense linear-algebra helpers shared by the numerical modules.
//!
//! Everything here is desk-scale: matrices are `DMatrix<f64>` with at most a
//! couple thousand rows, so O(n³) factorizations are used without apology.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
/// The input is symmetrized first so callers may pass matrices that are
/// symmetric only up to roundoff.
pub(crate) fn sym_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let se = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Generalized symmetric eigenproblem `A v = λ M v` with `M = diag(m) > 0`.
/// Returns eigenvalues ascending and eigenvectors M-orthonormal
/// (`VᵀMV = I`), i.e. orthonormal in the lumped-mass inner product.
pub(crate) fn sym_generalized_eigen(
    a: &DMatrix<f64>,
    m_diag: &DVector<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if m_diag.len() != n {
        return Err(Error::InvalidArgument(
            "mass diagonal length does not match matrix size".into(),
        ));
    }
    if m_diag.iter().any(|&m| m <= 0.0) {
        return Err(Error::Numerical("mass matrix is not positive".into()));
    }
    let d_inv_sqrt = DVector::from_iterator(n, m_diag.iter().map(|&m| 1.0 / m.sqrt()));
    let mut c = a.clone();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] *= d_inv_sqrt[i] * d_inv_sqrt[j];
        }
    }
    let (vals, y) = sym_eigen(&c);
    let mut v = y;
    for i in 0..n {
        for k in 0..n {
            v[(i, k)] *= d_inv_sqrt[i];
        }
    }
    Ok((vals, v))
}

/// Generalized symmetric eigenproblem `A v = λ M v` for a full symmetric
/// positive definite `M`, via its Cholesky factor `M = L Lᵀ`. Eigenvalues
/// ascending, eigenvectors M-orthonormal.
pub(crate) fn sym_generalized_eigen_spd(
    a: &DMatrix<f64>,
    m: &DMatrix<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::InvalidArgument(
            "mass matrix size does not match".into(),
        ));
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ, computed with two triangular solves.
    let la = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c_t = l
        .solve_lower_triangular(&la.transpose())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let (vals, y) = sym_eigen(&c_t.transpose());
    // Back-substitute x = L⁻ᵀ y.
    let v = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    Ok((vals, v))
}

/// Dense matrix exponential by 13/13 Padé approximation with scaling and
/// squaring. Valid for any square real matrix; accuracy is near machine
/// precision for the desk-scale norms used here.
pub(crate) fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    const THETA_13: f64 = 5.371_920_351_148_152;
    #[rustfmt::skip]
    const B: [f64; 14] = [
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ];

    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidArgument("expm needs a square matrix".into()));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Numerical("expm input has non-finite entries".into()));
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a_scaled = a / 2f64.powi(s as i32);

    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a_scaled * &a_scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (B[13] * &a6 + B[11] * &a4 + B[9] * &a2)
        + B[7] * &a6
        + B[5] * &a4
        + B[3] * &a2
        + B[1] * &id;
    let u = &a_scaled * u_inner;
    let v = &a6 * (B[12] * &a6 + B[10] * &a4 + B[8] * &a2)
        + B[6] * &a6
        + B[4] * &a4
        + B[2] * &a2
        + B[0] * &id;

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut x = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("expm Padé solve is singular".into()))?;
    for _ in 0..s {
        x = &x * &x;
    }
    Ok(x)
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// All eigenvalues of a real square matrix, sorted by real part ascending
/// (ties by imaginary part).
pub(crate) fn complex_eigenvalues(a: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let mut vals: Vec<Complex<f64>> = a.clone().complex_eigenvalues().iter().copied().collect();
    vals.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    vals
}

/// Eigenvector for an approximately known eigenvalue of a real matrix, by
/// shifted inverse iteration in complex arithmetic. The shift is nudged off
/// the eigenvalue so the solve stays (barely) regular; three iterations are
/// plenty at these scales.
pub(crate) fn inverse_iteration(
    a: &DMatrix<f64>,
    eigenvalue: Complex<f64>,
    iters: usize,
) -> Result<DVector<Complex<f64>>> {
    let n = a.nrows();
    let scale = one_norm(a).max(1.0);
    let shift = eigenvalue + Complex::new(1e-10 * scale, 1e-12 * scale);
    let ac = a.map(|x| Complex::new(x, 0.0));
    let shifted = &ac - DMatrix::from_diagonal_element(n, n, shift);
    let lu = shifted.lu();
    // Deterministic start vector with all modes excited.
    let mut v = DVector::from_fn(n, |i, _| {
        Complex::new(1.0 + (i as f64 * 0.7369).sin(), (i as f64 * 0.2711).cos())
    });
    v /= Complex::new(v.norm(), 0.0);
    for _ in 0..iters {
        let w = lu
            .solve(&v)
            .ok_or_else(|| Error::Numerical("inverse iteration solve failed".into()))?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numerical("inverse iteration diverged".into()));
        }
        v = w / Complex::new(norm, 0.0);
    }
    // Remove the arbitrary global phase so real eigenvectors come back real:
    // rotate by the conjugate phase of the largest component.
    let mut pivot = Complex::new(0.0, 0.0);
    for z in v.iter() {
        if z.norm() > pivot.norm() {
            pivot = *z;
        }
    }
    if pivot.norm() > 0.0 {
        let phase = pivot / Complex::new(pivot.norm(), 0.0);
        v *= phase.conj();
    }
    Ok(v)
}

/// Least-squares line through `(xs, ys)`: returns `(slope, intercept, r²)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::InvalidArgument(
            "linear fit needs ≥ 2 paired samples".into(),
        ));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "linear fit abscissae are all equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok((slope, intercept, r2))
}

/// Largest singular value.
pub(crate) fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    a.clone().singular_values()[0]
}

/// Solve `A x = b` by LU with one step of iterative refinement.
pub(crate) fn lu_solve_refined(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = a.clone().lu();
    let mut x = lu
        .solve(b)
        .ok_or_else(|| Error::Numerical("linear system is singular".into()))?;
    let r = b - a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sym_eigen_recovers_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let (vals, vecs) = sym_eigen(&a);
        assert_relative_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(vals[2], 3.0, epsilon = 1e-12);
        let res = &a * vecs.column(0) - vecs.column(0) * vals[0];
        assert!(res.norm() < 1e-12);
    }

    #[test]
    fn generalized_eigen_is_mass_orthonormal() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let m = DVector::from_vec(vec![0.5, 1.0, 2.0]);
        let (vals, v) = sym_generalized_eigen(&a, &m).unwrap();
        for k in 0..3 {
            let vk = v.column(k);
            let res = &a * vk
                - DVector::from_iterator(3, vk.iter().zip(m.iter()).map(|(x, mm)| x * mm))
                    * vals[k];
            assert!(res.norm() < 1e-10);
            for l in 0..3 {
                let dot: f64 = (0..3).map(|i| v[(i, k)] * m[i] * v[(i, l)]).sum();
                let expect = if k == l { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn full_mass_generalized_eigen_agrees_with_diagonal_path() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let m_diag = DVector::from_vec(vec![0.5, 1.0, 2.0]);
        let m_full = DMatrix::from_diagonal(&m_diag);
        let (vals_d, _) = sym_generalized_eigen(&a, &m_diag).unwrap();
        let (vals_f, v) = sym_generalized_eigen_spd(&a, &m_full).unwrap();
        for k in 0..3 {
            assert_relative_eq!(vals_f[k], vals_d[k], epsilon = 1e-12);
            let vk = v.column(k).into_owned();
            let res = &a * &vk - &m_full * &vk * vals_f[k];
            assert!(res.norm() <= 1e-10);
            let mnorm = (vk.transpose() * &m_full * &vk)[(0, 0)];
            assert_relative_eq!(mnorm, 1.0, epsilon = 1e-12);
        }
        // A genuinely non-diagonal SPD mass still yields residual-free pairs.
        let m_tri = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 1.0, 0.2, 0.0, 0.2, 1.0]);
        let (vals_t, vt) = sym_generalized_eigen_spd(&a, &m_tri).unwrap();
        for k in 0..3 {
            let vk = vt.column(k).into_owned();
            let res = &a * &vk - &m_tri * &vk * vals_t[k];
            assert!(res.norm() <= 1e-10);
        }
    }

    #[test]
    fn expm_matches_scalar_exponential() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-0.3, 0.0, 1.7]));
        let e = expm(&a).unwrap();
        assert_relative_eq!(e[(0, 0)], (-0.3f64).exp(), epsilon = 1e-13);
        assert_relative_eq!(e[(1, 1)], 1.0, epsilon = 1e-13);
        assert_relative_eq!(e[(2, 2)], 1.7f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn expm_rotation_block_is_orthogonal() {
        // exp of a skew matrix is a rotation: exp([[0,-θ],[θ,0]]) = R(θ).
        let theta = 0.83;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let e = expm(&a).unwrap();
        assert_relative_eq!(e[(0, 0)], theta.cos(), epsilon = 1e-13);
        assert_relative_eq!(e[(1, 0)], theta.sin(), epsilon = 1e-13);
    }

    #[test]
    fn expm_semigroup_law_under_scaling() {
        // Forces the squaring branch with a stiff matrix.
        let a = DMatrix::from_row_slice(2, 2, &[-40.0, 12.0, 3.0, -55.0]);
        let e1 = expm(&a).unwrap();
        let e_half = expm(&(&a * 0.5)).unwrap();
        let prod = &e_half * &e_half;
        assert!((&prod - &e1).norm() < 1e-12 * e1.norm().max(1.0));
    }

    #[test]
    fn inverse_iteration_finds_complex_pair() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let lam = Complex::new(0.0, 1.0);
        let v = inverse_iteration(&a, lam, 3).unwrap();
        let ac = a.map(|x| Complex::new(x, 0.0));
        let res = &ac * &v - &v * lam;
        assert!(res.norm() < 1e-8);
    }

    #[test]
    fn linear_fit_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [0.5, 2.5, 4.5, 6.5];
        let (slope, intercept, r2) = linear_fit(&xs, &ys).unwrap();
        assert_relative_eq!(slope, 2.0, epsilon = 1e-12);
        assert_relative_eq!(intercept, -1.5, epsilon = 1e-12);
        assert_relative_eq!(r2, 1.0, epsilon = 1e-12);
    }
}
