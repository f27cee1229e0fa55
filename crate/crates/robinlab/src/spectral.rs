//! Eigenvalue analysis of the pencil A_B v = λ M v: spectral bounds,
//! leading modes, peripheral spectrum classification, and the consistency
//! check between the spectral bound and the measured semigroup growth rate.
//!
//! Symmetric problems go through the generalized symmetric eigensolver and
//! come back with a full M-orthonormal basis. Non-symmetric problems (any
//! boundary operator with a skew part) fall back to dense complex
//! eigenvalues of M⁻¹A_B, with shifted inverse iteration recovering the one
//! eigenvector the positivity analysis needs. Every eigenpair handed out is
//! residual-checked; nothing is returned on trust.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::assembly::AssembledProblem;
use crate::error::{Error, Result};
use crate::linalg;
use crate::semigroup::{MatrixSemigroup, DENSE_BUDGET};

/// Eigenvalues (and for symmetric problems the M-orthonormal basis).
pub enum Eigensystem {
    Symmetric {
        values: DVector<f64>,
        vectors: DMatrix<f64>,
    },
    General {
        values: Vec<Complex<f64>>,
    },
}

/// Full spectral diagnosis of one assembled problem.
pub struct SpectralReport {
    pub system: Eigensystem,
    /// s(−L_B) = −min Re λ: positive means the semigroup grows.
    pub spectral_bound: f64,
    /// Eigenvalue with the smallest real part.
    pub leading: Complex<f64>,
    /// Re λ₁ − Re λ₀ between the two smallest real parts.
    pub dominant_gap: f64,
    /// True when the gap exceeds 1e−6 and the leading eigenvalue is real.
    pub dominant_is_simple: bool,
    /// When λ₀ ≈ 0: relative deviation of its eigenvector from a constant.
    pub kernel_constant_defect: Option<f64>,
    /// Worst scaled eigenpair residual among everything reported.
    pub max_residual: f64,
}

impl SpectralReport {
    /// Eigenvalues as (re, im), ascending by real part.
    pub fn eigenvalue_pairs(&self) -> Vec<(f64, f64)> {
        match &self.system {
            Eigensystem::Symmetric { values, .. } => values.iter().map(|&v| (v, 0.0)).collect(),
            Eigensystem::General { values } => values.iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    (a - a.transpose()).abs().max() / (1.0 + a.abs().max())
}

fn constant_defect(problem: &AssembledProblem, v: &DVector<f64>) -> f64 {
    let ones = DVector::from_element(problem.n(), 1.0);
    let mean = problem.m_inner(v, &ones) / problem.volume();
    let scale = v.abs().max().max(1e-300);
    v.iter().map(|&x| (x - mean).abs()).fold(0.0, f64::max) / scale
}

/// Solve the full pencil. Dense only; refuses beyond the budget.
pub fn solve_eigs(problem: &AssembledProblem) -> Result<SpectralReport> {
    let n = problem.n();
    if n > DENSE_BUDGET {
        return Err(Error::InvalidArgument(format!(
            "dense eigensolve budget is {DENSE_BUDGET} vertices, got {n}"
        )));
    }
    let a_scale = problem.a_b.abs().max();
    let m_scale = problem.mass.max();
    if symmetry_defect(&problem.a_b) <= 1e-12 {
        let (values, vectors) = linalg::sym_generalized_eigen(&problem.a_b, &problem.mass)?;
        // One block residual pass: columns of A V − M V Λ.
        let av = &problem.a_b * &vectors;
        let mut max_residual: f64 = 0.0;
        for k in 0..n {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let r = av[(i, k)] - problem.mass[i] * values[k] * vectors[(i, k)];
                worst = worst.max(r.abs());
            }
            let denom = (a_scale + values[k].abs() * m_scale) * vectors.column(k).abs().max();
            max_residual = max_residual.max(worst / denom.max(1e-300));
        }
        if max_residual > 1e-8 {
            return Err(Error::Numerical(format!(
                "symmetric eigensolve residual {max_residual:.3e} exceeds 1e-8"
            )));
        }
        let leading = Complex::new(values[0], 0.0);
        let dominant_gap = if n > 1 {
            values[1] - values[0]
        } else {
            f64::INFINITY
        };
        let kernel_constant_defect = (values[0].abs() <= 1e-8)
            .then(|| constant_defect(problem, &vectors.column(0).into_owned()));
        Ok(SpectralReport {
            spectral_bound: -values[0],
            leading,
            dominant_gap,
            dominant_is_simple: dominant_gap > 1e-6,
            kernel_constant_defect,
            max_residual,
            system: Eigensystem::Symmetric { values, vectors },
        })
    } else {
        let g = problem.generator() * -1.0; // M⁻¹ A_B
        let values = linalg::complex_eigenvalues(&g);
        let leading = values[0];
        let dominant_gap = if n > 1 {
            values[1].re - values[0].re
        } else {
            f64::INFINITY
        };
        let leading_real = leading.im.abs() <= 1e-10 * (1.0 + leading.norm());
        // Residual-check the leading eigenpair; the rest are reported as
        // eigenvalues only.
        let v = linalg::inverse_iteration(&g, leading, 3)?;
        let gv = g.map(|x| Complex::new(x, 0.0)) * &v;
        let residual = (0..n)
            .map(|i| (gv[i] - leading * v[i]).norm())
            .fold(0.0f64, f64::max)
            / ((1.0 + leading.norm()) * v.iter().map(|z| z.norm()).fold(0.0f64, f64::max));
        if residual > 1e-8 {
            return Err(Error::Numerical(format!(
                "leading eigenpair residual {residual:.3e} exceeds 1e-8"
            )));
        }
        let kernel_constant_defect = (leading.norm() <= 1e-8).then(|| {
            let vr = v.map(|z| z.re);
            constant_defect(problem, &vr)
        });
        Ok(SpectralReport {
            spectral_bound: -leading.re,
            leading,
            dominant_gap,
            dominant_is_simple: dominant_gap > 1e-6 && leading_real,
            kernel_constant_defect,
            max_residual: residual,
            system: Eigensystem::General { values },
        })
    }
}

fn leading_mode_of(
    matrix: &DMatrix<f64>,
    problem: &AssembledProblem,
) -> Result<(f64, DVector<f64>)> {
    let n = problem.n();
    let (lambda, mut v) = if symmetry_defect(matrix) <= 1e-12 {
        let (values, vectors) = linalg::sym_generalized_eigen(matrix, &problem.mass)?;
        if n > 1 && values[1] - values[0] <= 1e-6 {
            return Err(Error::Numerical(format!(
                "leading eigenvalue {:.6e} is not simple (gap {:.3e})",
                values[0],
                values[1] - values[0]
            )));
        }
        (values[0], vectors.column(0).into_owned())
    } else {
        let mut g = matrix.clone();
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] /= problem.mass[i];
            }
        }
        let values = linalg::complex_eigenvalues(&g);
        let leading = values[0];
        if leading.im.abs() > 1e-10 * (1.0 + leading.norm()) {
            return Err(Error::Numerical(format!(
                "leading eigenvalue {leading} is complex; no real leading mode exists"
            )));
        }
        if n > 1 && values[1].re - leading.re <= 1e-6 {
            return Err(Error::Numerical(format!(
                "leading eigenvalue {:.6e} is not simple (gap {:.3e})",
                leading.re,
                values[1].re - leading.re
            )));
        }
        let vc = linalg::inverse_iteration(&g, leading, 3)?;
        let imag = vc.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
        let real = vc.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
        if imag > 1e-8 * real {
            return Err(Error::Numerical(
                "leading eigenvector has a non-negligible imaginary part".into(),
            ));
        }
        (leading.re, vc.map(|z| z.re))
    };
    let norm = problem.m_norm(&v);
    v /= norm;
    let ones = DVector::from_element(n, 1.0);
    if problem.m_inner(&v, &ones) < 0.0 {
        v = -v;
    }
    let residual = (matrix * &v - DVector::from_fn(n, |i, _| lambda * problem.mass[i] * v[i]))
        .abs()
        .max()
        / ((matrix.abs().max() + lambda.abs() * problem.mass.max()) * v.abs().max());
    if residual > 1e-8 {
        return Err(Error::Numerical(format!(
            "leading mode residual {residual:.3e} exceeds 1e-8"
        )));
    }
    Ok((lambda, v))
}

/// The smallest eigenvalue and its M-normalized eigenvector, sign-fixed to
/// nonnegative mean. Errors when that eigenvalue is complex or not simple.
pub fn leading_mode(problem: &AssembledProblem) -> Result<(f64, DVector<f64>)> {
    leading_mode_of(&problem.a_b, problem)
}

/// Leading mode of the M-adjoint L_B* (the pencil on A_Bᵀ). For symmetric
/// problems this coincides with [`leading_mode`].
pub fn adjoint_leading_mode(problem: &AssembledProblem) -> Result<(f64, DVector<f64>)> {
    leading_mode_of(&problem.a_b.transpose(), problem)
}

/// What the spectrum near the imaginary axis looks like for an accretive
/// boundary operator.
#[derive(Debug, Clone, Serialize)]
pub enum PeripheralClassification {
    /// The hypothesis B + B* ⪰ 0 fails, so no structure is claimed.
    NotApplicable {
        reason: String,
    },
    Classified(PeripheralReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct PeripheralReport {
    pub spectral_bound: f64,
    /// ‖B_h 𝟏‖_∞ ≤ tol: the boundary operator kills constants.
    pub annihilates_constants: bool,
    /// Some eigenvalue satisfies |λ| ≤ 1e−8.
    pub zero_in_spectrum: bool,
    /// Number of eigenvalues with |Re λ| ≤ 1e−8.
    pub peripheral_count: usize,
    /// The peripheral spectrum is exactly {0}.
    pub unique_peripheral: bool,
    /// Eigenvector at 0 is constant to 1e−8 (false when 0 ∉ σ).
    pub kernel_constant: bool,
    /// Number of eigenvalues with |λ| ≤ 1e−8.
    pub kernel_dimension: usize,
}

/// Classify the peripheral spectrum under the accretivity hypothesis:
/// checks that the semigroup is bounded (s ≤ 0 up to tolerance), whether 0
/// is an eigenvalue, whether it is the only peripheral one, and whether its
/// eigenspace is the constants. Callers can then compare
/// `annihilates_constants` with `zero_in_spectrum`: the two are equivalent.
pub fn classify_peripheral_spectrum(
    problem: &AssembledProblem,
) -> Result<PeripheralClassification> {
    let accretivity = problem.boundary.symmetric_part_bound();
    let b_scale = 1.0 + problem.boundary.matrix.abs().max();
    if accretivity < -1e-10 * b_scale {
        return Ok(PeripheralClassification::NotApplicable {
            reason: format!(
                "B + B* has a negative eigenvalue {accretivity:.6e}; accretivity fails"
            ),
        });
    }
    let report = solve_eigs(problem)?;
    let pairs = report.eigenvalue_pairs();
    let peripheral: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|(re, _)| re.abs() <= 1e-8)
        .collect();
    let kernel_dimension = pairs
        .iter()
        .filter(|(re, im)| re.abs() <= 1e-8 && im.abs() <= 1e-8)
        .count();
    let zero_in_spectrum = kernel_dimension > 0;
    let ones = DVector::from_element(problem.boundary.n(), 1.0);
    let annihilates_constants = problem.boundary.apply(&ones).abs().max() <= 1e-10 * b_scale;
    Ok(PeripheralClassification::Classified(PeripheralReport {
        spectral_bound: report.spectral_bound,
        annihilates_constants,
        zero_in_spectrum,
        peripheral_count: peripheral.len(),
        unique_peripheral: peripheral.len() == 1 && zero_in_spectrum,
        kernel_constant: zero_in_spectrum
            && report.kernel_constant_defect.map_or(false, |d| d <= 1e-8),
        kernel_dimension,
    }))
}

/// Spectral bound against the measured growth rate of ‖E(t)‖_{L²}.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthComparison {
    pub spectral_bound: f64,
    /// Fitted slope of ln‖E(t)‖ over the latest decade of sample times.
    pub growth_rate: f64,
    pub difference: f64,
    pub consistent: bool,
    pub samples: Vec<(f64, f64)>,
}

/// Fit ln‖E(t)‖_M against t on the latest decade of `ts` and compare the
/// slope with the spectral bound: the two agree to 5% (plus an absolute
/// floor) for a generator with a spectral-gap-dominated long-time regime.
pub fn spectral_bound_vs_growth(
    problem: &AssembledProblem,
    ts: &[f64],
) -> Result<GrowthComparison> {
    let report = solve_eigs(problem)?;
    let s = report.spectral_bound;
    let sg = MatrixSemigroup::new(problem)?;
    let mut samples = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument("growth samples need t > 0".into()));
        }
        samples.push((t, sg.m_operator_norm(t)?.ln()));
    }
    let t_max = samples.iter().map(|&(t, _)| t).fold(0.0f64, f64::max);
    let tail: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(t, _)| t >= t_max / 10.0)
        .collect();
    if tail.len() < 3 {
        return Err(Error::InvalidArgument(
            "growth fit needs at least 3 sample times in the latest decade".into(),
        ));
    }
    let xs: Vec<f64> = tail.iter().map(|&(t, _)| t).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, y)| y).collect();
    let (slope, _, _) = linalg::linear_fit(&xs, &ys)?;
    let difference = (slope - s).abs();
    Ok(GrowthComparison {
        spectral_bound: s,
        growth_rate: slope,
        difference,
        consistent: difference <= 0.05 * (1.0 + s.abs()),
        samples,
    })
}
