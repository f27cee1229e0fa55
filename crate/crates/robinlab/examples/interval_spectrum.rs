//! The two-endpoint coupled interval: FEM spectra against the bisection
//! oracle across the coupling strength b.
//!
//! The boundary operator is the 2×2 matrix [[−2b, b], [b, −2b]] acting on
//! the endpoint values of [−1, 1]. Its positive point spectrum is governed
//! by two transcendental branch equations with a zero crossing at b = 1/3
//! (eigenfunction x) and, for b > 1/3, a second branch whose sinh-shaped
//! root overtakes the cosh one and drags the leading eigenfunction away
//! from symmetry and positivity.

use robinlab::assembly::{assemble, CoefficientField, CoefficientSpec};
use robinlab::boundary::{discretize, BoundaryOperatorSpec};
use robinlab::geometry::build_interval_mesh;
use robinlab::oracles;
use robinlab::spectral::leading_mode;
use robinlab::Result;

fn coupling(b: f64) -> BoundaryOperatorSpec {
    BoundaryOperatorSpec::ExplicitMatrix {
        entries: vec![vec![-2.0 * b, b], vec![b, -2.0 * b]],
    }
}

fn main() -> Result<()> {
    println!("coupled interval [-1, 1], boundary matrix [[-2b, b], [b, -2b]]\n");

    println!("{:>6} {:>22} {:>22} {:>12}", "b", "FEM leading (n = 400)", "oracle -mu^2", "abs error");
    for &b in &[0.1, 0.2, 0.3, 1.0 / 3.0, 0.5, 2.0] {
        let mesh = build_interval_mesh(-1.0, 1.0, 400)?;
        let coeff = CoefficientField::new(CoefficientSpec::Constant(1.0))?;
        let op = discretize(&coupling(b), &mesh)?;
        let problem = assemble(&mesh, coeff, op)?;
        let (lambda, _) = leading_mode(&problem)?;
        let spectrum = oracles::interval_example_spectrum(b)?;
        // The leading root is the one with the largest mu; past the branch
        // crossing b* that is the sinh-shaped F2 root, not the F1 one.
        let top = spectrum.roots.last().expect("b > 0 has at least one root");
        let oracle = -top.lambda;
        println!(
            "{:>6.4} {:>22.12} {:>22.12} {:>12.3e}  {:?}",
            b,
            lambda,
            oracle,
            (lambda - oracle).abs(),
            top.profile
        );
    }

    // The sign change of the leading eigenvalue happens exactly at b = 1/3,
    // where the eigenfunction is the coordinate x itself.
    let spectrum = oracles::interval_example_spectrum(1.0 / 3.0)?;
    println!(
        "\nb = 1/3: oracle reports a zero eigenvalue ({}), leading root mu = {:.12}",
        spectrum.zero_eigenvalue, spectrum.roots[0].mu
    );

    // Branch crossing: beyond it the odd sinh profile leads.
    let mu_star = oracles::crossing_point();
    println!("branch crossing mu* = arctanh(1/sqrt(3)) = {mu_star:.12}");
    let b2 = oracles::interval_example_spectrum(2.0)?;
    for root in &b2.roots {
        println!(
            "b = 2: {:?} branch, mu = {:.10}, eigenvalue {:.6}, profile {:?}",
            root.branch, root.mu, root.lambda, root.profile
        );
    }

    // Convergence order of the FEM eigenvalue toward the oracle.
    let (rows, order) = oracles::oracle_vs_fem_interval(0.2, &[100, 200, 400])?;
    println!("\nconvergence at b = 0.2:");
    for row in &rows {
        println!("  n = {:>4}: error {:.3e}", row.resolution, row.error);
    }
    println!("  observed order {order:.2}");
    Ok(())
}
