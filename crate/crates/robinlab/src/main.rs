//! Command line front end: JSON problem configs in, deterministic artifacts
//! out. Every number an artifact contains is formatted with fixed width, so
//! the same config and seed reproduce the same bytes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use robinlab::assembly::AssembledProblem;
use robinlab::boundary::BoundaryOperatorSpec;
use robinlab::config::{DomainSpec, InitialData, ProblemConfig};
use robinlab::geometry::SymmetryTag;
use robinlab::oracles;
use robinlab::positivity::{self, EventualPositivity};
use robinlab::report::{self, CsvTable, ReportEnvelope};
use robinlab::semigroup::{self, MatrixSemigroup, Scheme};
use robinlab::spectral::{self, Eigensystem};
use robinlab::symmetry::{self, CommutantCheck, GroupKind, InvariantModeOutcome};
use robinlab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "robinlab",
    version,
    about = "Heat semigroups under generalized (possibly non-local) Robin boundary conditions"
)]
struct Cli {
    /// Problem configuration file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the config's random seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Suppress progress output on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    ImplicitEuler,
    CrankNicolson,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::ImplicitEuler => Scheme::ImplicitEuler,
            SchemeArg::CrankNicolson => Scheme::CrankNicolson,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Basic,
    Ultra,
    Symmetry,
    Domination,
    All,
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::Basic => "basic",
            SuiteArg::Ultra => "ultra",
            SuiteArg::Symmetry => "symmetry",
            SuiteArg::Domination => "domination",
            SuiteArg::All => "all",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the eigenproblem; write spectrum.json and eigenvectors.csv.
    Spectrum {
        /// Number of eigenvector columns to export.
        #[arg(long, default_value_t = 6)]
        count: usize,
    },
    /// Run the heat flow from an initial datum; write trace.csv.
    Evolve {
        /// Initial datum: constant | hat:K | x | one_minus_r2.
        #[arg(long, default_value = "constant")]
        u0: String,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = SchemeArg::CrankNicolson)]
        scheme: SchemeArg,
        /// Record every k-th step (the final state is always recorded).
        #[arg(long, default_value_t = 1, value_name = "K")]
        record_every: usize,
    },
    /// Search for eventual positivity; write certificate.json and margins.csv.
    Positivity {
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Number of dyadic grid times (at least 10).
        #[arg(long, default_value_t = 12)]
        grid: usize,
        /// Rescale the kernel by e^{−st} (s the spectral bound) so margins
        /// stay bounded for growing semigroups.
        #[arg(long)]
        normalize: bool,
    },
    /// Fit the L²→L∞ decay exponent; write ultra.json.
    Ultra {
        /// Smallest sample time (default: just above the mesh floor 4h²).
        #[arg(long)]
        t_min: Option<f64>,
        /// Largest sample time (default 1.0; must stay ≤ 1).
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Run a verification suite; exit 4 when any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Emit reference tables computed independently of the FEM path.
    Oracle {
        /// Largest μ in the branch table.
        #[arg(long, default_value_t = 8.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Also solve the interval branch roots at this coupling strength.
        #[arg(long)]
        b: Option<f64>,
        /// Angular modes |k| ≤ k_max for the disk mode table.
        #[arg(long, default_value_t = 8)]
        k_max: u64,
        #[arg(long, default_value_t = 256)]
        n_radial: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Everything a subcommand needs: the effective config (overrides applied),
/// its hash, and where artifacts go.
struct Ctx {
    config: ProblemConfig,
    sha: String,
    out: PathBuf,
    quiet: bool,
}

impl Ctx {
    fn from_cli(cli: &Cli) -> Result<Self> {
        let path = cli
            .config
            .as_ref()
            .ok_or_else(|| Error::Config("this subcommand needs --config <PATH>".into()))?;
        let mut config = ProblemConfig::from_file(path)?;
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        if let Some(out) = &cli.out {
            config.output_dir = out.to_string_lossy().into_owned();
        }
        let sha = config.problem_sha256()?;
        let out = PathBuf::from(&config.output_dir);
        Ok(Self { config, sha, out, quiet: cli.quiet })
    }

    fn note(&self, msg: &str) {
        if !self.quiet {
            println!("{msg}");
        }
    }

    fn write_json<T: Serialize>(&self, name: &str, payload: T) -> Result<PathBuf> {
        let envelope = ReportEnvelope::new(self.sha.clone(), self.config.seed, payload);
        let mut text = report::to_canonical_json(&envelope)?;
        text.push('\n');
        let path = self.out.join(name);
        report::write_atomic(&path, text.as_bytes())?;
        self.note(&format!("wrote {}", path.display()));
        Ok(path)
    }

    fn write_csv(&self, name: &str, table: &CsvTable) -> Result<PathBuf> {
        let path = self.out.join(name);
        table.write(&path)?;
        self.note(&format!("wrote {}", path.display()));
        Ok(path)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum { count } => cmd_spectrum(&Ctx::from_cli(&cli)?, count),
        Command::Evolve { ref u0, t_end, dt, scheme, record_every } => {
            cmd_evolve(&Ctx::from_cli(&cli)?, u0, t_end, dt, scheme.into(), record_every)
        }
        Command::Positivity { t_max, grid, normalize } => {
            cmd_positivity(&Ctx::from_cli(&cli)?, t_max, grid, normalize)
        }
        Command::Ultra { t_min, t_max, samples } => {
            cmd_ultra(&Ctx::from_cli(&cli)?, t_min, t_max, samples)
        }
        Command::Verify { suite } => cmd_verify(&Ctx::from_cli(&cli)?, suite),
        Command::Oracle { mu_max, samples, b, k_max, n_radial } => {
            cmd_oracle(&cli, mu_max, samples, b, k_max, n_radial)
        }
    }
}

#[derive(Serialize)]
struct SpectrumPayload {
    spectral_bound: f64,
    leading: (f64, f64),
    dominant_gap: f64,
    dominant_is_simple: bool,
    kernel_constant_defect: Option<f64>,
    max_residual: f64,
    symmetric_path: bool,
    /// (re, im) pairs ascending by real part; eigenvalues of M⁻¹A_B, i.e.
    /// of −L_B after a sign flip.
    eigenvalues: Vec<(f64, f64)>,
}

fn coordinate_columns(problem: &AssembledProblem) -> Vec<&'static str> {
    if problem.mesh.dim == 1 {
        vec!["node", "x"]
    } else {
        vec!["node", "x", "y"]
    }
}

fn coordinate_cells(problem: &AssembledProblem, i: usize) -> Vec<String> {
    let mut cells = vec![i.to_string()];
    for d in 0..problem.mesh.dim {
        cells.push(report::fmt_f64(problem.mesh.vertices[i][d]));
    }
    cells
}

fn cmd_spectrum(ctx: &Ctx, count: usize) -> Result<()> {
    let problem = ctx.config.build_problem()?;
    let rep = spectral::solve_eigs(&problem)?;
    let payload = SpectrumPayload {
        spectral_bound: rep.spectral_bound,
        leading: (rep.leading.re, rep.leading.im),
        dominant_gap: rep.dominant_gap,
        dominant_is_simple: rep.dominant_is_simple,
        kernel_constant_defect: rep.kernel_constant_defect,
        max_residual: rep.max_residual,
        symmetric_path: matches!(rep.system, Eigensystem::Symmetric { .. }),
        eigenvalues: rep.eigenvalue_pairs(),
    };
    ctx.write_json("spectrum.json", &payload)?;

    let mut columns = coordinate_columns(&problem);
    let names: Vec<String>;
    let vector_of = |j: usize, i: usize| -> Option<f64> {
        match &rep.system {
            Eigensystem::Symmetric { vectors, .. } => Some(vectors[(i, j)]),
            Eigensystem::General { .. } => None,
        }
    };
    let k = match &rep.system {
        Eigensystem::Symmetric { values, .. } => count.min(values.len()),
        Eigensystem::General { .. } => 0,
    };
    names = (0..k).map(|j| format!("v{j}")).collect();
    columns.extend(names.iter().map(|s| s.as_str()));

    // The general (non-symmetric) path has no orthogonal eigenbasis to
    // export; fall back to the leading mode when it is simple and real.
    let leading = if k == 0 { spectral::leading_mode(&problem).ok() } else { None };
    let mut columns = columns;
    if leading.is_some() {
        columns.push("leading");
    }
    let mut table = CsvTable::new(&ctx.sha, &columns);
    for i in 0..problem.n() {
        let mut cells = coordinate_cells(&problem, i);
        for j in 0..k {
            cells.push(report::fmt_f64(vector_of(j, i).expect("symmetric path")));
        }
        if let Some((_, v)) = &leading {
            cells.push(report::fmt_f64(v[i]));
        }
        table.push_row(&cells);
    }
    ctx.write_csv("eigenvectors.csv", &table)?;
    ctx.note(&format!(
        "spectral bound s = {:.6e}, leading eigenvalue {:.6e} {:+.6e}i, gap {:.3e}",
        rep.spectral_bound, rep.leading.re, rep.leading.im, rep.dominant_gap
    ));
    Ok(())
}

fn cmd_evolve(
    ctx: &Ctx,
    u0: &str,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    record_every: usize,
) -> Result<()> {
    let problem = ctx.config.build_problem()?;
    let datum = InitialData::parse(u0)?;
    let u0_vec = datum.eval(&problem.mesh)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    // A growing problem makes M + dt·A_B lose definiteness at dt = 1/ω;
    // refuse anything at or beyond the pole instead of stepping into it.
    let (_, omega) = problem.garding_constants();
    if omega > 1e-12 && dt >= 1.0 / omega {
        return Err(Error::Numerical(format!(
            "dt = {dt} is too large: this problem grows with Gårding shift ω = {omega:.6e} \
             and the implicit step matrix hits a resolvent pole at dt = 1/ω = {:.6e}; \
             use dt ≤ {:.6e}",
            1.0 / omega,
            0.5 / omega
        )));
    }
    let states = semigroup::evolve_trace(&problem, u0_vec, t_end, dt, scheme, record_every)?;

    let mut columns = vec!["t".to_string(), "mass".to_string()];
    columns.extend((0..problem.n()).map(|i| format!("u{i}")));
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = CsvTable::new(&ctx.sha, &column_refs);
    for state in &states {
        let mass = problem.mass.dot(&state.u);
        let mut cells = vec![report::fmt_f64(state.t), report::fmt_f64(mass)];
        cells.extend(state.u.iter().map(|&v| report::fmt_f64(v)));
        table.push_row(&cells);
    }
    ctx.write_csv("trace.csv", &table)?;
    let last = states.last().expect("at least the initial state");
    ctx.note(&format!(
        "evolved to t = {} in {} recorded states; final mass {:.6e}",
        last.t,
        states.len(),
        problem.mass.dot(&last.u)
    ));
    Ok(())
}

#[derive(Serialize)]
struct PositivityPayload {
    normalize: bool,
    outcome: EventualPositivity,
    /// For a certificate: whether independent random probes in [t₀, 2t₀]
    /// reconfirmed nonnegativity.
    revalidated: Option<bool>,
}

fn cmd_positivity(ctx: &Ctx, t_max: f64, grid: usize, normalize: bool) -> Result<()> {
    let problem = ctx.config.build_problem()?;
    let outcome = positivity::find_eventual_positivity(&problem, t_max, grid, normalize)?;
    let revalidated = match &outcome {
        EventualPositivity::Certified(cert) => {
            Some(positivity::recheck_certificate(&problem, cert, ctx.config.seed)?)
        }
        EventualPositivity::NotFound { .. } => None,
    };
    let grid_rows: Vec<(f64, f64)> = match &outcome {
        EventualPositivity::Certified(cert) => cert.grid.clone(),
        EventualPositivity::NotFound { grid, .. } => grid.clone(),
    };
    match &outcome {
        EventualPositivity::Certified(cert) => ctx.note(&format!(
            "eventually positive: t0 = {:.6e}, margin delta = {:.6e}, shift s = {:.6e}, revalidated = {}",
            cert.t0,
            cert.delta,
            cert.spectral_shift,
            revalidated.unwrap_or(false)
        )),
        EventualPositivity::NotFound { witness, .. } => ctx.note(&format!(
            "no positivity onset up to t_max: worst kernel entry ({}, {}) at t = {:.6e} with value {:.6e}",
            witness.1, witness.2, witness.0, witness.3
        )),
    }
    ctx.write_json("certificate.json", &PositivityPayload { normalize, outcome, revalidated })?;
    let mut table = CsvTable::new(&ctx.sha, &["t", "delta"]);
    for (t, delta) in grid_rows {
        table.push_row(&[report::fmt_f64(t), report::fmt_f64(delta)]);
    }
    ctx.write_csv("margins.csv", &table)?;
    Ok(())
}

/// Default decay-fit sample times: geometric between just above the mesh
/// floor 4h² and 1, the range where the discrete kernel shows the continuum
/// exponent.
fn ultra_times(
    problem: &AssembledProblem,
    t_min: Option<f64>,
    t_max: Option<f64>,
    samples: usize,
) -> Result<Vec<f64>> {
    let h = problem.mesh.max_cell_diameter();
    let floor = 4.0 * h * h;
    let lo = t_min.unwrap_or(1.05 * floor);
    let hi = t_max.unwrap_or(1.0);
    if lo * 10.0 > hi {
        return Err(Error::Numerical(format!(
            "cannot fit a decay exponent: the sample range [{lo:.3e}, {hi:.3e}] spans less \
             than a decade above the mesh floor 4h² = {floor:.3e}; refine the mesh"
        )));
    }
    let n = samples.max(5);
    let ratio = (hi / lo).powf(1.0 / (n as f64 - 1.0));
    // Pin the endpoint: accumulated rounding must not push past hi.
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo * ratio.powi(i as i32) }).collect())
}

#[derive(Serialize)]
struct UltraPayload {
    mesh_floor: f64,
    dim: usize,
    samples: Vec<(f64, f64)>,
    c: f64,
    mu: f64,
    r_squared: f64,
}

fn cmd_ultra(ctx: &Ctx, t_min: Option<f64>, t_max: Option<f64>, samples: usize) -> Result<()> {
    let problem = ctx.config.build_problem()?;
    let ts = ultra_times(&problem, t_min, t_max, samples)?;
    let fit = semigroup::fit_ultracontractivity(&problem, &ts)?;
    let h = problem.mesh.max_cell_diameter();
    let payload = UltraPayload {
        mesh_floor: 4.0 * h * h,
        dim: ctx.config.domain.dim(),
        samples: fit.samples.clone(),
        c: fit.c,
        mu: fit.mu,
        r_squared: fit.r_squared,
    };
    ctx.write_json("ultra.json", &payload)?;
    ctx.note(&format!(
        "decay fit ‖E(t)‖ ≈ c·t^(−μ/4): μ = {:.4}, c = {:.4}, r² = {:.6}",
        fit.mu, fit.c, fit.r_squared
    ));
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    /// Fold an erroring probe into a failed check instead of aborting the
    /// suite: the report should show everything that was attempted.
    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct VerifyPayload {
    suite: String,
    passed: bool,
    checks: Vec<Check>,
}

fn verify_basic(problem: &AssembledProblem) -> Vec<Check> {
    let mut checks = Vec::new();
    let n = problem.n();
    let ones = DVector::from_element(n, 1.0);

    let k1 = (&problem.stiffness * &ones).abs().max();
    let kscale = 1.0 + problem.stiffness.abs().max();
    checks.push(Check::new(
        "stiffness_annihilates_constants",
        k1 <= 1e-10 * kscale,
        format!("‖K𝟏‖∞ = {k1:.3e}"),
    ));

    let mmin = problem.mass.min();
    checks.push(Check::new(
        "mass_positive",
        mmin > 0.0,
        format!("min nodal mass {mmin:.3e}, total volume {:.6e}", problem.volume()),
    ));

    let (c, omega) = problem.garding_constants();
    let lam = problem.garding_certificate();
    let ascale = 1.0 + problem.a_b.abs().max();
    checks.push(Check::new(
        "garding_inequality",
        lam >= -1e-8 * ascale,
        format!("sym(A_B) − {c:.3}·K + {omega:.6e}·M has λ_min = {lam:.3e}"),
    ));

    checks.push(Check::from_result(
        "eigensolve_residual",
        spectral::solve_eigs(problem).map(|rep| {
            (rep.max_residual <= 1e-8, format!("max scaled residual {:.3e}", rep.max_residual))
        }),
    ));

    checks.push(Check::from_result(
        "semigroup_law",
        (|| {
            let sg = MatrixSemigroup::new(problem)?;
            let half = sg.at(0.2)?;
            let full = sg.at(0.4)?;
            let defect = (&half * &half - &full).abs().max() / (1.0 + full.abs().max());
            Ok((defect <= 1e-9, format!("‖E(0.2)² − E(0.4)‖ = {defect:.3e}")))
        })(),
    ));

    checks.push(Check::from_result(
        "growth_matches_spectral_bound",
        spectral::spectral_bound_vs_growth(problem, &[0.5, 1.0, 2.0, 3.5, 5.0]).map(|g| {
            (
                g.consistent,
                format!(
                    "spectral bound {:.6e} vs fitted rate {:.6e}",
                    g.spectral_bound, g.growth_rate
                ),
            )
        }),
    ));

    checks
}

fn verify_ultra(problem: &AssembledProblem, dim: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    let fit = match ultra_times(problem, None, None, 8)
        .and_then(|ts| semigroup::fit_ultracontractivity(problem, &ts))
    {
        Ok(fit) => fit,
        Err(e) => {
            checks.push(Check::new("decay_fit", false, e.to_string()));
            return checks;
        }
    };
    checks.push(Check::new(
        "decay_fit_quality",
        fit.r_squared >= 0.98,
        format!("r² = {:.6} over {} samples", fit.r_squared, fit.samples.len()),
    ));
    let (lo, hi) = if dim == 1 { (1.7, 2.3) } else { (2.0, 3.0) };
    checks.push(Check::new(
        "decay_exponent_window",
        (lo..=hi).contains(&fit.mu),
        format!("fitted μ = {:.4}, required window [{lo}, {hi}] in d = {dim}", fit.mu),
    ));
    if problem.boundary.is_accretive(1e-10) {
        checks.push(Check::from_result(
            "contractivity",
            (|| {
                let sg = MatrixSemigroup::new(problem)?;
                let worst = [0.1f64, 1.0]
                    .iter()
                    .map(|&t| sg.m_operator_norm(t))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0f64, f64::max);
                Ok((worst <= 1.0 + 1e-9, format!("max ‖E(t)‖_M = {worst:.12}")))
            })(),
        ));
    } else {
        checks.push(Check::new(
            "contractivity",
            true,
            "not applicable: B + B* has a negative part, the semigroup may grow".to_string(),
        ));
    }
    checks
}

fn verify_symmetry(problem: &AssembledProblem) -> Vec<Check> {
    let mut checks = Vec::new();
    let kind = match problem.mesh.symmetry_tag {
        Some(SymmetryTag::Reflection1D) => GroupKind::Reflection1D,
        Some(SymmetryTag::Cyclic(s)) => GroupKind::CyclicRotation(s),
        None => {
            checks.push(Check::new(
                "symmetry_group",
                true,
                "not applicable: the mesh carries no symmetry".to_string(),
            ));
            return checks;
        }
    };
    let action = match symmetry::build_group_action(&problem.mesh, kind) {
        Ok(a) => a,
        Err(e) => {
            checks.push(Check::new("symmetry_group", false, e.to_string()));
            return checks;
        }
    };
    checks.push(Check::new(
        "symmetry_group",
        true,
        format!("group of order {} verified on the mesh", action.order()),
    ));
    let inv = action.invariance_defect(problem);
    checks.push(Check::new(
        "mesh_invariance",
        inv <= 1e-12,
        format!("mass/stiffness invariance defect {inv:.3e}"),
    ));
    checks.push(Check::from_result(
        "projection_identities",
        symmetry::symmetric_projection(&action, problem).map(|_| {
            (true, "P² = P, M-self-adjointness, and γP = Qγ all hold to 1e−12".to_string())
        }),
    ));
    checks.push(Check::from_result(
        "commutant_scalarity",
        symmetry::scalar_commutant_check(action.order(), 5).map(|c| match c {
            CommutantCheck::Verified { symmetric_defect, skew_survival } => (
                symmetric_defect <= 1e-12 && skew_survival >= 0.99,
                format!(
                    "averaged symmetric blocks are scalar (defect {symmetric_defect:.3e}), \
                     skew generator survives (norm ratio {skew_survival:.3})"
                ),
            ),
            CommutantCheck::NotApplicable { reason } => (true, format!("not applicable: {reason}")),
        }),
    ));
    match symmetry::verify_invariant_leading_eigenfunction(problem, &action) {
        Ok(InvariantModeOutcome::Verified(rep)) => checks.push(Check::new(
            "invariant_leading_mode",
            true,
            format!(
                "spectral bound {:.6e} > 0, ‖B restricted to mean-zero‖ = {:.6e} ≤ β = {:.6e}, \
                 asymmetry ‖(I−P)u‖_M = {:.3e}",
                rep.spectral_bound, rep.restricted_norm, rep.beta, rep.asymmetry
            ),
        )),
        Ok(InvariantModeOutcome::NotApplicable { failed_hypothesis }) => checks.push(Check::new(
            "invariant_leading_mode",
            true,
            format!("not applicable: {failed_hypothesis}"),
        )),
        Err(e) => checks.push(Check::new("invariant_leading_mode", false, e.to_string())),
    }
    checks
}

fn verify_domination(problem: &AssembledProblem, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let d = match semigroup::build_dominating_operator(problem) {
        Ok(d) => d,
        Err(e) => {
            checks.push(Check::new("domination_construction", false, e.to_string()));
            return checks;
        }
    };
    let bscale = 1.0 + problem.boundary.matrix.abs().max();
    checks.push(Check::new(
        "domination_construction",
        true,
        format!("β_aux = {:.6e}, resolvent parameter λ = {:.1e}", d.beta_aux, d.lambda),
    ));
    let (umin, umax) = d.u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
        (a.min(x), b.max(x))
    });
    checks.push(Check::new(
        "resolvent_profile_bounds",
        (0.5..=2.0).contains(&umin) && (0.5..=2.0).contains(&umax),
        format!("λR(λ)𝟏 ranges over [{umin:.4}, {umax:.4}] ⊆ [1/2, 2]"),
    ));
    checks.push(Check::new(
        "entrywise_monotonicity",
        d.entrywise_margin >= -1e-10 * bscale,
        format!("min entry of (−B₂) − (−B₁) and of −B₁: {:.3e}", d.entrywise_margin),
    ));
    checks.push(Check::new(
        "boundary_eigenrelation",
        d.eigen_relation_defect <= 1e-10 * (1.0 + d.beta_aux.abs()),
        format!("‖B₂γu − β_aux·γu‖∞ = {:.3e}", d.eigen_relation_defect),
    ));
    checks.push(Check::new(
        "nodal_supersolution",
        d.nodal_inequality_margin >= -1e-10 * (1.0 + d.lambda),
        format!("min of λMu + A_B₂u: {:.3e}", d.nodal_inequality_margin),
    ));
    checks.push(Check::from_result(
        "semigroup_domination",
        (|| {
            let dominated = robinlab::assembly::assemble(
                &problem.mesh,
                problem.coefficient,
                d.b2.clone(),
            )?;
            let check =
                semigroup::check_domination(problem, &dominated, &[0.1, 0.5, 1.0], 50, seed)?;
            let detail = match check.witness {
                Some(w) => format!("violated at t = {}, node {}: |E_Bf| = {:.6e} > {:.6e}", w.0, w.1, w.2, w.3),
                None => format!(
                    "|E_B(t)f| ≤ E_B₂(t)|f| over t ∈ {{0.1, 0.5, 1}}, 50 random trials plus \
                     boundary indicators; min dominating entry {:.3e}",
                    check.dominating_min_entry
                ),
            };
            Ok((check.holds && check.dominating_min_entry >= -1e-9, detail))
        })(),
    ));
    checks
}

fn cmd_verify(ctx: &Ctx, suite: SuiteArg) -> Result<()> {
    let problem = ctx.config.build_problem()?;
    let dim = ctx.config.domain.dim();
    let mut checks = Vec::new();
    match suite {
        SuiteArg::Basic => checks.extend(verify_basic(&problem)),
        SuiteArg::Ultra => checks.extend(verify_ultra(&problem, dim)),
        SuiteArg::Symmetry => checks.extend(verify_symmetry(&problem)),
        SuiteArg::Domination => checks.extend(verify_domination(&problem, ctx.config.seed)),
        SuiteArg::All => {
            checks.extend(verify_basic(&problem));
            checks.extend(verify_ultra(&problem, dim));
            checks.extend(verify_symmetry(&problem));
            checks.extend(verify_domination(&problem, ctx.config.seed));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        ctx.note(&format!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail));
    }
    let payload = VerifyPayload { suite: suite.name().to_string(), passed, checks };
    ctx.write_json(&format!("verify_{}.json", suite.name()), &payload)?;
    if passed {
        ctx.note("all checks passed");
        Ok(())
    } else {
        Err(Error::Verification(format!(
            "suite '{}' failed; see verify_{}.json",
            suite.name(),
            suite.name()
        )))
    }
}

fn cmd_oracle(
    cli: &Cli,
    mu_max: f64,
    samples: usize,
    b: Option<f64>,
    k_max: u64,
    n_radial: usize,
) -> Result<()> {
    // The oracle tables exist independently of any discretized problem; a
    // config is optional and only consulted for a convolution mode table.
    let config = match &cli.config {
        Some(path) => Some(ProblemConfig::from_file(path)?),
        None => None,
    };
    let sha = match &config {
        Some(c) => c.problem_sha256()?,
        None => "none".to_string(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| config.as_ref().map(|c| PathBuf::from(&c.output_dir)))
        .unwrap_or_else(|| PathBuf::from("."));
    let note = |msg: &str| {
        if !cli.quiet {
            println!("{msg}");
        }
    };

    let mut table = CsvTable::new(&sha, &["mu", "f1", "f2"]);
    for (mu, f1, f2) in oracles::branch_table(mu_max, samples) {
        table.push_row(&[report::fmt_f64(mu), report::fmt_f64(f1), report::fmt_f64(f2)]);
    }
    let path = out.join("branches.csv");
    table.write(&path)?;
    note(&format!("wrote {}", path.display()));

    if let Some(bval) = b {
        let spectrum = oracles::interval_example_spectrum(bval)?;
        let envelope = ReportEnvelope::new(sha.clone(), 0, &spectrum);
        let mut text = report::to_canonical_json(&envelope)?;
        text.push('\n');
        let path = out.join("interval_roots.json");
        report::write_atomic(&path, text.as_bytes())?;
        note(&format!("wrote {} ({} roots)", path.display(), spectrum.roots.len()));
    }

    if let Some(c) = &config {
        if let (DomainSpec::Disk { .. }, BoundaryOperatorSpec::Convolution { q_hat }) =
            (&c.domain, &c.boundary_operator)
        {
            let modes = oracles::disk_mode_spectrum(q_hat, k_max, n_radial)?;
            let mut table = CsvTable::new(&sha, &["k", "q", "lambda"]);
            for e in &modes.entries {
                table.push_row(&[
                    e.k.to_string(),
                    report::fmt_f64(e.q),
                    report::fmt_f64(e.lambda),
                ]);
            }
            let path = out.join("modes.csv");
            table.write(&path)?;
            note(&format!(
                "wrote {} (spectral bound {:.6e} from mode k = {})",
                path.display(),
                modes.spectral_bound,
                modes.minimizing_mode
            ));
        }
    }
    Ok(())
}
