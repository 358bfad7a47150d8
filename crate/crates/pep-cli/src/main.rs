//! Command-line front door: build polynomials by interpolation, linearize,
//! solve, verify and extract nullspaces over the shared JSON formats.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input/validation error,
//! 3 solver-level diagnostic.

use clap::{Parser, Subcommand};
use pep_core::config::Tolerances;
use pep_core::interp::{self, SampledFunction};
use pep_core::la::mat::{C64, CMat};
use pep_core::pencils::{duality_defect, is_minimal_basis, BlockPencil, Side};
use pep_core::poly::{BasisKind, MatrixPolynomial, NodeSet};
use pep_core::spectral::{
    self, build_linearization, nullspace_minimal_basis, verify_strong_linearization, Spectrum,
};
use pep_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pep",
    version,
    about = "Polynomial eigenvalue problems through block minimal basis pencils"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized check (reproducible runs).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance overrides, repeatable: --tol name=value.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Output file (defaults per command).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Interpolate a built-in or stored function into a polynomial basis.
    Interp {
        /// "exp" or "poly:<file.json>".
        #[arg(long = "fn")]
        function: String,
        /// Target basis: newton | lagrange | chebyshev1 | chebyshev2.
        #[arg(long)]
        basis: String,
        /// Grade of the interpolant.
        #[arg(long)]
        grade: usize,
        /// Node source: a JSON file of re/im pairs, or cheb1 | cheb2.
        #[arg(long)]
        nodes: Option<String>,
        /// Chebyshev node family used for collocation sampling (1 or 2).
        #[arg(long, default_value_t = 2)]
        kind: u8,
    },
    /// Build a pencil from a polynomial file.
    Linearize {
        input: PathBuf,
        #[arg(long)]
        mu: Option<usize>,
        #[arg(long)]
        eps: Option<usize>,
        /// Optional A block file (matrix JSON).
        #[arg(long = "a-file")]
        a_file: Option<PathBuf>,
        /// Optional B block file (matrix JSON).
        #[arg(long = "b-file")]
        b_file: Option<PathBuf>,
    },
    /// Solve the polynomial eigenvalue problem through a family pencil.
    Solve {
        input: PathBuf,
        #[arg(long)]
        mu: Option<usize>,
        #[arg(long)]
        eps: Option<usize>,
        /// Also compute left eigenvectors.
        #[arg(long)]
        left: bool,
    },
    /// Run the verification checks and write a report.
    Verify {
        input: PathBuf,
        /// Verify this pencil file instead of a freshly built colleague.
        #[arg(long)]
        pencil: Option<PathBuf>,
        #[arg(long)]
        mu: Option<usize>,
        #[arg(long)]
        eps: Option<usize>,
    },
    /// Minimal bases and indices of a singular polynomial, both sides.
    Nullspace {
        input: PathBuf,
        #[arg(long)]
        mu: Option<usize>,
        #[arg(long)]
        eps: Option<usize>,
    },
}

// ── error → exit code mapping ───────────────────────────────────────

struct CliError {
    code: &'static str,
    message: String,
    exit: u8,
}

impl CliError {
    fn new(code: &'static str, exit: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into(), exit }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let (code, exit) = match &e {
            CoreError::ParamRange(_) => ("PARAM_RANGE", 2),
            CoreError::Dimension(_) => ("DIMENSION", 2),
            CoreError::Nodes(_) => ("NODES", 2),
            CoreError::Invalid(_) => ("INVALID_INPUT", 2),
            CoreError::LikelySingular(_) => ("LIKELY_SINGULAR", 3),
            CoreError::SingularPencil(_) => ("SINGULAR_PENCIL", 3),
            CoreError::SingularMatrix => ("SINGULAR_MATRIX", 3),
            CoreError::NonConvergence(_) => ("BACKEND_NONCONVERGENCE", 3),
            CoreError::Rank(_) => ("RANK", 3),
            CoreError::ZeroRecoveredBlock | CoreError::DependentRecovery => ("RECOVERY", 3),
            CoreError::DeflationRemainder(_) => ("DEFLATION", 3),
        };
        CliError::new(code, exit, e.to_string())
    }
}

fn io_error(e: std::io::Error, path: &Path) -> CliError {
    CliError::new("IO", 2, format!("{}: {e}", path.display()))
}

fn format_error(e: serde_json::Error, path: &Path) -> CliError {
    CliError::new("FORMAT", 2, format!("{}: {e}", path.display()))
}

// ── file I/O ────────────────────────────────────────────────────────

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(e, path))?;
    serde_json::from_str(&text).map_err(|e| format_error(e, path))
}

/// Write-to-temp plus atomic rename: no partial output files on error.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
    std::fs::write(&tmp, contents).map_err(|e| io_error(e, &tmp))?;
    std::fs::rename(&tmp, path).map_err(|e| io_error(e, path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::new("FORMAT", 2, e.to_string()))?;
    write_atomic(path, &format!("{text}\n"))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

fn read_matrix(path: &Path) -> Result<CMat, CliError> {
    let j: MatrixJson = read_json(path)?;
    pep_core::poly::matrix_from_pairs(j.rows, j.cols, &j.data).map_err(CliError::from)
}

// ── shared helpers ──────────────────────────────────────────────────

fn parse_tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for item in overrides {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::new("TOL_SYNTAX", 2, format!("expected name=value, got '{item}'")))?;
        let v: f64 = value
            .parse()
            .map_err(|_| CliError::new("TOL_SYNTAX", 2, format!("bad tolerance value '{value}'")))?;
        if !tol.set(name, v) {
            return Err(CliError::new("TOL_NAME", 2, format!("unknown tolerance '{name}'")));
        }
    }
    Ok(tol)
}

/// μ for Newton/Lagrange bases, ε for Chebyshev; exactly one must apply.
fn pick_param(p: &MatrixPolynomial, mu: Option<usize>, eps: Option<usize>) -> Result<usize, CliError> {
    match p.kind() {
        BasisKind::Newton | BasisKind::Lagrange => match (mu, eps) {
            (Some(m), None) => Ok(m),
            (None, None) => Ok(0),
            _ => Err(CliError::new("PARAM_RANGE", 2, "use --mu with Newton/Lagrange input")),
        },
        BasisKind::Chebyshev1 | BasisKind::Chebyshev2 => match (mu, eps) {
            (None, Some(e)) => Ok(e),
            (None, None) => Ok(0),
            _ => Err(CliError::new("PARAM_RANGE", 2, "use --eps with Chebyshev input")),
        },
        BasisKind::Monomial => Err(CliError::new(
            "INVALID_INPUT",
            2,
            "monomial input has no pencil family; interpolate into a supported basis first",
        )),
    }
}

fn load_nodes(spec: &str, grade: usize) -> Result<NodeSet, CliError> {
    match spec {
        "cheb1" => interp::chebyshev_nodes(grade, 1).map_err(CliError::from),
        "cheb2" => interp::chebyshev_nodes(grade, 2).map_err(CliError::from),
        path => {
            let pairs: Vec<[f64; 2]> = read_json(Path::new(path))?;
            NodeSet::new(pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
                .map_err(CliError::from)
        }
    }
}

fn spectrum_str(s: &Spectrum) -> String {
    match s {
        Spectrum::Finite(z) => format!("{:+.12e} {:+.12e}i", z.re, z.im),
        Spectrum::Infinite => "infinity".into(),
    }
}

// ── commands ────────────────────────────────────────────────────────

fn cmd_interp(
    function: &str,
    basis: &str,
    grade: usize,
    nodes: Option<&str>,
    node_kind: u8,
    out: &Path,
) -> Result<(), CliError> {
    let f = match function {
        "exp" => SampledFunction::exp_demo(),
        other => match other.strip_prefix("poly:") {
            Some(path) => {
                let p: MatrixPolynomial = read_json(Path::new(path))?;
                SampledFunction::from_poly(&p)
            }
            None => {
                return Err(CliError::new(
                    "INVALID_INPUT",
                    2,
                    format!("unknown function '{other}'; use 'exp' or 'poly:<file>'"),
                ))
            }
        },
    };
    let kind = BasisKind::parse(basis)?;
    let default_nodes = if node_kind == 1 { "cheb1" } else { "cheb2" };
    let poly = match kind {
        BasisKind::Newton => {
            let ns = load_nodes(nodes.unwrap_or(default_nodes), grade)?;
            interp::divided_differences(&f, &ns)?
        }
        BasisKind::Lagrange => {
            let ns = load_nodes(nodes.unwrap_or(default_nodes), grade)?;
            interp::lagrange_sample(&f, &ns)?
        }
        BasisKind::Chebyshev1 => interp::chebyshev_coefficients(&f, grade, 1, node_kind)?,
        BasisKind::Chebyshev2 => interp::chebyshev_coefficients(&f, grade, 2, node_kind)?,
        BasisKind::Monomial => {
            return Err(CliError::new(
                "INVALID_INPUT",
                2,
                "interpolation targets are newton, lagrange, chebyshev1 or chebyshev2",
            ))
        }
    };
    // Surface, but do not reject, nearly coincident nodes.
    if let Some(ns) = poly.nodes() {
        for (i, j) in ns.close_pairs(1e-10) {
            eprintln!("warning: nodes {} and {} are nearly coincident", i + 1, j + 1);
        }
    }
    write_json(out, &poly)?;
    if let Some(dev) = interp::max_sampled_deviation(&f, &poly, 33) {
        println!("max sampled deviation on the domain grid: {dev:.3e} (diagnostic only)");
    }
    println!(
        "wrote {} ({}x{}, grade {}, basis {})",
        out.display(),
        poly.rows(),
        poly.cols(),
        poly.grade(),
        poly.kind().name()
    );
    Ok(())
}

fn cmd_linearize(
    input: &Path,
    mu: Option<usize>,
    eps: Option<usize>,
    a_file: Option<&Path>,
    b_file: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let p: MatrixPolynomial = read_json(input)?;
    let param = pick_param(&p, mu, eps)?;
    let a = a_file.map(read_matrix).transpose()?;
    let b = b_file.map(read_matrix).transpose()?;
    let lin = build_linearization(&p, param, a.as_ref(), b.as_ref())?;
    let pencil = lin.pencil();
    write_json(out, pencil)?;
    println!(
        "wrote {} ({}x{} pencil, family {}, parameter {}, row blocks {:?}, column blocks {:?})",
        out.display(),
        pencil.rows(),
        pencil.cols(),
        pencil.family.name(),
        pencil.param,
        pencil.row_blocks,
        pencil.col_blocks,
    );
    Ok(())
}

fn cmd_solve(
    input: &Path,
    mu: Option<usize>,
    eps: Option<usize>,
    left: bool,
    tol: &Tolerances,
    out: &Path,
) -> Result<(), CliError> {
    let p: MatrixPolynomial = read_json(input)?;
    let param = pick_param(&p, mu, eps)?;
    let sol = match spectral::solve_pep(&p, param, None, None, left, tol) {
        Err(CoreError::LikelySingular(msg)) => {
            return Err(CliError::new(
                "LIKELY_SINGULAR",
                3,
                format!("{msg}; run `pep nullspace` on this input"),
            ))
        }
        other => other?,
    };
    write_json(out, &sol)?;
    if let Some(ns) = p.nodes() {
        for pair in &sol.pairs {
            if let Spectrum::Finite(z) = pair.lambda {
                if let Some(i) = ns.proximity_index(z, tol.proximity) {
                    eprintln!(
                        "warning: eigenvalue {z} sits within the barycentric proximity band of node {}",
                        i + 1
                    );
                }
            }
        }
    }
    println!("{:<28} {:<12} condition", "eigenvalue", "residual");
    let mut worst = 0.0f64;
    for pair in &sol.pairs {
        worst = worst.max(pair.residual_right);
        println!(
            "{:<28} {:<12.3e} {:.3e}",
            spectrum_str(&pair.lambda),
            pair.residual_right,
            pair.condition
        );
    }
    println!("max residual {worst:.3e}; wrote {}", out.display());
    Ok(())
}

fn cmd_verify(
    input: &Path,
    pencil_file: Option<&Path>,
    mu: Option<usize>,
    eps: Option<usize>,
    tol: &Tolerances,
    seed: u64,
    out: &Path,
) -> Result<bool, CliError> {
    let p: MatrixPolynomial = read_json(input)?;
    let param = pick_param(&p, mu, eps)?;
    let mut checks = Vec::new();

    let pencil: BlockPencil = match pencil_file {
        Some(path) => read_json(path)?,
        None => {
            // Full construction checks only make sense for a freshly built
            // colleague: duality, minimality and the one-sided identities.
            let lin = build_linearization(&p, param, None, None)?;
            let duals = spectral::linearization_duals(&lin)?;
            let d1 = duality_defect(&duals.k1.k, &duals.k1.d, p.nodes())?;
            checks.push(spectral::CheckResult {
                name: "DUALITY_K1D1".into(),
                pass: d1 <= tol.duality_abs,
                defect: d1,
                detail: "sampled K₁D₁ᵀ defect".into(),
            });
            let d2 = duality_defect(&duals.k2.k, &duals.k2.d, p.nodes())?;
            checks.push(spectral::CheckResult {
                name: "DUALITY_K2D2".into(),
                pass: d2 <= tol.duality_abs,
                defect: d2,
                detail: "sampled K₂D₂ᵀ defect".into(),
            });
            for (name, q) in [
                ("MINIMALITY_K1", &duals.k1.k),
                ("MINIMALITY_K2", &duals.k2.k),
                ("MINIMALITY_D1", &duals.k1.d),
                ("MINIMALITY_D2", &duals.k2.d),
            ] {
                let cert = is_minimal_basis(q, tol, seed)?;
                checks.push(spectral::CheckResult {
                    name: name.into(),
                    pass: cert.minimal,
                    defect: if cert.minimal { 0.0 } else { 1.0 },
                    detail: format!("{:?}: {}", cert.kind, cert.detail),
                });
            }
            let (dr, dl) = spectral::one_sided_defects(&lin)?;
            checks.push(spectral::CheckResult {
                name: "ONESIDED_RIGHT".into(),
                pass: dr <= tol.one_sided_rel,
                defect: dr,
                detail: "sampled L·H − e⊗P defect".into(),
            });
            checks.push(spectral::CheckResult {
                name: "ONESIDED_LEFT".into(),
                pass: dl <= tol.one_sided_rel,
                defect: dl,
                detail: "sampled G·L − eᵀ⊗P defect".into(),
            });
            lin.pencil().clone()
        }
    };

    let spectral_report = verify_strong_linearization(&pencil, &p, tol)?;
    checks.extend(spectral_report.checks);
    let report = spectral::VerifyReport { checks };
    write_json(out, &report)?;
    for c in &report.checks {
        println!(
            "{} {:<22} defect {:.3e}  {}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.defect,
            c.detail
        );
    }
    println!("wrote {}", out.display());
    Ok(report.all_pass())
}

#[derive(Serialize)]
struct NullspaceSideJson {
    side: &'static str,
    pencil_indices: Vec<usize>,
    polynomial_indices: Vec<usize>,
    degree_shift: usize,
    certificate: String,
    rank_warning: Option<String>,
    /// Vector polynomials: per vector, per degree, the coefficient vector.
    vectors: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize)]
struct NullspaceJson {
    right: NullspaceSideJson,
    left: NullspaceSideJson,
}

fn cmd_nullspace(
    input: &Path,
    mu: Option<usize>,
    eps: Option<usize>,
    tol: &Tolerances,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let p: MatrixPolynomial = read_json(input)?;
    let param = pick_param(&p, mu, eps)?;
    let lin = build_linearization(&p, param, None, None)?;
    let pencil_poly = lin.pencil().as_polymat();

    let mut sides = Vec::new();
    for side in [Side::Right, Side::Left] {
        let pencil_basis = nullspace_minimal_basis(&pencil_poly, side, tol, seed)?;
        let (poly_basis, indices) = lin.recover_minimal_basis(&pencil_basis, tol)?;
        let shift = lin.degree_shift(side);
        sides.push(NullspaceSideJson {
            side: match side {
                Side::Right => "right",
                Side::Left => "left",
            },
            pencil_indices: pencil_basis.degrees.clone(),
            polynomial_indices: indices,
            degree_shift: shift,
            certificate: format!("{:?}", poly_basis.certificate),
            rank_warning: poly_basis.rank_warning.clone(),
            vectors: poly_basis
                .vectors
                .iter()
                .map(|v| {
                    v.coeffs()
                        .iter()
                        .map(|c| (0..c.rows()).map(|r| [c[(r, 0)].re, c[(r, 0)].im]).collect())
                        .collect()
                })
                .collect(),
        });
    }
    let mut it = sides.into_iter();
    let payload = NullspaceJson { right: it.next().unwrap(), left: it.next().unwrap() };
    if payload.right.pencil_indices.is_empty() && payload.left.pencil_indices.is_empty() {
        return Err(CliError::new(
            "INVALID_INPUT",
            2,
            "input appears regular (nullity 0 at probe points on both sides)",
        ));
    }
    write_json(out, &payload)?;
    println!(
        "right indices: pencil {:?} → polynomial {:?} (shift {})",
        payload.right.pencil_indices, payload.right.polynomial_indices, payload.right.degree_shift
    );
    println!(
        "left indices:  pencil {:?} → polynomial {:?} (shift {})",
        payload.left.pencil_indices, payload.left.polynomial_indices, payload.left.degree_shift
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let tol = parse_tolerances(&cli.tol)?;
    let default_out = |name: &str| PathBuf::from(name);
    match &cli.command {
        Command::Interp { function, basis, grade, nodes, kind } => {
            let out = cli.out.clone().unwrap_or_else(|| default_out("poly.json"));
            cmd_interp(function, basis, *grade, nodes.as_deref(), *kind, &out)?;
            Ok(0)
        }
        Command::Linearize { input, mu, eps, a_file, b_file } => {
            let out = cli.out.clone().unwrap_or_else(|| default_out("pencil.json"));
            cmd_linearize(input, *mu, *eps, a_file.as_deref(), b_file.as_deref(), &out)?;
            Ok(0)
        }
        Command::Solve { input, mu, eps, left } => {
            let out = cli.out.clone().unwrap_or_else(|| default_out("solution.json"));
            cmd_solve(input, *mu, *eps, *left, &tol, &out)?;
            Ok(0)
        }
        Command::Verify { input, pencil, mu, eps } => {
            let out = cli.out.clone().unwrap_or_else(|| default_out("report.json"));
            let all_pass = cmd_verify(input, pencil.as_deref(), *mu, *eps, &tol, cli.seed, &out)?;
            Ok(if all_pass { 0 } else { 1 })
        }
        Command::Nullspace { input, mu, eps } => {
            let out = cli.out.clone().unwrap_or_else(|| default_out("nullspace.json"));
            cmd_nullspace(input, *mu, *eps, &tol, cli.seed, &out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let payload = serde_json::json!({ "code": e.code, "message": e.message });
            eprintln!("{payload}");
            ExitCode::from(e.exit)
        }
    }
}
