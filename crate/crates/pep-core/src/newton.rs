//! Newton-basis pencil family: the dual bases K₁ᴺ/D₁ᴺ and K₂ᴺ/D₂ᴺ, the
//! colleague body, the (A, B) linearization family, Horner shifts, one-sided
//! factorizations and the recovery rules for eigenvectors and minimal bases.

use crate::config::Tolerances;
use crate::error::Error;
use crate::la::mat::{vec_norm, C64, CMat};
use crate::la::svd;
use crate::pencils::{
    assemble, AssembleMeta, BlockPencil, DualPair, DualQuad, Family, PolyVectorBasis, Side,
};
use crate::poly::{BasisKind, MatrixPolynomial, NodeSet};
use crate::polymat::{poly_from_node_factors, PolyMat};
use crate::Result;

/// A Newton pencil L(λ) = [[M_μᴺ + AK₁ᴺ + K₂ᴺᵀB, K₂ᴺᵀ], [K₁ᴺ, 0]].
#[derive(Debug, Clone)]
pub struct NewtonLinearization {
    pub pencil: BlockPencil,
    pub mu: usize,
    pub a: CMat,
    pub b: CMat,
    pub source: MatrixPolynomial,
}

fn check_newton(p: &MatrixPolynomial) -> Result<(usize, usize, usize, &NodeSet)> {
    if p.kind() != BasisKind::Newton {
        return Err(Error::Invalid(format!(
            "expected a Newton-basis polynomial, got '{}'",
            p.kind().name()
        )));
    }
    if p.grade() == 0 {
        return Err(Error::ParamRange("grade must be at least 1 to linearize".into()));
    }
    Ok((p.grade(), p.rows(), p.cols(), p.nodes().expect("validated at construction")))
}

fn check_mu(mu: usize, k: usize) -> Result<()> {
    if mu > k - 1 {
        return Err(Error::ParamRange(format!("μ must satisfy 0 ≤ μ ≤ k−1 = {}, got {mu}", k - 1)));
    }
    Ok(())
}

/// γ_j(λ)·I as a pencil block.
fn gamma_block(nodes: &NodeSet, j: usize, size: usize) -> PolyMat {
    let x = nodes.x(j);
    PolyMat::linear(CMat::scaled_eye(size, -x), CMat::eye(size))
}

/// The dual minimal basis pairs (K₁ᴺ, D₁ᴺ) and (K₂ᴺ, D₂ᴺ) for the given
/// nodes, grade, parameter and block sizes. Empty K blocks occur at
/// μ = 0 (K₂) and μ = k−1 (K₁).
pub fn dual_bases(nodes: &NodeSet, k: usize, mu: usize, n: usize, m: usize) -> Result<DualQuad> {
    if nodes.len() != k {
        return Err(Error::Nodes(format!(
            "Newton constructions with grade {k} need exactly {k} nodes, got {}",
            nodes.len()
        )));
    }
    check_mu(mu, k)?;

    // K₁ᴺ: (k−μ−1) × (k−μ) blocks; row j has −I at j and γ_{k−j}I at j+1.
    let k1 = if k - mu - 1 == 0 {
        PolyMat::zeros(0, (k - mu) * n)
    } else {
        let mut grid = Vec::new();
        for j in 1..=(k - mu - 1) {
            let mut row = vec![PolyMat::zeros(n, n); k - mu];
            row[j - 1] = PolyMat::constant(CMat::scaled_eye(n, C64::new(-1.0, 0.0)));
            row[j] = gamma_block(nodes, k - j, n);
            grid.push(row);
        }
        PolyMat::from_blocks(&grid)
    };

    // D₁ᴺᵀ: block j carries n_{μ+1}^{k−j}·I for j = 1..k−μ.
    let d1t = PolyMat::vstack(
        &(1..=(k - mu))
            .map(|j| {
                let hi = k - j;
                let poly = if hi > mu {
                    poly_from_node_factors(nodes, (mu + 1)..=hi)
                } else {
                    vec![C64::new(1.0, 0.0)]
                };
                PolyMat::scalar_identity(n, &poly)
            })
            .collect::<Vec<_>>(),
    );

    // K₂ᴺ: μ × (μ+1) blocks; row j has −I at j and γ_{μ+1−j}I at j+1.
    let k2 = if mu == 0 {
        PolyMat::zeros(0, (mu + 1) * m)
    } else {
        let mut grid = Vec::new();
        for j in 1..=mu {
            let mut row = vec![PolyMat::zeros(m, m); mu + 1];
            row[j - 1] = PolyMat::constant(CMat::scaled_eye(m, C64::new(-1.0, 0.0)));
            row[j] = gamma_block(nodes, mu + 1 - j, m);
            grid.push(row);
        }
        PolyMat::from_blocks(&grid)
    };

    // D₂ᴺᵀ: block i carries n_{μ+1−i}·I for i = 1..μ+1 (n₀ = 1).
    let d2t = PolyMat::vstack(
        &(1..=(mu + 1))
            .map(|i| {
                let t = mu + 1 - i;
                let poly = if t >= 1 {
                    poly_from_node_factors(nodes, 1..=t)
                } else {
                    vec![C64::new(1.0, 0.0)]
                };
                PolyMat::scalar_identity(m, &poly)
            })
            .collect::<Vec<_>>(),
    );

    Ok(DualQuad {
        k1: DualPair {
            k: k1,
            d: d1t.transpose(),
            family: Family::Newton,
            param: mu,
            block_size: n,
            nodes: Some(nodes.clone()),
        },
        k2: DualPair {
            k: k2,
            d: d2t.transpose(),
            family: Family::Newton,
            param: mu,
            block_size: m,
            nodes: Some(nodes.clone()),
        },
    })
}

/// Colleague body M_μᴺ: top row [γ_k P_k + P_{k−1}, P_{k−2}, …, P_μ], the
/// trailing column below it carrying P_{μ−1}, …, P₁, P₀.
fn colleague_body(p: &MatrixPolynomial, mu: usize) -> PolyMat {
    let (k, m, n, nodes) = check_newton(p).expect("caller validated");
    let mut grid: Vec<Vec<PolyMat>> = (0..=mu).map(|_| vec![PolyMat::zeros(m, n); k - mu]).collect();
    let xk = nodes.x(k);
    grid[0][0] = PolyMat::linear(
        p.coeff(k - 1).sub(&p.coeff(k).scale(xk)),
        p.coeff(k).clone(),
    );
    for j in 2..=(k - mu) {
        grid[0][j - 1] = PolyMat::constant(p.coeff(k - j).clone());
    }
    for i in 2..=(mu + 1) {
        grid[i - 1][k - mu - 1] = PolyMat::constant(p.coeff(mu + 1 - i).clone());
    }
    PolyMat::from_blocks(&grid)
}

fn assemble_newton(
    p: &MatrixPolynomial,
    mu: usize,
    body: PolyMat,
    a: CMat,
    b: CMat,
) -> Result<NewtonLinearization> {
    let (k, m, n, nodes) = check_newton(p)?;
    let duals = dual_bases(nodes, k, mu, n, m)?;
    let pencil = assemble(
        &body,
        &duals.k1.k,
        &duals.k2.k,
        AssembleMeta {
            family: Family::Newton,
            param: mu,
            body_row_blocks: vec![m; mu + 1],
            k1_row_blocks: vec![n; k - mu - 1],
            body_col_blocks: vec![n; k - mu],
            k2_row_blocks: vec![m; mu],
        },
    )?;
    Ok(NewtonLinearization { pencil, mu, a, b, source: p.clone() })
}

/// The colleague Newton pencil of P associated with μ (A = B = 0).
pub fn colleague(p: &MatrixPolynomial, mu: usize) -> Result<NewtonLinearization> {
    let (k, m, n, _) = check_newton(p)?;
    check_mu(mu, k)?;
    let body = colleague_body(p, mu);
    let a = CMat::zeros((mu + 1) * m, (k - mu - 1) * n);
    let b = CMat::zeros(mu * m, (k - mu) * n);
    assemble_newton(p, mu, body, a, b)
}

/// A member of the Newton linearization family: body M_μᴺ + AK₁ᴺ + K₂ᴺᵀB.
pub fn family(p: &MatrixPolynomial, mu: usize, a: &CMat, b: &CMat) -> Result<NewtonLinearization> {
    let (k, m, n, nodes) = check_newton(p)?;
    check_mu(mu, k)?;
    if a.rows() != (mu + 1) * m || a.cols() != (k - mu - 1) * n {
        return Err(Error::Dimension(format!(
            "A must be {}x{}, got {}x{}",
            (mu + 1) * m,
            (k - mu - 1) * n,
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != mu * m || b.cols() != (k - mu) * n {
        return Err(Error::Dimension(format!(
            "B must be {}x{}, got {}x{}",
            mu * m,
            (k - mu) * n,
            b.rows(),
            b.cols()
        )));
    }
    let duals = dual_bases(nodes, k, mu, n, m)?;
    let mut body = colleague_body(p, mu);
    if !duals.k1.k.is_empty() {
        body = body.add(&duals.k1.k.lmul_const(a));
    }
    if !duals.k2.k.is_empty() {
        body = body.add(&duals.k2.k.transpose().rmul_const(b));
    }
    assemble_newton(p, mu, body, a.clone(), b.clone())
}

/// The i-th Horner shift Pⁱ(λ) evaluated by the recurrence
/// P¹ = γ_k P_k + P_{k−1}, P^{t+1} = γ_{k−t} Pᵗ + P_{k−t−1}.
pub fn horner_shift(p: &MatrixPolynomial, i: usize, lambda: C64) -> Result<CMat> {
    let (k, _, _, nodes) = check_newton(p)?;
    if i == 0 || i > k {
        return Err(Error::ParamRange(format!("Horner shift index must satisfy 1 ≤ i ≤ {k}, got {i}")));
    }
    let gamma_k = lambda - nodes.x(k);
    let mut acc = p.coeff(k).scale(gamma_k).add(p.coeff(k - 1));
    for t in 1..i {
        let g = lambda - nodes.x(k - t);
        acc = acc.scale(g).add(p.coeff(k - t - 1));
    }
    Ok(acc)
}

/// Horner shift as a matrix polynomial, via the same recurrence in
/// coefficient space.
pub fn horner_shift_poly(p: &MatrixPolynomial, i: usize) -> Result<PolyMat> {
    let (k, _, _, nodes) = check_newton(p)?;
    if i == 0 || i > k {
        return Err(Error::ParamRange(format!("Horner shift index must satisfy 1 ≤ i ≤ {k}, got {i}")));
    }
    let xk = nodes.x(k);
    let mut acc = PolyMat::linear(p.coeff(k - 1).sub(&p.coeff(k).scale(xk)), p.coeff(k).clone());
    for t in 1..i {
        let x = nodes.x(k - t);
        acc = acc
            .mul_scalar_poly(&[-x, C64::new(1.0, 0.0)])
            .add(&PolyMat::constant(p.coeff(k - t - 1).clone()));
    }
    Ok(acc)
}

/// One-sided factor matrices for the colleague pencil: L·H = e_{μ+1} ⊗ P and
/// G·L = e_{k−μ}ᵀ ⊗ P.
pub struct OneSided {
    pub h: PolyMat,
    pub g: PolyMat,
    /// 1-based row block of L·H carrying P.
    pub right_unit: usize,
    /// 1-based column block of G·L carrying P.
    pub left_unit: usize,
}

pub fn one_sided(p: &MatrixPolynomial, mu: usize) -> Result<OneSided> {
    let (k, _, n, nodes) = check_newton(p)?;
    check_mu(mu, k)?;
    let m = p.rows();
    let duals = dual_bases(nodes, k, mu, n, m)?;

    let h = if mu == 0 {
        duals.k1.d.transpose()
    } else {
        let mut parts = vec![duals.k1.d.transpose()];
        for t in (k - mu)..=(k - 1) {
            parts.push(horner_shift_poly(p, t)?);
        }
        PolyMat::vstack(&parts)
    };

    let g = if mu == k - 1 {
        duals.k2.d.clone()
    } else {
        let n_mu = if mu >= 1 {
            poly_from_node_factors(nodes, 1..=mu)
        } else {
            vec![C64::new(1.0, 0.0)]
        };
        let mut parts = vec![duals.k2.d.clone()];
        for t in 1..=(k - mu - 1) {
            parts.push(horner_shift_poly(p, t)?.mul_scalar_poly(&n_mu));
        }
        PolyMat::hstack(&parts)
    };

    Ok(OneSided { h, g, right_unit: mu + 1, left_unit: k - mu })
}

/// Result of mapping a pencil eigenvector back to the polynomial.
#[derive(Debug, Clone)]
pub struct EigvecRecovery {
    /// The guaranteed block, valid for every admissible eigenvector.
    pub primary: Vec<C64>,
    /// 1-based block index the primary was read from.
    pub primary_block: usize,
    /// All blocks known valid under the node-avoidance condition.
    pub valid: Vec<(usize, Vec<C64>)>,
    /// Blocks with no validity guarantee at this λ (node coincidence).
    pub unreliable: Vec<usize>,
}

fn split_blocks(v: &[C64], sizes: &[usize]) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut off = 0;
    for &s in sizes {
        out.push(v[off..off + s].to_vec());
        off += s;
    }
    out
}

/// Recover an eigenvector of P from an eigenvector of the linearization.
/// `lambda = None` encodes the eigenvalue at infinity.
pub fn recover_eigenvector(
    lin: &NewtonLinearization,
    lambda: Option<C64>,
    vector: &[C64],
    side: Side,
    tol: &Tolerances,
) -> Result<EigvecRecovery> {
    let k = lin.source.grade();
    let mu = lin.mu;
    let nodes = lin.source.nodes().expect("newton source");
    let sizes = match side {
        Side::Right => &lin.pencil.col_blocks,
        Side::Left => &lin.pencil.row_blocks,
    };
    if vector.len() != sizes.iter().sum::<usize>() {
        return Err(Error::Dimension(format!(
            "vector length {} does not match the pencil partition",
            vector.len()
        )));
    }
    let blocks = split_blocks(vector, sizes);
    let total = vec_norm(vector).max(f64::MIN_POSITIVE);

    let (primary_block, candidate_range, excluded_nodes): (usize, Vec<usize>, Vec<usize>) =
        match (side, lambda) {
            (Side::Right, Some(_)) => (k - mu, (1..=k - mu).collect(), ((mu + 1)..=(k.saturating_sub(1))).collect()),
            (Side::Left, Some(_)) => (mu + 1, (1..=mu + 1).collect(), (1..=mu).collect()),
            (_, None) => (1, vec![1], vec![]),
        };

    let mut valid = Vec::new();
    let mut unreliable = Vec::new();
    if let Some(lam) = lambda {
        let on_excluded = excluded_nodes
            .iter()
            .any(|&j| (lam - nodes.x(j)).norm() <= tol.node_coincidence * (1.0 + nodes.x(j).norm()));
        for &b in &candidate_range {
            if b == primary_block {
                valid.push((b, blocks[b - 1].clone()));
            } else if on_excluded {
                unreliable.push(b);
            } else if vec_norm(&blocks[b - 1]) > 1e-8 * total {
                valid.push((b, blocks[b - 1].clone()));
            }
        }
    } else {
        valid.push((1, blocks[0].clone()));
    }

    let primary = blocks[primary_block - 1].clone();
    if vec_norm(&primary) <= 1e-8 * total {
        return Err(Error::ZeroRecoveredBlock);
    }
    Ok(EigvecRecovery { primary, primary_block, valid, unreliable })
}

/// Map a minimal basis of the pencil nullspace to one of the polynomial:
/// block extraction plus the degree shift −deg D₁ (right) / −deg D₂ (left).
pub fn recover_minimal_basis(
    lin: &NewtonLinearization,
    basis: &PolyVectorBasis,
    tol: &Tolerances,
) -> Result<(PolyVectorBasis, Vec<usize>)> {
    let k = lin.source.grade();
    let mu = lin.mu;
    let (block, shift, sizes) = match basis.side {
        Side::Right => (k - mu, k - mu - 1, &lin.pencil.col_blocks),
        Side::Left => (mu + 1, mu, &lin.pencil.row_blocks),
    };
    extract_basis_block(lin_extract_args(basis, block, shift, sizes), tol)
}

pub(crate) struct ExtractArgs<'a> {
    pub basis: &'a PolyVectorBasis,
    pub block: usize,
    pub shift: usize,
    pub sizes: &'a [usize],
}

pub(crate) fn lin_extract_args<'a>(
    basis: &'a PolyVectorBasis,
    block: usize,
    shift: usize,
    sizes: &'a [usize],
) -> ExtractArgs<'a> {
    ExtractArgs { basis, block, shift, sizes }
}

/// Shared extraction: take a 1-based block from each vector polynomial,
/// validate independence, and shift the reported indices.
pub(crate) fn extract_basis_block(
    args: ExtractArgs<'_>,
    tol: &Tolerances,
) -> Result<(PolyVectorBasis, Vec<usize>)> {
    let offs = crate::pencils::cumulative(args.sizes);
    let i0 = offs[args.block - 1];
    let size = args.sizes[args.block - 1];
    let mut vectors = Vec::with_capacity(args.basis.vectors.len());
    let mut degrees = Vec::with_capacity(args.basis.vectors.len());
    for (v, &d) in args.basis.vectors.iter().zip(&args.basis.degrees) {
        let ext = v.extract_rows(i0, size).trim(1e-12);
        if d < args.shift {
            return Err(Error::Rank(format!(
                "pencil-level index {d} is below the degree shift {}",
                args.shift
            )));
        }
        degrees.push(d - args.shift);
        vectors.push(ext);
    }
    // Independence: stack every coefficient of every vector as one column.
    let max_len = vectors.iter().map(|v| v.coeffs().len()).max().unwrap_or(1);
    let stacked = CMat::from_fn(size * max_len, vectors.len(), |i, j| {
        let (t, r) = (i / size, i % size);
        vectors[j].coeff(t)[(r, 0)]
    });
    if !vectors.is_empty() && svd::rank(&stacked, tol.rank_rel) < vectors.len() {
        return Err(Error::DependentRecovery);
    }
    Ok((
        PolyVectorBasis {
            vectors,
            degrees: degrees.clone(),
            side: args.basis.side,
            certificate: args.basis.certificate,
            rank_warning: args.basis.rank_warning.clone(),
        },
        degrees,
    ))
}
