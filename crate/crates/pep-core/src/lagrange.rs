//! Lagrange-basis pencil family over k+1 nodes: dual bases with rational
//! entries materialized by exact deflation, the two-display colleague body,
//! the coordinate expansions of the constant 1, one-sided factorizations
//! with coordinate-weighted right-hand sides, recovery rules including the
//! on-node sub-cases, and the literature reference pencil.

use crate::config::Tolerances;
use crate::error::Error;
use crate::la::mat::{vec_norm, C64, CMat};
use crate::newton::EigvecRecovery;
use crate::pencils::{
    assemble, AssembleMeta, BlockPencil, DualPair, DualQuad, Family, PolyVectorBasis, Side,
};
use crate::poly::{BasisKind, MatrixPolynomial, NodeSet};
use crate::polymat::{poly_from_node_factors, PolyMat};
use crate::Result;

/// Coordinates of the constant polynomial 1 in the D₂ᴸ and D₁ᴸ entry sets.
/// `a` stores a_1..a_{μ+1}; `b` stores b_{μ+1}..b_k.
#[derive(Debug, Clone)]
pub struct MuCoordinates {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub mu: usize,
    pub nodes: NodeSet,
}

impl MuCoordinates {
    /// a_i with the 1-based index of the construction.
    pub fn a_coord(&self, i: usize) -> C64 {
        self.a[i - 1]
    }

    /// b_i with the 1-based index of the construction (μ+1 ≤ i ≤ k).
    pub fn b_coord(&self, i: usize) -> C64 {
        self.b[i - self.mu - 1]
    }

    /// Worst defect of the two expansion identities over the sample points,
    /// scaled by the accumulated term magnitude.
    pub fn identity_defect(&self, k: usize, samples: &[C64]) -> f64 {
        let mu = self.mu;
        let nodes = &self.nodes;
        let mut worst = 0.0f64;
        for &lam in samples {
            // Σ a_i n₁^{μ+2}/(γ_{i+1}γ_i) = 1
            let mut acc = C64::new(0.0, 0.0);
            let mut scale = 1.0f64;
            for i in 1..=(mu + 1) {
                let mut term = self.a_coord(i);
                for l in 1..=(mu + 2) {
                    if l != i && l != i + 1 {
                        term *= lam - nodes.x(l);
                    }
                }
                acc += term;
                scale += term.norm();
            }
            worst = worst.max((acc - C64::new(1.0, 0.0)).norm() / scale);
            // Σ b_i n_{μ+1}^{k+1}/(γ_{i+1}γ_i) = 1
            let mut acc = C64::new(0.0, 0.0);
            let mut scale = 1.0f64;
            for i in (mu + 1)..=k {
                let mut term = self.b_coord(i);
                for l in (mu + 1)..=(k + 1) {
                    if l != i && l != i + 1 {
                        term *= lam - nodes.x(l);
                    }
                }
                acc += term;
                scale += term.norm();
            }
            worst = worst.max((acc - C64::new(1.0, 0.0)).norm() / scale);
        }
        worst
    }
}

/// A Lagrange pencil with body M_μᴸ + AK₁ᴸ + K₂ᴸᵀB and the coordinate data
/// used by its one-sided factorizations and recovery rules.
#[derive(Debug, Clone)]
pub struct LagrangeLinearization {
    pub pencil: BlockPencil,
    pub mu: usize,
    pub a: CMat,
    pub b: CMat,
    pub source: MatrixPolynomial,
    pub coords: MuCoordinates,
}

fn check_lagrange(p: &MatrixPolynomial) -> Result<(usize, usize, usize, &NodeSet)> {
    if p.kind() != BasisKind::Lagrange {
        return Err(Error::Invalid(format!(
            "expected a Lagrange-basis polynomial, got '{}'",
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

fn gamma_block(nodes: &NodeSet, j: usize, size: usize, sign: f64) -> PolyMat {
    let x = nodes.x(j);
    PolyMat::linear(
        CMat::scaled_eye(size, C64::new(-sign, 0.0) * x),
        CMat::scaled_eye(size, C64::new(sign, 0.0)),
    )
}

/// Rational D entry: the factor product over `range` divided exactly by the
/// two linear factors at `skip`, materialized by synthetic division.
fn d_entry(
    nodes: &NodeSet,
    range: std::ops::RangeInclusive<usize>,
    skip: (usize, usize),
    size: usize,
    tol: &Tolerances,
) -> Result<PolyMat> {
    let numerator = poly_from_node_factors(nodes, range.clone());
    let num = PolyMat::scalar_identity(1, &numerator);
    let q = num
        .deflate_exact(nodes.x(skip.0), tol.deflation_abs)?
        .deflate_exact(nodes.x(skip.1), tol.deflation_abs)?;
    let scalar: Vec<C64> = q.coeffs().iter().map(|c| c[(0, 0)]).collect();
    Ok(PolyMat::scalar_identity(size, &scalar))
}

/// Dual basis pairs (K₁ᴸ, D₁ᴸ) and (K₂ᴸ, D₂ᴸ) over k+1 nodes.
pub fn dual_bases(nodes: &NodeSet, k: usize, mu: usize, n: usize, m: usize) -> Result<DualQuad> {
    if nodes.len() != k + 1 {
        return Err(Error::Nodes(format!(
            "Lagrange constructions with grade {k} need exactly {} nodes, got {}",
            k + 1,
            nodes.len()
        )));
    }
    check_mu(mu, k)?;
    let tol = Tolerances::default();

    // K₁ᴸ rows j = 1..k−μ−1: γ_{k+2−j}I at j, −γ_{k−j}I at j+1.
    let k1 = if k - mu - 1 == 0 {
        PolyMat::zeros(0, (k - mu) * n)
    } else {
        let mut grid = Vec::new();
        for j in 1..=(k - mu - 1) {
            let mut row = vec![PolyMat::zeros(n, n); k - mu];
            row[j - 1] = gamma_block(nodes, k + 2 - j, n, 1.0);
            row[j] = gamma_block(nodes, k - j, n, -1.0);
            grid.push(row);
        }
        PolyMat::from_blocks(&grid)
    };

    // D₁ᴸᵀ entries j = 1..k−μ: n_{μ+1}^{k+1}/(γ_{k+2−j}γ_{k+1−j}).
    let d1t = PolyMat::vstack(
        &(1..=(k - mu))
            .map(|j| d_entry(nodes, (mu + 1)..=(k + 1), (k + 2 - j, k + 1 - j), n, &tol))
            .collect::<Result<Vec<_>>>()?,
    );

    // K₂ᴸ rows j = 1..μ: γ_{μ+3−j}I at j, −γ_{μ+1−j}I at j+1.
    let k2 = if mu == 0 {
        PolyMat::zeros(0, (mu + 1) * m)
    } else {
        let mut grid = Vec::new();
        for j in 1..=mu {
            let mut row = vec![PolyMat::zeros(m, m); mu + 1];
            row[j - 1] = gamma_block(nodes, mu + 3 - j, m, 1.0);
            row[j] = gamma_block(nodes, mu + 1 - j, m, -1.0);
            grid.push(row);
        }
        PolyMat::from_blocks(&grid)
    };

    // D₂ᴸᵀ entries j = 1..μ+1: n₁^{μ+2}/(γ_{μ+3−j}γ_{μ+2−j}).
    let d2t = PolyMat::vstack(
        &(1..=(mu + 1))
            .map(|j| d_entry(nodes, 1..=(mu + 2), (mu + 3 - j, mu + 2 - j), m, &tol))
            .collect::<Result<Vec<_>>>()?,
    );

    Ok(DualQuad {
        k1: DualPair {
            k: k1,
            d: d1t.transpose(),
            family: Family::Lagrange,
            param: mu,
            block_size: n,
            nodes: Some(nodes.clone()),
        },
        k2: DualPair {
            k: k2,
            d: d2t.transpose(),
            family: Family::Lagrange,
            param: mu,
            block_size: m,
            nodes: Some(nodes.clone()),
        },
    })
}

/// Coordinates of 1 in the D₂ᴸ entries (a) and the D₁ᴸ entries (b): closed
/// endpoint formulas plus the node-evaluation recurrence for the interior.
pub fn mu_coordinates(nodes: &NodeSet, k: usize, mu: usize) -> Result<MuCoordinates> {
    if nodes.len() != k + 1 {
        return Err(Error::Nodes(format!(
            "coordinates over grade {k} need {} nodes, got {}",
            k + 1,
            nodes.len()
        )));
    }
    check_mu(mu, k)?;
    let one = C64::new(1.0, 0.0);

    // Entry value of the a-expansion term i at the point λ.
    let a_entry = |i: usize, lam: C64| -> C64 {
        let mut prod = one;
        for l in 1..=(mu + 2) {
            if l != i && l != i + 1 {
                prod *= lam - nodes.x(l);
            }
        }
        prod
    };
    let mut a = Vec::with_capacity(mu + 1);
    let mut prod = one;
    for l in 3..=(mu + 2) {
        prod *= nodes.x(1) - nodes.x(l);
    }
    a.push(one / prod);
    for i in 2..=(mu + 1) {
        // evaluate the expansion at x_i: only terms i and i−1 survive
        let e = a_entry(i, nodes.x(i));
        let f = a_entry(i - 1, nodes.x(i));
        let prev = a[i - 2];
        a.push((one - prev * f) / e);
    }

    let b_entry = |i: usize, lam: C64| -> C64 {
        let mut prod = one;
        for l in (mu + 1)..=(k + 1) {
            if l != i && l != i + 1 {
                prod *= lam - nodes.x(l);
            }
        }
        prod
    };
    let mut b = Vec::with_capacity(k - mu);
    let mut prod = one;
    for l in (mu + 3)..=(k + 1) {
        prod *= nodes.x(mu + 1) - nodes.x(l);
    }
    b.push(one / prod);
    for i in (mu + 2)..=k {
        let e = b_entry(i, nodes.x(i));
        let f = b_entry(i - 1, nodes.x(i));
        let prev = b[i - mu - 2];
        b.push((one - prev * f) / e);
    }

    Ok(MuCoordinates { a, b, mu, nodes: nodes.clone() })
}

/// Row-form colleague body for 0 ≤ μ < k−1.
fn colleague_body_row_form(p: &MatrixPolynomial, mu: usize) -> PolyMat {
    let (k, m, n, nodes) = check_lagrange(p).expect("caller validated");
    let mut grid: Vec<Vec<PolyMat>> =
        (0..=mu).map(|_| vec![PolyMat::zeros(m, n); k - mu]).collect();
    grid[0][0] = top_left_cell(p, nodes, k);
    for j in 2..=(k - mu) {
        let s = k + 1 - j;
        grid[0][j - 1] = weighted_gamma_cell(p, nodes, s, k + 2 - j);
    }
    for i in 2..=(mu + 1) {
        let s = mu + 2 - i;
        grid[i - 1][k - mu - 1] = weighted_gamma_cell(p, nodes, s, mu + 3 - i);
    }
    PolyMat::from_blocks(&grid)
}

/// Column-form colleague body for μ = k−1.
fn colleague_body_column_form(p: &MatrixPolynomial) -> PolyMat {
    let (k, _, _, nodes) = check_lagrange(p).expect("caller validated");
    let mut grid: Vec<Vec<PolyMat>> = Vec::with_capacity(k);
    grid.push(vec![top_left_cell(p, nodes, k)]);
    for i in 2..=k {
        let s = k + 1 - i;
        grid.push(vec![weighted_gamma_cell(p, nodes, s, k + 2 - i)]);
    }
    PolyMat::from_blocks(&grid)
}

/// P_{k+1}w_{k+1}γ_k + P_k w_k γ_{k+1}.
fn top_left_cell(p: &MatrixPolynomial, nodes: &NodeSet, k: usize) -> PolyMat {
    let pk1 = p.sample(k + 1).scale(nodes.w(k + 1));
    let pk = p.sample(k).scale(nodes.w(k));
    PolyMat::linear(
        pk1.scale(-nodes.x(k)).add(&pk.scale(-nodes.x(k + 1))),
        pk1.add(&pk),
    )
}

/// P_s w_s γ_g as a pencil cell.
fn weighted_gamma_cell(p: &MatrixPolynomial, nodes: &NodeSet, s: usize, g: usize) -> PolyMat {
    let w = p.sample(s).scale(nodes.w(s));
    PolyMat::linear(w.scale(-nodes.x(g)), w)
}

fn assemble_lagrange(
    p: &MatrixPolynomial,
    mu: usize,
    body: PolyMat,
    a: CMat,
    b: CMat,
) -> Result<LagrangeLinearization> {
    let (k, m, n, nodes) = check_lagrange(p)?;
    let duals = dual_bases(nodes, k, mu, n, m)?;
    let coords = mu_coordinates(nodes, k, mu)?;
    let pencil = assemble(
        &body,
        &duals.k1.k,
        &duals.k2.k,
        AssembleMeta {
            family: Family::Lagrange,
            param: mu,
            body_row_blocks: vec![m; mu + 1],
            k1_row_blocks: vec![n; k - mu - 1],
            body_col_blocks: vec![n; k - mu],
            k2_row_blocks: vec![m; mu],
        },
    )?;
    Ok(LagrangeLinearization { pencil, mu, a, b, source: p.clone(), coords })
}

/// The colleague Lagrange pencil of P associated with μ (A = B = 0). The two
/// displays of the body (row form for μ < k−1, column form for μ = k−1) are
/// separate construction paths.
pub fn colleague(p: &MatrixPolynomial, mu: usize) -> Result<LagrangeLinearization> {
    let (k, m, n, _) = check_lagrange(p)?;
    check_mu(mu, k)?;
    let body = if mu < k - 1 {
        colleague_body_row_form(p, mu)
    } else {
        colleague_body_column_form(p)
    };
    let a = CMat::zeros((mu + 1) * m, (k - mu - 1) * n);
    let b = CMat::zeros(mu * m, (k - mu) * n);
    assemble_lagrange(p, mu, body, a, b)
}

/// Family member with body M_μᴸ + AK₁ᴸ + K₂ᴸᵀB.
pub fn family(
    p: &MatrixPolynomial,
    mu: usize,
    a: &CMat,
    b: &CMat,
) -> Result<LagrangeLinearization> {
    let (k, m, n, nodes) = check_lagrange(p)?;
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
    let mut body = if mu < k - 1 {
        colleague_body_row_form(p, mu)
    } else {
        colleague_body_column_form(p)
    };
    if !duals.k1.k.is_empty() {
        body = body.add(&duals.k1.k.lmul_const(a));
    }
    if !duals.k2.k.is_empty() {
        body = body.add(&duals.k2.k.transpose().rmul_const(b));
    }
    assemble_lagrange(p, mu, body, a.clone(), b.clone())
}

/// Partial barycentric sums: T_j collects samples 1..j, S_j collects j..k+1,
/// both scaled by the node polynomial ℓ(λ). Evaluated without division.
pub fn splits(p: &MatrixPolynomial, j: usize, lambda: C64) -> Result<(CMat, CMat)> {
    let (k, m, n, nodes) = check_lagrange(p)?;
    if j == 0 || j > k + 1 {
        return Err(Error::ParamRange(format!("split index must satisfy 1 ≤ j ≤ {}, got {j}", k + 1)));
    }
    let term = |i: usize| -> CMat {
        let mut f = nodes.w(i);
        for l in 1..=(k + 1) {
            if l != i {
                f *= lambda - nodes.x(l);
            }
        }
        p.sample(i).scale(f)
    };
    let mut t = CMat::zeros(m, n);
    for i in 1..=j {
        t = t.add(&term(i));
    }
    let mut s = CMat::zeros(m, n);
    for i in j..=(k + 1) {
        s = s.add(&term(i));
    }
    Ok((t, s))
}

/// T_j as a matrix polynomial.
fn t_split_poly(p: &MatrixPolynomial, j: usize) -> PolyMat {
    let (k, m, n, nodes) = check_lagrange(p).expect("caller validated");
    let mut acc = PolyMat::zeros(m, n);
    for i in 1..=j {
        let factors = poly_from_node_factors(nodes, (1..=(k + 1)).filter(|&l| l != i));
        acc = acc.add(
            &PolyMat::constant(p.sample(i).scale(nodes.w(i))).mul_scalar_poly(&factors),
        );
    }
    acc
}

/// S_j as a matrix polynomial.
fn s_split_poly(p: &MatrixPolynomial, j: usize) -> PolyMat {
    let (k, m, n, nodes) = check_lagrange(p).expect("caller validated");
    let mut acc = PolyMat::zeros(m, n);
    for i in j..=(k + 1) {
        let factors = poly_from_node_factors(nodes, (1..=(k + 1)).filter(|&l| l != i));
        acc = acc.add(
            &PolyMat::constant(p.sample(i).scale(nodes.w(i))).mul_scalar_poly(&factors),
        );
    }
    acc
}

/// One term γ_{j+1}·base/(γ_i γ_{i+1}) with the shared factor cancelled and
/// the genuine divisions done by exact deflation.
fn coordinate_term(
    base: &PolyMat,
    i: usize,
    j: usize,
    nodes: &NodeSet,
    tol: &Tolerances,
) -> Result<PolyMat> {
    if i == j {
        base.deflate_exact(nodes.x(i), tol.deflation_abs)
    } else if i == j + 1 {
        base.deflate_exact(nodes.x(i + 1), tol.deflation_abs)
    } else {
        let q = base
            .deflate_exact(nodes.x(i), tol.deflation_abs)?
            .deflate_exact(nodes.x(i + 1), tol.deflation_abs)?;
        Ok(q.mul_scalar_poly(&[-nodes.x(j + 1), C64::new(1.0, 0.0)]))
    }
}

/// The polynomial combinations of the split sums appearing in the right
/// one-sided factor stack, j = 1..μ.
pub fn p_combination(
    p: &MatrixPolynomial,
    coords: &MuCoordinates,
    j: usize,
    tol: &Tolerances,
) -> Result<PolyMat> {
    let (_, m, n, nodes) = check_lagrange(p)?;
    let mu = coords.mu;
    if j == 0 || j > mu {
        return Err(Error::ParamRange(format!("combination index must satisfy 1 ≤ j ≤ μ = {mu}")));
    }
    let s_next = s_split_poly(p, j + 1);
    let t_cur = t_split_poly(p, j);
    let mut acc = PolyMat::zeros(m, n);
    for i in 1..=j {
        let term = coordinate_term(&s_next, i, j, nodes, tol)?;
        acc = acc.sub(&term.scale(coords.a_coord(i)));
    }
    for i in (j + 1)..=(mu + 1) {
        let term = coordinate_term(&t_cur, i, j, nodes, tol)?;
        acc = acc.add(&term.scale(coords.a_coord(i)));
    }
    Ok(acc.trim(1e-14))
}

/// The polynomial combinations appearing in the left one-sided factor stack,
/// j = μ+1..k−1.
pub fn q_combination(
    p: &MatrixPolynomial,
    coords: &MuCoordinates,
    j: usize,
    tol: &Tolerances,
) -> Result<PolyMat> {
    let (k, m, n, nodes) = check_lagrange(p)?;
    let mu = coords.mu;
    if j < mu + 1 || j > k - 1 {
        return Err(Error::ParamRange(format!(
            "combination index must satisfy μ+1 ≤ j ≤ k−1, got {j}"
        )));
    }
    let s_next = s_split_poly(p, j + 1);
    let t_cur = t_split_poly(p, j);
    let mut acc = PolyMat::zeros(m, n);
    for i in (mu + 1)..=j {
        let term = coordinate_term(&s_next, i, j, nodes, tol)?;
        acc = acc.sub(&term.scale(coords.b_coord(i)));
    }
    for i in (j + 1)..=k {
        let term = coordinate_term(&t_cur, i, j, nodes, tol)?;
        acc = acc.add(&term.scale(coords.b_coord(i)));
    }
    Ok(acc.trim(1e-14))
}

/// One-sided factor matrices with coordinate-weighted right-hand sides:
/// L·H = (Σ_i a_{μ+2−i} e_i) ⊗ P over the body rows, and
/// G·L = (Σ_j b_{k+1−j} e_jᵀ) ⊗ P over the body columns.
pub struct LagrangeOneSided {
    pub h: PolyMat,
    pub g: PolyMat,
    pub coords: MuCoordinates,
    /// (1-based row block, weight) pairs for L·H.
    pub right_weights: Vec<(usize, C64)>,
    /// (1-based column block, weight) pairs for G·L.
    pub left_weights: Vec<(usize, C64)>,
}

pub fn one_sided(p: &MatrixPolynomial, mu: usize) -> Result<LagrangeOneSided> {
    let (k, m, n, nodes) = check_lagrange(p)?;
    check_mu(mu, k)?;
    let tol = Tolerances::default();
    let duals = dual_bases(nodes, k, mu, n, m)?;
    let coords = mu_coordinates(nodes, k, mu)?;

    let h = if mu == 0 {
        duals.k1.d.transpose()
    } else {
        let mut parts = vec![duals.k1.d.transpose()];
        for j in (1..=mu).rev() {
            parts.push(p_combination(p, &coords, j, &tol)?);
        }
        PolyMat::vstack(&parts)
    };

    let g = if mu == k - 1 {
        duals.k2.d.clone()
    } else {
        let mut parts = vec![duals.k2.d.clone()];
        for j in ((mu + 1)..=(k - 1)).rev() {
            parts.push(q_combination(p, &coords, j, &tol)?);
        }
        PolyMat::hstack(&parts)
    };

    let right_weights: Vec<(usize, C64)> =
        (1..=(mu + 1)).map(|i| (i, coords.a_coord(mu + 2 - i))).collect();
    let left_weights: Vec<(usize, C64)> =
        (1..=(k - mu)).map(|j| (j, coords.b_coord(k + 1 - j))).collect();

    Ok(LagrangeOneSided { h, g, coords, right_weights, left_weights })
}

/// Eigenvector recovery. Off the nodes (and at infinity), every block of the
/// leading run is a nonzero multiple of an eigenvector and block 1 is the
/// default; on a node, only the sub-case blocks are returned.
pub fn recover_eigenvector(
    lin: &LagrangeLinearization,
    lambda: Option<C64>,
    vector: &[C64],
    side: Side,
    tol: &Tolerances,
) -> Result<EigvecRecovery> {
    let k = lin.source.grade();
    let mu = lin.mu;
    let nodes = lin.source.nodes().expect("lagrange source");
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
    let offs = crate::pencils::cumulative(sizes);
    let block_of = |b: usize| vector[offs[b - 1]..offs[b]].to_vec();

    // Which node (1-based) λ sits on, if any.
    let node_idx = lambda.and_then(|lam| {
        (1..=(k + 1))
            .find(|&j| (lam - nodes.x(j)).norm() <= tol.node_coincidence * (1.0 + nodes.x(j).norm()))
    });

    let clamp = |list: Vec<usize>, hi: usize| -> Vec<usize> {
        list.into_iter().filter(|&b| b >= 1 && b <= hi).collect()
    };
    let (right_hi, left_hi) = (k - mu, mu + 1);
    let valid_blocks: Vec<usize> = match (side, lambda, node_idx) {
        (_, None, _) | (_, _, None) => match side {
            Side::Right => (1..=right_hi).collect(),
            Side::Left => (1..=left_hi).collect(),
        },
        (side, Some(_), Some(j)) => {
            // Parameter-relative positions take precedence over endpoints.
            if j == mu + 1 {
                match side {
                    Side::Right => vec![right_hi],
                    Side::Left => clamp(vec![1, 2], left_hi),
                }
            } else if j == mu + 2 {
                match side {
                    Side::Right => clamp(vec![right_hi.saturating_sub(1), right_hi], right_hi),
                    Side::Left => vec![1],
                }
            } else if j == 1 {
                match side {
                    Side::Right => (1..=right_hi).collect(),
                    Side::Left => vec![left_hi],
                }
            } else if j == k + 1 {
                match side {
                    Side::Right => vec![1],
                    Side::Left => (1..=left_hi).collect(),
                }
            } else if j >= 2 && j <= mu {
                match side {
                    Side::Right => (1..=right_hi).collect(),
                    Side::Left => clamp(vec![mu - j + 2, mu - j + 3], left_hi),
                }
            } else {
                // μ+3 ≤ j ≤ k
                match side {
                    Side::Right => clamp(vec![k - j + 1, k - j + 2], right_hi),
                    Side::Left => (1..=left_hi).collect(),
                }
            }
        }
    };

    let primary_block = valid_blocks[0];
    let total = vec_norm(vector).max(f64::MIN_POSITIVE);
    let mut valid = Vec::new();
    for &b in &valid_blocks {
        let blk = block_of(b);
        if b == primary_block || vec_norm(&blk) > 1e-8 * total {
            valid.push((b, blk));
        }
    }
    let primary = block_of(primary_block);
    if vec_norm(&primary) <= 1e-8 * total {
        // fall back to the best valid block before giving up
        if let Some((b, blk)) = valid
            .iter()
            .max_by(|x, y| vec_norm(&x.1).partial_cmp(&vec_norm(&y.1)).unwrap())
            .cloned()
        {
            if vec_norm(&blk) > 1e-8 * total {
                return Ok(EigvecRecovery { primary: blk, primary_block: b, valid, unreliable: vec![] });
            }
        }
        return Err(Error::ZeroRecoveredBlock);
    }
    Ok(EigvecRecovery { primary, primary_block, valid, unreliable: vec![] })
}

/// Minimal-basis recovery: the coordinate-weighted combination of the leading
/// blocks, with the degree shift −(k−μ−1) (right) / −μ (left).
pub fn recover_minimal_basis(
    lin: &LagrangeLinearization,
    basis: &PolyVectorBasis,
    tol: &Tolerances,
) -> Result<(PolyVectorBasis, Vec<usize>)> {
    let k = lin.source.grade();
    let mu = lin.mu;
    let coords = &lin.coords;
    let (sizes, shift, weights): (&[usize], usize, Vec<C64>) = match basis.side {
        Side::Right => (
            &lin.pencil.col_blocks,
            k - mu - 1,
            (1..=(k - mu)).map(|j| coords.b_coord(k + 1 - j)).collect(),
        ),
        Side::Left => (
            &lin.pencil.row_blocks,
            mu,
            (1..=(mu + 1)).map(|j| coords.a_coord(mu + 2 - j)).collect(),
        ),
    };
    let offs = crate::pencils::cumulative(sizes);
    let size = sizes[0];
    let mut vectors = Vec::with_capacity(basis.vectors.len());
    let mut degrees = Vec::with_capacity(basis.vectors.len());
    for (v, &d) in basis.vectors.iter().zip(&basis.degrees) {
        let mut acc = PolyMat::zeros(size, 1);
        for (j, &w) in weights.iter().enumerate() {
            acc = acc.add(&v.extract_rows(offs[j], size).scale(w));
        }
        if d < shift {
            return Err(Error::Rank(format!(
                "pencil-level index {d} is below the degree shift {shift}"
            )));
        }
        degrees.push(d - shift);
        vectors.push(acc.trim(1e-12));
    }
    let max_len = vectors.iter().map(|v| v.coeffs().len()).max().unwrap_or(1);
    let stacked = CMat::from_fn(size * max_len, vectors.len(), |i, j| {
        let (t, r) = (i / size, i % size);
        vectors[j].coeff(t)[(r, 0)]
    });
    if !vectors.is_empty() && crate::la::svd::rank(&stacked, tol.rank_rel) < vectors.len() {
        return Err(Error::DependentRecovery);
    }
    Ok((
        PolyVectorBasis {
            vectors,
            degrees: degrees.clone(),
            side: basis.side,
            certificate: basis.certificate,
            rank_warning: basis.rank_warning.clone(),
        },
        degrees,
    ))
}

/// The nk×nk literature pencil over the same data, strictly equivalent to the
/// colleague pencil at μ = 0. Requires a square polynomial. Stated in the
/// 1-based sample numbering P_1..P_{k+1} with θ_i = w_{i−1}/w_i.
pub fn reference_pencil(p: &MatrixPolynomial) -> Result<BlockPencil> {
    let (k, m, n, nodes) = check_lagrange(p)?;
    if m != n {
        return Err(Error::Dimension("the reference pencil needs a square polynomial".into()));
    }
    let theta = |i: usize| nodes.w(i - 1) / nodes.w(i);
    let mut grid: Vec<Vec<PolyMat>> = (0..k).map(|_| vec![PolyMat::zeros(n, n); k]).collect();
    for j in 1..=(k - 1) {
        grid[0][j - 1] = weighted_scaled_cell(p.sample(j), nodes.x(j + 1), C64::new(-1.0, 0.0));
    }
    // last column of the first row: −γ_{k+1}P_k − γ_k θ_{k+1}⁻¹ P_{k+1}
    let tail = weighted_scaled_cell(p.sample(k), nodes.x(k + 1), C64::new(-1.0, 0.0)).add(
        &weighted_scaled_cell(
            p.sample(k + 1),
            nodes.x(k),
            -C64::new(1.0, 0.0) / theta(k + 1),
        ),
    );
    grid[0][k - 1] = tail;
    for j in 2..=k {
        grid[j - 1][j - 2] = PolyMat::linear(
            CMat::scaled_eye(n, nodes.x(j - 1)),
            CMat::scaled_eye(n, C64::new(-1.0, 0.0)),
        );
        let th = theta(j);
        grid[j - 1][j - 1] = PolyMat::linear(
            CMat::scaled_eye(n, -th * nodes.x(j + 1)),
            CMat::scaled_eye(n, th),
        );
    }
    let full = PolyMat::from_blocks(&grid);
    Ok(BlockPencil {
        l0: full.coeff(0),
        l1: full.coeff(1),
        row_blocks: vec![n; k],
        col_blocks: vec![n; k],
        family: Family::Generic,
        param: 0,
        body_row_blocks: k,
        body_col_blocks: k,
    })
}

/// c·(λ − x)·M as a pencil cell.
fn weighted_scaled_cell(mat: &CMat, x: C64, c: C64) -> PolyMat {
    let scaled = mat.scale(c);
    PolyMat::linear(scaled.scale(-x), scaled)
}

/// ℓ_i(λ) values for backward-error scaling: δ_ij at nodes, the modified
/// product form elsewhere.
pub fn lagrange_basis_values(nodes: &NodeSet, lambda: C64) -> Vec<C64> {
    let kk = nodes.len();
    if let Some(hit) = nodes.exact_index(lambda) {
        return (0..kk)
            .map(|i| if i == hit { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            .collect();
    }
    (1..=kk)
        .map(|i| {
            let mut f = nodes.w(i);
            for l in 1..=kk {
                if l != i {
                    f *= lambda - nodes.x(l);
                }
            }
            f
        })
        .collect()
}
