//! Chebyshev-basis pencil family (both kinds): dual bases built on the
//! three-term recurrence, the four-case colleague body, the (A, B) family,
//! Chebyshev-Horner shifts, one-sided factorizations and recovery rules.

use crate::config::Tolerances;
use crate::error::Error;
use crate::la::mat::{vec_norm, C64, CMat};
use crate::newton::{extract_basis_block, lin_extract_args, EigvecRecovery, OneSided};
use crate::pencils::{
    assemble, AssembleMeta, BlockPencil, DualPair, DualQuad, Family, PolyVectorBasis, Side,
};
use crate::poly::{cheb_coeff_vec, cheb_t, cheb_u, BasisKind, MatrixPolynomial};
use crate::polymat::PolyMat;
use crate::Result;

/// A Chebyshev pencil with body M_eps + A*K1 + K2^T*B.
#[derive(Debug, Clone)]
pub struct ChebLinearization {
    pub pencil: BlockPencil,
    pub eps: usize,
    /// 1 or 2, following the basis of the source polynomial.
    pub kind: u8,
    pub a: CMat,
    pub b: CMat,
    pub source: MatrixPolynomial,
}

fn check_cheb(p: &MatrixPolynomial) -> Result<(usize, usize, usize, u8)> {
    let kind = match p.kind() {
        BasisKind::Chebyshev1 => 1u8,
        BasisKind::Chebyshev2 => 2u8,
        other => {
            return Err(Error::Invalid(format!(
                "expected a Chebyshev-basis polynomial, got '{}'",
                other.name()
            )))
        }
    };
    if p.grade() == 0 {
        return Err(Error::ParamRange("grade must be at least 1 to linearize".into()));
    }
    Ok((p.grade(), p.rows(), p.cols(), kind))
}

fn check_eps(eps: usize, k: usize) -> Result<()> {
    if eps > k - 1 {
        return Err(Error::ParamRange(format!(
            "eps must satisfy 0 <= eps <= k-1 = {}, got {eps}",
            k - 1
        )));
    }
    Ok(())
}

fn phi_scalar(kind: u8, n: usize, lambda: C64) -> C64 {
    if kind == 1 {
        cheb_t(n, lambda)
    } else {
        cheb_u(n, lambda)
    }
}

fn phi_poly(kind: u8, n: usize) -> Vec<C64> {
    cheb_coeff_vec(n, kind == 1)
}

/// One banded K block: `rows` block rows over `rows + 1` block columns with
/// (I, -2*lambda*I, I) bands and the last row carrying (I, -phi_1*I).
fn k_block(rows: usize, size: usize, kind: u8) -> PolyMat {
    if rows == 0 {
        return PolyMat::zeros(0, size);
    }
    let mut grid = Vec::with_capacity(rows);
    for j in 1..=rows {
        let mut row = vec![PolyMat::zeros(size, size); rows + 1];
        row[j - 1] = PolyMat::constant(CMat::eye(size));
        if j < rows {
            row[j] = PolyMat::linear(
                CMat::zeros(size, size),
                CMat::scaled_eye(size, C64::new(-2.0, 0.0)),
            );
            row[j + 1] = PolyMat::constant(CMat::eye(size));
        } else {
            // last row: -phi_1 is -lambda (first kind) or -2*lambda (second kind)
            let slope = if kind == 1 { -1.0 } else { -2.0 };
            row[j] = PolyMat::linear(
                CMat::zeros(size, size),
                CMat::scaled_eye(size, C64::new(slope, 0.0)),
            );
        }
        grid.push(row);
    }
    PolyMat::from_blocks(&grid)
}

/// D block row [phi_deg I, ..., phi_1 I, phi_0 I] of the requested kind.
fn d_block(deg: usize, size: usize, kind: u8) -> PolyMat {
    let parts: Vec<PolyMat> = (0..=deg)
        .rev()
        .map(|t| PolyMat::scalar_identity(size, &phi_poly(kind, t)))
        .collect();
    PolyMat::hstack(&parts)
}

/// Dual minimal basis pairs (K1, D1) of `kind_1` and (K2, D2) of `kind_2`:
/// K1 spans eps block rows, K2 spans k-1-eps.
pub fn dual_bases(
    k: usize,
    eps: usize,
    kind_1: u8,
    kind_2: u8,
    n: usize,
    m: usize,
) -> Result<DualQuad> {
    if k == 0 {
        return Err(Error::ParamRange("grade must be at least 1".into()));
    }
    check_eps(eps, k)?;
    for kind in [kind_1, kind_2] {
        if kind != 1 && kind != 2 {
            return Err(Error::ParamRange(format!("Chebyshev kind must be 1 or 2, got {kind}")));
        }
    }
    let fam = |kind: u8| if kind == 1 { Family::Cheb1 } else { Family::Cheb2 };
    Ok(DualQuad {
        k1: DualPair {
            k: k_block(eps, n, kind_1),
            d: d_block(eps, n, kind_1),
            family: fam(kind_1),
            param: eps,
            block_size: n,
            nodes: None,
        },
        k2: DualPair {
            k: k_block(k - 1 - eps, m, kind_2),
            d: d_block(k - 1 - eps, m, kind_2),
            family: fam(kind_2),
            param: eps,
            block_size: m,
            nodes: None,
        },
    })
}

/// The four-case colleague body. Entries combine additively where the
/// displayed patterns overlap for small k-eps.
fn colleague_body(p: &MatrixPolynomial, eps: usize) -> PolyMat {
    let (k, m, n, kind) = check_cheb(p).expect("caller validated");
    if k == 1 {
        // Degenerate single block: the polynomial itself as a pencil.
        let slope = if kind == 1 { 1.0 } else { 2.0 };
        return PolyMat::linear(p.coeff(0).clone(), p.coeff(1).scale(C64::new(slope, 0.0)));
    }
    if eps == 0 {
        // Block column of k entries.
        let mut cells: Vec<CMat> = (0..k).map(|_| CMat::zeros(m, n)).collect();
        let top1; // lambda-coefficient of the first cell
        if kind == 2 {
            top1 = p.coeff(k).scale(C64::new(2.0, 0.0));
            cells[0] = p.coeff(k - 1).clone();
            cells[1] = p.coeff(k - 2).sub(p.coeff(k));
            for i in 3..=k {
                cells[i - 1] = p.coeff(k - i).clone();
            }
        } else {
            // first kind: halved column with corrected second and last cells
            let half = C64::new(0.5, 0.0);
            top1 = p.coeff(k).clone();
            cells[0] = p.coeff(k - 1).scale(half);
            for i in 2..=k {
                let mut cell = p.coeff(k - i).scale(half);
                cell = cell.sub(&p.coeff(k - i + 2).scale(half));
                if i == 2 {
                    cell = cell.sub(&p.coeff(k).scale(half));
                }
                if i == k {
                    cell = cell.add(&p.coeff(0).scale(half));
                }
                cells[i - 1] = cell;
            }
        }
        let mut grid: Vec<Vec<PolyMat>> = Vec::with_capacity(k);
        for (i, cell) in cells.into_iter().enumerate() {
            if i == 0 {
                grid.push(vec![PolyMat::linear(cell, top1.clone())]);
            } else {
                grid.push(vec![PolyMat::constant(cell)]);
            }
        }
        return PolyMat::from_blocks(&grid);
    }

    // 1 <= eps <= k-1: (k-eps) x (eps+1) block grid.
    let rows = k - eps;
    let cols = eps + 1;
    let mut cells: Vec<Vec<CMat>> = (0..rows).map(|_| vec![CMat::zeros(m, n); cols]).collect();
    // column 1
    for i in 2..=rows {
        cells[i - 1][0] = p.coeff(k - i).clone();
        if i == 2 {
            cells[i - 1][0] = cells[i - 1][0].sub(p.coeff(k));
        }
    }
    // column 2
    for i in 1..=rows {
        cells[i - 1][1] = cells[i - 1][1].sub(p.coeff(k + 1 - i));
        if i == rows {
            cells[i - 1][1] = cells[i - 1][1].add(p.coeff(eps - 1));
        }
    }
    // last row, columns 3..=eps+1
    for j in 3..=cols {
        cells[rows - 1][j - 1] = cells[rows - 1][j - 1].add(p.coeff(eps + 1 - j));
    }
    let mut grid: Vec<Vec<PolyMat>> = Vec::with_capacity(rows);
    for (i, row) in cells.into_iter().enumerate() {
        let mut out = Vec::with_capacity(cols);
        for (j, cell) in row.into_iter().enumerate() {
            if i == 0 && j == 0 {
                out.push(PolyMat::linear(
                    p.coeff(k - 1).add(&cell),
                    p.coeff(k).scale(C64::new(2.0, 0.0)),
                ));
            } else {
                out.push(PolyMat::constant(cell));
            }
        }
        grid.push(out);
    }
    PolyMat::from_blocks(&grid)
}

fn assemble_cheb(
    p: &MatrixPolynomial,
    eps: usize,
    body: PolyMat,
    a: CMat,
    b: CMat,
) -> Result<ChebLinearization> {
    let (k, m, n, kind) = check_cheb(p)?;
    let duals = dual_bases(k, eps, kind, 2, n, m)?;
    let pencil = assemble(
        &body,
        &duals.k1.k,
        &duals.k2.k,
        AssembleMeta {
            family: if kind == 1 { Family::Cheb1 } else { Family::Cheb2 },
            param: eps,
            body_row_blocks: vec![m; k - eps],
            k1_row_blocks: vec![n; eps],
            body_col_blocks: vec![n; eps + 1],
            k2_row_blocks: vec![m; k - 1 - eps],
        },
    )?;
    Ok(ChebLinearization { pencil, eps, kind, a, b, source: p.clone() })
}

/// The colleague Chebyshev pencil of P associated with eps. First-kind input
/// pairs a first-kind K1 with a second-kind K2; second-kind input uses
/// second-kind blocks on both sides.
pub fn colleague(p: &MatrixPolynomial, eps: usize) -> Result<ChebLinearization> {
    let (k, m, n, _) = check_cheb(p)?;
    check_eps(eps, k)?;
    let body = colleague_body(p, eps);
    let a = CMat::zeros((k - eps) * m, eps * n);
    let b = CMat::zeros((k - 1 - eps) * m, (eps + 1) * n);
    assemble_cheb(p, eps, body, a, b)
}

/// Family member with body M + A*K1 + K2^T*B.
pub fn family(p: &MatrixPolynomial, eps: usize, a: &CMat, b: &CMat) -> Result<ChebLinearization> {
    let (k, m, n, kind) = check_cheb(p)?;
    check_eps(eps, k)?;
    if a.rows() != (k - eps) * m || a.cols() != eps * n {
        return Err(Error::Dimension(format!(
            "A must be {}x{}, got {}x{}",
            (k - eps) * m,
            eps * n,
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != (k - 1 - eps) * m || b.cols() != (eps + 1) * n {
        return Err(Error::Dimension(format!(
            "B must be {}x{}, got {}x{}",
            (k - 1 - eps) * m,
            (eps + 1) * n,
            b.rows(),
            b.cols()
        )));
    }
    let duals = dual_bases(k, eps, kind, 2, n, m)?;
    let mut body = colleague_body(p, eps);
    if !duals.k1.k.is_empty() {
        body = body.add(&duals.k1.k.lmul_const(a));
    }
    if !duals.k2.k.is_empty() {
        body = body.add(&duals.k2.k.transpose().rmul_const(b));
    }
    assemble_cheb(p, eps, body, a.clone(), b.clone())
}

/// The i-th Chebyshev-Horner shift of P associated with eps, evaluated with
/// basis functions of `shift_kind`: sum_{t=0..i} P_{k-t} phi_{eps+i-t}(lambda).
/// Computed by the two-term recurrence in i, the eps = 0 row seeded straight
/// from the definition.
pub fn horner_shift(
    p: &MatrixPolynomial,
    eps: usize,
    i: usize,
    lambda: C64,
    shift_kind: u8,
) -> Result<CMat> {
    let (k, m, n, _) = check_cheb(p)?;
    check_eps(eps, k)?;
    if i > k - eps {
        return Err(Error::ParamRange(format!(
            "shift index must satisfy 0 <= i <= k-eps = {}, got {i}",
            k - eps
        )));
    }
    // Row e = 0 of the (e, t) table, straight from the definition.
    let mut row: Vec<CMat> = (0..=i)
        .map(|t| {
            let mut acc = CMat::zeros(m, n);
            for s in 0..=t {
                acc = acc.add(&p.coeff(k - s).scale(phi_scalar(shift_kind, t - s, lambda)));
            }
            acc
        })
        .collect();
    // Rows e = 1..eps via P^t_e = 2*lambda*P^{t-1}_e - P^{t-1}_{e-1} + P_{k-t}*phi_e.
    for e in 1..=eps {
        let phi_e = phi_scalar(shift_kind, e, lambda);
        let mut next: Vec<CMat> = Vec::with_capacity(i + 1);
        next.push(p.coeff(k).scale(phi_e));
        for t in 1..=i {
            let v = next[t - 1]
                .scale(lambda * 2.0)
                .sub(&row[t - 1])
                .add(&p.coeff(k - t).scale(phi_e));
            next.push(v);
        }
        row = next;
    }
    Ok(row[i].clone())
}

/// Chebyshev-Horner shift as a matrix polynomial (definition sum in
/// coefficient space).
pub fn horner_shift_poly(
    p: &MatrixPolynomial,
    eps: usize,
    i: usize,
    shift_kind: u8,
) -> Result<PolyMat> {
    let (k, m, n, _) = check_cheb(p)?;
    if eps > k - 1 || i > k - eps {
        return Err(Error::ParamRange("shift indices out of range".into()));
    }
    let mut acc = PolyMat::zeros(m, n);
    for t in 0..=i {
        let phi = phi_poly(shift_kind, eps + i - t);
        acc = acc.add(&PolyMat::constant(p.coeff(k - t).clone()).mul_scalar_poly(&phi));
    }
    Ok(acc)
}

/// One-sided factor matrices: L*H = e_{k-eps} (x) P and G*L = e_{eps+1}^T (x) P.
/// H takes shifts of the source kind (with the halved corrections at eps = 0
/// in the first kind); G is always built from second-kind shifts.
pub fn one_sided(p: &MatrixPolynomial, eps: usize) -> Result<OneSided> {
    let (k, m, n, kind) = check_cheb(p)?;
    check_eps(eps, k)?;
    let duals = dual_bases(k, eps, kind, 2, n, m)?;

    let mut h_parts = vec![duals.k1.d.transpose()];
    for i in 1..=(k - eps - 1) {
        let mut blk = horner_shift_poly(p, eps, i, kind)?.scale(C64::new(-1.0, 0.0));
        if eps == 0 && kind == 1 {
            blk = blk.add(&PolyMat::constant(p.coeff(k - i).scale(C64::new(0.5, 0.0))));
        }
        h_parts.push(blk);
    }
    let h = PolyMat::vstack(&h_parts);

    let mut g_parts = vec![duals.k2.d.clone()];
    for i in (k - eps)..=(k - 1) {
        g_parts.push(horner_shift_poly(p, 0, i, 2)?.scale(C64::new(-1.0, 0.0)));
    }
    let g = PolyMat::hstack(&g_parts);

    Ok(OneSided { h, g, right_unit: k - eps, left_unit: eps + 1 })
}

/// Eigenvector recovery: finite eigenvalues read block eps+1 (right) / k-eps
/// (left); infinite eigenvalues read block 1 on both sides.
pub fn recover_eigenvector(
    lin: &ChebLinearization,
    lambda: Option<C64>,
    vector: &[C64],
    side: Side,
    _tol: &Tolerances,
) -> Result<EigvecRecovery> {
    let k = lin.source.grade();
    let eps = lin.eps;
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
    let primary_block = match (side, lambda) {
        (Side::Right, Some(_)) => eps + 1,
        (Side::Left, Some(_)) => k - eps,
        (_, None) => 1,
    };
    let offs = crate::pencils::cumulative(sizes);
    let block = vector[offs[primary_block - 1]..offs[primary_block]].to_vec();
    if vec_norm(&block) <= 1e-8 * vec_norm(vector).max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroRecoveredBlock);
    }
    Ok(EigvecRecovery {
        primary: block.clone(),
        primary_block,
        valid: vec![(primary_block, block)],
        unreliable: vec![],
    })
}

/// Minimal-basis recovery: right bases read block eps+1 with indices shifted
/// by -eps; left bases read block k-eps with indices shifted by -(k-1-eps).
pub fn recover_minimal_basis(
    lin: &ChebLinearization,
    basis: &PolyVectorBasis,
    tol: &Tolerances,
) -> Result<(PolyVectorBasis, Vec<usize>)> {
    let k = lin.source.grade();
    let eps = lin.eps;
    let (block, shift, sizes) = match basis.side {
        Side::Right => (eps + 1, eps, &lin.pencil.col_blocks),
        Side::Left => (k - eps, k - 1 - eps, &lin.pencil.row_blocks),
    };
    extract_basis_block(lin_extract_args(basis, block, shift, sizes), tol)
}
