//! Generic block minimal basis machinery: minimality certificates, duality
//! checks, assembly of the 2×2 block pencil and the D₂MD₁ᵀ body product used
//! to verify that a constructed body reproduces the target polynomial.

use crate::config::Tolerances;
use crate::error::Error;
use crate::la::mat::{C64, CMat};
use crate::la::{gep, svd};
use crate::poly::{matrix_from_pairs, matrix_to_pairs, NodeSet};
use crate::polymat::{circle_points, interpolate_circle_samples, sampling_radius, PolyMat};
use crate::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Pencil family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Newton,
    Lagrange,
    Cheb1,
    Cheb2,
    Generic,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Newton => "newton",
            Family::Lagrange => "lagrange",
            Family::Cheb1 => "cheb1",
            Family::Cheb2 => "cheb2",
            Family::Generic => "generic",
        }
    }
}

/// A pencil L(λ) = λL₁ + L₀ with block-partition metadata. The body M sits in
/// the leading `body_row_blocks` × `body_col_blocks` sub-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPencil {
    pub l0: CMat,
    pub l1: CMat,
    pub row_blocks: Vec<usize>,
    pub col_blocks: Vec<usize>,
    pub family: Family,
    pub param: usize,
    pub body_row_blocks: usize,
    pub body_col_blocks: usize,
}

impl BlockPencil {
    pub fn rows(&self) -> usize {
        self.l0.rows()
    }

    pub fn cols(&self) -> usize {
        self.l0.cols()
    }

    pub fn eval(&self, lambda: C64) -> CMat {
        self.l0.add(&self.l1.scale(lambda))
    }

    pub fn as_polymat(&self) -> PolyMat {
        PolyMat::linear(self.l0.clone(), self.l1.clone())
    }

    /// Reversal rev₁L(λ) = λL₀ + L₁.
    pub fn reversal(&self) -> BlockPencil {
        BlockPencil { l0: self.l1.clone(), l1: self.l0.clone(), ..self.clone() }
    }

    fn block_offsets(sizes: &[usize]) -> Vec<usize> {
        let mut offs = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        for &s in sizes {
            offs.push(acc);
            acc += s;
        }
        offs.push(acc);
        offs
    }

    /// Extract the sub-pencil of a block-index range (1-based, inclusive).
    pub fn block_range(
        &self,
        row_from: usize,
        row_to: usize,
        col_from: usize,
        col_to: usize,
    ) -> (CMat, CMat) {
        let ro = Self::block_offsets(&self.row_blocks);
        let co = Self::block_offsets(&self.col_blocks);
        let (i0, i1) = (ro[row_from - 1], ro[row_to]);
        let (j0, j1) = (co[col_from - 1], co[col_to]);
        (
            self.l0.block(i0, j0, i1 - i0, j1 - j0),
            self.l1.block(i0, j0, i1 - i0, j1 - j0),
        )
    }

    /// The (2,1) position of the 2×2 block layout: the K₁ rows.
    pub fn lower_left(&self) -> (CMat, CMat) {
        if self.body_row_blocks == self.row_blocks.len() {
            let cols: usize = self.col_blocks[..self.body_col_blocks].iter().sum();
            return (CMat::zeros(0, cols), CMat::zeros(0, cols));
        }
        self.block_range(
            self.body_row_blocks + 1,
            self.row_blocks.len(),
            1,
            self.body_col_blocks,
        )
    }

    /// The body M: the (1,1) position of the 2×2 block layout.
    pub fn body(&self) -> (CMat, CMat) {
        self.block_range(1, self.body_row_blocks, 1, self.body_col_blocks)
    }

    /// The (1,2) position: the K₂ᵀ columns.
    pub fn upper_right(&self) -> (CMat, CMat) {
        if self.body_col_blocks == self.col_blocks.len() {
            let rows: usize = self.row_blocks[..self.body_row_blocks].iter().sum();
            return (CMat::zeros(rows, 0), CMat::zeros(rows, 0));
        }
        self.block_range(
            1,
            self.body_row_blocks,
            self.body_col_blocks + 1,
            self.col_blocks.len(),
        )
    }
}

// ── shared JSON format ──────────────────────────────────────────────

#[derive(Serialize, Deserialize)]
struct PencilJson {
    #[serde(rename = "L0")]
    l0: Vec<[f64; 2]>,
    #[serde(rename = "L1")]
    l1: Vec<[f64; 2]>,
    row_blocks: Vec<usize>,
    col_blocks: Vec<usize>,
    family: String,
    param: usize,
    body_row_blocks: usize,
    body_col_blocks: usize,
}

impl Serialize for BlockPencil {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PencilJson {
            l0: matrix_to_pairs(&self.l0),
            l1: matrix_to_pairs(&self.l1),
            row_blocks: self.row_blocks.clone(),
            col_blocks: self.col_blocks.clone(),
            family: self.family.name().to_string(),
            param: self.param,
            body_row_blocks: self.body_row_blocks,
            body_col_blocks: self.body_col_blocks,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockPencil {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let j = PencilJson::deserialize(d)?;
        let rows: usize = j.row_blocks.iter().sum();
        let cols: usize = j.col_blocks.iter().sum();
        let family = match j.family.as_str() {
            "newton" => Family::Newton,
            "lagrange" => Family::Lagrange,
            "cheb1" => Family::Cheb1,
            "cheb2" => Family::Cheb2,
            "generic" => Family::Generic,
            other => return Err(D::Error::custom(format!("unknown family '{other}'"))),
        };
        Ok(BlockPencil {
            l0: matrix_from_pairs(rows, cols, &j.l0).map_err(D::Error::custom)?,
            l1: matrix_from_pairs(rows, cols, &j.l1).map_err(D::Error::custom)?,
            row_blocks: j.row_blocks,
            col_blocks: j.col_blocks,
            family,
            param: j.param,
            body_row_blocks: j.body_row_blocks,
            body_col_blocks: j.body_col_blocks,
        })
    }
}

// ── minimality ──────────────────────────────────────────────────────

/// How the "full rank for every finite λ₀" half of the minimality
/// characterization was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    /// Rank was checked at every candidate rank-drop point (the eigenvalues
    /// of a squared-up pencil) plus random points.
    Deterministic,
    /// Rank was only checked at random points.
    Probabilistic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimalityCertificate {
    pub minimal: bool,
    pub kind: CertificateKind,
    pub detail: String,
}

/// Highest-row-degree coefficient matrix: row j carries the coefficient of
/// λ^{d_j} where d_j is the degree of row j.
pub fn highest_row_degree_matrix(q: &PolyMat) -> CMat {
    let rows = q.rows();
    let cols = q.cols();
    let mut out = CMat::zeros(rows, cols);
    let scale = q.max_coeff_norm().max(1.0);
    for i in 0..rows {
        let mut deg = 0usize;
        for t in (0..q.coeffs().len()).rev() {
            let row_norm: f64 = (0..cols).map(|j| q.coeffs()[t][(i, j)].norm()).sum();
            if row_norm > 1e-14 * scale {
                deg = t;
                break;
            }
        }
        for j in 0..cols {
            out[(i, j)] = q.coeffs()[deg][(i, j)];
        }
    }
    out
}

/// Minimal-basis test: the rows of Q(λ) form a minimal basis iff Q(λ₀) has
/// full row rank for every finite λ₀ and the highest-row-degree coefficient
/// matrix has full row rank.
pub fn is_minimal_basis(q: &PolyMat, tol: &Tolerances, seed: u64) -> Result<MinimalityCertificate> {
    if q.rows() > q.cols() {
        return Err(Error::Dimension(format!(
            "minimal basis candidate must have rows ≤ cols, got {}x{}",
            q.rows(),
            q.cols()
        )));
    }
    if q.rows() == 0 {
        return Ok(MinimalityCertificate {
            minimal: true,
            kind: CertificateKind::Deterministic,
            detail: "empty matrix".into(),
        });
    }
    let rows = q.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d69_6e69);

    // (a) row-reducedness.
    let qh = highest_row_degree_matrix(q);
    if svd::rank(&qh, tol.rank_rel) < rows {
        return Ok(MinimalityCertificate {
            minimal: false,
            kind: CertificateKind::Deterministic,
            detail: "highest-row-degree coefficient matrix is row-rank deficient".into(),
        });
    }

    // (b) full row rank for all finite λ₀. Square Q up with a deterministic
    // random right factor: every rank-drop point of Q is an eigenvalue of
    // Q(λ)·S, obtained through a companion linearization when deg(Q) > 1.
    let mut points: Vec<C64> = Vec::new();
    let mut kind = CertificateKind::Probabilistic;
    let detail: String;
    let s = CMat::from_fn(q.cols(), rows, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let squared = q.rmul_const(&s).trim(1e-14);
    match squared_up_eigenvalues(&squared, tol) {
        Ok(candidates) => {
            points.extend(candidates);
            kind = CertificateKind::Deterministic;
            detail = format!("checked {} candidate rank-drop points", points.len());
        }
        Err(_) => {
            detail = "squared-up problem was singular; random-point certificate only".into();
        }
    }
    let n_random = if kind == CertificateKind::Deterministic { 20 } else { 50 };
    for _ in 0..n_random {
        points.push(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
    }
    for &p in &points {
        if svd::rank(&q.eval(p), tol.rank_rel) < rows {
            return Ok(MinimalityCertificate {
                minimal: false,
                kind,
                detail: format!("rank drop at λ = {p}"),
            });
        }
    }
    Ok(MinimalityCertificate { minimal: true, kind, detail })
}

/// Finite eigenvalues of a square matrix polynomial through the first
/// companion pencil of its monomial coefficients.
fn squared_up_eigenvalues(r: &PolyMat, tol: &Tolerances) -> Result<Vec<C64>> {
    let (l0, l1) = companion_pencil(r);
    let pairs = gep::solve(&l0, &l1, false)?;
    Ok(pairs.iter().filter_map(|p| p.lambda(tol.inf_beta)).collect())
}

/// First companion pencil of a square monomial matrix polynomial
/// R(λ) = Σ R_t λᵗ: the grade-d companion λ·diag(R_d, I, …, I) + constant
/// block row of descending coefficients over a shifted negated identity.
/// The grade (coefficient count) is honored: a zero leading coefficient
/// produces the matching infinite eigenvalues.
pub fn companion_pencil(r: &PolyMat) -> (CMat, CMat) {
    let n = r.rows();
    let d = (r.coeffs().len() - 1).max(1);
    let size = n * d;
    let mut l0 = CMat::zeros(size, size);
    let mut l1 = CMat::zeros(size, size);
    l1.set_block(0, 0, &r.coeff(d));
    for j in 0..d {
        l0.set_block(0, j * n, &r.coeff(d - 1 - j));
    }
    for i in 1..d {
        l1.set_block(i * n, i * n, &CMat::eye(n));
        l0.set_block(i * n, (i - 1) * n, &CMat::scaled_eye(n, C64::new(-1.0, 0.0)));
    }
    (l0, l1)
}

// ── duality ─────────────────────────────────────────────────────────

/// A dual pair (K, D): K(λ)D(λ)ᵀ = 0 with both factors minimal bases.
#[derive(Debug, Clone)]
pub struct DualPair {
    pub k: PolyMat,
    pub d: PolyMat,
    pub family: Family,
    pub param: usize,
    pub block_size: usize,
    /// Nodes backing the construction, for identity-check sampling radii.
    pub nodes: Option<NodeSet>,
}

impl DualPair {
    /// K(λ)D(λ)ᵀ checked at deg(K)+deg(D)+1 circle samples.
    pub fn check_duality(&self, tol: &Tolerances) -> Result<bool> {
        check_duality_parts(&self.k, &self.d, self.nodes.as_ref(), tol)
    }
}

/// The two dual pairs backing one linearization family instance.
#[derive(Debug, Clone)]
pub struct DualQuad {
    pub k1: DualPair,
    pub k2: DualPair,
}

/// Which nullspace or eigenvector side a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// A polynomial basis of a rational nullspace: vector polynomials with their
/// degrees (the minimal indices when the basis is minimal).
#[derive(Debug, Clone)]
pub struct PolyVectorBasis {
    /// Column vector polynomials, one per basis element.
    pub vectors: Vec<PolyMat>,
    pub degrees: Vec<usize>,
    pub side: Side,
    pub certificate: CertificateKind,
    /// Set when a rank decision sat inside the tolerance band.
    pub rank_warning: Option<String>,
}

/// Worst scaled defect of K(λ)D(λ)ᵀ over deg(K)+deg(D)+1 circle samples.
pub fn duality_defect(k: &PolyMat, d: &PolyMat, nodes: Option<&NodeSet>) -> Result<f64> {
    if k.rows() == 0 || d.rows() == 0 {
        return Ok(0.0); // empty factor: identity holds vacuously
    }
    if k.cols() != d.cols() {
        return Err(Error::Dimension(format!(
            "duality check needs matching column counts, got {} vs {}",
            k.cols(),
            d.cols()
        )));
    }
    let samples = k.degree() + d.degree() + 1;
    let radius = sampling_radius(nodes);
    let dt = d.transpose();
    let mut worst = 0.0f64;
    for lam in circle_points(samples, radius) {
        let kv = k.eval(lam);
        let dv = dt.eval(lam);
        let prod = kv.mul(&dv);
        let scale = 1.0 + kv.fro_norm() * dv.fro_norm();
        worst = worst.max(prod.max_abs() / scale);
    }
    Ok(worst)
}

pub fn check_duality_parts(
    k: &PolyMat,
    d: &PolyMat,
    nodes: Option<&NodeSet>,
    tol: &Tolerances,
) -> Result<bool> {
    Ok(duality_defect(k, d, nodes)? <= tol.duality_abs)
}

// ── assembly ────────────────────────────────────────────────────────

/// Block layout metadata for [`assemble`].
pub struct AssembleMeta {
    pub family: Family,
    pub param: usize,
    /// Block sizes of the body rows and of the K₁ rows below them.
    pub body_row_blocks: Vec<usize>,
    pub k1_row_blocks: Vec<usize>,
    /// Block sizes of the body columns and of the K₂ᵀ columns to the right.
    pub body_col_blocks: Vec<usize>,
    pub k2_row_blocks: Vec<usize>,
}

/// L(λ) = [[M, K₂ᵀ], [K₁, 0]] with partition metadata. K blocks may be empty.
pub fn assemble(m: &PolyMat, k1: &PolyMat, k2: &PolyMat, meta: AssembleMeta) -> Result<BlockPencil> {
    let k2t = k2.transpose();
    if !k1.is_empty() && k1.cols() != m.cols() {
        return Err(Error::Dimension(format!(
            "K1 has {} columns but the body has {}",
            k1.cols(),
            m.cols()
        )));
    }
    if !k2t.is_empty() && k2t.rows() != m.rows() {
        return Err(Error::Dimension(format!(
            "K2ᵀ has {} rows but the body has {}",
            k2t.rows(),
            m.rows()
        )));
    }
    if m.degree() > 1 || k1.degree() > 1 || k2.degree() > 1 {
        return Err(Error::Invalid("assemble expects pencil blocks (degree ≤ 1)".into()));
    }
    let k1_rows = if k1.is_empty() { 0 } else { k1.rows() };
    let k2t_cols = if k2t.is_empty() { 0 } else { k2t.cols() };
    let zero = PolyMat::zeros(k1_rows, k2t_cols);
    let k1_norm = if k1.is_empty() { PolyMat::zeros(0, m.cols()) } else { k1.clone() };
    let k2t_norm = if k2t.is_empty() { PolyMat::zeros(m.rows(), 0) } else { k2t };
    let full = PolyMat::from_blocks(&[
        vec![m.clone(), k2t_norm],
        vec![k1_norm, zero],
    ]);
    let mut row_blocks = meta.body_row_blocks.clone();
    row_blocks.extend_from_slice(&meta.k1_row_blocks);
    let mut col_blocks = meta.body_col_blocks.clone();
    col_blocks.extend_from_slice(&meta.k2_row_blocks);
    if row_blocks.iter().sum::<usize>() != full.rows()
        || col_blocks.iter().sum::<usize>() != full.cols()
    {
        return Err(Error::Dimension("partition metadata does not sum to the pencil size".into()));
    }
    Ok(BlockPencil {
        l0: full.coeff(0),
        l1: full.coeff(1),
        body_row_blocks: meta.body_row_blocks.len(),
        body_col_blocks: meta.body_col_blocks.len(),
        row_blocks,
        col_blocks,
        family: meta.family,
        param: meta.param,
    })
}

// ── body product ────────────────────────────────────────────────────

/// D₂(λ)·M(λ)·D₁(λ)ᵀ recovered in monomial form by sampling at circle points
/// and interpolating exactly.
pub fn body_product(m: &PolyMat, d1: &PolyMat, d2: &PolyMat, nodes: Option<&NodeSet>) -> PolyMat {
    let deg = m.degree() + d1.degree() + d2.degree();
    let radius = sampling_radius(nodes);
    let d1t = d1.transpose();
    let pts = circle_points(deg + 1, radius);
    let samples: Vec<CMat> = pts
        .iter()
        .map(|&z| d2.eval(z).mul(&m.eval(z)).mul(&d1t.eval(z)))
        .collect();
    interpolate_circle_samples(&samples, radius)
}

/// Sampled defect of a right-sided factorization L(λ)H(λ) = Σ w_i e_i ⊗ P(λ):
/// the expected product is w·P(λ) in the listed 1-based row blocks and zero
/// elsewhere. Returns the worst relative defect over deg+1 circle samples.
pub fn one_sided_right_defect(
    pencil: &BlockPencil,
    h: &PolyMat,
    p_at: &dyn Fn(C64) -> CMat,
    weights: &[(usize, C64)],
    nodes: Option<&NodeSet>,
) -> f64 {
    let deg = 1 + h.degree();
    let radius = sampling_radius(nodes);
    let offsets = cumulative(&pencil.row_blocks);
    let mut worst = 0.0f64;
    for lam in circle_points(deg + 1, radius) {
        let lh = pencil.eval(lam).mul(&h.eval(lam));
        let pv = p_at(lam);
        let mut expected = CMat::zeros(lh.rows(), lh.cols());
        for &(blk, w) in weights {
            expected.add_block(offsets[blk - 1], 0, &pv.scale(w));
        }
        let scale = 1.0 + pencil.eval(lam).fro_norm() * h.eval(lam).fro_norm();
        worst = worst.max(lh.sub(&expected).max_abs() / scale);
    }
    worst
}

/// Sampled defect of a left-sided factorization G(λ)L(λ) = Σ w_i e_iᵀ ⊗ P(λ)
/// with the listed 1-based column blocks carrying w·P(λ).
pub fn one_sided_left_defect(
    pencil: &BlockPencil,
    g: &PolyMat,
    p_at: &dyn Fn(C64) -> CMat,
    weights: &[(usize, C64)],
    nodes: Option<&NodeSet>,
) -> f64 {
    let deg = 1 + g.degree();
    let radius = sampling_radius(nodes);
    let offsets = cumulative(&pencil.col_blocks);
    let mut worst = 0.0f64;
    for lam in circle_points(deg + 1, radius) {
        let gl = g.eval(lam).mul(&pencil.eval(lam));
        let pv = p_at(lam);
        let mut expected = CMat::zeros(gl.rows(), gl.cols());
        for &(blk, w) in weights {
            expected.add_block(0, offsets[blk - 1], &pv.scale(w));
        }
        let scale = 1.0 + pencil.eval(lam).fro_norm() * g.eval(lam).fro_norm();
        worst = worst.max(gl.sub(&expected).max_abs() / scale);
    }
    worst
}

pub(crate) fn cumulative(sizes: &[usize]) -> Vec<usize> {
    let mut offs = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    for &s in sizes {
        offs.push(acc);
        acc += s;
    }
    offs.push(acc);
    offs
}

/// Relative coefficientwise distance between two monomial matrix polynomials,
/// scaled by the larger coefficient norm.
pub fn coeff_rel_error(a: &PolyMat, b: &PolyMat) -> f64 {
    let scale = a.max_coeff_norm().max(b.max_coeff_norm()).max(1e-300);
    let len = a.coeffs().len().max(b.coeffs().len());
    let mut worst = 0.0f64;
    for t in 0..len {
        let d = a.coeff(t).sub(&b.coeff(t)).fro_norm();
        worst = worst.max(d / scale);
    }
    worst
}

/// View a monomial `MatrixPolynomial` as a `PolyMat`.
pub fn monomial_polymat(p: &crate::poly::MatrixPolynomial) -> PolyMat {
    debug_assert_eq!(p.kind(), crate::poly::BasisKind::Monomial);
    PolyMat::new(p.coeffs().to_vec())
}
