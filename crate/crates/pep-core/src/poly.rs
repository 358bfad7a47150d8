//! Matrix polynomials in the monomial, Newton, Lagrange and Chebyshev bases:
//! representation, evaluation, grade-respecting reversal and conversion to
//! the monomial basis, plus the node bookkeeping shared by every family.
//!
//! Grade, not degree, is the contract throughout: the leading coefficient of
//! a grade-k polynomial may be zero.

use crate::error::Error;
use crate::la::mat::{C64, CMat};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Which polynomial basis the coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Monomial,
    Newton,
    Lagrange,
    Chebyshev1,
    Chebyshev2,
}

impl BasisKind {
    pub fn name(&self) -> &'static str {
        match self {
            BasisKind::Monomial => "monomial",
            BasisKind::Newton => "newton",
            BasisKind::Lagrange => "lagrange",
            BasisKind::Chebyshev1 => "chebyshev1",
            BasisKind::Chebyshev2 => "chebyshev2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "monomial" => Ok(BasisKind::Monomial),
            "newton" => Ok(BasisKind::Newton),
            "lagrange" => Ok(BasisKind::Lagrange),
            "chebyshev1" => Ok(BasisKind::Chebyshev1),
            "chebyshev2" => Ok(BasisKind::Chebyshev2),
            other => Err(Error::Invalid(format!("unknown basis '{other}'"))),
        }
    }
}

/// Ordered list of pairwise-distinct interpolation nodes with lazily
/// populated barycentric weights ω_i = 1/∏_{j≠i}(x_i − x_j).
#[derive(Debug, Clone)]
pub struct NodeSet {
    points: Vec<C64>,
    weights: OnceLock<Vec<C64>>,
}

impl PartialEq for NodeSet {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl NodeSet {
    /// Rejects exact duplicates. Close-but-distinct nodes are allowed; use
    /// [`NodeSet::close_pairs`] to surface a warning instead.
    pub fn new(points: Vec<C64>) -> Result<Self> {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::Nodes(format!(
                        "nodes {} and {} are equal ({}); repeated nodes are not supported",
                        i + 1,
                        j + 1,
                        points[i]
                    )));
                }
            }
        }
        Ok(NodeSet { points, weights: OnceLock::new() })
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// 1-based node accessor x_j, matching the indexing used by the pencil
    /// constructions.
    pub fn x(&self, j: usize) -> C64 {
        self.points[j - 1]
    }

    /// Barycentric weights, computed once by the product formula.
    pub fn weights(&self) -> &[C64] {
        self.weights.get_or_init(|| {
            let n = self.points.len();
            (0..n)
                .map(|i| {
                    let mut prod = C64::new(1.0, 0.0);
                    for j in 0..n {
                        if j != i {
                            prod *= self.points[i] - self.points[j];
                        }
                    }
                    C64::new(1.0, 0.0) / prod
                })
                .collect()
        })
    }

    /// 1-based barycentric weight w_j.
    pub fn w(&self, j: usize) -> C64 {
        self.weights()[j - 1]
    }

    /// Pairs of nodes closer than `rel_tol · (1 + |x_i|)`, for warnings.
    pub fn close_pairs(&self, rel_tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let sep = (self.points[i] - self.points[j]).norm();
                if sep < rel_tol * (1.0 + self.points[i].norm()) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Index of a node within `rel_tol · (1 + |x_i|)` of λ, if any.
    pub fn proximity_index(&self, lambda: C64, rel_tol: f64) -> Option<usize> {
        self.points
            .iter()
            .position(|&x| (lambda - x).norm() < rel_tol * (1.0 + x.norm()))
    }

    /// Index of the node exactly equal to λ (bitwise), if any.
    pub fn exact_index(&self, lambda: C64) -> Option<usize> {
        self.points.iter().position(|&x| x == lambda)
    }
}

/// Basis tag plus the node data required by the node-based bases.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisDescriptor {
    pub kind: BasisKind,
    pub nodes: Option<NodeSet>,
}

impl BasisDescriptor {
    pub fn monomial() -> Self {
        BasisDescriptor { kind: BasisKind::Monomial, nodes: None }
    }

    pub fn newton(nodes: NodeSet) -> Self {
        BasisDescriptor { kind: BasisKind::Newton, nodes: Some(nodes) }
    }

    pub fn lagrange(nodes: NodeSet) -> Self {
        BasisDescriptor { kind: BasisKind::Lagrange, nodes: Some(nodes) }
    }

    pub fn chebyshev(kind: u8) -> Result<Self> {
        match kind {
            1 => Ok(BasisDescriptor { kind: BasisKind::Chebyshev1, nodes: None }),
            2 => Ok(BasisDescriptor { kind: BasisKind::Chebyshev2, nodes: None }),
            other => Err(Error::ParamRange(format!("Chebyshev kind must be 1 or 2, got {other}"))),
        }
    }
}

/// A grade-k m×n matrix polynomial: k+1 coefficient matrices interpreted in
/// `basis`. Lagrange coefficients are the node samples P_i = P(x_i),
/// i = 1..k+1; every other basis indexes coefficients 0..k.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    basis: BasisDescriptor,
    grade: usize,
    rows: usize,
    cols: usize,
    coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn new(basis: BasisDescriptor, grade: usize, coeffs: Vec<CMat>) -> Result<Self> {
        if coeffs.len() != grade + 1 {
            return Err(Error::Dimension(format!(
                "grade {} needs {} coefficient matrices, got {}",
                grade,
                grade + 1,
                coeffs.len()
            )));
        }
        let rows = coeffs[0].rows();
        let cols = coeffs[0].cols();
        if coeffs.iter().any(|c| c.rows() != rows || c.cols() != cols) {
            return Err(Error::Dimension("coefficient matrices must share dimensions".into()));
        }
        match basis.kind {
            BasisKind::Newton => {
                let nn = basis.nodes.as_ref().map_or(0, |n| n.len());
                if nn != grade {
                    return Err(Error::Nodes(format!(
                        "Newton basis with grade {grade} requires exactly {grade} nodes, got {nn}"
                    )));
                }
            }
            BasisKind::Lagrange => {
                let nn = basis.nodes.as_ref().map_or(0, |n| n.len());
                if nn != grade + 1 {
                    return Err(Error::Nodes(format!(
                        "Lagrange basis with grade {grade} requires exactly {} nodes, got {nn}",
                        grade + 1
                    )));
                }
            }
            _ => {
                if basis.nodes.is_some() {
                    return Err(Error::Nodes(format!(
                        "basis '{}' does not take nodes",
                        basis.kind.name()
                    )));
                }
            }
        }
        Ok(MatrixPolynomial { basis, grade, rows, cols, coeffs })
    }

    pub fn scalar(basis: BasisDescriptor, values: &[C64]) -> Result<Self> {
        let coeffs = values.iter().map(|&v| CMat::from_rows(1, 1, &[v])).collect();
        MatrixPolynomial::new(basis, values.len() - 1, coeffs)
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn kind(&self) -> BasisKind {
        self.basis.kind
    }

    pub fn nodes(&self) -> Option<&NodeSet> {
        self.basis.nodes.as_ref()
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    /// Coefficient by 0-based position in storage order.
    pub fn coeff(&self, i: usize) -> &CMat {
        &self.coeffs[i]
    }

    /// Lagrange sample P_j with the 1-based sample numbering.
    pub fn sample(&self, j: usize) -> &CMat {
        debug_assert_eq!(self.kind(), BasisKind::Lagrange);
        &self.coeffs[j - 1]
    }

    /// Actual degree: largest index with a nonzero coefficient. For Lagrange
    /// samples the stored coefficients are not degree-graded, so the grade is
    /// returned as a safe upper bound.
    pub fn degree(&self) -> usize {
        if self.kind() == BasisKind::Lagrange {
            return self.grade;
        }
        for i in (0..self.coeffs.len()).rev() {
            if self.coeffs[i].max_abs() > 0.0 {
                return i;
            }
        }
        0
    }

    /// Largest coefficient norm, used as a problem scale.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.fro_norm()).fold(0.0, f64::max)
    }

    /// Evaluate at λ. Newton uses the running-product recurrence, Chebyshev a
    /// Clenshaw summation, Lagrange the first barycentric form with exact
    /// sample return at nodes, monomial a Horner scheme.
    pub fn eval(&self, lambda: C64) -> CMat {
        match self.kind() {
            BasisKind::Monomial => {
                let mut acc = self.coeffs[self.grade].clone();
                for i in (0..self.grade).rev() {
                    acc = acc.scale(lambda).add(&self.coeffs[i]);
                }
                acc
            }
            BasisKind::Newton => {
                let nodes = self.nodes().expect("validated at construction");
                let mut acc = self.coeffs[0].clone();
                let mut prod = C64::new(1.0, 0.0);
                for i in 1..=self.grade {
                    prod *= lambda - nodes.x(i);
                    acc = acc.add(&self.coeffs[i].scale(prod));
                }
                acc
            }
            BasisKind::Chebyshev1 | BasisKind::Chebyshev2 => {
                // Clenshaw: b_j = P_j + 2λ b_{j+1} − b_{j+2}; the sum is
                // P_0 + φ₁(λ) b₁ − b₂ with φ₁ depending on the kind.
                let two_lambda = lambda * 2.0;
                let mut b1 = CMat::zeros(self.rows, self.cols);
                let mut b2 = CMat::zeros(self.rows, self.cols);
                for j in (1..=self.grade).rev() {
                    let next = self.coeffs[j].add(&b1.scale(two_lambda)).sub(&b2);
                    b2 = b1;
                    b1 = next;
                }
                let phi1 = if self.kind() == BasisKind::Chebyshev1 { lambda } else { two_lambda };
                self.coeffs[0].add(&b1.scale(phi1)).sub(&b2)
            }
            BasisKind::Lagrange => {
                let nodes = self.nodes().expect("validated at construction");
                if let Some(i) = nodes.exact_index(lambda) {
                    return self.coeffs[i].clone();
                }
                let ws = nodes.weights();
                let mut ell = C64::new(1.0, 0.0);
                for &x in nodes.points() {
                    ell *= lambda - x;
                }
                let mut acc = CMat::zeros(self.rows, self.cols);
                for (i, &x) in nodes.points().iter().enumerate() {
                    let factor = ell * ws[i] / (lambda - x);
                    acc = acc.add(&self.coeffs[i].scale(factor));
                }
                acc
            }
        }
    }

    /// Monomial coefficient vectors of each basis element φ_i, i = 0..k
    /// (Lagrange: ℓ_i for i = 1..k+1, stored at position i−1). Each vector
    /// has length k+1.
    fn basis_monomial_expansions(&self) -> Vec<Vec<C64>> {
        let k = self.grade;
        match self.kind() {
            BasisKind::Monomial => (0..=k)
                .map(|i| {
                    let mut v = vec![C64::new(0.0, 0.0); k + 1];
                    v[i] = C64::new(1.0, 0.0);
                    v
                })
                .collect(),
            BasisKind::Newton => {
                let nodes = self.nodes().unwrap();
                let mut out = Vec::with_capacity(k + 1);
                let mut cur = vec![C64::new(1.0, 0.0)];
                out.push(pad(&cur, k + 1));
                for i in 1..=k {
                    cur = conv_linear(&cur, nodes.x(i));
                    out.push(pad(&cur, k + 1));
                }
                out
            }
            BasisKind::Lagrange => {
                let nodes = self.nodes().unwrap();
                let ws = nodes.weights().to_vec();
                (0..=k)
                    .map(|i| {
                        let mut cur = vec![ws[i]];
                        for (j, &x) in nodes.points().iter().enumerate() {
                            if j != i {
                                cur = conv_linear(&cur, x);
                            }
                        }
                        pad(&cur, k + 1)
                    })
                    .collect()
            }
            BasisKind::Chebyshev1 | BasisKind::Chebyshev2 => {
                let first = self.kind() == BasisKind::Chebyshev1;
                (0..=k).map(|i| pad(&cheb_coeff_vec(i, first), k + 1)).collect()
            }
        }
    }

    /// Coefficientwise-equal monomial representation.
    pub fn to_monomial(&self) -> MatrixPolynomial {
        let k = self.grade;
        let expansions = self.basis_monomial_expansions();
        let mut coeffs: Vec<CMat> = (0..=k).map(|_| CMat::zeros(self.rows, self.cols)).collect();
        for (i, phi) in expansions.iter().enumerate() {
            for (t, &c) in phi.iter().enumerate() {
                if c.norm_sqr() != 0.0 {
                    coeffs[t] = coeffs[t].add(&self.coeffs[i].scale(c));
                }
            }
        }
        MatrixPolynomial::new(BasisDescriptor::monomial(), k, coeffs).expect("dimensions preserved")
    }

    /// Grade-k reversal rev_k P(λ) = λᵏ P(1/λ) as a monomial polynomial,
    /// obtained by reversing each basis element's monomial expansion rather
    /// than by evaluating at 1/λ.
    pub fn reversal(&self) -> MatrixPolynomial {
        let k = self.grade;
        let expansions = self.basis_monomial_expansions();
        let mut coeffs: Vec<CMat> = (0..=k).map(|_| CMat::zeros(self.rows, self.cols)).collect();
        for (i, phi) in expansions.iter().enumerate() {
            for (t, &c) in phi.iter().enumerate() {
                if c.norm_sqr() != 0.0 {
                    coeffs[k - t] = coeffs[k - t].add(&self.coeffs[i].scale(c));
                }
            }
        }
        MatrixPolynomial::new(BasisDescriptor::monomial(), k, coeffs).expect("dimensions preserved")
    }

    /// Coefficientwise transpose: (Pᵀ)(λ) = P(λ)ᵀ.
    pub fn transpose(&self) -> MatrixPolynomial {
        let coeffs = self.coeffs.iter().map(|c| c.transpose()).collect();
        MatrixPolynomial {
            basis: self.basis.clone(),
            grade: self.grade,
            rows: self.cols,
            cols: self.rows,
            coeffs,
        }
    }
}

fn pad(v: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    out[..v.len()].copy_from_slice(v);
    out
}

/// Multiply a monomial coefficient vector by (λ − x).
pub fn conv_linear(coeffs: &[C64], x: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
    for (i, &c) in coeffs.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * x;
    }
    out
}

/// Monomial coefficients of T_n (first = true) or U_n.
pub fn cheb_coeff_vec(n: usize, first: bool) -> Vec<C64> {
    let one = C64::new(1.0, 0.0);
    if n == 0 {
        return vec![one];
    }
    let p1 = if first { vec![C64::new(0.0, 0.0), one] } else { vec![C64::new(0.0, 0.0), one * 2.0] };
    if n == 1 {
        return p1;
    }
    let mut prev = vec![one];
    let mut cur = p1;
    for _ in 2..=n {
        let mut next = vec![C64::new(0.0, 0.0); cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c * 2.0;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev polynomial of the first kind at a complex argument, by the
/// forward three-term recurrence (valid off [-1, 1]; no trig shortcut).
pub fn cheb_t(n: usize, lambda: C64) -> C64 {
    cheb_phi(n, lambda, true)
}

/// Chebyshev polynomial of the second kind at a complex argument.
pub fn cheb_u(n: usize, lambda: C64) -> C64 {
    cheb_phi(n, lambda, false)
}

fn cheb_phi(n: usize, lambda: C64, first: bool) -> C64 {
    let one = C64::new(1.0, 0.0);
    if n == 0 {
        return one;
    }
    let p1 = if first { lambda } else { lambda * 2.0 };
    if n == 1 {
        return p1;
    }
    let mut prev = one;
    let mut cur = p1;
    for _ in 2..=n {
        let next = lambda * 2.0 * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// γ_j(λ) = λ − x_j with 1-based node numbering.
pub fn linear_factor(nodes: &NodeSet, j: usize, lambda: C64) -> Result<C64> {
    if j == 0 || j > nodes.len() {
        return Err(Error::ParamRange(format!("factor index {j} outside 1..={}", nodes.len())));
    }
    Ok(lambda - nodes.x(j))
}

/// n_i^j(λ) = ∏_{ℓ=i}^{j} (λ − x_ℓ), the empty product (j < i) being 1.
pub fn factor_product(nodes: &NodeSet, i: usize, j: usize, lambda: C64) -> Result<C64> {
    if i == 0 || i > nodes.len() || j > nodes.len() {
        return Err(Error::ParamRange(format!("factor range {i}..={j} outside 1..={}", nodes.len())));
    }
    let mut prod = C64::new(1.0, 0.0);
    if j >= i {
        for l in i..=j {
            prod *= lambda - nodes.x(l);
        }
    }
    Ok(prod)
}

// ── shared JSON format ──────────────────────────────────────────────

/// Wire form shared by every module and the CLI.
#[derive(Serialize, Deserialize)]
struct PolyJson {
    basis: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<[f64; 2]>>,
    grade: usize,
    size: [usize; 2],
    coeffs: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_to_pairs(m: &CMat) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix_from_pairs(rows: usize, cols: usize, pairs: &[[f64; 2]]) -> Result<CMat> {
    if pairs.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "matrix payload has {} entries, expected {}x{}",
            pairs.len(),
            rows,
            cols
        )));
    }
    let data: Vec<C64> = pairs.iter().map(|p| C64::new(p[0], p[1])).collect();
    Ok(CMat::from_rows(rows, cols, &data))
}

impl Serialize for MatrixPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = PolyJson {
            basis: self.kind().name().to_string(),
            nodes: self.nodes().map(|n| n.points().iter().map(|z| [z.re, z.im]).collect()),
            grade: self.grade,
            size: [self.rows, self.cols],
            coeffs: self.coeffs.iter().map(matrix_to_pairs).collect(),
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let j = PolyJson::deserialize(d)?;
        let kind = BasisKind::parse(&j.basis).map_err(D::Error::custom)?;
        let nodes = match j.nodes {
            Some(pts) => Some(
                NodeSet::new(pts.iter().map(|p| C64::new(p[0], p[1])).collect())
                    .map_err(D::Error::custom)?,
            ),
            None => None,
        };
        let basis = match kind {
            BasisKind::Newton => BasisDescriptor::newton(
                nodes.ok_or_else(|| D::Error::custom("newton basis requires nodes"))?,
            ),
            BasisKind::Lagrange => BasisDescriptor::lagrange(
                nodes.ok_or_else(|| D::Error::custom("lagrange basis requires nodes"))?,
            ),
            k => {
                if nodes.is_some() {
                    return Err(D::Error::custom(format!("basis '{}' does not take nodes", k.name())));
                }
                BasisDescriptor { kind: k, nodes: None }
            }
        };
        let coeffs: Vec<CMat> = j
            .coeffs
            .iter()
            .map(|m| matrix_from_pairs(j.size[0], j.size[1], m))
            .collect::<Result<_>>()
            .map_err(D::Error::custom)?;
        MatrixPolynomial::new(basis, j.grade, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::Rng;

    pub fn random_nodes(rng: &mut impl Rng, count: usize) -> NodeSet {
        loop {
            let pts: Vec<C64> = (0..count)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let mut ok = true;
            'outer: for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if (pts[i] - pts[j]).norm() < 1e-2 {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                return NodeSet::new(pts).unwrap();
            }
        }
    }

    pub fn random_poly(
        rng: &mut impl Rng,
        kind: BasisKind,
        k: usize,
        m: usize,
        n: usize,
    ) -> MatrixPolynomial {
        let basis = match kind {
            BasisKind::Monomial => BasisDescriptor::monomial(),
            BasisKind::Newton => BasisDescriptor::newton(random_nodes(rng, k)),
            BasisKind::Lagrange => BasisDescriptor::lagrange(random_nodes(rng, k + 1)),
            BasisKind::Chebyshev1 => BasisDescriptor::chebyshev(1).unwrap(),
            BasisKind::Chebyshev2 => BasisDescriptor::chebyshev(2).unwrap(),
        };
        let coeffs = (0..=k)
            .map(|_| {
                CMat::from_fn(m, n, |_, _| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
            })
            .collect();
        MatrixPolynomial::new(basis, k, coeffs).unwrap()
    }
}
