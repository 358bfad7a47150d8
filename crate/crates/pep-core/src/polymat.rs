//! Arithmetic on matrix polynomials in monomial form: products, stacking,
//! synthetic division and exact interpolation from circle samples. This is
//! the working representation for the K/D blocks, pencil bodies and one-sided
//! factor matrices.

use crate::error::Error;
use crate::la::mat::{C64, CMat};
use crate::poly::NodeSet;
use crate::Result;

/// Σ_t coeffs[t] λᵗ with dense matrix coefficients. Always at least one
/// coefficient; zero-row/column shapes are legal (empty blocks).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMat {
    rows: usize,
    cols: usize,
    coeffs: Vec<CMat>,
}

impl PolyMat {
    pub fn new(coeffs: Vec<CMat>) -> Self {
        assert!(!coeffs.is_empty(), "PolyMat needs at least one coefficient");
        let rows = coeffs[0].rows();
        let cols = coeffs[0].cols();
        assert!(coeffs.iter().all(|c| c.rows() == rows && c.cols() == cols));
        PolyMat { rows, cols, coeffs }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMat { rows, cols, coeffs: vec![CMat::zeros(rows, cols)] }
    }

    pub fn constant(c: CMat) -> Self {
        PolyMat { rows: c.rows(), cols: c.cols(), coeffs: vec![c] }
    }

    /// λ·l1 + l0.
    pub fn linear(l0: CMat, l1: CMat) -> Self {
        assert_eq!((l0.rows(), l0.cols()), (l1.rows(), l1.cols()));
        PolyMat { rows: l0.rows(), cols: l0.cols(), coeffs: vec![l0, l1] }
    }

    /// Scalar polynomial times the s×s identity.
    pub fn scalar_identity(s: usize, poly: &[C64]) -> Self {
        let coeffs = poly.iter().map(|&c| CMat::scaled_eye(s, c)).collect();
        PolyMat { rows: s, cols: s, coeffs }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn coeff(&self, t: usize) -> CMat {
        if t < self.coeffs.len() {
            self.coeffs[t].clone()
        } else {
            CMat::zeros(self.rows, self.cols)
        }
    }

    /// Degree after ignoring trailing coefficients below `tol` relative to
    /// the largest coefficient.
    pub fn degree_with_tol(&self, tol: f64) -> usize {
        let scale = self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0;
        }
        for t in (0..self.coeffs.len()).rev() {
            if self.coeffs[t].max_abs() > tol * scale {
                return t;
            }
        }
        0
    }

    pub fn degree(&self) -> usize {
        self.degree_with_tol(0.0)
    }

    pub fn trim(mut self, tol: f64) -> Self {
        let d = self.degree_with_tol(tol);
        self.coeffs.truncate(d + 1);
        self
    }

    pub fn eval(&self, lambda: C64) -> CMat {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for t in (0..self.coeffs.len() - 1).rev() {
            acc = acc.scale(lambda).add(&self.coeffs[t]);
        }
        acc
    }

    pub fn add(&self, rhs: &PolyMat) -> PolyMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|t| self.coeff(t).add(&rhs.coeff(t))).collect();
        PolyMat { rows: self.rows, cols: self.cols, coeffs }
    }

    pub fn sub(&self, rhs: &PolyMat) -> PolyMat {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> PolyMat {
        PolyMat {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Product by coefficient convolution.
    pub fn mul(&self, rhs: &PolyMat) -> PolyMat {
        assert_eq!(self.cols, rhs.rows, "PolyMat mul dimension mismatch");
        if self.is_empty() || rhs.is_empty() {
            let len = self.coeffs.len() + rhs.coeffs.len() - 1;
            return PolyMat {
                rows: self.rows,
                cols: rhs.cols,
                coeffs: (0..len).map(|_| CMat::zeros(self.rows, rhs.cols)).collect(),
            };
        }
        let len = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut coeffs: Vec<CMat> = (0..len).map(|_| CMat::zeros(self.rows, rhs.cols)).collect();
        for (s, a) in self.coeffs.iter().enumerate() {
            if a.max_abs() == 0.0 {
                continue;
            }
            for (t, b) in rhs.coeffs.iter().enumerate() {
                if b.max_abs() == 0.0 {
                    continue;
                }
                coeffs[s + t] = coeffs[s + t].add(&a.mul(b));
            }
        }
        PolyMat { rows: self.rows, cols: rhs.cols, coeffs }
    }

    /// Multiply by a scalar polynomial.
    pub fn mul_scalar_poly(&self, poly: &[C64]) -> PolyMat {
        assert!(!poly.is_empty());
        let len = self.coeffs.len() + poly.len() - 1;
        let mut coeffs: Vec<CMat> = (0..len).map(|_| CMat::zeros(self.rows, self.cols)).collect();
        for (s, a) in self.coeffs.iter().enumerate() {
            for (t, &c) in poly.iter().enumerate() {
                if c.norm_sqr() != 0.0 {
                    coeffs[s + t] = coeffs[s + t].add(&a.scale(c));
                }
            }
        }
        PolyMat { rows: self.rows, cols: self.cols, coeffs }
    }

    pub fn transpose(&self) -> PolyMat {
        PolyMat {
            rows: self.cols,
            cols: self.rows,
            coeffs: self.coeffs.iter().map(|c| c.transpose()).collect(),
        }
    }

    /// Constant left-multiplication a·self.
    pub fn lmul_const(&self, a: &CMat) -> PolyMat {
        PolyMat {
            rows: a.rows(),
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|c| a.mul(c)).collect(),
        }
    }

    /// Constant right-multiplication self·b.
    pub fn rmul_const(&self, b: &CMat) -> PolyMat {
        PolyMat {
            rows: self.rows,
            cols: b.cols(),
            coeffs: self.coeffs.iter().map(|c| c.mul(b)).collect(),
        }
    }

    /// Contiguous row slice as a polynomial matrix.
    pub fn extract_rows(&self, i0: usize, rows: usize) -> PolyMat {
        PolyMat {
            rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|c| c.block(i0, 0, rows, self.cols)).collect(),
        }
    }

    /// Synthetic division by (λ − x): returns the quotient and the remainder
    /// matrix (which is ‖·‖-small when the factor genuinely divides).
    pub fn deflate_linear(&self, x: C64) -> (PolyMat, CMat) {
        let d = self.coeffs.len() - 1;
        if d == 0 {
            // Constant: quotient 0, remainder itself.
            return (PolyMat::zeros(self.rows, self.cols), self.coeffs[0].clone());
        }
        let mut q: Vec<CMat> = vec![CMat::zeros(self.rows, self.cols); d];
        let mut carry = self.coeffs[d].clone();
        for t in (0..d).rev() {
            q[t] = carry.clone();
            carry = self.coeffs[t].add(&carry.scale(x));
        }
        (PolyMat { rows: self.rows, cols: self.cols, coeffs: q }, carry)
    }

    /// Division by (λ − x) that must be exact; errors when the remainder is
    /// above `tol` relative to the coefficient scale.
    pub fn deflate_exact(&self, x: C64, tol: f64) -> Result<PolyMat> {
        let (q, r) = self.deflate_linear(x);
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.fro_norm())
            .fold(0.0, f64::max)
            .max(1.0);
        let rn = r.fro_norm();
        if rn > tol * scale {
            return Err(Error::DeflationRemainder(rn / scale));
        }
        Ok(q)
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.fro_norm()).fold(0.0, f64::max)
    }

    /// Assemble from a grid of blocks. `grid[i][j]` must agree on row counts
    /// along rows and column counts along columns. Empty blocks contribute
    /// zero size.
    pub fn from_blocks(grid: &[Vec<PolyMat>]) -> PolyMat {
        assert!(!grid.is_empty());
        let row_sizes: Vec<usize> = grid.iter().map(|r| r[0].rows).collect();
        let col_sizes: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        let rows: usize = row_sizes.iter().sum();
        let cols: usize = col_sizes.iter().sum();
        let deg = grid
            .iter()
            .flat_map(|r| r.iter().map(|b| b.coeffs.len()))
            .max()
            .unwrap_or(1);
        let mut coeffs: Vec<CMat> = (0..deg).map(|_| CMat::zeros(rows, cols)).collect();
        let mut i0 = 0;
        for (bi, row) in grid.iter().enumerate() {
            assert_eq!(row.len(), col_sizes.len(), "ragged block grid");
            let mut j0 = 0;
            for (bj, blk) in row.iter().enumerate() {
                assert_eq!(blk.rows, row_sizes[bi], "row size mismatch at block ({bi},{bj})");
                assert_eq!(blk.cols, col_sizes[bj], "col size mismatch at block ({bi},{bj})");
                if !blk.is_empty() {
                    for (t, c) in blk.coeffs.iter().enumerate() {
                        coeffs[t].set_block(i0, j0, c);
                    }
                }
                j0 += blk.cols;
            }
            i0 += row_sizes[bi];
        }
        PolyMat { rows, cols, coeffs }
    }

    /// Vertical stack of blocks sharing a column count.
    pub fn vstack(parts: &[PolyMat]) -> PolyMat {
        let grid: Vec<Vec<PolyMat>> = parts.iter().map(|p| vec![p.clone()]).collect();
        PolyMat::from_blocks(&grid)
    }

    /// Horizontal stack of blocks sharing a row count.
    pub fn hstack(parts: &[PolyMat]) -> PolyMat {
        PolyMat::from_blocks(&[parts.to_vec()])
    }
}

// ── scalar polynomial helpers ───────────────────────────────────────

/// Monomial coefficients of ∏_{l∈indices} (λ − x_l), 1-based node indices.
pub fn poly_from_node_factors(nodes: &NodeSet, indices: impl Iterator<Item = usize>) -> Vec<C64> {
    let mut cur = vec![C64::new(1.0, 0.0)];
    for l in indices {
        cur = crate::poly::conv_linear(&cur, nodes.x(l));
    }
    cur
}

pub fn scalar_poly_eval(poly: &[C64], lambda: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        acc = acc * lambda + c;
    }
    acc
}

// ── exact interpolation on circle samples ───────────────────────────

/// Equispaced points on the circle of the given radius: the Chebyshev points
/// of a disk, used for every sampled polynomial-identity check.
pub fn circle_points(count: usize, radius: f64) -> Vec<C64> {
    (0..count)
        .map(|s| {
            let t = 2.0 * std::f64::consts::PI * (s as f64) / (count as f64);
            C64::new(radius * t.cos(), radius * t.sin())
        })
        .collect()
}

/// Sampling radius for identity checks involving a node set: a disk of
/// radius 1 + max|x_i|, which contains every node strictly.
pub fn sampling_radius(nodes: Option<&NodeSet>) -> f64 {
    1.0 + nodes
        .map(|n| n.points().iter().map(|z| z.norm()).fold(0.0, f64::max))
        .unwrap_or(0.0)
}

/// Recover the monomial coefficients of a degree-`deg` matrix polynomial from
/// its values at `deg + 1` equispaced circle samples, by the inverse DFT.
pub fn interpolate_circle_samples(samples: &[CMat], radius: f64) -> PolyMat {
    let n = samples.len();
    assert!(n > 0);
    let rows = samples[0].rows();
    let cols = samples[0].cols();
    let mut coeffs: Vec<CMat> = (0..n).map(|_| CMat::zeros(rows, cols)).collect();
    let tau = 2.0 * std::f64::consts::PI / (n as f64);
    for (t, coeff) in coeffs.iter_mut().enumerate() {
        // c_t ρᵗ = (1/n) Σ_s S_s ω^{−st}
        let mut acc = CMat::zeros(rows, cols);
        for (s, smp) in samples.iter().enumerate() {
            let ang = -tau * (s as f64) * (t as f64);
            acc = acc.add(&smp.scale(C64::new(ang.cos(), ang.sin())));
        }
        let scale = C64::new(1.0 / (n as f64) / radius.powi(t as i32), 0.0);
        *coeff = acc.scale(scale);
    }
    PolyMat::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::mat::{c, cr};
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn mul_matches_pointwise_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let a = PolyMat::new(
            (0..3)
                .map(|_| CMat::from_fn(2, 3, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect(),
        );
        let b = PolyMat::new(
            (0..2)
                .map(|_| CMat::from_fn(3, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect(),
        );
        let p = a.mul(&b);
        for _ in 0..5 {
            let lam = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let d = p.eval(lam).sub(&a.eval(lam).mul(&b.eval(lam))).max_abs();
            assert!(d < 1e-13);
        }
    }

    #[test]
    fn deflation_exact_and_remainder() {
        // (λ − 2)(λ + 1) = λ² − λ − 2 divided by (λ − 2) → λ + 1.
        let p = PolyMat::new(vec![
            CMat::from_rows(1, 1, &[cr(-2.0)]),
            CMat::from_rows(1, 1, &[cr(-1.0)]),
            CMat::from_rows(1, 1, &[cr(1.0)]),
        ]);
        let q = p.deflate_exact(cr(2.0), 1e-14).unwrap();
        assert!((q.coeff(0)[(0, 0)] - cr(1.0)).norm() < 1e-15);
        assert!((q.coeff(1)[(0, 0)] - cr(1.0)).norm() < 1e-15);
        assert!(p.deflate_exact(cr(3.0), 1e-14).is_err());
    }

    #[test]
    fn circle_interpolation_recovers_coefficients() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let deg = 5;
        let p = PolyMat::new(
            (0..=deg)
                .map(|_| CMat::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect(),
        );
        let radius = 1.7;
        let pts = circle_points(deg + 1, radius);
        let samples: Vec<CMat> = pts.iter().map(|&z| p.eval(z)).collect();
        let q = interpolate_circle_samples(&samples, radius);
        for t in 0..=deg {
            assert!(p.coeff(t).sub(&q.coeff(t)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn block_assembly_layout() {
        let a = PolyMat::constant(CMat::from_real(1, 2, &[1.0, 2.0]));
        let b = PolyMat::linear(CMat::zeros(1, 1), CMat::eye(1));
        let empty = PolyMat::zeros(1, 0);
        let g = PolyMat::from_blocks(&[vec![a.clone(), b.clone()], vec![a, empty.mul(&PolyMat::zeros(0, 1))]]);
        assert_eq!(g.rows(), 2);
        assert_eq!(g.cols(), 3);
        let at1 = g.eval(cr(1.0));
        assert_eq!(at1[(0, 2)], cr(1.0));
        assert_eq!(at1[(1, 0)], cr(1.0));
    }
}
