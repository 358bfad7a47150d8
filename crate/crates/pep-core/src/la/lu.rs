use crate::error::Error;
use crate::la::mat::{C64, CMat};
use crate::Result;

/// LU factorization with partial pivoting, PA = LU packed in one matrix.
pub struct Lu {
    lu: CMat,
    piv: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

pub fn factor(a: &CMat) -> Result<Lu> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot: f64 = 0.0;

    for k in 0..n {
        let mut best = k;
        let mut best_abs = lu[(k, k)].norm();
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > best_abs {
                best_abs = v;
                best = i;
            }
        }
        if best_abs == 0.0 {
            return Err(Error::SingularMatrix);
        }
        if best != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(best, j)];
                lu[(best, j)] = tmp;
            }
            piv.swap(k, best);
        }
        min_pivot = min_pivot.min(best_abs);
        max_pivot = max_pivot.max(best_abs);
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            if m.norm_sqr() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= m * t;
            }
        }
    }
    if n == 0 {
        min_pivot = 0.0;
    }
    Ok(Lu { lu, piv, min_pivot, max_pivot })
}

impl Lu {
    /// Crude reciprocal-condition estimate from the pivot magnitudes.
    pub fn rcond_estimate(&self) -> f64 {
        if self.max_pivot == 0.0 {
            0.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        // forward: L has unit diagonal
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // backward
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn solve_mat(&self, b: &CMat) -> CMat {
        let mut out = CMat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let col = b.col(j);
            let x = self.solve_vec(&col);
            for i in 0..b.rows() {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::mat::c;

    #[test]
    fn solve_matches_direct_product() {
        let a = CMat::from_rows(
            3,
            3,
            &[
                c(2.0, 1.0), c(-1.0, 0.0), c(0.5, -0.5),
                c(0.0, 3.0), c(1.0, 1.0), c(-2.0, 0.0),
                c(1.0, 0.0), c(0.0, -1.0), c(4.0, 2.0),
            ],
        );
        let x_true = vec![c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.25)];
        let b = a.mul_vec(&x_true);
        let lu = factor(&a).unwrap();
        let x = lu.solve_vec(&b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-12);
        }
        assert!(lu.rcond_estimate() > 1e-3);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = CMat::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(factor(&a), Err(Error::SingularMatrix)));
    }
}
