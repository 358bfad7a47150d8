use num_complex::Complex;
use std::fmt;
use std::ops::{Index, IndexMut};

pub type C64 = Complex<f64>;

/// Dense row-major complex matrix. Zero-row or zero-column matrices are
/// legal and behave as empty operands in products and stacks.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn scaled_eye(n: usize, s: C64) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        CMat { rows, cols, data: entries.to_vec() }
    }

    /// Real entries, row-major.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        CMat { rows, cols, data: entries.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn column_vector(v: &[C64]) -> Self {
        CMat { rows: v.len(), cols: 1, data: v.to_vec() }
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_block(&mut self, i0: usize, j0: usize, b: &CMat) {
        assert!(i0 + b.rows <= self.rows && j0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(i0 + i, j0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn add_block(&mut self, i0: usize, j0: usize, b: &CMat) {
        assert!(i0 + b.rows <= self.rows && j0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(i0 + i, j0 + j)] += b[(i, j)];
            }
        }
    }

    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> CMat {
        assert!(i0 + rows <= self.rows && j0 + cols <= self.cols, "block out of range");
        CMat::from_fn(rows, cols, |i, j| self[(i0 + i, j0 + j)])
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "mul dimension mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for kk in 0..self.cols {
                let a = self[(i, kk)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(kk, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension mismatch");
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub dimension mismatch");
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn neg(&self) -> CMat {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value; cheap Frobenius bound is enough where only a
    /// scale is needed, this one is exact via the SVD.
    pub fn norm2(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        crate::la::svd::svd(self).singular_values[0]
    }

    pub fn hstack(parts: &[&CMat]) -> CMat {
        let parts: Vec<&&CMat> = parts.iter().filter(|p| p.cols > 0).collect();
        if parts.is_empty() {
            return CMat::zeros(0, 0);
        }
        let rows = parts[0].rows;
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = CMat::zeros(rows, cols);
        let mut j0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.set_block(0, j0, p);
            j0 += p.cols;
        }
        out
    }

    pub fn vstack(parts: &[&CMat]) -> CMat {
        let parts: Vec<&&CMat> = parts.iter().filter(|p| p.rows > 0).collect();
        if parts.is_empty() {
            return CMat::zeros(0, 0);
        }
        let cols = parts[0].cols;
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = CMat::zeros(rows, cols);
        let mut i0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack col mismatch");
            out.set_block(i0, 0, p);
            i0 += p.rows;
        }
        out
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// 2-norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean inner product ⟨u, v⟩ = uᴴv.
pub fn vec_dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_stack_roundtrip() {
        let a = CMat::from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = CMat::from_real(3, 2, &[7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let p = a.mul(&b);
        assert_eq!(p[(0, 0)], cr(58.0));
        assert_eq!(p[(1, 1)], cr(154.0));

        let s = CMat::hstack(&[&a.block(0, 0, 2, 1), &a.block(0, 1, 2, 2)]);
        assert_eq!(s, a);
        let v = CMat::vstack(&[&a.block(0, 0, 1, 3), &a.block(1, 0, 1, 3)]);
        assert_eq!(v, a);
    }

    #[test]
    fn empty_operands() {
        let e = CMat::zeros(0, 3);
        let b = CMat::from_real(3, 2, &[1.0; 6]);
        let p = e.mul(&b);
        assert_eq!((p.rows(), p.cols()), (0, 2));
        assert!(e.is_empty());
        let stacked = CMat::vstack(&[&e.block(0, 0, 0, 2), &b.block(0, 0, 1, 2)]);
        assert_eq!((stacked.rows(), stacked.cols()), (1, 2));
    }

    #[test]
    fn conj_transpose_is_adjoint() {
        let a = CMat::from_rows(2, 2, &[c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5), c(-2.0, 1.0)]);
        let x = vec![c(0.3, -0.7), c(1.1, 0.2)];
        let y = vec![c(-0.4, 0.9), c(0.6, 0.1)];
        let lhs = vec_dot(&y, &a.mul_vec(&x));
        let rhs = vec_dot(&a.conj_transpose().mul_vec(&y), &x);
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
