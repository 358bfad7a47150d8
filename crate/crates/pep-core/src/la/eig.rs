use crate::error::Error;
use crate::la::mat::{C64, CMat};
use crate::Result;

/// Eigendecomposition of a dense complex matrix via Schur reduction:
/// Householder Hessenberg, implicit single-shift QR with Givens rotations,
/// then back-substitution on the triangular factor for eigenvectors.
pub struct Eig {
    pub values: Vec<C64>,
    /// Right eigenvectors as columns, unit 2-norm. Empty when not requested.
    pub vectors: CMat,
}

struct Givens {
    c: f64,
    s: C64,
}

/// Rotation G = [[c, s], [-s̄, c]] with c real ≥ 0 and G·[a, b]ᵀ = [r, 0]ᵀ.
fn givens(a: C64, b: C64) -> Givens {
    let bn = b.norm();
    if bn == 0.0 {
        return Givens { c: 1.0, s: C64::new(0.0, 0.0) };
    }
    let an = a.norm();
    if an == 0.0 {
        return Givens { c: 0.0, s: b.conj() / bn };
    }
    let d = (an * an + bn * bn).sqrt();
    let c = an / d;
    let s = (a / an) * b.conj() / d;
    Givens { c, s }
}

impl Givens {
    /// Rows i, j of m over columns [j0, j1).
    fn apply_left(&self, m: &mut CMat, i: usize, j: usize, j0: usize, j1: usize) {
        for col in j0..j1 {
            let x = m[(i, col)];
            let y = m[(j, col)];
            m[(i, col)] = self.c * x + self.s * y;
            m[(j, col)] = -self.s.conj() * x + self.c * y;
        }
    }

    /// Columns i, j of m over rows [i0, i1) with the adjoint rotation.
    fn apply_right(&self, m: &mut CMat, i: usize, j: usize, i0: usize, i1: usize) {
        for row in i0..i1 {
            let x = m[(row, i)];
            let y = m[(row, j)];
            m[(row, i)] = self.c * x + self.s.conj() * y;
            m[(row, j)] = -self.s * x + self.c * y;
        }
    }
}

/// Reduce to upper Hessenberg by Householder reflectors, accumulating Q.
fn hessenberg(a: &mut CMat, q: &mut CMat) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        // Reflector acting on rows k+1..n to zero a[k+2.., k].
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = v[0];
        let phase = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { C64::new(1.0, 0.0) };
        v[0] += phase * norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // A <- (I - β v vᴴ) A on rows k+1.., all columns.
        for col in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * a[(k + 1 + t, col)];
            }
            dot *= beta;
            for (t, vi) in v.iter().enumerate() {
                let d = dot * vi;
                a[(k + 1 + t, col)] -= d;
            }
        }
        // A <- A (I - β v vᴴ) on columns k+1.., all rows.
        for row in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                dot += a[(row, k + 1 + t)] * vi;
            }
            dot *= beta;
            for (t, vi) in v.iter().enumerate() {
                let d = dot * vi.conj();
                a[(row, k + 1 + t)] -= d;
            }
        }
        // Q <- Q (I - β v vᴴ)
        for row in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                dot += q[(row, k + 1 + t)] * vi;
            }
            dot *= beta;
            for (t, vi) in v.iter().enumerate() {
                let d = dot * vi.conj();
                q[(row, k + 1 + t)] -= d;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(h: &CMat, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let m = (a + d) * 0.5;
    let det = a * d - b * c;
    let r = (m * m - det).sqrt();
    let l1 = m + r;
    let l2 = m - r;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur decomposition A = Q T Qᴴ. Returns (T, Q).
pub fn schur(a: &CMat) -> Result<(CMat, CMat)> {
    if !a.is_square() {
        return Err(Error::Dimension("schur needs a square matrix".into()));
    }
    let n = a.rows();
    let mut t = a.clone();
    let mut q = CMat::eye(n);
    if n <= 1 {
        return Ok((t, q));
    }
    hessenberg(&mut t, &mut q);

    let eps = f64::EPSILON;
    let max_total = 80 * n.max(4);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut stagnation = 0usize;

    while hi > 0 {
        // Deflate converged subdiagonals at the bottom of the active block.
        let sub = t[(hi, hi - 1)].norm();
        if sub <= eps * (t[(hi - 1, hi - 1)].norm() + t[(hi, hi)].norm() + f64::MIN_POSITIVE) {
            t[(hi, hi - 1)] = C64::new(0.0, 0.0);
            hi -= 1;
            stagnation = 0;
            continue;
        }
        // Find the top of the active block.
        let mut lo = hi;
        while lo > 0 {
            let s = t[(lo, lo - 1)].norm();
            if s <= eps * (t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm() + f64::MIN_POSITIVE) {
                t[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        total += 1;
        stagnation += 1;
        if total > max_total {
            return Err(Error::NonConvergence(total));
        }
        let sigma = if stagnation.is_multiple_of(13) {
            // Exceptional shift to break symmetric cycles.
            t[(hi, hi)] + C64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&t, hi)
        };

        // Implicit single-shift bulge chase on rows/cols lo..=hi.
        let mut x = t[(lo, lo)] - sigma;
        let mut y = t[(lo + 1, lo)];
        for k in lo..hi {
            let g = givens(x, y);
            let left_from = if k > lo { k - 1 } else { lo };
            g.apply_left(&mut t, k, k + 1, left_from, n);
            let row_hi = (k + 2).min(hi) + 1;
            g.apply_right(&mut t, k, k + 1, 0, row_hi);
            g.apply_right(&mut q, k, k + 1, 0, n);
            if k + 1 < hi {
                x = t[(k + 1, k)];
                y = t[(k + 2, k)];
            }
        }
    }
    // Zero the strictly lower part (numerically negligible by construction).
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((t, q))
}

/// Eigenvectors of an upper-triangular matrix by back-substitution,
/// with near-singular pivots perturbed to eps scale.
fn triangular_eigenvectors(t: &CMat) -> CMat {
    let n = t.rows();
    let tnorm = t.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut vecs = CMat::zeros(n, n);
    for j in 0..n {
        let lambda = t[(j, j)];
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[j] = C64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for k in i + 1..=j {
                acc += t[(i, k)] * y[k];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < eps * tnorm {
                den = C64::new(eps * tnorm, 0.0);
            }
            y[i] = -acc / den;
        }
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            vecs[(i, j)] = y[i] / norm;
        }
    }
    vecs
}

pub fn eig(a: &CMat, want_vectors: bool) -> Result<Eig> {
    let n = a.rows();
    if n == 0 {
        return Ok(Eig { values: vec![], vectors: CMat::zeros(0, 0) });
    }
    let (t, q) = schur(a)?;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    if !want_vectors {
        return Ok(Eig { values, vectors: CMat::zeros(0, 0) });
    }
    let y = triangular_eigenvectors(&t);
    let mut vectors = q.mul(&y);
    // Normalize columns.
    for j in 0..n {
        let norm = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                vectors[(i, j)] /= norm;
            }
        }
    }
    Ok(Eig { values, vectors })
}
