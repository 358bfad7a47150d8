use crate::la::mat::{C64, CMat};

/// Thin singular value decomposition A = U Σ Vᴴ with singular values sorted
/// descending. `u` is m×min(m,n), `v` is n×n (full right factor, so the
/// trailing columns span the nullspace in the rank-deficient case).
pub struct Svd {
    pub u: CMat,
    pub singular_values: Vec<f64>,
    pub v: CMat,
}

/// One-sided Jacobi SVD. Adequate and accurate at desk scale.
pub fn svd(a: &CMat) -> Svd {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        // A = U Σ Vᴴ  ⇔  Aᴴ = V Σ Uᴴ
        let t = svd_tall(&a.conj_transpose());
        // Aᴴ (n×m, n≥... here rows=cols(a)>rows(a)) gives u: n×m? careful:
        // svd_tall(Aᴴ): u is a.cols×a.rows (thin), v is a.rows×a.rows.
        Svd { u: t.v, singular_values: t.singular_values, v: pad_full(&t.u, a.cols()) }
    }
}

/// Extend a thin n×r column-orthonormal factor to a full n×n unitary by
/// appending an orthonormal basis of the complement.
fn pad_full(thin: &CMat, n: usize) -> CMat {
    let r = thin.cols();
    if r == n {
        return thin.clone();
    }
    let mut cols: Vec<Vec<C64>> = (0..r).map(|j| thin.col(j)).collect();
    // Gram-Schmidt candidate unit vectors against existing columns.
    let mut k = 0;
    while cols.len() < n && k < n {
        let mut cand = vec![C64::new(0.0, 0.0); n];
        cand[k] = C64::new(1.0, 0.0);
        for c in &cols {
            let proj: C64 = c.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
            for i in 0..n {
                let ci = c[i];
                cand[i] -= proj * ci;
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for z in cand.iter_mut() {
                *z /= norm;
            }
            cols.push(cand);
        }
        k += 1;
    }
    CMat::from_fn(n, n, |i, j| cols[j][i])
}

fn svd_tall(a: &CMat) -> Svd {
    let m = a.rows();
    let n = a.cols();
    if n == 0 || m == 0 {
        return Svd { u: CMat::zeros(m, 0), singular_values: vec![], v: CMat::eye(n) };
    }
    let mut w = a.clone();
    let mut v = CMat::eye(n);
    let eps = f64::EPSILON;
    let max_sweeps = 60;

    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                // Gram entries for columns p, q.
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = C64::new(0.0, 0.0);
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    app += wp.norm_sqr();
                    aqq += wq.norm_sqr();
                    apq += wp.conj() * wq;
                }
                let scale = (app * aqq).sqrt();
                if apq.norm() <= eps * scale || scale == 0.0 {
                    continue;
                }
                off = off.max(apq.norm() / scale);
                // Phase so the working Gram off-diagonal is real positive.
                let ph = apq / apq.norm();
                let g = apq.norm();
                let zeta = (aqq - app) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // Column rotation [p q] <- [p q]·R with
                // R = [[cs, sn·ph], [-sn·conj(ph), cs]].
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp * cs - wq * ph.conj() * sn;
                    w[(i, q)] = wp * ph * sn + wq * cs;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * cs - vq * ph.conj() * sn;
                    v[(i, q)] = vp * ph * sn + vq * cs;
                }
            }
        }
        if off <= eps * 4.0 {
            break;
        }
    }

    // Column norms are the singular values.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = CMat::zeros(m, n);
    let mut s = Vec::with_capacity(n);
    let mut vv = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let norm = norms[src];
        s.push(norm);
        for i in 0..m {
            u[(i, dst)] = if norm > 0.0 { w[(i, src)] / norm } else { C64::new(0.0, 0.0) };
        }
        for i in 0..n {
            vv[(i, dst)] = v[(i, src)];
        }
    }
    Svd { u, singular_values: s, v: vv }
}

/// Numerical rank with cutoff `sigma_max * max(dims) * rel_tol`.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let d = svd(a);
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let cutoff = smax * (a.rows().max(a.cols()) as f64) * rel_tol;
    d.singular_values.iter().filter(|&&x| x > cutoff).count()
}

/// Orthonormal basis of the right nullspace with cutoff `sigma_max * rel_tol`.
/// Returns the columns of V matching negligible singular values, plus any
/// columns beyond min(m, n).
pub fn nullspace(a: &CMat, rel_tol: f64) -> Vec<Vec<C64>> {
    let n = a.cols();
    if a.rows() == 0 {
        return (0..n)
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect();
    }
    let d = svd(a);
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = smax * rel_tol;
    let mut out = Vec::new();
    for j in 0..n {
        let sv = d.singular_values.get(j).copied().unwrap_or(0.0);
        if sv <= cutoff {
            out.push(d.v.col(j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::mat::{c, vec_norm};
    use rand::Rng;
    use rand::SeedableRng;

    fn reconstruct(d: &Svd, m: usize, n: usize) -> CMat {
        let r = d.singular_values.len();
        let mut sig = CMat::zeros(r, n.min(r));
        for i in 0..r.min(n) {
            sig[(i, i)] = c(d.singular_values[i], 0.0);
        }
        // u (m×r) · Σ (r×min) · Vᴴ rows — rebuild via full form
        let mut us = CMat::zeros(m, r);
        for i in 0..m {
            for j in 0..r {
                us[(i, j)] = d.u[(i, j)] * d.singular_values[j];
            }
        }
        let vh = d.v.conj_transpose();
        us.mul(&vh.block(0, 0, r, vh.cols()))
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(m, n) in &[(5usize, 3usize), (3, 5), (4, 4), (6, 2)] {
            let a = CMat::from_fn(m, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let d = svd(&a);
            let r = reconstruct(&d, m, n);
            assert!(a.sub(&r).fro_norm() < 1e-12 * (1.0 + a.fro_norm()), "m={m} n={n}");
            // descending
            for w in d.singular_values.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn rank_and_nullspace_of_rank_deficient() {
        // rank 1: second column is 2x the first
        let a = CMat::from_real(3, 2, &[1.0, 2.0, -1.0, -2.0, 0.5, 1.0]);
        assert_eq!(rank(&a, 1e-12), 1);
        let ns = nullspace(&a, 1e-10);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        let av = a.mul_vec(v);
        assert!(vec_norm(&av) < 1e-12);
    }
}
