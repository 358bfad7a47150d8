use crate::error::Error;
use crate::la::eig::eig;
use crate::la::lu;
use crate::la::mat::{C64, CMat};
use crate::Result;

/// One generalized eigenpair of λL₁ + L₀ in homogeneous (α, β) form:
/// λ = α/β, with β ≈ 0 marking an infinite eigenvalue.
#[derive(Debug, Clone)]
pub struct GepPair {
    pub alpha: C64,
    pub beta: C64,
    /// Right vector v with (λL₁ + L₀)v = 0 (β L₀ + α L₁ degenerate form).
    pub right: Vec<C64>,
    /// Left vector w with wᵀ(λL₁ + L₀) = 0, when requested.
    pub left: Option<Vec<C64>>,
}

impl GepPair {
    pub fn is_infinite(&self, inf_beta: f64) -> bool {
        self.beta.norm() <= inf_beta * (self.alpha.norm().hypot(self.beta.norm()))
    }

    pub fn lambda(&self, inf_beta: f64) -> Option<C64> {
        if self.is_infinite(inf_beta) {
            None
        } else {
            Some(self.alpha / self.beta)
        }
    }
}

/// Fixed unit-circle directions for the spectral shift, scaled by the pencil
/// norm ratio. The candidate list is part of the determinism contract.
const SHIFT_DIRS: [(f64, f64); 6] = [
    (0.9293498206, 0.3692357211),
    (-0.5812381937, 0.8137326993),
    (0.2673539271, -0.9636004525),
    (-0.8417483571, -0.5398720594),
    (0.6093871563, 0.7928730094),
    (-0.0812371945, 0.9966946021),
];

fn shift_candidates(l0: &CMat, l1: &CMat) -> Vec<C64> {
    let s0 = l0.fro_norm();
    let s1 = l1.fro_norm();
    let rho = if s1 > 0.0 { (s0 / s1).clamp(1e-2, 1e4) } else { 1.0 };
    let mut out = Vec::with_capacity(SHIFT_DIRS.len() * 2);
    for &(re, im) in &SHIFT_DIRS {
        out.push(C64::new(re * rho, im * rho));
    }
    // second ring, used when the first sits on the spectrum
    for &(re, im) in &SHIFT_DIRS {
        out.push(C64::new(re * rho * 3.7, im * rho * 3.7));
    }
    out
}

/// Factor L(σ) = σL₁ + L₀ for the best-conditioned deterministic shift.
fn pick_shift(l0: &CMat, l1: &CMat) -> Result<(C64, lu::Lu)> {
    let mut best: Option<(f64, C64, lu::Lu)> = None;
    for sigma in shift_candidates(l0, l1) {
        let ls = l0.add(&l1.scale(sigma));
        match lu::factor(&ls) {
            Ok(f) => {
                let rc = f.rcond_estimate();
                if rc > 1e-8 {
                    return Ok((sigma, f));
                }
                if best.as_ref().is_none_or(|(b, _, _)| rc > *b) {
                    best = Some((rc, sigma, f));
                }
            }
            Err(_) => continue,
        }
    }
    match best {
        Some((rc, sigma, f)) if rc > 1e-13 => Ok((sigma, f)),
        _ => Err(Error::SingularPencil(
            "every spectral shift produced a numerically singular L(σ); the pencil is likely singular".into(),
        )),
    }
}

fn right_pairs(l0: &CMat, l1: &CMat) -> Result<Vec<(C64, C64, Vec<C64>)>> {
    let (sigma, f) = pick_shift(l0, l1)?;
    // C = -L(σ)⁻¹ L₁ has eigenpairs (θ, v) with λ = σ + 1/θ and the same v.
    let c = f.solve_mat(l1).neg();
    let e = eig(&c, true)?;
    let mut out = Vec::with_capacity(e.values.len());
    for (j, &theta) in e.values.iter().enumerate() {
        let alpha = sigma * theta + C64::new(1.0, 0.0);
        let beta = theta;
        out.push((alpha, beta, e.vectors.col(j)));
    }
    Ok(out)
}

/// Chordal distance on the Riemann sphere between eigenvalues in (α, β) form.
pub fn chordal_homogeneous(a1: C64, b1: C64, a2: C64, b2: C64) -> f64 {
    let num = (a1 * b2 - a2 * b1).norm();
    let d1 = (a1.norm_sqr() + b1.norm_sqr()).sqrt();
    let d2 = (a2.norm_sqr() + b2.norm_sqr()).sqrt();
    if d1 == 0.0 || d2 == 0.0 {
        return f64::INFINITY;
    }
    num / (d1 * d2)
}

/// Dense generalized eigensolve of λL₁ + L₀ via a spectral-shift reduction to
/// one standard eigenproblem. Returns all n eigenpairs on the Riemann sphere.
pub fn solve(l0: &CMat, l1: &CMat, want_left: bool) -> Result<Vec<GepPair>> {
    if !l0.is_square() || l0.rows() != l1.rows() || l0.cols() != l1.cols() {
        return Err(Error::Dimension("pencil matrices must be square and equal-sized".into()));
    }
    let rights = right_pairs(l0, l1)?;
    let mut pairs: Vec<GepPair> = rights
        .into_iter()
        .map(|(alpha, beta, v)| GepPair { alpha, beta, right: v, left: None })
        .collect();

    if want_left {
        // Left vectors of (L₀, L₁) are right vectors of the transposed pencil.
        let lefts = right_pairs(&l0.transpose(), &l1.transpose())?;
        // Greedy chordal matching between the two eigenvalue lists.
        let mut used = vec![false; lefts.len()];
        for p in pairs.iter_mut() {
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for (j, (a2, b2, _)) in lefts.iter().enumerate() {
                if used[j] {
                    continue;
                }
                let d = chordal_homogeneous(p.alpha, p.beta, *a2, *b2);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            if best != usize::MAX {
                used[best] = true;
                p.left = Some(lefts[best].2.clone());
            }
        }
    }

    // Deterministic ordering: finite ascending |λ| then argument, infinite last.
    pairs.sort_by(|x, y| {
        let lx = x.lambda(1e-12);
        let ly = y.lambda(1e-12);
        match (lx, ly) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (Some(_), None) => std::cmp::Ordering::Less,
            (Some(a), Some(b)) => a
                .norm()
                .partial_cmp(&b.norm())
                .unwrap()
                .then(a.arg().partial_cmp(&b.arg()).unwrap()),
        }
    });
    Ok(pairs)
}
