//! Shared helpers for the integration suites: seeded random polynomials in
//! every basis and planted singular constructions with known indices.
#![allow(dead_code)]

use pep_core::interp::{self, SampledFunction};
use pep_core::la::mat::{C64, CMat};
use pep_core::poly::{BasisDescriptor, BasisKind, MatrixPolynomial, NodeSet};
use rand::Rng;

pub fn unit_disk(rng: &mut impl Rng) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            return z;
        }
    }
}

pub fn random_nodes(rng: &mut impl Rng, count: usize) -> NodeSet {
    loop {
        let pts: Vec<C64> = (0..count).map(|_| unit_disk(rng)).collect();
        let mut ok = true;
        'outer: for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if (pts[i] - pts[j]).norm() < 5e-2 {
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

pub fn random_matrix(rng: &mut impl Rng, m: usize, n: usize) -> CMat {
    CMat::from_fn(m, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
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
    let coeffs = (0..=k).map(|_| random_matrix(rng, m, n)).collect();
    MatrixPolynomial::new(basis, k, coeffs).unwrap()
}

/// Re-express a monomial polynomial in the target basis through the
/// interpolation front ends (exact for polynomial input).
pub fn convert(p: &MatrixPolynomial, kind: BasisKind, rng: &mut impl Rng) -> MatrixPolynomial {
    let k = p.grade();
    let f = SampledFunction::from_poly(p);
    match kind {
        BasisKind::Monomial => p.clone(),
        BasisKind::Newton => {
            let ns = random_nodes(rng, k + 1);
            interp::divided_differences(&f, &ns).unwrap()
        }
        BasisKind::Lagrange => {
            let ns = random_nodes(rng, k + 1);
            interp::lagrange_sample(&f, &ns).unwrap()
        }
        BasisKind::Chebyshev1 => interp::chebyshev_coefficients(&f, k, 1, 2).unwrap(),
        BasisKind::Chebyshev2 => interp::chebyshev_coefficients(&f, k, 2, 2).unwrap(),
    }
}

/// 2×2 singular polynomial w(λ)·r(λ)ᵀ with right minimal index deg(r) and
/// left minimal index deg(w), in monomial form of grade deg(w)+deg(r).
pub fn planted_outer_product(
    rng: &mut impl Rng,
    left_index: usize,
    right_index: usize,
) -> MatrixPolynomial {
    let k = left_index + right_index;
    let w: Vec<[C64; 2]> = (0..=left_index)
        .map(|_| [unit_disk(rng) + C64::new(0.3, 0.0), unit_disk(rng) + C64::new(-0.2, 0.1)])
        .collect();
    let r: Vec<[C64; 2]> = (0..=right_index)
        .map(|_| [unit_disk(rng) + C64::new(0.1, -0.2), unit_disk(rng) + C64::new(0.4, 0.0)])
        .collect();
    let mut coeffs: Vec<CMat> = (0..=k).map(|_| CMat::zeros(2, 2)).collect();
    for (s, ws) in w.iter().enumerate() {
        for (t, rt) in r.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    let cur = coeffs[s + t][(i, j)];
                    coeffs[s + t][(i, j)] = cur + ws[i] * rt[j];
                }
            }
        }
    }
    MatrixPolynomial::new(BasisDescriptor::monomial(), k, coeffs).unwrap()
}
