//! Property tests for the representation layer: evaluation agrees with the
//! monomial form in every basis, reversal is an involution at fixed grade,
//! barycentric evaluation returns samples bit-exactly, and random dual pairs
//! keep their defining identities.

mod common;

use common::{random_nodes, random_poly};
use pep_core::config::Tolerances;
use pep_core::la::mat::{C64, CMat};
use pep_core::pencils::{body_product, coeff_rel_error, monomial_polymat};
use pep_core::poly::{BasisDescriptor, BasisKind, MatrixPolynomial};
use pep_core::polymat::PolyMat;
use pep_core::{chebyshev, lagrange, newton};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn basis_strategy() -> impl Strategy<Value = BasisKind> {
    prop_oneof![
        Just(BasisKind::Monomial),
        Just(BasisKind::Newton),
        Just(BasisKind::Lagrange),
        Just(BasisKind::Chebyshev1),
        Just(BasisKind::Chebyshev2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eval_matches_monomial_everywhere(
        seed in 0u64..1u64 << 48,
        kind in basis_strategy(),
        k in 1usize..=6,
        m in 1usize..=3,
        n in 1usize..=3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, kind, k, m, n);
        let q = p.to_monomial();
        let scale = p.coeff_scale().max(1.0);
        for _ in 0..10 {
            let lam = C64::new(
                rand::Rng::gen_range(&mut rng, -2.0..2.0),
                rand::Rng::gen_range(&mut rng, -2.0..2.0),
            );
            let d = p.eval(lam).sub(&q.eval(lam)).max_abs();
            let mag = q.eval(lam).max_abs().max(scale);
            prop_assert!(d <= 1e-12 * mag, "defect {d:e} at {lam}");
        }
    }

    #[test]
    fn double_reversal_identity(
        seed in 0u64..1u64 << 48,
        kind in basis_strategy(),
        k in 0usize..=6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = if kind == BasisKind::Newton || kind == BasisKind::Lagrange { k.max(1) } else { k };
        let p = random_poly(&mut rng, kind, k, 2, 2);
        // double reversal equals the monomial form coefficientwise
        let mono = p.to_monomial();
        let rr = p.reversal().reversal();
        for t in 0..=k {
            let d = mono.coeff(t).sub(rr.coeff(t)).max_abs();
            prop_assert!(d <= 1e-13 * (1.0 + p.coeff_scale()));
        }
    }

    #[test]
    fn barycentric_node_values_are_bit_exact(
        seed in 0u64..1u64 << 48,
        k in 1usize..=6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, BasisKind::Lagrange, k, 2, 2);
        let nodes = p.nodes().unwrap().clone();
        for j in 1..=(k + 1) {
            let v = p.eval(nodes.x(j));
            prop_assert!(v == *p.sample(j), "node {j} evaluation must be the stored sample");
        }
    }

    #[test]
    fn dual_pairs_stay_dual_and_bodies_reproduce(
        seed in 0u64..1u64 << 48,
        family in 0usize..4,
        k in 1usize..=5,
        param_pick in 0usize..5,
        m in 1usize..=2,
        n in 1usize..=2,
    ) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let param = param_pick % k;
        let kind = [BasisKind::Newton, BasisKind::Lagrange, BasisKind::Chebyshev1, BasisKind::Chebyshev2][family];
        let p = random_poly(&mut rng, kind, k, m, n);
        let (duals, body, nodes) = match kind {
            BasisKind::Newton => {
                let lin = newton::colleague(&p, param).unwrap();
                let d = newton::dual_bases(p.nodes().unwrap(), k, param, n, m).unwrap();
                let (m0, m1) = lin.pencil.body();
                (d, PolyMat::linear(m0, m1), p.nodes().cloned())
            }
            BasisKind::Lagrange => {
                let lin = lagrange::colleague(&p, param).unwrap();
                let d = lagrange::dual_bases(p.nodes().unwrap(), k, param, n, m).unwrap();
                let (m0, m1) = lin.pencil.body();
                (d, PolyMat::linear(m0, m1), p.nodes().cloned())
            }
            _ => {
                let r = if kind == BasisKind::Chebyshev1 { 1 } else { 2 };
                let lin = chebyshev::colleague(&p, param).unwrap();
                let d = chebyshev::dual_bases(k, param, r, 2, n, m).unwrap();
                let (m0, m1) = lin.pencil.body();
                (d, PolyMat::linear(m0, m1), None)
            }
        };
        prop_assert!(duals.k1.check_duality(&tol).unwrap());
        prop_assert!(duals.k2.check_duality(&tol).unwrap());
        let q = body_product(&body, &duals.k1.d, &duals.k2.d, nodes.as_ref());
        let mono = monomial_polymat(&p.to_monomial());
        prop_assert!(coeff_rel_error(&q, &mono) < tol.colleague_rel);
    }
}

#[test]
fn added_terms_annihilate_against_dual_bases() {
    // Appending A·K₁ + K₂ᵀ·B to any body leaves D₂·M·D₁ᵀ unchanged.
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10 {
        let k = rand::Rng::gen_range(&mut rng, 2usize..=6);
        let mu = rand::Rng::gen_range(&mut rng, 0usize..k);
        let n = rand::Rng::gen_range(&mut rng, 1usize..=3);
        let m = rand::Rng::gen_range(&mut rng, 1usize..=3);
        let ns = random_nodes(&mut rng, k);
        let duals = newton::dual_bases(&ns, k, mu, n, m).unwrap();
        let body = PolyMat::linear(
            common::random_matrix(&mut rng, (mu + 1) * m, (k - mu) * n),
            common::random_matrix(&mut rng, (mu + 1) * m, (k - mu) * n),
        );
        let base = body_product(&body, &duals.k1.d, &duals.k2.d, Some(&ns));
        let a = common::random_matrix(&mut rng, (mu + 1) * m, (k - mu - 1) * n);
        let b = common::random_matrix(&mut rng, mu * m, (k - mu) * n);
        let mut shifted = body.clone();
        if !duals.k1.k.is_empty() {
            shifted = shifted.add(&duals.k1.k.lmul_const(&a));
        }
        if !duals.k2.k.is_empty() {
            shifted = shifted.add(&duals.k2.k.transpose().rmul_const(&b));
        }
        let with_terms = body_product(&shifted, &duals.k1.d, &duals.k2.d, Some(&ns));
        assert!(
            coeff_rel_error(&base, &with_terms) < tol.colleague_rel,
            "k={k} mu={mu}"
        );
    }
}

#[test]
fn lagrange_weights_check_on_load() {
    // Serialized Lagrange polynomials round-trip with weights recomputed
    // from the nodes; a doctored node list changes them detectably.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = random_poly(&mut rng, BasisKind::Lagrange, 3, 2, 2);
    let s = serde_json::to_string(&p).unwrap();
    let q: MatrixPolynomial = serde_json::from_str(&s).unwrap();
    let w0 = p.nodes().unwrap().weights().to_vec();
    let w1 = q.nodes().unwrap().weights().to_vec();
    for (a, b) in w0.iter().zip(&w1) {
        assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn zero_grade_polynomials_are_fine() {
    // grade 0 corner: constant polynomials evaluate and convert
    let p = MatrixPolynomial::new(
        BasisDescriptor::monomial(),
        0,
        vec![CMat::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0])],
    )
    .unwrap();
    assert_eq!(p.eval(C64::new(3.0, 1.0))[(1, 1)], C64::new(4.0, 0.0));
    let r = p.reversal();
    assert_eq!(r.coeff(0)[(0, 1)], C64::new(2.0, 0.0));
}
