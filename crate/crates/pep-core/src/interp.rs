//! Interpolation front ends: Chebyshev node generation, divided differences,
//! barycentric sampling and Chebyshev collocation, turning a sampled matrix
//! function into a matrix polynomial in the requested basis.

use crate::error::Error;
use crate::la::lu;
use crate::la::mat::{C64, CMat};
use crate::poly::{cheb_t, cheb_u, BasisDescriptor, MatrixPolynomial, NodeSet};
use crate::Result;

/// Where a sampled function is considered accurate, for diagnostics only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainHint {
    /// A real interval [a, b].
    Interval(f64, f64),
    /// A disk around a center.
    Disk(C64, f64),
    Unspecified,
}

/// A matrix-valued function given by an evaluation callback. The evaluator
/// must be deterministic for a fixed argument within one process run.
pub struct SampledFunction {
    rows: usize,
    cols: usize,
    domain: DomainHint,
    f: Box<dyn Fn(C64) -> CMat + Send + Sync>,
}

impl SampledFunction {
    pub fn new(rows: usize, cols: usize, f: impl Fn(C64) -> CMat + Send + Sync + 'static) -> Self {
        SampledFunction { rows, cols, domain: DomainHint::Unspecified, f: Box::new(f) }
    }

    pub fn with_domain(mut self, domain: DomainHint) -> Self {
        self.domain = domain;
        self
    }

    pub fn domain(&self) -> DomainHint {
        self.domain
    }

    /// Sample an existing polynomial (used for round trips and demos).
    pub fn from_poly(p: &MatrixPolynomial) -> Self {
        let p = p.clone();
        SampledFunction {
            rows: p.rows(),
            cols: p.cols(),
            domain: DomainHint::Unspecified,
            f: Box::new(move |z| p.eval(z)),
        }
    }

    /// Scalar e^λ demo function on [-1, 1].
    pub fn exp_demo() -> Self {
        SampledFunction {
            rows: 1,
            cols: 1,
            domain: DomainHint::Interval(-1.0, 1.0),
            f: Box::new(|z| CMat::from_rows(1, 1, &[z.exp()])),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn eval(&self, lambda: C64) -> CMat {
        let v = (self.f)(lambda);
        assert_eq!((v.rows(), v.cols()), (self.rows, self.cols), "evaluator shape drifted");
        v
    }
}

/// k+1 Chebyshev nodes: first kind cos((2i−1)/(k+1)·π/2), second kind
/// cos((i−1)π/k), i = 1..k+1, in that index order.
pub fn chebyshev_nodes(k: usize, kind: u8) -> Result<NodeSet> {
    if k == 0 {
        return Err(Error::ParamRange("node generation needs k ≥ 1".into()));
    }
    let pts: Vec<C64> = match kind {
        1 => (1..=(k + 1))
            .map(|i| {
                let t = (2.0 * i as f64 - 1.0) / (k as f64 + 1.0) * std::f64::consts::FRAC_PI_2;
                C64::new(t.cos(), 0.0)
            })
            .collect(),
        2 => (1..=(k + 1))
            .map(|i| {
                let t = (i as f64 - 1.0) * std::f64::consts::PI / k as f64;
                C64::new(t.cos(), 0.0)
            })
            .collect(),
        other => return Err(Error::ParamRange(format!("Chebyshev node kind must be 1 or 2, got {other}"))),
    };
    NodeSet::new(pts)
}

/// Divided-difference interpolation: k+1 nodes feed the table, the Newton
/// basis keeps the first k of them.
pub fn divided_differences(f: &SampledFunction, nodes: &NodeSet) -> Result<MatrixPolynomial> {
    let kp1 = nodes.len();
    if kp1 == 0 {
        return Err(Error::Nodes("need at least one node".into()));
    }
    let k = kp1 - 1;
    // Table column by column: c_i starts as y_i, then the usual update.
    let mut table: Vec<CMat> = nodes.points().iter().map(|&x| f.eval(x)).collect();
    let mut coeffs: Vec<CMat> = Vec::with_capacity(kp1);
    coeffs.push(table[0].clone());
    for j in 1..kp1 {
        for i in (j..kp1).rev() {
            let denom = nodes.x(i + 1) - nodes.x(i + 1 - j);
            table[i] = table[i].sub(&table[i - 1]).scale(C64::new(1.0, 0.0) / denom);
        }
        coeffs.push(table[j].clone());
    }
    let basis_nodes = NodeSet::new(nodes.points()[..k].to_vec())?;
    MatrixPolynomial::new(BasisDescriptor::newton(basis_nodes), k, coeffs)
}

/// Lagrange representation: store the samples, weights come with the nodes.
pub fn lagrange_sample(f: &SampledFunction, nodes: &NodeSet) -> Result<MatrixPolynomial> {
    if nodes.is_empty() {
        return Err(Error::Nodes("need at least one node".into()));
    }
    let k = nodes.len() - 1;
    let samples: Vec<CMat> = nodes.points().iter().map(|&x| f.eval(x)).collect();
    MatrixPolynomial::new(BasisDescriptor::lagrange(nodes.clone()), k, samples)
}

/// Largest deviation ‖P(λ) − T(λ)‖ over a uniform grid in the function's
/// interval hint; a diagnostic, not an accuracy guarantee.
pub fn max_sampled_deviation(f: &SampledFunction, p: &MatrixPolynomial, grid: usize) -> Option<f64> {
    let (a, b) = match f.domain() {
        DomainHint::Interval(a, b) => (a, b),
        _ => return None,
    };
    let mut worst = 0.0f64;
    for i in 0..grid.max(2) {
        let t = a + (b - a) * (i as f64) / ((grid.max(2) - 1) as f64);
        let z = C64::new(t, 0.0);
        worst = worst.max(p.eval(z).sub(&f.eval(z)).max_abs());
    }
    Some(worst)
}

/// Chebyshev coefficients by direct collocation: solve the (k+1)×(k+1)
/// system φ_j(x_i) entrywise against samples at Chebyshev nodes.
pub fn chebyshev_coefficients(
    f: &SampledFunction,
    k: usize,
    kind: u8,
    node_kind: u8,
) -> Result<MatrixPolynomial> {
    let nodes = chebyshev_nodes(k.max(1), node_kind)?;
    let basis = BasisDescriptor::chebyshev(kind)?;
    let phi = |j: usize, x: C64| if kind == 1 { cheb_t(j, x) } else { cheb_u(j, x) };
    if k == 0 {
        let c0 = f.eval(nodes.x(1));
        return MatrixPolynomial::new(basis, 0, vec![c0]);
    }
    let v = CMat::from_fn(k + 1, k + 1, |i, j| phi(j, nodes.x(i + 1)));
    let fac = lu::factor(&v)?;
    let samples: Vec<CMat> = nodes.points().iter().map(|&x| f.eval(x)).collect();
    let (m, n) = (f.rows(), f.cols());
    // One solve per matrix entry, batched as columns.
    let rhs = CMat::from_fn(k + 1, m * n, |i, e| samples[i][(e / n, e % n)]);
    let sol = fac.solve_mat(&rhs);
    let coeffs: Vec<CMat> = (0..=k)
        .map(|t| CMat::from_fn(m, n, |r, c| sol[(t, r * n + c)]))
        .collect();
    MatrixPolynomial::new(basis, k, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::mat::cr;
    use crate::poly::test_support::{random_nodes, random_poly};
    use crate::poly::BasisKind;
    use rand::SeedableRng;

    #[test]
    fn chebyshev_node_formulas() {
        let ns = chebyshev_nodes(1, 2).unwrap();
        assert!((ns.x(1) - cr(1.0)).norm() < 1e-15);
        assert!((ns.x(2) - cr(-1.0)).norm() < 1e-15);

        let ns = chebyshev_nodes(1, 1).unwrap();
        let s = 2.0f64.sqrt() / 2.0;
        assert!((ns.x(1) - cr(s)).norm() < 1e-15);
        assert!((ns.x(2) - cr(-s)).norm() < 1e-15);

        let ns = chebyshev_nodes(2, 2).unwrap();
        assert!((ns.x(1) - cr(1.0)).norm() < 1e-15);
        assert!(ns.x(2).norm() < 1e-15);
        assert!((ns.x(3) - cr(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn divided_differences_examples() {
        // f(x) = x² over {0,1,2} → Newton coefficients (0, 1, 1).
        let f = SampledFunction::new(1, 1, |z| CMat::from_rows(1, 1, &[z * z]));
        let ns = NodeSet::new(vec![cr(0.0), cr(1.0), cr(2.0)]).unwrap();
        let p = divided_differences(&f, &ns).unwrap();
        assert!(p.coeff(0)[(0, 0)].norm() < 1e-14);
        assert!((p.coeff(1)[(0, 0)] - cr(1.0)).norm() < 1e-14);
        assert!((p.coeff(2)[(0, 0)] - cr(1.0)).norm() < 1e-14);
        // interpolation conditions hold on all k+1 nodes
        for &x in ns.points() {
            assert!((p.eval(x)[(0, 0)] - x * x).norm() < 1e-13);
        }

        // constant: higher differences vanish
        let f = SampledFunction::new(1, 1, |_| CMat::from_rows(1, 1, &[cr(7.0)]));
        let p = divided_differences(&f, &ns).unwrap();
        assert!((p.coeff(0)[(0, 0)] - cr(7.0)).norm() < 1e-15);
        assert!(p.coeff(1)[(0, 0)].norm() < 1e-14);
        assert!(p.coeff(2)[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn divided_differences_round_trip_cubic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let q = random_poly(&mut rng, BasisKind::Monomial, 3, 2, 2);
        let f = SampledFunction::from_poly(&q);
        let ns = random_nodes(&mut rng, 4);
        let p = divided_differences(&f, &ns).unwrap();
        let back = p.to_monomial();
        for t in 0..=3 {
            let d = back.coeff(t).sub(q.coeff(t)).fro_norm();
            assert!(d < 1e-10 * (1.0 + q.coeff_scale()));
        }
    }

    #[test]
    fn lagrange_sampling() {
        let ns = NodeSet::new(vec![cr(0.0), cr(1.0), cr(2.0)]).unwrap();
        let w = ns.weights();
        assert!((w[0] - cr(0.5)).norm() < 1e-15);
        assert!((w[1] - cr(-1.0)).norm() < 1e-15);
        assert!((w[2] - cr(0.5)).norm() < 1e-15);

        let f = SampledFunction::new(1, 1, |z| CMat::from_rows(1, 1, &[z * z]));
        let p = lagrange_sample(&f, &ns).unwrap();
        for &x in ns.points() {
            assert_eq!(p.eval(x)[(0, 0)], x * x); // exact sample return
        }
        let back = p.to_monomial();
        assert!(back.coeff(0)[(0, 0)].norm() < 1e-14);
        assert!(back.coeff(1)[(0, 0)].norm() < 1e-14);
        assert!((back.coeff(2)[(0, 0)] - cr(1.0)).norm() < 1e-14);
    }

    #[test]
    fn chebyshev_collocation_examples() {
        // T(λ) = 2λ² − 1 sampled at 3 second-kind nodes → coefficients (0,0,1).
        let f = SampledFunction::new(1, 1, |z| CMat::from_rows(1, 1, &[z * z * 2.0 - 1.0]));
        let p = chebyshev_coefficients(&f, 2, 1, 2).unwrap();
        assert!(p.coeff(0)[(0, 0)].norm() < 1e-14);
        assert!(p.coeff(1)[(0, 0)].norm() < 1e-14);
        assert!((p.coeff(2)[(0, 0)] - cr(1.0)).norm() < 1e-14);

        // x³ = (3T₁ + T₃)/4.
        let f = SampledFunction::new(1, 1, |z| CMat::from_rows(1, 1, &[z * z * z]));
        let p = chebyshev_coefficients(&f, 3, 1, 2).unwrap();
        assert!((p.coeff(1)[(0, 0)] - cr(0.75)).norm() < 1e-14);
        assert!((p.coeff(3)[(0, 0)] - cr(0.25)).norm() < 1e-14);
        assert!(p.coeff(0)[(0, 0)].norm() < 1e-14);
        assert!(p.coeff(2)[(0, 0)].norm() < 1e-14);

        // constant
        let f = SampledFunction::new(1, 1, |_| CMat::from_rows(1, 1, &[cr(3.0)]));
        let p = chebyshev_coefficients(&f, 4, 2, 1).unwrap();
        assert!((p.coeff(0)[(0, 0)] - cr(3.0)).norm() < 1e-13);
        for t in 1..=4 {
            assert!(p.coeff(t)[(0, 0)].norm() < 1e-13);
        }
    }

    #[test]
    fn front_ends_agree_in_monomial_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let k = 5;
        let q = random_poly(&mut rng, BasisKind::Monomial, k, 2, 2);
        let f = SampledFunction::from_poly(&q);
        let ns = chebyshev_nodes(k, 2).unwrap();

        let newton = divided_differences(&f, &ns).unwrap().to_monomial();
        let lagr = lagrange_sample(&f, &ns).unwrap().to_monomial();
        let cheb = chebyshev_coefficients(&f, k, 1, 2).unwrap().to_monomial();
        let scale = q.coeff_scale();
        for t in 0..=k {
            for other in [&newton, &lagr, &cheb] {
                let d = other.coeff(t).sub(q.coeff(t)).fro_norm();
                assert!(d < 1e-10 * (1.0 + scale));
            }
        }
    }
}
