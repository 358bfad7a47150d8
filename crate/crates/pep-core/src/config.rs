//! Every numerical tolerance used by the crate, collected in one record so a
//! sweep over thresholds only has to touch a single place.

/// Tolerances for rank decisions, identity checks and recovery gates.
///
/// Defaults are the values the verification and acceptance suites pin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute defect allowed in K(λ)D(λ)ᵀ = 0, scaled by 1 + ‖K‖‖D‖.
    pub duality_abs: f64,
    /// Relative coefficient error allowed in D₂MD₁ᵀ against the monomial form.
    pub colleague_rel: f64,
    /// Relative defect allowed in the one-sided factorization identities.
    pub one_sided_rel: f64,
    /// Chordal distance allowed when matching eigenvalue multisets.
    pub spectral_chordal: f64,
    /// Relative residual gate for recovered eigenvectors.
    pub residual_rel: f64,
    /// Tolerance for hand-checked exact cases.
    pub exact_case: f64,
    /// Relative singular-value cutoff for rank decisions (scaled by σ_max·max(dims)).
    pub rank_rel: f64,
    /// Relative singular-value cutoff in nullspace extraction (scaled by σ_max).
    pub nullspace_rank: f64,
    /// |β| ≤ inf_beta · hypot(α, β) classifies a generalized eigenvalue as infinite.
    pub inf_beta: f64,
    /// |λ − x_i| ≤ node_coincidence · (1 + |x_i|) treats λ as sitting on a node
    /// for the purpose of recovery-rule sub-cases.
    pub node_coincidence: f64,
    /// |λ − x_i| < proximity · (1 + |x_i|) fires the barycentric proximity warning.
    pub proximity: f64,
    /// Eigenvalues with condition estimate above this are reported, not asserted.
    pub cond_gate: f64,
    /// Relative defect allowed in sampled polynomial identities (μ-coordinates,
    /// Chebyshev identities, Horner cross-checks).
    pub identity_rel: f64,
    /// Remainder gate for synthetic division when materializing rational entries.
    pub deflation_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            duality_abs: 1e-12,
            colleague_rel: 1e-10,
            one_sided_rel: 1e-10,
            spectral_chordal: 1e-8,
            residual_rel: 1e-8,
            exact_case: 1e-12,
            rank_rel: 1e-12,
            nullspace_rank: 1e-10,
            inf_beta: 1e-12,
            node_coincidence: 1e-10,
            proximity: 1e-14,
            cond_gate: 1e6,
            identity_rel: 1e-12,
            deflation_abs: 1e-12,
        }
    }
}

impl Tolerances {
    /// Set a tolerance by its field name. Returns false for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "duality_abs" => self.duality_abs = value,
            "colleague_rel" => self.colleague_rel = value,
            "one_sided_rel" => self.one_sided_rel = value,
            "spectral_chordal" => self.spectral_chordal = value,
            "residual_rel" => self.residual_rel = value,
            "exact_case" => self.exact_case = value,
            "rank_rel" => self.rank_rel = value,
            "nullspace_rank" => self.nullspace_rank = value,
            "inf_beta" => self.inf_beta = value,
            "node_coincidence" => self.node_coincidence = value,
            "proximity" => self.proximity = value,
            "cond_gate" => self.cond_gate = value,
            "identity_rel" => self.identity_rel = value,
            "deflation_abs" => self.deflation_abs = value,
            _ => return false,
        }
        true
    }
}
