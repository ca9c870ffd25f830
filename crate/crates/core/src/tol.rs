//! Central numeric tolerances.
//!
//! Every hard-coded threshold in the crate lives here so that tests and
//! downstream callers agree on one set of constants.

/// Tolerances used across decompositions, validation, and verification.
///
/// The defaults are calibrated for f64 on problems up to a few thousand
/// samples and a few hundred features; they are not meant to be tuned
/// per call site.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max allowed deviation of ZᵀZ from the identity (orthonormality checks).
    pub ortho: f64,
    /// Max allowed relative residual for factorization round-trips.
    pub resid: f64,
    /// Relative cutoff under which singular values are treated as zero.
    pub rel_cut: f64,
    /// Relative eigengap under which a top-k spectrum is declared degenerate.
    pub spectral_gap: f64,
    /// How far sigma may stray above 1 or below 0 before it is an error
    /// rather than rounding noise.
    pub sigma_slack: f64,
    /// Threshold on principal-angle distance for subspace-intersection tests.
    pub intersect: f64,
    /// Relative floor on metric eigenvalues before the metric counts as
    /// singular / indefinite.
    pub metric_floor: f64,
    /// Max allowed |mean| and |variance - 1| for standardized target columns.
    pub standardized: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ortho: 1e-10,
            resid: 1e-10,
            rel_cut: 1e-10,
            spectral_gap: 1e-8,
            sigma_slack: 1e-8,
            intersect: 1e-6,
            metric_floor: 1e-12,
            standardized: 1e-9,
        }
    }
}

impl Tolerances {
    /// Symmetry tolerance for a matrix of Frobenius norm `norm`.
    pub fn symmetry(&self, norm: f64) -> f64 {
        1e-10 * norm.max(1.0)
    }
}
