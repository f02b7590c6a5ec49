//! Central numerical tolerances.
//!
//! Every tolerance used by validation or by a numerical contract lives here so
//! the trade-offs are visible in one place. The general calibration: double
//! precision carries ~1e-16 relative error per operation, dense O(n^3) kernels
//! at n <= 64 accumulate to ~1e-13 in unlucky directions, and finite
//! differences trade truncation O(h^2) against roundoff O(eps/h).

/// Relative Frobenius tolerance for Hermitian / anti-Hermitian claims.
pub const HERMITICITY_REL: f64 = 1e-12;

/// Absolute floor for hermiticity checks on near-zero matrices, where a
/// relative test would be meaningless.
pub const HERMITICITY_ABS_FLOOR: f64 = 1e-14;

/// Frobenius bound on ||U^H U - I|| for matrices claimed unitary.
pub const UNITARITY: f64 = 1e-10;

/// |Tr(rho) - 1| admission bound for density matrices.
pub const TRACE_ONE: f64 = 1e-12;

/// Eigenvalue floor for positive-semidefiniteness: eigenvalues in
/// [-PSD_ADMISSION, 0) are treated as exact zeros.
pub const PSD_ADMISSION: f64 = 1e-12;

/// Spectral reconstruction bound ||U diag(kappa) U^H - rho||_F.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Default eigenvalue clustering tolerance (also the rank threshold):
/// consecutive gaps <= CLUSTER * max(1, |kappa_i|) merge into one cluster.
pub const CLUSTER: f64 = 1e-10;

/// Allowed stabilizer-block mass for a matrix claimed to lie in the normal
/// complement of the stabilizer algebra.
pub const NORMAL_SUPPORT: f64 = 1e-10;

/// Imaginary residue allowed when a trace pairing is asserted to be real.
pub const PAIRING_IMAG: f64 = 1e-12;

/// Imaginary residue allowed in the Killing-form operator trace (n^4
/// accumulation earns a looser bound than the plain pairing).
pub const KILLING_IMAG: f64 = 1e-10;

/// Relative residual for the defining SLD equation dp = (1/2){L, rho}.
pub const SLD_RESIDUAL_REL: f64 = 1e-12;

/// Agreement bound between the eigenbasis SLD and the independent
/// linear-system solution.
pub const ORACLE_MATCH: f64 = 1e-10;

/// Relative singular-value cutoff for minimum-norm least-squares solves.
pub const SVD_CUTOFF_REL: f64 = 1e-12;

/// Absolute singular-value threshold for numerical rank of structure maps.
pub const RANK_SV: f64 = 1e-10;

/// Central-difference step for first derivatives along curves.
pub const FD_STEP_DERIVATIVE: f64 = 1e-5;

/// Central-difference step for the exterior-derivative (closedness) check;
/// the outer difference of already-computed coefficients tolerates a larger
/// step than a raw first derivative.
pub const FD_STEP_CLOSEDNESS: f64 = 1e-4;

/// Bound on the finite-difference closedness residual of the antisymmetric
/// Fisher form on the 2x2 chart.
pub const CLOSEDNESS_BOUND: f64 = 1e-6;

/// Agreement bound between the curve Fisher index and 4x the Bures
/// coefficient computed from Maurer-Cartan data (both are O(h^2) finite
/// differences).
pub const CURVE_CONSISTENCY: f64 = 1e-8;

/// Equivariance deviation allowed after a round trip through an
/// eigendecomposition of a conjugated state.
pub const EQUIVARIANCE: f64 = 1e-10;

/// Skewness/symmetry deviation for the D and L structure maps under the
/// trace form.
pub const STRUCTURE_SKEW: f64 = 1e-12;

/// Smallest-to-largest singular value ratio above which the antisymmetric
/// Fisher matrix counts as full rank.
pub const ANTISYM_RANK_RATIO: f64 = 1e-8;

/// Allowed deviation of fitted degeneration exponents from their integer
/// targets (2 for the symmetric, 3 for the antisymmetric coefficient).
pub const DEGENERATION_EXPONENT: f64 = 0.05;

/// Default user-facing tolerance (clustering, rank, support checks).
pub const DEFAULT_TOL: f64 = 1e-10;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_ordering_is_sane() {
        // Admission bounds must be at least as tight as downstream contracts
        // that consume them.
        assert!(HERMITICITY_ABS_FLOOR < HERMITICITY_REL);
        assert!(HERMITICITY_REL <= TRACE_ONE);
        assert!(PSD_ADMISSION <= CLUSTER);
        assert!(CLUSTER <= RECONSTRUCTION * 10.0);
        assert!(SVD_CUTOFF_REL < RANK_SV);
        assert!(SLD_RESIDUAL_REL < ORACLE_MATCH);
        assert!(CURVE_CONSISTENCY < CLOSEDNESS_BOUND);
    }
}
