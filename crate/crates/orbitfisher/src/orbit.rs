//! Canonical spectral decomposition of density matrices and the
//! classification of the unitary orbit and rank stratum they live on.
//!
//! A density matrix is carried to a canonical representative
//! `U diag(kappa) U^dagger` with `kappa` weakly decreasing and eigenvector
//! phases fixed, so repeated runs on the same input produce bit-identical
//! output. The multiplicity partition of `kappa` determines the stabilizer
//! block structure and the orbit and stratum dimensions.

use nalgebra::DVector;
use serde::Serialize;

use crate::matrix::{Complex64, ComplexMatrix};
use crate::tol;
use crate::{Error, Result};

/// Tag recorded in [`SpectralData`] describing how eigenvector phases are
/// normalized: in each column the largest-magnitude entry (ties broken by
/// lowest row index) is rotated to be real and non-negative.
pub const PHASE_CONVENTION: &str = "largest-component-real-positive";

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
///
/// Construction verifies all three invariants and stores the Hermitian part
/// of the input, so downstream code may rely on exact symmetry of the data.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `matrix` as a density matrix.
    ///
    /// Checks, in order: Hermiticity (relative Frobenius deviation),
    /// unit trace, and positive semidefiniteness, where eigenvalues in
    /// `[-1e-12, 0)` are treated as zeros rather than violations.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.check_hermitian()?;
        let t = matrix.trace();
        let trace_dev = (Complex64::new(t.re - 1.0, t.im)).norm();
        if trace_dev > tol::TRACE_ONE {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
                bound: tol::TRACE_ONE,
            });
        }
        let herm = matrix.hermitian_part();
        let eigenvalues = herm.to_na().symmetric_eigen().eigenvalues;
        let min_eigenvalue = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -tol::PSD_ADMISSION {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue,
                bound: tol::PSD_ADMISSION,
            });
        }
        Ok(Self { matrix: herm })
    }

    /// The underlying matrix (exactly Hermitian by construction).
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Matrix dimension n.
    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Canonical eigendecomposition of a density matrix.
///
/// `unitary` holds the eigenvectors as columns, ordered so that `kappa` is
/// weakly decreasing; within a degenerate cluster columns are
/// re-orthonormalized and sorted by lexicographic comparison of their
/// absolute-value vectors, then phase-fixed per [`PHASE_CONVENTION`].
/// The decomposition is deterministic for a fixed input but deliberately
/// not continuous across eigenvalue degeneracies.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Eigenvector matrix; column j corresponds to `kappa[j]`.
    pub unitary: ComplexMatrix,
    /// Eigenvalues, weakly decreasing, with values in `[-1e-12, 0)`
    /// clamped to zero.
    pub kappa: Vec<f64>,
    /// Phase normalization tag, always [`PHASE_CONVENTION`].
    pub phase_convention: &'static str,
}

/// Orbit and stratum classification data derived from the eigenvalue
/// multiplicity partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDescriptor {
    /// Multiplicities of the distinct eigenvalue clusters, in decreasing
    /// eigenvalue order; sums to n.
    pub partition: Vec<usize>,
    /// Number of eigenvalues strictly above the tolerance.
    pub rank: usize,
    /// Dimension of the unitary orbit: n^2 minus the sum of squared
    /// multiplicities.
    pub orbit_dim: usize,
    /// Dimension of the stratum of fixed rank k: 2nk - k^2 - 1.
    pub stratum_dim: usize,
    /// Block sizes of the stabilizer subgroup, a product of unitary groups
    /// U(m_1) x ... x U(m_r); equals the multiplicity partition (the kernel
    /// block of size n - k appears as the final entry when rank k < n).
    pub stabilizer_blocks: Vec<usize>,
}

/// Canonical spectral decomposition with the default clustering tolerance.
pub fn spectral_decompose(rho: &DensityMatrix) -> Result<SpectralData> {
    spectral_decompose_with_tol(rho, tol::CLUSTER)
}

/// Canonical spectral decomposition with an explicit clustering tolerance.
///
/// Steps: eigendecompose, sort eigenpairs by eigenvalue (weakly
/// decreasing, stable), clamp tiny negatives to zero, re-orthonormalize
/// inside each degenerate cluster by modified Gram-Schmidt, sort cluster
/// columns lexicographically by absolute value, fix phases, and verify the
/// reconstruction `U diag(kappa) U^dagger` against the input.
pub fn spectral_decompose_with_tol(rho: &DensityMatrix, tol_cluster: f64) -> Result<SpectralData> {
    let n = rho.n();
    let eig = rho.matrix().to_na().symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut kappa: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    for k in kappa.iter_mut() {
        if *k < 0.0 {
            if *k < -tol::PSD_ADMISSION {
                return Err(Error::NotPositiveSemidefinite {
                    min_eigenvalue: *k,
                    bound: tol::PSD_ADMISSION,
                });
            }
            *k = 0.0;
        }
    }

    let mut columns: Vec<DVector<Complex64>> = order
        .iter()
        .map(|&i| DVector::from(eig.eigenvectors.column(i).into_owned()))
        .collect();

    let partition = partition_of(&kappa, tol_cluster)?;
    let mut start = 0;
    for &size in &partition {
        let block = &mut columns[start..start + size];
        gram_schmidt(block);
        block.sort_by(|a, b| {
            for (x, y) in a.iter().zip(b.iter()) {
                match x.norm().total_cmp(&y.norm()) {
                    std::cmp::Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        });
        start += size;
    }
    for col in columns.iter_mut() {
        fix_phase(col);
    }

    let unitary = ComplexMatrix::from_fn(n, |i, j| columns[j][i]);
    let reconstruction = reconstruct(&unitary, &kappa);
    let deviation = reconstruction.dist(rho.matrix());
    if deviation > tol::RECONSTRUCTION {
        return Err(Error::Numerical {
            what: "spectral reconstruction".into(),
            measured: deviation,
            bound: tol::RECONSTRUCTION,
        });
    }

    Ok(SpectralData {
        unitary,
        kappa,
        phase_convention: PHASE_CONVENTION,
    })
}

/// Rebuilds `U diag(kappa) U^dagger`.
pub(crate) fn reconstruct(unitary: &ComplexMatrix, kappa: &[f64]) -> ComplexMatrix {
    let diag = ComplexMatrix::diag_real(kappa);
    &(unitary * &diag) * &unitary.adjoint()
}

fn gram_schmidt(block: &mut [DVector<Complex64>]) {
    for j in 0..block.len() {
        for i in 0..j {
            let coeff = block[i].dotc(&block[j]);
            let projection = &block[i] * coeff;
            block[j] -= projection;
        }
        let norm = block[j].norm();
        block[j] /= Complex64::new(norm, 0.0);
    }
}

fn fix_phase(col: &mut DVector<Complex64>) {
    let mut best = 0;
    for i in 1..col.len() {
        if col[i].norm() > col[best].norm() {
            best = i;
        }
    }
    let magnitude = col[best].norm();
    if magnitude > 0.0 {
        let phase = col[best] / magnitude;
        *col *= phase.conj();
    }
}

/// Groups weakly decreasing eigenvalues into degeneracy clusters and
/// returns the cluster sizes in order.
///
/// Consecutive values belong to the same cluster when their gap is at most
/// `tol * max(1, |previous value|)`. Input that is not weakly decreasing is
/// rejected.
pub fn partition_of(kappa: &[f64], tol: f64) -> Result<Vec<usize>> {
    if kappa.is_empty() {
        return Err(Error::Domain("empty eigenvalue list".into()));
    }
    for i in 1..kappa.len() {
        if kappa[i] > kappa[i - 1] {
            return Err(Error::UnsortedEigenvalues {
                index: i,
                prev: kappa[i - 1],
                next: kappa[i],
            });
        }
    }
    let mut partition = vec![1usize];
    for i in 1..kappa.len() {
        let gap = kappa[i - 1] - kappa[i];
        if gap <= tol * kappa[i - 1].abs().max(1.0) {
            *partition.last_mut().unwrap() += 1;
        } else {
            partition.push(1);
        }
    }
    Ok(partition)
}

/// Classifies the orbit and stratum of a density matrix.
///
/// `tol` is used both for eigenvalue clustering and as the threshold that
/// separates the kernel from the support when counting the rank.
pub fn classify(rho: &DensityMatrix, tol: f64) -> Result<OrbitDescriptor> {
    let spectral = spectral_decompose_with_tol(rho, tol)?;
    descriptor_from_kappa(&spectral.kappa, tol)
}

pub(crate) fn descriptor_from_kappa(kappa: &[f64], tol: f64) -> Result<OrbitDescriptor> {
    let n = kappa.len();
    let partition = partition_of(kappa, tol)?;
    let rank = kappa.iter().filter(|&&k| k > tol).count();
    let orbit_dim = n * n - partition.iter().map(|m| m * m).sum::<usize>();
    let stratum_dim = 2 * n * rank - rank * rank - 1;
    Ok(OrbitDescriptor {
        stabilizer_blocks: partition.clone(),
        partition,
        rank,
        orbit_dim,
        stratum_dim,
    })
}

/// Whether the state is a rank-one projector, i.e. `rho^2 = rho` up to `tol`
/// in Frobenius norm.
pub fn is_pure(rho: &DensityMatrix, tol: f64) -> bool {
    let m = rho.matrix();
    let square = m * m;
    square.dist(m) <= tol
}

/// The diagonal representative `diag(kappa)` of the orbit through `rho`,
/// with `kappa` weakly decreasing. Idempotent.
pub fn canonical_representative(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let spectral = spectral_decompose(rho)?;
    DensityMatrix::new(ComplexMatrix::diag_real(&spectral.kappa))
}
