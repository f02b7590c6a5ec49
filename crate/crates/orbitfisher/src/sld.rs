//! Tangent-space machinery on a unitary orbit: the normal complement of
//! the stabilizer algebra, the commutator preimage map, the eigenvalue-gap
//! multiplier map, and the symmetric logarithmic derivative.
//!
//! Everything is computed in the eigenbasis of the base state and rotated
//! back, so all maps commute with simultaneous unitary conjugation of base
//! and argument by construction.

use crate::basis::{antisym_pair, sym_pair, BasisKind, BasisSet};
use crate::matrix::{Complex64, ComplexMatrix};
use crate::orbit::{partition_of, spectral_decompose_with_tol, DensityMatrix, SpectralData};
use crate::tol;
use crate::{Error, Result};

/// U A U^dagger.
fn rotate(u: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    &(u * a) * &u.adjoint()
}

/// U^dagger A U (into the eigenbasis when `u` holds eigenvectors).
fn corotate(u: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    &(&u.adjoint() * a) * u
}

/// Expands a cluster-size list into per-index cluster labels, e.g.
/// `[1, 2] -> [0, 1, 1]`.
pub(crate) fn cluster_ids(partition: &[usize]) -> Vec<usize> {
    let mut ids = Vec::new();
    for (c, &size) in partition.iter().enumerate() {
        ids.extend(std::iter::repeat(c).take(size));
    }
    ids
}

/// Largest magnitude among entries of `m` lying inside the diagonal blocks
/// described by `partition` (the stabilizer-pattern component).
fn block_diagonal_deviation(m: &ComplexMatrix, partition: &[usize]) -> f64 {
    let ids = cluster_ids(partition);
    let n = m.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if ids[i] == ids[j] {
                worst = worst.max(m.get(i, j).norm());
            }
        }
    }
    worst
}

/// A tangent vector to the orbit/stratum at a base state: a Hermitian
/// matrix supported, in the eigenbasis of the base, purely on
/// cross-cluster entries (the normal complement of the stabilizer).
///
/// The canonical spectral data of the base and the rotated representation
/// of the value are computed once at construction and cached.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: DensityMatrix,
    value: ComplexMatrix,
    spectral: SpectralData,
    partition: Vec<usize>,
    value_diag: ComplexMatrix,
    tol: f64,
}

impl TangentVector {
    /// Validates `value` as a tangent vector at `base` with the default
    /// clustering tolerance.
    pub fn new(base: DensityMatrix, value: ComplexMatrix) -> Result<Self> {
        Self::with_tol(base, value, tol::CLUSTER)
    }

    /// Validates `value` as a tangent vector at `base`: Hermitian, and all
    /// stabilizer-block entries in the eigenbasis below tolerance.
    pub fn with_tol(base: DensityMatrix, value: ComplexMatrix, tol_cluster: f64) -> Result<Self> {
        if base.n() != value.n() {
            return Err(Error::DimensionMismatch {
                left: base.n(),
                right: value.n(),
            });
        }
        value.check_hermitian()?;
        let spectral = spectral_decompose_with_tol(&base, tol_cluster)?;
        let partition = partition_of(&spectral.kappa, tol_cluster)?;
        let value_diag = corotate(&spectral.unitary, &value);
        let deviation = block_diagonal_deviation(&value_diag, &partition);
        let bound = tol::NORMAL_SUPPORT * value.frobenius_norm().max(1.0);
        if deviation > bound {
            return Err(Error::NotInNormalComplement { deviation, bound });
        }
        Ok(Self {
            base,
            value,
            spectral,
            partition,
            value_diag,
            tol: tol_cluster,
        })
    }

    /// Builds the tangent vector `[K, rho]` from an anti-Hermitian
    /// generator `K`; such commutators always lie in the normal complement.
    pub fn from_generator(base: DensityMatrix, k: &ComplexMatrix) -> Result<Self> {
        k.check_anti_hermitian()?;
        let value = crate::algebra::commutator(k, base.matrix())?.hermitian_part();
        Self::new(base, value)
    }

    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    /// The Hermitian matrix representing the tangent direction.
    pub fn value(&self) -> &ComplexMatrix {
        &self.value
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    /// The value rotated into the eigenbasis of the base.
    pub fn value_in_eigenbasis(&self) -> &ComplexMatrix {
        &self.value_diag
    }

    pub fn cluster_tol(&self) -> f64 {
        self.tol
    }

    /// Errors unless `other` sits at the same base state.
    pub fn check_same_base(&self, other: &TangentVector) -> Result<()> {
        let deviation = self.base.matrix().dist(other.base.matrix());
        if deviation > tol::NORMAL_SUPPORT {
            return Err(Error::BaseMismatch { deviation });
        }
        Ok(())
    }
}

/// The anti-Hermitian generator recovered from a tangent vector: `K` with
/// `[K, rho]` equal to the tangent value, supported on cross-cluster
/// entries of the eigenbasis.
#[derive(Debug, Clone)]
pub struct LiePreimage {
    base: DensityMatrix,
    value: ComplexMatrix,
}

impl LiePreimage {
    /// Validates anti-Hermiticity and cross-cluster support at `base`.
    pub fn new(base: DensityMatrix, value: ComplexMatrix) -> Result<Self> {
        Self::with_tol(base, value, tol::CLUSTER)
    }

    pub fn with_tol(base: DensityMatrix, value: ComplexMatrix, tol_cluster: f64) -> Result<Self> {
        value.check_anti_hermitian()?;
        let spectral = spectral_decompose_with_tol(&base, tol_cluster)?;
        let partition = partition_of(&spectral.kappa, tol_cluster)?;
        let in_eigen = corotate(&spectral.unitary, &value);
        let deviation = block_diagonal_deviation(&in_eigen, &partition);
        let bound = tol::NORMAL_SUPPORT * value.frobenius_norm().max(1.0);
        if deviation > bound {
            return Err(Error::NotInNormalComplement { deviation, bound });
        }
        Ok(Self { base, value })
    }

    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    /// The anti-Hermitian matrix K.
    pub fn value(&self) -> &ComplexMatrix {
        &self.value
    }
}

/// Hermitian generators spanning the normal complement of the stabilizer
/// of a diagonal state: for each cross-cluster index pair, the symmetric
/// and antisymmetric off-diagonal generators.
///
/// For a generic three-level state this reproduces the standard
/// lambda_1, lambda_2, lambda_4, lambda_5, lambda_6, lambda_7 span.
pub fn normal_basis(rho0: &DensityMatrix, partition: &[usize]) -> Result<BasisSet> {
    let kappa = diagonal_entries(rho0)?;
    let clusters = partition_of(&kappa, tol::CLUSTER)?;
    if clusters != partition {
        return Err(Error::PartitionMismatch {
            partition: partition.to_vec(),
            clusters,
        });
    }
    let ids = cluster_ids(partition);
    let n = rho0.n();
    let mut elements = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if ids[i] != ids[j] {
                elements.push(sym_pair(n, i, j));
                elements.push(antisym_pair(n, i, j));
            }
        }
    }
    BasisSet::new(n, elements, BasisKind::NormalComplement)
}

/// Normal-complement basis at an arbitrary state: the diagonal-frame
/// basis of [`normal_basis`] conjugated into the eigenframe of `rho`.
pub fn normal_basis_at(rho: &DensityMatrix) -> Result<BasisSet> {
    let spectral = spectral_decompose_with_tol(rho, tol::CLUSTER)?;
    let partition = partition_of(&spectral.kappa, tol::CLUSTER)?;
    let diag = DensityMatrix::new(ComplexMatrix::diag_real(&spectral.kappa))?;
    let basis = normal_basis(&diag, &partition)?;
    let moved = basis
        .elements
        .iter()
        .map(|e| crate::algebra::adjoint_action(&spectral.unitary, e))
        .collect::<Result<Vec<_>>>()?;
    BasisSet::new(rho.n(), moved, BasisKind::NormalComplement)
}

/// Extracts the diagonal of a diagonal density matrix, rejecting
/// off-diagonal content above tolerance.
fn diagonal_entries(rho0: &DensityMatrix) -> Result<Vec<f64>> {
    let m = rho0.matrix();
    let n = m.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(m.get(i, j).norm());
            }
        }
    }
    if worst > tol::NORMAL_SUPPORT {
        return Err(Error::Domain(format!(
            "state is not diagonal: off-diagonal magnitude {worst:.3e} exceeds {:.3e}",
            tol::NORMAL_SUPPORT
        )));
    }
    Ok((0..n).map(|i| m.get(i, i).re).collect())
}

/// The commutator preimage of a tangent vector: the unique `K` in the
/// normal complement with `[K, rho]` equal to the tangent value. In the
/// eigenbasis, `K_ij = v_ij / (kappa_j - kappa_i)` on cross-cluster
/// entries and zero elsewhere.
pub fn phi_inverse(v: &TangentVector) -> Result<LiePreimage> {
    let spectral = v.spectral();
    let kappa = &spectral.kappa;
    let ids = cluster_ids(v.partition());
    let n = v.base().n();
    let vd = v.value_in_eigenbasis();
    let mut k_diag = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if ids[i] != ids[j] {
                let denom = kappa[j] - kappa[i];
                k_diag.set(i, j, vd.get(i, j) / Complex64::new(denom, 0.0));
            }
        }
    }
    let k = rotate(&spectral.unitary, &k_diag);
    let residual = crate::algebra::commutator(&k, v.base().matrix())?.dist(v.value());
    let bound = tol::DEFAULT_TOL * v.value().frobenius_norm().max(1.0);
    if residual > bound {
        return Err(Error::Numerical {
            what: "commutator preimage residual".into(),
            measured: residual,
            bound,
        });
    }
    LiePreimage::with_tol(v.base().clone(), k, v.cluster_tol())
}

/// Entrywise multiplication by the eigenvalue gaps: `A_ij` maps to
/// `(kappa_i - kappa_j) A_ij` at a diagonal base state. Swaps Hermitian
/// and anti-Hermitian types and kills nothing on the cross-cluster
/// support, where the gaps are nonzero by construction.
pub fn d_map(rho0: &DensityMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let kappa = diagonal_entries(rho0)?;
    let partition = partition_of(&kappa, tol::CLUSTER)?;
    let ids = cluster_ids(&partition);
    let n = rho0.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: a.n(),
        });
    }
    let deviation = block_diagonal_deviation(a, &partition);
    let bound = tol::NORMAL_SUPPORT * a.frobenius_norm().max(1.0);
    if deviation > bound {
        return Err(Error::NotInNormalComplement { deviation, bound });
    }
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if ids[i] != ids[j] {
                out.set(i, j, a.get(i, j).scale(kappa[i] - kappa[j]));
            }
        }
    }
    Ok(out)
}

/// The symmetric logarithmic derivative of a tangent vector: the unique
/// `L` in the normal complement solving `v = (L rho + rho L) / 2`,
/// computed entrywise in the eigenbasis as `L_ij = 2 v_ij / (kappa_i +
/// kappa_j)` and rotated back.
pub fn sld(v: &TangentVector) -> Result<TangentVector> {
    let value = sld_value(v)?;
    TangentVector::with_tol(v.base().clone(), value, v.cluster_tol())
}

/// The SLD as a bare matrix, with the defining anticommutator residual
/// verified before returning.
pub(crate) fn sld_value(v: &TangentVector) -> Result<ComplexMatrix> {
    let spectral = v.spectral();
    let kappa = &spectral.kappa;
    let ids = cluster_ids(v.partition());
    let n = v.base().n();
    let vd = v.value_in_eigenbasis();
    let mut l_diag = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if ids[i] != ids[j] {
                let denom = kappa[i] + kappa[j];
                l_diag.set(i, j, vd.get(i, j).scale(2.0 / denom));
            }
        }
    }
    let l = rotate(&spectral.unitary, &l_diag);
    let anticomm = crate::algebra::anticommutator(&l, v.base().matrix())?;
    let residual = anticomm.scale_re(0.5).dist(v.value());
    let bound = tol::SLD_RESIDUAL_REL * v.value().frobenius_norm().max(1.0);
    if residual > bound {
        return Err(Error::Numerical {
            what: "symmetric logarithmic derivative residual".into(),
            measured: residual,
            bound,
        });
    }
    Ok(l)
}

/// A real basis of the Hermitian solutions of `{X, rho} = 0`: in the
/// eigenbasis these are exactly the matrices supported on the
/// zero-eigenvalue block, rotated back to the original frame. Empty for
/// positive-definite states.
pub fn homogeneous_solutions(rho: &DensityMatrix) -> Result<BasisSet> {
    homogeneous_solutions_with_tol(rho, tol::DEFAULT_TOL)
}

pub fn homogeneous_solutions_with_tol(rho: &DensityMatrix, tol_zero: f64) -> Result<BasisSet> {
    let spectral = spectral_decompose_with_tol(rho, tol_zero.min(tol::CLUSTER))?;
    let n = rho.n();
    let zero_indices: Vec<usize> = (0..n)
        .filter(|&i| spectral.kappa[i] <= tol_zero)
        .collect();
    let mut elements = Vec::new();
    for (a, &i) in zero_indices.iter().enumerate() {
        let mut e = ComplexMatrix::zeros(n);
        e.set(i, i, Complex64::new(1.0, 0.0));
        elements.push(rotate(&spectral.unitary, &e));
        for &j in &zero_indices[(a + 1)..] {
            elements.push(rotate(&spectral.unitary, &sym_pair(n, i, j)));
            elements.push(rotate(&spectral.unitary, &antisym_pair(n, i, j)));
        }
    }
    BasisSet::new(n, elements, BasisKind::Homogeneous)
}
