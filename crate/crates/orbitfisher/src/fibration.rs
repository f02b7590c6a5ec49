//! Orbit-over-orbit fibrations: the projection between orbits of nested
//! stabilizers, its tangent map, the vertical/horizontal splitting of
//! tangent spaces, and dimension accounting for chains of orbits.

use serde::Serialize;

use crate::algebra::adjoint_action;
use crate::matrix::ComplexMatrix;
use crate::orbit::{partition_of, DensityMatrix};
use crate::sld::{cluster_ids, phi_inverse, TangentVector};
use crate::tol;
use crate::{Error, Result};

/// A fibration between two orbits, given by diagonal representatives whose
/// stabilizers are nested: the eigenvalue partition of the total-space
/// representative `eta0` must refine the partition of the base
/// representative `xi0`.
#[derive(Debug, Clone)]
pub struct FibrationSpec {
    n: usize,
    eta0: DensityMatrix,
    xi0: DensityMatrix,
    eta_partition: Vec<usize>,
    xi_partition: Vec<usize>,
}

/// Whether every cluster boundary of `coarse` is also a boundary of
/// `fine`, i.e. `fine` subdivides `coarse`.
pub fn is_refinement(fine: &[usize], coarse: &[usize]) -> bool {
    if fine.iter().sum::<usize>() != coarse.iter().sum::<usize>() {
        return false;
    }
    let boundaries = |p: &[usize]| {
        let mut acc = 0;
        let mut out = Vec::with_capacity(p.len());
        for &size in p {
            acc += size;
            out.push(acc);
        }
        out
    };
    let fine_b = boundaries(fine);
    let coarse_b = boundaries(coarse);
    coarse_b.iter().all(|b| fine_b.contains(b))
}

impl FibrationSpec {
    /// Validates the pair of diagonal representatives and the stabilizer
    /// nesting between them.
    pub fn new(eta0: DensityMatrix, xi0: DensityMatrix) -> Result<Self> {
        if eta0.n() != xi0.n() {
            return Err(Error::DimensionMismatch {
                left: eta0.n(),
                right: xi0.n(),
            });
        }
        let eta_kappa = require_sorted_diagonal(&eta0)?;
        let xi_kappa = require_sorted_diagonal(&xi0)?;
        let eta_partition = partition_of(&eta_kappa, tol::CLUSTER)?;
        let xi_partition = partition_of(&xi_kappa, tol::CLUSTER)?;
        if !is_refinement(&eta_partition, &xi_partition) {
            return Err(Error::NotARefinement {
                fine: eta_partition,
                coarse: xi_partition,
            });
        }
        Ok(Self {
            n: eta0.n(),
            eta0,
            xi0,
            eta_partition,
            xi_partition,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta0(&self) -> &DensityMatrix {
        &self.eta0
    }

    pub fn xi0(&self) -> &DensityMatrix {
        &self.xi0
    }

    pub fn eta_partition(&self) -> &[usize] {
        &self.eta_partition
    }

    pub fn xi_partition(&self) -> &[usize] {
        &self.xi_partition
    }

    /// (dim of the base normal complement, dim of the vertical space
    /// inside the total normal complement, dim of the total normal
    /// complement); the first two sum exactly to the third.
    pub fn split_dims(&self) -> (usize, usize, usize) {
        let sum_sq = |p: &[usize]| p.iter().map(|m| m * m).sum::<usize>();
        let total = self.n * self.n - sum_sq(&self.eta_partition);
        let base = self.n * self.n - sum_sq(&self.xi_partition);
        let vertical = sum_sq(&self.xi_partition) - sum_sq(&self.eta_partition);
        (base, vertical, total)
    }
}

fn require_sorted_diagonal(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let m = rho.matrix();
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
            "representative is not diagonal: off-diagonal magnitude {worst:.3e}"
        )));
    }
    let kappa: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    for i in 1..n {
        if kappa[i] > kappa[i - 1] {
            return Err(Error::UnsortedEigenvalues {
                index: i,
                prev: kappa[i - 1],
                next: kappa[i],
            });
        }
    }
    Ok(kappa)
}

/// The fibration projection evaluated at a group element: `U xi0
/// U^dagger`. Well-defined on the total orbit because the stabilizer of
/// `eta0` is contained in the stabilizer of `xi0`.
pub fn project(spec: &FibrationSpec, u: &ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(adjoint_action(u, spec.xi0.matrix())?)
}

/// Verifies that the base of `v` lies on the orbit of `eta0` and returns
/// its canonical eigenvector matrix.
fn frame_on_total_orbit(spec: &FibrationSpec, v: &TangentVector) -> Result<ComplexMatrix> {
    let kappa = &v.spectral().kappa;
    let mut deviation = 0.0f64;
    for (i, k) in kappa.iter().enumerate() {
        deviation = deviation.max((k - spec.eta0.matrix().get(i, i).re).abs());
    }
    if deviation > tol::DEFAULT_TOL {
        return Err(Error::BaseMismatch { deviation });
    }
    Ok(v.spectral().unitary.clone())
}

/// The tangent map of the projection: a tangent vector `[K, eta]` at a
/// point of the total orbit maps to `[K, xi]` at the projected point.
/// Vertical directions (K commuting with xi) map to zero.
pub fn tangent_projection(spec: &FibrationSpec, v: &TangentVector) -> Result<TangentVector> {
    let u = frame_on_total_orbit(spec, v)?;
    let xi = project(spec, &u)?;
    let k = phi_inverse(v)?;
    let value = crate::algebra::commutator(k.value(), xi.matrix())?.hermitian_part();
    TangentVector::with_tol(xi, value, v.cluster_tol())
}

/// Splits a tangent vector at a total-orbit point into its vertical part
/// (generator inside the base stabilizer) and horizontal part (generator
/// in the base normal complement), by trace-orthogonal restriction to the
/// stabilizer block pattern in the eigenbasis.
pub fn vertical_horizontal_split(
    spec: &FibrationSpec,
    v: &TangentVector,
) -> Result<(TangentVector, TangentVector)> {
    let u = frame_on_total_orbit(spec, v)?;
    let k = phi_inverse(v)?;
    let k_frame = &(&u.adjoint() * k.value()) * &u;
    let xi_ids = cluster_ids(&spec.xi_partition);
    let n = spec.n;
    let mut vert_frame = ComplexMatrix::zeros(n);
    let mut horiz_frame = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if xi_ids[i] == xi_ids[j] {
                vert_frame.set(i, j, k_frame.get(i, j));
            } else {
                horiz_frame.set(i, j, k_frame.get(i, j));
            }
        }
    }
    let vert = &(&u * &vert_frame) * &u.adjoint();
    let horiz = &(&u * &horiz_frame) * &u.adjoint();
    let eta = v.base().matrix();
    let vertical_value = crate::algebra::commutator(&vert, eta)?.hermitian_part();
    let horizontal_value = crate::algebra::commutator(&horiz, eta)?.hermitian_part();
    let vertical = TangentVector::with_tol(v.base().clone(), vertical_value, v.cluster_tol())?;
    let horizontal = TangentVector::with_tol(v.base().clone(), horizontal_value, v.cluster_tol())?;
    Ok((vertical, horizontal))
}

/// One row of the dimension table for a nested pair of partitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingRow {
    /// Finer multiplicity partition (total space).
    pub fine: Vec<usize>,
    /// Coarser multiplicity partition (base space).
    pub coarse: Vec<usize>,
    /// Whether `fine` actually refines `coarse`.
    pub refines: bool,
    /// Orbit dimension of the total space.
    pub total_dim: usize,
    /// Orbit dimension of the base space.
    pub base_dim: usize,
    /// Fibre dimension (difference of stabilizer dimensions).
    pub fibre_dim: usize,
    /// Exact integer identity total = base + fibre (meaningful only when
    /// `refines` is set).
    pub identity_holds: bool,
}

/// Dimension accounting for a list of candidate fibrations at fixed `n`:
/// every pair is reported, with refinement violations flagged rather than
/// aborting the table.
pub fn nesting_report(n: usize, pairs: &[(Vec<usize>, Vec<usize>)]) -> Result<Vec<NestingRow>> {
    let mut rows = Vec::with_capacity(pairs.len());
    for (fine, coarse) in pairs {
        if fine.iter().sum::<usize>() != n || coarse.iter().sum::<usize>() != n {
            return Err(Error::Domain(format!(
                "partition does not sum to {n}: {fine:?} over {coarse:?}"
            )));
        }
        if fine.iter().any(|&m| m == 0) || coarse.iter().any(|&m| m == 0) {
            return Err(Error::Domain("partitions must have positive parts".into()));
        }
        let sum_sq = |p: &[usize]| p.iter().map(|m| m * m).sum::<usize>();
        let refines = is_refinement(fine, coarse);
        let total_dim = n * n - sum_sq(fine);
        let base_dim = n * n - sum_sq(coarse);
        let fibre_dim = sum_sq(coarse).saturating_sub(sum_sq(fine));
        rows.push(NestingRow {
            fine: fine.clone(),
            coarse: coarse.clone(),
            refines,
            total_dim,
            base_dim,
            fibre_dim,
            identity_holds: refines && total_dim == base_dim + fibre_dim,
        });
    }
    Ok(rows)
}

/// All ordered compositions of `n` into positive parts — the possible
/// multiplicity patterns of a weakly decreasing eigenvalue list.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for rest in compositions(n - first) {
            let mut c = Vec::with_capacity(rest.len() + 1);
            c.push(first);
            c.extend(rest);
            out.push(c);
        }
    }
    out
}
