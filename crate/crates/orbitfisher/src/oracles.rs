//! Independent reference computations used to cross-check the closed-form
//! modules: a dense linear-system solver for the symmetric logarithmic
//! derivative, finite-difference derivatives along state curves,
//! Maurer-Cartan coefficients of the eigenframe, a closed-form qubit
//! information formula, and seeded random-state generation.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::{antisym_pair, sym_pair};
use crate::matrix::{unitary_exp, Complex64, ComplexMatrix};
use crate::orbit::{classify, partition_of, reconstruct, spectral_decompose, DensityMatrix};
use crate::sld::cluster_ids;
use crate::tol;
use crate::{Error, Result};

/// A one-parameter family of density matrices.
///
/// Rotations move the eigenframe, eigenvalue paths move the spectrum, and
/// composite curves do both at once.
#[derive(Debug, Clone)]
pub enum CurveSpec {
    /// `exp(theta K) rho0 exp(-theta K)` for anti-Hermitian `K`.
    UnitaryRotation {
        generator: ComplexMatrix,
        base: DensityMatrix,
    },
    /// `U diag(kappa0 + theta dkappa) U^dagger` for fixed unitary `U`.
    EigenvaluePath {
        kappa0: Vec<f64>,
        dkappa: Vec<f64>,
        unitary: ComplexMatrix,
    },
    /// `exp(theta K) U diag(kappa0 + theta dkappa) U^dagger exp(-theta K)`.
    Composite {
        generator: ComplexMatrix,
        kappa0: Vec<f64>,
        dkappa: Vec<f64>,
        unitary: ComplexMatrix,
    },
}

fn check_spectrum_params(n: usize, kappa0: &[f64], dkappa: &[f64]) -> Result<()> {
    if kappa0.len() != n || dkappa.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: kappa0.len().max(dkappa.len()),
        });
    }
    let trace: f64 = kappa0.iter().sum();
    if (trace - 1.0).abs() > tol::TRACE_ONE {
        return Err(Error::TraceNotOne {
            deviation: (trace - 1.0).abs(),
            bound: tol::TRACE_ONE,
        });
    }
    let drift: f64 = dkappa.iter().sum();
    if drift.abs() > tol::TRACE_ONE {
        return Err(Error::Domain(format!(
            "eigenvalue velocities must sum to zero, got {drift:.3e}"
        )));
    }
    Ok(())
}

impl CurveSpec {
    /// Isospectral rotation generated by an anti-Hermitian matrix.
    pub fn unitary_rotation(generator: ComplexMatrix, base: DensityMatrix) -> Result<Self> {
        if generator.n() != base.n() {
            return Err(Error::DimensionMismatch {
                left: generator.n(),
                right: base.n(),
            });
        }
        generator.check_anti_hermitian()?;
        Ok(Self::UnitaryRotation { generator, base })
    }

    /// Straight-line spectrum motion in a fixed eigenframe.
    pub fn eigenvalue_path(
        kappa0: Vec<f64>,
        dkappa: Vec<f64>,
        unitary: ComplexMatrix,
    ) -> Result<Self> {
        check_spectrum_params(unitary.n(), &kappa0, &dkappa)?;
        unitary.check_unitary(tol::UNITARITY)?;
        Ok(Self::EigenvaluePath {
            kappa0,
            dkappa,
            unitary,
        })
    }

    /// Simultaneous frame rotation and spectrum motion.
    pub fn composite(
        generator: ComplexMatrix,
        kappa0: Vec<f64>,
        dkappa: Vec<f64>,
        unitary: ComplexMatrix,
    ) -> Result<Self> {
        if generator.n() != unitary.n() {
            return Err(Error::DimensionMismatch {
                left: generator.n(),
                right: unitary.n(),
            });
        }
        generator.check_anti_hermitian()?;
        check_spectrum_params(unitary.n(), &kappa0, &dkappa)?;
        unitary.check_unitary(tol::UNITARITY)?;
        Ok(Self::Composite {
            generator,
            kappa0,
            dkappa,
            unitary,
        })
    }

    pub fn n(&self) -> usize {
        match self {
            Self::UnitaryRotation { base, .. } => base.n(),
            Self::EigenvaluePath { unitary, .. } | Self::Composite { unitary, .. } => unitary.n(),
        }
    }

    /// The state at parameter value `theta`; fails if the spectrum has
    /// left the admissible region there.
    pub fn evaluate(&self, theta: f64) -> Result<DensityMatrix> {
        match self {
            Self::UnitaryRotation { generator, base } => {
                let u = unitary_exp(&generator.scale_re(theta));
                DensityMatrix::new(crate::algebra::adjoint_action(&u, base.matrix())?)
            }
            Self::EigenvaluePath {
                kappa0,
                dkappa,
                unitary,
            } => {
                let kappa: Vec<f64> = kappa0
                    .iter()
                    .zip(dkappa)
                    .map(|(k, dk)| k + theta * dk)
                    .collect();
                DensityMatrix::new(reconstruct(unitary, &kappa))
            }
            Self::Composite {
                generator,
                kappa0,
                dkappa,
                unitary,
            } => {
                let kappa: Vec<f64> = kappa0
                    .iter()
                    .zip(dkappa)
                    .map(|(k, dk)| k + theta * dk)
                    .collect();
                let frame = &unitary_exp(&generator.scale_re(theta)) * unitary;
                DensityMatrix::new(reconstruct(&frame, &kappa))
            }
        }
    }
}

/// Orthonormal real basis of the Hermitian n x n matrices, in the order:
/// diagonal units, then for each index pair the real and the imaginary
/// off-diagonal direction.
pub(crate) fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(ComplexMatrix::elementary(n, i, i));
    }
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(sym_pair(n, i, j).scale(inv_sqrt2));
            out.push(antisym_pair(n, i, j).scale(inv_sqrt2));
        }
    }
    out
}

/// Solves `(X rho + rho X)/2 = a` for Hermitian `X` by flattening to an
/// n^2 x n^2 real-linear system and taking the minimum-norm solution.
///
/// For rank-deficient `rho` the solution is only determined up to
/// kernel-supported directions; project onto the normal complement of
/// `rho` before comparing with the closed form.
pub fn sld_linear_solve(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = rho.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: a.n(),
        });
    }
    a.check_hermitian()?;
    let basis = hermitian_basis(n);
    let dim = basis.len();
    let mut system = DMatrix::<f64>::zeros(dim, dim);
    for (b, elem) in basis.iter().enumerate() {
        let image = (&(elem * rho.matrix()) + &(rho.matrix() * elem)).scale_re(0.5);
        for (r, probe) in basis.iter().enumerate() {
            system[(r, b)] = probe.inner(&image).re;
        }
    }
    let rhs = DVector::<f64>::from_iterator(dim, basis.iter().map(|probe| probe.inner(a).re));

    let svd = system.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let cutoff = tol::SVD_CUTOFF_REL * sigma_max.max(1.0);
    let x = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::Domain(format!("singular-value solve failed: {e}")))?;

    let residual = (&system * &x - &rhs).norm();
    let bound = tol::RECONSTRUCTION * a.frobenius_norm().max(1.0);
    if residual > bound {
        return Err(Error::NoSolution { residual, bound });
    }

    let mut solution = ComplexMatrix::zeros(n);
    for (coeff, elem) in x.iter().zip(&basis) {
        solution = &solution + &elem.scale_re(*coeff);
    }
    Ok(solution.hermitian_part())
}

/// Trace-orthogonal projection onto the normal complement of `rho`:
/// zeroes all entries inside eigenvalue-cluster blocks of the eigenbasis.
pub fn project_to_normal_complement(
    rho: &DensityMatrix,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let spectral = spectral_decompose(rho)?;
    let ids = cluster_ids(&partition_of(&spectral.kappa, tol::CLUSTER)?);
    let n = rho.n();
    let frame = &(&spectral.unitary.adjoint() * x) * &spectral.unitary;
    let mut kept = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if ids[i] != ids[j] {
                kept.set(i, j, frame.get(i, j));
            }
        }
    }
    Ok(&(&spectral.unitary * &kept) * &spectral.unitary.adjoint())
}

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {h}")));
    }
    Ok(())
}

/// Central-difference derivative of the curve at `theta0`, symmetrized to
/// be exactly Hermitian. The curve must stay on one rank stratum across
/// the stencil.
pub fn finite_diff_derivative(curve: &CurveSpec, theta0: f64, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    let minus = curve.evaluate(theta0 - h)?;
    let center = curve.evaluate(theta0)?;
    let plus = curve.evaluate(theta0 + h)?;
    let ranks = vec![
        classify(&minus, tol::DEFAULT_TOL)?.rank,
        classify(&center, tol::DEFAULT_TOL)?.rank,
        classify(&plus, tol::DEFAULT_TOL)?.rank,
    ];
    if ranks[0] != ranks[1] || ranks[2] != ranks[1] {
        return Err(Error::StratumViolation { ranks });
    }
    let derivative = (plus.matrix() - minus.matrix())
        .scale_re(1.0 / (2.0 * h))
        .hermitian_part();
    let drift = derivative.trace().re.abs();
    if drift > tol::DEFAULT_TOL {
        return Err(Error::Numerical {
            what: "trace drift of the curve derivative".into(),
            measured: drift,
            bound: tol::DEFAULT_TOL,
        });
    }
    Ok(derivative)
}

/// Derivative data of the canonical eigendecomposition along a curve.
#[derive(Debug, Clone)]
pub struct MaurerCartanData {
    /// Eigenvalues at the expansion point, weakly decreasing.
    pub kappa: Vec<f64>,
    /// Eigenvalue velocities, summing to zero.
    pub dkappa: Vec<f64>,
    /// Cross-cluster entries of `U^dagger dU/dtheta`; entries inside an
    /// eigenvalue cluster are gauge-dependent and zeroed.
    pub offdiag: ComplexMatrix,
    /// Multiplicity partition at the expansion point.
    pub partition: Vec<usize>,
}

/// Differentiates eigenvalues and eigenframe of the curve at `theta0` by
/// central differences of the canonical spectral decomposition.
pub fn maurer_cartan_coefficients(
    curve: &CurveSpec,
    theta0: f64,
    h: f64,
) -> Result<MaurerCartanData> {
    check_step(h)?;
    let minus = spectral_decompose(&curve.evaluate(theta0 - h)?)?;
    let center = spectral_decompose(&curve.evaluate(theta0)?)?;
    let plus = spectral_decompose(&curve.evaluate(theta0 + h)?)?;
    let p_minus = partition_of(&minus.kappa, tol::CLUSTER)?;
    let p_center = partition_of(&center.kappa, tol::CLUSTER)?;
    let p_plus = partition_of(&plus.kappa, tol::CLUSTER)?;
    if p_minus != p_center || p_plus != p_center {
        return Err(Error::EigenvalueCrossing {
            partitions: vec![p_minus, p_center, p_plus],
        });
    }

    let n = center.kappa.len();
    let dkappa: Vec<f64> = (0..n)
        .map(|i| (plus.kappa[i] - minus.kappa[i]) / (2.0 * h))
        .collect();
    let drift: f64 = dkappa.iter().sum();
    if drift.abs() > tol::CURVE_CONSISTENCY {
        return Err(Error::Numerical {
            what: "trace drift of the eigenvalue velocities".into(),
            measured: drift.abs(),
            bound: tol::CURVE_CONSISTENCY,
        });
    }

    let du = (&plus.unitary - &minus.unitary).scale_re(1.0 / (2.0 * h));
    let full = &center.unitary.adjoint() * &du;
    let ids = cluster_ids(&p_center);
    let mut offdiag = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if ids[i] != ids[j] {
                offdiag.set(i, j, full.get(i, j));
            }
        }
    }
    let deviation = offdiag.anti_hermitian_deviation();
    let bound = tol::CURVE_CONSISTENCY * offdiag.frobenius_norm().max(1.0);
    if deviation > bound {
        return Err(Error::Numerical {
            what: "anti-Hermiticity of the frame derivative".into(),
            measured: deviation,
            bound,
        });
    }

    Ok(MaurerCartanData {
        kappa: center.kappa.clone(),
        dkappa,
        offdiag,
        partition: p_center,
    })
}

/// The quadratic information index of the curve at `theta0`: the trace
/// `Tr(rho L^2)` where `L` solves the full derivative equation, including
/// eigenvalue motion, via the dense linear system.
pub fn fisher_index_along_curve(curve: &CurveSpec, theta0: f64, h: f64) -> Result<f64> {
    let rho = curve.evaluate(theta0)?;
    let derivative = finite_diff_derivative(curve, theta0, h)?;
    let l = sld_linear_solve(&rho, &derivative)?;
    Ok((&(rho.matrix() * &l) * &l).trace().re)
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Closed-form information index for a qubit in Bloch coordinates:
/// `|db|^2 + (b . db)^2 / (1 - |b|^2)` inside the ball, tangential
/// `|db|^2` on the boundary sphere (radial motion there is rejected, as
/// it leaves the rank stratum).
pub fn qubit_qfi_reference(bloch: [f64; 3], dbloch: [f64; 3]) -> Result<f64> {
    let r2 = dot3(bloch, bloch);
    if r2 > 1.0 + tol::DEFAULT_TOL {
        return Err(Error::Domain(format!(
            "Bloch vector lies outside the unit ball: |b| = {:.12}",
            r2.sqrt()
        )));
    }
    let radial = dot3(bloch, dbloch);
    let speed2 = dot3(dbloch, dbloch);
    if 1.0 - r2 <= tol::DEFAULT_TOL {
        if radial.abs() > tol::DEFAULT_TOL {
            return Err(Error::Domain(format!(
                "radial velocity {radial:.3e} at the boundary of the Bloch ball"
            )));
        }
        return Ok(speed2);
    }
    Ok(speed2 + radial * radial / (1.0 - r2))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_unitary_with(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let ginibre = nalgebra::DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(gaussian(rng), gaussian(rng))
    });
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix the column phases so the distribution does not depend on the
    // sign conventions of the QR factorization.
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_na(&q)
}

/// Haar-like random unitary, deterministic per seed.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(n, &mut rng)
}

/// Random anti-Hermitian matrix with Gaussian entries, deterministic per
/// seed.
pub fn random_anti_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(n, |_, _| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)));
    (&g - &g.adjoint()).scale_re(0.5)
}

/// Random density matrix with the prescribed eigenvalue multiplicities.
///
/// The partition lists the positive-eigenvalue cluster sizes; indices not
/// covered by it become exact zero eigenvalues. Distinct cluster values
/// are kept at least 0.01 apart so the orbit type is numerically stable.
/// Deterministic per seed.
pub fn random_density(n: usize, partition: &[usize], seed: u64) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if partition.is_empty() || partition.iter().any(|&m| m == 0) {
        return Err(Error::Domain(format!(
            "multiplicities must be positive and non-empty: {partition:?}"
        )));
    }
    let support: usize = partition.iter().sum();
    if support > n {
        return Err(Error::Domain(format!(
            "multiplicities {partition:?} exceed the dimension {n}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = partition.len();
    let gaps: Vec<f64> = (0..k).map(|_| 1.0 + 0.2 * rng.random::<f64>()).collect();
    let mut levels = vec![0.0f64; k];
    for i in (0..k).rev() {
        levels[i] = gaps[i] + if i + 1 < k { levels[i + 1] } else { 0.0 };
    }
    let scale: f64 = partition
        .iter()
        .zip(&levels)
        .map(|(&m, &v)| m as f64 * v)
        .sum();
    if gaps.iter().any(|g| g / scale < 0.01) {
        return Err(Error::Domain(format!(
            "partition {partition:?} cannot satisfy the 0.01 eigenvalue gap floor at n = {n}"
        )));
    }

    let mut kappa = Vec::with_capacity(n);
    for (&m, &v) in partition.iter().zip(&levels) {
        kappa.extend(std::iter::repeat(v / scale).take(m));
    }
    kappa.resize(n, 0.0);

    let u = random_unitary_with(n, &mut rng);
    DensityMatrix::new(reconstruct(&u, &kappa))
}
