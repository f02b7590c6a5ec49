//! Geometric tensors on an orbit: the canonical symplectic form, the
//! Fisher tensor with its symmetric/antisymmetric split, the Bures metric,
//! the anticommutator metric, and the closed-form coefficients for
//! three-level states.
//!
//! Sign conventions (fixed by the two-level hand computations in the
//! tests): the symplectic pairing is evaluated as `-i Tr(rho [K_v, K_w])`
//! with anti-Hermitian preimages, and the antisymmetric part of the Fisher
//! tensor is the imaginary part of `Tr(rho L_v L_w)`.

use serde::Serialize;

use crate::basis::BasisSet;
use crate::matrix::{unitary_exp_frechet, Complex64, ComplexMatrix};
use crate::orbit::{partition_of, spectral_decompose_with_tol, DensityMatrix};
use crate::sld::{cluster_ids, TangentVector};
use crate::tol;
use crate::{Error, Result};

/// Convention metadata attached to every tensor report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Conventions {
    /// How the symplectic pairing is made real.
    pub pairing_sign: &'static str,
    /// How the antisymmetric part is read off the Fisher tensor.
    pub antisym_extraction: &'static str,
    /// Eigenvalue ordering of the canonical decomposition.
    pub eigenvalue_order: &'static str,
}

/// The fixed conventions used throughout this crate.
pub const CONVENTIONS: Conventions = Conventions {
    pairing_sign: "-i*Tr(rho*[Kv,Kw])",
    antisym_extraction: "Im Tr(rho*Lv*Lw)",
    eigenvalue_order: "weakly-decreasing",
};

/// Working frame for tensor evaluation: everything is computed in the
/// eigenbasis of the base state, where the entrywise formulas apply.
struct Frame {
    kappa: Vec<f64>,
    ids: Vec<usize>,
    unitary: ComplexMatrix,
}

impl Frame {
    fn for_state(rho: &DensityMatrix, tol_cluster: f64) -> Result<Frame> {
        let spectral = spectral_decompose_with_tol(rho, tol_cluster)?;
        let partition = partition_of(&spectral.kappa, tol_cluster)?;
        Ok(Frame {
            ids: cluster_ids(&partition),
            kappa: spectral.kappa,
            unitary: spectral.unitary,
        })
    }

    fn for_tangent(v: &TangentVector) -> Frame {
        Frame {
            kappa: v.spectral().kappa.clone(),
            ids: cluster_ids(v.partition()),
            unitary: v.spectral().unitary.clone(),
        }
    }

    fn n(&self) -> usize {
        self.kappa.len()
    }

    /// U^dagger m U.
    fn to_frame(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.unitary.adjoint() * m) * &self.unitary
    }

    /// Checks that a frame-coordinates matrix vanishes on the stabilizer
    /// blocks, i.e. represents an element of the normal complement.
    fn check_support(&self, m: &ComplexMatrix) -> Result<()> {
        let mut deviation = 0.0f64;
        for i in 0..self.n() {
            for j in 0..self.n() {
                if self.ids[i] == self.ids[j] {
                    deviation = deviation.max(m.get(i, j).norm());
                }
            }
        }
        let bound = tol::NORMAL_SUPPORT * m.frobenius_norm().max(1.0);
        if deviation > bound {
            return Err(Error::NotInNormalComplement { deviation, bound });
        }
        Ok(())
    }

    /// Commutator preimage in frame coordinates: entry (i, j) divided by
    /// kappa_j - kappa_i on the cross-cluster support.
    fn preimage(&self, vd: &ComplexMatrix) -> ComplexMatrix {
        self.entrywise(vd, |i, j, kappa| 1.0 / (kappa[j] - kappa[i]))
    }

    /// SLD in frame coordinates: entry (i, j) times 2 / (kappa_i + kappa_j).
    fn sld(&self, vd: &ComplexMatrix) -> ComplexMatrix {
        self.entrywise(vd, |i, j, kappa| 2.0 / (kappa[i] + kappa[j]))
    }

    /// Gap map in frame coordinates: entry (i, j) times kappa_i - kappa_j.
    fn gap(&self, vd: &ComplexMatrix) -> ComplexMatrix {
        self.entrywise(vd, |i, j, kappa| kappa[i] - kappa[j])
    }

    fn entrywise(&self, m: &ComplexMatrix, f: impl Fn(usize, usize, &[f64]) -> f64) -> ComplexMatrix {
        let n = self.n();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if self.ids[i] != self.ids[j] {
                    out.set(i, j, m.get(i, j).scale(f(i, j, &self.kappa)));
                }
            }
        }
        out
    }

    /// Tr(diag(kappa) * m).
    fn trace_rho(&self, m: &ComplexMatrix) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n() {
            acc += m.get(i, i).scale(self.kappa[i]);
        }
        acc
    }

    /// The real value of `-i Tr(diag(kappa) [a, b])`, with the residual
    /// real part of the raw trace verified to vanish.
    fn pairing(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
        let comm = &(a * b) - &(b * a);
        let t = self.trace_rho(&comm);
        let scale = t.norm().max(1.0);
        if t.re.abs() > tol::PAIRING_IMAG * scale {
            return Err(Error::Numerical {
                what: "residual real part of the symplectic pairing".into(),
                measured: t.re.abs(),
                bound: tol::PAIRING_IMAG * scale,
            });
        }
        Ok(t.im)
    }
}

/// The canonical symplectic form at the shared base of `v` and `w`:
/// `-i Tr(rho [K_v, K_w])` with `K` the anti-Hermitian commutator
/// preimages. Real, antisymmetric, equivariant.
pub fn kks_form(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    v.check_same_base(w)?;
    let frame = Frame::for_tangent(v);
    let kv = frame.preimage(v.value_in_eigenbasis());
    let kw = frame.preimage(&frame.to_frame(w.value()));
    frame.pairing(&kv, &kw)
}

/// The Fisher tensor `Tr(rho L_v L_w)` evaluated through the symmetric
/// logarithmic derivatives of the two tangent vectors.
pub fn fisher_tensor(v: &TangentVector, w: &TangentVector) -> Result<Complex64> {
    v.check_same_base(w)?;
    let frame = Frame::for_tangent(v);
    let lv = frame.sld(v.value_in_eigenbasis());
    let lw = frame.sld(&frame.to_frame(w.value()));
    Ok(frame.trace_rho(&(&lv * &lw)))
}

/// The anticommutator metric `(1/2) Tr(rho {K'_v, K'_w})` with Hermitian
/// carriers `K' = -i K`; real, symmetric, positive definite on the orbit.
pub fn kks_compatible_metric(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    v.check_same_base(w)?;
    let frame = Frame::for_tangent(v);
    let minus_i = Complex64::new(0.0, -1.0);
    let kv = frame.preimage(v.value_in_eigenbasis()).scale(minus_i);
    let kw = frame.preimage(&frame.to_frame(w.value())).scale(minus_i);
    let anti = &(&kv * &kw) + &(&kw * &kv);
    let t = frame.trace_rho(&anti);
    Ok(0.5 * t.re)
}

/// The Bures metric on tangent pairs: one quarter of the symmetrized
/// Fisher tensor.
pub fn bures_tangent(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    v.check_same_base(w)?;
    let frame = Frame::for_tangent(v);
    let lv = frame.sld(v.value_in_eigenbasis());
    let lw = frame.sld(&frame.to_frame(w.value()));
    let sym = &(&lv * &lw) + &(&lw * &lv);
    Ok(0.25 * (0.5 * frame.trace_rho(&sym).re))
}

/// All tensor coefficients of a state in a declared basis of the normal
/// complement, with the structural invariants verified at construction.
#[derive(Debug, Clone, Serialize)]
pub struct TensorReport {
    /// Matrix dimension of the underlying state.
    pub n: usize,
    /// Canonical eigenvalues of the state.
    pub kappa: Vec<f64>,
    /// Multiplicity partition of the eigenvalues.
    pub partition: Vec<usize>,
    /// Number of basis elements (= dimension of the normal complement).
    pub dim: usize,
    /// Real part of the Fisher tensor; symmetric positive semidefinite.
    pub fisher_sym: Vec<Vec<f64>>,
    /// Imaginary part of the Fisher tensor; antisymmetric.
    pub fisher_antisym: Vec<Vec<f64>>,
    /// Canonical symplectic form coefficients; antisymmetric.
    pub kks: Vec<Vec<f64>>,
    /// Bures metric coefficients: fisher_sym / 4.
    pub bures: Vec<Vec<f64>>,
    /// Sign and extraction conventions in force.
    pub conventions: Conventions,
    #[serde(skip)]
    base: DensityMatrix,
    #[serde(skip)]
    basis: BasisSet,
}

impl TensorReport {
    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }
}

/// Evaluates the Fisher tensor, its split, the symplectic form, and the
/// Bures coefficients over a basis of the normal complement at `rho`.
///
/// The basis must have exactly the dimension of the normal complement and
/// every element must be Hermitian with cross-cluster support; a state
/// with a zero-dimensional orbit (maximally mixed) yields an empty report.
pub fn fisher_split(rho: &DensityMatrix, basis: &BasisSet) -> Result<TensorReport> {
    let frame = Frame::for_state(rho, tol::CLUSTER)?;
    let n = frame.n();
    let partition = partition_of(&frame.kappa, tol::CLUSTER)?;
    let expected = n * n - partition.iter().map(|m| m * m).sum::<usize>();
    if basis.len() != expected {
        return Err(Error::Domain(format!(
            "basis has {} elements but the normal complement has dimension {expected}",
            basis.len()
        )));
    }

    let mut rotated = Vec::with_capacity(basis.len());
    for e in &basis.elements {
        e.check_hermitian()?;
        let ed = frame.to_frame(e);
        frame.check_support(&ed)?;
        rotated.push(ed);
    }
    let slds: Vec<ComplexMatrix> = rotated.iter().map(|ed| frame.sld(ed)).collect();
    let preimages: Vec<ComplexMatrix> = rotated.iter().map(|ed| frame.preimage(ed)).collect();

    let d = basis.len();
    let mut fisher_sym = vec![vec![0.0; d]; d];
    let mut fisher_antisym = vec![vec![0.0; d]; d];
    let mut kks = vec![vec![0.0; d]; d];
    for a in 0..d {
        for b in 0..d {
            let f = frame.trace_rho(&(&slds[a] * &slds[b]));
            fisher_sym[a][b] = f.re;
            fisher_antisym[a][b] = f.im;
            kks[a][b] = frame.pairing(&preimages[a], &preimages[b])?;
        }
    }
    let bures = fisher_sym
        .iter()
        .map(|row| row.iter().map(|x| x / 4.0).collect())
        .collect();

    let report = TensorReport {
        n,
        kappa: frame.kappa.clone(),
        partition,
        dim: d,
        fisher_sym,
        fisher_antisym,
        kks,
        bures,
        conventions: CONVENTIONS,
        base: rho.clone(),
        basis: basis.clone(),
    };
    validate_report(&report)?;
    Ok(report)
}

/// Structural invariants of a report: symmetric PSD Fisher part,
/// antisymmetric imaginary part and symplectic coefficients, Bures equal
/// to a quarter of the symmetric part.
fn validate_report(report: &TensorReport) -> Result<()> {
    let d = report.dim;
    let scale = report
        .fisher_sym
        .iter()
        .flatten()
        .chain(report.fisher_antisym.iter().flatten())
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    for a in 0..d {
        for b in 0..d {
            let sym_dev = (report.fisher_sym[a][b] - report.fisher_sym[b][a]).abs();
            let anti_dev = (report.fisher_antisym[a][b] + report.fisher_antisym[b][a]).abs();
            let kks_dev = (report.kks[a][b] + report.kks[b][a]).abs();
            let bures_dev = (4.0 * report.bures[a][b] - report.fisher_sym[a][b]).abs();
            for (what, dev) in [
                ("fisher symmetric-part symmetry", sym_dev),
                ("fisher antisymmetric-part antisymmetry", anti_dev),
                ("symplectic coefficient antisymmetry", kks_dev),
                ("bures = fisher_sym/4 identity", bures_dev),
            ] {
                if dev > tol::STRUCTURE_SKEW * scale {
                    return Err(Error::Numerical {
                        what: what.into(),
                        measured: dev,
                        bound: tol::STRUCTURE_SKEW * scale,
                    });
                }
            }
        }
    }
    if d > 0 {
        let sym = nalgebra::DMatrix::from_fn(d, d, |a, b| {
            0.5 * (report.fisher_sym[a][b] + report.fisher_sym[b][a])
        });
        let eigenvalues = sym.symmetric_eigen().eigenvalues;
        let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = eigenvalues.iter().cloned().fold(0.0f64, f64::max);
        if min < -tol::RECONSTRUCTION * max.max(1.0) {
            return Err(Error::Numerical {
                what: "fisher symmetric part positive semidefiniteness".into(),
                measured: min,
                bound: -tol::RECONSTRUCTION * max.max(1.0),
            });
        }
    }
    Ok(())
}

/// Verifies, over all basis pairs, that the imaginary part of the Fisher
/// tensor equals half the symplectic pairing of the twice-mapped
/// preimages: `Im F(e_a, e_b) = (1/2)(-i) Tr(rho [L(D(K_a)), L(D(K_b))])`.
/// Returns the largest absolute deviation (0 for empty bases).
pub fn pullback_identity_check(rho: &DensityMatrix, basis: &BasisSet) -> Result<f64> {
    let frame = Frame::for_state(rho, tol::CLUSTER)?;
    let mut rotated = Vec::with_capacity(basis.len());
    for e in &basis.elements {
        e.check_hermitian()?;
        let ed = frame.to_frame(e);
        frame.check_support(&ed)?;
        rotated.push(ed);
    }
    let slds: Vec<ComplexMatrix> = rotated.iter().map(|ed| frame.sld(ed)).collect();
    let mapped: Vec<ComplexMatrix> = rotated
        .iter()
        .map(|ed| frame.sld(&frame.gap(&frame.preimage(ed))))
        .collect();

    let mut worst = 0.0f64;
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            let lhs = frame.trace_rho(&(&slds[a] * &slds[b])).im;
            let rhs = 0.5 * frame.pairing(&mapped[a], &mapped[b])?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Per-pair coefficients of the closed-form Fisher tensor for a generic
/// three-level state in its eigenvalue chart.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairCoefficients {
    /// 1-based indices of the eigenvalue pair.
    pub i: usize,
    pub j: usize,
    /// Symmetric-part coefficient 4 (k_i - k_j)^2 / (k_i + k_j).
    pub sym: f64,
    /// Antisymmetric-part magnitude 4 |k_i - k_j|^3 / (k_i + k_j)^2.
    pub antisym: f64,
}

/// Closed-form Fisher coefficients for a three-level state with distinct
/// positive eigenvalues summing to one, for the pairs (1,2), (1,3), (2,3).
pub fn fisher_u3_closed_form(kappa: &[f64]) -> Result<Vec<PairCoefficients>> {
    if kappa.len() != 3 {
        return Err(Error::Domain(format!(
            "closed form is specific to three-level states, got {}",
            kappa.len()
        )));
    }
    let sum: f64 = kappa.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "eigenvalues must sum to 1, got {sum:.12}"
        )));
    }
    if kappa.iter().any(|&k| k <= 0.0) {
        return Err(Error::Domain("eigenvalues must be positive".into()));
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (kappa[i] - kappa[j]).abs() <= 1e-10 {
                return Err(Error::Domain(format!(
                    "eigenvalues {} and {} coincide; the generic-orbit chart degenerates",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut out = Vec::with_capacity(3);
    for i in 0..3 {
        for j in (i + 1)..3 {
            let dk = kappa[i] - kappa[j];
            let sk = kappa[i] + kappa[j];
            out.push(PairCoefficients {
                i: i + 1,
                j: j + 1,
                sym: 4.0 * dk * dk / sk,
                antisym: 4.0 * dk.abs().powi(3) / (sk * sk),
            });
        }
    }
    Ok(out)
}

/// A chart on an isospectral orbit: the exponential of a linear
/// combination of fixed anti-Hermitian generators applied to a diagonal
/// base state, with analytic partial derivatives.
pub struct UnitaryChart {
    base: DensityMatrix,
    generators: Vec<ComplexMatrix>,
}

impl UnitaryChart {
    /// Builds a chart from a diagonal base state and anti-Hermitian
    /// generators.
    pub fn new(base: DensityMatrix, generators: Vec<ComplexMatrix>) -> Result<Self> {
        for g in &generators {
            g.check_anti_hermitian()?;
            if g.n() != base.n() {
                return Err(Error::DimensionMismatch {
                    left: base.n(),
                    right: g.n(),
                });
            }
        }
        Ok(Self { base, generators })
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    fn combined(&self, x: &[f64]) -> Result<ComplexMatrix> {
        if x.len() != self.generators.len() {
            return Err(Error::DimensionMismatch {
                left: self.generators.len(),
                right: x.len(),
            });
        }
        let mut k = ComplexMatrix::zeros(self.base.n());
        for (xi, g) in x.iter().zip(&self.generators) {
            k = &k + &g.scale_re(*xi);
        }
        Ok(k)
    }

    /// The state at chart coordinates `x`.
    pub fn point(&self, x: &[f64]) -> Result<DensityMatrix> {
        let k = self.combined(x)?;
        let u = crate::matrix::unitary_exp(&k);
        DensityMatrix::new(&(&u * self.base.matrix()) * &u.adjoint())
    }

    /// The coordinate tangent vector `d rho / d x_a` at `x`, from the
    /// exact derivative of the matrix exponential.
    pub fn tangent(&self, x: &[f64], a: usize) -> Result<ComplexMatrix> {
        let k = self.combined(x)?;
        let (u, du) = unitary_exp_frechet(&k, &self.generators[a]);
        let rho0 = self.base.matrix();
        let left = &(&du * rho0) * &u.adjoint();
        let right = &(&u * rho0) * &du.adjoint();
        Ok((&left + &right).hermitian_part())
    }
}

/// Finite-difference exterior derivative of the antisymmetric Fisher
/// two-form over a chart: for every coordinate triple (a, b, c) the
/// component `d omega(a,b,c) = d_a omega_bc - d_b omega_ac + d_c omega_ab`
/// is estimated by central differences with step `h`, and the largest
/// magnitude is returned.
///
/// A chart with fewer than three coordinates admits no three-form
/// components, so the residual is exactly zero there.
pub fn closedness_residual(chart: &UnitaryChart, x0: &[f64], h: f64) -> Result<f64> {
    let d = chart.dim();
    if d < 3 {
        return Ok(0.0);
    }
    let omega = |x: &[f64], p: usize, q: usize| -> Result<f64> {
        let rho = chart.point(x)?;
        let tp = TangentVector::new(rho.clone(), chart.tangent(x, p)?)?;
        let tq = TangentVector::new(rho, chart.tangent(x, q)?)?;
        Ok(fisher_tensor(&tp, &tq)?.im)
    };
    let partial = |a: usize, p: usize, q: usize| -> Result<f64> {
        let mut plus = x0.to_vec();
        plus[a] += h;
        let mut minus = x0.to_vec();
        minus[a] -= h;
        Ok((omega(&plus, p, q)? - omega(&minus, p, q)?) / (2.0 * h))
    };
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in (a + 1)..d {
            for c in (b + 1)..d {
                let component = partial(a, b, c)? - partial(b, a, c)? + partial(c, a, b)?;
                worst = worst.max(component.abs());
            }
        }
    }
    Ok(worst)
}

/// Full line element of the distance metric along a state curve,
/// combining eigenvalue motion with eigenframe motion:
///
/// ```text
/// g = sum_i dkappa_i^2 / (4 kappa_i)
///   + sum_{i<j} (kappa_i - kappa_j)^2 / (kappa_i + kappa_j) |M_ij|^2
/// ```
///
/// where `M` holds the cross-cluster Maurer-Cartan coefficients of the
/// eigenframe. Kernel eigenvalues contribute no diagonal term; a nonzero
/// velocity on the kernel means the curve leaves the stratum and is
/// rejected.
pub fn bures_full(curve: &crate::oracles::CurveSpec, theta0: f64, h: f64) -> Result<f64> {
    let mc = crate::oracles::maurer_cartan_coefficients(curve, theta0, h)?;
    let n = mc.kappa.len();
    let ids = cluster_ids(&mc.partition);
    let mut total = 0.0;
    for i in 0..n {
        if mc.kappa[i] > tol::RANK_SV {
            total += 0.25 * mc.dkappa[i] * mc.dkappa[i] / mc.kappa[i];
        } else if mc.dkappa[i].abs() > tol::CURVE_CONSISTENCY {
            return Err(Error::Numerical {
                what: "eigenvalue velocity on the kernel".into(),
                measured: mc.dkappa[i].abs(),
                bound: tol::CURVE_CONSISTENCY,
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if ids[i] != ids[j] {
                let (ki, kj) = (mc.kappa[i], mc.kappa[j]);
                let lambda = (ki - kj) * (ki - kj) / (ki + kj);
                total += lambda * mc.offdiag.get(i, j).norm_sqr();
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::adjoint_action;
    use crate::basis::{gellmann_basis, BasisKind};
    use crate::sld::normal_basis;

    fn diag_state(kappa: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::diag_real(kappa)).unwrap()
    }

    fn qubit_pair() -> (DensityMatrix, TangentVector, TangentVector) {
        // v1 = [i sigma_x, rho] = 0.5 sigma_y, v2 = [i sigma_y, rho] = -0.5 sigma_x.
        let rho = diag_state(&[0.75, 0.25]);
        let b = gellmann_basis(2).unwrap();
        let v1 = TangentVector::new(rho.clone(), b.elements[2].scale_re(0.5)).unwrap();
        let v2 = TangentVector::new(rho.clone(), b.elements[1].scale_re(-0.5)).unwrap();
        (rho, v1, v2)
    }

    #[test]
    fn kks_hand_values_and_antisymmetry() {
        let (_, v1, v2) = qubit_pair();
        assert!(kks_form(&v1, &v1).unwrap().abs() <= 1e-14);
        let w = kks_form(&v1, &v2).unwrap();
        assert!((w - (-1.0)).abs() <= 1e-12, "got {w}");
        let back = kks_form(&v2, &v1).unwrap();
        assert!((w + back).abs() <= 1e-12);
    }

    #[test]
    fn kks_is_equivariant() {
        let (rho, v1, v2) = qubit_pair();
        let g = {
            let mut m = ComplexMatrix::zeros(2);
            m.set(0, 0, Complex64::new(0.0, 0.4));
            m.set(1, 1, Complex64::new(0.0, -0.1));
            m.set(0, 1, Complex64::new(0.3, 0.2));
            m.set(1, 0, Complex64::new(-0.3, 0.2));
            m
        };
        let u = crate::matrix::unitary_exp(&g);
        let moved_base = DensityMatrix::new(adjoint_action(&u, rho.matrix()).unwrap()).unwrap();
        let mv1 = TangentVector::new(
            moved_base.clone(),
            adjoint_action(&u, v1.value()).unwrap(),
        )
        .unwrap();
        let mv2 =
            TangentVector::new(moved_base, adjoint_action(&u, v2.value()).unwrap()).unwrap();
        let before = kks_form(&v1, &v2).unwrap();
        let after = kks_form(&mv1, &mv2).unwrap();
        assert!((before - after).abs() <= 1e-11);
    }

    #[test]
    fn fisher_hand_values() {
        let (rho, v1, v2) = qubit_pair();
        let f11 = fisher_tensor(&v1, &v1).unwrap();
        assert!((f11 - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        let f12 = fisher_tensor(&v1, &v2).unwrap();
        assert!((f12 - Complex64::new(0.0, 0.5)).norm() <= 1e-12);
        let f21 = fisher_tensor(&v2, &v1).unwrap();
        assert!((f21 - f12.conj()).norm() <= 1e-12);

        let zero = TangentVector::new(rho, ComplexMatrix::zeros(2)).unwrap();
        assert!(fisher_tensor(&zero, &v2).unwrap().norm() <= 1e-14);
    }

    #[test]
    fn base_mismatch_is_rejected() {
        let (_, v1, _) = qubit_pair();
        let other = diag_state(&[0.6, 0.4]);
        let w = TangentVector::new(other, gellmann_basis(2).unwrap().elements[1].clone()).unwrap();
        assert!(matches!(
            fisher_tensor(&v1, &w),
            Err(Error::BaseMismatch { .. })
        ));
        assert!(matches!(kks_form(&v1, &w), Err(Error::BaseMismatch { .. })));
    }

    #[test]
    fn split_report_on_the_qubit_orbit() {
        let (rho, v1, v2) = qubit_pair();
        let basis = BasisSet::new(
            2,
            vec![v1.value().clone(), v2.value().clone()],
            BasisKind::NormalComplement,
        )
        .unwrap();
        let report = fisher_split(&rho, &basis).unwrap();
        assert_eq!(report.dim, 2);
        assert!((report.fisher_sym[0][0] - 1.0).abs() <= 1e-12);
        assert!((report.fisher_sym[1][1] - 1.0).abs() <= 1e-12);
        assert!(report.fisher_sym[0][1].abs() <= 1e-12);
        assert!((report.fisher_antisym[0][1] - 0.5).abs() <= 1e-12);
        assert!((report.kks[0][1] - (-1.0)).abs() <= 1e-12);
        for a in 0..2 {
            for b in 0..2 {
                assert!((report.bures[a][b] - report.fisher_sym[a][b] / 4.0).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn split_requires_a_full_basis_and_accepts_empty_orbits() {
        let rho = diag_state(&[0.75, 0.25]);
        let short = BasisSet::new(
            2,
            vec![gellmann_basis(2).unwrap().elements[1].clone()],
            BasisKind::NormalComplement,
        )
        .unwrap();
        assert!(matches!(fisher_split(&rho, &short), Err(Error::Domain(_))));

        let mixed = diag_state(&[0.5, 0.5]);
        let empty = BasisSet::new(2, vec![], BasisKind::NormalComplement).unwrap();
        let report = fisher_split(&mixed, &empty).unwrap();
        assert_eq!(report.dim, 0);
        assert!(report.fisher_sym.is_empty());
    }

    #[test]
    fn pullback_identity_on_qubit_and_three_level_states() {
        let rho2 = diag_state(&[0.75, 0.25]);
        let basis2 = normal_basis(&rho2, &[1, 1]).unwrap();
        assert!(pullback_identity_check(&rho2, &basis2).unwrap() <= 1e-12);

        let rho3 = diag_state(&[0.5, 0.3, 0.2]);
        let basis3 = normal_basis(&rho3, &[1, 1, 1]).unwrap();
        assert!(pullback_identity_check(&rho3, &basis3).unwrap() <= 1e-10);

        // Collapsed orbit: no basis elements, vacuous pass.
        let degenerate = diag_state(&[0.5, 0.5]);
        let empty = BasisSet::new(2, vec![], BasisKind::NormalComplement).unwrap();
        assert_eq!(pullback_identity_check(&degenerate, &empty).unwrap(), 0.0);
    }

    #[test]
    fn anticommutator_metric_values_and_positivity() {
        let (_, v1, v2) = qubit_pair();
        let g11 = kks_compatible_metric(&v1, &v1).unwrap();
        assert!((g11 - 1.0).abs() <= 1e-12);
        let g12 = kks_compatible_metric(&v1, &v2).unwrap();
        let g21 = kks_compatible_metric(&v2, &v1).unwrap();
        assert!((g12 - g21).abs() <= 1e-12);

        // Positive definiteness over a full basis at a generic 3-level state.
        let rho = diag_state(&[0.5, 0.3, 0.2]);
        let basis = normal_basis(&rho, &[1, 1, 1]).unwrap();
        let tangents: Vec<TangentVector> = basis
            .elements
            .iter()
            .map(|e| TangentVector::new(rho.clone(), e.clone()).unwrap())
            .collect();
        let d = tangents.len();
        let gram = nalgebra::DMatrix::from_fn(d, d, |a, b| {
            kks_compatible_metric(&tangents[a], &tangents[b]).unwrap()
        });
        let min = gram
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.0, "minimum metric eigenvalue {min}");
    }

    #[test]
    fn bures_quarter_identity() {
        let (rho, v1, _) = qubit_pair();
        assert!((bures_tangent(&v1, &v1).unwrap() - 0.25).abs() <= 1e-12);
        let zero = TangentVector::new(rho.clone(), ComplexMatrix::zeros(2)).unwrap();
        assert_eq!(bures_tangent(&zero, &zero).unwrap(), 0.0);

        let rho3 = diag_state(&[0.5, 0.3, 0.2]);
        let basis = normal_basis(&rho3, &[1, 1, 1]).unwrap();
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                let va = TangentVector::new(rho3.clone(), basis.elements[a].clone()).unwrap();
                let vb = TangentVector::new(rho3.clone(), basis.elements[b].clone()).unwrap();
                let f = fisher_tensor(&va, &vb).unwrap().re;
                let g = bures_tangent(&va, &vb).unwrap();
                assert!((4.0 * g - f).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_three_level_coefficients() {
        let coeffs = fisher_u3_closed_form(&[0.5, 0.3, 0.2]).unwrap();
        let sym: Vec<f64> = coeffs.iter().map(|c| c.sym).collect();
        let antisym: Vec<f64> = coeffs.iter().map(|c| c.antisym).collect();
        let expected_sym = [0.2, 0.36 / 0.7, 0.08];
        let expected_antisym = [0.05, 0.108 / 0.49, 0.016];
        for k in 0..3 {
            assert!((sym[k] - expected_sym[k]).abs() <= 1e-10, "sym {k}");
            assert!(
                (antisym[k] - expected_antisym[k]).abs() <= 1e-10,
                "antisym {k}"
            );
        }

        assert!(fisher_u3_closed_form(&[0.4, 0.4, 0.2]).is_err());
        assert!(fisher_u3_closed_form(&[0.5, 0.3, 0.1]).is_err());

        // Near-degenerate pair: its coefficients vanish continuously.
        let eps = 1e-6;
        let near = fisher_u3_closed_form(&[0.4 + eps, 0.4 - eps, 0.2]).unwrap();
        assert!(near[0].sym < 1e-10);
        assert!(near[0].antisym < 1e-15);
    }

    #[test]
    fn pure_state_fisher_and_metric_are_proportional() {
        let rho = diag_state(&[1.0, 0.0, 0.0]);
        let basis = normal_basis(&rho, &[1, 2]).unwrap();
        let mut ratios = Vec::new();
        for e in &basis.elements {
            let v = TangentVector::new(rho.clone(), e.clone()).unwrap();
            let f = fisher_tensor(&v, &v).unwrap().re;
            let g = kks_compatible_metric(&v, &v).unwrap();
            ratios.push(f / g);
        }
        let first = ratios[0];
        for r in &ratios {
            assert!((r - first).abs() <= 1e-10 * first.abs().max(1.0));
        }
        println!("pure-state Fisher/metric scaling factor: {first}");
    }

    #[test]
    fn chart_tangents_match_finite_differences() {
        let rho = diag_state(&[0.75, 0.25]);
        let b = gellmann_basis(2).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let chart = UnitaryChart::new(
            rho,
            vec![b.elements[1].scale(i), b.elements[2].scale(i)],
        )
        .unwrap();
        let x = [0.2, -0.1];
        let h = 1e-6;
        for a in 0..2 {
            let analytic = chart.tangent(&x, a).unwrap();
            let mut plus = x.to_vec();
            plus[a] += h;
            let mut minus = x.to_vec();
            minus[a] -= h;
            let fd = (&chart.point(&plus).unwrap().matrix().clone()
                - &chart.point(&minus).unwrap().matrix().clone())
                .scale_re(1.0 / (2.0 * h));
            assert!(
                analytic.dist(&fd) <= 1e-9,
                "tangent {a} deviates {}",
                analytic.dist(&fd)
            );
        }
    }

    #[test]
    fn two_level_chart_has_vanishing_exterior_derivative() {
        let rho = diag_state(&[0.75, 0.25]);
        let b = gellmann_basis(2).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let chart = UnitaryChart::new(
            rho,
            vec![b.elements[1].scale(i), b.elements[2].scale(i)],
        )
        .unwrap();
        let residual = closedness_residual(&chart, &[0.15, 0.1], 1e-4).unwrap();
        assert_eq!(residual, 0.0);
    }

    #[test]
    fn split_is_equivariant_under_conjugation() {
        let rho = diag_state(&[0.5, 0.3, 0.2]);
        let basis = normal_basis(&rho, &[1, 1, 1]).unwrap();
        let report = fisher_split(&rho, &basis).unwrap();

        let g = {
            let mut m = ComplexMatrix::zeros(3);
            m.set(0, 1, Complex64::new(0.2, 0.1));
            m.set(1, 0, Complex64::new(-0.2, 0.1));
            m.set(1, 2, Complex64::new(-0.05, 0.3));
            m.set(2, 1, Complex64::new(0.05, 0.3));
            m.set(0, 0, Complex64::new(0.0, 0.15));
            m.set(2, 2, Complex64::new(0.0, -0.15));
            m
        };
        let u = crate::matrix::unitary_exp(&g);
        let moved = DensityMatrix::new(adjoint_action(&u, rho.matrix()).unwrap()).unwrap();
        let moved_elements: Vec<ComplexMatrix> = basis
            .elements
            .iter()
            .map(|e| adjoint_action(&u, e).unwrap())
            .collect();
        let moved_basis = BasisSet::new(3, moved_elements, BasisKind::NormalComplement).unwrap();
        let moved_report = fisher_split(&moved, &moved_basis).unwrap();

        for a in 0..report.dim {
            for b in 0..report.dim {
                assert!(
                    (report.fisher_sym[a][b] - moved_report.fisher_sym[a][b]).abs() <= 1e-10
                );
                assert!(
                    (report.fisher_antisym[a][b] - moved_report.fisher_antisym[a][b]).abs()
                        <= 1e-10
                );
                assert!((report.kks[a][b] - moved_report.kks[a][b]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn curve_metric_on_an_eigenvalue_path() {
        let curve = crate::oracles::CurveSpec::eigenvalue_path(
            vec![0.0, 1.0],
            vec![1.0, -1.0],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let g = bures_full(&curve, 0.75, 1e-4).unwrap();
        assert!((g - 4.0 / 3.0).abs() <= 1e-8);
    }

    #[test]
    fn curve_metric_on_a_rotation() {
        let mut k = ComplexMatrix::zeros(2);
        k.set(0, 1, Complex64::new(-0.5, 0.0));
        k.set(1, 0, Complex64::new(0.5, 0.0));
        let base = DensityMatrix::new(ComplexMatrix::diag_real(&[0.75, 0.25])).unwrap();
        let curve = crate::oracles::CurveSpec::unitary_rotation(k, base).unwrap();
        let g = bures_full(&curve, 0.0, 1e-4).unwrap();
        assert!((g - 0.0625).abs() <= 1e-8);
    }

    #[test]
    fn curve_metric_is_a_quarter_of_the_curve_index() {
        let mut k = ComplexMatrix::zeros(3);
        k.set(0, 1, Complex64::new(0.3, 0.1));
        k.set(1, 0, Complex64::new(-0.3, 0.1));
        k.set(1, 2, Complex64::new(-0.2, 0.25));
        k.set(2, 1, Complex64::new(0.2, 0.25));
        k.set(0, 2, Complex64::new(0.15, -0.1));
        k.set(2, 0, Complex64::new(-0.15, -0.1));
        let frame = crate::matrix::unitary_exp(&{
            let mut g = ComplexMatrix::zeros(3);
            g.set(0, 1, Complex64::new(0.4, 0.7));
            g.set(1, 0, Complex64::new(-0.4, 0.7));
            g.set(0, 2, Complex64::new(-0.3, 0.2));
            g.set(2, 0, Complex64::new(0.3, 0.2));
            g
        });
        let curve = crate::oracles::CurveSpec::composite(
            k,
            vec![0.5, 0.3, 0.2],
            vec![0.02, -0.05, 0.03],
            frame,
        )
        .unwrap();
        let g = bures_full(&curve, 0.3, 1e-4).unwrap();
        let f = crate::oracles::fisher_index_along_curve(&curve, 0.3, 1e-4).unwrap();
        assert!((4.0 * g - f).abs() <= 1e-8 * f.abs().max(1.0));
    }
}
