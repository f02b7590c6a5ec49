//! End-to-end verification suite. Each criterion exercises one headline
//! contract of the library against independent references and reports the
//! measured deviation next to its bound. The suite is deterministic for a
//! fixed seed, and the bounds scale with the requested tolerance so that
//! unreasonably small tolerances fail deterministically.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{adjoint_action, anticommutator};
use crate::basis::{antisym_pair, sym_pair, BasisKind, BasisSet};
use crate::fibration::{compositions, is_refinement, nesting_report};
use crate::matrix::{Complex64, ComplexMatrix};
use crate::oracles::{
    self, fisher_index_along_curve, qubit_qfi_reference, random_anti_hermitian, random_density,
    random_unitary, CurveSpec,
};
use crate::orbit::{canonical_representative, classify, spectral_decompose, DensityMatrix};
use crate::sld::{d_map, normal_basis_at, sld, TangentVector};
use crate::tensors::{
    bures_full, bures_tangent, closedness_residual, fisher_split, fisher_tensor,
    fisher_u3_closed_form, kks_form, pullback_identity_check, UnitaryChart,
};
use crate::tol;
use crate::{Error, Result};

/// Number of criteria in the suite.
pub const CRITERIA: usize = 9;

/// Default seed for the random draws of the suite.
pub const DEFAULT_SEED: u64 = 7;

/// One measured quantity compared against a bound.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub label: &'static str,
    pub measured: f64,
    pub bound: f64,
    /// When set, the check passes if `measured >= bound` (used for rank
    /// ratios that must stay away from zero).
    pub at_least: bool,
}

impl CheckItem {
    fn at_most(label: &'static str, measured: f64, base_bound: f64, scale: f64) -> Self {
        Self {
            label,
            measured,
            bound: base_bound * scale,
            at_least: false,
        }
    }

    fn at_least(label: &'static str, measured: f64, base_bound: f64, scale: f64) -> Self {
        Self {
            label,
            measured,
            bound: base_bound / scale,
            at_least: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.at_least {
            self.measured >= self.bound
        } else {
            self.measured <= self.bound
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<CheckItem>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl CriterionResult {
    fn new(id: usize, name: &'static str, checks: Vec<CheckItem>) -> Self {
        let passed = checks.iter().all(CheckItem::passed);
        Self {
            id,
            name,
            checks,
            notes: Vec::new(),
            passed,
        }
    }
}

/// One line of the summary: criterion id, PASS/FAIL, and every measured
/// value next to its bound.
pub fn format_result(result: &CriterionResult) -> String {
    let status = if result.passed { "PASS" } else { "FAIL" };
    let body = result
        .checks
        .iter()
        .map(|c| {
            let op = if c.at_least { ">=" } else { "<=" };
            format!("{} {:.3e} {} {:.3e}", c.label, c.measured, op, c.bound)
        })
        .collect::<Vec<_>>()
        .join("; ");
    let notes = if result.notes.is_empty() {
        String::new()
    } else {
        format!(" [{}]", result.notes.join("; "))
    };
    format!(
        "criterion {} [{}] {}: {}{}",
        result.id, status, result.name, body, notes
    )
}

fn scale_from(tol_value: f64) -> Result<f64> {
    if !(tol_value.is_finite() && tol_value > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive and finite, got {tol_value}"
        )));
    }
    Ok(tol_value / tol::DEFAULT_TOL)
}

/// Runs a single criterion (1-based id) with bounds scaled by
/// `tol_value / 1e-10`.
pub fn run_criterion(id: usize, seed: u64, tol_value: f64) -> Result<CriterionResult> {
    let scale = scale_from(tol_value)?;
    match id {
        1 => criterion_sld(seed, scale),
        2 => criterion_pullback(seed, scale),
        3 => criterion_symplectic(seed, scale),
        4 => criterion_three_level(seed, scale),
        5 => criterion_bures(seed, scale),
        6 => criterion_structure_maps(seed, scale),
        7 => criterion_dimensions(seed, scale),
        8 => criterion_equivariance(seed, scale),
        9 => criterion_degeneration(seed, scale),
        _ => Err(Error::Domain(format!(
            "criterion id must be in 1..={CRITERIA}, got {id}"
        ))),
    }
}

/// Runs the whole suite in order.
pub fn run_all(seed: u64, tol_value: f64) -> Result<Vec<CriterionResult>> {
    (1..=CRITERIA)
        .map(|id| run_criterion(id, seed, tol_value))
        .collect()
}

fn mix(seed: u64, stream: u64, index: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index)
}

fn full_flag(n: usize) -> Vec<usize> {
    vec![1; n]
}

/// Normal-complement basis of `rho` obtained by rotating the canonical
/// basis at the diagonal representative into the eigenframe of `rho`.
fn moved_normal_basis(rho: &DensityMatrix) -> Result<BasisSet> {
    normal_basis_at(rho)
}

fn random_tangent(rho: &DensityMatrix, seed: u64) -> Result<TangentVector> {
    let k = random_anti_hermitian(rho.n(), seed);
    TangentVector::from_generator(rho.clone(), &k)
}

fn criterion_sld(seed: u64, scale: f64) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut worst_residual = 0.0f64;
    let mut worst_match = 0.0f64;
    for n in 2..=8usize {
        for rep in 0..200u64 {
            let index = n as u64 * 1000 + rep;
            let rho = random_density(n, &full_flag(n), mix(seed, 11, index))?;
            let v = random_tangent(&rho, mix(seed, 12, index))?;
            let l = sld(&v)?;
            let half = anticommutator(l.value(), rho.matrix())?.scale_re(0.5);
            let residual =
                half.dist(v.value()) / v.value().frobenius_norm().max(f64::MIN_POSITIVE);
            worst_residual = worst_residual.max(residual);

            let x = oracles::sld_linear_solve(&rho, v.value())?;
            let projected = oracles::project_to_normal_complement(&rho, &x)?;
            let deviation =
                projected.dist(l.value()) / l.value().frobenius_norm().max(1.0);
            worst_match = worst_match.max(deviation);
        }
    }
    let mut result = CriterionResult::new(
        1,
        "sld-contract",
        vec![
            CheckItem::at_most(
                "defining-residual",
                worst_residual,
                tol::SLD_RESIDUAL_REL,
                scale,
            ),
            CheckItem::at_most("oracle-match", worst_match, tol::ORACLE_MATCH, scale),
        ],
    );
    if start.elapsed().as_secs_f64() >= 10.0 {
        result.passed = false;
        result.notes.push("runtime limit of 10 s exceeded".into());
    }
    Ok(result)
}

fn criterion_pullback(seed: u64, scale: f64) -> Result<CriterionResult> {
    let mut worst = 0.0f64;
    for n in 2..=4usize {
        for rep in 0..50u64 {
            let rho = random_density(n, &full_flag(n), mix(seed, 21, n as u64 * 100 + rep))?;
            let basis = moved_normal_basis(&rho)?;
            worst = worst.max(pullback_identity_check(&rho, &basis)?);
        }
    }

    let rho = DensityMatrix::new(ComplexMatrix::diag_real(&[0.75, 0.25]))?;
    let i = Complex64::new(0.0, 1.0);
    let v1 = TangentVector::from_generator(rho.clone(), &sym_pair(2, 0, 1).scale(i))?;
    let v2 = TangentVector::from_generator(rho, &antisym_pair(2, 0, 1).scale(i))?;
    let hand = fisher_tensor(&v1, &v2)?.im;

    Ok(CriterionResult::new(
        2,
        "pullback-identity",
        vec![
            CheckItem::at_most("identity-residual", worst, tol::DEFAULT_TOL, scale),
            CheckItem::at_most(
                "two-level-hand-value",
                (hand - 0.5).abs(),
                tol::PAIRING_IMAG,
                scale,
            ),
        ],
    ))
}

fn criterion_symplectic(seed: u64, scale: f64) -> Result<CriterionResult> {
    let mut worst_ratio = f64::INFINITY;
    for n in 2..=5usize {
        let rho = random_density(n, &full_flag(n), mix(seed, 31, n as u64))?;
        let basis = moved_normal_basis(&rho)?;
        let report = fisher_split(&rho, &basis)?;
        let dim = report.dim;
        let antisym = DMatrix::<f64>::from_fn(dim, dim, |r, c| report.fisher_antisym[r][c]);
        let svd = antisym.svd(false, false);
        let sigma_max = svd.singular_values.max();
        let sigma_min = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        worst_ratio = worst_ratio.min(sigma_min / sigma_max);
    }

    let base = DensityMatrix::new(ComplexMatrix::diag_real(&[0.75, 0.25]))?;
    let i = Complex64::new(0.0, 1.0);
    let chart = UnitaryChart::new(
        base,
        vec![sym_pair(2, 0, 1).scale(i), antisym_pair(2, 0, 1).scale(i)],
    )?;
    let residual = closedness_residual(&chart, &[0.12, -0.07], tol::FD_STEP_CLOSEDNESS)?;

    Ok(CriterionResult::new(
        3,
        "symplectic-rank-and-closedness",
        vec![
            CheckItem::at_least(
                "antisym-rank-ratio",
                worst_ratio,
                tol::ANTISYM_RANK_RATIO,
                scale,
            ),
            CheckItem::at_most(
                "closedness-residual",
                residual,
                tol::CLOSEDNESS_BOUND,
                scale,
            ),
        ],
    ))
}

/// Chart-frame tangents for an eigenvalue pair of a diagonal three-level
/// state: the real and imaginary coordinate directions carry a factor of
/// the eigenvalue gap.
fn chart_pair_tangents(
    rho: &DensityMatrix,
    kappa: &[f64],
    i: usize,
    j: usize,
) -> Result<(TangentVector, TangentVector)> {
    let gap = kappa[i] - kappa[j];
    let re = TangentVector::new(rho.clone(), antisym_pair(3, i, j).scale_re(gap))?;
    let im = TangentVector::new(rho.clone(), sym_pair(3, i, j).scale_re(gap))?;
    Ok((re, im))
}

fn chart_closed_form_deviation(kappa: &[f64]) -> Result<f64> {
    let coeffs = fisher_u3_closed_form(kappa)?;
    let rho = DensityMatrix::new(ComplexMatrix::diag_real(kappa))?;
    let mut worst = 0.0f64;
    for c in &coeffs {
        let (re, im) = chart_pair_tangents(&rho, kappa, c.i - 1, c.j - 1)?;
        let sym_re = fisher_tensor(&re, &re)?.re;
        let sym_im = fisher_tensor(&im, &im)?.re;
        let antisym = fisher_tensor(&re, &im)?.im;
        worst = worst
            .max(((sym_re - c.sym) / c.sym).abs())
            .max(((sym_im - c.sym) / c.sym).abs())
            .max(((antisym.abs() - c.antisym) / c.antisym).abs());
    }
    Ok(worst)
}

fn criterion_three_level(seed: u64, scale: f64) -> Result<CriterionResult> {
    let mut worst = 0.0f64;
    for rep in 0..25u64 {
        let rho = random_density(3, &full_flag(3), mix(seed, 41, rep))?;
        let kappa = spectral_decompose(&rho)?.kappa;
        worst = worst.max(chart_closed_form_deviation(&kappa)?);
    }

    let pinned_kappa = [0.5, 0.3, 0.2];
    worst = worst.max(chart_closed_form_deviation(&pinned_kappa)?);
    let coeffs = fisher_u3_closed_form(&pinned_kappa)?;
    let expected_sym = [0.2, 0.36 / 0.7, 0.08];
    let expected_antisym = [0.05, 0.108 / 0.49, 0.016];
    let mut pinned_dev = 0.0f64;
    for (c, (es, ea)) in coeffs
        .iter()
        .zip(expected_sym.iter().zip(expected_antisym.iter()))
    {
        pinned_dev = pinned_dev
            .max((c.sym - es).abs())
            .max((c.antisym - ea).abs());
    }

    Ok(CriterionResult::new(
        4,
        "three-level-closed-form",
        vec![
            CheckItem::at_most("chart-vs-closed-form", worst, 1e-9, scale),
            CheckItem::at_most("pinned-values", pinned_dev, 1e-9, scale),
        ],
    ))
}

fn criterion_bures(seed: u64, scale: f64) -> Result<CriterionResult> {
    let mut worst_pair = 0.0f64;
    for n in 2..=4usize {
        for rep in 0..10u64 {
            let index = n as u64 * 100 + rep;
            let rho = random_density(n, &full_flag(n), mix(seed, 51, index))?;
            let v = random_tangent(&rho, mix(seed, 52, index))?;
            let w = random_tangent(&rho, mix(seed, 53, index))?;
            let quarter = 4.0 * bures_tangent(&v, &w)?;
            let sym = fisher_tensor(&v, &w)?.re;
            worst_pair = worst_pair.max((quarter - sym).abs() / sym.abs().max(1.0));
        }
    }

    let h = tol::FD_STEP_CLOSEDNESS;
    let bernoulli =
        CurveSpec::eigenvalue_path(vec![0.0, 1.0], vec![1.0, -1.0], ComplexMatrix::identity(2))?;
    let rotation = {
        let mut k = ComplexMatrix::zeros(2);
        k.set(0, 1, Complex64::new(-0.5, 0.0));
        k.set(1, 0, Complex64::new(0.5, 0.0));
        CurveSpec::unitary_rotation(
            k,
            DensityMatrix::new(ComplexMatrix::diag_real(&[0.75, 0.25]))?,
        )?
    };
    let composite = {
        let mut k = ComplexMatrix::zeros(3);
        k.set(0, 1, Complex64::new(0.3, 0.1));
        k.set(1, 0, Complex64::new(-0.3, 0.1));
        k.set(1, 2, Complex64::new(-0.2, 0.25));
        k.set(2, 1, Complex64::new(0.2, 0.25));
        let frame = random_unitary(3, mix(seed, 54, 0));
        CurveSpec::composite(k, vec![0.5, 0.3, 0.2], vec![0.02, -0.05, 0.03], frame)?
    };

    let mut worst_curve = 0.0f64;
    for (curve, theta0) in [(&bernoulli, 0.75), (&rotation, 0.0), (&composite, 0.3)] {
        let index = fisher_index_along_curve(curve, theta0, h)?;
        let metric = bures_full(curve, theta0, h)?;
        worst_curve = worst_curve.max((4.0 * metric - index).abs() / index.abs().max(1.0));
    }

    let bern_index = fisher_index_along_curve(&bernoulli, 0.75, h)?;
    let rot_index = fisher_index_along_curve(&rotation, 0.0, h)?;
    let rot_reference = qubit_qfi_reference([0.0, 0.0, 0.5], [0.5, 0.0, 0.0])?;
    let pinned = (bern_index - 16.0 / 3.0)
        .abs()
        .max((rot_index - 0.25).abs())
        .max((rot_index - rot_reference).abs());

    Ok(CriterionResult::new(
        5,
        "bures-identities",
        vec![
            CheckItem::at_most(
                "tangent-quarter-identity",
                worst_pair,
                tol::STRUCTURE_SKEW,
                scale,
            ),
            CheckItem::at_most(
                "curve-quarter-identity",
                worst_curve,
                tol::CURVE_CONSISTENCY,
                scale,
            ),
            CheckItem::at_most("pinned-curve-values", pinned, tol::CURVE_CONSISTENCY, scale),
        ],
    ))
}

fn criterion_structure_maps(seed: u64, scale: f64) -> Result<CriterionResult> {
    let mut worst_skew = 0.0f64;
    let mut worst_sym = 0.0f64;
    for n in 2..=5usize {
        for rep in 0..250u64 {
            let index = n as u64 * 1000 + rep;
            let rho = random_density(n, &full_flag(n), mix(seed, 61, index))?;
            let rho0 = canonical_representative(&rho)?;
            let a = random_tangent(&rho0, mix(seed, 62, index))?;
            let b = random_tangent(&rho0, mix(seed, 63, index))?;
            let norm_scale = (a.value().frobenius_norm() * b.value().frobenius_norm()).max(1.0);

            let da = d_map(&rho0, a.value())?;
            let db = d_map(&rho0, b.value())?;
            let skew = (a.value().inner(&db).re + da.inner(b.value()).re).abs() / norm_scale;
            worst_skew = worst_skew.max(skew);

            let la = sld(&a)?;
            let lb = sld(&b)?;
            let sym = (a.value().inner(lb.value()).re - la.value().inner(b.value()).re).abs()
                / norm_scale;
            worst_sym = worst_sym.max(sym);
        }
    }
    Ok(CriterionResult::new(
        6,
        "structure-maps",
        vec![
            CheckItem::at_most("gap-map-skewness", worst_skew, tol::STRUCTURE_SKEW, scale),
            CheckItem::at_most("sld-symmetry", worst_sym, tol::STRUCTURE_SKEW, scale),
        ],
    ))
}

/// Real n^2 x n^2 matrix of `K -> [rho, K]` over orthonormal bases; the
/// columns run over anti-Hermitian generators, the rows over the
/// Hermitian images. The rank counts singular values above the threshold.
fn adjoint_rank(rho: &DensityMatrix, threshold: f64) -> Result<usize> {
    let n = rho.n();
    let i = Complex64::new(0.0, 1.0);
    let probes = oracles::hermitian_basis(n);
    let dim = probes.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (c, h) in probes.iter().enumerate() {
        let image = crate::algebra::commutator(rho.matrix(), &h.scale(i))?;
        for (r, probe) in probes.iter().enumerate() {
            m[(r, c)] = probe.inner(&image).re;
        }
    }
    let svd = m.svd(false, false);
    Ok(svd.singular_values.iter().filter(|&&s| s > threshold).count())
}

fn criterion_dimensions(seed: u64, scale: f64) -> Result<CriterionResult> {
    let threshold = tol::RANK_SV * scale;
    let mut rank_mismatches = 0usize;
    for n in 2..=6usize {
        // Alternate between generic, degenerate, and rank-deficient types.
        let kinds: Vec<Vec<usize>> = {
            let mut v = vec![full_flag(n)];
            if n >= 3 {
                let mut degenerate = vec![2];
                degenerate.extend(vec![1; n - 2]);
                v.push(degenerate);
                v.push(vec![1; n - 1]);
            }
            v
        };
        for rep in 0..20u64 {
            let partition = &kinds[rep as usize % kinds.len()];
            let rho = random_density(n, partition, mix(seed, 71, n as u64 * 100 + rep))?;
            let descriptor = classify(&rho, tol::DEFAULT_TOL)?;
            if adjoint_rank(&rho, threshold)? != descriptor.orbit_dim {
                rank_mismatches += 1;
            }
        }
    }

    let mut nesting_violations = 0usize;
    let mut pinned_row_seen = false;
    for n in 2..=6usize {
        let comps = compositions(n);
        let mut pairs = Vec::new();
        for fine in &comps {
            for coarse in &comps {
                if is_refinement(fine, coarse) {
                    pairs.push((fine.clone(), coarse.clone()));
                }
            }
        }
        let rows = nesting_report(n, &pairs)?;
        nesting_violations += rows.iter().filter(|r| !r.identity_holds).count();
        if n == 3 {
            pinned_row_seen = rows.iter().any(|r| {
                r.fine == vec![1, 1, 1]
                    && r.coarse == vec![1, 2]
                    && (r.total_dim, r.base_dim, r.fibre_dim) == (6, 4, 2)
            });
        }
    }
    if !pinned_row_seen {
        nesting_violations += 1;
    }

    Ok(CriterionResult::new(
        7,
        "orbit-and-nesting-dims",
        vec![
            CheckItem::at_most("ad-rank-mismatches", rank_mismatches as f64, 0.5, 1.0),
            CheckItem::at_most("nesting-violations", nesting_violations as f64, 0.5, 1.0),
        ],
    ))
}

fn criterion_equivariance(seed: u64, scale: f64) -> Result<CriterionResult> {
    let mut descriptor_mismatches = 0usize;
    let mut worst = 0.0f64;
    for rep in 0..100u64 {
        let partition: &[usize] = if rep % 2 == 0 { &[1, 1, 1] } else { &[2, 1] };
        let rho = random_density(3, partition, mix(seed, 81, rep))?;
        let u = random_unitary(3, mix(seed, 82, rep));
        let moved = DensityMatrix::new(adjoint_action(&u, rho.matrix())?)?;

        if classify(&rho, tol::DEFAULT_TOL)? != classify(&moved, tol::DEFAULT_TOL)? {
            descriptor_mismatches += 1;
        }

        let k1 = random_anti_hermitian(3, mix(seed, 83, rep));
        let k2 = random_anti_hermitian(3, mix(seed, 84, rep));
        let v = TangentVector::from_generator(rho.clone(), &k1)?;
        let w = TangentVector::from_generator(rho.clone(), &k2)?;
        let vm = TangentVector::from_generator(moved.clone(), &adjoint_action(&u, &k1)?)?;
        let wm = TangentVector::from_generator(moved.clone(), &adjoint_action(&u, &k2)?)?;

        let l_moved = sld(&vm)?;
        let sld_dev = adjoint_action(&u, sld(&v)?.value())?.dist(l_moved.value())
            / l_moved.value().frobenius_norm().max(1.0);
        worst = worst.max(sld_dev);

        let omega = kks_form(&v, &w)?;
        let omega_moved = kks_form(&vm, &wm)?;
        worst = worst.max((omega - omega_moved).abs() / omega.abs().max(1.0));

        let basis = moved_normal_basis(&rho)?;
        let rotated = basis
            .elements
            .iter()
            .map(|e| adjoint_action(&u, e))
            .collect::<Result<Vec<_>>>()?;
        let basis_moved = BasisSet::new(3, rotated, BasisKind::NormalComplement)?;
        let report = fisher_split(&rho, &basis)?;
        let report_moved = fisher_split(&moved, &basis_moved)?;
        for a in 0..report.dim {
            for b in 0..report.dim {
                worst = worst
                    .max((report.fisher_sym[a][b] - report_moved.fisher_sym[a][b]).abs())
                    .max(
                        (report.fisher_antisym[a][b] - report_moved.fisher_antisym[a][b])
                            .abs(),
                    )
                    .max((report.kks[a][b] - report_moved.kks[a][b]).abs());
            }
        }
    }

    Ok(CriterionResult::new(
        8,
        "equivariance",
        vec![
            CheckItem::at_most(
                "descriptor-mismatches",
                descriptor_mismatches as f64,
                0.5,
                1.0,
            ),
            CheckItem::at_most("worst-deviation", worst, tol::EQUIVARIANCE, scale),
        ],
    ))
}

fn criterion_degeneration(_seed: u64, scale: f64) -> Result<CriterionResult> {
    let epsilons = [1e-2, 10f64.powf(-2.5), 1e-3];
    let mut sym_values = Vec::with_capacity(3);
    let mut antisym_values = Vec::with_capacity(3);
    for &eps in &epsilons {
        let kappa = [0.4 + eps, 0.4 - eps, 0.2];
        let rho = DensityMatrix::new(ComplexMatrix::diag_real(&kappa))?;
        let (re, im) = chart_pair_tangents(&rho, &kappa, 0, 1)?;
        sym_values.push(fisher_tensor(&im, &im)?.re);
        antisym_values.push(fisher_tensor(&re, &im)?.im.abs());
    }
    let log_span = epsilons[2].ln() - epsilons[0].ln();
    let sym_slope = (sym_values[2].ln() - sym_values[0].ln()) / log_span;
    let antisym_slope = (antisym_values[2].ln() - antisym_values[0].ln()) / log_span;

    Ok(CriterionResult::new(
        9,
        "degeneration-exponents",
        vec![
            CheckItem::at_most(
                "sym-exponent-error",
                (sym_slope - 2.0).abs(),
                tol::DEGENERATION_EXPONENT,
                scale,
            ),
            CheckItem::at_most(
                "antisym-exponent-error",
                (antisym_slope - 3.0).abs(),
                tol::DEGENERATION_EXPONENT,
                scale,
            ),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_items_compare_in_both_directions() {
        assert!(CheckItem::at_most("x", 1e-13, 1e-12, 1.0).passed());
        assert!(!CheckItem::at_most("x", 1e-11, 1e-12, 1.0).passed());
        assert!(CheckItem::at_least("x", 1e-3, 1e-8, 1.0).passed());
        assert!(!CheckItem::at_least("x", 1e-9, 1e-8, 1.0).passed());
        // Tolerance scaling tightens both kinds.
        assert!(!CheckItem::at_most("x", 1e-13, 1e-12, 1e-10).passed());
        assert!(!CheckItem::at_least("x", 1e-3, 1e-8, 1e-10).passed());
    }

    #[test]
    fn summary_lines_are_deterministic() {
        let a = run_criterion(9, DEFAULT_SEED, tol::DEFAULT_TOL).unwrap();
        let b = run_criterion(9, DEFAULT_SEED, tol::DEFAULT_TOL).unwrap();
        assert_eq!(format_result(&a), format_result(&b));
        assert!(a.passed);
    }

    #[test]
    fn tiny_tolerance_forces_failures() {
        let result = run_criterion(4, DEFAULT_SEED, 1e-20).unwrap();
        assert!(!result.passed);
        let line = format_result(&result);
        assert!(line.contains("FAIL"));
    }

    #[test]
    fn unknown_criterion_is_rejected() {
        assert!(run_criterion(0, 1, tol::DEFAULT_TOL).is_err());
        assert!(run_criterion(10, 1, tol::DEFAULT_TOL).is_err());
        assert!(run_criterion(1, 1, -1.0).is_err());
    }
}
