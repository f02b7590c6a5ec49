//! Lie-algebra primitives on u(n): commutators, the adjoint action, the
//! duality pairing, and the Killing form.

use crate::basis::gellmann_basis;
use crate::error::{Error, Result};
use crate::matrix::{Complex64, ComplexMatrix};
use crate::tol;

/// [A, B] = AB - BA.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// {A, B} = AB + BA.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) + &(b * a))
}

/// Ad_U(A) = U A U^H for unitary U. Preserves the hermiticity type and the
/// spectrum of A.
pub fn adjoint_action(u: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.check_same_dim(a)?;
    u.check_unitary(tol::UNITARITY)?;
    Ok(&(u * a) * &u.adjoint())
}

/// The duality pairing <g, m> = i Tr(g m) between Hermitian g (a dual-space
/// element) and anti-Hermitian m (a Lie-algebra element). The product trace is
/// purely imaginary for such a pair, so the result is real; the imaginary
/// residue is asserted small and dropped.
pub fn trace_pairing(g: &ComplexMatrix, m: &ComplexMatrix) -> Result<f64> {
    g.check_same_dim(m)?;
    g.check_hermitian()?;
    m.check_anti_hermitian()?;
    let t = (&(g * m)).trace();
    let value = Complex64::new(0.0, 1.0) * t;
    let bound = tol::PAIRING_IMAG * f64::max(1.0, t.norm());
    if value.im.abs() > bound {
        return Err(Error::Numerical {
            what: "trace pairing reality".into(),
            measured: value.im.abs(),
            bound,
        });
    }
    Ok(value.re)
}

/// Killing form K(X, Y) = Tr(ad_X o ad_Y) on u(n), computed by materializing
/// the composed adjoint operators in an orthogonal basis of the n^2-dimensional
/// real algebra. This brute-force operator trace is the definition; the closed
/// form 2n Tr(XY) - 2 Tr(X) Tr(Y) is kept to tests as the cross-check.
pub fn killing_form(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    x.check_same_dim(y)?;
    let basis = gellmann_basis(x.n())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for b in &basis.elements {
        // <B, [X, [Y, B]]> / <B, B> with the trace inner product; the
        // Gell-Mann elements are orthogonal, so the diagonal sum is the trace.
        let image = commutator(x, &commutator(y, b)?)?;
        acc += b.inner(&image) / b.inner(b);
    }
    let bound = tol::KILLING_IMAG * f64::max(1.0, acc.norm());
    if acc.im.abs() > bound {
        return Err(Error::Numerical {
            what: "Killing form reality".into(),
            measured: acc.im.abs(),
            bound,
        });
    }
    Ok(acc.re)
}

/// Closed form 2n Tr(XY) - 2 Tr(X) Tr(Y) of the u(n) Killing form; used by
/// tests to cross-check `killing_form`.
pub fn killing_form_closed(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    x.check_same_dim(y)?;
    let n = x.n() as f64;
    let txy = (&(x * y)).trace();
    let value = txy.scale(2.0 * n) - 2.0 * x.trace() * y.trace();
    Ok(value.re)
}
