//! Dense complex matrices, row-major, sized for desk-scale problems (n <= ~64).
//!
//! Elements of u(n) are carried as anti-Hermitian matrices and elements of its
//! dual as Hermitian matrices; the hermiticity checks here are how a caller's
//! claim about the carrier is verified.

use crate::error::{Error, Result};
use crate::tol;
use num_complex::Complex;

pub type Complex64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Elementary matrix E_ij with a single 1 at row i, column j.
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.set(i, j, Complex64::new(1.0, 0.0));
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|w| w * z).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// (1/2)(M + M^H), used to symmetrize finite-difference output.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i).conj())
        })
    }

    pub fn dist(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Real part of Tr(A^H B) — the real inner product both trace-orthogonality
    /// and the vertical/horizontal splits are taken with respect to.
    pub fn inner_re(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Full complex Tr(A^H B).
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    pub fn anti_hermitian_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += (self.get(i, j) + self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    fn hermiticity_bound(&self) -> f64 {
        f64::max(
            tol::HERMITICITY_REL * self.frobenius_norm(),
            tol::HERMITICITY_ABS_FLOOR,
        )
    }

    /// Verify a caller's claim that this matrix is Hermitian.
    pub fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        let bound = self.hermiticity_bound();
        if deviation > bound {
            return Err(Error::NotHermitian { deviation, bound });
        }
        Ok(())
    }

    /// Verify a caller's claim that this matrix is anti-Hermitian.
    pub fn check_anti_hermitian(&self) -> Result<()> {
        let deviation = self.anti_hermitian_deviation();
        let bound = self.hermiticity_bound();
        if deviation > bound {
            return Err(Error::NotAntiHermitian { deviation, bound });
        }
        Ok(())
    }

    pub fn unitary_deviation(&self) -> f64 {
        let gram = &self.adjoint() * self;
        gram.dist(&Self::identity(self.n))
    }

    pub fn check_unitary(&self, bound: f64) -> Result<()> {
        let deviation = self.unitary_deviation();
        if deviation > bound {
            return Err(Error::NotUnitary { deviation, bound });
        }
        Ok(())
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub(crate) fn to_na(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub(crate) fn from_na(m: &nalgebra::DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

/// exp(K) together with the derivative of t -> exp(K + t dK) at t = 0,
/// computed via the eigensystem of the Hermitian matrix -iK and the
/// divided-difference (Daleckii-Krein) formula. Near-coincident
/// eigenvalues fall back to the midpoint limit of the divided difference
/// to avoid cancellation.
pub fn unitary_exp_frechet(k: &ComplexMatrix, dk: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let minus_i = Complex64::new(0.0, -1.0);
    let h = k.scale(minus_i).hermitian_part();
    let e = dk.scale(minus_i);
    let eig = h.to_na().symmetric_eigen();
    let v = &eig.eigenvectors;
    let lam = &eig.eigenvalues;
    let n = k.n;
    let u_diag = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, lam[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let u = v * u_diag * v.adjoint();
    let e_frame = v.adjoint() * e.to_na() * v;
    let phi = nalgebra::DMatrix::from_fn(n, n, |a, b| {
        let (la, lb) = (lam[a], lam[b]);
        if (la - lb).abs() < 1e-7 {
            Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, 0.5 * (la + lb))
        } else {
            (Complex64::from_polar(1.0, la) - Complex64::from_polar(1.0, lb))
                .scale(1.0 / (la - lb))
        }
    });
    let du_frame = phi.component_mul(&e_frame);
    let du = v * du_frame * v.adjoint();
    (ComplexMatrix::from_na(&u), ComplexMatrix::from_na(&du))
}

/// exp(K) for anti-Hermitian K, through the eigensystem of the Hermitian
/// matrix -iK; the result is unitary up to eigensolver accuracy.
pub fn unitary_exp(k: &ComplexMatrix) -> ComplexMatrix {
    let h = k.scale(Complex64::new(0.0, -1.0)).hermitian_part();
    let eig = h.to_na().symmetric_eigen();
    let phases = nalgebra::DMatrix::from_fn(k.n, k.n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, eig.eigenvalues[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    ComplexMatrix::from_na(&m)
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.n, rhs.n);
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.n, rhs.n);
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}
