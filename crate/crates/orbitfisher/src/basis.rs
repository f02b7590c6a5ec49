//! Generalized Gell-Mann bases and the u(n) root system.

use crate::error::{Error, Result};
use crate::matrix::{Complex64, ComplexMatrix};
use crate::tol;

/// Symmetric off-diagonal generator E_kj + E_jk (Hermitian).
pub fn sym_pair(n: usize, k: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    m.set(k, j, Complex64::new(1.0, 0.0));
    m.set(j, k, Complex64::new(1.0, 0.0));
    m
}

/// Antisymmetric off-diagonal generator -i E_kj + i E_jk (Hermitian).
pub fn antisym_pair(n: usize, k: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    m.set(k, j, Complex64::new(0.0, -1.0));
    m.set(j, k, Complex64::new(0.0, 1.0));
    m
}

/// Diagonal traceless generator sqrt(2/(m(m+1))) diag(1,..,1,-m,0,..,0)
/// with m ones, normalized so Tr(D^2) = 2.
fn diag_generator(n: usize, m: usize) -> ComplexMatrix {
    let scale = (2.0 / (m as f64 * (m as f64 + 1.0))).sqrt();
    let mut d = ComplexMatrix::zeros(n);
    for i in 0..m {
        d.set(i, i, Complex64::new(scale, 0.0));
    }
    d.set(m, m, Complex64::new(-scale * m as f64, 0.0));
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Identity plus the n^2 - 1 traceless Gell-Mann generators.
    GellMann,
    /// Cross-cluster generators spanning the normal complement of a
    /// stabilizer algebra.
    NormalComplement,
    /// Block-diagonal generators commuting with a given state.
    Stabilizer,
    /// Solutions of the homogeneous anticommutator equation {X, rho} = 0.
    Homogeneous,
}

#[derive(Debug, Clone)]
pub struct BasisSet {
    pub n: usize,
    pub elements: Vec<ComplexMatrix>,
    pub kind: BasisKind,
}

impl BasisSet {
    /// Assembles a basis and verifies pairwise trace-orthogonality.
    pub fn new(n: usize, elements: Vec<ComplexMatrix>, kind: BasisKind) -> Result<Self> {
        for a in 0..elements.len() {
            for b in (a + 1)..elements.len() {
                let overlap = elements[a].inner(&elements[b]).norm();
                if overlap > tol::STRUCTURE_SKEW {
                    return Err(Error::Numerical {
                        what: format!("basis trace-orthogonality of elements {a} and {b}"),
                        measured: overlap,
                        bound: tol::STRUCTURE_SKEW,
                    });
                }
            }
        }
        Ok(Self { n, elements, kind })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The n^2 Hermitian generators of u(n): identity first, then the traceless
/// Gell-Mann matrices.
///
/// For n = 3 the ordering is the standard lambda_1..lambda_8 layout (diagonal
/// generators interleaved at positions 3 and 8), so spans quoted in terms of
/// lambda indices can be written down verbatim. For other n, off-diagonal
/// pairs come in lexicographic (k, j) order followed by the diagonal
/// generators.
pub fn gellmann_basis(n: usize) -> Result<BasisSet> {
    if n == 0 {
        return Err(Error::Domain("Gell-Mann basis needs n >= 1".into()));
    }
    let mut elements = vec![ComplexMatrix::identity(n)];
    if n == 3 {
        elements.push(sym_pair(3, 0, 1)); // lambda_1
        elements.push(antisym_pair(3, 0, 1)); // lambda_2
        elements.push(diag_generator(3, 1)); // lambda_3 = diag(1,-1,0)
        elements.push(sym_pair(3, 0, 2)); // lambda_4
        elements.push(antisym_pair(3, 0, 2)); // lambda_5
        elements.push(sym_pair(3, 1, 2)); // lambda_6
        elements.push(antisym_pair(3, 1, 2)); // lambda_7
        elements.push(diag_generator(3, 2)); // lambda_8
    } else {
        for k in 0..n {
            for j in (k + 1)..n {
                elements.push(sym_pair(n, k, j));
                elements.push(antisym_pair(n, k, j));
            }
        }
        for m in 1..n {
            elements.push(diag_generator(n, m));
        }
    }
    BasisSet::new(n, elements, BasisKind::GellMann)
}

/// One root of u(n) relative to the diagonal torus: [diag(lambda), E_kj] =
/// (lambda_k - lambda_j) E_kj, with dual root diag(.., +1 at k, .., -1 at j, ..).
#[derive(Debug, Clone)]
pub struct RootDatum {
    /// Row index k (0-based).
    pub k: usize,
    /// Column index j (0-based).
    pub j: usize,
    pub value: f64,
    pub root_vector: ComplexMatrix,
    pub dual_root: ComplexMatrix,
}

/// All n(n-1) ordered roots of u(n) evaluated at diag(lambda).
pub fn root_data(n: usize, lambda: &[f64]) -> Result<Vec<RootDatum>> {
    if n < 2 {
        return Err(Error::Domain("root data needs n >= 2".into()));
    }
    if lambda.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: lambda.len(),
        });
    }
    let mut out = Vec::with_capacity(n * (n - 1));
    for k in 0..n {
        for j in 0..n {
            if k == j {
                continue;
            }
            let mut dual = ComplexMatrix::zeros(n);
            dual.set(k, k, Complex64::new(1.0, 0.0));
            dual.set(j, j, Complex64::new(-1.0, 0.0));
            out.push(RootDatum {
                k,
                j,
                value: lambda[k] - lambda[j],
                root_vector: ComplexMatrix::elementary(n, k, j),
                dual_root: dual,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::commutator;

    #[test]
    fn pauli_set_for_n2() {
        let b = gellmann_basis(2).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.elements[0], ComplexMatrix::identity(2));
        // sigma_x, sigma_y, sigma_z in order.
        assert_eq!(b.elements[1].get(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(b.elements[2].get(0, 1), Complex64::new(0.0, -1.0));
        assert_eq!(b.elements[3].get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(b.elements[3].get(1, 1), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn n3_layout_matches_standard_lambda_indexing() {
        let b = gellmann_basis(3).unwrap();
        assert_eq!(b.len(), 9);
        // lambda_1 connects (1,2); lambda_4 connects (1,3); lambda_6 connects (2,3).
        assert_eq!(b.elements[1].get(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(b.elements[4].get(0, 2), Complex64::new(1.0, 0.0));
        assert_eq!(b.elements[6].get(1, 2), Complex64::new(1.0, 0.0));
        // lambda_3 = diag(1,-1,0).
        assert_eq!(b.elements[3].get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(b.elements[3].get(2, 2), Complex64::new(0.0, 0.0));
        // Tr(lambda_a lambda_b) = 2 delta_ab for the traceless part.
        for a in 1..9 {
            for c in 1..9 {
                let t = b.elements[a].inner(&b.elements[c]);
                let expect = if a == c { 2.0 } else { 0.0 };
                assert!((t.re - expect).abs() < 1e-14 && t.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn counts_are_n_squared() {
        for n in 1..=6 {
            assert_eq!(gellmann_basis(n).unwrap().len(), n * n);
        }
        assert!(gellmann_basis(0).is_err());
    }

    #[test]
    fn root_values_and_dual_roots() {
        let roots = root_data(3, &[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(roots.len(), 6);
        let r13 = roots.iter().find(|r| r.k == 0 && r.j == 2).unwrap();
        assert_eq!(r13.value, 2.0);
        let r12 = roots.iter().find(|r| r.k == 0 && r.j == 1).unwrap();
        assert_eq!(r12.dual_root.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(r12.dual_root.get(1, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(r12.dual_root.get(2, 2), Complex64::new(0.0, 0.0));

        // Degenerate diagonal: every root value is zero.
        for r in root_data(4, &[0.3; 4]).unwrap() {
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn root_commutation_identity_holds_entrywise() {
        let lambda = [0.9, 0.4, -0.2, -0.7];
        let d = ComplexMatrix::diag_real(&lambda);
        for r in root_data(4, &lambda).unwrap() {
            let lhs = commutator(&d, &r.root_vector).unwrap();
            let rhs = r.root_vector.scale_re(r.value);
            assert!(lhs.dist(&rhs) <= 1e-14);
        }
    }
}
