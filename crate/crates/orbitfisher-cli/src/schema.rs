//! On-disk JSON schemas: matrices, curves, tangent pairs, and the report
//! envelope every subcommand emits.

use orbitfisher::oracles::CurveSpec;
use orbitfisher::orbit::DensityMatrix;
use orbitfisher::{Complex64, ComplexMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A dense complex matrix split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.n();
        let mut re = vec![vec![0.0; n]; n];
        let mut im = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let z = m.get(i, j);
                re[i][j] = z.re;
                im[i][j] = z.im;
            }
        }
        Self { n, re, im }
    }

    /// Rebuilds the matrix, rejecting ragged or mis-sized arrays.
    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let n = self.n;
        if self.re.len() != n || self.im.len() != n {
            return Err(CliError::Validation(format!(
                "matrix arrays must have {n} rows; got {} (re) and {} (im)",
                self.re.len(),
                self.im.len()
            )));
        }
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            if self.re[i].len() != n || self.im[i].len() != n {
                return Err(CliError::Validation(format!(
                    "matrix row {i} must have {n} entries; got {} (re) and {} (im)",
                    self.re[i].len(),
                    self.im[i].len()
                )));
            }
            for j in 0..n {
                m.set(i, j, Complex64::new(self.re[i][j], self.im[i][j]));
            }
        }
        Ok(m)
    }

    /// Parses the matrix and validates it as a density matrix
    /// (Hermitian, positive semidefinite, unit trace). Nothing is
    /// symmetrized silently.
    pub fn to_state(&self) -> Result<DensityMatrix, CliError> {
        DensityMatrix::new(self.to_matrix()?).map_err(|err| CliError::Validation(err.to_string()))
    }

    /// Parses the matrix and validates it as an anti-Hermitian generator.
    pub fn to_generator(&self) -> Result<ComplexMatrix, CliError> {
        let m = self.to_matrix()?;
        m.check_anti_hermitian()
            .map_err(|err| CliError::Validation(err.to_string()))?;
        Ok(m)
    }
}

/// Input for `sld`: a state and one anti-Hermitian direction generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentInput {
    pub rho: MatrixFile,
    pub generator: MatrixFile,
}

/// Input for `kks`, `bures`, and the pairwise form of `fisher`: a state
/// and two anti-Hermitian direction generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairInput {
    pub rho: MatrixFile,
    pub generator_a: MatrixFile,
    pub generator_b: MatrixFile,
}

/// `fisher` accepts either a bare state (full tensor report over the
/// canonical basis) or a state with two directions (one pairing).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FisherInput {
    Pair(PairInput),
    State(MatrixFile),
}

/// Input for `fibration-check`: two commuting reference states sharing a
/// diagonal eigenframe, the finer-partition one first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FibrationInput {
    pub eta0: MatrixFile,
    pub xi0: MatrixFile,
}

/// A differentiable path of density matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveFile {
    /// theta |-> exp(theta K) rho0 exp(-theta K).
    UnitaryRotation {
        generator: MatrixFile,
        base: MatrixFile,
    },
    /// theta |-> U diag(kappa0 + theta dkappa) U^dagger.
    EigenvaluePath {
        kappa0: Vec<f64>,
        dkappa: Vec<f64>,
        unitary: MatrixFile,
    },
    /// Simultaneous rotation and eigenvalue drift.
    Composite {
        generator: MatrixFile,
        kappa0: Vec<f64>,
        dkappa: Vec<f64>,
        unitary: MatrixFile,
    },
}

impl CurveFile {
    pub fn to_curve(&self) -> Result<CurveSpec, CliError> {
        let lift = |err: orbitfisher::Error| CliError::Validation(err.to_string());
        match self {
            Self::UnitaryRotation { generator, base } => {
                let base = base.to_state()?;
                CurveSpec::unitary_rotation(generator.to_matrix()?, base).map_err(lift)
            }
            Self::EigenvaluePath {
                kappa0,
                dkappa,
                unitary,
            } => CurveSpec::eigenvalue_path(kappa0.clone(), dkappa.clone(), unitary.to_matrix()?)
                .map_err(lift),
            Self::Composite {
                generator,
                kappa0,
                dkappa,
                unitary,
            } => CurveSpec::composite(
                generator.to_matrix()?,
                kappa0.clone(),
                dkappa.clone(),
                unitary.to_matrix()?,
            )
            .map_err(lift),
        }
    }
}

/// Sign and normalization conventions recorded in every report, plus the
/// effective tolerance and seed of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConventions {
    pub pairing_sign: String,
    pub antisym_extraction: String,
    pub eigenvalue_order: String,
    pub sld_equation: String,
    pub bures_factor: String,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl ReportConventions {
    pub fn new(tolerance: f64, seed: Option<u64>) -> Self {
        let fixed = orbitfisher::tensors::CONVENTIONS;
        Self {
            pairing_sign: fixed.pairing_sign.to_string(),
            antisym_extraction: fixed.antisym_extraction.to_string(),
            eigenvalue_order: fixed.eigenvalue_order.to_string(),
            sld_equation: "drho = (L*rho + rho*L)/2".to_string(),
            bures_factor: "fisher_sym = 4 * bures".to_string(),
            tolerance,
            seed,
        }
    }
}

/// The envelope written by every report-producing subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub input_digest: String,
    pub conventions: ReportConventions,
    pub payload: serde_json::Value,
}
