use thiserror::Error;

/// Errors surfaced by validation and numerical contracts.
///
/// Every variant names the violated invariant and carries the measured
/// deviation so callers (and the CLI) can report actionable diagnostics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("hermiticity violation: ||M - M^H||_F = {deviation:.3e} exceeds {bound:.3e}")]
    NotHermitian { deviation: f64, bound: f64 },

    #[error("anti-hermiticity violation: ||M + M^H||_F = {deviation:.3e} exceeds {bound:.3e}")]
    NotAntiHermitian { deviation: f64, bound: f64 },

    #[error("unitarity violation: ||U^H U - I||_F = {deviation:.3e} exceeds {bound:.3e}")]
    NotUnitary { deviation: f64, bound: f64 },

    #[error("unit-trace violation: |Tr - 1| = {deviation:.3e} exceeds {bound:.3e}")]
    TraceNotOne { deviation: f64, bound: f64 },

    #[error(
        "positive-semidefiniteness violation: min eigenvalue {min_eigenvalue:.3e} below -{bound:.3e}"
    )]
    NotPositiveSemidefinite { min_eigenvalue: f64, bound: f64 },

    #[error("eigenvalues not weakly decreasing at index {index}: {prev} then {next}")]
    UnsortedEigenvalues { index: usize, prev: f64, next: f64 },

    #[error("partition {partition:?} inconsistent with eigenvalue clustering {clusters:?}")]
    PartitionMismatch {
        partition: Vec<usize>,
        clusters: Vec<usize>,
    },

    #[error(
        "normal-complement support violation: stabilizer-block mass {deviation:.3e} exceeds {bound:.3e}"
    )]
    NotInNormalComplement { deviation: f64, bound: f64 },

    #[error("tangent vectors live at different base points: ||rho - sigma||_F = {deviation:.3e}")]
    BaseMismatch { deviation: f64 },

    #[error("stabilizer inclusion violated: {fine:?} does not refine {coarse:?}")]
    NotARefinement {
        fine: Vec<usize>,
        coarse: Vec<usize>,
    },

    #[error("anticommutator equation has no solution: residual {residual:.3e} exceeds {bound:.3e}")]
    NoSolution { residual: f64, bound: f64 },

    #[error("rank changed across the finite-difference stencil: {ranks:?}")]
    StratumViolation { ranks: Vec<usize> },

    #[error("eigenvalue clusters changed across the finite-difference stencil: {partitions:?}")]
    EigenvalueCrossing { partitions: Vec<Vec<usize>> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical contract violated ({what}): measured {measured:.3e} exceeds {bound:.3e}")]
    Numerical {
        what: String,
        measured: f64,
        bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
