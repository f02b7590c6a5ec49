//! Command-line front end for the orbitfisher library.
//!
//! Every subcommand reads JSON inputs, runs the corresponding library
//! computation under an explicit tolerance, and emits a report envelope
//! (JSON by default, flattened CSV on request) either to stdout or
//! atomically to `--output`.
//!
//! Exit codes: 0 success, 2 validation error (unreadable or invalid
//! input), 3 numerical-contract violation, 64 usage error.

mod output;
mod schema;

pub use output::{digest_hex, float17, report_to_json};
pub use schema::{
    CurveFile, FibrationInput, MatrixFile, PairInput, ReportConventions, ReportFile, TangentInput,
};

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use orbitfisher::algebra::anticommutator;
use orbitfisher::basis::antisym_pair;
use orbitfisher::fibration::{compositions, is_refinement, nesting_report, FibrationSpec};
use orbitfisher::oracles::{fisher_index_along_curve, maurer_cartan_coefficients};
use orbitfisher::orbit::{classify, DensityMatrix};
use orbitfisher::selftest;
use orbitfisher::sld::{normal_basis_at, sld, TangentVector};
use orbitfisher::tensors::{
    bures_full, bures_tangent, fisher_split, fisher_tensor, fisher_u3_closed_form, kks_form,
};
use orbitfisher::{tol, ComplexMatrix};

use schema::FisherInput;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// CLI failures, sorted by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Flag or invocation misuse (exit 64).
    #[error("{0}")]
    Usage(String),
    /// Unreadable or invalid input data (exit 2).
    #[error("{0}")]
    Validation(String),
    /// A numerical contract exceeded its tolerance (exit 3).
    #[error("{0}")]
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Contract(_) => EXIT_CONTRACT,
        }
    }
}

/// Library errors that report a measured deviation against a bound are
/// contract violations; everything else is an input problem.
fn lift(err: orbitfisher::Error) -> CliError {
    use orbitfisher::Error as E;
    match err {
        E::Numerical { .. }
        | E::NoSolution { .. }
        | E::StratumViolation { .. }
        | E::EigenvalueCrossing { .. }
        | E::BaseMismatch { .. }
        | E::NotInNormalComplement { .. } => CliError::Contract(err.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "orbitfisher",
    version,
    about = "Orbit geometry of density matrices: classification, SLD, symplectic and Fisher tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Input JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the report here (atomic temp-file + rename) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Numerical tolerance; falls back to ORBITFISHER_TOL, then 1e-10.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized subcommands.
    #[arg(long)]
    seed: Option<u64>,
    /// Report format (JSON unless stated otherwise).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a state: eigenvalue partition, orbit and stratum dimensions.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Symmetric logarithmic derivative of a state along one direction.
    Sld {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Canonical symplectic pairing of two tangent directions.
    Kks {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fisher tensor: full report for a state, or one pairing for a
    /// state with two directions.
    Fisher {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bures metric pairing of two tangent directions.
    Bures {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fisher index and Bures metric along a parametrized curve of states.
    CurveFisher {
        #[command(flatten)]
        common: CommonArgs,
        /// Expansion point on the curve.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Orbit-fibration dimension accounting for a pair of reference
    /// states (--input) or for all nested partitions of a given size (--n).
    FibrationCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Tabulate all refinement pairs at this matrix dimension.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Closed-form three-level Fisher coefficients for given eigenvalues.
    U3ClosedForm {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated eigenvalues, e.g. 0.5,0.3,0.2.
        #[arg(long, required = true, value_delimiter = ',')]
        kappa: Vec<f64>,
    },
    /// Run the full verification suite and print one line per criterion.
    Selftest {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit CSV sweep data for external plotting.
    PlotData {
        #[command(flatten)]
        common: CommonArgs,
        /// Which quantity to sweep.
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// First kappa_1 sample.
        #[arg(long, default_value_t = 0.55)]
        start: f64,
        /// Last kappa_1 sample.
        #[arg(long, default_value_t = 0.95)]
        stop: f64,
        /// Number of samples; 0 emits the header only.
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
}

/// Sweepable closed-form quantities on the two-level orbit family
/// diag(kappa_1, 1 - kappa_1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    /// Symmetric Fisher coefficient 4 (k1-k2)^2 / (k1+k2).
    U2FisherSym,
    /// Isospectral Bures coefficient (k1-k2)^2 / (k1+k2).
    BuresLambda,
}

impl Quantity {
    fn column(self) -> &'static str {
        match self {
            Self::U2FisherSym => "fisher_sym",
            Self::BuresLambda => "lambda12",
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::U2FisherSym => "u2-fisher-sym",
            Self::BuresLambda => "bures-lambda",
        }
    }
}

/// Parses argv and runs one subcommand, translating every failure into
/// the documented exit codes. Never panics on malformed input.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Classify { common } => cmd_classify(common),
        Command::Sld { common } => cmd_sld(common),
        Command::Kks { common } => cmd_kks(common),
        Command::Fisher { common } => cmd_fisher(common),
        Command::Bures { common } => cmd_bures(common),
        Command::CurveFisher {
            common,
            theta,
            step,
        } => cmd_curve_fisher(common, theta, step),
        Command::FibrationCheck { common, n } => cmd_fibration_check(common, n),
        Command::U3ClosedForm { common, kappa } => cmd_u3_closed_form(common, kappa),
        Command::Selftest { common } => cmd_selftest(common),
        Command::PlotData {
            common,
            quantity,
            start,
            stop,
            points,
        } => cmd_plot_data(common, quantity, start, stop, points),
    }
}

/// Tolerance resolution: flag, then ORBITFISHER_TOL, then the default.
fn resolve_tol(flag: Option<f64>) -> Result<f64, CliError> {
    let value = match flag {
        Some(v) => v,
        None => match std::env::var("ORBITFISHER_TOL") {
            Ok(text) => text.trim().parse::<f64>().map_err(|_| {
                CliError::Usage(format!("ORBITFISHER_TOL is not a number: {text:?}"))
            })?,
            Err(std::env::VarError::NotPresent) => tol::DEFAULT_TOL,
            Err(err) => {
                return Err(CliError::Usage(format!(
                    "cannot read ORBITFISHER_TOL: {err}"
                )))
            }
        },
    };
    if !(value.is_finite() && value > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive and finite; got {value}"
        )));
    }
    Ok(value)
}

fn required_input(common: &CommonArgs) -> Result<(Vec<u8>, PathBuf), CliError> {
    let path = common
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("--input is required for this subcommand".to_string()))?;
    let bytes = fs::read(path).map_err(|err| {
        CliError::Validation(format!("cannot read input file {}: {err}", path.display()))
    })?;
    Ok((bytes, path.to_path_buf()))
}

fn parse_json<T: DeserializeOwned>(bytes: &[u8], path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|err| {
        CliError::Validation(format!("malformed JSON in {}: {err}", path.display()))
    })
}

fn to_payload<T: serde::Serialize>(value: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(value)
        .map_err(|err| CliError::Validation(format!("cannot serialize payload: {err}")))
}

fn emit_report(
    common: &CommonArgs,
    command: &str,
    digest: String,
    payload: serde_json::Value,
    tolerance: f64,
) -> Result<(), CliError> {
    let report = ReportFile {
        command: command.to_string(),
        input_digest: digest,
        conventions: ReportConventions::new(tolerance, common.seed),
        payload,
    };
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => output::report_to_json(&report)?,
        Format::Csv => output::report_to_csv(&report),
    };
    output::emit(common.output.as_deref(), &text)
}

/// Builds a validated tangent vector from a state and generator file pair.
fn tangent_from_files(
    rho: &DensityMatrix,
    generator: &MatrixFile,
) -> Result<TangentVector, CliError> {
    let k = generator.to_generator()?;
    if k.n() != rho.n() {
        return Err(CliError::Validation(format!(
            "generator dimension {} does not match state dimension {}",
            k.n(),
            rho.n()
        )));
    }
    TangentVector::from_generator(rho.clone(), &k).map_err(lift)
}

fn cmd_classify(common: CommonArgs) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    let (bytes, path) = required_input(&common)?;
    let file: MatrixFile = parse_json(&bytes, &path)?;
    let rho = file.to_state()?;
    let descriptor = classify(&rho, tolerance).map_err(lift)?;
    emit_report(
        &common,
        "classify",
        digest_hex(&bytes),
        to_payload(&descriptor)?,
        tolerance,
    )
}

fn cmd_sld(common: CommonArgs) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    let (bytes, path) = required_input(&common)?;
    let input: TangentInput = parse_json(&bytes, &path)?;
    let rho = input.rho.to_state()?;
    let v = tangent_from_files(&rho, &input.generator)?;
    let l = sld(&v).map_err(lift)?;
    let reconstructed = anticommutator(l.value(), rho.matrix())
        .map_err(lift)?
        .scale_re(0.5);
    let residual = reconstructed.dist(v.value());
    let bound = tolerance * v.value().frobenius_norm().max(1.0);
    if residual > bound {
        return Err(CliError::Contract(format!(
            "anticommutator reconstruction violated: residual {residual:.3e} exceeds {bound:.3e}"
        )));
    }
    let payload = json!({
        "n": rho.n(),
        "kappa": v.spectral().kappa,
        "partition": v.partition(),
        "sld": MatrixFile::from_matrix(l.value()),
        "residual": residual,
        "residual_bound": bound,
    });
    emit_report(&common, "sld", digest_hex(&bytes), payload, tolerance)
}

fn cmd_kks(common: CommonArgs) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    let (bytes, path) = required_input(&common)?;
    let input: PairInput = parse_json(&bytes, &path)?;
    let rho = input.rho.to_state()?;
    let va = tangent_from_files(&rho, &input.generator_a)?;
    let vb = tangent_from_files(&rho, &input.generator_b)?;
    let value = kks_form(&va, &vb).map_err(lift)?;
    let payload = json!({
        "n": rho.n(),
        "kappa": va.spectral().kappa,
        "partition": va.partition(),
        "value": value,
    });
    emit_report(&common, "kks", digest_hex(&bytes), payload, tolerance)
}

fn cmd_fisher(common: CommonArgs) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    let (bytes, path) = required_input(&common)?;
    let input: FisherInput = parse_json(&bytes, &path)?;
    let payload = match input {
        FisherInput::State(file) => {
            let rho = file.to_state()?;
            let basis = normal_basis_at(&rho).map_err(lift)?;
            let report = fisher_split(&rho, &basis).map_err(lift)?;
            to_payload(&report)?
        }
        FisherInput::Pair(pair) => {
            let rho = pair.rho.to_state()?;
            let va = tangent_from_files(&rho, &pair.generator_a)?;
            let vb = tangent_from_files(&rho, &pair.generator_b)?;
            let value = fisher_tensor(&va, &vb).map_err(lift)?;
            json!({
                "n": rho.n(),
                "kappa": va.spectral().kappa,
                "partition": va.partition(),
                "sym": value.re,
                "antisym": value.im,
                "kks": kks_form(&va, &vb).map_err(lift)?,
                "bures": bures_tangent(&va, &vb).map_err(lift)?,
            })
        }
    };
    emit_report(&common, "fisher", digest_hex(&bytes), payload, tolerance)
}

fn cmd_bures(common: CommonArgs) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    let (bytes, path) = required_input(&common)?;
    let input: PairInput = parse_json(&bytes, &path)?;
    let rho = input.rho.to_state()?;
    let va = tangent_from_files(&rho, &input.generator_a)?;
    let vb = tangent_from_files(&rho, &input.generator_b)?;
    let value = bures_tangent(&va, &vb).map_err(lift)?;
    let fisher_sym = fisher_tensor(&va, &vb).map_err(lift)?.re;
    let deviation = (4.0 * value - fisher_sym).abs();
    let bound = tolerance * fisher_sym.abs().max(1.0);
    if deviation > bound {
        return Err(CliError::Contract(format!(
            "quarter-Fisher identity violated: deviation {deviation:.3e} exceeds {bound:.3e}"
        )));
    }
    let payload = json!({
        "n": rho.n(),
        "kappa": va.spectral().kappa,
        "partition": va.partition(),
        "value": value,
        "fisher_sym": fisher_sym,
        "quarter_identity_deviation": deviation,
    });
    emit_report(&common, "bures", digest_hex(&bytes), payload, tolerance)
}

fn cmd_curve_fisher(common: CommonArgs, theta: f64, step: f64) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::Usage(format!(
            "--step must be positive and finite; got {step}"
        )));
    }
    if !theta.is_finite() {
        return Err(CliError::Usage(format!("--theta must be finite; got {theta}")));
    }
    let (bytes, path) = required_input(&common)?;
    let file: CurveFile = parse_json(&bytes, &path)?;
    let curve = file.to_curve()?;
    let coefficients = maurer_cartan_coefficients(&curve, theta, step).map_err(lift)?;
    let index = fisher_index_along_curve(&curve, theta, step).map_err(lift)?;
    let metric = bures_full(&curve, theta, step).map_err(lift)?;
    let deviation = (4.0 * metric - index).abs();
    let bound = tol::CURVE_CONSISTENCY * index.abs().max(1.0);
    if deviation > bound {
        return Err(CliError::Contract(format!(
            "quarter-Fisher curve identity violated: deviation {deviation:.3e} exceeds {bound:.3e}"
        )));
    }
    let payload = json!({
        "n": curve.n(),
        "theta": theta,
        "step": step,
        "fisher_index": index,
        "bures_metric": metric,
        "quarter_identity_deviation": deviation,
        "kappa": coefficients.kappa,
        "dkappa": coefficients.dkappa,
        "partition": coefficients.partition,
        "maurer_cartan_offdiag": MatrixFile::from_matrix(&coefficients.offdiag),
    });
    emit_report(
        &common,
        "curve-fisher",
        digest_hex(&bytes),
        payload,
        tolerance,
    )
}

fn cmd_fibration_check(common: CommonArgs, n: Option<usize>) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    match (&common.input, n) {
        (Some(_), None) => {
            let (bytes, path) = required_input(&common)?;
            let input: FibrationInput = parse_json(&bytes, &path)?;
            let eta0 = input.eta0.to_state()?;
            let xi0 = input.xi0.to_state()?;
            let spec = FibrationSpec::new(eta0, xi0).map_err(lift)?;
            let (base_dim, fibre_dim, total_dim) = spec.split_dims();
            let payload = json!({
                "n": spec.n(),
                "eta_partition": spec.eta_partition(),
                "xi_partition": spec.xi_partition(),
                "base_dim": base_dim,
                "fibre_dim": fibre_dim,
                "total_dim": total_dim,
                "identity_holds": total_dim == base_dim + fibre_dim,
            });
            emit_report(
                &common,
                "fibration-check",
                digest_hex(&bytes),
                payload,
                tolerance,
            )
        }
        (None, Some(n)) => {
            if !(2..=6).contains(&n) {
                return Err(CliError::Validation(format!(
                    "--n must lie in 2..=6 for the nesting table; got {n}"
                )));
            }
            let parts = compositions(n);
            let mut pairs = Vec::new();
            for fine in &parts {
                for coarse in &parts {
                    if is_refinement(fine, coarse) {
                        pairs.push((fine.clone(), coarse.clone()));
                    }
                }
            }
            let rows = nesting_report(n, &pairs).map_err(lift)?;
            let payload = json!({ "n": n, "rows": to_payload(&rows)? });
            let digest = digest_hex(format!("fibration-check n={n}").as_bytes());
            emit_report(&common, "fibration-check", digest, payload, tolerance)
        }
        (Some(_), Some(_)) => Err(CliError::Usage(
            "fibration-check takes either --input or --n, not both".to_string(),
        )),
        (None, None) => Err(CliError::Usage(
            "fibration-check needs --input (state pair) or --n (nesting table)".to_string(),
        )),
    }
}

fn cmd_u3_closed_form(common: CommonArgs, kappa: Vec<f64>) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    let pairs = fisher_u3_closed_form(&kappa).map_err(lift)?;
    let canon: Vec<String> = kappa.iter().map(|x| x.to_string()).collect();
    let digest = digest_hex(format!("u3-closed-form kappa={}", canon.join(",")).as_bytes());
    let payload = json!({ "kappa": kappa, "pairs": to_payload(&pairs)? });
    emit_report(&common, "u3-closed-form", digest, payload, tolerance)
}

fn cmd_selftest(common: CommonArgs) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    let seed = common.seed.unwrap_or(selftest::DEFAULT_SEED);
    let results = selftest::run_all(seed, tolerance)
        .map_err(|err| CliError::Contract(format!("verification runner failed: {err}")))?;
    let mut text = String::new();
    for result in &results {
        text.push_str(&selftest::format_result(result));
        text.push('\n');
    }
    let failures = results.iter().filter(|r| !r.passed).count();
    if failures == 0 {
        text.push_str(&format!("all {} criteria passed\n", results.len()));
    } else {
        text.push_str(&format!(
            "{failures} of {} criteria failed\n",
            results.len()
        ));
    }
    output::emit(common.output.as_deref(), &text)?;
    if failures > 0 {
        return Err(CliError::Contract(format!(
            "{failures} verification criteria failed"
        )));
    }
    Ok(())
}

fn cmd_plot_data(
    common: CommonArgs,
    quantity: Quantity,
    start: f64,
    stop: f64,
    points: usize,
) -> Result<(), CliError> {
    let tolerance = resolve_tol(common.tol)?;
    for (label, value) in [("--start", start), ("--stop", stop)] {
        if !(value.is_finite() && value > 0.5 && value <= 1.0) {
            return Err(CliError::Validation(format!(
                "{label} must lie in (0.5, 1] so the two-level spectrum stays ordered; got {value}"
            )));
        }
    }
    if points > 1 && stop < start {
        return Err(CliError::Validation(format!(
            "sweep end {stop} lies below start {start}"
        )));
    }
    let samples: Vec<f64> = match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    };
    let mut rows = Vec::with_capacity(samples.len());
    for kappa1 in samples {
        let rho = DensityMatrix::new(ComplexMatrix::diag_real(&[kappa1, 1.0 - kappa1]))
            .map_err(lift)?;
        if rho.n() != 2 {
            unreachable!("two-level sweep");
        }
        // Unit chart direction: the orbit motion generated by i*sigma_y,
        // whose tangent value picks up the eigenvalue gap.
        let generator = antisym_pair(2, 0, 1).scale(orbitfisher::Complex64::new(0.0, 1.0));
        let v = TangentVector::from_generator(rho, &generator).map_err(lift)?;
        if v.partition() != [1, 1] {
            return Err(CliError::Validation(format!(
                "eigenvalues cluster at kappa1 = {kappa1}; the sweep needs distinct eigenvalues"
            )));
        }
        let value = match quantity {
            Quantity::U2FisherSym => fisher_tensor(&v, &v).map_err(lift)?.re,
            Quantity::BuresLambda => bures_tangent(&v, &v).map_err(lift)?,
        };
        rows.push(vec![kappa1, value]);
    }
    let digest = digest_hex(
        format!(
            "plot-data quantity={} start={start} stop={stop} points={points}",
            quantity.name()
        )
        .as_bytes(),
    );
    let columns = ["kappa1", quantity.column()];
    let report = ReportFile {
        command: "plot-data".to_string(),
        input_digest: digest,
        conventions: ReportConventions::new(tolerance, common.seed),
        payload: json!({
            "quantity": quantity.name(),
            "columns": columns,
            "rows": rows,
        }),
    };
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::sweep_to_csv(&report, quantity.name(), &columns, &rows),
        Format::Json => output::report_to_json(&report)?,
    };
    output::emit(common.output.as_deref(), &text)
}
