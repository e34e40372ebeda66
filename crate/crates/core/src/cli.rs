//! Command-line front end: JSON state files in, JSON or text reports and CSV out.
//!
//! Exit codes: `0` on success, `1` when a library operation fails, `2` for
//! malformed input (unreadable files, bad JSON, invalid states or flags).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::casebook::{self, BellFamilyParams, BoundReport};
use crate::discriminate::{self, OverlapMatrix, UqsdRegime};
use crate::error::Error;
use crate::locc;
use crate::majorize::{self, Verdict};
use crate::measure::OutcomeStatistics;
use crate::numkernel::{c, ComplexMatrix};
use crate::random::{random_state_vector, random_traceless, rng};
use crate::states::{validate_density, Ensemble, PureState, State};

/// Report tolerance used when `QSD_TOLERANCE` is unset.
pub const DEFAULT_REPORT_TOL: f64 = 1e-9;

/// Significant digits of every float in a report.
pub const REPORT_DIGITS: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Library(_) => 1,
        }
    }
}

fn input_err(context: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{context}: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "qsd", version, about = "Quantum state discrimination, LOCC protocols and majorization bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum-error (Helstrom) measurement for a two-state ensemble.
    Helstrom {
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Optimal unambiguous discrimination of two pure states.
    Uqsd {
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Quantum state separation towards target states with success matrix K.
    Qss {
        #[arg(long)]
        ensemble: PathBuf,
        /// Ensemble file whose states are the targets (probabilities are ignored).
        #[arg(long)]
        targets: PathBuf,
        /// JSON matrix of [re, im] pairs.
        #[arg(long)]
        k: PathBuf,
    },
    /// Majorization between two probability vectors or Schmidt spectra.
    Majorize { x: PathBuf, y: PathBuf },
    /// Two-qubit LOCC conversion of Schmidt weights (p1, 1-p1) into (q1, 1-q1).
    Nielsen {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        q1: f64,
    },
    /// LOCC discrimination of two bipartite pure states.
    Walgate {
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Unitary making a matrix's diagonal constant.
    Equidiag {
        /// JSON matrix of [re, im] pairs; a random traceless matrix is used when omitted.
        matrix: Option<PathBuf>,
        /// Dimension of the random matrix.
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
    /// Bounds for the Bell-like family with amplitudes a, b, c, d.
    Casebook {
        name: CasebookName,
        #[arg(long)]
        a: f64,
        /// Defaults to sqrt(1 - a^2).
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        c: f64,
        /// Defaults to sqrt(1 - c^2).
        #[arg(long)]
        d: Option<f64>,
        /// Use the anti-parallel three-state choice (ghosh3 only).
        #[arg(long)]
        anti_parallel: bool,
    },
    /// Entanglement cost against average entanglement over an (a^2, c^2) grid.
    Figure1 {
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// CSV destination; the CSV goes to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random pure state file.
    RandomState {
        #[arg(long, default_value_t = 2)]
        dim_a: usize,
        #[arg(long, default_value_t = 2)]
        dim_b: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CasebookName {
    Ghosh4,
    Ghosh3,
    Maj4,
    Maj3,
    Assisted,
    Preserve2,
    Preserve4Product,
    Preserve4Bell,
}

/// Complex number as `[re, im]`.
pub type ComplexPair = [f64; 2];

/// On-disk state: pure amplitudes or a density matrix, with optional bipartite dims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Pure {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dims: Option<[usize; 2]>,
        amplitudes: Vec<ComplexPair>,
    },
    Mixed {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dims: Option<[usize; 2]>,
        matrix: Vec<Vec<ComplexPair>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleItem {
    pub prob: f64,
    pub state: StateFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub items: Vec<EnsembleItem>,
}

fn pairs_to_complex(v: &[ComplexPair]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| c(*re, *im)).collect()
}

/// Matrix from rows of `[re, im]` pairs.
pub fn matrix_from_pairs(rows: &[Vec<ComplexPair>]) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| pairs_to_complex(r)).collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| input_err("matrix", e))
}

pub fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

impl StateFile {
    /// Validates and converts with the library tolerances.
    pub fn to_state(&self) -> Result<State, CliError> {
        match self {
            StateFile::Pure { dims, amplitudes } => {
                let amps = pairs_to_complex(amplitudes);
                let psi = match dims {
                    Some([a, b]) => PureState::bipartite(amps, *a, *b),
                    None => PureState::new(amps),
                }
                .map_err(|e| input_err("pure state", e))?;
                Ok(psi.into())
            }
            StateFile::Mixed { dims, matrix } => {
                let rho = validate_density(&matrix_from_pairs(matrix)?).map_err(|e| input_err("density operator", e))?;
                let rho = match dims {
                    Some([a, b]) => rho.with_dims(*a, *b).map_err(|e| input_err("density operator", e))?,
                    None => rho,
                };
                Ok(rho.into())
            }
        }
    }

    pub fn from_state(s: &State) -> Self {
        match s {
            State::Pure(p) => StateFile::Pure {
                dims: p.dims().map(|(a, b)| [a, b]),
                amplitudes: p.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            },
            State::Mixed(r) => StateFile::Mixed { dims: r.dims().map(|(a, b)| [a, b]), matrix: matrix_to_pairs(r.matrix()) },
        }
    }
}

impl EnsembleFile {
    pub fn to_ensemble(&self) -> Result<Ensemble, CliError> {
        let items = self
            .items
            .iter()
            .map(|it| Ok((it.prob, it.state.to_state()?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ensemble::new(items).map_err(|e| input_err("ensemble", e))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| input_err(path.display(), e))
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble, CliError> {
    read_json::<EnsembleFile>(path)?.to_ensemble()
}

pub fn load_state(path: &Path) -> Result<State, CliError> {
    read_json::<StateFile>(path)?.to_state()
}

/// Rounds to [`REPORT_DIGITS`] significant digits so reports print stably.
pub fn round_sig(x: f64) -> f64 {
    // Adding zero folds -0 into 0.
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x).parse::<f64>().unwrap_or(x) + 0.0
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        Value::String(x.to_string())
    }
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

fn cnum(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn mat(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).into_iter().map(cnum).collect())).collect())
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub tolerance: f64,
    pub verdicts: BTreeMap<String, bool>,
}

impl RunReport {
    fn new(command: &str, tolerance: f64, inputs: Value) -> Self {
        Self { command: command.into(), inputs, outputs: json!({}), tolerance, verdicts: BTreeMap::new() }
    }

    fn out(mut self, outputs: Value) -> Self {
        self.outputs = outputs;
        self
    }

    fn verdict(mut self, name: &str, ok: bool) -> Self {
        self.verdicts.insert(name.into(), ok);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "tolerances": { "report": num(self.tolerance) },
            "verdicts": self.verdicts,
        })
    }

    /// `section.key = value` lines in key order.
    pub fn to_text(&self) -> String {
        let mut out = format!("command = {}\n", self.command);
        for (section, value) in [("inputs", &self.inputs), ("outputs", &self.outputs)] {
            if let Value::Object(map) = value {
                for (k, v) in map {
                    out.push_str(&format!("{section}.{k} = {v}\n"));
                }
            }
        }
        out.push_str(&format!("tolerances.report = {}\n", num(self.tolerance)));
        for (k, v) in &self.verdicts {
            out.push_str(&format!("verdicts.{k} = {v}\n"));
        }
        out
    }
}

/// What a successful command prints.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Report(RunReport),
    /// Raw text such as CSV or a state file.
    Text(String),
}

/// Report tolerance from `QSD_TOLERANCE`, if set.
pub fn report_tolerance(env: Option<&str>) -> Result<f64, CliError> {
    match env {
        None => Ok(DEFAULT_REPORT_TOL),
        Some(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::Input(format!("QSD_TOLERANCE must be a positive number, got {s:?}"))),
        },
    }
}

fn two_items(e: &Ensemble, what: &str) -> Result<(f64, State, f64, State), CliError> {
    if e.len() != 2 {
        return Err(CliError::Input(format!("{what} needs exactly two states, got {}", e.len())));
    }
    let [(p1, s1), (p2, s2)] = [&e.items()[0], &e.items()[1]];
    Ok((*p1, s1.clone(), *p2, s2.clone()))
}

fn require_pure(s: &State, what: &str) -> Result<PureState, CliError> {
    s.as_pure().cloned().ok_or_else(|| CliError::Input(format!("{what} needs pure states")))
}

fn bound_json(r: &BoundReport) -> Value {
    json!({
        "bound_value": num(r.bound_value),
        "lhs": num(r.lhs),
        "rhs": num(r.rhs),
        "satisfied": r.satisfied,
        "witness": r.witness,
    })
}

fn cmd_helstrom(path: &Path, tol: f64) -> Result<RunReport, CliError> {
    let e = load_ensemble(path)?;
    let (p1, s1, p2, s2) = two_items(&e, "helstrom")?;
    let r = discriminate::helstrom_two_state(p1, &s1.density(), p2, &s2.density())?;
    let povm = r.measurement.as_povm();
    let opt = discriminate::verify_min_error_optimality(&e, &povm)?;
    let mut outputs = json!({
        "error_probability": num(r.error_probability),
        "povm": povm.effects().iter().map(mat).collect::<Vec<_>>(),
        "per_state_error": r.per_state_stats.iter().map(|s| num(s.error)).collect::<Vec<_>>(),
        "optimality_min_eigenvalue": num(opt.min_eigenvalue),
        "optimality_max_cross_term": num(opt.max_cross_term),
    });
    let mut report = RunReport::new("helstrom", tol, json!({ "ensemble": path.display().to_string(), "priors": nums(&[p1, p2]) }))
        .verdict("optimal", opt.optimal);
    if let (Some(a), Some(b)) = (s1.as_pure(), s2.as_pure()) {
        let bound = discriminate::helstrom_pure_bound(p1, p2, a.overlap(b));
        outputs["pure_state_bound"] = num(bound);
        report = report.verdict("matches_pure_bound", (bound - r.error_probability).abs() <= tol);
    }
    Ok(report.out(outputs))
}

fn cmd_uqsd(path: &Path, tol: f64) -> Result<RunReport, CliError> {
    let e = load_ensemble(path)?;
    let (p1, s1, p2, s2) = two_items(&e, "uqsd")?;
    let (a, b) = (require_pure(&s1, "uqsd")?, require_pure(&s2, "uqsd")?);
    let r = discriminate::uqsd_two_state(p1, &a, p2, &b)?;
    let s = a.overlap(&b).norm();
    let (lo, hi) = discriminate::uqsd_povm_interval(s);
    let regime = match r.regime {
        UqsdRegime::Povm => "povm",
        UqsdRegime::ProjectiveFirst => "projective_first",
        UqsdRegime::ProjectiveSecond => "projective_second",
    };
    let povm = r.result.measurement.as_povm();
    let cross = povm.effects()[1].clone();
    let err = crate::measure::raw_probability(&cross, &a.projector()).abs()
        + crate::measure::raw_probability(&povm.effects()[0], &b.projector()).abs();
    Ok(RunReport::new("uqsd", tol, json!({ "ensemble": path.display().to_string(), "priors": nums(&[p1, p2]) }))
        .out(json!({
            "regime": regime,
            "overlap": num(s),
            "povm_interval": nums(&[lo, hi]),
            "failure_probability": num(r.result.failure_probability),
            "individual_failures": nums(&[r.individual_failures.0, r.individual_failures.1]),
            "idp_bound": num(discriminate::idp_bound(p1, p2, s)),
            "povm": povm.effects().iter().map(mat).collect::<Vec<_>>(),
        }))
        .verdict("error_free", err <= tol))
}

fn cmd_qss(ensemble: &Path, targets: &Path, k: &Path, tol: f64) -> Result<RunReport, CliError> {
    let e = load_ensemble(ensemble)?;
    let t = load_ensemble(targets)?;
    let sources = e.items().iter().map(|(_, s)| require_pure(s, "qss")).collect::<Result<Vec<_>, _>>()?;
    let target_states = t.items().iter().map(|(_, s)| require_pure(s, "qss")).collect::<Result<Vec<_>, _>>()?;
    let kmat = matrix_from_pairs(&read_json::<Vec<Vec<ComplexPair>>>(k)?)?;
    let feas = discriminate::qss_feasibility(
        &OverlapMatrix::from_states(&sources)?,
        &OverlapMatrix::from_states(&target_states)?,
        &kmat,
    )?;
    let inputs = json!({
        "ensemble": ensemble.display().to_string(),
        "targets": targets.display().to_string(),
        "k": k.display().to_string(),
    });
    let mut outputs = json!({
        "feasible": feas.feasible,
        "min_eigenvalue_k": num(feas.min_eigenvalue_k),
        "min_eigenvalue_f": num(feas.min_eigenvalue_f),
        "f": mat(&feas.f),
    });
    if feas.feasible {
        let q = discriminate::qss_success_operators(&sources, &target_states, &kmat)?;
        outputs["success_probability"] = num(q.success_probability(&e.probabilities()));
        outputs["per_state_success"] = nums(&q.per_state_success);
        outputs["operators"] = Value::Array(q.operators.iter().map(mat).collect());
    }
    Ok(RunReport::new("qss", tol, inputs).out(outputs).verdict("feasible", feas.feasible))
}

/// A JSON array of reals, or a bipartite pure state file (its Schmidt spectrum).
fn load_spectrum(path: &Path) -> Result<Vec<f64>, CliError> {
    let value: Value = read_json(path)?;
    if let Value::Array(_) = value {
        let v: Vec<f64> = serde_json::from_value(value).map_err(|e| input_err(path.display(), e))?;
        return majorize::ProbVector::new(v).map(|p| p.components().to_vec()).map_err(|e| input_err(path.display(), e));
    }
    let file: StateFile = serde_json::from_value(value).map_err(|e| input_err(path.display(), e))?;
    let psi = require_pure(&file.to_state()?, "majorize")?;
    majorize::schmidt_spectrum(&psi).map_err(|e| input_err(path.display(), e))
}

fn cmd_majorize(x: &Path, y: &Path, tol: f64) -> Result<RunReport, CliError> {
    let (xv, yv) = (load_spectrum(x)?, load_spectrum(y)?);
    let r = majorize::majorizes(&xv, &yv);
    let verdict = match r.verdict {
        Verdict::LeftMajorized => "LeftMajorized",
        Verdict::RightMajorized => "RightMajorized",
        Verdict::Equal => "Equal",
        Verdict::Incomparable => "Incomparable",
    };
    let mut outputs = json!({
        "verdict": verdict,
        "prefix_sums_left": nums(&r.prefix_sums_left),
        "prefix_sums_right": nums(&r.prefix_sums_right),
        "first_violation_index": r.first_violation_index,
    });
    if r.left_is_majorized() {
        let chain = majorize::t_transform_chain(&xv, &yv)?;
        outputs["t_transforms"] = chain.iter().map(|t| json!({ "i": t.i, "j": t.j, "t": num(t.t) })).collect();
    }
    Ok(RunReport::new("majorize", tol, json!({ "x": nums(&xv), "y": nums(&yv) }))
        .out(outputs)
        .verdict("left_majorized", r.left_is_majorized()))
}

fn cmd_nielsen(p1: f64, q1: f64, tol: f64) -> Result<RunReport, CliError> {
    let r = locc::nielsen_protocol_2qubit(p1, q1)?;
    let residual = r.schmidt_residual(q1)?;
    let completeness = r.measurement.completeness_residual();
    Ok(RunReport::new("nielsen", tol, json!({ "p1": num(p1), "q1": num(q1) }))
        .out(json!({
            "alpha": num(r.alpha),
            "beta": num(r.beta),
            "m1": mat(&r.measurement.operators()[0]),
            "m2": mat(&r.measurement.operators()[1]),
            "completeness_residual": num(completeness),
            "posterior_schmidt_residual": num(residual),
        }))
        .verdict("complete", completeness <= tol)
        .verdict("posteriors_match_target", residual <= tol))
}

fn cmd_walgate(path: &Path, tol: f64) -> Result<RunReport, CliError> {
    let e = load_ensemble(path)?;
    let (p1, s1, p2, s2) = two_items(&e, "walgate")?;
    let (a, b) = (require_pure(&s1, "walgate")?, require_pure(&s2, "walgate")?);
    if a.dims().is_none() || b.dims().is_none() {
        return Err(CliError::Input("walgate needs states with bipartite dims".into()));
    }
    let inputs = json!({ "ensemble": path.display().to_string(), "priors": nums(&[p1, p2]) });
    let overlap = a.overlap(&b).norm();
    if overlap <= discriminate::ORTHOGONALITY_TOL {
        let w = locc::walgate_protocol(&a, &b)?;
        let ids = [w.simulate(0)?, w.simulate(1)?];
        Ok(RunReport::new("walgate", tol, inputs)
            .out(json!({
                "orthogonal": true,
                "alice_basis": mat(&w.alice_basis),
                "alice_dim": w.padded.alice_dim,
                "max_branch_overlap": num(w.max_branch_overlap),
                "identification_probabilities": nums(&ids),
            }))
            .verdict("perfect", ids.iter().all(|p| *p >= 1.0 - tol)))
    } else {
        let v = locc::virmani_nonorthogonal(&a, &b, p1, p2)?;
        let global = discriminate::helstrom_pure_bound(p1, p2, a.overlap(&b));
        Ok(RunReport::new("walgate", tol, inputs)
            .out(json!({
                "orthogonal": false,
                "alice_basis": mat(&v.alice_basis),
                "error_probability": num(v.error_probability),
                "global_helstrom_error": num(global),
                "branch_overlaps": v.branches.iter().map(|b| cnum(b.overlap)).collect::<Vec<_>>(),
                "branch_errors": v.branches.iter().map(|b| num(b.conditional_error)).collect::<Vec<_>>(),
            }))
            .verdict("matches_global_helstrom", (v.error_probability - global).abs() <= tol)
            .verdict("perfect", v.error_probability <= tol))
    }
}

fn cmd_equidiag(matrix: Option<&Path>, dim: usize, seed: u64, tol: f64) -> Result<RunReport, CliError> {
    let (m, inputs) = match matrix {
        Some(p) => (matrix_from_pairs(&read_json::<Vec<Vec<ComplexPair>>>(p)?)?, json!({ "matrix": p.display().to_string() })),
        None => {
            if dim == 0 || !dim.is_power_of_two() {
                return Err(CliError::Input(format!("--dim {dim} must be a power of two")));
            }
            (random_traceless(&mut rng(seed), dim), json!({ "random_traceless_dim": dim, "seed": seed }))
        }
    };
    if m.rows() != m.cols() {
        return Err(CliError::Input(format!("matrix is {}x{}, not square", m.rows(), m.cols())));
    }
    let r = locc::equidiag_power2(&m)?;
    let traceless = m.trace().norm() <= tol;
    Ok(RunReport::new("equidiag", tol, inputs)
        .out(json!({
            "unitary": mat(&r.unitary),
            "diagonal": Value::Array(r.transformed.diagonal().into_iter().map(cnum).collect()),
            "max_abs_diagonal": num(r.max_abs_diagonal),
            "diagonal_spread": num(r.diagonal_spread()),
            "unitarity_deviation": num(r.unitary.unitarity_deviation()),
            "rotations": r.rotations,
            "traceless_input": traceless,
        }))
        .verdict("equal_diagonal", r.diagonal_spread() <= tol)
        .verdict("unitary", r.unitary.unitarity_deviation() <= tol))
}

fn cmd_casebook(
    name: CasebookName,
    a: f64,
    b: Option<f64>,
    cc: f64,
    d: Option<f64>,
    anti_parallel: bool,
    tol: f64,
) -> Result<RunReport, CliError> {
    let b = b.unwrap_or_else(|| (1.0 - a * a).max(0.0).sqrt());
    let d = d.unwrap_or_else(|| (1.0 - cc * cc).max(0.0).sqrt());
    let p = BellFamilyParams::new(a, b, cc, d).map_err(|e| input_err("parameters", e))?;
    let label = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let inputs = json!({ "name": label, "a": num(a), "b": num(b), "c": num(cc), "d": num(d), "anti_parallel": anti_parallel });
    let (bound, extra) = match name {
        CasebookName::Ghosh4 => {
            let r = casebook::ghosh4_negativity(&p)?;
            (r.report.clone(), json!({ "numeric": num(r.numeric), "closed_form": num(r.closed_form) }))
        }
        CasebookName::Ghosh3 => {
            let r = casebook::ghosh3_negativity(&p, anti_parallel)?;
            (
                r.report.clone(),
                json!({
                    "x": num(r.x),
                    "numeric": num(r.numeric),
                    "closed_form": num(r.closed_form),
                    "printed_form": num(r.printed_form),
                    "numeric_at_least_one": r.numeric_at_least_one,
                }),
            )
        }
        CasebookName::Maj4 => {
            let r = casebook::maj4_indistinguishability(&p)?;
            (
                r.report.clone(),
                json!({
                    "numeric_eigenvalues": nums(&r.numeric_eigenvalues),
                    "closed_form_eigenvalues": nums(&r.closed_form_eigenvalues),
                    "majorized": r.majorized,
                }),
            )
        }
        CasebookName::Maj3 => {
            let r = casebook::maj3_feasibility(&p)?;
            (r.report.clone(), json!({ "eigenvalues": nums(&r.eigenvalues), "majorized": r.majorized }))
        }
        CasebookName::Assisted => {
            let r = casebook::assisted_bound(&p)?;
            (
                r.report.clone(),
                json!({
                    "alpha2_bound": num(r.alpha2_bound),
                    "majorized_at_bound": r.majorized_at_bound,
                    "resource_entanglement": num(r.resource_entanglement),
                    "average_entanglement": num(r.average_entanglement),
                }),
            )
        }
        CasebookName::Preserve2 => {
            let r = casebook::preserve2_bound(&p)?;
            (
                r.report.clone(),
                json!({
                    "alpha2_bound": num(r.alpha2_bound),
                    "probabilities": nums(&[r.probabilities.0, r.probabilities.1]),
                    "det_reduced": num(r.det_reduced),
                    "second_schmidt": num(r.second_schmidt),
                    "concurrence_phi": num(r.concurrence_phi),
                    "concurrence_geometric_mean": num(r.concurrence_geometric_mean),
                }),
            )
        }
        CasebookName::Preserve4Product => {
            let r = casebook::preserve4_product_bound(&p)?;
            (
                r.report.clone(),
                json!({
                    "alpha2_bound": num(r.alpha2_bound),
                    "corner": nums(&[r.corner.0, r.corner.1]),
                    "grid_minimum": num(r.grid_minimum),
                    "amplitudes": nums(&r.amplitudes),
                    "second_schmidt": num(r.second_schmidt),
                }),
            )
        }
        CasebookName::Preserve4Bell => {
            let r = casebook::preserve4_bell_bound(&p)?;
            (
                r.report.clone(),
                json!({
                    "rhs": nums(&r.rhs),
                    "cost": num(r.cost),
                    "cut_singular_values": nums(&r.cut_singular_values),
                }),
            )
        }
    };
    let mut outputs = bound_json(&bound);
    if let (Value::Object(o), Value::Object(x)) = (&mut outputs, extra) {
        o.extend(x);
    }
    Ok(RunReport::new("casebook", tol, inputs).out(outputs).verdict("satisfied", bound.satisfied))
}

/// CSV with header `a2,c2,avg_entanglement,cost`.
pub fn figure1_csv(rows: &[casebook::Figure1Row]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a2", "c2", "avg_entanglement", "cost"]).map_err(|e| input_err("csv", e))?;
    for r in rows {
        w.write_record([r.a2, r.c2, r.avg_entanglement, r.cost].map(|x| round_sig(x).to_string()))
            .map_err(|e| input_err("csv", e))?;
    }
    let bytes = w.into_inner().map_err(|e| input_err("csv", e))?;
    String::from_utf8(bytes).map_err(|e| input_err("csv", e))
}

fn cmd_figure1(grid: usize, out: Option<&Path>, tol: f64) -> Result<Output, CliError> {
    if grid < 2 {
        return Err(CliError::Input(format!("--grid {grid} must be at least 2")));
    }
    let rows = casebook::figure1_scan(grid)?;
    let csv_text = figure1_csv(&rows)?;
    let Some(path) = out else { return Ok(Output::Text(csv_text)) };
    std::fs::write(path, &csv_text).map_err(|e| input_err(path.display(), e))?;
    let near = |avg: f64, cost: f64| rows.iter().any(|r| (r.avg_entanglement - avg).abs() <= 1e-9 && (r.cost - cost).abs() <= 1e-9);
    let dominates = rows.iter().all(|r| r.cost >= r.avg_entanglement - tol);
    Ok(Output::Report(
        RunReport::new("figure1", tol, json!({ "grid": grid, "out": path.display().to_string() }))
            .out(json!({ "rows": rows.len() }))
            .verdict("has_product_endpoint", near(0.0, 0.0))
            .verdict("has_bell_endpoint", near(1.0, 2.0))
            .verdict("cost_dominates_average", dominates),
    ))
}

fn cmd_random_state(dim_a: usize, dim_b: usize, out: Option<&Path>, seed: u64) -> Result<Output, CliError> {
    if dim_a == 0 || dim_b == 0 {
        return Err(CliError::Input("dimensions must be positive".into()));
    }
    let psi = PureState::new(random_state_vector(&mut rng(seed), dim_a * dim_b))?.with_dims(dim_a, dim_b);
    let text = serde_json::to_string(&StateFile::from_state(&psi.into())).map_err(|e| input_err("state", e))? + "\n";
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| input_err(path.display(), e))?;
            Ok(Output::Text(String::new()))
        }
        None => Ok(Output::Text(text)),
    }
}

/// Runs a parsed command with the given report tolerance.
pub fn execute(cli: &Cli, tol: f64) -> Result<Output, CliError> {
    let report = match &cli.command {
        Command::Helstrom { ensemble } => cmd_helstrom(ensemble, tol)?,
        Command::Uqsd { ensemble } => cmd_uqsd(ensemble, tol)?,
        Command::Qss { ensemble, targets, k } => cmd_qss(ensemble, targets, k, tol)?,
        Command::Majorize { x, y } => cmd_majorize(x, y, tol)?,
        Command::Nielsen { p1, q1 } => cmd_nielsen(*p1, *q1, tol)?,
        Command::Walgate { ensemble } => cmd_walgate(ensemble, tol)?,
        Command::Equidiag { matrix, dim } => cmd_equidiag(matrix.as_deref(), *dim, cli.seed, tol)?,
        Command::Casebook { name, a, b, c, d, anti_parallel } => cmd_casebook(*name, *a, *b, *c, *d, *anti_parallel, tol)?,
        Command::Figure1 { grid, out } => return cmd_figure1(*grid, out.as_deref(), tol),
        Command::RandomState { dim_a, dim_b, out } => return cmd_random_state(*dim_a, *dim_b, out.as_deref(), cli.seed),
    };
    Ok(Output::Report(report))
}

/// Result of a full invocation: text for standard output or error, and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

/// Parses arguments, reads `QSD_TOLERANCE` from `tolerance_env`, and runs.
pub fn run<I, T>(args: I, tolerance_env: Option<&str>) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let exit_code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if exit_code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Invocation { stdout, stderr, exit_code };
        }
    };
    let result = report_tolerance(tolerance_env).and_then(|tol| execute(&cli, tol));
    match result {
        Ok(Output::Report(r)) => {
            let stdout = if cli.json {
                serde_json::to_string_pretty(&r.to_json()).expect("serializable report") + "\n"
            } else {
                r.to_text()
            };
            Invocation { stdout, stderr: String::new(), exit_code: 0 }
        }
        Ok(Output::Text(t)) => Invocation { stdout: t, stderr: String::new(), exit_code: 0 },
        Err(e) => Invocation { stdout: String::new(), stderr: format!("error: {e}\n"), exit_code: e.exit_code() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1464466094067262), 0.146446609407);
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(-0.0).is_sign_positive());
        assert_eq!(round_sig(-123456.789012345), -123456.789012);
    }

    #[test]
    fn tolerance_env() {
        assert_eq!(report_tolerance(None).unwrap(), DEFAULT_REPORT_TOL);
        assert_eq!(report_tolerance(Some("1e-6")).unwrap(), 1e-6);
        assert!(matches!(report_tolerance(Some("abc")), Err(CliError::Input(_))));
        assert!(matches!(report_tolerance(Some("-1")), Err(CliError::Input(_))));
    }

    #[test]
    fn state_file_shapes() {
        let pure: StateFile = serde_json::from_str(r#"{"dims":[2,1],"amplitudes":[[1,0],[0,0]]}"#).unwrap();
        assert!(matches!(pure.to_state().unwrap(), State::Pure(_)));
        let mixed: StateFile = serde_json::from_str(r#"{"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
        assert!(matches!(mixed.to_state().unwrap(), State::Mixed(_)));
        let bad: StateFile = serde_json::from_str(r#"{"amplitudes":[[1,0],[1,0]]}"#).unwrap();
        assert!(matches!(bad.to_state(), Err(CliError::Input(_))));
    }

    #[test]
    fn usage_errors_exit_two() {
        let r = run(["qsd", "nielsen", "--p1"], None);
        assert_eq!(r.exit_code, 2);
        let r = run(["qsd", "--help"], None);
        assert_eq!(r.exit_code, 0);
    }

    #[test]
    fn library_errors_exit_one() {
        let r = run(["qsd", "nielsen", "--p1", "0.8", "--q1", "0.6"], None);
        assert_eq!(r.exit_code, 1, "{}", r.stderr);
    }
}
