//! Single-system discrimination: perfect, minimum-error (Helstrom),
//! unambiguous (IDP) and quantum state separation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{outcome_probabilities, AnyMeasurement, Measurement, OutcomeStatistics, Povm};
use crate::numkernel::{c, determinant, hermitian_eig, inner, inverse, psd_sqrt, trace_norm, ComplexMatrix, ZERO};
use crate::states::{check_probabilities, DensityOperator, Ensemble, PureState};

/// Overlap magnitude below which states count as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Gram determinants below this reject a set as linearly dependent.
pub const GRAM_DET_TOL: f64 = 1e-12;

/// Tolerance of the minimum-error optimality conditions.
pub const OPTIMALITY_TOL: f64 = 1e-8;

/// Tolerance on eigenvalues when checking separation feasibility.
pub const QSS_TOL: f64 = 1e-9;

/// Eigenvalues of `Λ` below `-HELSTROM_ZERO` go to the first guess.
const HELSTROM_ZERO: f64 = 1e-12;

/// Label of the inconclusive outcome.
pub const INCONCLUSIVE: &str = "?";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Perfect,
    MinError,
    Unambiguous,
    Qss,
}

/// Outcome split for one input state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateStats {
    pub success: f64,
    pub error: f64,
    pub inconclusive: f64,
}

/// Measurement plus its averaged and per-state performance.
///
/// Outcome `"k"` (1-based) guesses state `k`; `"?"` is inconclusive.
#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    pub strategy: Strategy,
    pub measurement: AnyMeasurement,
    pub error_probability: f64,
    pub failure_probability: f64,
    pub per_state_stats: Vec<StateStats>,
}

fn guess_label(k: usize) -> String {
    (k + 1).to_string()
}

/// Per-state statistics and averages of `m` on the weighted states.
fn evaluate(
    strategy: Strategy,
    measurement: AnyMeasurement,
    priors: &[f64],
    states: &[DensityOperator],
) -> Result<DiscriminationResult> {
    let labels: Vec<String> = measurement.labels().to_vec();
    let mut per_state_stats = Vec::with_capacity(states.len());
    let (mut err, mut fail) = (0.0, 0.0);
    for (k, (p, rho)) in priors.iter().zip(states).enumerate() {
        let probs = outcome_probabilities(&measurement, rho)?;
        let mut s = StateStats { success: 0.0, error: 0.0, inconclusive: 0.0 };
        for (label, q) in labels.iter().zip(probs) {
            if *label == guess_label(k) {
                s.success += q;
            } else if (1..=states.len()).any(|j| *label == guess_label(j - 1)) {
                s.error += q;
            } else {
                s.inconclusive += q;
            }
        }
        err += p * s.error;
        fail += p * s.inconclusive;
        per_state_stats.push(s);
    }
    Ok(DiscriminationResult {
        strategy,
        measurement,
        error_probability: err.clamp(0.0, 1.0),
        failure_probability: fail.clamp(0.0, 1.0),
        per_state_stats,
    })
}

fn common_dim(states: &[PureState]) -> Result<usize> {
    let d = states.first().ok_or_else(|| Error::DimensionMismatch("no states".into()))?.dim();
    if let Some(s) = states.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch(format!("states of dimension {d} and {}", s.dim())));
    }
    Ok(d)
}

/// Projective measurement identifying mutually orthogonal states, completed by `I − Σ P`.
pub fn perfect_discrimination(states: &[PureState]) -> Result<DiscriminationResult> {
    let d = common_dim(states)?;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            let o = a.overlap(b).norm();
            if o > ORTHOGONALITY_TOL {
                return Err(Error::NotOrthogonal(o));
            }
        }
    }
    let mut ops: Vec<ComplexMatrix> = states.iter().map(PureState::projector).collect();
    let mut labels: Vec<String> = (0..states.len()).map(guess_label).collect();
    let mut rest = ComplexMatrix::identity(d);
    for p in &ops {
        rest = &rest - p;
    }
    if states.len() < d {
        ops.push(rest);
        labels.push("0".into());
    }
    let n = states.len() as f64;
    let priors = vec![1.0 / n; states.len()];
    let rhos: Vec<DensityOperator> = states.iter().map(PureState::to_density).collect();
    evaluate(Strategy::Perfect, AnyMeasurement::Kraus(Measurement::new(labels, ops)?), &priors, &rhos)
}

/// Helstrom measurement for two weighted density operators.
///
/// `E₁` projects onto eigenvectors of `Λ = p₂ρ₂ − p₁ρ₁` with negative eigenvalues,
/// `E₂` onto the rest (zero eigenvalues included).
pub fn helstrom_two_state(
    p1: f64,
    rho1: &DensityOperator,
    p2: f64,
    rho2: &DensityOperator,
) -> Result<DiscriminationResult> {
    check_probabilities(&[p1, p2])?;
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(format!("states of dimension {} and {}", rho1.dim(), rho2.dim())));
    }
    let lambda = helstrom_operator(p1, rho1, p2, rho2);
    let eig = hermitian_eig(&lambda)?;
    let d = rho1.dim();
    let (mut e1, mut e2) = (ComplexMatrix::zeros(d, d), ComplexMatrix::zeros(d, d));
    for (k, &v) in eig.eigenvalues.iter().enumerate() {
        let proj = ComplexMatrix::projector(&eig.eigenvector(k));
        if v < -HELSTROM_ZERO {
            e1 = &e1 + &proj;
        } else {
            e2 = &e2 + &proj;
        }
    }
    let m = Measurement::new(vec![guess_label(0), guess_label(1)], vec![e1, e2])?;
    let mut result = evaluate(Strategy::MinError, AnyMeasurement::Kraus(m), &[p1, p2], &[rho1.clone(), rho2.clone()])?;
    result.error_probability = helstrom_error(p1, rho1, p2, rho2)?;
    Ok(result)
}

/// `Λ = p₂ρ₂ − p₁ρ₁`.
pub fn helstrom_operator(p1: f64, rho1: &DensityOperator, p2: f64, rho2: &DensityOperator) -> ComplexMatrix {
    &rho2.matrix().scale_real(p2) - &rho1.matrix().scale_real(p1)
}

/// `½(1 − ‖p₂ρ₂ − p₁ρ₁‖₁)`.
pub fn helstrom_error(p1: f64, rho1: &DensityOperator, p2: f64, rho2: &DensityOperator) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(format!("states of dimension {} and {}", rho1.dim(), rho2.dim())));
    }
    let tn = trace_norm(&helstrom_operator(p1, rho1, p2, rho2))?;
    Ok((0.5 * (1.0 - tn)).clamp(0.0, 1.0))
}

/// `p₂ − Tr(Λ E₂)` for the second effect of a two-outcome measurement.
pub fn error_from_second_effect(p1: f64, rho1: &DensityOperator, p2: f64, rho2: &DensityOperator, e2: &ComplexMatrix) -> f64 {
    p2 - crate::measure::raw_probability(e2, &helstrom_operator(p1, rho1, p2, rho2))
}

/// Minimum error for two pure states: `½(1 − √(1 − 4p₁p₂|⟨ψ₁|ψ₂⟩|²))`.
pub fn helstrom_pure_bound(p1: f64, p2: f64, overlap: Complex64) -> f64 {
    let disc = (1.0 - 4.0 * p1 * p2 * overlap.norm_sqr()).max(0.0);
    0.5 * (1.0 - disc.sqrt())
}

/// Diagnostics of the minimum-error optimality conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    pub optimal: bool,
    /// Most negative eigenvalue over all `Γ − p_jρ_j`, with `Γ = Σ p_iρ_iE_i`.
    pub min_eigenvalue: f64,
    /// `‖Γ − Γ†‖_max`; `Γ` is Hermitian at an optimum.
    pub gamma_asymmetry: f64,
    /// Largest entry of `E_i(p_iρ_i − p_jρ_j)E_j` over all pairs.
    pub max_cross_term: f64,
}

/// Checks the necessary and sufficient conditions for a minimum-error POVM:
/// `Γ − p_jρ_j ≥ 0` for every `j` and `E_i(p_iρ_i − p_jρ_j)E_j = 0` for every pair.
pub fn verify_min_error_optimality(e: &Ensemble, povm: &Povm) -> Result<OptimalityReport> {
    if povm.elements().len() != e.len() {
        return Err(Error::DimensionMismatch(format!("{} POVM elements for {} states", povm.elements().len(), e.len())));
    }
    let d = e.dim()?;
    if povm.dim() != d {
        return Err(Error::DimensionMismatch(format!("{}-dimensional POVM for {d}-dimensional states", povm.dim())));
    }
    let weighted: Vec<ComplexMatrix> = e.items().iter().map(|(p, s)| s.density().matrix().scale_real(*p)).collect();
    let elements = povm.elements();
    let mut gamma = ComplexMatrix::zeros(d, d);
    for (w, el) in weighted.iter().zip(elements) {
        gamma = &gamma + &(w * el);
    }
    let gamma_asymmetry = gamma.hermitian_deviation();
    let gamma_h = gamma.hermitian_part();
    let mut min_eigenvalue = f64::INFINITY;
    for w in &weighted {
        min_eigenvalue = min_eigenvalue.min(hermitian_eig(&(&gamma_h - w))?.min_eigenvalue());
    }
    let mut max_cross_term: f64 = 0.0;
    for (i, ei) in elements.iter().enumerate() {
        for (j, ej) in elements.iter().enumerate() {
            let diff = &weighted[i] - &weighted[j];
            max_cross_term = max_cross_term.max((&(ei * &diff) * ej).max_abs());
        }
    }
    let optimal =
        min_eigenvalue >= -OPTIMALITY_TOL && gamma_asymmetry <= OPTIMALITY_TOL && max_cross_term <= OPTIMALITY_TOL;
    Ok(OptimalityReport { optimal, min_eigenvalue, gamma_asymmetry, max_cross_term })
}

fn projective_error(p1: f64, psi1: &[Complex64], p2: f64, psi2: &[Complex64], theta: f64, phi: f64) -> f64 {
    // |n⟩ guesses the first state, |n⊥⟩ the second.
    let n = [c((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)];
    let q1 = inner(&n, psi1).norm_sqr();
    let q2 = inner(&n, psi2).norm_sqr();
    p1 * (1.0 - q1) + p2 * q2
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Minimum error over projective qubit measurements, found by a Bloch-sphere
/// grid search refined with golden-section steps along each angle.
pub fn brute_force_min_error(e: &Ensemble, grid: usize) -> Result<f64> {
    if e.len() != 2 {
        return Err(Error::InvalidParameter(format!("expected two states, got {}", e.len())));
    }
    let pure: Vec<&PureState> = e
        .items()
        .iter()
        .map(|(_, s)| s.as_pure().ok_or_else(|| Error::InvalidParameter("expected pure states".into())))
        .collect::<Result<_>>()?;
    if pure.iter().any(|p| p.dim() != 2) {
        return Err(Error::InvalidParameter("expected qubit states".into()));
    }
    let grid = grid.max(4);
    let (p1, p2) = (e.items()[0].0, e.items()[1].0);
    let (a, b) = (pure[0].amplitudes(), pure[1].amplitudes());
    let f = |t: f64, ph: f64| projective_error(p1, a, p2, b, t, ph);
    let pi = std::f64::consts::PI;
    let (mut best, mut bt, mut bp) = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=grid {
        let t = pi * i as f64 / grid as f64;
        for j in 0..(2 * grid) {
            let ph = pi * j as f64 / grid as f64;
            let v = f(t, ph);
            if v < best {
                (best, bt, bp) = (v, t, ph);
            }
        }
    }
    let mut h = pi / grid as f64;
    for _ in 0..40 {
        bt = golden_section(|t| f(t, bp), bt - h, bt + h, 60);
        bp = golden_section(|ph| f(bt, ph), bp - h, bp + h, 60);
        best = best.min(f(bt, bp));
        h = (h * 0.7).max(1e-6);
    }
    Ok(best.clamp(0.0, 1.0))
}

/// Which measurement the unambiguous strategy uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UqsdRegime {
    /// Three-outcome POVM attaining `2√(p₁p₂)|⟨ψ₁|ψ₂⟩|`.
    Povm,
    /// Projects onto `ψ₁` as the inconclusive outcome; failure `p₁ + p₂s²`.
    ProjectiveFirst,
    /// Projects onto `ψ₂` as the inconclusive outcome; failure `p₂ + p₁s²`.
    ProjectiveSecond,
}

#[derive(Debug, Clone)]
pub struct UqsdResult {
    pub result: DiscriminationResult,
    pub regime: UqsdRegime,
    /// Individual failure probabilities `(p₁^F, p₂^F)`.
    pub individual_failures: (f64, f64),
}

/// Interval of `p₁` where the optimal POVM exists: `[s²/(1+s²), 1/(1+s²)]`.
pub fn uqsd_povm_interval(s: f64) -> (f64, f64) {
    let s2 = s * s;
    (s2 / (1.0 + s2), 1.0 / (1.0 + s2))
}

/// `2√(p₁p₂) s`.
pub fn idp_bound(p1: f64, p2: f64, s: f64) -> f64 {
    2.0 * (p1 * p2).sqrt() * s
}

/// Component of `a` orthogonal to the unit vector `b`, normalized.
fn orthogonal_part(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let o = inner(b, a);
    let v: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - o * y).collect();
    crate::numkernel::normalized(&v, 0.0).expect("independent states")
}

/// Optimal unambiguous discrimination of two pure states.
pub fn uqsd_two_state(p1: f64, psi1: &PureState, p2: f64, psi2: &PureState) -> Result<UqsdResult> {
    check_probabilities(&[p1, p2])?;
    let d = common_dim(&[psi1.clone(), psi2.clone()])?;
    let s = psi1.overlap(psi2).norm();
    let gram_det = 1.0 - s * s;
    if gram_det < GRAM_DET_TOL {
        return Err(Error::LinearlyDependent(gram_det));
    }
    let (lo, hi) = uqsd_povm_interval(s);
    let edge_tol = 1e-12;
    let (a, b) = (psi1.amplitudes(), psi2.amplitudes());
    let (regime, f1, f2, e1, e2) = if p1 >= lo - edge_tol && p1 <= hi + edge_tol {
        let (f1, f2) = if s == 0.0 { (0.0, 0.0) } else { (((p2 / p1).sqrt() * s).min(1.0), ((p1 / p2).sqrt() * s).min(1.0)) };
        let e1 = ComplexMatrix::projector(&orthogonal_part(a, b)).scale_real((1.0 - f1) / gram_det);
        let e2 = ComplexMatrix::projector(&orthogonal_part(b, a)).scale_real((1.0 - f2) / gram_det);
        (UqsdRegime::Povm, f1, f2, e1, e2)
    } else if p1 + p2 * s * s <= p2 + p1 * s * s {
        let e2 = &ComplexMatrix::identity(d) - &psi1.projector();
        (UqsdRegime::ProjectiveFirst, 1.0, s * s, ComplexMatrix::zeros(d, d), e2)
    } else {
        let e1 = &ComplexMatrix::identity(d) - &psi2.projector();
        (UqsdRegime::ProjectiveSecond, s * s, 1.0, e1, ComplexMatrix::zeros(d, d))
    };
    let ef = &(&ComplexMatrix::identity(d) - &e1) - &e2;
    let ef = psd_clean(&ef)?;
    let povm = Povm::new(vec![guess_label(0), guess_label(1), INCONCLUSIVE.into()], vec![e1, e2, ef])?;
    let result = evaluate(Strategy::Unambiguous, AnyMeasurement::Povm(povm), &[p1, p2], &[psi1.to_density(), psi2.to_density()])?;
    Ok(UqsdResult { result, regime, individual_failures: (f1, f2) })
}

/// Hermitian part with rounding-level negative eigenvalues removed.
fn psd_clean(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(&m.hermitian_part())?;
    if eig.min_eigenvalue() < -1e-9 {
        return Err(Error::NotPsd(eig.min_eigenvalue()));
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0)))
}

/// Gram matrix `A_ij = ⟨ψ_i|ψ_j⟩` of unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix(ComplexMatrix);

impl OverlapMatrix {
    /// Validates a Hermitian, unit-diagonal, positive semidefinite matrix.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.require_square()?;
        let dev = m.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        if let Some(z) = m.diagonal().iter().find(|z| (**z - c(1.0, 0.0)).norm() > 1e-10) {
            return Err(Error::InvalidParameter(format!("overlap matrix diagonal entry {z} is not 1")));
        }
        let min = hermitian_eig(&m)?.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::NotPsd(min));
        }
        Ok(Self(m))
    }

    pub fn from_states(states: &[PureState]) -> Result<Self> {
        common_dim(states)?;
        let n = states.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = states[i].overlap(&states[j]);
            }
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Biorthogonal partners `ψ_i^⊥ = Σ_j (A⁻¹)_{ji} ψ_j`, so that `⟨ψ_k|ψ_i^⊥⟩ = δ_ki`.
pub fn reciprocal_states(states: &[PureState]) -> Result<Vec<Vec<Complex64>>> {
    let a = OverlapMatrix::from_states(states)?;
    let det = determinant(a.matrix())?.re;
    if det < GRAM_DET_TOL {
        return Err(Error::LinearlyDependent(det));
    }
    let inv = inverse(a.matrix())?;
    let d = states[0].dim();
    Ok((0..states.len())
        .map(|i| {
            let mut v = vec![ZERO; d];
            for (j, s) in states.iter().enumerate() {
                let w = inv[(j, i)];
                for (x, y) in v.iter_mut().zip(s.amplitudes()) {
                    *x += w * y;
                }
            }
            v
        })
        .collect())
}

/// Feasibility of a separation `{ψ_i} → {ψ_i′}` with success matrix `K`.
#[derive(Debug, Clone)]
pub struct QssFeasibility {
    pub feasible: bool,
    /// `F = A − K∘A′`.
    pub f: ComplexMatrix,
    pub min_eigenvalue_k: f64,
    pub min_eigenvalue_f: f64,
}

/// Checks `K ≥ 0` and `F = A − K∘A′ ≥ 0`.
pub fn qss_feasibility(a: &OverlapMatrix, a_target: &OverlapMatrix, k: &ComplexMatrix) -> Result<QssFeasibility> {
    let f = a.matrix().try_sub(&k.hadamard(a_target.matrix())?)?;
    let min_eigenvalue_k = hermitian_eig(k)?.min_eigenvalue();
    let min_eigenvalue_f = hermitian_eig(&f)?.min_eigenvalue();
    Ok(QssFeasibility {
        feasible: min_eigenvalue_k >= -QSS_TOL && min_eigenvalue_f >= -QSS_TOL,
        f,
        min_eigenvalue_k,
        min_eigenvalue_f,
    })
}

/// Success operators of a separation and their performance.
#[derive(Debug, Clone)]
pub struct QssSuccess {
    /// `M_λ = Σ_i c_λi |ψ_i′⟩⟨ψ_i^⊥|`, one per nonzero eigenvalue of `K`.
    pub operators: Vec<ComplexMatrix>,
    /// `c_λi`, indexed `[λ][i]`.
    pub coefficients: Vec<Vec<Complex64>>,
    /// `√(I − Σ M†M)` when input and output spaces coincide.
    pub failure_operator: Option<ComplexMatrix>,
    /// Per-state success probabilities `K_ii`.
    pub per_state_success: Vec<f64>,
}

impl QssSuccess {
    /// `Σ p_i K_ii`.
    pub fn success_probability(&self, priors: &[f64]) -> f64 {
        priors.iter().zip(&self.per_state_success).map(|(p, k)| p * k).sum()
    }

    /// Full Kraus measurement: success operators then the failure operator.
    pub fn measurement(&self) -> Result<Measurement> {
        let fail = self
            .failure_operator
            .clone()
            .ok_or_else(|| Error::DimensionMismatch("input and output spaces differ".into()))?;
        let mut labels: Vec<String> = (0..self.operators.len()).map(|k| format!("s{k}")).collect();
        labels.push(INCONCLUSIVE.into());
        let mut ops = self.operators.clone();
        ops.push(fail);
        Measurement::new(labels, ops)
    }

    /// Separation summary: success `K_ii`, no error, failure `1 − K_ii`.
    pub fn to_result(&self, priors: &[f64]) -> Result<DiscriminationResult> {
        let per_state_stats: Vec<StateStats> = self
            .per_state_success
            .iter()
            .map(|&k| StateStats { success: k, error: 0.0, inconclusive: 1.0 - k })
            .collect();
        let success = self.success_probability(priors);
        Ok(DiscriminationResult {
            strategy: Strategy::Qss,
            measurement: AnyMeasurement::Kraus(self.measurement()?),
            error_probability: 0.0,
            failure_probability: (1.0 - success).clamp(0.0, 1.0),
            per_state_stats,
        })
    }
}

/// Builds success operators from the factorization `K_ij = Σ_λ conj(c_λi) c_λj`.
pub fn qss_success_operators(states: &[PureState], targets: &[PureState], k: &ComplexMatrix) -> Result<QssSuccess> {
    if states.len() != targets.len() || k.rows() != states.len() || k.cols() != states.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states, {} targets and a {}x{} matrix",
            states.len(),
            targets.len(),
            k.rows(),
            k.cols()
        )));
    }
    let d_out = common_dim(targets)?;
    let feas = qss_feasibility(&OverlapMatrix::from_states(states)?, &OverlapMatrix::from_states(targets)?, k)?;
    if !feas.feasible {
        return Err(Error::InfeasibleK(feas.min_eigenvalue_k.min(feas.min_eigenvalue_f)));
    }
    let recip = reciprocal_states(states)?;
    let d_in = states[0].dim();
    let eig = hermitian_eig(k)?;
    let mut operators = Vec::new();
    let mut coefficients = Vec::new();
    for (l, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu <= 1e-12 {
            continue;
        }
        let v = eig.eigenvector(l);
        let coef: Vec<Complex64> = v.iter().map(|z| z.conj() * mu.sqrt()).collect();
        let mut m = ComplexMatrix::zeros(d_out, d_in);
        for (i, ci) in coef.iter().enumerate() {
            m = &m + &ComplexMatrix::outer(targets[i].amplitudes(), &recip[i]).scale(*ci);
        }
        operators.push(m);
        coefficients.push(coef);
    }
    let failure_operator = if d_in == d_out {
        let mut rest = ComplexMatrix::identity(d_in);
        for m in &operators {
            rest = &rest - &(&m.adjoint() * m);
        }
        Some(psd_sqrt(&rest.hermitian_part(), QSS_TOL)?)
    } else {
        None
    };
    let per_state_success = (0..states.len()).map(|i| k[(i, i)].re).collect();
    Ok(QssSuccess { operators, coefficients, failure_operator, per_state_success })
}
