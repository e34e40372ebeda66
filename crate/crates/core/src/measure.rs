//! Kraus measurements and POVMs: outcome statistics, post-measurement states,
//! forgetful measurements and Bayesian updates of ensembles.

use crate::error::{Error, Result};
use crate::numkernel::{hermitian_eig, ComplexMatrix};
use crate::states::{validate_density, DensityOperator, Ensemble, State};

/// Tolerance on `‖Σ E − I‖_max`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Outcomes with probability at or below this have no posterior state.
pub const ZERO_PROBABILITY: f64 = 1e-12;

const CLAMP_TOL: f64 = 1e-10;

/// Anything that assigns effects (POVM elements) to labeled outcomes.
pub trait OutcomeStatistics {
    fn labels(&self) -> &[String];

    /// Effects `E_m`, one per label.
    fn effects(&self) -> Vec<ComplexMatrix>;

    fn dim(&self) -> usize;

    fn index_of(&self, label: &str) -> Result<usize> {
        self.labels().iter().position(|l| l == label).ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|k| k.to_string()).collect()
}

fn check_operators(labels: &[String], ops: &[ComplexMatrix]) -> Result<usize> {
    if ops.is_empty() {
        return Err(Error::DimensionMismatch("a measurement needs at least one operator".into()));
    }
    if labels.len() != ops.len() {
        return Err(Error::DimensionMismatch(format!("{} labels for {} operators", labels.len(), ops.len())));
    }
    let d = ops[0].require_square()?;
    for op in ops {
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch(format!("operator {}x{} in a {d}-dimensional measurement", op.rows(), op.cols())));
        }
    }
    Ok(d)
}

fn completeness_residual(effects: &[ComplexMatrix]) -> f64 {
    let d = effects[0].rows();
    let mut sum = ComplexMatrix::zeros(d, d);
    for e in effects {
        sum = &sum + e;
    }
    sum.max_abs_diff(&ComplexMatrix::identity(d))
}

/// Labeled Kraus operators `M_m` with `Σ M†M = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    labels: Vec<String>,
    operators: Vec<ComplexMatrix>,
}

impl Measurement {
    pub fn new(labels: Vec<String>, operators: Vec<ComplexMatrix>) -> Result<Self> {
        check_operators(&labels, &operators)?;
        let m = Self { labels, operators };
        let residual = m.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteMeasurement(residual));
        }
        Ok(m)
    }

    /// Operators labeled `"0"`, `"1"`, ...
    pub fn unlabeled(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(default_labels(operators.len()), operators)
    }

    /// Projective measurement onto the given orthonormal vectors, completed by
    /// `I − Σ P` when they do not span the space.
    pub fn projective(vectors: &[Vec<num_complex::Complex64>]) -> Result<Self> {
        let mut ops: Vec<ComplexMatrix> = vectors.iter().map(|v| ComplexMatrix::projector(v)).collect();
        let d = ops.first().map(|p| p.rows()).ok_or_else(|| Error::DimensionMismatch("no vectors".into()))?;
        if vectors.len() < d {
            let mut rest = ComplexMatrix::identity(d);
            for p in &ops {
                rest = &rest - p;
            }
            ops.push(rest);
        }
        Self::unlabeled(ops)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn operator(&self, label: &str) -> Result<&ComplexMatrix> {
        Ok(&self.operators[self.index_of(label)?])
    }

    /// `‖Σ M†M − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.effects())
    }

    pub fn to_povm(&self) -> Povm {
        Povm { labels: self.labels.clone(), elements: self.effects() }
    }
}

impl OutcomeStatistics for Measurement {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn effects(&self) -> Vec<ComplexMatrix> {
        self.operators.iter().map(|m| &m.adjoint() * m).collect()
    }

    fn dim(&self) -> usize {
        self.operators[0].rows()
    }
}

/// Labeled POVM elements: Hermitian, positive semidefinite, summing to `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    labels: Vec<String>,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(labels: Vec<String>, elements: Vec<ComplexMatrix>) -> Result<Self> {
        check_operators(&labels, &elements)?;
        for e in &elements {
            let min = hermitian_eig(e)?.min_eigenvalue();
            if min < -CLAMP_TOL {
                return Err(Error::NotPsd(min));
            }
        }
        let residual = completeness_residual(&elements);
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteMeasurement(residual));
        }
        Ok(Self { labels, elements })
    }

    pub fn unlabeled(elements: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(default_labels(elements.len()), elements)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.elements)
    }
}

impl OutcomeStatistics for Povm {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn effects(&self) -> Vec<ComplexMatrix> {
        self.elements.clone()
    }

    fn dim(&self) -> usize {
        self.elements[0].rows()
    }
}

/// A measurement given either by Kraus operators or by POVM elements only.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMeasurement {
    Kraus(Measurement),
    Povm(Povm),
}

impl AnyMeasurement {
    /// Post-measurement state; only Kraus measurements define one.
    pub fn posterior_state(&self, rho: &DensityOperator, label: &str) -> Result<DensityOperator> {
        match self {
            AnyMeasurement::Kraus(m) => posterior_state(m, rho, label),
            AnyMeasurement::Povm(_) => Err(Error::PosteriorFromPovm),
        }
    }

    pub fn as_povm(&self) -> Povm {
        match self {
            AnyMeasurement::Kraus(m) => m.to_povm(),
            AnyMeasurement::Povm(p) => p.clone(),
        }
    }
}

impl OutcomeStatistics for AnyMeasurement {
    fn labels(&self) -> &[String] {
        match self {
            AnyMeasurement::Kraus(m) => m.labels(),
            AnyMeasurement::Povm(p) => p.labels(),
        }
    }

    fn effects(&self) -> Vec<ComplexMatrix> {
        match self {
            AnyMeasurement::Kraus(m) => m.effects(),
            AnyMeasurement::Povm(p) => p.effects(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            AnyMeasurement::Kraus(m) => m.dim(),
            AnyMeasurement::Povm(p) => p.dim(),
        }
    }
}

fn check_dim(m: &impl OutcomeStatistics, rho: &ComplexMatrix) -> Result<()> {
    if m.dim() != rho.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional measurement on a {}-dimensional state",
            m.dim(),
            rho.rows()
        )));
    }
    Ok(())
}

/// `Tr(E ρ)` without clamping.
pub fn raw_probability(effect: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    let n = rho.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (effect[(i, j)] * rho[(j, i)]).re;
        }
    }
    s
}

fn clamp_probability(p: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + CLAMP_TOL {
        1.0
    } else {
        p
    }
}

/// Outcome probabilities `p_m = Tr(E_m ρ)` in label order.
pub fn outcome_probabilities(m: &impl OutcomeStatistics, rho: &DensityOperator) -> Result<Vec<f64>> {
    check_dim(m, rho.matrix())?;
    Ok(m.effects().iter().map(|e| clamp_probability(raw_probability(e, rho.matrix()))).collect())
}

/// Post-measurement state `M ρ M† / Tr(M†M ρ)` for the outcome `label`.
pub fn posterior_state(m: &Measurement, rho: &DensityOperator, label: &str) -> Result<DensityOperator> {
    check_dim(m, rho.matrix())?;
    let op = m.operator(label)?;
    let unnormalized = &(op * rho.matrix()) * &op.adjoint();
    let p = unnormalized.trace().re;
    if p <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { label: label.to_string(), probability: p });
    }
    let post = validate_density(&unnormalized.hermitian_part().scale_real(1.0 / p))?;
    match rho.dims() {
        Some((a, b)) => post.with_dims(a, b),
        None => Ok(post),
    }
}

/// State after measuring and discarding the outcome, `Σ M ρ M†`.
pub fn forgetful_apply(m: &Measurement, rho: &DensityOperator) -> Result<DensityOperator> {
    check_dim(m, rho.matrix())?;
    let residual = m.completeness_residual();
    if residual > COMPLETENESS_TOL {
        return Err(Error::IncompleteMeasurement(residual));
    }
    let d = rho.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    for op in m.operators() {
        sum = &sum + &(&(op * rho.matrix()) * &op.adjoint());
    }
    let out = validate_density(&sum.hermitian_part())?;
    match rho.dims() {
        Some((a, b)) => out.with_dims(a, b),
        None => Ok(out),
    }
}

/// Updates ensemble priors on observing `label`: `p(i|m) = p(m|i) p_i / p_m`.
pub fn bayes_posterior(prior: &Ensemble, m: &impl OutcomeStatistics, label: &str) -> Result<Ensemble> {
    let k = m.index_of(label)?;
    let effect = &m.effects()[k];
    let mut joint = Vec::with_capacity(prior.len());
    for (p, state) in prior.items() {
        let rho = state_matrix(state);
        check_dim(m, &rho)?;
        joint.push(p * clamp_probability(raw_probability(effect, &rho)).max(0.0));
    }
    let total: f64 = joint.iter().sum();
    if total <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { label: label.to_string(), probability: total });
    }
    prior.with_probabilities(&joint.iter().map(|j| j / total).collect::<Vec<_>>())
}

fn state_matrix(state: &State) -> ComplexMatrix {
    state.density().into_matrix()
}
