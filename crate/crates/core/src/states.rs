//! Pure and mixed states, ensembles, purification, Schmidt decomposition and
//! entanglement monotones.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{
    c, hermitian_eig, kron_vec, norm, partial_trace, partial_transpose, svd, trace_norm, ComplexMatrix,
    Subsystem, ONE, ZERO,
};

/// Tolerance for normalization, Hermiticity, positivity and trace checks.
pub const STATE_TOL: f64 = 1e-10;

/// Schmidt coefficients at or below this value do not count towards the rank.
pub const SCHMIDT_RANK_TOL: f64 = 1e-12;

/// Normalized amplitude vector, optionally split into two tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: Option<(usize, usize)>,
}

impl PureState {
    /// Single-system state; fails unless `Σ|a|² = 1` within tolerance.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch("empty amplitude vector".into()));
        }
        if let Some(k) = amplitudes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes, dims: None })
    }

    /// Bipartite state on `C^dA ⊗ C^dB`.
    pub fn bipartite(amplitudes: Vec<Complex64>, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims ({d_a},{d_b})",
                amplitudes.len()
            )));
        }
        Ok(Self::new(amplitudes)?.with_dims(d_a, d_b))
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    /// Real amplitudes, rescaled to unit norm.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩` in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index {k} out of range for dimension {n}");
        let mut v = vec![ZERO; n];
        v[k] = ONE;
        Self { amplitudes: v, dims: None }
    }

    /// Product state `a ⊗ b`, split as (dim a, dim b).
    pub fn product(a: &PureState, b: &PureState) -> Self {
        Self { amplitudes: kron_vec(&a.amplitudes, &b.amplitudes), dims: Some((a.dim(), b.dim())) }
    }

    /// Replaces the bipartite split; panics if it does not factor the length.
    pub fn with_dims(mut self, d_a: usize, d_b: usize) -> Self {
        assert_eq!(d_a * d_b, self.amplitudes.len(), "dims must factor the state length");
        self.dims = Some((d_a, d_b));
        self
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn require_dims(&self) -> Result<(usize, usize)> {
        self.dims.ok_or(Error::MissingDims)
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        crate::numkernel::inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator { matrix: self.projector(), dims: self.dims }
    }

    /// `dA x dB` coefficient matrix with entries `ψ[i*dB + j]`.
    pub fn coefficient_matrix(&self) -> Result<ComplexMatrix> {
        let (d_a, d_b) = self.require_dims()?;
        ComplexMatrix::new(d_a, d_b, self.amplitudes.clone())
    }

    /// Reduced density operator after tracing out `over`.
    pub fn reduced(&self, over: Subsystem) -> Result<ComplexMatrix> {
        let (d_a, d_b) = self.require_dims()?;
        partial_trace(&self.projector(), d_a, d_b, over)
    }
}

/// Validated density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: Option<(usize, usize)>,
}

impl DensityOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Attaches a bipartite split.
    pub fn with_dims(mut self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return Err(Error::DimensionMismatch(format!("dims ({d_a},{d_b}) for dimension {}", self.dim())));
        }
        self.dims = Some((d_a, d_b));
        Ok(self)
    }

    /// Wraps a matrix already known to be a density operator (e.g. a convex
    /// mixture of projectors or a permutation of one).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix, dims: None }
    }

    /// Maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64), dims: None }
    }

    /// Eigenvalues in descending order.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix).expect("density operators are Hermitian").eigenvalues
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Checks a matrix is a density operator: Hermitian, then positive, then unit trace.
pub fn validate_density(m: &ComplexMatrix) -> Result<DensityOperator> {
    m.require_square()?;
    let dev = m.hermitian_deviation();
    if dev > STATE_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let min = hermitian_eig(m)?.min_eigenvalue();
    if min < -STATE_TOL {
        return Err(Error::NotPsd(min));
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > STATE_TOL {
        return Err(Error::TraceNotOne(tr));
    }
    Ok(DensityOperator { matrix: m.clone(), dims: None })
}

/// Either kind of state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(p) => p.dim(),
            State::Mixed(m) => m.dim(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            State::Pure(p) => p.to_density(),
            State::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(p) => Some(p),
            State::Mixed(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityOperator> for State {
    fn from(m: DensityOperator) -> Self {
        State::Mixed(m)
    }
}

/// Finite list of `(probability, state)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    items: Vec<(f64, State)>,
}

/// Checks probabilities are finite, nonnegative and sum to one.
pub fn check_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidProbabilities("empty".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidProbabilities(format!("entry {p} is not a nonnegative number")));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidProbabilities(format!("sum is {s}")));
    }
    Ok(())
}

impl Ensemble {
    pub fn new(items: Vec<(f64, State)>) -> Result<Self> {
        check_probabilities(&items.iter().map(|(p, _)| *p).collect::<Vec<_>>())?;
        Ok(Self { items })
    }

    pub fn pure(items: Vec<(f64, PureState)>) -> Result<Self> {
        Self::new(items.into_iter().map(|(p, s)| (p, State::Pure(s))).collect())
    }

    pub fn items(&self) -> &[(f64, State)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.items.iter().map(|(p, _)| *p).collect()
    }

    /// Common dimension of all members.
    pub fn dim(&self) -> Result<usize> {
        let d = self.items[0].1.dim();
        if let Some((_, s)) = self.items.iter().find(|(_, s)| s.dim() != d) {
            return Err(Error::DimensionMismatch(format!("ensemble mixes dimensions {d} and {}", s.dim())));
        }
        Ok(d)
    }

    /// Same states with new probabilities.
    pub fn with_probabilities(&self, probs: &[f64]) -> Result<Self> {
        if probs.len() != self.items.len() {
            return Err(Error::DimensionMismatch(format!("{} probabilities for {} states", probs.len(), self.len())));
        }
        Self::new(probs.iter().zip(&self.items).map(|(&p, (_, s))| (p, s.clone())).collect())
    }
}

/// `ρ = Σ p_i ρ_i`, projecting pure members first.
pub fn density_from_ensemble(e: &Ensemble) -> Result<DensityOperator> {
    let d = e.dim()?;
    let mut m = ComplexMatrix::zeros(d, d);
    for (p, s) in e.items() {
        m = &m + &s.density().matrix.scale_real(*p);
    }
    let first_dims = match &e.items()[0].1 {
        State::Pure(p) => p.dims(),
        State::Mixed(r) => r.dims(),
    };
    let mut rho = validate_density(&m)?;
    rho.dims = first_dims;
    Ok(rho)
}

/// Canonical purification `Σ √w_k |v_k⟩ ⊗ |k⟩` in descending eigenvalue order.
pub fn purify(rho: &DensityOperator) -> PureState {
    let d = rho.dim();
    let eig = hermitian_eig(&rho.matrix).expect("density operators are Hermitian");
    let mut amps = vec![ZERO; d * d];
    for (k, &w) in eig.eigenvalues.iter().enumerate() {
        let s = w.max(0.0).sqrt();
        for i in 0..d {
            amps[i * d + k] = eig.eigenvectors[(i, k)] * s;
        }
    }
    let n = norm(&amps);
    PureState { amplitudes: amps.into_iter().map(|z| z / n).collect(), dims: Some((d, d)) }
}

/// `ψ = Σ_k λ_k |a_k⟩ ⊗ |b_k⟩` with descending nonnegative `λ_k`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// `dA x k` matrix of orthonormal columns.
    pub left_basis: ComplexMatrix,
    /// `dB x k` matrix of orthonormal columns.
    pub right_basis: ComplexMatrix,
}

impl SchmidtDecomposition {
    /// Number of coefficients above the rank threshold.
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&l| l > SCHMIDT_RANK_TOL).count()
    }

    pub fn is_product(&self) -> bool {
        self.rank() == 1
    }

    /// Squared coefficients: the spectrum of either reduced state.
    pub fn squared(&self) -> Vec<f64> {
        self.coefficients.iter().map(|l| l * l).collect()
    }

    pub fn reconstruct(&self) -> Vec<Complex64> {
        let d_a = self.left_basis.rows();
        let d_b = self.right_basis.rows();
        let mut out = vec![ZERO; d_a * d_b];
        for (k, &l) in self.coefficients.iter().enumerate() {
            let term = kron_vec(&self.left_basis.column(k), &self.right_basis.column(k));
            for (o, t) in out.iter_mut().zip(term) {
                *o += t * l;
            }
        }
        out
    }
}

/// Schmidt decomposition from the SVD of the coefficient matrix.
pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtDecomposition> {
    let s = svd(&psi.coefficient_matrix()?);
    Ok(SchmidtDecomposition {
        coefficients: s.singular_values,
        left_basis: s.u,
        right_basis: s.vh.transpose(),
    })
}

/// Shannon entropy in bits, ignoring zero entries.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Binary entropy `H(x, 1 - x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy(&[x, 1.0 - x])
}

/// Entropy of entanglement in ebits.
pub fn entanglement_entropy(psi: &PureState) -> Result<f64> {
    Ok(shannon_entropy(&schmidt_decompose(psi)?.squared()))
}

fn sigma_yy() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 3)] = c(-1.0, 0.0);
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 0)] = c(-1.0, 0.0);
    m
}

/// Two-qubit concurrence `max(0, λ1 - λ2 - λ3 - λ4)`, with `λ_i` the descending
/// eigenvalues of `√(√ρ ρ̃ √ρ)` and `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
///
/// The `λ_i` are computed as singular values of `√ρ (σy⊗σy) √ρ*`, which avoids
/// taking square roots of rounding noise in the spectrum of `√ρ ρ̃ √ρ`.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("concurrence needs a two-qubit state, got dimension {}", rho.dim())));
    }
    let eig = hermitian_eig(&rho.matrix)?;
    let sq = eig.reconstruct_with(|x| if x > 1e-14 { x.sqrt() } else { 0.0 });
    let lam = svd(&(&(&sq * &sigma_yy()) * &sq.conj())).singular_values;
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// Logarithmic negativity `log2 ‖ρ^{T_A}‖₁` across the stored or given split.
pub fn log_negativity(rho: &DensityOperator, dims: Option<(usize, usize)>) -> Result<f64> {
    let (d_a, d_b) = dims.or(rho.dims).ok_or(Error::MissingDims)?;
    let pt = partial_transpose(&rho.matrix, d_a, d_b)?;
    Ok(trace_norm(&pt)?.log2().max(0.0))
}

/// Bell states `(|00⟩ ± |11⟩)/√2` and `(|01⟩ ± |10⟩)/√2`.
pub fn bell_state(which: BellState) -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match which {
        BellState::PhiPlus => [h, 0.0, 0.0, h],
        BellState::PhiMinus => [h, 0.0, 0.0, -h],
        BellState::PsiPlus => [0.0, h, h, 0.0],
        BellState::PsiMinus => [0.0, h, -h, 0.0],
    };
    PureState { amplitudes: amps.iter().map(|&x| c(x, 0.0)).collect(), dims: Some((2, 2)) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::kron;
    use crate::random::{random_density, random_state_vector, random_unitary, rng};
    use proptest::prelude::*;

    fn two_qubit(a: f64, b: f64) -> PureState {
        PureState::bipartite(vec![c(a, 0.0), ZERO, ZERO, c(b, 0.0)], 2, 2).unwrap()
    }

    #[test]
    fn pure_state_requires_normalization() {
        assert!(matches!(PureState::new(vec![ONE, ONE]), Err(Error::NotNormalized(_))));
        assert!(PureState::bipartite(vec![ONE, ZERO, ZERO], 2, 2).is_err());
    }

    #[test]
    fn ensemble_to_density_examples() {
        let e = Ensemble::pure(vec![(1.0, PureState::basis(2, 0))]).unwrap();
        assert_eq!(density_from_ensemble(&e).unwrap().matrix(), &PureState::basis(2, 0).projector());

        let half = ComplexMatrix::from_diag(&[0.5, 0.5]);
        let e = Ensemble::pure(vec![(0.5, PureState::basis(2, 0)), (0.5, PureState::basis(2, 1))]).unwrap();
        assert!(density_from_ensemble(&e).unwrap().matrix().max_abs_diff(&half) < 1e-15);

        let plus = PureState::from_real(&[1.0, 1.0]).unwrap();
        let minus = PureState::from_real(&[1.0, -1.0]).unwrap();
        let e = Ensemble::pure(vec![(0.5, plus), (0.5, minus)]).unwrap();
        assert!(density_from_ensemble(&e).unwrap().matrix().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn ensemble_rejects_bad_input() {
        let e = Ensemble::pure(vec![(0.5, PureState::basis(2, 0)), (0.5, PureState::basis(3, 0))]).unwrap();
        assert!(matches!(density_from_ensemble(&e), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            Ensemble::pure(vec![(0.7, PureState::basis(2, 0)), (0.7, PureState::basis(2, 1))]),
            Err(Error::InvalidProbabilities(_))
        ));
        assert!(Ensemble::pure(vec![(-0.5, PureState::basis(2, 0)), (1.5, PureState::basis(2, 1))]).is_err());
    }

    #[test]
    fn validation_examples() {
        assert!(validate_density(&ComplexMatrix::from_diag(&[0.5, 0.5])).is_ok());
        match validate_density(&ComplexMatrix::from_diag(&[1.5, -0.5])) {
            Err(Error::NotPsd(x)) => assert!((x + 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(validate_density(&ComplexMatrix::from_diag(&[0.6, 0.6])), Err(Error::TraceNotOne(_))));
        let m = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(validate_density(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn purification_examples() {
        let mixed = DensityOperator::maximally_mixed(2);
        let psi = purify(&mixed);
        assert!((entanglement_entropy(&psi).unwrap() - 1.0).abs() < 1e-12);
        assert!(psi.reduced(Subsystem::B).unwrap().max_abs_diff(mixed.matrix()) < 1e-12);

        let pure = PureState::basis(2, 0).to_density();
        assert_eq!(schmidt_decompose(&purify(&pure)).unwrap().rank(), 1);

        let mut r = rng(21);
        let rho = validate_density(&random_density(&mut r, 3)).unwrap();
        let psi = purify(&rho);
        assert!(psi.reduced(Subsystem::B).unwrap().max_abs_diff(rho.matrix()) <= 1e-10);
    }

    #[test]
    fn schmidt_examples() {
        let bell = bell_state(BellState::PhiPlus);
        let s = schmidt_decompose(&bell).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.coefficients[0] - h).abs() < 1e-14 && (s.coefficients[1] - h).abs() < 1e-14);

        let s = schmidt_decompose(&PureState::basis(4, 1).with_dims(2, 2)).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.is_product());

        let s = schmidt_decompose(&two_qubit(0.8, 0.6)).unwrap();
        assert!((s.coefficients[0] - 0.8).abs() < 1e-14 && (s.coefficients[1] - 0.6).abs() < 1e-14);

        assert!(matches!(schmidt_decompose(&PureState::basis(4, 0)), Err(Error::MissingDims)));
    }

    #[test]
    fn entropy_examples() {
        assert!((entanglement_entropy(&bell_state(BellState::PsiMinus)).unwrap() - 1.0).abs() < 1e-12);
        assert!(entanglement_entropy(&PureState::basis(4, 0).with_dims(2, 2)).unwrap().abs() < 1e-12);
        let psi = two_qubit(0.8f64.sqrt(), 0.2f64.sqrt());
        let oracle: f64 = [0.8f64, 0.2].iter().map(|x| -x * x.log2()).sum();
        assert!((entanglement_entropy(&psi).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&bell_state(BellState::PhiPlus).to_density()).unwrap() - 1.0).abs() < 1e-12);
        assert!(concurrence(&PureState::basis(4, 2).to_density()).unwrap() < 1e-12);
        assert!((concurrence(&two_qubit(0.8, 0.6).to_density()).unwrap() - 0.96).abs() < 1e-12);
        assert!(concurrence(&DensityOperator::maximally_mixed(4)).unwrap() < 1e-12);
        assert!(concurrence(&DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn log_negativity_examples() {
        let product = PureState::product(&PureState::basis(2, 0), &PureState::from_real(&[1.0, 1.0]).unwrap());
        assert!(log_negativity(&product.to_density(), None).unwrap().abs() < 1e-12);
        assert!((log_negativity(&bell_state(BellState::PhiPlus).to_density(), None).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(log_negativity(&DensityOperator::maximally_mixed(4), None), Err(Error::MissingDims)));
    }

    #[test]
    fn concurrence_matches_pure_formula_on_grid() {
        for k in 0..50 {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 49.0;
            let (a, b) = (theta.cos(), theta.sin());
            let cval = concurrence(&two_qubit(a, b).to_density()).unwrap();
            assert!((cval - 2.0 * a * b).abs() <= 1e-10, "a={a} b={b} c={cval}");
        }
    }

    proptest! {
        #[test]
        fn reduced_spectra_agree(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
            let mut r = rng(seed);
            let psi = PureState::bipartite(random_state_vector(&mut r, da * db), da, db).unwrap();
            let ea = hermitian_eig(&psi.reduced(Subsystem::B).unwrap()).unwrap().eigenvalues;
            let eb = hermitian_eig(&psi.reduced(Subsystem::A).unwrap()).unwrap().eigenvalues;
            for k in 0..da.min(db) {
                prop_assert!((ea[k] - eb[k]).abs() <= 1e-10);
            }
            let s = schmidt_decompose(&psi).unwrap();
            prop_assert!((s.squared().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
            prop_assert!(s.left_basis.unitarity_deviation() <= 1e-10);
            prop_assert!(s.right_basis.unitarity_deviation() <= 1e-10);
            let rec = s.reconstruct();
            prop_assert!(rec.iter().zip(psi.amplitudes()).all(|(x, y)| (x - y).norm() <= 1e-10));
        }

        #[test]
        fn entropy_is_local_unitary_invariant(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
            let mut r = rng(seed);
            let psi = PureState::bipartite(random_state_vector(&mut r, da * db), da, db).unwrap();
            let u = kron(&random_unitary(&mut r, da), &random_unitary(&mut r, db));
            let rotated = PureState::bipartite(u.apply(psi.amplitudes()).unwrap(), da, db).unwrap();
            let e0 = entanglement_entropy(&psi).unwrap();
            let e1 = entanglement_entropy(&rotated).unwrap();
            prop_assert!((e0 - e1).abs() <= 1e-10);
            prop_assert!(e0 >= -1e-12 && e0 <= (da.min(db) as f64).log2() + 1e-12);
        }

        #[test]
        fn product_states_have_zero_negativity(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
            let mut r = rng(seed);
            let a = PureState::new(random_state_vector(&mut r, da)).unwrap();
            let b = PureState::new(random_state_vector(&mut r, db)).unwrap();
            let rho = PureState::product(&a, &b).to_density();
            prop_assert!(log_negativity(&rho, None).unwrap() <= 1e-10);
        }
    }
}
