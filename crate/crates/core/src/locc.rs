//! LOCC constructions: equi-diagonalization, Walgate discrimination of two
//! orthogonal bipartite states, its nonorthogonal extension, the two-qubit
//! Nielsen conversion and distillation outcome statistics.

use num_complex::Complex64;

use crate::discriminate::helstrom_pure_bound;
use crate::error::{Error, Result};
use crate::measure::{outcome_probabilities, posterior_state, Measurement};
use crate::numkernel::{c, kron, norm, ComplexMatrix, ZERO};
use crate::states::{schmidt_decompose, PureState};

/// Residual accepted for equal diagonal entries.
pub const EQUIDIAG_TOL: f64 = 1e-9;

/// Unitary `U` with `U·M·U†` equi-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidiagResult {
    pub unitary: ComplexMatrix,
    pub transformed: ComplexMatrix,
    /// Largest diagonal magnitude of `transformed` (zero for traceless input).
    pub max_abs_diagonal: f64,
    /// Number of elementary 2×2 rotations applied.
    pub rotations: usize,
}

impl EquidiagResult {
    fn from_unitary(m: &ComplexMatrix, unitary: ComplexMatrix, rotations: usize) -> Self {
        let transformed = &(&unitary * m) * &unitary.adjoint();
        let max_abs_diagonal = transformed.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
        Self { unitary, transformed, max_abs_diagonal, rotations }
    }

    /// Largest difference between two diagonal entries of `transformed`.
    pub fn diagonal_spread(&self) -> f64 {
        let d = self.transformed.diagonal();
        d.iter().flat_map(|a| d.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max)
    }
}

/// `[[cos θ, sin θ e^{iφ}], [sin θ e^{−iφ}, −cos θ]]`.
pub fn rotation(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, co) = theta.sin_cos();
    ComplexMatrix::from_rows(&[
        vec![c(co, 0.0), Complex64::from_polar(s, phi)],
        vec![Complex64::from_polar(s, -phi), c(-co, 0.0)],
    ])
    .expect("2x2 rotation")
}

/// Angles `(θ, φ)` making the diagonal of `U(θ,φ)·M·U(θ,φ)†` equal.
///
/// `φ` makes `δ = x − t` and `w = y e^{−iφ} + z e^{iφ}` real multiples of
/// one direction; `θ` then solves `δ cos 2θ + w sin 2θ = 0`.
pub fn equidiag_angles(m: &ComplexMatrix) -> (f64, f64) {
    let (x, y, z, t) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let delta = x - t;
    let (sum, diff) = (z + y, z - y);
    let num = delta.im * sum.re - delta.re * sum.im;
    let den = delta.re * diff.re + delta.im * diff.im;
    let phi = if num == 0.0 && den == 0.0 { 0.0 } else { num.atan2(den) };
    let w = y * Complex64::from_polar(1.0, -phi) + z * Complex64::from_polar(1.0, phi);
    let u = if delta.norm() >= w.norm() { delta } else { w };
    if u.norm() == 0.0 {
        return (0.0, 0.0);
    }
    let u = u / u.norm();
    let a = (u.conj() * delta).re;
    let b = (u.conj() * w).re;
    (0.5 * a.atan2(-b), phi)
}

/// Equi-diagonalizes a 2×2 matrix. Input with equal diagonal keeps the identity.
pub fn equidiag_2x2(m: &ComplexMatrix) -> Result<EquidiagResult> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch(format!("expected 2x2, got {}x{}", m.rows(), m.cols())));
    }
    let delta = m[(0, 0)] - m[(1, 1)];
    if delta.norm() <= 1e-15 * m.max_abs().max(1.0) {
        return Ok(EquidiagResult::from_unitary(m, ComplexMatrix::identity(2), 0));
    }
    let (theta, phi) = equidiag_angles(m);
    Ok(EquidiagResult::from_unitary(m, rotation(theta, phi), 1))
}

/// `U` acting on levels `i < j` of an `n`-dimensional space, identity elsewhere.
fn embed_two_level(n: usize, i: usize, j: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let mut e = ComplexMatrix::identity(n);
    e[(i, i)] = u[(0, 0)];
    e[(i, j)] = u[(0, 1)];
    e[(j, i)] = u[(1, 0)];
    e[(j, j)] = u[(1, 1)];
    e
}

/// Equi-diagonalizes a `2ᵏ×2ᵏ` matrix with `k·2^{k−1}` two-level rotations.
///
/// Level `ℓ` pairs index `i` with `i + 2^{ℓ−1}` inside blocks of size `2^ℓ`,
/// so each level equalizes the averages of the blocks from the level below.
pub fn equidiag_power2(m: &ComplexMatrix) -> Result<EquidiagResult> {
    let n = m.require_square()?;
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n == 1 {
        return Ok(EquidiagResult::from_unitary(m, ComplexMatrix::identity(1), 0));
    }
    if n == 2 {
        return equidiag_2x2(m);
    }
    let mut unitary = ComplexMatrix::identity(n);
    let mut current = m.clone();
    let mut rotations = 0;
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for i in block..block + half {
                let j = i + half;
                let sub = ComplexMatrix::from_rows(&[
                    vec![current[(i, i)], current[(i, j)]],
                    vec![current[(j, i)], current[(j, j)]],
                ])?;
                let (theta, phi) = equidiag_angles(&sub);
                let e = embed_two_level(n, i, j, &rotation(theta, phi));
                current = &(&e * &current) * &e.adjoint();
                unitary = &e * &unitary;
                rotations += 1;
            }
        }
        half *= 2;
    }
    Ok(EquidiagResult::from_unitary(m, unitary, rotations))
}

/// Pair of bipartite states after an optional ancilla on Alice's side.
///
/// The ancilla is Alice's most significant factor, so the original amplitudes
/// come first and the appended ones are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedPair {
    pub psi1: PureState,
    pub psi2: PureState,
    pub original_alice_dim: usize,
    pub alice_dim: usize,
    /// Power of two with `original ≤ block ≤ alice_dim`; the leading block holds all amplitudes.
    pub block_dim: usize,
}

fn shared_dims(psi1: &PureState, psi2: &PureState) -> Result<(usize, usize)> {
    let dims = psi1.require_dims()?;
    if psi2.require_dims()? != dims {
        return Err(Error::DimensionMismatch(format!("states with dims {dims:?} and {:?}", psi2.dims())));
    }
    Ok(dims)
}

/// Doubles Alice's dimension with an ancilla in `|0⟩` when it is not a power of two.
pub fn ancilla_pad(psi1: &PureState, psi2: &PureState) -> Result<PaddedPair> {
    let (n, d_b) = shared_dims(psi1, psi2)?;
    if n.is_power_of_two() {
        return Ok(PaddedPair { psi1: psi1.clone(), psi2: psi2.clone(), original_alice_dim: n, alice_dim: n, block_dim: n });
    }
    let pad = |p: &PureState| -> Result<PureState> {
        let mut v = p.amplitudes().to_vec();
        v.resize(2 * n * d_b, ZERO);
        PureState::bipartite(v, 2 * n, d_b)
    };
    Ok(PaddedPair {
        psi1: pad(psi1)?,
        psi2: pad(psi2)?,
        original_alice_dim: n,
        alice_dim: 2 * n,
        block_dim: n.next_power_of_two(),
    })
}

/// Alice rotation making `ψ₁ψ₂†` equi-diagonal on the padded space.
///
/// Returns the padded pair and `V` with `V·ψ₁ψ₂†·V†` equi-diagonal in its leading block.
fn alice_rotation(psi1: &PureState, psi2: &PureState) -> Result<(PaddedPair, ComplexMatrix)> {
    let padded = ancilla_pad(psi1, psi2)?;
    let m = &padded.psi1.coefficient_matrix()? * &padded.psi2.coefficient_matrix()?.adjoint();
    let k = padded.block_dim;
    let block = equidiag_power2(&m.submatrix(0, 0, k, k))?;
    let n = padded.alice_dim;
    let mut v = ComplexMatrix::identity(n);
    for i in 0..k {
        for j in 0..k {
            v[(i, j)] = block.unitary[(i, j)];
        }
    }
    Ok((padded, v))
}

/// Bob's conditional (unnormalized) vectors `(⟨i′|⊗I)|ψ⟩` for every Alice basis vector.
fn conditional_vectors(psi: &PureState, alice_basis: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    let coeff = psi.coefficient_matrix()?;
    let projected = &alice_basis.adjoint() * &coeff;
    Ok((0..projected.rows()).map(|i| projected.row(i)).collect())
}

/// Bob's two projectors after Alice outcome `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BobBranch {
    /// Projector onto `μ_i`, or zero when `ψ₁` never yields this outcome.
    pub first: ComplexMatrix,
    /// `I − first`, which contains `μ_i^⊥`.
    pub second: ComplexMatrix,
}

/// One-way LOCC protocol distinguishing two orthogonal bipartite states.
#[derive(Debug, Clone, PartialEq)]
pub struct WalgateProtocol {
    /// Alice's measurement basis `{|i′⟩}` as columns.
    pub alice_basis: ComplexMatrix,
    pub bob_branches: Vec<BobBranch>,
    /// Inputs after any ancilla padding.
    pub padded: PaddedPair,
    /// Largest `|⟨ν_i|μ_i⟩|` over Alice outcomes.
    pub max_branch_overlap: f64,
}

/// Builds Alice's basis from the equi-diagonalization of `ψ₁ψ₂†` and Bob's conditional projectors.
pub fn walgate_protocol(psi1: &PureState, psi2: &PureState) -> Result<WalgateProtocol> {
    let o = psi1.overlap(psi2).norm();
    if o > crate::discriminate::ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal(o));
    }
    let (padded, v) = alice_rotation(psi1, psi2)?;
    let alice_basis = v.adjoint();
    let mus = conditional_vectors(&padded.psi1, &alice_basis)?;
    let nus = conditional_vectors(&padded.psi2, &alice_basis)?;
    let d_b = padded.psi1.require_dims()?.1;
    let mut max_branch_overlap: f64 = 0.0;
    let bob_branches = mus
        .iter()
        .zip(&nus)
        .map(|(mu, nu)| {
            max_branch_overlap = max_branch_overlap.max(crate::numkernel::inner(nu, mu).norm());
            let first = match crate::numkernel::normalized(mu, 1e-12) {
                Some(u) => ComplexMatrix::projector(&u),
                None => ComplexMatrix::zeros(d_b, d_b),
            };
            let second = &ComplexMatrix::identity(d_b) - &first;
            BobBranch { first, second }
        })
        .collect();
    Ok(WalgateProtocol { alice_basis, bob_branches, padded, max_branch_overlap })
}

impl WalgateProtocol {
    /// Alice's projective measurement `{|i′⟩⟨i′| ⊗ I}`.
    pub fn alice_measurement(&self) -> Result<Measurement> {
        let d_b = self.padded.psi1.require_dims()?.1;
        let ops = (0..self.alice_basis.cols())
            .map(|i| kron(&ComplexMatrix::projector(&self.alice_basis.column(i)), &ComplexMatrix::identity(d_b)))
            .collect();
        Measurement::unlabeled(ops)
    }

    /// Bob's measurement after Alice outcome `i`, with outcomes `"1"` and `"2"`.
    pub fn bob_measurement(&self, i: usize) -> Result<Measurement> {
        let n = self.padded.alice_dim;
        let b = &self.bob_branches[i];
        let id = ComplexMatrix::identity(n);
        Measurement::new(vec!["1".into(), "2".into()], vec![kron(&id, &b.first), kron(&id, &b.second)])
    }

    /// Probability that the two-round protocol names `input` (`0` or `1`) correctly.
    pub fn simulate(&self, input: usize) -> Result<f64> {
        let psi = match input {
            0 => &self.padded.psi1,
            1 => &self.padded.psi2,
            _ => return Err(Error::InvalidParameter(format!("input index {input} is not 0 or 1"))),
        };
        let rho = psi.to_density();
        let alice = self.alice_measurement()?;
        let probs = outcome_probabilities(&alice, &rho)?;
        let correct = (input + 1).to_string();
        let mut total = 0.0;
        for (i, p) in probs.iter().enumerate() {
            if *p <= crate::measure::ZERO_PROBABILITY {
                continue;
            }
            let post = posterior_state(&alice, &rho, &i.to_string())?;
            let bob = self.bob_measurement(i)?;
            let q = outcome_probabilities(&bob, &post)?;
            let k = crate::measure::OutcomeStatistics::index_of(&bob, &correct)?;
            total += p * q[k];
        }
        Ok(total)
    }
}

/// Bob's situation after one Alice outcome in the nonorthogonal protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct VirmaniBranch {
    /// `P(i | ψ₁)` and `P(i | ψ₂)`.
    pub likelihoods: (f64, f64),
    /// Normalized conditional states, if the outcome is possible.
    pub states: (Option<PureState>, Option<PureState>),
    /// Unnormalized overlap `⟨ν_i|μ_i⟩`, equal for every branch.
    pub overlap: Complex64,
    /// Minimum error of Bob's Helstrom measurement within the branch.
    pub conditional_error: f64,
    /// Probability of this branch.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirmaniResult {
    pub alice_basis: ComplexMatrix,
    pub branches: Vec<VirmaniBranch>,
    /// `Σ_i P(i)·error_i`.
    pub error_probability: f64,
}

/// Alice equi-diagonalizes `ψ₁ψ₂†`; Bob then performs Helstrom discrimination on his branch.
///
/// The error never falls below the global Helstrom error and reaches it only in special cases.
pub fn virmani_nonorthogonal(psi1: &PureState, psi2: &PureState, p1: f64, p2: f64) -> Result<VirmaniResult> {
    crate::states::check_probabilities(&[p1, p2])?;
    let (padded, v) = alice_rotation(psi1, psi2)?;
    let alice_basis = v.adjoint();
    let mus = conditional_vectors(&padded.psi1, &alice_basis)?;
    let nus = conditional_vectors(&padded.psi2, &alice_basis)?;
    let mut error_probability = 0.0;
    let branches = mus
        .iter()
        .zip(&nus)
        .map(|(mu, nu)| {
            let (l1, l2) = (norm(mu).powi(2), norm(nu).powi(2));
            let overlap = crate::numkernel::inner(nu, mu);
            let probability = p1 * l1 + p2 * l2;
            let conditional_error = if probability <= crate::measure::ZERO_PROBABILITY {
                0.0
            } else {
                let (q1, q2) = (p1 * l1 / probability, p2 * l2 / probability);
                let s = if l1 * l2 > 0.0 { overlap / (l1 * l2).sqrt() } else { ZERO };
                helstrom_pure_bound(q1, q2, s)
            };
            error_probability += probability * conditional_error;
            let unit = |v: &[Complex64]| crate::numkernel::normalized(v, 1e-12).map(|u| PureState::new(u).expect("unit vector"));
            VirmaniBranch {
                likelihoods: (l1, l2),
                states: (unit(mu), unit(nu)),
                overlap,
                conditional_error,
                probability,
            }
        })
        .collect();
    Ok(VirmaniResult { alice_basis, branches, error_probability })
}

/// Alice's measurement for the two-qubit Nielsen conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct NielsenProtocol {
    /// `M₁ = diag(cos β, sin β)`, `M₂ = diag(sin β, cos β)` on Alice's qubit.
    pub measurement: Measurement,
    /// `p₁ = ½(1 + cos α)`, `α ∈ [0, π/2]`.
    pub alpha: f64,
    /// `sin 2β = 2√(q₁(1−q₁))/sin α`, `β ∈ [0, π/4]`.
    pub beta: f64,
    /// `(|00⟩ + |1⟩(cos α|0⟩ + sin α|1⟩))/√2`, locally equivalent to the source.
    pub initial: PureState,
}

impl NielsenProtocol {
    /// Normalized post-measurement states for outcomes `M₁` and `M₂`.
    pub fn posteriors(&self) -> Result<Vec<PureState>> {
        self.measurement
            .operators()
            .iter()
            .map(|m| {
                let full = kron(m, &ComplexMatrix::identity(2));
                let v = full.apply(self.initial.amplitudes())?;
                Ok(PureState::normalized(v)?.with_dims(2, 2))
            })
            .collect()
    }

    /// Largest deviation of the posterior squared Schmidt coefficients from `(q₁, 1−q₁)`.
    pub fn schmidt_residual(&self, q1: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for post in self.posteriors()? {
            let sq = schmidt_decompose(&post)?.squared();
            let top = sq.first().copied().unwrap_or(0.0);
            let second = sq.get(1).copied().unwrap_or(0.0);
            worst = worst.max((top - q1).abs()).max((second - (1.0 - q1)).abs());
        }
        Ok(worst)
    }
}

/// Protocol converting Schmidt² `(p₁, 1−p₁)` into `(q₁, 1−q₁)` with `½ ≤ p₁ ≤ q₁ ≤ 1`.
pub fn nielsen_protocol_2qubit(p1: f64, q1: f64) -> Result<NielsenProtocol> {
    if !(0.5..=1.0).contains(&p1) || !(0.5..=1.0).contains(&q1) {
        return Err(Error::InvalidParameter(format!("leading Schmidt weights {p1}, {q1} must lie in [1/2, 1]")));
    }
    if q1 < p1 - 1e-12 {
        return Err(Error::InfeasibleTarget { p1, q1 });
    }
    let alpha = (2.0 * p1 - 1.0).clamp(-1.0, 1.0).acos();
    let beta = if alpha.sin() < 1e-15 {
        std::f64::consts::FRAC_PI_4
    } else {
        0.5 * (2.0 * (q1 * (1.0 - q1)).max(0.0).sqrt() / alpha.sin()).min(1.0).asin()
    };
    let (sb, cb) = beta.sin_cos();
    let m1 = ComplexMatrix::from_diag(&[cb, sb]);
    let m2 = ComplexMatrix::from_diag(&[sb, cb]);
    let measurement = Measurement::new(vec!["1".into(), "2".into()], vec![m1, m2])?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let initial = PureState::new(vec![c(h, 0.0), ZERO, c(h * alpha.cos(), 0.0), c(h * alpha.sin(), 0.0)])?.with_dims(2, 2);
    Ok(NielsenProtocol { measurement, alpha, beta, initial })
}

/// Outcome statistics of local projections on `n` copies of `cos θ|00⟩ + sin θ|11⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistillStats {
    /// `p_k = C(n,k)(cos²θ)^{n−k}(sin²θ)^k`.
    pub probabilities: Vec<f64>,
    /// `C(n,k)`, the dimension of the maximally entangled subspace for outcome `k`.
    pub subspace_dims: Vec<u128>,
}

pub fn distill_outcome_stats(n: usize, cos2theta: f64) -> Result<DistillStats> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one copy is required".into()));
    }
    if !(0.0..=1.0).contains(&cos2theta) {
        return Err(Error::InvalidParameter(format!("cos²θ = {cos2theta} outside [0, 1]")));
    }
    let sin2 = 1.0 - cos2theta;
    let mut dims = Vec::with_capacity(n + 1);
    let mut binom: u128 = 1;
    for k in 0..=n {
        dims.push(binom);
        if k < n {
            binom = binom
                .checked_mul((n - k) as u128)
                .map(|b| b / (k as u128 + 1))
                .ok_or_else(|| Error::InvalidParameter(format!("{n} copies overflow the subspace count")))?;
        }
    }
    let probabilities = dims
        .iter()
        .enumerate()
        .map(|(k, &b)| b as f64 * cos2theta.powi((n - k) as i32) * sin2.powi(k as i32))
        .collect();
    Ok(DistillStats { probabilities, subspace_dims: dims })
}
