//! Worked bounds for the Bell-like family `ψ₁ = a|00⟩ + b|11⟩`, `ψ₂ = b|00⟩ − a|11⟩`,
//! `ψ₃ = c|01⟩ + d|10⟩`, `ψ₄ = d|01⟩ − c|10⟩`: negativity tests, majorization
//! (in)distinguishability, entanglement-assisted and entanglement-preserving
//! discrimination, and the cost-versus-entanglement scan.
//!
//! Four-party states are ordered `A B C D`, with the family on `AB` and a Bell
//! state on `CD`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::majorize::{majorizes, sorted_desc};
use crate::numkernel::{c, hermitian_eig, kron_vec, permute_subsystems, permute_vec, svd, ComplexMatrix, ZERO};
use crate::states::{
    bell_state, binary_entropy, schmidt_decompose, shannon_entropy, log_negativity, BellState, DensityOperator, PureState,
};

/// Tolerance of every reported inequality.
pub const BOUND_TOL: f64 = 1e-10;

/// Tolerance for a state to count as product (second Schmidt coefficient).
pub const PRODUCT_TOL: f64 = 1e-10;

/// Grid resolution used to confirm the product-assisted minimum.
pub const PRODUCT_BOUND_GRID: usize = 100;

/// Slack on `a ≥ b` and `c ≥ d`, wide enough for amplitudes typed to eight decimals.
pub const ORDERING_TOL: f64 = 1e-8;

const BELLS: [BellState; 4] = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

/// Real amplitudes `a ≥ b ≥ 0`, `c ≥ d ≥ 0` with `a² + b² = c² + d² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellFamilyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl BellFamilyParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if [a, b, c, d].iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter(format!("amplitudes ({a}, {b}, {c}, {d}) must be finite and nonnegative")));
        }
        for (x, y) in [(a, b), (c, d)] {
            let n = x * x + y * y;
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized(n));
            }
            if x < y - ORDERING_TOL {
                return Err(Error::InvalidParameter(format!("ordering requires {x} >= {y}")));
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// Parameters from the leading amplitudes, with `b = √(1−a²)` and `d = √(1−c²)`.
    pub fn from_ac(a: f64, c: f64) -> Result<Self> {
        Self::new(a, (1.0 - a * a).max(0.0).sqrt(), c, (1.0 - c * c).max(0.0).sqrt())
    }

    /// Parameters from the leading squared Schmidt coefficients `a²` and `c²`.
    pub fn from_squares(a2: f64, c2: f64) -> Result<Self> {
        Self::new(a2.sqrt(), (1.0 - a2).max(0.0).sqrt(), c2.sqrt(), (1.0 - c2).max(0.0).sqrt())
    }

    /// Every state product.
    pub fn product() -> Self {
        Self { a: 1.0, b: 0.0, c: 1.0, d: 0.0 }
    }

    /// Every state maximally entangled.
    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { a: h, b: h, c: h, d: h }
    }

    /// `ψ₁ … ψ₄` with dims `(2, 2)`.
    pub fn states(&self) -> [PureState; 4] {
        let Self { a, b, c: cc, d } = *self;
        let mk = |v: [f64; 4]| PureState::normalized(v.iter().map(|&x| c(x, 0.0)).collect()).expect("unit vector").with_dims(2, 2);
        [mk([a, 0.0, 0.0, b]), mk([b, 0.0, 0.0, -a]), mk([0.0, cc, d, 0.0]), mk([0.0, d, -cc, 0.0])]
    }

    /// Leading squared Schmidt coefficients `(a², c²)`.
    pub fn squares(&self) -> (f64, f64) {
        (self.a * self.a, self.c * self.c)
    }
}

/// An inequality `lhs ≤ rhs` (or `lhs < rhs` when strict) with a headline value.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound_value: f64,
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub witness: String,
}

impl BoundReport {
    /// `lhs ≤ rhs` within [`BOUND_TOL`].
    pub fn at_most(bound_value: f64, lhs: f64, rhs: f64, relation: &str) -> Self {
        Self { bound_value, satisfied: lhs <= rhs + BOUND_TOL, lhs, rhs, witness: format!("{relation}: {lhs} <= {rhs}") }
    }

    /// `lhs < rhs` by more than [`BOUND_TOL`], so the boundary does not count.
    pub fn strictly_below(bound_value: f64, lhs: f64, rhs: f64, relation: &str) -> Self {
        Self { bound_value, satisfied: lhs < rhs - BOUND_TOL, lhs, rhs, witness: format!("{relation}: {lhs} < {rhs}") }
    }
}

/// `Σ w_i |ψ_i⟩⟨ψ_i| ⊗ |φ_i⟩⟨φ_i|` over the chosen family members and Bell states.
fn flagged_mixture(p: &BellFamilyParams, members: &[usize], weight: f64) -> DensityOperator {
    let states = p.states();
    let mut rho = ComplexMatrix::zeros(16, 16);
    for (k, &i) in members.iter().enumerate() {
        let v = kron_vec(states[i].amplitudes(), bell_state(BELLS[k]).amplitudes());
        rho = &rho + &ComplexMatrix::projector(&v).scale_real(weight);
    }
    DensityOperator::from_matrix_unchecked(rho)
}

/// Log-negativity across the `AC:BD` cut of a four-qubit state ordered `A B C D`.
fn negativity_ac_bd(rho: &DensityOperator) -> Result<f64> {
    let reordered = permute_subsystems(rho.matrix(), &[2, 2, 2, 2], &[0, 2, 1, 3])?;
    log_negativity(&DensityOperator::from_matrix_unchecked(reordered), Some((4, 4)))
}

/// `Tr_BD |Ψ⟩⟨Ψ|` for a pure four-qubit vector ordered `A B C D`.
fn reduce_to_ac(v: &[Complex64]) -> Result<ComplexMatrix> {
    let reordered = permute_vec(v, &[2, 2, 2, 2], &[0, 2, 1, 3])?;
    let t = ComplexMatrix::new(4, 4, reordered)?;
    Ok(&t * &t.adjoint())
}

/// `Σ_k w |ψ_{m_k}⟩ ⊗ |φ_k⟩`.
fn flagged_superposition(p: &BellFamilyParams, members: &[usize], weight: f64) -> Vec<Complex64> {
    let states = p.states();
    let mut v = vec![ZERO; 16];
    for (k, &i) in members.iter().enumerate() {
        let t = kron_vec(states[i].amplitudes(), bell_state(BELLS[k]).amplitudes());
        for (x, y) in v.iter_mut().zip(t) {
            *x += y * weight;
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ghosh4Report {
    /// `E_N ≥ 1` is required for LOCC discrimination.
    pub report: BoundReport,
    pub numeric: f64,
    /// `log₂(a² + c²)`.
    pub closed_form: f64,
}

/// Log-negativity test for all four family members, flagged by the four Bell states.
pub fn ghosh4_negativity(p: &BellFamilyParams) -> Result<Ghosh4Report> {
    let numeric = negativity_ac_bd(&flagged_mixture(p, &[0, 1, 2, 3], 0.25))?;
    let (a2, c2) = p.squares();
    let closed_form = (a2 + c2).log2();
    Ok(Ghosh4Report { report: BoundReport::at_most(numeric, 1.0, numeric, "1 <= E_N(AC:BD)"), numeric, closed_form })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ghosh3Report {
    /// `¾ < X` with `X = 4a²b² − c²d²` (or `4c²d² − a²b²` for the anti-parallel choice).
    pub report: BoundReport,
    pub x: f64,
    /// Log-negativity of the three-state mixture.
    pub numeric: f64,
    /// `log₂[1 + ⅓(max(1, √(1+4X)) + 2√(1−X))]`.
    pub closed_form: f64,
    /// `log₂[1 + ⅓√(1+4X) + 2√(1−X)]`, the form without the common `⅓` and lower branch.
    pub printed_form: f64,
    /// Whether the numeric value satisfies `E_N ≥ 1`.
    pub numeric_at_least_one: bool,
}

/// Negativity test for three family members.
///
/// The parallel choice is `{ψ₁, ψ₂, ψ₃}`; the anti-parallel one is `{ψ₁, ψ₃, ψ₄}`,
/// which swaps `(a, b)` with `(c, d)`.
pub fn ghosh3_negativity(p: &BellFamilyParams, anti_parallel: bool) -> Result<Ghosh3Report> {
    let members: [usize; 3] = if anti_parallel { [0, 2, 3] } else { [0, 1, 2] };
    let numeric = negativity_ac_bd(&flagged_mixture(p, &members, 1.0 / 3.0))?;
    let (ab, cd) = (p.a * p.b, p.c * p.d);
    let x = if anti_parallel { 4.0 * cd * cd - ab * ab } else { 4.0 * ab * ab - cd * cd };
    let big = (1.0 + 4.0 * x).max(0.0).sqrt();
    let small = (1.0 - x).max(0.0).sqrt();
    let closed_form = (1.0 + (big.max(1.0) + 2.0 * small) / 3.0).log2();
    let printed_form = (1.0 + big / 3.0 + 2.0 * small).log2();
    Ok(Ghosh3Report {
        report: BoundReport::strictly_below(closed_form, 0.75, x, "3/4 < X"),
        x,
        numeric,
        closed_form,
        printed_form,
        numeric_at_least_one: numeric >= 1.0 - BOUND_TOL,
    })
}

/// Spectrum target `(½, ½, 0, 0)` of a maximally entangled qubit pair.
const HALF_HALF: [f64; 2] = [0.5, 0.5];

#[derive(Debug, Clone, PartialEq)]
pub struct Maj4Report {
    /// `λ₁ = ⅛(a+b+c+d)² ≤ ½`.
    pub report: BoundReport,
    /// Descending spectrum of `Tr_BD |Ψ⟩⟨Ψ|`.
    pub numeric_eigenvalues: Vec<f64>,
    /// `(a±b±c±d)²/8` over the four sign patterns, descending.
    pub closed_form_eigenvalues: Vec<f64>,
    pub eigenvalue_residual: f64,
    /// Whether `λ(Tr_BD |Ψ⟩⟨Ψ|) ≺ λ(½ I)`.
    pub majorized: bool,
}

/// Majorization test for the four-state superposition `½ Σ |ψ_i⟩|φ_i⟩`.
pub fn maj4_indistinguishability(p: &BellFamilyParams) -> Result<Maj4Report> {
    let v = flagged_superposition(p, &[0, 1, 2, 3], 0.5);
    let numeric_eigenvalues = hermitian_eig(&reduce_to_ac(&v)?.hermitian_part())?.eigenvalues;
    let BellFamilyParams { a, b, c, d } = *p;
    let closed = [(a + b + c + d), (a - b + c - d), (a - b - c + d), (a + b - c - d)].map(|s| s * s / 8.0);
    let closed_form_eigenvalues = sorted_desc(&closed, 4);
    let eigenvalue_residual =
        numeric_eigenvalues.iter().zip(&closed_form_eigenvalues).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let majorized = majorizes(&numeric_eigenvalues, &HALF_HALF).left_is_majorized();
    let top = closed_form_eigenvalues[0];
    Ok(Maj4Report {
        report: BoundReport::at_most(top, top, 0.5, "(a+b+c+d)^2/8 <= 1/2"),
        numeric_eigenvalues,
        closed_form_eigenvalues,
        eigenvalue_residual,
        majorized,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Maj3Report {
    /// `λ₁ ≤ ½`.
    pub report: BoundReport,
    pub eigenvalues: Vec<f64>,
    pub majorized: bool,
}

/// Majorization test for the three-state superposition `(1/√3) Σ_{i≤3} |ψ_i⟩|φ_i⟩`.
pub fn maj3_feasibility(p: &BellFamilyParams) -> Result<Maj3Report> {
    let v = flagged_superposition(p, &[0, 1, 2], 1.0 / 3f64.sqrt());
    let eigenvalues = hermitian_eig(&reduce_to_ac(&v)?.hermitian_part())?.eigenvalues;
    let majorized = majorizes(&eigenvalues, &HALF_HALF).left_is_majorized();
    let top = eigenvalues[0];
    Ok(Maj3Report { report: BoundReport::at_most(top, top, 0.5, "lambda_1 <= 1/2"), eigenvalues, majorized })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssistedReport {
    /// Top component of `λ(φ) ⊗ λ(Tr_BD |Ψ⟩⟨Ψ|)` at the bound, against `½`.
    pub report: BoundReport,
    /// `4/(a+b+c+d)²`.
    pub alpha2_bound: f64,
    /// Whether the full tensor spectrum is majorized by `(½, ½)` at the bound.
    pub majorized_at_bound: bool,
    /// Entanglement of the least entangled admissible resource, in ebits.
    pub resource_entanglement: f64,
    /// `¼ Σ E(ψ_i)` in ebits.
    pub average_entanglement: f64,
}

/// Bound on the shared resource `α|00⟩ + β|11⟩` that makes the four states distinguishable.
pub fn assisted_bound(p: &BellFamilyParams) -> Result<AssistedReport> {
    let maj = maj4_indistinguishability(p)?;
    let BellFamilyParams { a, b, c, d } = *p;
    let alpha2_bound = (4.0 / (a + b + c + d).powi(2)).min(1.0);
    let resource = [alpha2_bound, 1.0 - alpha2_bound];
    let tensor: Vec<f64> = resource.iter().flat_map(|r| maj.numeric_eigenvalues.iter().map(move |l| r * l)).collect();
    let top = sorted_desc(&tensor, tensor.len())[0];
    let majorized_at_bound = majorizes(&tensor, &HALF_HALF).left_is_majorized();
    let (a2, c2) = p.squares();
    Ok(AssistedReport {
        report: BoundReport::at_most(alpha2_bound, top, 0.5, "alpha^2 (a+b+c+d)^2/8 <= 1/2"),
        alpha2_bound,
        majorized_at_bound,
        resource_entanglement: binary_entropy(alpha2_bound),
        average_entanglement: 0.5 * (binary_entropy(a2) + binary_entropy(c2)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preserve2Report {
    /// `α² ≤ p₁a² + p₂c²`, with the right side taken from the numeric Schmidt spectra.
    pub report: BoundReport,
    /// `(a²cd + c²ab)/(ab + cd)`.
    pub alpha2_bound: f64,
    /// `cd/(ab+cd)` and `ab/(ab+cd)`.
    pub probabilities: (f64, f64),
    /// `det Tr_B |Ψ⟩⟨Ψ|` for `Ψ = √p₁ψ₁ + √p₂ψ₂`.
    pub det_reduced: f64,
    /// Second Schmidt coefficient of `Ψ`.
    pub second_schmidt: f64,
    /// `2αβ` at the bound.
    pub concurrence_phi: f64,
    /// `√(C(ψ₁)C(ψ₂))`.
    pub concurrence_geometric_mean: f64,
}

/// Entanglement-preserving discrimination of `a|00⟩ + b|11⟩` and `c|01⟩ + d|10⟩`.
pub fn preserve2_bound(p: &BellFamilyParams) -> Result<Preserve2Report> {
    let BellFamilyParams { a, b, c: cc, d } = *p;
    let (ab, cd) = (a * b, cc * d);
    if ab + cd <= 1e-12 {
        return Err(Error::DegenerateProduct);
    }
    let (p1, p2) = (cd / (ab + cd), ab / (ab + cd));
    let psi1 = PureState::from_real(&[a, 0.0, 0.0, b])?.with_dims(2, 2);
    let psi2 = PureState::from_real(&[0.0, cc, d, 0.0])?.with_dims(2, 2);
    let amps: Vec<Complex64> =
        psi1.amplitudes().iter().zip(psi2.amplitudes()).map(|(x, y)| x * p1.sqrt() + y * p2.sqrt()).collect();
    let big_psi = PureState::new(amps)?.with_dims(2, 2);
    let det_reduced = crate::numkernel::determinant(&big_psi.reduced(crate::numkernel::Subsystem::B)?)?.norm();
    let second_schmidt = schmidt_decompose(&big_psi)?.coefficients.get(1).copied().unwrap_or(0.0);
    let s1 = schmidt_decompose(&psi1)?.squared();
    let s2 = schmidt_decompose(&psi2)?.squared();
    let mixed_top = p1 * s1[0] + p2 * s2[0];
    let alpha2_bound = (a * a * cd + cc * cc * ab) / (ab + cd);
    Ok(Preserve2Report {
        report: BoundReport::at_most(alpha2_bound, alpha2_bound, mixed_top, "alpha^2 <= p1 a^2 + p2 c^2"),
        alpha2_bound,
        probabilities: (p1, p2),
        det_reduced,
        second_schmidt,
        concurrence_phi: 2.0 * (alpha2_bound * (1.0 - alpha2_bound)).max(0.0).sqrt(),
        concurrence_geometric_mean: (2.0 * ab * 2.0 * cd).sqrt(),
    })
}

/// `Σ p_i λ₁(ψ_i)` for `Ψ = |A⟩|B⟩` with `x_A² = xa2`, `x_B² = xb2`.
pub fn product_assisted_rhs(p: &BellFamilyParams, xa2: f64, xb2: f64) -> f64 {
    let (a2, c2) = p.squares();
    a2 * (xa2 * xb2 + (1.0 - xa2) * (1.0 - xb2)) + c2 * (xa2 * (1.0 - xb2) + (1.0 - xa2) * xb2)
}

/// Amplitudes `√p_i = ⟨ψ_i|A⊗B⟩` for real `|A⟩ = (x_A, y_A)`, `|B⟩ = (x_B, y_B)`.
pub fn product_amplitudes(p: &BellFamilyParams, xa: f64, xb: f64) -> [f64; 4] {
    let (ya, yb) = ((1.0 - xa * xa).max(0.0).sqrt(), (1.0 - xb * xb).max(0.0).sqrt());
    let BellFamilyParams { a, b, c, d } = *p;
    [xa * xb * a + ya * yb * b, xa * xb * b - ya * yb * a, xa * yb * c + ya * xb * d, xa * yb * d - ya * xb * c]
}

/// Minimum of [`product_assisted_rhs`] over an `n × n` grid of `(x_A², x_B²) ∈ [0,1]²`.
pub fn product_assisted_grid_min(p: &BellFamilyParams, n: usize) -> f64 {
    let n = n.max(2);
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            best = best.min(product_assisted_rhs(p, x, y));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preserve4ProductReport {
    /// `min(a², c²)` against the grid minimum.
    pub report: BoundReport,
    pub alpha2_bound: f64,
    /// Minimizing corner `(x_A², x_B²)`.
    pub corner: (f64, f64),
    pub grid_minimum: f64,
    /// `√p_i` at the corner.
    pub amplitudes: [f64; 4],
    /// Second Schmidt coefficient of `Σ √p_i ψ_i` at the corner.
    pub second_schmidt: f64,
}

/// Entanglement-preserving bound when the superposition is made product.
pub fn preserve4_product_bound(p: &BellFamilyParams) -> Result<Preserve4ProductReport> {
    let corners = [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)];
    let (corner, alpha2_bound) = corners
        .iter()
        .map(|&(x, y)| ((x, y), product_assisted_rhs(p, x, y)))
        .min_by(|l, r| l.1.total_cmp(&r.1))
        .expect("four corners");
    let amplitudes = product_amplitudes(p, corner.0.sqrt(), corner.1.sqrt());
    let states = p.states();
    let mut v = vec![ZERO; 4];
    for (w, s) in amplitudes.iter().zip(&states) {
        for (x, y) in v.iter_mut().zip(s.amplitudes()) {
            *x += y * *w;
        }
    }
    let psi = PureState::new(v)?.with_dims(2, 2);
    let second_schmidt = schmidt_decompose(&psi)?.coefficients.get(1).copied().unwrap_or(0.0);
    let grid_minimum = product_assisted_grid_min(p, PRODUCT_BOUND_GRID);
    Ok(Preserve4ProductReport {
        report: BoundReport::at_most(alpha2_bound, alpha2_bound, grid_minimum, "min(a^2, c^2) <= grid minimum"),
        alpha2_bound,
        corner,
        grid_minimum,
        amplitudes,
        second_schmidt,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preserve4BellReport {
    /// Second singular value of `½ Σ ψ_μ ⊗ ψ_μ*` across `AĀ:BB̄`, against zero.
    pub report: BoundReport,
    /// `½(a⁴+c⁴, a²b²+c²d², a²b²+c²d², b⁴+d⁴)`, descending.
    pub rhs: Vec<f64>,
    /// Entropy of `rhs`: entanglement of the least entangled admissible resource.
    pub cost: f64,
    /// Singular values of `Ψ` across `AĀ:BB̄`.
    pub cut_singular_values: Vec<f64>,
}

/// Entanglement-preserving bound with maximally entangled flags `Ψ = ½ Σ |ψ_μ⟩|ψ_μ*⟩`.
pub fn preserve4_bell_bound(p: &BellFamilyParams) -> Result<Preserve4BellReport> {
    let BellFamilyParams { a, b, c, d } = *p;
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    let cross = 0.5 * (a2 * b2 + c2 * d2);
    let rhs = sorted_desc(&[0.5 * (a2 * a2 + c2 * c2), cross, cross, 0.5 * (b2 * b2 + d2 * d2)], 4);
    let mut v = vec![ZERO; 16];
    for s in p.states() {
        let conj: Vec<Complex64> = s.amplitudes().iter().map(|z| z.conj()).collect();
        for (x, y) in v.iter_mut().zip(kron_vec(s.amplitudes(), &conj)) {
            *x += y * 0.5;
        }
    }
    // Order A B Ā B̄ → A Ā B B̄ and split Alice from Bob.
    let reordered = permute_vec(&v, &[2, 2, 2, 2], &[0, 2, 1, 3])?;
    let cut_singular_values = svd(&ComplexMatrix::new(4, 4, reordered)?).singular_values;
    let second = cut_singular_values.get(1).copied().unwrap_or(0.0);
    let cost = shannon_entropy(&rhs);
    Ok(Preserve4BellReport {
        report: BoundReport::at_most(cost, second, 0.0, "second singular value across the cut <= 0"),
        rhs,
        cost,
        cut_singular_values,
    })
}

/// One point of the cost-versus-average-entanglement scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Row {
    pub a2: f64,
    pub c2: f64,
    /// `¼ Σ E(ψ_i) = ½(h(a²) + h(c²))`.
    pub avg_entanglement: f64,
    /// Entropy of the entanglement-preserving bound vector.
    pub cost: f64,
    /// All four states equally entangled (`a = c`).
    pub on_diagonal: bool,
    /// One pair of states maximally entangled (`a² = ½` or `c² = ½`).
    pub cusp_branch: bool,
}

/// Scans `(a², c²)` over a `grid × grid` lattice of `[½, 1]²`, rows ordered by `a²` then `c²`.
pub fn figure1_scan(grid: usize) -> Result<Vec<Figure1Row>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid {grid} must be at least 2")));
    }
    let value = |k: usize| 0.5 + 0.5 * k as f64 / (grid - 1) as f64;
    let mut rows = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let (a2, c2) = (value(i), value(j));
            let p = BellFamilyParams::from_squares(a2, c2)?;
            rows.push(Figure1Row {
                a2,
                c2,
                avg_entanglement: 0.5 * (binary_entropy(a2) + binary_entropy(c2)),
                cost: preserve4_bell_bound(&p)?.cost,
                on_diagonal: i == j,
                cusp_branch: i == 0 || j == 0,
            });
        }
    }
    Ok(rows)
}
