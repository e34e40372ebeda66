//! Majorization order, pure-state conversion feasibility, T-transform chains,
//! Birkhoff decomposition and the measurement realizing a majorization-feasible
//! state transformation.

use crate::error::{Error, Result};
use crate::measure::Measurement;
use crate::numkernel::{c, hermitian_eig, ComplexMatrix};
use crate::states::{check_probabilities, schmidt_decompose, DensityOperator, Ensemble, PureState, State};

/// Tolerance applied to every prefix-sum comparison.
pub const MAJORIZATION_TOL: f64 = 1e-10;

const BIRKHOFF_ZERO: f64 = 1e-12;
const KERNEL_TOL: f64 = 1e-12;

/// Validated probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        check_probabilities(&components)?;
        Ok(Self(components))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }
}

/// Outcome of comparing `x` with `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `x ≺ y` and not the reverse.
    LeftMajorized,
    /// `y ≺ x` and not the reverse.
    RightMajorized,
    /// Both directions hold: equal up to reordering.
    Equal,
    Incomparable,
}

/// Verdict plus the prefix sums of both vectors sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationReport {
    pub verdict: Verdict,
    pub prefix_sums_left: Vec<f64>,
    pub prefix_sums_right: Vec<f64>,
    /// First index where the left prefix sum exceeds the right one, i.e. where `x ≺ y` breaks.
    pub first_violation_index: Option<usize>,
}

impl MajorizationReport {
    /// Whether `x ≺ y` holds (including equality).
    pub fn left_is_majorized(&self) -> bool {
        matches!(self.verdict, Verdict::LeftMajorized | Verdict::Equal)
    }
}

/// Copy sorted descending and zero-padded to `len`.
pub fn sorted_desc(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len.max(v.len()), 0.0);
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn prefix_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Compares `x` and `y` in the majorization order, padding the shorter one with zeros.
pub fn majorizes(x: &[f64], y: &[f64]) -> MajorizationReport {
    let n = x.len().max(y.len());
    let sx = prefix_sums(&sorted_desc(x, n));
    let sy = prefix_sums(&sorted_desc(y, n));
    let first_violation_index = (0..n).find(|&k| sx[k] > sy[k] + MAJORIZATION_TOL);
    let reverse_holds = (0..n).all(|k| sy[k] <= sx[k] + MAJORIZATION_TOL);
    let verdict = match (first_violation_index.is_none(), reverse_holds) {
        (true, true) => Verdict::Equal,
        (true, false) => Verdict::LeftMajorized,
        (false, true) => Verdict::RightMajorized,
        (false, false) => Verdict::Incomparable,
    };
    MajorizationReport { verdict, prefix_sums_left: sx, prefix_sums_right: sy, first_violation_index }
}

/// Squared Schmidt coefficients, descending.
pub fn schmidt_spectrum(psi: &PureState) -> Result<Vec<f64>> {
    Ok(schmidt_decompose(psi)?.squared())
}

/// Whether `source` can be converted to `target` deterministically by LOCC.
pub fn nielsen_feasible(source: &PureState, target: &PureState) -> Result<bool> {
    Ok(majorizes(&schmidt_spectrum(source)?, &schmidt_spectrum(target)?).left_is_majorized())
}

/// `Σ p_i λ(ψ_i)` with each spectrum sorted descending and padded to a common length.
pub fn mixed_spectrum(targets: &Ensemble) -> Result<Vec<f64>> {
    let spectra = targets
        .items()
        .iter()
        .map(|(_, s)| match s {
            State::Pure(p) => schmidt_spectrum(p),
            State::Mixed(_) => Err(Error::InvalidParameter("conversion targets must be pure states".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let n = spectra.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![0.0; n];
    for ((p, _), s) in targets.items().iter().zip(&spectra) {
        for (o, v) in out.iter_mut().zip(sorted_desc(s, n)) {
            *o += p * v;
        }
    }
    Ok(out)
}

/// Whether `source` can be converted to the ensemble `targets` by LOCC.
pub fn probabilistic_feasible(source: &PureState, targets: &Ensemble) -> Result<bool> {
    Ok(majorizes(&schmidt_spectrum(source)?, &mixed_spectrum(targets)?).left_is_majorized())
}

/// `T = t·I + (1 − t)·Q`, where `Q` swaps coordinates `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTransform {
    pub dim: usize,
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

impl TTransform {
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.dim);
        let s = 1.0 - self.t;
        m[(self.i, self.i)] = c(self.t, 0.0);
        m[(self.j, self.j)] = c(self.t, 0.0);
        m[(self.i, self.j)] = c(s, 0.0);
        m[(self.j, self.i)] = c(s, 0.0);
        m
    }

    pub fn apply(&self, v: &mut [f64]) {
        let (a, b) = (v[self.i], v[self.j]);
        v[self.i] = self.t * a + (1.0 - self.t) * b;
        v[self.j] = self.t * b + (1.0 - self.t) * a;
    }
}

/// Product `T_m ⋯ T_1` of a chain listed in application order.
pub fn chain_product(chain: &[TTransform], dim: usize) -> ComplexMatrix {
    chain.iter().fold(ComplexMatrix::identity(dim), |acc, t| &t.matrix() * &acc)
}

/// T-transforms carrying `y` to `x` when `x ≺ y`.
///
/// Both vectors are sorted descending and zero-padded to a common length first;
/// the transforms act on those sorted coordinates and are listed in the order
/// they are applied to `y`. At most `d − 1` transforms are produced.
pub fn t_transform_chain(x: &[f64], y: &[f64]) -> Result<Vec<TTransform>> {
    let report = majorizes(x, y);
    if let Some(k) = report.first_violation_index {
        return Err(Error::NotMajorized(k));
    }
    let d = x.len().max(y.len());
    let xs = sorted_desc(x, d);
    let mut ys = sorted_desc(y, d);
    let eq_tol = 1e-14;
    let mut chain = Vec::new();
    while chain.len() + 1 < d.max(1) {
        let Some(j) = (0..d).rev().find(|&i| ys[i] > xs[i] + eq_tol) else { break };
        let Some(k) = ((j + 1)..d).find(|&i| ys[i] < xs[i] - eq_tol) else { break };
        let (high, low) = (ys[j] - xs[j], xs[k] - ys[k]);
        let delta = high.min(low);
        let t = (ys[j] - delta - ys[k]) / (ys[j] - ys[k]);
        let tt = TTransform { dim: d, i: j, j: k, t };
        // Apply exactly and pin the coordinate that reached its target.
        if high <= low {
            ys[j] = xs[j];
            ys[k] += delta;
        } else {
            ys[j] -= delta;
            ys[k] = xs[k];
        }
        chain.push(tt);
    }
    Ok(chain)
}

/// Permutation `π` standing for the matrix with ones at `(k, π[k])`.
pub type Permutation = Vec<usize>;

pub fn permutation_matrix(perm: &[usize]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(perm.len(), perm.len());
    for (k, &p) in perm.iter().enumerate() {
        m[(k, p)] = c(1.0, 0.0);
    }
    m
}

fn try_augment(u: usize, allowed: &dyn Fn(usize, usize) -> bool, n: usize, seen: &mut [bool], match_col: &mut [Option<usize>]) -> bool {
    for v in 0..n {
        if allowed(u, v) && !seen[v] {
            seen[v] = true;
            if match_col[v].is_none_or(|w| try_augment(w, allowed, n, seen, match_col)) {
                match_col[v] = Some(u);
                return true;
            }
        }
    }
    false
}

/// Perfect matching of rows to columns using only allowed cells (Kuhn's algorithm).
fn perfect_matching(n: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Option<Permutation> {
    let mut match_col = vec![None; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        if !try_augment(u, allowed, n, &mut seen, &mut match_col) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (v, u) in match_col.iter().enumerate() {
        perm[u.expect("perfect matching")] = v;
    }
    Some(perm)
}

/// Matching whose smallest entry is as large as possible.
fn bottleneck_matching(r: &[Vec<f64>]) -> Option<(Permutation, f64)> {
    let n = r.len();
    let mut levels: Vec<f64> = r.iter().flatten().copied().filter(|&x| x > BIRKHOFF_ZERO).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let feasible = |tau: f64| perfect_matching(n, &|i, j| r[i][j] >= tau);
    let mut lo = 0;
    let mut hi = levels.len();
    let mut best = None;
    // levels is descending; find the earliest index (largest tau) that admits a matching.
    while lo < hi {
        let mid = (lo + hi) / 2;
        match feasible(levels[mid]) {
            Some(p) => {
                best = Some((p, levels[mid]));
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    best.map(|(p, _)| {
        let w = p.iter().enumerate().map(|(i, &j)| r[i][j]).fold(f64::INFINITY, f64::min);
        (p, w)
    })
}

/// Decomposes a doubly stochastic matrix into a convex combination of permutation matrices.
pub fn birkhoff_decompose(d: &ComplexMatrix) -> Result<Vec<(f64, Permutation)>> {
    let n = d.require_square()?;
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let z = d[(i, j)];
            if z.im.abs() > 1e-10 {
                return Err(Error::NotDoublyStochastic(format!("entry ({i},{j}) is not real")));
            }
            if z.re < -1e-10 {
                return Err(Error::NotDoublyStochastic(format!("entry ({i},{j}) = {} is negative", z.re)));
            }
            r[i][j] = z.re.max(0.0);
        }
    }
    for k in 0..n {
        let row: f64 = r[k].iter().sum();
        let col: f64 = r.iter().map(|row| row[k]).sum();
        if (row - 1.0).abs() > 1e-9 || (col - 1.0).abs() > 1e-9 {
            return Err(Error::NotDoublyStochastic(format!("line {k} sums to {row} (row) and {col} (column)")));
        }
    }
    let mut out = Vec::new();
    let mut total = 0.0;
    while out.len() < n * n && total < 1.0 - BIRKHOFF_ZERO {
        let Some((perm, w)) = bottleneck_matching(&r) else { break };
        for (i, &j) in perm.iter().enumerate() {
            r[i][j] -= w;
        }
        total += w;
        out.push((w, perm));
    }
    Ok(out)
}

/// Reconstructs `Σ q_j P_j`.
pub fn birkhoff_reconstruct(terms: &[(f64, Permutation)], n: usize) -> ComplexMatrix {
    terms.iter().fold(ComplexMatrix::zeros(n, n), |acc, (w, p)| &acc + &permutation_matrix(p).scale_real(*w))
}

/// One operator `M_ij` of a transform measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformBranch {
    /// Index of the target state `ρ_i`.
    pub target: usize,
    /// Weight `q_j` of the permutation in the Birkhoff decomposition.
    pub weight: f64,
    pub permutation: Permutation,
    /// Probability `p_i q_j` of landing in this branch.
    pub probability: f64,
}

/// Measurement turning `ρ` into `ρ_i` with probability `p_i`.
#[derive(Debug, Clone)]
pub struct TransformMeasurement {
    /// Operators in branch order, followed by the kernel projector when `ρ` is singular.
    pub measurement: Measurement,
    pub branches: Vec<TransformBranch>,
    pub has_kernel_projector: bool,
}

/// Builds operators `M_ij` with `M_ij ρ M_ij† = p_i q_j ρ_i` and `Σ M†M = I`.
///
/// With `ρ = V D V†` and `ρ_i = W_i D_i W_i†`, the doubly stochastic `D` linking
/// the spectra, `x = D y`, is decomposed as `Σ q_j P_j` and
/// `M_ij = √(p_i q_j) W_i √D_i P_j† D^{-1/2} V†` on the support of `ρ`.
/// A singular `ρ` gets one extra operator projecting onto its kernel.
pub fn construct_transform_measurement(
    rho: &DensityOperator,
    targets: &[(f64, DensityOperator)],
) -> Result<TransformMeasurement> {
    let d = rho.dim();
    check_probabilities(&targets.iter().map(|(p, _)| *p).collect::<Vec<_>>())?;
    if let Some((_, t)) = targets.iter().find(|(_, t)| t.dim() != d) {
        return Err(Error::DimensionMismatch(format!("target of dimension {} for a {d}-dimensional state", t.dim())));
    }
    let source = hermitian_eig(rho.matrix())?;
    let x: Vec<f64> = source.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let target_eigs = targets.iter().map(|(_, t)| hermitian_eig(t.matrix())).collect::<Result<Vec<_>>>()?;
    let mut y = vec![0.0; d];
    for ((p, _), e) in targets.iter().zip(&target_eigs) {
        for (acc, v) in y.iter_mut().zip(&e.eigenvalues) {
            *acc += p * v.max(0.0);
        }
    }
    let chain = t_transform_chain(&x, &y)?;
    let terms = birkhoff_decompose(&chain_product(&chain, d))?;
    let rank = x.iter().filter(|&&v| v > KERNEL_TOL).count();

    let v_adj = source.eigenvectors.adjoint();
    let mut labels = Vec::new();
    let mut ops = Vec::new();
    let mut branches = Vec::new();
    for (i, ((p, _), eig)) in targets.iter().zip(&target_eigs).enumerate() {
        if *p == 0.0 {
            continue;
        }
        for (j, (q, perm)) in terms.iter().enumerate() {
            let weight = (p * q).sqrt();
            // Row π(k) of P_j† X is row k of X.
            let mut core = ComplexMatrix::zeros(d, d);
            for (row, &src) in perm.iter().enumerate() {
                let lam = eig.eigenvalues[src].max(0.0);
                if row >= rank {
                    if p * q * lam > 1e-9 {
                        return Err(Error::SingularDensity);
                    }
                    continue;
                }
                let scale = weight * lam.sqrt() / x[row].sqrt();
                for col in 0..d {
                    core[(src, col)] = v_adj[(row, col)] * scale;
                }
            }
            ops.push(&eig.eigenvectors * &core);
            labels.push(format!("{i}:{j}"));
            branches.push(TransformBranch { target: i, weight: *q, permutation: perm.clone(), probability: p * q });
        }
    }
    let has_kernel_projector = rank < d;
    if has_kernel_projector {
        let mut kernel = ComplexMatrix::zeros(d, d);
        for k in rank..d {
            let v = source.eigenvector(k);
            kernel = &kernel + &ComplexMatrix::projector(&v);
        }
        ops.push(kernel);
        labels.push("kernel".into());
    }
    Ok(TransformMeasurement { measurement: Measurement::new(labels, ops)?, branches, has_kernel_projector })
}

/// Largest `‖M ρ M† − p_i q_j ρ_i‖_max` over all branches.
pub fn transform_residual(tm: &TransformMeasurement, rho: &DensityOperator, targets: &[(f64, DensityOperator)]) -> f64 {
    tm.branches
        .iter()
        .zip(tm.measurement.operators())
        .map(|(b, m)| {
            let out = &(m * rho.matrix()) * &m.adjoint();
            out.max_abs_diff(&targets[b.target].1.matrix().scale_real(b.probability))
        })
        .fold(0.0, f64::max)
}

/// Diagonal density operator with the given spectrum.
pub fn diagonal_density(p: &[f64]) -> Result<DensityOperator> {
    crate::states::validate_density(&ComplexMatrix::from_diag(p))
}
