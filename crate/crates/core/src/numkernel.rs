//! Dense complex linear algebra for small matrices.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. The eigensolver is a cyclic complex Jacobi method and the SVD
//! is one-sided (Hestenes) Jacobi, both accurate to near machine precision on
//! the dimensions used in this crate (at most 64).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `max |a - a†|` accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Shorthand for a complex number.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let cc = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != cc) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, cc, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Diagonal matrix with real entries.
    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = c(x, 0.0);
        }
        m
    }

    /// Column vector holding `v`.
    pub fn column_vector(v: &[Complex64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    /// Projector `|v⟩⟨v|` (not normalized).
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare(self.rows, self.cols))
        }
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().iter().sum()
    }

    /// Matrix product, checking inner dimensions.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(m)
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `|a - a†|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Largest entry of `|a†a - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let g = &self.adjoint() * self;
        g.max_abs_diff(&Self::identity(self.cols))
    }

    /// Copy of the `rows x cols` block starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        m
    }

    /// Returns the Hermitian part `(a + a†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] to get an error instead.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("incompatible matrix shapes")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("incompatible matrix shapes")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("incompatible matrix shapes")
    }
}

/// Inner product `⟨u|v⟩`, conjugating the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalized copy of `v`; `None` if its norm is below `tol`.
pub fn normalized(v: &[Complex64], tol: f64) -> Option<Vec<Complex64>> {
    let n = norm(v);
    (n > tol).then(|| v.iter().map(|z| z / n).collect())
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    m[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Which factor of a bipartite space to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

fn check_bipartite(rho: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<()> {
    let n = d_a * d_b;
    if d_a == 0 || d_b == 0 || rho.rows != n || rho.cols != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}x{n} operator for dims ({d_a},{d_b}), got {}x{}",
            rho.rows, rho.cols
        )));
    }
    Ok(())
}

/// Partial trace of an operator on `A ⊗ B` over the chosen factor.
pub fn partial_trace(rho: &ComplexMatrix, d_a: usize, d_b: usize, over: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(rho, d_a, d_b)?;
    Ok(match over {
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(d_a, d_a);
            for i in 0..d_a {
                for j in 0..d_a {
                    out[(i, j)] = (0..d_b).map(|k| rho[(i * d_b + k, j * d_b + k)]).sum();
                }
            }
            out
        }
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(d_b, d_b);
            for k in 0..d_b {
                for l in 0..d_b {
                    out[(k, l)] = (0..d_a).map(|i| rho[(i * d_b + k, i * d_b + l)]).sum();
                }
            }
            out
        }
    })
}

/// Transposes the A indices of an operator on `A ⊗ B`.
pub fn partial_transpose(rho: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(rho, d_a, d_b)?;
    let mut out = ComplexMatrix::zeros(rho.rows, rho.cols);
    for i in 0..d_a {
        for j in 0..d_a {
            for k in 0..d_b {
                for l in 0..d_b {
                    out[(i * d_b + k, j * d_b + l)] = rho[(j * d_b + k, i * d_b + l)];
                }
            }
        }
    }
    Ok(out)
}

fn multi_index(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    digits
}

fn flat_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

fn check_perm(dims: &[usize], perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::DimensionMismatch(format!("{perm:?} is not a permutation of {} factors", dims.len())));
    }
    Ok(())
}

/// Reorders the tensor factors of a vector: factor `perm[k]` of the input becomes factor `k` of the output.
pub fn permute_vec(v: &[Complex64], dims: &[usize], perm: &[usize]) -> Result<Vec<Complex64>> {
    check_perm(dims, perm)?;
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(Error::DimensionMismatch(format!("vector length {} for dims {dims:?}", v.len())));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = vec![ZERO; total];
    for (idx, &z) in v.iter().enumerate() {
        let digits = multi_index(idx, dims);
        let new_digits: Vec<usize> = perm.iter().map(|&p| digits[p]).collect();
        out[flat_index(&new_digits, &new_dims)] = z;
    }
    Ok(out)
}

/// Reorders the tensor factors of an operator, with the same convention as [`permute_vec`].
pub fn permute_subsystems(rho: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    check_perm(dims, perm)?;
    let total: usize = dims.iter().product();
    if rho.rows != total || rho.cols != total {
        return Err(Error::DimensionMismatch(format!("{}x{} operator for dims {dims:?}", rho.rows, rho.cols)));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map: Vec<usize> = (0..total)
        .map(|idx| {
            let digits = multi_index(idx, dims);
            let new_digits: Vec<usize> = perm.iter().map(|&p| digits[p]).collect();
            flat_index(&new_digits, &new_dims)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = rho[(i, j)];
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// 2x2 unitary that acts on columns `p, q` to cancel the (real-rotated) coupling `g`
/// between two directions whose "diagonal" weights are `app` and `aqq`.
fn jacobi_rotation(app: f64, aqq: f64, g: Complex64) -> [Complex64; 4] {
    let mag = g.norm();
    let phase = g / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let e = phase.conj();
    [c(cs, 0.0), c(sn, 0.0), -e * sn, e * cs]
}

fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, g: &[Complex64; 4]) {
    for i in 0..m.rows {
        let xp = m[(i, p)];
        let xq = m[(i, q)];
        m[(i, p)] = xp * g[0] + xq * g[2];
        m[(i, q)] = xp * g[1] + xq * g[3];
    }
}

fn rotate_rows_adjoint(m: &mut ComplexMatrix, p: usize, q: usize, g: &[Complex64; 4]) {
    for j in 0..m.cols {
        let xp = m[(p, j)];
        let xq = m[(q, j)];
        m[(p, j)] = g[0].conj() * xp + g[2].conj() * xq;
        m[(q, j)] = g[1].conj() * xp + g[3].conj() * xq;
    }
}

fn sort_descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    order
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Ties in the descending sort keep the order in which the solver produced them.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    let n = a.require_square()?;
    let dev = a.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = c(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                if g.norm() <= 1e-300 || g.norm() <= 1e-18 * scale {
                    continue;
                }
                let rot = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, g);
                rotate_columns(&mut m, p, q, &rot);
                rotate_rows_adjoint(&mut m, p, q, &rot);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = c(m[(p, p)].re, 0.0);
                m[(q, q)] = c(m[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, &rot);
            }
        }
    }
    let raw: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let order = sort_descending(&raw);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        vectors.set_column(k, &v.column(src));
    }
    Ok(HermitianEig { eigenvalues: order.iter().map(|&i| raw[i]).collect(), eigenvectors: vectors })
}

/// Thin singular value decomposition `a = u · diag(s) · vh`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k` matrix with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Nonnegative singular values in descending order.
    pub singular_values: Vec<f64>,
    /// `k x cols` matrix with orthonormal rows.
    pub vh: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for j in 0..k {
            for i in 0..us.rows() {
                us[(i, j)] *= self.singular_values[j];
            }
        }
        &us * &self.vh
    }

    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// Completes the columns of `u` flagged in `missing` to an orthonormal set.
fn complete_orthonormal(u: &mut ComplexMatrix, missing: &[bool]) {
    let m = u.rows();
    let mut basis: Vec<Vec<Complex64>> =
        (0..u.cols()).filter(|&j| !missing[j]).map(|j| u.column(j)).collect();
    let mut candidate = 0;
    for j in 0..u.cols() {
        if !missing[j] {
            continue;
        }
        loop {
            assert!(candidate < m, "ran out of basis vectors while completing");
            let mut e = vec![ZERO; m];
            e[candidate] = ONE;
            candidate += 1;
            for _ in 0..2 {
                for b in &basis {
                    let proj = inner(b, &e);
                    for (x, y) in e.iter_mut().zip(b) {
                        *x -= proj * y;
                    }
                }
            }
            if let Some(e) = normalized(&e, 1e-8) {
                u.set_column(j, &e);
                basis.push(e);
                break;
            }
        }
    }
}

fn svd_tall(a: &ComplexMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let eps = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for i in 0..m {
                    alpha += w[(i, p)].norm_sqr();
                    beta += w[(i, q)].norm_sqr();
                    gamma += w[(i, p)].conj() * w[(i, q)];
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let rot = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &rot);
                rotate_columns(&mut v, p, q, &rot);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| norm(&w.column(j))).collect();
    let order = sort_descending(&norms);
    let top = norms.iter().copied().fold(0.0, f64::max);
    let mut u = ComplexMatrix::zeros(m, n);
    let mut vh = ComplexMatrix::zeros(n, n);
    let mut missing = vec![false; n];
    let mut values = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        let s = norms[src];
        values.push(s);
        let col = w.column(src);
        if s > 1e-14 * top.max(1e-300) && s > 1e-300 {
            u.set_column(k, &col.iter().map(|z| z / s).collect::<Vec<_>>());
        } else {
            missing[k] = true;
        }
        for j in 0..n {
            vh[(k, j)] = v[(j, src)].conj();
        }
    }
    complete_orthonormal(&mut u, &missing);
    Svd { u, singular_values: values, vh }
}

/// Singular value decomposition by one-sided Jacobi rotations.
pub fn svd(a: &ComplexMatrix) -> Svd {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint());
        Svd { u: t.vh.adjoint(), singular_values: t.singular_values, vh: t.u.adjoint() }
    }
}

/// `Tr √(a†a)`, the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    a.require_square()?;
    Ok(svd(a).singular_values.iter().sum())
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(a)?.reconstruct_with(f))
}

/// Square root of a positive semidefinite matrix; eigenvalues within `-tol` are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let min = eig.min_eigenvalue();
    if min < -tol {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    let mut m = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .expect("non-empty range");
        if m[(pivot, col)].norm() <= 1e-14 * scale {
            return Err(Error::Singular);
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
                inv.data.swap(pivot * n + j, col * n + j);
            }
        }
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[(i, col)];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let mj = m[(col, j)];
                let ij = inv[(col, j)];
                m[(i, j)] -= f * mj;
                inv[(i, j)] -= f * ij;
            }
        }
    }
    Ok(inv)
}

/// Determinant by LU elimination with partial pivoting.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    let n = a.require_square()?;
    let mut m = a.clone();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .expect("non-empty range");
        if m[(pivot, col)] == ZERO {
            return Ok(ZERO);
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for i in (col + 1)..n {
            let f = m[(i, col)] / d;
            for j in col..n {
                let mj = m[(col, j)];
                m[(i, j)] -= f * mj;
            }
        }
    }
    Ok(det)
}
