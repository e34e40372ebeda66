//! Seeded random generators for states and matrices, used by the oracles,
//! property tests and the command line.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numkernel::{c, inner, normalized, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample by the Box-Muller transform.
pub fn gaussian(r: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - r.gen::<f64>();
    let u2: f64 = r.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian(r: &mut impl Rng) -> Complex64 {
    c(gaussian(r), gaussian(r)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unit vector drawn uniformly from the complex sphere.
pub fn random_state_vector(r: &mut impl Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(r)).collect();
        if let Some(v) = normalized(&v, 1e-6) {
            return v;
        }
    }
}

/// Matrix with independent complex Gaussian entries.
pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(r)).collect();
    ComplexMatrix::new(rows, cols, data).expect("finite samples")
}

pub fn random_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(r, n, n).hermitian_part()
}

/// Random traceless matrix (not Hermitian in general).
pub fn random_traceless(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut m = random_matrix(r, n, n);
    let shift = m.trace() / n as f64;
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    m
}

/// Full-rank random density operator `G G† / Tr(G G†)`.
pub fn random_density(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(r, n, n);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_real(1.0 / t)
}

/// Random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    loop {
        let g = random_matrix(r, n, n);
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = g.column(j);
            for _ in 0..2 {
                for b in &basis {
                    let p = inner(b, &v);
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= p * y;
                    }
                }
            }
            match normalized(&v, 1e-6) {
                Some(v) => basis.push(v),
                None => break,
            }
        }
        if basis.len() == n {
            let mut u = ComplexMatrix::zeros(n, n);
            for (j, b) in basis.iter().enumerate() {
                u.set_column(j, b);
            }
            return u;
        }
    }
}

/// Random probability vector (normalized exponentials, i.e. uniform on the simplex).
pub fn random_probability_vector(r: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - r.gen::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

/// Random pair of orthonormal vectors of length `n`.
pub fn random_orthonormal_pair(r: &mut impl Rng, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let u = random_unitary(r, n);
    (u.column(0), u.column(1))
}

