//! Dense complex matrix helpers shared by the simulation modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `exp(-i * angle * generator)` for a Hermitian generator, via its spectral
/// decomposition. The result is unitary to working precision.
pub fn hermitian_exp(generator: &CMatrix, angle: f64) -> CMatrix {
    let n = generator.nrows();
    let eig = SymmetricEigen::new(generator.clone());
    let vecs = &eig.eigenvectors;
    let mut scaled = vecs.clone();
    for (col, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -angle * lambda);
        for row in 0..n {
            scaled[(row, col)] *= phase;
        }
    }
    scaled * vecs.adjoint()
}

/// Kronecker product `a ⊗ b` (row index of `a` is the slow index).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    max_abs_diff_identity(&prod)
}

pub fn max_abs_diff_identity(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let target = if r == col { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, col)] - c(target)).norm());
        }
    }
    worst
}

/// Largest entry of `|A - A†|`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..a.nrows() {
        for col in r..a.ncols() {
            worst = worst.max((a[(r, col)] - a[(col, r)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn trace(a: &CMatrix) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// `Tr[A† B]` without forming the product.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨u|A|v⟩`.
pub fn sandwich(u: &CVector, a: &CMatrix, v: &CVector) -> Complex64 {
    let av = a * v;
    u.dotc(&av)
}
