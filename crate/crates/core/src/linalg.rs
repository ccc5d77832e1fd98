//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    // symmetrize to kill round-off asymmetry before the solver sees it
    let h = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let h = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Orthonormalizes the span of a set of vectors given only their Gram matrix.
///
/// Returns `X` (n × k) such that `|e_a⟩ = Σ_i X[i,a] |v_i⟩` is orthonormal.
/// Directions with Gram eigenvalue below `rel_cutoff · λ_max` are dropped.
pub fn gram_orthonormalizer(gram: &DMatrix<C64>, rel_cutoff: f64) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigh(gram);
    let lmax = vals.iter().cloned().fold(0.0_f64, f64::max);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&k| vals[k] > rel_cutoff * lmax && vals[k] > 0.0)
        .collect();
    let n = gram.nrows();
    DMatrix::from_fn(n, keep.len(), |i, a| {
        vecs[(i, keep[a])] / vals[keep[a]].sqrt()
    })
}

/// Standard symplectic form for `modes` modes in (x₁, p₁, x₂, p₂, …) ordering.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Principal square root of a symmetric positive semidefinite matrix.
pub fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = symmetric_eigh(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0).sqrt()));
    &vecs * DMatrix::from_diagonal(&d) * vecs.transpose()
}

/// Symplectic eigenvalues (ascending, one per mode) of a covariance matrix.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let n = cov.nrows();
    let modes = n / 2;
    let root = sqrt_psd(cov);
    let omega = symplectic_form(modes);
    let m = &root * omega * &root;
    // i·M is Hermitian with eigenvalues ±ν
    let h = DMatrix::from_fn(n, n, |i, j| C64::new(0.0, m[(i, j)]));
    let (vals, _) = hermitian_eigh(&h);
    let mut pos: Vec<f64> = vals[modes..].iter().map(|v| v.abs()).collect();
    pos.sort_by(f64::total_cmp);
    pos
}

/// `x·ln x` with the 0·ln 0 = 0 convention, clamping tiny negatives.
pub fn entropy_term(p: f64) -> f64 {
    if p <= 1e-300 {
        0.0
    } else {
        -p * p.ln()
    }
}
