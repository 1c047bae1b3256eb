//! Dense complex linear algebra helpers shared by the other modules.
//!
//! Inner products are linear in the first slot and conjugate-linear in the
//! second: `(a|b) = Σ a_i conj(b_i)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Complex = Complex64;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// `exp(2πi·turns)`.
pub fn cis_turns(turns: f64) -> Complex {
    let phase = std::f64::consts::TAU * turns;
    Complex::new(phase.cos(), phase.sin())
}

/// Fractional part of `alpha * m`, compensated with the rounding error of the
/// product so phases stay accurate when `m` is large (e.g. `n^2`).
pub fn frac_product(alpha: f64, m: f64) -> f64 {
    let p = alpha * m;
    let err = alpha.mul_add(m, -p);
    let f = (p - p.floor()) + err;
    f - f.floor()
}

pub fn inner(a: &CVec, b: &CVec) -> Complex {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sq(a: &CVec) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues in ascending order with matching eigenvector columns.
/// The input is symmetrized first.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the numerical kernel of `m` (square), using singular
/// values below `threshold`.
pub fn null_space(m: &CMat, threshold: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    // thin SVD of an n×n matrix still returns all n right singular vectors
    CMat::from_fn(n, keep.len(), |r, col| v_t[(keep[col], r)].conj())
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| random_complex(rng))
}

/// Haar-ish random unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = random_matrix(rng, n, n);
    let qr = g.qr();
    let (q, r) = qr.unpack();
    // fix column phases so the distribution does not depend on the QR convention
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// `‖V*V − I‖` measured entrywise.
pub fn isometry_defect(v: &CMat) -> f64 {
    max_abs(&(v.adjoint() * v - identity(v.ncols())))
}

/// Rank-revealing count of eigenvalues of a Hermitian matrix above `rel_tol·λ_max`.
pub fn hermitian_rank(m: &CMat, rel_tol: f64) -> usize {
    let (vals, _) = hermitian_eigen(m);
    let top = vals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    vals.iter().filter(|&&v| v > rel_tol * top).count()
}
