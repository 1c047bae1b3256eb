//! Fixed spaces, mean ergodic projections, and Cesàro power averages of
//! contractions on `ℂ^h`.

use crate::error::{Error, Result};
use crate::linalg::{identity, max_abs, null_space, spectral_norm, CMat, Complex};

/// Default relative singular-value cutoff for `ker(T − I)`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Slack allowed on `‖T‖ ≤ 1`.
pub const CONTRACTION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    matrix: CMat,
    norm: f64,
}

impl Contraction {
    pub fn new(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() {
            return Err(crate::error::shape(
                "square matrix",
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        let norm = spectral_norm(&matrix);
        if norm > 1.0 + CONTRACTION_SLACK {
            return Err(Error::NotContraction { norm });
        }
        Ok(Contraction { matrix, norm })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicProjection {
    pub matrix: CMat,
    pub rank: usize,
    /// `max(|P − P_{T*}|, |PT − P|, |TP − P|)`, measured entrywise.
    pub consistency_defect: f64,
}

/// Orthonormal basis of `ker(T − I)`, cutting singular values of `T − I` at
/// `tol·max(1, ‖T‖)`.
pub fn fixed_space(t: &Contraction, tol: f64) -> CMat {
    fixed_space_of(&t.matrix, tol * t.norm.max(1.0))
}

fn fixed_space_of(m: &CMat, threshold: f64) -> CMat {
    null_space(&(m - identity(m.nrows())), threshold)
}

/// Orthogonal projection onto `fix(T)`, computed spectrally and checked
/// against `fix(T*)` and `PT = TP = P`.
pub fn mean_ergodic_projection(t: &Contraction, tol: f64) -> Result<ErgodicProjection> {
    let threshold = tol * t.norm.max(1.0);
    let f = fixed_space_of(&t.matrix, threshold);
    let f_adj = fixed_space_of(&t.matrix.adjoint(), threshold);
    let p = &f * f.adjoint();
    let p_adj = &f_adj * f_adj.adjoint();
    let defect = if f.ncols() != f_adj.ncols() {
        f64::INFINITY
    } else {
        max_abs(&(&p - &p_adj))
            .max(max_abs(&(&p * &t.matrix - &p)))
            .max(max_abs(&(&t.matrix * &p - &p)))
    };
    // eigenvectors resolved at cutoff `threshold` are accurate to about its square root
    if defect > threshold.sqrt().max(1e-8) {
        return Err(Error::FixedSpaceMismatch { defect });
    }
    Ok(ErgodicProjection {
        matrix: p,
        rank: f.ncols(),
        consistency_defect: defect,
    })
}

/// `(1/J) Σ_{j=1}^{J} T^j`.
pub fn cesaro_power_avg(t: &CMat, j_terms: u64) -> CMat {
    assert!(j_terms >= 1);
    let n = t.nrows();
    let mut acc = CMat::zeros(n, n);
    let mut pow = identity(n);
    for _ in 0..j_terms {
        pow = t * pow;
        acc += &pow;
    }
    acc / Complex::new(j_terms as f64, 0.0)
}

/// `(J, ‖C_J − P‖)` for each requested `J`, in the order given.
pub fn met_convergence_trace(t: &Contraction, j_list: &[u64], tol: f64) -> Result<Vec<(u64, f64)>> {
    let p = mean_ergodic_projection(t, tol)?;
    let mut order: Vec<usize> = (0..j_list.len()).collect();
    order.sort_by_key(|&i| j_list[i]);
    let n = t.dim();
    let mut acc = CMat::zeros(n, n);
    let mut pow = identity(n);
    let mut done = 0u64;
    let mut out = vec![(0u64, 0.0); j_list.len()];
    for i in order {
        let j = j_list[i];
        if j == 0 {
            return Err(Error::PayloadInvalid("J must be positive".into()));
        }
        while done < j {
            pow = &t.matrix * pow;
            acc += &pow;
            done += 1;
        }
        let avg = &acc / Complex::new(j as f64, 0.0);
        out[i] = (j, spectral_norm(&(avg - &p.matrix)));
    }
    Ok(out)
}

/// `|(1/J) Σ_{j=1}^{J} λ^j|`, the Cesàro average of a single eigenvalue.
pub fn eigenvalue_average(lambda: Complex, j_terms: u64) -> f64 {
    let mut acc = Complex::new(0.0, 0.0);
    let mut pow = Complex::new(1.0, 0.0);
    for _ in 0..j_terms {
        pow *= lambda;
        acc += pow;
    }
    acc.norm() / j_terms as f64
}

/// Limit of the Cesàro averages `(1/N) Σ_{n<N} Q^n` for a power-bounded `Q`
/// without Jordan blocks at eigenvalue 1: the projection onto `ker(Q − I)`
/// along the range of `Q − I`.
pub fn cesaro_limit(q: &CMat, tol: f64) -> Result<CMat> {
    let threshold = tol * spectral_norm(q).max(1.0);
    let k = fixed_space_of(q, threshold);
    let l = fixed_space_of(&q.adjoint(), threshold);
    if k.ncols() != l.ncols() {
        return Err(Error::FixedSpaceMismatch {
            defect: (k.ncols() as f64 - l.ncols() as f64).abs(),
        });
    }
    if k.ncols() == 0 {
        return Ok(CMat::zeros(q.nrows(), q.ncols()));
    }
    let pairing = l.adjoint() * &k;
    let inv = pairing.try_inverse().ok_or(Error::FixedSpaceMismatch {
        defect: f64::INFINITY,
    })?;
    Ok(&k * inv * l.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_unitary, CVec, ONE, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[Complex]) -> CMat {
        CMat::from_diagonal(&CVec::from_vec(values.to_vec()))
    }

    fn cyclic(k: usize) -> CMat {
        CMat::from_fn(k, k, |i, j| if j == (i + 1) % k { ONE } else { ZERO })
    }

    #[test]
    fn fixed_spaces() {
        let t = Contraction::new(identity(3)).unwrap();
        assert_eq!(fixed_space(&t, DEFAULT_TOL).ncols(), 3);

        let rot = Contraction::new(diag(&[
            ONE,
            Complex::from_polar(1.0, std::f64::consts::FRAC_PI_3),
        ]))
        .unwrap();
        let f = fixed_space(&rot, DEFAULT_TOL);
        assert_eq!(f.ncols(), 1);
        assert!((f[(0, 0)].norm() - 1.0).abs() < 1e-12);

        let k = 5;
        let f = fixed_space(&Contraction::new(cyclic(k)).unwrap(), DEFAULT_TOL);
        assert_eq!(f.ncols(), 1);
        let first = f[(0, 0)];
        assert!((0..k).all(|i| (f[(i, 0)] - first).norm() < 1e-12));
    }

    #[test]
    fn projections() {
        let p =
            mean_ergodic_projection(&Contraction::new(identity(2)).unwrap(), DEFAULT_TOL).unwrap();
        assert!(max_abs(&(p.matrix - identity(2))) < 1e-12);

        let rot = Contraction::new(diag(&[ONE, Complex::from_polar(1.0, 0.4)])).unwrap();
        let p = mean_ergodic_projection(&rot, DEFAULT_TOL).unwrap();
        assert!(max_abs(&(p.matrix - diag(&[ONE, ZERO]))) < 1e-12);

        let k = 6;
        let p =
            mean_ergodic_projection(&Contraction::new(cyclic(k)).unwrap(), DEFAULT_TOL).unwrap();
        let expect = CMat::from_element(k, k, c(1.0 / k as f64, 0.0));
        assert!(max_abs(&(p.matrix - expect)) < 1e-12);
    }

    #[test]
    fn rejects_expanding_matrices() {
        let m = diag(&[c(1.5, 0.0), ONE]);
        assert!(matches!(
            Contraction::new(m),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn power_averages() {
        assert!(max_abs(&(cesaro_power_avg(&identity(3), 7) - identity(3))) < 1e-15);
        let minus = identity(2) * c(-1.0, 0.0);
        assert!(max_abs(&cesaro_power_avg(&minus, 2)) < 1e-15);
        let t = diag(&[ONE, c(0.0, 1.0)]);
        assert!(max_abs(&(cesaro_power_avg(&t, 4) - diag(&[ONE, ZERO]))) < 1e-15);
    }

    #[test]
    fn convergence_traces() {
        let id = Contraction::new(identity(2)).unwrap();
        let trace = met_convergence_trace(&id, &[1, 10, 100], DEFAULT_TOL).unwrap();
        assert!(trace.iter().all(|&(_, d)| d < 1e-14));

        let theta = std::f64::consts::FRAC_PI_2;
        let lambda = Complex::from_polar(1.0, theta);
        let t = Contraction::new(diag(&[ONE, lambda])).unwrap();
        let js = [1, 2, 3, 5, 10, 33, 100];
        let trace = met_convergence_trace(&t, &js, DEFAULT_TOL).unwrap();
        for &(j, delta) in &trace {
            assert!((delta - eigenvalue_average(lambda, j)).abs() < 1e-12);
            assert!(delta <= 2.0 / (j as f64 * (ONE - lambda).norm()) + 1e-12);
        }
        // order of the request is preserved
        let shuffled = met_convergence_trace(&t, &[10, 1], DEFAULT_TOL).unwrap();
        assert_eq!(shuffled[0].0, 10);
        assert_eq!(shuffled[1].0, 1);
    }

    #[test]
    fn random_unitary_with_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 6);
        let angles = [0.0, 0.0, 0.5, 1.3, -2.0, 3.0];
        let d = diag(&angles.map(|a| Complex::from_polar(1.0, a)));
        let t = Contraction::new(&u * d * u.adjoint()).unwrap();
        let gap = angles
            .iter()
            .filter(|&&a| a != 0.0)
            .map(|&a| (ONE - Complex::from_polar(1.0, a)).norm())
            .fold(f64::INFINITY, f64::min);
        let p = mean_ergodic_projection(&t, DEFAULT_TOL).unwrap();
        assert_eq!(p.rank, 2);
        let trace = met_convergence_trace(&t, &[10_000], DEFAULT_TOL).unwrap();
        assert!(trace[0].1 <= 2.0 / (10_000.0 * gap) * 1.01);
        assert!(trace[0].1 < 1e-2);
    }

    #[test]
    fn cesaro_limit_of_stochastic_transpose() {
        // two-state chain; the limit maps any distribution to the stationary one
        let p = CMat::from_row_slice(2, 2, &[c(0.9, 0.0), c(0.1, 0.0), c(0.4, 0.0), c(0.6, 0.0)]);
        let lim = cesaro_limit(&p.transpose(), DEFAULT_TOL).unwrap();
        let start = CVec::from_vec(vec![ONE, ZERO]);
        let pi = &lim * start;
        assert!((pi[0] - c(0.8, 0.0)).norm() < 1e-12);
        assert!((pi[1] - c(0.2, 0.0)).norm() < 1e-12);

        // periodic chains only converge in the Cesàro sense
        let flip = cyclic(3);
        let lim = cesaro_limit(&flip.transpose(), DEFAULT_TOL).unwrap();
        let brute = (0..3).fold(CMat::zeros(3, 3), |acc, n| {
            acc + (0..n).fold(identity(3), |m, _| flip.transpose() * m)
        }) / c(3.0, 0.0);
        assert!(max_abs(&(lim - brute)) < 1e-12);
    }
}
