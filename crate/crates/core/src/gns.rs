//! Quotient Hilbert spaces of positive semidefinite forms and the operators
//! they inherit.
//!
//! A form on an ambient space `ℂ^n` is given by its Gram matrix `G` with
//! `form(y, z) = z* G y`. Keeping the eigenpairs of `G` above a relative
//! cutoff, coordinates `q(y) = Λ^{1/2} U* y` carry the form as the standard
//! inner product on `ℂ^h`.

use crate::cstar::{AlgebraElement, FiniteCStarAlgebra, State};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, identity, max_abs, spectral_norm, CMat, CVec, Complex};

/// Relative eigenvalue cutoff used when none is given.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GnsSpace {
    pub ambient_dim: usize,
    pub gram: CMat,
    /// `ambient_dim × h`; columns are representatives of an orthonormal basis.
    pub basis: CMat,
    /// `h × ambient_dim`; the quotient map in coordinates.
    pub quotient: CMat,
    pub h: usize,
    pub tol_used: f64,
    /// Eigenvalues of the Gram matrix, ascending.
    pub spectrum: Vec<f64>,
    /// Orthonormal eigenvectors spanning the discarded (null) directions.
    pub null_basis: CMat,
}

/// An operator on `ℂ^h` induced from the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedOperator {
    pub matrix: CMat,
    pub norm_bound: f64,
    /// Largest discarded-direction image, i.e. how far the null space leaks.
    pub leakage: f64,
}

impl InducedOperator {
    /// `max |M*M − I|`; zero exactly when the operator is an isometry.
    pub fn unitarity_defect(&self) -> f64 {
        let m = &self.matrix;
        max_abs(&(m.adjoint() * m - identity(m.ncols())))
    }
}

/// Gram matrix of `(y, z) ↦ μ(z* y)` in the flat matrix-unit basis.
pub fn state_gram(alg: &FiniteCStarAlgebra, mu: &State) -> CMat {
    let n = alg.dim();
    let units: Vec<AlgebraElement> = (0..n).map(|a| alg.basis_element(a)).collect();
    CMat::from_fn(n, n, |b, a| {
        let prod = units[b]
            .adjoint()
            .multiply(&units[a])
            .expect("same algebra");
        mu.eval(&prod).expect("same algebra")
    })
}

impl GnsSpace {
    /// Builds the quotient space of the form with Gram matrix `gram`.
    /// A zero-dimensional result is allowed.
    pub fn new(gram: &CMat, tol: f64) -> Result<Self> {
        let n = gram.nrows();
        if !gram.is_square() {
            return Err(crate::error::shape(
                "square Gram matrix",
                format!("{}x{}", n, gram.ncols()),
            ));
        }
        let scale = max_abs(gram).max(f64::MIN_POSITIVE);
        let asymmetry = max_abs(&(gram - gram.adjoint()));
        if asymmetry > 1e-10 * scale.max(1.0) {
            return Err(Error::NotHermitian { asymmetry });
        }
        let (spectrum, vectors) = hermitian_eigen(gram);
        let lambda_max = spectrum.last().copied().unwrap_or(0.0).max(0.0);
        let largest_magnitude = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let psd_threshold = tol * lambda_max.max(largest_magnitude);
        if let Some(&lo) = spectrum.first() {
            if lo < -psd_threshold {
                return Err(Error::NotPsd {
                    min_eigenvalue: lo,
                    threshold: psd_threshold,
                });
            }
        }
        let cutoff = tol * lambda_max;
        let kept: Vec<usize> = (0..n)
            .filter(|&i| lambda_max > 0.0 && spectrum[i] > cutoff)
            .collect();
        let dropped: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
        let h = kept.len();
        let quotient = CMat::from_fn(h, n, |r, col| {
            vectors[(col, kept[r])].conj() * spectrum[kept[r]].sqrt()
        });
        let basis = CMat::from_fn(n, h, |r, col| {
            vectors[(r, kept[col])] / spectrum[kept[col]].sqrt()
        });
        let null_basis = CMat::from_fn(n, dropped.len(), |r, col| vectors[(r, dropped[col])]);
        Ok(GnsSpace {
            ambient_dim: n,
            gram: gram.clone(),
            basis,
            quotient,
            h,
            tol_used: tol,
            spectrum,
            null_basis,
        })
    }

    /// The GNS space of a state on a finite C*-algebra.
    pub fn from_state(alg: &FiniteCStarAlgebra, mu: &State, tol: f64) -> Result<Self> {
        Self::new(&state_gram(alg, mu), tol)
    }

    pub fn lambda_max(&self) -> f64 {
        self.spectrum.last().copied().unwrap_or(0.0).max(0.0)
    }

    /// `form(y, z) = z* G y`.
    pub fn form(&self, y: &CVec, z: &CVec) -> Complex {
        (z.adjoint() * &self.gram * y)[(0, 0)]
    }

    /// Coordinates of the class `[y]`.
    pub fn coords(&self, y: &CVec) -> CVec {
        &self.quotient * y
    }

    /// `|‖q(y)‖² − form(y,y)|`, the isometry defect of the quotient map at `y`.
    pub fn isometry_defect_at(&self, y: &CVec) -> f64 {
        let q = self.coords(y);
        (q.norm_squared() - self.form(y, y).re).abs()
    }

    fn leakage(&self, map: &CMat) -> f64 {
        let image = &self.quotient * map * &self.null_basis;
        (0..image.ncols())
            .map(|c| image.column(c).norm())
            .fold(0.0, f64::max)
    }

    fn leakage_threshold(&self, map_norm: f64, tol: f64) -> f64 {
        // discarded directions carry up to tol_used·λ_max of form mass
        let carried = (self.tol_used * self.lambda_max()).sqrt() * map_norm.max(1.0);
        10.0 * carried + tol * self.lambda_max().sqrt().max(1.0)
    }

    /// The operator `[y] ↦ [Φy]`.
    ///
    /// Requires that `Φ` keeps the null space inside the null space and does
    /// not increase the form: `form(Φy, Φy) ≤ form(y, y)`, which is what an
    /// invariant state gives for a Schwarz map.
    pub fn induce_operator(&self, phi: &CMat, tol: f64) -> Result<InducedOperator> {
        let n = self.ambient_dim;
        if phi.shape() != (n, n) {
            return Err(crate::error::shape(
                format!("{n}x{n}"),
                format!("{}x{}", phi.nrows(), phi.ncols()),
            ));
        }
        let phi_norm = spectral_norm(phi);
        let leakage = self.leakage(phi);
        let threshold = self.leakage_threshold(phi_norm, tol);
        if leakage > threshold {
            return Err(Error::NullSpaceNotInvariant { leakage, threshold });
        }
        let growth = phi.adjoint() * &self.gram * phi - &self.gram;
        let (vals, _) = hermitian_eigen(&growth);
        let defect = vals.last().copied().unwrap_or(0.0);
        if defect > tol * self.lambda_max() * phi_norm.powi(2).max(1.0) {
            return Err(Error::NotInvariantState { defect });
        }
        let matrix = &self.quotient * phi * &self.basis;
        let norm_bound = spectral_norm(&matrix);
        Ok(InducedOperator {
            matrix,
            norm_bound,
            leakage,
        })
    }

    /// Left multiplication `[y] ↦ [x·y]` on the GNS space of a state.
    pub fn left_regular(
        &self,
        alg: &FiniteCStarAlgebra,
        x: &AlgebraElement,
        tol: f64,
    ) -> Result<InducedOperator> {
        alg.check(x)?;
        let l = alg.left_multiplication(x);
        let leakage = self.leakage(&l);
        let threshold = self.leakage_threshold(x.norm(), tol);
        if leakage > threshold {
            return Err(Error::NullSpaceNotInvariant { leakage, threshold });
        }
        let matrix = &self.quotient * l * &self.basis;
        let norm_bound = spectral_norm(&matrix);
        Ok(InducedOperator {
            matrix,
            norm_bound,
            leakage,
        })
    }

    /// Coordinates of `[1]` given the ambient coordinates of the unit.
    pub fn vector_of_unit(&self, unit: &CVec) -> CVec {
        self.coords(unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::{implemented_operator, AlgebraMap};
    use crate::linalg::{c, random_unitary, random_vector, ONE, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Rank by Gaussian elimination with partial pivoting on the raw Gram
    /// matrix, independent of the eigen-solver.
    fn elimination_rank(m: &CMat, tol: f64) -> usize {
        let mut a = m.clone();
        let (rows, cols) = a.shape();
        let scale = max_abs(m).max(1e-300);
        let mut rank = 0;
        for col in 0..cols {
            let pivot =
                (rank..rows).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()));
            let Some(p) = pivot else { break };
            if a[(p, col)].norm() <= tol * scale {
                continue;
            }
            a.swap_rows(p, rank);
            for r in rank + 1..rows {
                let f = a[(r, col)] / a[(rank, col)];
                for k in col..cols {
                    let v = a[(rank, k)];
                    a[(r, k)] -= f * v;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn uniform_state_on_three_points() {
        let alg = FiniteCStarAlgebra::commutative(3);
        let mu = State::probability(&alg, &[1.0 / 3.0; 3]).unwrap();
        let g = GnsSpace::from_state(&alg, &mu, DEFAULT_TOL).unwrap();
        assert_eq!(g.h, 3);
        assert!(max_abs(&(g.gram.clone() - identity(3) * c(1.0 / 3.0, 0.0))) < 1e-15);
        let one = g.vector_of_unit(&alg.flatten(&alg.unit()));
        assert!((one.norm() - 1.0).abs() < 1e-12);
        // all entries have modulus 1/√3
        assert!(one
            .iter()
            .all(|z| (z.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn corner_state_on_m2_keeps_first_column() {
        let alg = FiniteCStarAlgebra::matrices(2);
        let mu = State::new(
            &alg,
            vec![CMat::from_diagonal(&CVec::from_vec(vec![ONE, ZERO]))],
        )
        .unwrap();
        let g = GnsSpace::from_state(&alg, &mu, DEFAULT_TOL).unwrap();
        assert_eq!(g.h, 2);
        assert_eq!(elimination_rank(&g.gram, 1e-12), 2);
        // y with zero first column lies in the null space
        let y = CVec::from_vec(vec![ZERO, ONE, ZERO, c(2.0, 1.0)]);
        assert!(g.coords(&y).norm() < 1e-12);
        let unit = g.vector_of_unit(&alg.flatten(&alg.unit()));
        assert!((unit.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tracial_state_is_faithful() {
        for d in 1..4 {
            let alg = FiniteCStarAlgebra::matrices(d);
            let g = GnsSpace::from_state(&alg, &State::tracial(&alg), DEFAULT_TOL).unwrap();
            assert_eq!(g.h, d * d);
            let unit = g.vector_of_unit(&alg.flatten(&alg.unit()));
            assert!((unit.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quotient_is_an_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let alg = FiniteCStarAlgebra::new(vec![2, 1]).unwrap();
        let rho = vec![
            CMat::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.1), c(0.1, -0.1), c(0.2, 0.0)]),
            CMat::from_element(1, 1, c(0.5, 0.0)),
        ];
        let mu = State::new(&alg, rho).unwrap();
        let g = GnsSpace::from_state(&alg, &mu, DEFAULT_TOL).unwrap();
        assert!(max_abs(&(&g.quotient * &g.basis - identity(g.h))) < 1e-10);
        for _ in 0..20 {
            let y = random_vector(&mut rng, alg.dim());
            let z = random_vector(&mut rng, alg.dim());
            assert!(g.isometry_defect_at(&y) < 1e-9 * g.lambda_max());
            let lhs = g.coords(&y).dot(&g.coords(&z).conjugate());
            assert!((lhs - g.form(&y, &z)).norm() < 1e-9);
        }
    }

    #[test]
    fn exact_rank_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for r in 0..5 {
            let b = crate::linalg::random_matrix(&mut rng, 6, r);
            let gram = &b * b.adjoint();
            let g = GnsSpace::new(&gram, DEFAULT_TOL).unwrap();
            assert_eq!(g.h, r);
        }
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![ONE, c(-0.5, 0.0)]));
        assert!(matches!(
            GnsSpace::new(&m, DEFAULT_TOL),
            Err(Error::NotPsd { .. })
        ));
        let m = CMat::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            GnsSpace::new(&m, DEFAULT_TOL),
            Err(Error::NotHermitian { .. })
        ));
        let g = GnsSpace::new(&CMat::zeros(3, 3), DEFAULT_TOL).unwrap();
        assert_eq!(g.h, 0);
    }

    #[test]
    fn induced_identity_and_shift() {
        let alg = FiniteCStarAlgebra::commutative(4);
        let mu = State::probability(&alg, &[0.25; 4]).unwrap();
        let g = GnsSpace::from_state(&alg, &mu, DEFAULT_TOL).unwrap();
        let id = g.induce_operator(&identity(4), 1e-9).unwrap();
        assert!(max_abs(&(id.matrix - identity(4))) < 1e-12);

        let shift = AlgebraMap::cyclic_shift(4);
        let s = g.induce_operator(&shift.matrix, 1e-9).unwrap();
        assert!(s.unitarity_defect() < 1e-12);
        // |entries| are 0/1 because the gram is a multiple of the identity
        assert!(s
            .matrix
            .iter()
            .all(|z| z.norm() < 1e-12 || (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn induced_conjugation_spectrum() {
        let theta = 1.0;
        let v = CMat::from_diagonal(&CVec::from_vec(vec![ONE, Complex::from_polar(1.0, theta)]));
        let phi = implemented_operator(&v).unwrap();
        let alg = FiniteCStarAlgebra::matrices(2);
        let g = GnsSpace::from_state(&alg, &State::tracial(&alg), DEFAULT_TOL).unwrap();
        let s = g.induce_operator(&phi.matrix, 1e-9).unwrap();
        assert!(s.unitarity_defect() < 1e-12);
        // eigenvalue multiplicities: 1 twice, e^{±iθ} once each
        for (lambda, mult) in [
            (ONE, 2),
            (Complex::from_polar(1.0, theta), 1),
            (Complex::from_polar(1.0, -theta), 1),
        ] {
            let shifted = &s.matrix - identity(4) * lambda;
            assert_eq!(crate::linalg::null_space(&shifted, 1e-9).ncols(), mult);
        }
    }

    #[test]
    fn non_invariant_state_is_rejected() {
        // δ_0 on C(Z/3) is not shift invariant and the form grows on [δ_1]
        let alg = FiniteCStarAlgebra::commutative(3);
        let g =
            GnsSpace::from_state(&alg, &State::point_mass(&alg, 0).unwrap(), DEFAULT_TOL).unwrap();
        let shift = AlgebraMap::cyclic_shift(3);
        let err = g.induce_operator(&shift.matrix, 1e-9).unwrap_err();
        assert!(
            matches!(err, Error::NullSpaceNotInvariant { .. }),
            "{err:?}"
        );

        let mu = State::probability(&alg, &[0.5, 0.3, 0.2]).unwrap();
        let g = GnsSpace::from_state(&alg, &mu, DEFAULT_TOL).unwrap();
        let err = g.induce_operator(&shift.matrix, 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotInvariantState { .. }), "{err:?}");
    }

    #[test]
    fn left_regular_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alg = FiniteCStarAlgebra::new(vec![2, 1]).unwrap();
        let mu = State::new(
            &alg,
            vec![
                CMat::from_diagonal(&CVec::from_vec(vec![c(0.7, 0.0), ZERO])),
                CMat::from_element(1, 1, c(0.3, 0.0)),
            ],
        )
        .unwrap();
        let g = GnsSpace::from_state(&alg, &mu, DEFAULT_TOL).unwrap();
        let one = g.left_regular(&alg, &alg.unit(), 1e-9).unwrap();
        assert!(max_abs(&(one.matrix - identity(g.h))) < 1e-10);
        for _ in 0..100 {
            let x = alg.random_element(&mut rng);
            let y = alg.random_element(&mut rng);
            let lx = g.left_regular(&alg, &x, 1e-9).unwrap();
            let ly = g.left_regular(&alg, &y, 1e-9).unwrap();
            let lxy = g
                .left_regular(&alg, &x.multiply(&y).unwrap(), 1e-9)
                .unwrap();
            assert!(lx.norm_bound <= x.norm() + 1e-9);
            assert!(
                max_abs(&(&lx.matrix * &ly.matrix - &lxy.matrix))
                    < 1e-9 * (1.0 + x.norm() * y.norm())
            );
        }

        let comm = FiniteCStarAlgebra::commutative(3);
        let mu = State::probability(&comm, &[0.2, 0.3, 0.5]).unwrap();
        let g = GnsSpace::from_state(&comm, &mu, DEFAULT_TOL).unwrap();
        let f = comm.random_element(&mut rng);
        let lf = g.left_regular(&comm, &f, 1e-9).unwrap();
        // Gram is diagonal here, so the point-mass basis diagonalizes L_f
        let off: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| lf.matrix[(i, j)].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-12);
        let _ = random_unitary(&mut rng, 2);
    }
}
