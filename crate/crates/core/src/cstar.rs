//! Finite-dimensional C*-algebras (direct sums of matrix blocks), states on
//! them, and linear maps with Markov / Schwarz checks.
//!
//! Elements are flattened block by block, each block row-major, giving the
//! "ambient" coordinates used by [`AlgebraMap`] and the GNS code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_part, identity, isometry_defect, max_abs, random_matrix,
    spectral_norm, CMat, CVec, Complex, ONE, ZERO,
};

/// Default absolute tolerance for positivity and Schwarz checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default number of random elements tried by [`AlgebraMap::is_markov_schwarz`].
pub const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteCStarAlgebra {
    block_dims: Vec<usize>,
}

impl FiniteCStarAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::PayloadInvalid(format!(
                "block dimensions must be a nonempty list of positive integers, got {block_dims:?}"
            )));
        }
        Ok(FiniteCStarAlgebra { block_dims })
    }

    /// `C(K)` with `|K| = points`.
    pub fn commutative(points: usize) -> Self {
        Self::new(vec![1; points]).expect("points must be positive")
    }

    /// The full matrix algebra `M_d`.
    pub fn matrices(d: usize) -> Self {
        Self::new(vec![d]).expect("d must be positive")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&d| d == 1)
    }

    /// Vector-space dimension `Σ d_b²`.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().map(|d| d * d).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.block_dims
            .iter()
            .map(|d| {
                let o = acc;
                acc += d * d;
                o
            })
            .collect()
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.block_dims.iter().map(|&d| identity(d)).collect(),
        }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.block_dims.iter().map(|&d| CMat::zeros(d, d)).collect(),
        }
    }

    pub fn element(&self, blocks: Vec<CMat>) -> Result<AlgebraElement> {
        let x = AlgebraElement { blocks };
        self.check(&x)?;
        Ok(x)
    }

    /// Indicator of point `k` in a commutative algebra, or more generally the
    /// unit of block `k`.
    pub fn block_unit(&self, k: usize) -> AlgebraElement {
        let mut x = self.zero();
        x.blocks[k] = identity(self.block_dims[k]);
        x
    }

    pub fn check(&self, x: &AlgebraElement) -> Result<()> {
        let dims: Vec<usize> = x.blocks.iter().map(|b| b.nrows()).collect();
        if dims != self.block_dims || x.blocks.iter().any(|b| !b.is_square()) {
            return Err(shape(
                format!("blocks {:?}", self.block_dims),
                format!("blocks {dims:?}"),
            ));
        }
        Ok(())
    }

    pub fn flatten(&self, x: &AlgebraElement) -> CVec {
        let mut out = Vec::with_capacity(self.dim());
        for b in &x.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    out.push(b[(i, j)]);
                }
            }
        }
        CVec::from_vec(out)
    }

    pub fn unflatten(&self, v: &CVec) -> Result<AlgebraElement> {
        if v.len() != self.dim() {
            return Err(shape(self.dim(), v.len()));
        }
        let blocks = self
            .block_dims
            .iter()
            .zip(self.offsets())
            .map(|(&d, o)| CMat::from_fn(d, d, |i, j| v[o + i * d + j]))
            .collect();
        Ok(AlgebraElement { blocks })
    }

    /// Matrix unit with a single 1 at flat coordinate `a`.
    pub fn basis_element(&self, a: usize) -> AlgebraElement {
        let mut v = CVec::zeros(self.dim());
        v[a] = ONE;
        self.unflatten(&v).expect("coordinate in range")
    }

    /// Matrix of `y ↦ x·y` in flat coordinates.
    pub fn left_multiplication(&self, x: &AlgebraElement) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for a in 0..n {
            let col = self.flatten(&x.multiply(&self.basis_element(a)).expect("same algebra"));
            m.set_column(a, &col);
        }
        m
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        AlgebraElement {
            blocks: self
                .block_dims
                .iter()
                .map(|&d| random_matrix(rng, d, d))
                .collect(),
        }
    }

    /// Random element rescaled to norm at most one.
    pub fn random_unit_ball<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        let x = self.random_element(rng);
        let n = x.norm();
        let r: f64 = rng.random_range(0.1..=1.0);
        if n > 0.0 {
            x.scale(Complex::new(r / n, 0.0))
        } else {
            x
        }
    }

    /// Random element of the form `y*y`, or a nonnegative function when the
    /// algebra is commutative.
    pub fn random_positive<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        let y = self.random_element(rng);
        y.adjoint().multiply(&y).expect("same algebra")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub blocks: Vec<CMat>,
}

/// Outcome of a positivity test with the offending block on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Positivity {
    pub holds: bool,
    pub block: Option<usize>,
    pub min_eigenvalue: f64,
    pub asymmetry: f64,
}

impl AlgebraElement {
    fn same_shape(&self, other: &AlgebraElement) -> Result<()> {
        let a: Vec<usize> = self.blocks.iter().map(|b| b.nrows()).collect();
        let b: Vec<usize> = other.blocks.iter().map(|b| b.nrows()).collect();
        if a != b {
            return Err(shape(format!("blocks {a:?}"), format!("blocks {b:?}")));
        }
        Ok(())
    }

    pub fn multiply(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.same_shape(other)?;
        Ok(AlgebraElement {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.same_shape(other)?;
        Ok(AlgebraElement {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    /// C*-norm: the largest spectral norm over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// Every block Hermitian within `tol` and with eigenvalues `≥ −tol`.
    pub fn is_positive(&self, tol: f64) -> Positivity {
        let mut worst = Positivity {
            holds: true,
            block: None,
            min_eigenvalue: f64::INFINITY,
            asymmetry: 0.0,
        };
        for (k, b) in self.blocks.iter().enumerate() {
            let asym = max_abs(&(b - b.adjoint()));
            let (vals, _) = hermitian_eigen(b);
            let lo = vals[0];
            worst.asymmetry = worst.asymmetry.max(asym);
            if lo < worst.min_eigenvalue {
                worst.min_eigenvalue = lo;
            }
            if worst.holds && (asym > tol || lo < -tol) {
                worst.holds = false;
                worst.block = Some(k);
                worst.min_eigenvalue = lo;
            }
        }
        worst
    }
}

/// A state given by one density block per algebra block:
/// `μ(x) = Σ_b tr(ρ_b x_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub densities: Vec<CMat>,
}

impl State {
    /// Validates Hermitian densities (1e−12), positivity (1e−10) and unit
    /// total trace (1e−12).
    pub fn new(alg: &FiniteCStarAlgebra, densities: Vec<CMat>) -> Result<Self> {
        Self::with_tolerance(alg, densities, 1e-12, 1e-10)
    }

    fn with_tolerance(
        alg: &FiniteCStarAlgebra,
        densities: Vec<CMat>,
        exact_tol: f64,
        psd_tol: f64,
    ) -> Result<Self> {
        alg.check(&AlgebraElement {
            blocks: densities.clone(),
        })?;
        let mut trace = ZERO;
        for (k, rho) in densities.iter().enumerate() {
            let asym = max_abs(&(rho - rho.adjoint()));
            if asym > exact_tol {
                return Err(Error::NotAState(format!(
                    "density {k} is not Hermitian (asymmetry {asym:e})"
                )));
            }
            let (vals, _) = hermitian_eigen(rho);
            if vals[0] < -psd_tol {
                return Err(Error::NotAState(format!(
                    "density {k} has negative eigenvalue {:e}",
                    vals[0]
                )));
            }
            trace += rho.trace();
        }
        if (trace - ONE).norm() > exact_tol {
            return Err(Error::NotAState(format!(
                "total trace is {trace}, expected 1"
            )));
        }
        Ok(State {
            densities: densities.iter().map(hermitian_part).collect(),
        })
    }

    /// Normalized trace `x ↦ Σ_b tr(x_b) / Σ_b d_b`.
    pub fn tracial(alg: &FiniteCStarAlgebra) -> Self {
        let total: usize = alg.block_dims().iter().sum();
        State {
            densities: alg
                .block_dims()
                .iter()
                .map(|&d| identity(d) / Complex::new(total as f64, 0.0))
                .collect(),
        }
    }

    /// Evaluation at point `k` of a commutative algebra (unit mass on block `k`).
    pub fn point_mass(alg: &FiniteCStarAlgebra, k: usize) -> Result<Self> {
        if k >= alg.block_dims().len() || alg.block_dims()[k] != 1 {
            return Err(Error::PayloadInvalid(format!(
                "no one-dimensional block at index {k}"
            )));
        }
        let mut densities: Vec<CMat> = alg
            .block_dims()
            .iter()
            .map(|&d| CMat::zeros(d, d))
            .collect();
        densities[k][(0, 0)] = ONE;
        Ok(State { densities })
    }

    /// Probability vector on a commutative algebra.
    pub fn probability(alg: &FiniteCStarAlgebra, weights: &[f64]) -> Result<Self> {
        if !alg.is_commutative() {
            return Err(Error::PayloadInvalid(
                "probability vectors need a commutative algebra".into(),
            ));
        }
        let densities = weights
            .iter()
            .map(|&w| CMat::from_element(1, 1, Complex::new(w, 0.0)))
            .collect();
        Self::new(alg, densities)
    }

    /// Vector state `T ↦ (Tξ|ξ)` on `M_d`.
    pub fn vector_state(alg: &FiniteCStarAlgebra, xi: &CVec) -> Result<Self> {
        if alg.block_dims() != [xi.len()] {
            return Err(shape(
                format!("M_{}", xi.len()),
                format!("blocks {:?}", alg.block_dims()),
            ));
        }
        Self::new(alg, vec![xi * xi.adjoint()])
    }

    pub fn eval(&self, x: &AlgebraElement) -> Result<Complex> {
        if x.blocks.len() != self.densities.len()
            || x.blocks
                .iter()
                .zip(&self.densities)
                .any(|(a, b)| a.shape() != b.shape())
        {
            return Err(shape(
                "element matching the state",
                "different block structure",
            ));
        }
        Ok(self
            .densities
            .iter()
            .zip(&x.blocks)
            .map(|(r, b)| (r * b).trace())
            .sum())
    }

    /// Coefficients `r` with `μ(x) = Σ_k r_k·x_k` in flat coordinates.
    pub fn functional(&self) -> CVec {
        let mut out = Vec::new();
        for rho in &self.densities {
            for i in 0..rho.nrows() {
                for j in 0..rho.ncols() {
                    out.push(rho[(j, i)]);
                }
            }
        }
        CVec::from_vec(out)
    }

    pub(crate) fn from_functional(alg: &FiniteCStarAlgebra, r: &CVec, tol: f64) -> Result<Self> {
        let transposed = alg.unflatten(r)?;
        let densities = transposed.blocks.iter().map(|b| b.transpose()).collect();
        Self::with_tolerance(alg, densities, tol, tol)
    }

    /// Largest entry of `μ − ν` across density blocks.
    pub fn distance(&self, other: &State) -> f64 {
        self.densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }
}

/// Linear map on an algebra in flat coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraMap {
    pub algebra: FiniteCStarAlgebra,
    pub matrix: CMat,
    pub unital: bool,
    pub schwarz_verified: bool,
}

/// Result of [`AlgebraMap::is_markov_schwarz`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzVerdict {
    pub passed: bool,
    pub unital_defect: f64,
    pub trials: usize,
    /// Smallest eigenvalue of `Φ(x*x) − (Φx)*(Φx)` seen over all trials.
    pub worst_defect: f64,
    pub witness: Option<SchwarzWitness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzWitness {
    pub reason: String,
    pub element: AlgebraElement,
    pub block: Option<usize>,
    pub eigenvalue: f64,
}

impl AlgebraMap {
    pub fn from_matrix(algebra: &FiniteCStarAlgebra, matrix: CMat) -> Result<Self> {
        let n = algebra.dim();
        if matrix.shape() != (n, n) {
            return Err(shape(
                format!("{n}x{n}"),
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(AlgebraMap {
            algebra: algebra.clone(),
            matrix,
            unital: false,
            schwarz_verified: false,
        })
    }

    pub fn identity(algebra: &FiniteCStarAlgebra) -> Self {
        Self::from_matrix(algebra, identity(algebra.dim())).expect("square")
    }

    /// `x ↦ Φ(x)` built from an arbitrary rule on elements.
    pub fn from_fn(
        algebra: &FiniteCStarAlgebra,
        f: impl Fn(&AlgebraElement) -> AlgebraElement,
    ) -> Result<Self> {
        let n = algebra.dim();
        let mut m = CMat::zeros(n, n);
        for a in 0..n {
            let image = f(&algebra.basis_element(a));
            algebra.check(&image)?;
            m.set_column(a, &algebra.flatten(&image));
        }
        Self::from_matrix(algebra, m)
    }

    /// Blockwise conjugation `x_b ↦ V_b* x_b V_b`.
    pub fn blockwise_conjugation(algebra: &FiniteCStarAlgebra, vs: &[CMat]) -> Result<Self> {
        if vs.len() != algebra.block_dims().len()
            || vs
                .iter()
                .zip(algebra.block_dims())
                .any(|(v, &d)| v.shape() != (d, d))
        {
            return Err(shape(
                format!("square blocks {:?}", algebra.block_dims()),
                "other shapes",
            ));
        }
        for v in vs {
            let defect = isometry_defect(v);
            if defect > 1e-10 {
                return Err(Error::NotIsometry { defect });
            }
        }
        Self::from_fn(algebra, |x| AlgebraElement {
            blocks: x
                .blocks
                .iter()
                .zip(vs)
                .map(|(b, v)| v.adjoint() * b * v)
                .collect(),
        })
    }

    /// Row-stochastic (Markov) operator on `C(K)`: `(Pf)(k) = Σ_l P_kl f(l)`.
    pub fn stochastic(p: &CMat) -> Result<Self> {
        check_stochastic(p)?;
        let alg = FiniteCStarAlgebra::commutative(p.nrows());
        Self::from_matrix(&alg, p.clone())
    }

    /// Cyclic coordinate shift `(Sf)(k) = f(k+1 mod m)` on `C(ℤ/mℤ)`.
    pub fn cyclic_shift(m: usize) -> Self {
        let p = CMat::from_fn(m, m, |k, l| if l == (k + 1) % m { ONE } else { ZERO });
        Self::stochastic(&p).expect("permutation matrices are stochastic")
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.algebra.check(x)?;
        self.algebra
            .unflatten(&(&self.matrix * self.algebra.flatten(x)))
    }

    pub fn compose(&self, other: &AlgebraMap) -> Result<AlgebraMap> {
        if self.algebra != other.algebra {
            return Err(shape(
                format!("{:?}", self.algebra),
                format!("{:?}", other.algebra),
            ));
        }
        Self::from_matrix(&self.algebra, &self.matrix * &other.matrix)
    }

    pub fn power(&self, n: u64) -> AlgebraMap {
        let mut out = identity(self.algebra.dim());
        for _ in 0..n {
            out = &self.matrix * out;
        }
        Self::from_matrix(&self.algebra, out).expect("square")
    }

    /// `(1/N) Σ_{n=0}^{N−1} Φ^n`.
    pub fn cesaro_map(&self, n_terms: u64) -> AlgebraMap {
        assert!(n_terms >= 1);
        let n = self.algebra.dim();
        let mut acc = CMat::zeros(n, n);
        let mut pow = identity(n);
        for _ in 0..n_terms {
            acc += &pow;
            pow = &self.matrix * pow;
        }
        Self::from_matrix(&self.algebra, acc / Complex::new(n_terms as f64, 0.0)).expect("square")
    }

    pub fn unital_defect(&self) -> f64 {
        let unit = self.algebra.unit();
        let image = self.apply(&unit).expect("same algebra");
        image.sub(&unit).expect("same algebra").norm()
    }

    /// Sampling-based Markov–Schwarz check: unitality, then
    /// `Φ(x*x) − (Φx)*(Φx) ≥ 0` on `trials` seeded random `x` with `‖x‖ ≤ 1`.
    /// On commutative algebras positivity preservation is checked as well.
    pub fn is_markov_schwarz(&self, tol: f64, trials: usize, seed: u64) -> SchwarzVerdict {
        assert!(trials >= 1);
        let alg = &self.algebra;
        let unital_defect = self.unital_defect();
        let mut verdict = SchwarzVerdict {
            passed: true,
            unital_defect,
            trials,
            worst_defect: f64::INFINITY,
            witness: None,
        };
        if unital_defect > tol {
            verdict.passed = false;
            verdict.witness = Some(SchwarzWitness {
                reason: format!("not unital: |Φ(1) − 1| = {unital_defect:e}"),
                element: alg.unit(),
                block: None,
                eigenvalue: unital_defect,
            });
            return verdict;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let x = alg.random_unit_ball(&mut rng);
            let fx = self.apply(&x).expect("same algebra");
            let lhs = self
                .apply(&x.adjoint().multiply(&x).expect("same"))
                .expect("same");
            let defect = lhs
                .sub(&fx.adjoint().multiply(&fx).expect("same"))
                .expect("same");
            let pos = defect.is_positive(tol);
            verdict.worst_defect = verdict.worst_defect.min(pos.min_eigenvalue);
            if !pos.holds && verdict.witness.is_none() {
                verdict.passed = false;
                verdict.witness = Some(SchwarzWitness {
                    reason: "Schwarz inequality fails".into(),
                    element: x.clone(),
                    block: pos.block,
                    eigenvalue: pos.min_eigenvalue,
                });
            }
            if alg.is_commutative() {
                let p = alg.random_positive(&mut rng);
                let image = self.apply(&p).expect("same algebra");
                let pos = image.is_positive(tol * p.norm().max(1.0));
                if !pos.holds && verdict.witness.is_none() {
                    verdict.passed = false;
                    verdict.witness = Some(SchwarzWitness {
                        reason: "positive element mapped outside the positive cone".into(),
                        element: p,
                        block: pos.block,
                        eigenvalue: pos.min_eigenvalue,
                    });
                }
            }
        }
        verdict
    }

    /// Runs [`Self::is_markov_schwarz`] and records the result in the flags.
    pub fn verified(mut self, tol: f64, trials: usize, seed: u64) -> Result<Self> {
        let verdict = self.is_markov_schwarz(tol, trials, seed);
        if !verdict.passed {
            let w = verdict.witness.expect("failure carries a witness");
            return Err(Error::PreconditionFailed {
                check: "is_markov_schwarz".into(),
                witness: format!(
                    "{} (eigenvalue {:e}, block {:?})",
                    w.reason, w.eigenvalue, w.block
                ),
            });
        }
        self.unital = true;
        self.schwarz_verified = true;
        Ok(self)
    }

    /// The state `ν = μ∘Φ`.
    pub fn dual_state(&self, mu: &State) -> Result<State> {
        let r = mu.functional();
        if r.len() != self.algebra.dim() {
            return Err(shape(self.algebra.dim(), r.len()));
        }
        let nu = self.matrix.transpose() * r;
        State::from_functional(&self.algebra, &nu, 1e-10)
    }
}

/// `x ↦ V*xV` on `M_d` for an isometry `V`.
pub fn implemented_operator(v: &CMat) -> Result<AlgebraMap> {
    if !v.is_square() {
        return Err(shape(
            "square matrix",
            format!("{}x{}", v.nrows(), v.ncols()),
        ));
    }
    let alg = FiniteCStarAlgebra::matrices(v.nrows());
    let map = AlgebraMap::blockwise_conjugation(&alg, std::slice::from_ref(v))?;
    Ok(AlgebraMap {
        unital: true,
        schwarz_verified: false,
        ..map
    })
}

pub(crate) fn check_stochastic(p: &CMat) -> Result<()> {
    if !p.is_square() {
        return Err(Error::NotMarkov(format!(
            "{}x{} is not square",
            p.nrows(),
            p.ncols()
        )));
    }
    for k in 0..p.nrows() {
        let mut sum = 0.0;
        for l in 0..p.ncols() {
            let e = p[(k, l)];
            if e.im.abs() > 1e-12 || e.re < -1e-12 {
                return Err(Error::NotMarkov(format!(
                    "entry ({k},{l}) = {e} is not nonnegative"
                )));
            }
            sum += e.re;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotMarkov(format!("row {k} sums to {sum}")));
        }
    }
    Ok(())
}
