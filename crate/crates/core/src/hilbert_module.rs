//! Pre-Hilbert modules `E = {x: K → ℂ^d}` over `C(K)`, with the algebra-valued
//! inner product `(x|y)_A(k) = (x(k)|y(k))` and operators dominated by Markov
//! operators on `C(K)`.
//!
//! Module elements are flattened point by point: coordinate `k·d + i` holds
//! `x(k)_i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cstar::check_stochastic;
use crate::error::{shape, Error, Result};
use crate::linalg::{identity, random_matrix, CMat, CVec, Complex, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreHilbertModule {
    pub base_size: usize,
    pub fiber_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    /// `|K| × d`; row `k` is `x(k)`.
    pub values: CMat,
}

impl ModuleElement {
    /// `max_k ‖x(k)‖`.
    pub fn norm(&self) -> f64 {
        (0..self.values.nrows())
            .map(|k| self.values.row(k).norm())
            .fold(0.0, f64::max)
    }
}

impl PreHilbertModule {
    pub fn new(base_size: usize, fiber_dim: usize) -> Result<Self> {
        if base_size == 0 || fiber_dim == 0 {
            return Err(Error::PayloadInvalid(
                "module needs |K| ≥ 1 and d ≥ 1".into(),
            ));
        }
        Ok(PreHilbertModule {
            base_size,
            fiber_dim,
        })
    }

    /// Dimension of the module as a complex vector space.
    pub fn ambient_dim(&self) -> usize {
        self.base_size * self.fiber_dim
    }

    pub fn element(&self, values: CMat) -> Result<ModuleElement> {
        if values.shape() != (self.base_size, self.fiber_dim) {
            return Err(shape(
                format!("{}x{}", self.base_size, self.fiber_dim),
                format!("{}x{}", values.nrows(), values.ncols()),
            ));
        }
        Ok(ModuleElement { values })
    }

    fn check(&self, x: &ModuleElement) -> Result<()> {
        if x.values.shape() != (self.base_size, self.fiber_dim) {
            return Err(shape(
                format!("{}x{}", self.base_size, self.fiber_dim),
                format!("{}x{}", x.values.nrows(), x.values.ncols()),
            ));
        }
        Ok(())
    }

    pub fn flatten(&self, x: &ModuleElement) -> CVec {
        CVec::from_iterator(self.ambient_dim(), x.values.transpose().iter().copied())
    }

    pub fn unflatten(&self, v: &CVec) -> Result<ModuleElement> {
        if v.len() != self.ambient_dim() {
            return Err(shape(self.ambient_dim(), v.len()));
        }
        let d = self.fiber_dim;
        Ok(ModuleElement {
            values: CMat::from_fn(self.base_size, d, |k, i| v[k * d + i]),
        })
    }

    pub fn random_element<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ModuleElement {
        ModuleElement {
            values: random_matrix(rng, self.base_size, self.fiber_dim),
        }
    }

    /// `k ↦ (x(k)|y(k))`, conjugate-linear in `y`.
    pub fn inner(&self, x: &ModuleElement, y: &ModuleElement) -> Result<Vec<Complex>> {
        self.check(x)?;
        self.check(y)?;
        Ok((0..self.base_size)
            .map(|k| {
                x.values
                    .row(k)
                    .iter()
                    .zip(y.values.row(k).iter())
                    .map(|(a, b)| a * b.conj())
                    .sum()
            })
            .collect())
    }

    /// `|x|²_A = (x|x)_A` as a real function on `K`.
    pub fn abs_sq(&self, x: &ModuleElement) -> Result<Vec<f64>> {
        Ok(self.inner(x, x)?.iter().map(|z| z.re).collect())
    }

    /// Pointwise action `(a·x)(k) = a(k)·x(k)` of the algebra.
    pub fn act(&self, a: &[Complex], x: &ModuleElement) -> Result<ModuleElement> {
        self.check(x)?;
        if a.len() != self.base_size {
            return Err(shape(self.base_size, a.len()));
        }
        let mut values = x.values.clone();
        for (k, &ak) in a.iter().enumerate() {
            let mut row = values.row_mut(k);
            row *= ak;
        }
        Ok(ModuleElement { values })
    }

    /// Gram matrix of `(y, z) ↦ Σ_k μ_k (y(k)|z(k))` on the flat coordinates.
    pub fn gns_form(&self, mu: &[f64]) -> Result<CMat> {
        check_probability(mu, self.base_size)?;
        let d = self.fiber_dim;
        let diag = CVec::from_fn(self.ambient_dim(), |r, _| Complex::new(mu[r / d], 0.0));
        Ok(CMat::from_diagonal(&diag))
    }
}

/// A Markov operator `S` on `C(K)` (row-stochastic) together with an operator
/// `T` on the module (acting on flat coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct DominatedPair {
    pub module: PreHilbertModule,
    pub s: CMat,
    pub t: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominationVerdict {
    pub passed: bool,
    pub trials: usize,
    /// Smallest `(S|x|²)(k) − ‖(Tx)(k)‖²` seen, relative to `‖x‖²`.
    pub worst_margin: f64,
    pub witness: Option<DominationWitness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominationWitness {
    pub element: ModuleElement,
    pub point: usize,
    /// `‖(Tx)(k)‖² − (S|x|²)(k)`, positive on failure.
    pub deficit: f64,
}

impl DominatedPair {
    pub fn new(module: PreHilbertModule, s: CMat, t: CMat) -> Result<Self> {
        if s.shape() != (module.base_size, module.base_size) {
            return Err(shape(
                format!("{0}x{0}", module.base_size),
                format!("{}x{}", s.nrows(), s.ncols()),
            ));
        }
        check_stochastic(&s)?;
        let n = module.ambient_dim();
        if t.shape() != (n, n) {
            return Err(shape(
                format!("{n}x{n}"),
                format!("{}x{}", t.nrows(), t.ncols()),
            ));
        }
        Ok(DominatedPair { module, s, t })
    }

    /// Both operators built from the same stochastic matrix: `S = P` on
    /// `C(K)` and `T = P ⊗ I_d` on the module. Permutations give the shift
    /// pairs that saturate domination.
    pub fn lifted(module: PreHilbertModule, p: CMat) -> Result<Self> {
        let t = p.kronecker(&identity(module.fiber_dim));
        Self::new(module, p, t)
    }

    /// `(Tx)(k) = x(k+1 mod |K|)` dominated by the same shift on `C(K)`.
    pub fn cyclic_shift(module: PreHilbertModule) -> Self {
        let m = module.base_size;
        let p = CMat::from_fn(m, m, |k, l| {
            if l == (k + 1) % m {
                Complex::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        Self::lifted(module, p).expect("permutations are stochastic")
    }

    pub fn apply_t(&self, x: &ModuleElement) -> Result<ModuleElement> {
        self.module.unflatten(&(&self.t * self.module.flatten(x)))
    }

    pub fn apply_s(&self, f: &[f64]) -> Vec<f64> {
        (0..self.s.nrows())
            .map(|k| (0..self.s.ncols()).map(|l| self.s[(k, l)].re * f[l]).sum())
            .collect()
    }

    /// `(1/N) Σ_{n=0}^{N−1} T^n` on flat coordinates.
    pub fn cesaro_t(&self, n_terms: u64) -> CMat {
        assert!(n_terms >= 1);
        let n = self.module.ambient_dim();
        let mut acc = CMat::zeros(n, n);
        let mut pow = identity(n);
        for _ in 0..n_terms {
            acc += &pow;
            pow = &self.t * pow;
        }
        acc / Complex::new(n_terms as f64, 0.0)
    }

    /// `ν_N = (1/N) Σ_{n=0}^{N−1} (S^n)'μ` as a probability vector.
    pub fn averaged_state(&self, mu: &[f64], n_terms: u64) -> Result<Vec<f64>> {
        check_probability(mu, self.module.base_size)?;
        assert!(n_terms >= 1);
        let mut cur = mu.to_vec();
        let mut acc = vec![0.0; mu.len()];
        for _ in 0..n_terms {
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a += c;
            }
            cur = self.dual_s(&cur);
        }
        Ok(acc.into_iter().map(|a| a / n_terms as f64).collect())
    }

    /// `S'μ = μ∘S`, i.e. `Sᵀμ`.
    pub fn dual_s(&self, mu: &[f64]) -> Vec<f64> {
        (0..self.s.ncols())
            .map(|l| (0..self.s.nrows()).map(|k| self.s[(k, l)].re * mu[k]).sum())
            .collect()
    }

    /// Sampling check of `|Tx|²_A ≤ S|x|²_A` on seeded random `x`.
    pub fn is_s_dominated(&self, tol: f64, trials: usize, seed: u64) -> DominationVerdict {
        assert!(trials >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut verdict = DominationVerdict {
            passed: true,
            trials,
            worst_margin: f64::INFINITY,
            witness: None,
        };
        for _ in 0..trials {
            let x = self.module.random_element(&mut rng);
            let bound = self.apply_s(&self.module.abs_sq(&x).expect("same module"));
            let tx = self.apply_t(&x).expect("same module");
            let lhs = self.module.abs_sq(&tx).expect("same module");
            let scale = x.norm().powi(2).max(1.0);
            for k in 0..self.module.base_size {
                let margin = bound[k] - lhs[k];
                verdict.worst_margin = verdict.worst_margin.min(margin / scale);
                if margin < -tol * scale && verdict.witness.is_none() {
                    verdict.passed = false;
                    verdict.witness = Some(DominationWitness {
                        element: x.clone(),
                        point: k,
                        deficit: -margin,
                    });
                }
            }
        }
        verdict
    }

    /// Gram matrix of `φ(y,z) = ⟨(C_N y | C_N z)_A, μ⟩`.
    pub fn averaged_form(&self, mu: &[f64], n_terms: u64) -> Result<CMat> {
        let g = self.module.gns_form(mu)?;
        let c = self.cesaro_t(n_terms);
        Ok(c.adjoint() * g * c)
    }
}

pub(crate) fn check_probability(mu: &[f64], size: usize) -> Result<()> {
    if mu.len() != size {
        return Err(shape(size, mu.len()));
    }
    if mu
        .iter()
        .any(|&w| w.is_nan() || w < -1e-12 || !w.is_finite())
    {
        return Err(Error::NotAState(format!(
            "negative or non-finite weight in {mu:?}"
        )));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotAState(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}
