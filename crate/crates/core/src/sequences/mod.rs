//! Bounded vector-valued sequences, their Cesàro-type averages, and the
//! finite-window surrogate used in place of limits along ultrafilters.
//!
//! Indexing starts at `n = 1` everywhere in this module.

pub(crate) mod parse;

pub use parse::parse_sequence;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis_turns, frac_product, inner, norm_sq, CVec, Complex, ZERO};

/// Tolerance on `| |λ| - 1 |` for twists.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Grid size for window surrogates once `n_max` exceeds it.
pub const WINDOW_GRID_POINTS: usize = 4096;

type EvalFn = dyn Fn(u64) -> CVec + Send + Sync;

/// A deterministic, bounded map `n ↦ u_n ∈ ℂ^dim`.
#[derive(Clone)]
pub struct VectorSequence {
    dim: usize,
    bound: f64,
    label: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for VectorSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorSequence")
            .field("dim", &self.dim)
            .field("bound", &self.bound)
            .field("label", &self.label)
            .finish()
    }
}

/// Distributions for [`VectorSequence::iid_random`]. Both produce unit vectors
/// with mean zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IidDistribution {
    /// Independent uniform phases in each component, scaled by `1/√dim`.
    UnitCircle,
    /// Complex Gaussian vector normalized to unit length.
    GaussianNormalized,
}

impl IidDistribution {
    pub fn name(self) -> &'static str {
        match self {
            IidDistribution::UnitCircle => "unit-circle",
            IidDistribution::GaussianNormalized => "gaussian-normalized",
        }
    }
}

impl std::str::FromStr for IidDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit-circle" => Ok(IidDistribution::UnitCircle),
            "gaussian-normalized" => Ok(IidDistribution::GaussianNormalized),
            other => Err(Error::Parse(format!("unknown distribution `{other}`"))),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn vec_label(v: &CVec) -> String {
    let parts: Vec<String> = v.iter().map(|z| format!("({},{})", z.re, z.im)).collect();
    format!("[{}]", parts.join(","))
}

fn sup_norm(values: &[CVec]) -> f64 {
    values.iter().map(|v| norm_sq(v).sqrt()).fold(0.0, f64::max)
}

impl VectorSequence {
    /// Wraps an arbitrary rule. `bound` must dominate `‖eval(n)‖` for all `n`;
    /// this is checked on access in debug builds.
    pub fn from_fn<F>(dim: usize, bound: f64, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(u64) -> CVec + Send + Sync + 'static,
    {
        assert!(dim > 0, "sequence dimension must be positive");
        assert!(bound >= 0.0 && bound.is_finite());
        VectorSequence {
            dim,
            bound,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: CVec) -> Self {
        Self::periodic(vec![c]).expect("one vector is a valid period")
    }

    /// `u_n = values[(n - 1) mod p]`.
    pub fn periodic(values: Vec<CVec>) -> Result<Self> {
        let first = values.first().ok_or_else(|| {
            Error::PayloadInvalid("periodic sequence needs at least one vector".into())
        })?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::PayloadInvalid("vectors must be nonempty".into()));
        }
        if let Some(bad) = values.iter().find(|v| v.len() != dim) {
            return Err(crate::error::shape(dim, bad.len()));
        }
        let label = format!(
            "periodic:[{}]",
            values
                .iter()
                .map(|v| v
                    .iter()
                    .map(|z| format!("({},{})", z.re, z.im))
                    .collect::<Vec<_>>()
                    .join(","))
                .collect::<Vec<_>>()
                .join(";")
        );
        let bound = sup_norm(&values);
        let p = values.len() as u64;
        Ok(Self::from_fn(dim, bound, label, move |n| {
            values[((n - 1) % p) as usize].clone()
        }))
    }

    /// `u_n = λ^n c` with `|λ| ≤ 1`.
    pub fn geometric(lambda: Complex, c: CVec) -> Result<Self> {
        let modulus = lambda.norm();
        if modulus > 1.0 + UNIMODULAR_TOL {
            return Err(Error::PayloadInvalid(format!(
                "geometric ratio must satisfy |lambda| <= 1, got {modulus}"
            )));
        }
        let turns = lambda.arg() / std::f64::consts::TAU;
        let label = format!(
            "geometric:lambda={}{:+}i,c={}",
            lambda.re,
            lambda.im,
            vec_label(&c)
        );
        Ok(Self::geometric_polar(modulus.min(1.0), turns, c, label))
    }

    /// `u_n = exp(2πi·θ·n) c`.
    pub fn geometric_turns(theta: f64, c: CVec) -> Self {
        let label = format!("geometric:theta={theta},c={}", vec_label(&c));
        Self::geometric_polar(1.0, theta, c, label)
    }

    fn geometric_polar(modulus: f64, turns: f64, c: CVec, label: String) -> Self {
        let dim = c.len();
        let bound = norm_sq(&c).sqrt();
        Self::from_fn(dim, bound, label, move |n| {
            let z = cis_turns(frac_product(turns, n as f64)) * modulus.powf(n as f64);
            c.map(|x| x * z)
        })
    }

    /// Scalar Weyl sequence `u_n = exp(2πi·α·n^degree)`.
    pub fn weyl(alpha: f64, degree: u32) -> Self {
        let label = format!("weyl:alpha={alpha},deg={degree}");
        Self::from_fn(1, 1.0, label, move |n| {
            let m = (n as f64).powi(degree as i32);
            CVec::from_element(1, cis_turns(frac_product(alpha, m)))
        })
    }

    /// I.i.d. unit vectors, reproducible per index from `seed`.
    pub fn iid_random(seed: u64, dist: IidDistribution, dim: usize) -> Self {
        let label = format!("iid:dist={},seed={seed},dim={dim}", dist.name());
        Self::from_fn(dim, 1.0, label, move |n| {
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(n)));
            match dist {
                IidDistribution::UnitCircle => {
                    let s = 1.0 / (dim as f64).sqrt();
                    CVec::from_fn(dim, |_, _| cis_turns(rng.random::<f64>()) * s)
                }
                IidDistribution::GaussianNormalized => loop {
                    let v = CVec::from_fn(dim, |_, _| {
                        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                    });
                    let len = norm_sq(&v).sqrt();
                    if len > 1e-300 {
                        break v.unscale(len);
                    }
                },
            }
        })
    }

    /// `u_n = U^n c` with `U = diag(exp(2πi·θ_k))`.
    pub fn rotation_orbit(thetas: Vec<f64>, c: CVec) -> Result<Self> {
        if thetas.len() != c.len() {
            return Err(crate::error::shape(
                format!("{} angles", c.len()),
                thetas.len(),
            ));
        }
        let label = format!(
            "rotation:theta=[{}],c={}",
            thetas
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(","),
            vec_label(&c)
        );
        let bound = norm_sq(&c).sqrt();
        Ok(Self::from_fn(c.len(), bound, label, move |n| {
            CVec::from_fn(c.len(), |k, _| {
                c[k] * cis_turns(frac_product(thetas[k], n as f64))
            })
        }))
    }

    /// `self + weight·other`.
    pub fn add_scaled(&self, weight: f64, other: &VectorSequence) -> Result<Self> {
        if self.dim != other.dim {
            return Err(crate::error::shape(self.dim, other.dim));
        }
        let a = self.clone();
        let b = other.clone();
        let label = format!("sum({},{weight}*{})", a.label, b.label);
        let bound = a.bound + weight.abs() * b.bound;
        Ok(Self::from_fn(self.dim, bound, label, move |n| {
            a.get(n) + b.get(n).scale(weight)
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Canonical description; parseable for the mini-language constructors.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn get(&self, n: u64) -> CVec {
        debug_assert!(n >= 1, "sequences are indexed from 1");
        let v = (self.eval)(n);
        debug_assert_eq!(v.len(), self.dim);
        debug_assert!(
            norm_sq(&v).sqrt() <= self.bound * (1.0 + 1e-12) + 1e-12,
            "sequence `{}` exceeds its bound at n = {n}",
            self.label
        );
        v
    }

    /// Evaluates `u_1 ..= u_last`.
    pub fn sample(&self, last: u64) -> SampledSequence {
        let mut values = Vec::with_capacity(last as usize * self.dim);
        for n in 1..=last {
            values.extend(self.get(n).iter().copied());
        }
        SampledSequence {
            dim: self.dim,
            values,
        }
    }
}

/// `(1/N) Σ_{n=1}^{N} u_n`.
pub fn cesaro_avg(u: &VectorSequence, n_terms: u64) -> CVec {
    shifted_cesaro(u, 0, n_terms)
}

/// `(1/N) Σ_{n=M+1}^{M+N} u_n`.
pub fn shifted_cesaro(u: &VectorSequence, shift: u64, n_terms: u64) -> CVec {
    assert!(n_terms >= 1);
    let mut acc = CVec::zeros(u.dim());
    for n in shift + 1..=shift + n_terms {
        acc += u.get(n);
    }
    acc.unscale(n_terms as f64)
}

/// `(1/N) Σ_{n=1}^{N} λ^n u_n` for unimodular `λ`.
pub fn twisted_cesaro(u: &VectorSequence, lambda: Complex, n_terms: u64) -> Result<CVec> {
    let modulus = lambda.norm();
    if (modulus - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::NonUnimodular { modulus });
    }
    assert!(n_terms >= 1);
    let turns = lambda.arg() / std::f64::consts::TAU;
    let mut acc = CVec::zeros(u.dim());
    for n in 1..=n_terms {
        acc += u.get(n) * cis_turns(frac_product(turns, n as f64));
    }
    Ok(acc.unscale(n_terms as f64))
}

/// `(1/N) Σ_{n=1}^{N} (u_n | u_{n+j})`.
pub fn correlation_avg(u: &VectorSequence, lag: u64, n_terms: u64) -> Complex {
    assert!(lag >= 1 && n_terms >= 1);
    let mut acc = ZERO;
    for n in 1..=n_terms {
        acc += inner(&u.get(n), &u.get(n + lag));
    }
    acc / n_terms as f64
}

/// Materialized prefix of a sequence, stored flat: `u_n` occupies
/// `values[(n-1)·dim .. n·dim]`.
#[derive(Debug, Clone)]
pub struct SampledSequence {
    dim: usize,
    values: Vec<Complex>,
}

impl SampledSequence {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> u64 {
        (self.values.len() / self.dim) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, n: u64) -> &[Complex] {
        let start = (n as usize - 1) * self.dim;
        &self.values[start..start + self.dim]
    }

    /// `P[k] = Σ_{n ≤ k} u_n` for `k = 0 ..= upto`, flat with stride `dim`.
    pub fn prefix_sums(&self, upto: u64) -> Vec<Complex> {
        let d = self.dim;
        let mut out = vec![ZERO; (upto as usize + 1) * d];
        for n in 1..=upto as usize {
            for i in 0..d {
                out[n * d + i] = out[(n - 1) * d + i] + self.values[(n - 1) * d + i];
            }
        }
        out
    }

    /// `C[k] = Σ_{n ≤ k} (u_n | u_{n+lag})` for `k = 0 ..= upto`.
    pub fn correlation_prefix(&self, lag: u64, upto: u64) -> Vec<Complex> {
        let mut out = Vec::with_capacity(upto as usize + 1);
        let mut acc = ZERO;
        out.push(acc);
        for n in 1..=upto {
            let a = self.at(n);
            let b = self.at(n + lag);
            acc += a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex>();
            out.push(acc);
        }
        out
    }
}

/// Truncation parameters standing in for `lim_{N→p}`: the window is
/// `[N₀, n_max]` with `N₀ = ceil((1 − window_frac)·n_max)`, and `j_max` caps
/// the lag average on the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub n_max: u64,
    pub window_frac: f64,
    pub j_max: u64,
}

impl WindowSpec {
    pub fn new(n_max: u64, window_frac: f64, j_max: u64) -> Result<Self> {
        let w = WindowSpec {
            n_max,
            window_frac,
            j_max,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidWindow("n_max must be positive".into()));
        }
        if self.j_max == 0 {
            return Err(Error::InvalidWindow("j_max must be positive".into()));
        }
        if !(self.window_frac > 0.0 && self.window_frac <= 1.0) {
            return Err(Error::InvalidWindow(format!(
                "window_frac must lie in (0, 1], got {}",
                self.window_frac
            )));
        }
        Ok(())
    }

    /// `N₀ = ceil((1 − window_frac)·n_max)`, clamped to at least 1.
    pub fn window_start(&self) -> u64 {
        let start = ((1.0 - self.window_frac) * self.n_max as f64).ceil();
        (start as u64).clamp(1, self.n_max)
    }

    /// Deterministic sample points of the window: every integer when
    /// `n_max ≤ 4096`, otherwise 4096 geometrically spaced integers
    /// (deduplicated, both endpoints included).
    pub fn grid(&self) -> Vec<u64> {
        window_grid(self.window_start(), self.n_max, WINDOW_GRID_POINTS)
    }
}

pub(crate) fn window_grid(start: u64, end: u64, points: usize) -> Vec<u64> {
    if end <= points as u64 || start == end {
        return (start..=end).collect();
    }
    let ratio = (end as f64 / start as f64).ln();
    let mut grid: Vec<u64> = (0..points)
        .map(|k| {
            let t = k as f64 / (points - 1) as f64;
            ((start as f64) * (ratio * t).exp()).round() as u64
        })
        .map(|n| n.clamp(start, end))
        .collect();
    grid[0] = start;
    *grid.last_mut().unwrap() = end;
    grid.dedup();
    grid
}

/// Window maximum (or minimum) of a real-valued rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupEstimate {
    pub value: f64,
    pub argmax_index: u64,
    pub samples: Vec<(u64, f64)>,
}

impl LimsupEstimate {
    fn from_samples(samples: Vec<(u64, f64)>, prefer_max: bool) -> Self {
        let mut best = samples[0];
        for &(n, v) in &samples[1..] {
            // strict comparison keeps the first (smallest) index on ties
            let better = if prefer_max { v > best.1 } else { v < best.1 };
            if better {
                best = (n, v);
            }
        }
        LimsupEstimate {
            value: best.1,
            argmax_index: best.0,
            samples,
        }
    }
}

/// Maximum of `f` over the window grid.
pub fn limsup_window<F: FnMut(u64) -> f64>(f: F, w: &WindowSpec) -> LimsupEstimate {
    limsup_over(&w.grid(), f)
}

/// Minimum of `f` over the window grid; `argmax_index` holds the minimizer.
pub fn liminf_window<F: FnMut(u64) -> f64>(f: F, w: &WindowSpec) -> LimsupEstimate {
    let grid = w.grid();
    let mut f = f;
    let samples = grid.iter().map(|&n| (n, f(n))).collect();
    LimsupEstimate::from_samples(samples, false)
}

pub(crate) fn limsup_over<F: FnMut(u64) -> f64>(points: &[u64], mut f: F) -> LimsupEstimate {
    assert!(!points.is_empty());
    let samples = points.iter().map(|&n| (n, f(n))).collect();
    LimsupEstimate::from_samples(samples, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn scalar(f: impl Fn(u64) -> Complex + Send + Sync + 'static) -> VectorSequence {
        VectorSequence::from_fn(1, 3.0, "test", move |n| CVec::from_element(1, f(n)))
    }

    #[test]
    fn cesaro_of_constant() {
        let cst = CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let u = VectorSequence::constant(cst.clone());
        assert!((cesaro_avg(&u, 10) - &cst).norm() < 1e-15);
    }

    #[test]
    fn cesaro_cancellations() {
        let alt = scalar(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
        assert!(cesaro_avg(&alt, 4).norm() < 1e-15);
        // i - 1 - i + 1 = 0
        let ipow = scalar(|n| c(0.0, 1.0).powu(n as u32));
        assert!(cesaro_avg(&ipow, 4).norm() < 1e-15);
    }

    #[test]
    fn shifted_examples() {
        let u = VectorSequence::constant(CVec::from_element(1, c(2.0, -1.0)));
        assert!((shifted_cesaro(&u, 17, 5)[0] - c(2.0, -1.0)).norm() < 1e-15);
        let alt = scalar(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
        assert!(shifted_cesaro(&alt, 1, 2).norm() < 1e-15);
        let mod3 = scalar(|n| c((n % 3) as f64, 0.0));
        assert!((shifted_cesaro(&mod3, 3, 3)[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn twisted_examples() {
        let u = VectorSequence::weyl(0.123, 2);
        let plain = cesaro_avg(&u, 50);
        let tw = twisted_cesaro(&u, c(1.0, 0.0), 50).unwrap();
        assert!((plain - tw).norm() < 1e-14);

        let lam = cis_turns(0.37);
        let cst = CVec::from_vec(vec![c(1.0, 2.0)]);
        let conj_geo = VectorSequence::geometric(lam.conj(), cst.clone()).unwrap();
        let tw = twisted_cesaro(&conj_geo, lam, 7).unwrap();
        assert!((tw - cst).norm() < 1e-12);

        let ones = VectorSequence::constant(CVec::from_element(1, c(1.0, 0.0)));
        assert!(twisted_cesaro(&ones, c(-1.0, 0.0), 4).unwrap().norm() < 1e-15);

        let err = twisted_cesaro(&ones, c(1.1, 0.0), 4).unwrap_err();
        assert!(matches!(err, Error::NonUnimodular { .. }));
    }

    #[test]
    fn correlation_examples() {
        let cst = CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let u = VectorSequence::constant(cst.clone());
        assert!((correlation_avg(&u, 3, 9) - c(1.0, 0.0)).norm() < 1e-15);

        let lam = cis_turns(0.21);
        let g = VectorSequence::geometric(lam, cst).unwrap();
        for j in 1..6 {
            let expect = lam.conj().powu(j as u32);
            assert!((correlation_avg(&g, j, 40) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn correlation_of_iid_noise_is_small() {
        let u = VectorSequence::iid_random(11, IidDistribution::UnitCircle, 1);
        let n = 10_000u64;
        let value = correlation_avg(&u, 1, n);
        assert!(value.norm() <= 5.0 / (n as f64).sqrt(), "{value}");
    }

    #[test]
    fn window_start_and_grid() {
        let w = WindowSpec::new(100, 0.5, 3).unwrap();
        assert_eq!(w.window_start(), 50);
        assert_eq!(w.grid(), (50..=100).collect::<Vec<_>>());

        let big = WindowSpec::new(1_000_000, 0.9, 3).unwrap();
        let g = big.grid();
        assert_eq!(g[0], big.window_start());
        assert_eq!(*g.last().unwrap(), 1_000_000);
        assert!(g.len() <= WINDOW_GRID_POINTS);
        assert!(g.windows(2).all(|p| p[0] < p[1]));

        assert!(WindowSpec::new(0, 0.5, 1).is_err());
        assert!(WindowSpec::new(10, 0.0, 1).is_err());
        assert!(WindowSpec::new(10, 1.5, 1).is_err());
        assert!(WindowSpec::new(10, 0.5, 0).is_err());
        assert_eq!(WindowSpec::new(10, 1.0, 1).unwrap().window_start(), 1);
    }

    #[test]
    fn limsup_examples() {
        let w = WindowSpec::new(100, 0.5, 1).unwrap();
        assert_eq!(limsup_window(|_| 3.0, &w).value, 3.0);
        let est = limsup_window(|n| 1.0 / n as f64, &w);
        assert_eq!(est.value, 1.0 / 50.0);
        assert_eq!(est.argmax_index, 50);

        let full = WindowSpec::new(100, 1.0, 1).unwrap();
        let est = limsup_window(|n| (n as f64).sin().abs(), &full);
        let brute = (1..=100)
            .map(|n| (n as f64).sin().abs())
            .fold(f64::MIN, f64::max);
        assert_eq!(est.value, brute);

        let low = liminf_window(|n| (n as f64).sin().abs(), &full);
        let brute_min = (1..=100)
            .map(|n| (n as f64).sin().abs())
            .fold(f64::MAX, f64::min);
        assert_eq!(low.value, brute_min);
    }

    #[test]
    fn ties_resolve_to_first_index() {
        let w = WindowSpec::new(10, 1.0, 1).unwrap();
        let est = limsup_window(|n| if n % 3 == 0 { 1.0 } else { 0.0 }, &w);
        assert_eq!(est.argmax_index, 3);
    }

    #[test]
    fn sampled_prefixes_agree_with_direct_averages() {
        let u = VectorSequence::rotation_orbit(
            vec![0.1, 0.35],
            CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]),
        )
        .unwrap();
        let s = u.sample(40);
        let p = s.prefix_sums(30);
        let direct = cesaro_avg(&u, 30).scale(30.0);
        assert!((direct[0] - p[60]).norm() < 1e-12);
        let corr = s.correlation_prefix(4, 30);
        assert!((corr[30] / 30.0 - correlation_avg(&u, 4, 30)).norm() < 1e-12);
    }

    #[test]
    fn periodic_mean_over_full_periods() {
        let vals = vec![
            CVec::from_vec(vec![c(1.0, 0.0)]),
            CVec::from_vec(vec![c(0.0, 1.0)]),
            CVec::from_vec(vec![c(-0.5, 0.25)]),
        ];
        let mean = vals.iter().fold(CVec::zeros(1), |a, v| a + v).unscale(3.0);
        let u = VectorSequence::periodic(vals).unwrap();
        for k in 1..20 {
            assert!((cesaro_avg(&u, 3 * k) - &mean).norm() <= 1e-12);
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let u = VectorSequence::iid_random(5, IidDistribution::GaussianNormalized, 3);
        for n in [1, 2, 1000] {
            assert_eq!(u.get(n), u.get(n));
        }
        let w = VectorSequence::weyl(std::f64::consts::SQRT_2 - 1.0, 2);
        assert_eq!(w.get(12345), w.get(12345));
    }
}
