//! Finite-truncation estimates of both sides of each inequality variant.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::cstar::{self, AlgebraElement, AlgebraMap, State};
use crate::error::{Error, Result};
use crate::folner::Element;
use crate::hilbert_module::{DominatedPair, ModuleElement};
use crate::linalg::{cis_turns, frac_product, isometry_defect, norm_sq, CMat, CVec, Complex, ZERO};
use crate::sequences::{window_grid, LimsupEstimate, VectorSequence, WindowSpec};

use super::report::{digest, fnv1a64, Diagnostics, InequalityReport, Truncation, Verdict};
use super::ww;

/// Default tolerance on negative margins.
pub const DEFAULT_MARGIN_TOL: f64 = 1e-7;

/// Grid size for the `M` axis of the two-parameter window.
pub const UNIFORM_WINDOW_M_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Scalar,
    Hilbert,
    Operator,
    UniformSup,
    UniformWindow,
    WienerWintner,
    Semigroup,
    CStarAbstract,
    ModuleAbstract,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::Scalar,
        Variant::Hilbert,
        Variant::Operator,
        Variant::UniformSup,
        Variant::UniformWindow,
        Variant::WienerWintner,
        Variant::Semigroup,
        Variant::CStarAbstract,
        Variant::ModuleAbstract,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Scalar => "scalar",
            Variant::Hilbert => "hilbert",
            Variant::Operator => "operator",
            Variant::UniformSup => "uniform_sup",
            Variant::UniformWindow => "uniform_window",
            Variant::WienerWintner => "wiener_wintner",
            Variant::Semigroup => "semigroup",
            Variant::CStarAbstract => "cstar_abstract",
            Variant::ModuleAbstract => "module_abstract",
        }
    }

    /// Variants whose input is a single vector sequence.
    pub fn takes_sequence(self) -> bool {
        matches!(
            self,
            Variant::Scalar
                | Variant::Hilbert
                | Variant::UniformSup
                | Variant::UniformWindow
                | Variant::WienerWintner
                | Variant::Semigroup
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown variant `{s}`")))
    }
}

type FieldFn = dyn Fn(&[u64]) -> CVec + Send + Sync;

/// A bounded map `ℕ^d → ℂ^k` (lattice points have coordinates `≥ 1`).
#[derive(Clone)]
pub struct LatticeField {
    pub dim: usize,
    pub fiber_dim: usize,
    pub bound: f64,
    pub label: String,
    eval: Arc<FieldFn>,
}

impl fmt::Debug for LatticeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeField")
            .field("dim", &self.dim)
            .field("fiber_dim", &self.fiber_dim)
            .field("label", &self.label)
            .finish()
    }
}

impl LatticeField {
    pub fn from_fn<F>(
        dim: usize,
        fiber_dim: usize,
        bound: f64,
        label: impl Into<String>,
        eval: F,
    ) -> Self
    where
        F: Fn(&[u64]) -> CVec + Send + Sync + 'static,
    {
        assert!(dim > 0 && fiber_dim > 0);
        LatticeField {
            dim,
            fiber_dim,
            bound,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    /// `u_t = exp(2πi⟨θ, t⟩) c`.
    pub fn character(theta: Vec<f64>, c: CVec) -> Self {
        let label = format!(
            "character:theta=[{}],c=[{}]",
            theta
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(","),
            c.iter()
                .map(|z| format!("({},{})", z.re, z.im))
                .collect::<Vec<_>>()
                .join(",")
        );
        let bound = norm_sq(&c).sqrt();
        Self::from_fn(theta.len(), c.len(), bound, label, move |t| {
            let turns: f64 = theta
                .iter()
                .zip(t)
                .map(|(&a, &x)| frac_product(a, x as f64))
                .sum();
            let z = cis_turns(turns);
            c.map(|v| v * z)
        })
    }

    /// The one-dimensional lattice field `t ↦ u_t`.
    pub fn from_sequence(u: &VectorSequence) -> Self {
        let seq = u.clone();
        Self::from_fn(1, u.dim(), u.bound(), u.label().to_string(), move |t| {
            seq.get(t[0])
        })
    }

    pub fn get(&self, t: &[u64]) -> CVec {
        (self.eval)(t)
    }
}

#[derive(Debug, Clone)]
pub struct OperatorPayload {
    /// Isometry on `ℂ^d`.
    pub s: CMat,
    pub t: CMat,
    /// Unit vector.
    pub xi: CVec,
}

#[derive(Debug, Clone)]
pub struct SemigroupPayload {
    pub field: LatticeField,
    /// Boxes `∏[1..L_k]` of the averaging schedule `(F_i)`.
    pub f_sides: Vec<Vec<u64>>,
    /// Boxes of the lag schedule `(G_j)`.
    pub g_sides: Vec<Vec<u64>>,
    /// Left offset `r`; zero means none.
    pub offset: Element,
}

impl SemigroupPayload {
    /// Cubes `[1..L]^d` for each `L` in the two schedules.
    pub fn cubes(field: LatticeField, f_cubes: &[u64], g_cubes: &[u64]) -> Self {
        let d = field.dim;
        SemigroupPayload {
            f_sides: f_cubes.iter().map(|&l| vec![l; d]).collect(),
            g_sides: g_cubes.iter().map(|&l| vec![l; d]).collect(),
            offset: vec![0; d],
            field,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CStarPayload {
    pub map: AlgebraMap,
    pub x: AlgebraElement,
    /// One state per schedule entry, or a single state used throughout.
    pub states: Vec<State>,
    /// Increasing `N_i`.
    pub schedule: Vec<u64>,
}

impl CStarPayload {
    pub fn state_at(&self, i: usize) -> &State {
        if self.states.len() == 1 {
            &self.states[0]
        } else {
            &self.states[i]
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModulePayload {
    pub pair: DominatedPair,
    pub x: ModuleElement,
    /// Probability vectors on `K`, one per schedule entry or a single one.
    pub states: Vec<Vec<f64>>,
    pub schedule: Vec<u64>,
}

#[derive(Debug, Clone)]
pub enum VariantSpec {
    Scalar(VectorSequence),
    Hilbert(VectorSequence),
    Operator(OperatorPayload),
    /// `m_max` defaults to `n_max`.
    UniformSup {
        u: VectorSequence,
        m_max: Option<u64>,
    },
    UniformWindow {
        u: VectorSequence,
        m_max: Option<u64>,
    },
    WienerWintner(VectorSequence),
    Semigroup(SemigroupPayload),
    CStarAbstract(CStarPayload),
    ModuleAbstract(ModulePayload),
}

fn mat_text(m: &CMat) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| format!("({},{})", m[(r, c)].re, m[(r, c)].im))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    format!("[{}]", rows.join(";"))
}

impl VariantSpec {
    pub fn variant(&self) -> Variant {
        match self {
            VariantSpec::Scalar(_) => Variant::Scalar,
            VariantSpec::Hilbert(_) => Variant::Hilbert,
            VariantSpec::Operator(_) => Variant::Operator,
            VariantSpec::UniformSup { .. } => Variant::UniformSup,
            VariantSpec::UniformWindow { .. } => Variant::UniformWindow,
            VariantSpec::WienerWintner(_) => Variant::WienerWintner,
            VariantSpec::Semigroup(_) => Variant::Semigroup,
            VariantSpec::CStarAbstract(_) => Variant::CStarAbstract,
            VariantSpec::ModuleAbstract(_) => Variant::ModuleAbstract,
        }
    }

    /// Builds a sequence-driven variant. The semigroup variant
    /// becomes `ℕ` with `F_i = [1..N]` over the window grid and `G_j = [1..j]`.
    pub fn from_sequence(variant: Variant, u: VectorSequence, w: &WindowSpec) -> Result<Self> {
        Ok(match variant {
            Variant::Scalar => VariantSpec::Scalar(u),
            Variant::Hilbert => VariantSpec::Hilbert(u),
            Variant::UniformSup => VariantSpec::UniformSup { u, m_max: None },
            Variant::UniformWindow => VariantSpec::UniformWindow { u, m_max: None },
            Variant::WienerWintner => VariantSpec::WienerWintner(u),
            Variant::Semigroup => {
                let f: Vec<u64> = (1..=w.n_max).collect();
                let g: Vec<u64> = (1..=w.j_max).collect();
                VariantSpec::Semigroup(SemigroupPayload::cubes(
                    LatticeField::from_sequence(&u),
                    &f,
                    &g,
                ))
            }
            other => {
                return Err(Error::PayloadInvalid(format!(
                    "variant `{other}` takes a structured payload, not a sequence"
                )))
            }
        })
    }

    /// Human-readable input description.
    pub fn label(&self) -> String {
        match self {
            VariantSpec::Scalar(u) | VariantSpec::Hilbert(u) | VariantSpec::WienerWintner(u) => {
                u.label().into()
            }
            VariantSpec::UniformSup { u, .. } | VariantSpec::UniformWindow { u, .. } => {
                u.label().into()
            }
            VariantSpec::Operator(p) => format!("operator:dim={}", p.s.nrows()),
            VariantSpec::Semigroup(p) => p.field.label.clone(),
            VariantSpec::CStarAbstract(p) => {
                format!("cstar:blocks={:?}", p.map.algebra.block_dims())
            }
            VariantSpec::ModuleAbstract(p) => {
                format!(
                    "module:K={},d={}",
                    p.pair.module.base_size, p.pair.module.fiber_dim
                )
            }
        }
    }

    /// Stable text identifying the payload; hashed for digests and seeds.
    pub fn canonical(&self) -> String {
        let v = self.variant().name();
        match self {
            VariantSpec::Scalar(u) | VariantSpec::Hilbert(u) | VariantSpec::WienerWintner(u) => {
                format!("{v}|{}", u.label())
            }
            VariantSpec::UniformSup { u, m_max } | VariantSpec::UniformWindow { u, m_max } => {
                format!("{v}|{}|m_max={m_max:?}", u.label())
            }
            VariantSpec::Operator(p) => format!(
                "{v}|S={}|T={}|xi={}",
                mat_text(&p.s),
                mat_text(&p.t),
                mat_text(&CMat::from_column_slice(p.xi.len(), 1, p.xi.as_slice()))
            ),
            VariantSpec::Semigroup(p) => format!(
                "{v}|{}|F={:?}|G={:?}|r={:?}",
                p.field.label, p.f_sides, p.g_sides, p.offset
            ),
            VariantSpec::CStarAbstract(p) => format!(
                "{v}|blocks={:?}|map={}|x={}|states={}|N={:?}",
                p.map.algebra.block_dims(),
                mat_text(&p.map.matrix),
                p.x.blocks
                    .iter()
                    .map(mat_text)
                    .collect::<Vec<_>>()
                    .join("/"),
                p.states
                    .iter()
                    .map(|s| s
                        .densities
                        .iter()
                        .map(mat_text)
                        .collect::<Vec<_>>()
                        .join("/"))
                    .collect::<Vec<_>>()
                    .join("|"),
                p.schedule
            ),
            VariantSpec::ModuleAbstract(p) => format!(
                "{v}|K={}|d={}|S={}|T={}|x={}|states={:?}|N={:?}",
                p.pair.module.base_size,
                p.pair.module.fiber_dim,
                mat_text(&p.pair.s),
                mat_text(&p.pair.t),
                mat_text(&p.x.values),
                p.states,
                p.schedule
            ),
        }
    }

    pub fn digest(&self) -> String {
        digest(&self.canonical())
    }

    /// `base_seed XOR hash(canonical payload)`.
    pub fn cell_seed(&self, base_seed: u64) -> u64 {
        base_seed ^ fnv1a64(&self.canonical())
    }
}

/// Both sides of a variant before the report is assembled.
struct Sides {
    lhs: LimsupEstimate,
    lhs_liminf: f64,
    /// `(index, term)` in lag order.
    terms: Vec<(u64, f64)>,
    /// Average over the lag schedule for each prefix length.
    rhs_trace: Vec<(u64, f64)>,
    lambda_star: Option<Complex>,
    invariance_defect: Option<f64>,
    truncation: Truncation,
    extra: Vec<(String, f64)>,
}

fn prefix_means(terms: &[(u64, f64)]) -> Vec<(u64, f64)> {
    let mut acc = 0.0;
    terms
        .iter()
        .enumerate()
        .map(|(k, &(_, v))| {
            acc += v;
            ((k + 1) as u64, acc / (k + 1) as f64)
        })
        .collect()
}

fn tail_min(trace: &[(u64, f64)]) -> f64 {
    let start = trace.len() / 2;
    trace[start..]
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::INFINITY, f64::min)
}

fn window_extremes(points: &[u64], values: &[f64]) -> (LimsupEstimate, f64) {
    let samples: Vec<(u64, f64)> = points.iter().copied().zip(values.iter().copied()).collect();
    let mut best = samples[0];
    let mut low = f64::INFINITY;
    for &(n, v) in &samples {
        if v > best.1 {
            best = (n, v);
        }
        low = low.min(v);
    }
    (
        LimsupEstimate {
            value: best.1,
            argmax_index: best.0,
            samples,
        },
        low,
    )
}

fn base_truncation(w: &WindowSpec) -> Truncation {
    Truncation {
        n_max: w.n_max,
        window_frac: w.window_frac,
        j_max: w.j_max,
        window_start: w.window_start(),
        ..Default::default()
    }
}

/// Positions `1..=len` of a schedule that fall in the window.
fn schedule_window(len: usize, w: &WindowSpec) -> Vec<u64> {
    let spec = WindowSpec {
        n_max: len as u64,
        window_frac: w.window_frac,
        j_max: w.j_max,
    };
    spec.grid()
}

fn check_schedule(schedule: &[u64]) -> Result<()> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::PayloadInvalid(format!(
            "schedule must be a nonempty increasing list of positive integers, got {schedule:?}"
        )));
    }
    Ok(())
}

/// Runs `verify_seeded` with base seed 0.
pub fn verify(spec: &VariantSpec, w: &WindowSpec, tol: f64) -> Result<InequalityReport> {
    verify_seeded(spec, w, tol, 0)
}

/// Estimates both sides of the variant on the window `w` and compares them.
/// The verdict uses the right-hand side at `J = j_max`.
pub fn verify_seeded(
    spec: &VariantSpec,
    w: &WindowSpec,
    tol: f64,
    base_seed: u64,
) -> Result<InequalityReport> {
    w.validate()?;
    let seed = spec.cell_seed(base_seed);
    let sides = match spec {
        VariantSpec::Scalar(u) => {
            if u.dim() != 1 {
                return Err(Error::PayloadInvalid(format!(
                    "scalar variant needs a one-dimensional sequence, got dim {}",
                    u.dim()
                )));
            }
            hilbert_sides(u, w)
        }
        VariantSpec::Hilbert(u) => hilbert_sides(u, w),
        VariantSpec::Operator(p) => operator_sides(p, w)?,
        VariantSpec::UniformSup { u, m_max } => uniform_sup_sides(u, m_max.unwrap_or(w.n_max), w),
        VariantSpec::UniformWindow { u, m_max } => {
            uniform_window_sides(u, m_max.unwrap_or(w.n_max), w)
        }
        VariantSpec::WienerWintner(u) => wiener_wintner_sides(u, w),
        VariantSpec::Semigroup(p) => semigroup_sides(p, w)?,
        VariantSpec::CStarAbstract(p) => cstar_sides(p, w, seed)?,
        VariantSpec::ModuleAbstract(p) => module_sides(p, w, seed)?,
    };
    let rhs = sides.rhs_trace.last().map(|&(_, v)| v).unwrap_or(f64::NAN);
    let lhs = sides.lhs.value;
    let margin = rhs - lhs;
    Ok(InequalityReport {
        variant: spec.variant().name().into(),
        payload_digest: spec.digest(),
        lhs,
        rhs,
        margin,
        verdict: Verdict::from_margin(margin, tol),
        j_trace: sides.terms,
        diagnostics: Diagnostics {
            label: spec.label(),
            lhs_argmax: sides.lhs.argmax_index,
            lhs_liminf: sides.lhs_liminf,
            rhs_tail_min: tail_min(&sides.rhs_trace),
            rhs_trace: sides.rhs_trace,
            lambda_star: sides.lambda_star.map(|z| (z.re, z.im)),
            invariance_defect: sides.invariance_defect,
            extra: sides.extra.into_iter().collect(),
        },
        truncation: sides.truncation,
    })
}

fn hilbert_sides(u: &VectorSequence, w: &WindowSpec) -> Sides {
    let grid = w.grid();
    let s = u.sample(w.n_max + w.j_max);
    let d = u.dim();
    let prefix = s.prefix_sums(w.n_max);
    let lhs_values: Vec<f64> = grid
        .iter()
        .map(|&n| {
            let row = &prefix[n as usize * d..(n as usize + 1) * d];
            row.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n) as f64
        })
        .collect();
    let (lhs, lhs_liminf) = window_extremes(&grid, &lhs_values);
    let terms: Vec<(u64, f64)> = (1..=w.j_max)
        .into_par_iter()
        .map(|j| {
            let c = s.correlation_prefix(j, w.n_max);
            let best = grid
                .iter()
                .map(|&n| c[n as usize].re / n as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            (j, best)
        })
        .collect();
    Sides {
        lhs,
        lhs_liminf,
        rhs_trace: prefix_means(&terms),
        terms,
        lambda_star: None,
        invariance_defect: None,
        truncation: base_truncation(w),
        extra: Vec::new(),
    }
}

fn operator_sides(p: &OperatorPayload, w: &WindowSpec) -> Result<Sides> {
    let d = p.s.nrows();
    if !p.s.is_square() || p.t.shape() != (d, d) || p.xi.len() != d {
        return Err(Error::PayloadInvalid(
            "S, T must be square of the size of xi".into(),
        ));
    }
    let defect = isometry_defect(&p.s);
    if defect > 1e-10 {
        return Err(Error::PreconditionFailed {
            check: "isometry".into(),
            witness: format!("|S*S - I| = {defect:e}"),
        });
    }
    if (p.xi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::PayloadInvalid(format!(
            "xi must be a unit vector, |xi| = {}",
            p.xi.norm()
        )));
    }
    let total = (w.n_max + w.j_max) as usize;
    // v_n = S^n ξ and w_n = T v_n for n = 0 .. n_max + j_max − 1
    let mut v = Vec::with_capacity(total);
    let mut cur = p.xi.clone();
    for _ in 0..total {
        let next = &p.s * &cur;
        v.push(cur);
        cur = next;
    }
    let tv: Vec<CVec> = v.iter().map(|x| &p.t * x).collect();
    let n_max = w.n_max as usize;
    let grid = w.grid();

    let mut prefix = vec![ZERO; n_max + 1];
    for n in 0..n_max {
        prefix[n + 1] = prefix[n] + tv[n].dot(&v[n].conjugate());
    }
    let lhs_values: Vec<f64> = grid
        .iter()
        .map(|&n| (prefix[n as usize] / n as f64).norm_sqr())
        .collect();
    let (lhs, lhs_liminf) = window_extremes(&grid, &lhs_values);

    let mut s_pow = CMat::identity(d, d);
    let mut terms = Vec::with_capacity(w.j_max as usize);
    for j in 1..=w.j_max as usize {
        s_pow = &p.s * s_pow;
        let mut acc = 0.0;
        let mut running = vec![0.0; n_max + 1];
        for n in 0..n_max {
            acc += (&s_pow * &tv[n]).dot(&tv[n + j].conjugate()).re;
            running[n + 1] = acc;
        }
        let best = grid
            .iter()
            .map(|&n| running[n as usize] / n as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        terms.push((j as u64, best));
    }
    Ok(Sides {
        lhs,
        lhs_liminf,
        rhs_trace: prefix_means(&terms),
        terms,
        lambda_star: None,
        invariance_defect: None,
        truncation: base_truncation(w),
        extra: vec![("isometry_defect".into(), defect)],
    })
}

fn uniform_sup_sides(u: &VectorSequence, m_max: u64, w: &WindowSpec) -> Sides {
    let grid = w.grid();
    let s = u.sample(m_max + w.n_max + w.j_max);
    let d = u.dim();
    let upto = m_max + w.n_max;
    let prefix = s.prefix_sums(upto);
    let block = |a: u64, b: u64| -> f64 {
        (0..d)
            .map(|i| (prefix[b as usize * d + i] - prefix[a as usize * d + i]).norm_sqr())
            .sum()
    };
    let lhs_values: Vec<f64> = grid
        .par_iter()
        .map(|&n| (0..=m_max).map(|m| block(m, m + n)).fold(0.0, f64::max) / (n * n) as f64)
        .collect();
    let (lhs, lhs_liminf) = window_extremes(&grid, &lhs_values);
    let terms: Vec<(u64, f64)> = (1..=w.j_max)
        .into_par_iter()
        .map(|j| {
            let c = s.correlation_prefix(j, upto);
            let best = grid
                .iter()
                .map(|&n| {
                    let top = (0..=m_max)
                        .map(|m| (c[(m + n) as usize] - c[m as usize]).re)
                        .fold(f64::NEG_INFINITY, f64::max);
                    top / n as f64
                })
                .fold(f64::NEG_INFINITY, f64::max);
            (j, best)
        })
        .collect();
    let mut truncation = base_truncation(w);
    truncation.schedule = None;
    Sides {
        lhs,
        lhs_liminf,
        rhs_trace: prefix_means(&terms),
        terms,
        lambda_star: None,
        invariance_defect: None,
        truncation,
        extra: vec![("m_max".into(), m_max as f64)],
    }
}

fn uniform_window_sides(u: &VectorSequence, m_max: u64, w: &WindowSpec) -> Sides {
    let grid = w.grid();
    let m_start = ((1.0 - w.window_frac) * m_max as f64).ceil().max(1.0) as u64;
    let m_grid = window_grid(
        m_start.min(m_max.max(1)),
        m_max.max(1),
        UNIFORM_WINDOW_M_POINTS,
    );
    let top_m = *m_grid.last().expect("nonempty");
    let s = u.sample(top_m + w.n_max + w.j_max);
    let d = u.dim();
    let upto = top_m + w.n_max;
    let prefix = s.prefix_sums(upto);
    let block = |a: u64, b: u64| -> f64 {
        (0..d)
            .map(|i| (prefix[b as usize * d + i] - prefix[a as usize * d + i]).norm_sqr())
            .sum()
    };
    let lhs_values: Vec<f64> = grid
        .par_iter()
        .map(|&n| m_grid.iter().map(|&m| block(m, m + n)).fold(0.0, f64::max) / (n * n) as f64)
        .collect();
    let (lhs, lhs_liminf) = window_extremes(&grid, &lhs_values);
    let terms: Vec<(u64, f64)> = (1..=w.j_max)
        .into_par_iter()
        .map(|j| {
            let c = s.correlation_prefix(j, upto);
            let best = grid
                .iter()
                .flat_map(|&n| m_grid.iter().map(move |&m| (n, m)))
                .map(|(n, m)| (c[(m + n) as usize] - c[m as usize]).re / n as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            (j, best)
        })
        .collect();
    Sides {
        lhs,
        lhs_liminf,
        rhs_trace: prefix_means(&terms),
        terms,
        lambda_star: None,
        invariance_defect: None,
        truncation: base_truncation(w),
        extra: vec![
            ("m_start".into(), m_grid[0] as f64),
            ("m_max".into(), top_m as f64),
        ],
    }
}

fn wiener_wintner_sides(u: &VectorSequence, w: &WindowSpec) -> Sides {
    let grid = w.grid();
    let s = u.sample(w.n_max + w.j_max);
    let sweep = ww::window_sweep(&s, &grid);
    let lhs_values: Vec<f64> = sweep.iter().map(|p| p.value).collect();
    let (lhs, lhs_liminf) = window_extremes(&grid, &lhs_values);
    let at = grid
        .iter()
        .position(|&n| n == lhs.argmax_index)
        .expect("argmax is a grid point");
    let lambda_star = cis_turns(sweep[at].turns);
    let terms: Vec<(u64, f64)> = (1..=w.j_max)
        .into_par_iter()
        .map(|j| {
            let c = s.correlation_prefix(j, w.n_max);
            let best = grid
                .iter()
                .map(|&n| c[n as usize].norm() / n as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            (j, best)
        })
        .collect();
    Sides {
        lhs,
        lhs_liminf,
        rhs_trace: prefix_means(&terms),
        terms,
        lambda_star: Some(lambda_star),
        invariance_defect: None,
        truncation: base_truncation(w),
        extra: vec![
            ("lambda_star_turns".into(), sweep[at].turns),
            ("torus_grid_points".into(), ww::grid_points(w.n_max) as f64),
        ],
    }
}

/// Row-major box `∏[0..=L_k]` with zero padding at index 0, summed cumulatively
/// along every axis.
struct BoxPrefix {
    sides: Vec<u64>,
    strides: Vec<usize>,
    data: Vec<Complex>,
}

impl BoxPrefix {
    fn new(sides: &[u64], value: impl Fn(&[u64]) -> Complex) -> Self {
        let extents: Vec<usize> = sides.iter().map(|&l| l as usize + 1).collect();
        let mut strides = vec![1usize; extents.len()];
        for k in (0..extents.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * extents[k + 1];
        }
        let total: usize = extents.iter().product();
        let mut data = vec![ZERO; total];
        // odometer over the box, skipping the zero-padded faces
        let mut idx = vec![1u64; sides.len()];
        if sides.iter().all(|&l| l >= 1) {
            loop {
                let flat: usize = idx
                    .iter()
                    .zip(&strides)
                    .map(|(&i, &s)| i as usize * s)
                    .sum();
                data[flat] = value(&idx);
                let mut k = sides.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    if idx[k] < sides[k] {
                        idx[k] += 1;
                        break;
                    }
                    idx[k] = 1;
                }
                if idx.iter().all(|&i| i == 1) {
                    break;
                }
            }
        }
        for k in 0..sides.len() {
            let stride = strides[k];
            for flat in 0..total {
                if !(flat / stride).is_multiple_of(extents[k]) {
                    let prev = data[flat - stride];
                    data[flat] += prev;
                }
            }
        }
        BoxPrefix {
            sides: sides.to_vec(),
            strides,
            data,
        }
    }

    /// Sum over `∏[1..L_k]`.
    fn box_sum(&self, corner: &[u64]) -> Complex {
        debug_assert!(corner.iter().zip(&self.sides).all(|(c, s)| c <= s));
        let flat: usize = corner
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum();
        self.data[flat]
    }
}

fn semigroup_sides(p: &SemigroupPayload, w: &WindowSpec) -> Result<Sides> {
    let d = p.field.dim;
    let check = |boxes: &[Vec<u64>], name: &str| -> Result<()> {
        if boxes.is_empty() || boxes.iter().any(|b| b.len() != d || b.contains(&0)) {
            return Err(Error::PayloadInvalid(format!(
                "{name} schedule must be nonempty boxes with {d} positive sides"
            )));
        }
        Ok(())
    };
    check(&p.f_sides, "F")?;
    check(&p.g_sides, "G")?;
    if p.offset.len() != d {
        return Err(Error::PayloadInvalid(format!(
            "offset needs {d} coordinates"
        )));
    }
    let f_max: Vec<u64> = (0..d)
        .map(|k| p.f_sides.iter().map(|b| b[k]).max().unwrap())
        .collect();
    let g_max: Vec<u64> = (0..d)
        .map(|k| p.g_sides.iter().map(|b| b[k]).max().unwrap())
        .collect();

    // materialize u on ∏[1..F_k + r_k + G_k]
    let region: Vec<u64> = (0..d).map(|k| f_max[k] + p.offset[k] + g_max[k]).collect();
    let mut r_strides = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        r_strides[k] = r_strides[k + 1] * region[k + 1] as usize;
    }
    let total: usize = region.iter().map(|&x| x as usize).product();
    let fiber = p.field.fiber_dim;
    let values: Vec<Complex> = (0..total)
        .into_par_iter()
        .flat_map_iter(|flat| {
            let mut rem = flat;
            let pt: Vec<u64> = (0..d)
                .map(|k| {
                    let i = rem / r_strides[k];
                    rem %= r_strides[k];
                    i as u64 + 1
                })
                .collect();
            let v = p.field.get(&pt);
            debug_assert_eq!(v.len(), fiber);
            v.data.as_vec().clone()
        })
        .collect();
    // region index of t + r + s, split as base(t) + shift(s)
    let base = |t: &[u64]| -> usize {
        t.iter()
            .zip(&r_strides)
            .map(|(&x, &s)| (x as usize - 1) * s)
            .sum()
    };
    let shift = |s: &[u64]| -> usize {
        (0..d)
            .map(|k| (p.offset[k] + s[k]) as usize * r_strides[k])
            .sum()
    };
    let zero_shift = vec![0u64; d];

    let positions = schedule_window(p.f_sides.len(), w);
    let f_window: Vec<&Vec<u64>> = positions
        .iter()
        .map(|&i| &p.f_sides[i as usize - 1])
        .collect();
    let size = |b: &[u64]| b.iter().product::<u64>() as f64;

    let own = shift(&zero_shift);
    let fiber_prefix: Vec<BoxPrefix> = (0..fiber)
        .map(|i| BoxPrefix::new(&f_max, |t| values[(base(t) + own) * fiber + i]))
        .collect();
    let lhs_values: Vec<f64> = f_window
        .iter()
        .map(|b| {
            let n = size(b);
            fiber_prefix
                .iter()
                .map(|pre| (pre.box_sum(b) / n).norm_sqr())
                .sum()
        })
        .collect();
    let (lhs, lhs_liminf) = window_extremes(&positions, &lhs_values);

    let lags = crate::folner::FolnerSet::lattice_box(g_max.clone())?.elements();
    let terms: Vec<(u64, f64)> = lags
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let lagged = shift(s);
            let pre = BoxPrefix::new(&f_max, |t| {
                let b = base(t);
                let a = &values[(b + own) * fiber..(b + own + 1) * fiber];
                let c = &values[(b + lagged) * fiber..(b + lagged + 1) * fiber];
                a.iter().zip(c).map(|(x, y)| x * y.conj()).sum()
            });
            let best = f_window
                .iter()
                .map(|b| pre.box_sum(b).re / size(b))
                .fold(f64::NEG_INFINITY, f64::max);
            ((k + 1) as u64, best)
        })
        .collect();

    // RHS_j: mean of the lag terms over G_j
    let index_of = |s: &[u64]| -> usize {
        let mut flat = 0usize;
        for k in 0..d {
            flat = flat * g_max[k] as usize + (s[k] as usize - 1);
        }
        flat
    };
    let rhs_trace: Vec<(u64, f64)> = p
        .g_sides
        .iter()
        .enumerate()
        .map(|(j, gb)| {
            let members = crate::folner::FolnerSet::Box { sides: gb.clone() }.elements();
            let sum: f64 = members.iter().map(|s| terms[index_of(s)].1).sum();
            ((j + 1) as u64, sum / members.len() as f64)
        })
        .collect();

    let mut truncation = base_truncation(w);
    truncation.n_max = p.f_sides.len() as u64;
    truncation.j_max = p.g_sides.len() as u64;
    truncation.window_start = positions[0];
    truncation.f_sides = Some(p.f_sides.clone());
    truncation.g_sides = Some(p.g_sides.clone());
    Ok(Sides {
        lhs,
        lhs_liminf,
        terms,
        rhs_trace,
        lambda_star: None,
        invariance_defect: None,
        truncation,
        extra: Vec::new(),
    })
}

fn precondition(check: &str, witness: String) -> Error {
    Error::PreconditionFailed {
        check: check.into(),
        witness,
    }
}

/// Flat functionals `ν_i = C_{N_i}'μ_i` for every schedule entry.
pub(crate) fn averaged_functionals(p: &CStarPayload) -> Vec<CVec> {
    let alg = &p.map.algebra;
    let n = alg.dim();
    let mut acc = CMat::zeros(n, n);
    let mut pow = CMat::identity(n, n);
    let mut done = 0u64;
    let mut out = Vec::with_capacity(p.schedule.len());
    for (i, &target) in p.schedule.iter().enumerate() {
        while done < target {
            acc += &pow;
            pow = &p.map.matrix * pow;
            done += 1;
        }
        let c_n = &acc / Complex::new(target as f64, 0.0);
        out.push(c_n.transpose() * p.state_at(i).functional());
    }
    out
}

/// Flat coordinates of `(Φ^j x)* x` for `j = 1..=j_max`.
pub(crate) fn lag_elements(p: &CStarPayload, j_max: u64) -> Vec<CVec> {
    let alg = &p.map.algebra;
    let mut cur = p.x.clone();
    (1..=j_max)
        .map(|_| {
            cur = p.map.apply(&cur).expect("same algebra");
            alg.flatten(&cur.adjoint().multiply(&p.x).expect("same algebra"))
        })
        .collect()
}

fn pair(a: &CVec, b: &CVec) -> Complex {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub(crate) fn validate_cstar(p: &CStarPayload, seed: u64) -> Result<()> {
    check_schedule(&p.schedule)?;
    if p.states.len() != 1 && p.states.len() != p.schedule.len() {
        return Err(Error::PayloadInvalid(format!(
            "need 1 or {} states, got {}",
            p.schedule.len(),
            p.states.len()
        )));
    }
    p.map.algebra.check(&p.x)?;
    let verdict = p
        .map
        .is_markov_schwarz(cstar::DEFAULT_TOL, cstar::DEFAULT_TRIALS, seed);
    if !verdict.passed {
        let w = verdict.witness.expect("failures carry witnesses");
        return Err(precondition(
            "is_markov_schwarz",
            format!(
                "{} (eigenvalue {:e}, block {:?})",
                w.reason, w.eigenvalue, w.block
            ),
        ));
    }
    Ok(())
}

fn cstar_sides(p: &CStarPayload, w: &WindowSpec, seed: u64) -> Result<Sides> {
    validate_cstar(p, seed)?;
    let alg = &p.map.algebra;
    let x = alg.flatten(&p.x);
    let nus = averaged_functionals(p);
    let positions = schedule_window(p.schedule.len(), w);
    let lhs_values: Vec<f64> = positions
        .iter()
        .map(|&i| pair(&nus[i as usize - 1], &x).norm_sqr())
        .collect();
    let (lhs, lhs_liminf) = window_extremes(&positions, &lhs_values);
    let lags = lag_elements(p, w.j_max);
    let terms: Vec<(u64, f64)> = lags
        .iter()
        .enumerate()
        .map(|(k, y)| {
            let best = positions
                .iter()
                .map(|&i| pair(&nus[i as usize - 1], y).re)
                .fold(f64::NEG_INFINITY, f64::max);
            ((k + 1) as u64, best)
        })
        .collect();
    Ok(Sides {
        lhs,
        lhs_liminf,
        rhs_trace: prefix_means(&terms),
        terms,
        lambda_star: None,
        invariance_defect: None,
        truncation: schedule_truncation(&p.schedule, &positions, w),
        extra: Vec::new(),
    })
}

fn schedule_truncation(schedule: &[u64], positions: &[u64], w: &WindowSpec) -> Truncation {
    Truncation {
        n_max: *schedule.last().expect("nonempty"),
        window_frac: w.window_frac,
        j_max: w.j_max,
        window_start: schedule[positions[0] as usize - 1],
        schedule: Some(schedule.to_vec()),
        ..Default::default()
    }
}

fn module_sides(p: &ModulePayload, w: &WindowSpec, seed: u64) -> Result<Sides> {
    check_schedule(&p.schedule)?;
    if p.states.len() != 1 && p.states.len() != p.schedule.len() {
        return Err(Error::PayloadInvalid(format!(
            "need 1 or {} states, got {}",
            p.schedule.len(),
            p.states.len()
        )));
    }
    let module = p.pair.module;
    let verdict = p
        .pair
        .is_s_dominated(cstar::DEFAULT_TOL, cstar::DEFAULT_TRIALS, seed);
    if !verdict.passed {
        let wit = verdict.witness.expect("failures carry witnesses");
        return Err(precondition(
            "is_s_dominated",
            format!("deficit {:e} at point {}", wit.deficit, wit.point),
        ));
    }
    let state_at = |i: usize| -> &Vec<f64> {
        if p.states.len() == 1 {
            &p.states[0]
        } else {
            &p.states[i]
        }
    };
    let x = module.flatten(&p.x);

    // C_{N_i} x for each schedule entry
    let mut sum = CVec::zeros(x.len());
    let mut cur = x.clone();
    let mut done = 0u64;
    let mut averages = Vec::with_capacity(p.schedule.len());
    for &target in &p.schedule {
        while done < target {
            sum += &cur;
            cur = &p.pair.t * cur;
            done += 1;
        }
        averages.push(module.unflatten(&sum.unscale(target as f64))?);
    }
    let nus = p
        .schedule
        .iter()
        .enumerate()
        .map(|(i, &n)| p.pair.averaged_state(state_at(i), n))
        .collect::<Result<Vec<_>>>()?;

    let positions = schedule_window(p.schedule.len(), w);
    let lhs_values: Vec<f64> = positions
        .iter()
        .map(|&i| {
            let i = i as usize - 1;
            let abs = module.abs_sq(&averages[i]).expect("same module");
            abs.iter().zip(state_at(i)).map(|(a, m)| a * m).sum()
        })
        .collect();
    let (lhs, lhs_liminf) = window_extremes(&positions, &lhs_values);

    let mut tx = p.x.clone();
    let mut terms = Vec::with_capacity(w.j_max as usize);
    for j in 1..=w.j_max {
        tx = p.pair.apply_t(&tx)?;
        let z = module.inner(&p.x, &tx)?;
        let best = positions
            .iter()
            .map(|&i| {
                let nu = &nus[i as usize - 1];
                z.iter().zip(nu).map(|(a, b)| a.re * b).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        terms.push((j, best));
    }
    Ok(Sides {
        lhs,
        lhs_liminf,
        rhs_trace: prefix_means(&terms),
        terms,
        lambda_star: None,
        invariance_defect: None,
        truncation: schedule_truncation(&p.schedule, &positions, w),
        extra: vec![("domination_worst_margin".into(), verdict.worst_margin)],
    })
}
