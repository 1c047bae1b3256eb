//! Step-by-step reproduction of the abstract argument on a finite C*-model:
//! averaged state, GNS space, induced contraction, mean ergodic projection,
//! and the chain of (in)equalities linking both sides.

use serde::{Deserialize, Serialize};

use crate::cstar::State;
use crate::ergodic::{self, cesaro_limit, cesaro_power_avg, mean_ergodic_projection, Contraction};
use crate::error::Result;
use crate::gns::{self, GnsSpace};
use crate::linalg::{hermitian_eigen, spectral_norm, CVec, Complex};
use crate::sequences::WindowSpec;

use super::variants::{
    averaged_functionals, lag_elements, validate_cstar, verify_seeded, CStarPayload, VariantSpec,
};

/// Above this the averaged state is replaced by its exact invariant limit.
pub const INVARIANCE_TOL: f64 = 1e-9;

/// Slack on each link of the chain.
pub const CHAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    /// First entry of the chain.
    Start,
    /// Equal to the previous value.
    Eq,
    /// At least the previous value, up to `slack`.
    Le { slack: f64 },
    /// Within `bound` of the previous value.
    Approx { bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub label: String,
    pub value: f64,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    /// Schedule position (1-based) attaining the left-hand side.
    pub argmax_index: u64,
    pub n_star: u64,
    pub invariance_defect: f64,
    pub projected: bool,
    /// Trace-norm distance moved by the projection (0 if none).
    pub projection_distance: f64,
    pub gns_dim: usize,
    pub induced_norm: f64,
    pub unitarity_defect: f64,
    pub fixed_rank: usize,
    pub met_delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub chain: Vec<ChainLink>,
    pub monotone: bool,
}

impl PipelineTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("traces serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "argmax index {} (N* = {}), invariance defect {:.3e}{}\n",
            self.argmax_index,
            self.n_star,
            self.invariance_defect,
            if self.projected {
                format!(", projected by {:.3e}", self.projection_distance)
            } else {
                String::new()
            }
        );
        out += &format!(
            "GNS dim {}, |S| = {:.12}, unitarity defect {:.3e}, fix rank {}, |C_J - P| = {:.3e}\n",
            self.gns_dim, self.induced_norm, self.unitarity_defect, self.fixed_rank, self.met_delta
        );
        for link in &self.chain {
            let (rel, note) = match link.relation {
                Relation::Start => ("  ", String::new()),
                Relation::Eq => ("= ", String::new()),
                Relation::Le { .. } => ("<=", String::new()),
                Relation::Approx { bound } => ("~ ", format!("  (within {bound:.2e})")),
            };
            out += &format!("  {rel} {:+.12e}  {}{note}\n", link.value, link.label);
        }
        out += &format!("monotone: {}\n", self.monotone);
        out
    }
}

fn trace_norm_distance(a: &State, b: &State) -> f64 {
    a.densities
        .iter()
        .zip(&b.densities)
        .map(|(x, y)| {
            hermitian_eigen(&(x - y))
                .0
                .iter()
                .map(|v| v.abs())
                .sum::<f64>()
        })
        .sum()
}

fn pair(a: &CVec, b: &CVec) -> Complex {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `(a|b) = Σ a_i conj(b_i)`.
fn hinner(a: &CVec, b: &CVec) -> Complex {
    b.dotc(a)
}

fn check_chain(chain: &[ChainLink]) -> bool {
    chain.windows(2).all(|w| {
        let (prev, cur) = (w[0].value, w[1].value);
        let scale = prev.abs().max(cur.abs()).max(1.0);
        match w[1].relation {
            Relation::Start => true,
            Relation::Eq => (cur - prev).abs() <= CHAIN_TOL * scale,
            Relation::Le { slack } => prev <= cur + slack + CHAIN_TOL * scale,
            Relation::Approx { bound } => (cur - prev).abs() <= bound + CHAIN_TOL * scale,
        }
    })
}

/// Runs the argument on a finite model and records every intermediate value.
pub fn run_proof_pipeline(
    p: &CStarPayload,
    w: &WindowSpec,
    base_seed: u64,
) -> Result<PipelineTrace> {
    let spec = VariantSpec::CStarAbstract(p.clone());
    let report = verify_seeded(&spec, w, f64::INFINITY, base_seed)?;
    validate_cstar(p, spec.cell_seed(base_seed))?;
    let alg = &p.map.algebra;
    let x_flat = alg.flatten(&p.x);
    let x_norm = p.x.norm();

    let argmax_index = report.diagnostics.lhs_argmax;
    let i_star = argmax_index as usize - 1;
    let n_star = p.schedule[i_star];
    let nus = averaged_functionals(p);
    let nu_flat = nus[i_star].clone();
    let nu = State::from_functional(alg, &nu_flat, 1e-8)?;

    let dual = p.map.matrix.transpose();
    let moved = State::from_functional(alg, &(&dual * &nu_flat), 1e-8)?;
    let invariance_defect = trace_norm_distance(&moved, &nu);
    let (state, projected, projection_distance) = if invariance_defect > INVARIANCE_TOL {
        let limit = cesaro_limit(&dual, ergodic::DEFAULT_TOL)?;
        let exact = State::from_functional(alg, &(&limit * &nu_flat), 1e-8)?;
        let d = trace_norm_distance(&exact, &nu);
        (exact, true, d)
    } else {
        (nu, false, 0.0)
    };

    let space = GnsSpace::from_state(alg, &state, gns::DEFAULT_TOL)?;
    let induced = space.induce_operator(&p.map.matrix, gns::DEFAULT_TOL)?;
    let contraction = Contraction::new(induced.matrix.clone())?;
    let projection = mean_ergodic_projection(&contraction, ergodic::DEFAULT_TOL)?;
    let c_j = cesaro_power_avg(&induced.matrix, w.j_max);
    let met_delta = spectral_norm(&(&c_j - &projection.matrix));

    let xv = space.coords(&x_flat);
    let one = space.vector_of_unit(&alg.flatten(&alg.unit()));
    let px = &projection.matrix * &xv;
    let cx = &c_j * &xv;

    let lags = lag_elements(p, w.j_max);
    let state_route = lags
        .iter()
        .map(|y| pair(&state.functional(), y).re)
        .sum::<f64>()
        / w.j_max as f64;

    let proj_bound = 2.0 * x_norm * x_norm * projection_distance;
    let chain = vec![
        ChainLink {
            label: format!("|<C_N x, mu>|^2 at N* = {n_star}"),
            value: report.lhs,
            relation: Relation::Start,
        },
        ChainLink {
            label: "|nu(x)|^2".into(),
            value: pair(&state.functional(), &x_flat).norm_sqr(),
            relation: if projected {
                Relation::Approx { bound: proj_bound }
            } else {
                Relation::Eq
            },
        },
        ChainLink {
            label: "|(P[x] | [1])|^2".into(),
            value: hinner(&px, &one).norm_sqr(),
            relation: Relation::Eq,
        },
        ChainLink {
            label: "|P[x]|^2 |[1]|^2".into(),
            value: px.norm_squared() * one.norm_squared(),
            relation: Relation::Le { slack: 0.0 },
        },
        ChainLink {
            label: "|P[x]|^2".into(),
            value: px.norm_squared(),
            relation: Relation::Eq,
        },
        ChainLink {
            label: "Re([x] | P[x])".into(),
            value: hinner(&xv, &px).re,
            relation: Relation::Eq,
        },
        ChainLink {
            label: format!("Re([x] | C_J [x]), J = {}", w.j_max),
            value: hinner(&xv, &cx).re,
            relation: Relation::Approx {
                bound: met_delta * xv.norm_squared(),
            },
        },
        ChainLink {
            label: "(1/J) sum_j Re nu((Phi^j x)* x)".into(),
            value: state_route,
            relation: Relation::Eq,
        },
        ChainLink {
            label: "right-hand side estimate".into(),
            value: report.rhs,
            relation: Relation::Le { slack: proj_bound },
        },
    ];
    let monotone = check_chain(&chain);
    Ok(PipelineTrace {
        argmax_index,
        n_star,
        invariance_defect,
        projected,
        projection_distance,
        gns_dim: space.basis.ncols(),
        induced_norm: induced.norm_bound,
        unitarity_defect: induced.unitarity_defect(),
        fixed_rank: projection.rank,
        met_delta,
        lhs: report.lhs,
        rhs: report.rhs,
        chain,
        monotone,
    })
}
