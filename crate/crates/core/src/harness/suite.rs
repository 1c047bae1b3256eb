//! Named corpora of inequality checks, run in parallel with a deterministic
//! report order.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cstar::{AlgebraMap, FiniteCStarAlgebra, State};
use crate::error::{Error, Result};
use crate::hilbert_module::{DominatedPair, PreHilbertModule};
use crate::linalg::{c, CMat, CVec, ONE, ZERO};
use crate::sequences::{VectorSequence, WindowSpec};

use super::report::{InequalityReport, Verdict};
use super::variants::{
    verify_seeded, CStarPayload, LatticeField, ModulePayload, OperatorPayload, SemigroupPayload,
    VariantSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Smoke,
    Full,
}

impl SuiteName {
    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Smoke => "smoke",
            SuiteName::Full => "full",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(SuiteName::Smoke),
            "full" => Ok(SuiteName::Full),
            _ => Err(Error::Parse(format!(
                "unknown suite `{s}` (expected smoke or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteCell {
    pub name: String,
    pub spec: VariantSpec,
    pub window: WindowSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub name: String,
    pub variant: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<InequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl CellOutcome {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.verdict.is_ok())
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.report.as_ref().map(|r| r.verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    /// Outcomes in corpus order, up to and including the first failure.
    pub cells: Vec<CellOutcome>,
    pub completed: usize,
    pub total: usize,
    pub halted: bool,
}

impl SuiteResult {
    pub fn all_passed(&self) -> bool {
        !self.halted && self.cells.iter().all(CellOutcome::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite results serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for cell in &self.cells {
            match (&cell.report, &cell.error) {
                (Some(r), _) => {
                    out += &format!(
                        "{:<34} {:<16} lhs {:+.6e}  rhs {:+.6e}  margin {:+.3e}  {}\n",
                        cell.name,
                        cell.variant,
                        r.lhs,
                        r.rhs,
                        r.margin,
                        r.verdict.as_str()
                    )
                }
                (None, Some(e)) => {
                    out += &format!("{:<34} {:<16} error: {e}\n", cell.name, cell.variant)
                }
                (None, None) => {}
            }
        }
        out += &format!(
            "{}: {}/{} cells{}\n",
            self.suite,
            self.completed,
            self.total,
            if self.halted {
                ", halted at first failure"
            } else {
                ""
            }
        );
        out
    }
}

/// A window that only looks at `N = n_max`.
fn endpoint(n_max: u64, j_max: u64) -> WindowSpec {
    WindowSpec::new(n_max, 0.5 / n_max as f64, j_max).expect("valid window")
}

fn vec_of(values: &[(f64, f64)]) -> CVec {
    DVector::from_iterator(values.len(), values.iter().map(|&(re, im)| c(re, im)))
}

fn cell(name: &str, spec: VariantSpec, window: WindowSpec) -> SuiteCell {
    SuiteCell {
        name: name.into(),
        spec,
        window,
    }
}

fn sequence_cells(scale: u64) -> Vec<SuiteCell> {
    let one = vec_of(&[(1.0, 0.0)]);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let orbit =
        VectorSequence::rotation_orbit(vec![0.0, 1.0 / 3.0], vec_of(&[(half, 0.0), (0.0, half)]))
            .expect("unit circle");
    let quarter = VectorSequence::geometric_turns(0.25, one.clone());
    let constant = VectorSequence::constant(vec_of(&[(0.6, 0.0), (0.0, 0.8)]));
    let n = 120 * scale;
    vec![
        cell(
            "scalar/constant",
            VariantSpec::Scalar(VectorSequence::constant(one.clone())),
            WindowSpec::new(n, 0.5, 8).unwrap(),
        ),
        cell(
            "scalar/quarter-turn",
            VariantSpec::Scalar(quarter.clone()),
            endpoint(n, 4),
        ),
        cell(
            "scalar/periodic",
            VariantSpec::Scalar(
                VectorSequence::periodic(vec![one.clone(), one.clone(), vec_of(&[(-1.0, 0.0)])])
                    .unwrap(),
            ),
            endpoint(n, 3),
        ),
        cell(
            "hilbert/constant",
            VariantSpec::Hilbert(constant.clone()),
            WindowSpec::new(n, 0.5, 6).unwrap(),
        ),
        cell(
            "hilbert/rotation-orbit",
            VariantSpec::Hilbert(orbit.clone()),
            endpoint(n, 6),
        ),
        cell(
            "uniform_sup/quarter-turn",
            VariantSpec::UniformSup {
                u: quarter.clone(),
                m_max: Some(n / 2),
            },
            endpoint(n, 4),
        ),
        cell(
            "uniform_window/constant",
            VariantSpec::UniformWindow {
                u: constant.clone(),
                m_max: None,
            },
            WindowSpec::new(n, 0.5, 4).unwrap(),
        ),
        cell(
            "uniform_window/rotation-orbit",
            VariantSpec::UniformWindow {
                u: orbit,
                m_max: None,
            },
            endpoint(n, 3),
        ),
        cell(
            "wiener_wintner/geometric",
            VariantSpec::WienerWintner(VectorSequence::geometric_turns(-0.3, one)),
            WindowSpec::new(n, 0.5, 10).unwrap(),
        ),
        cell(
            "wiener_wintner/constant",
            VariantSpec::WienerWintner(constant),
            WindowSpec::new(n, 0.5, 5).unwrap(),
        ),
    ]
}

fn structured_cells(scale: u64) -> Vec<SuiteCell> {
    let mut cells = Vec::new();

    // S = diag(1, e^{iα}), T = projection on the first coordinate
    let s = CMat::from_diagonal(&vec_of(&[(1.0, 0.0), (0.8f64.cos(), 0.8f64.sin())]));
    let t = CMat::from_diagonal(&DVector::from_vec(vec![ONE, ZERO]));
    let xi = vec_of(&[(0.6, 0.0), (0.0, 0.8)]);
    cells.push(cell(
        "operator/diagonal-isometry",
        VariantSpec::Operator(OperatorPayload { s, t, xi }),
        WindowSpec::new(100 * scale, 0.5, 12).unwrap(),
    ));

    let field = LatticeField::character(vec![0.25, 0.5], vec_of(&[(1.0, 0.0)]));
    let f: Vec<u64> = (1..=10 * scale).map(|k| 4 * k).collect();
    cells.push(cell(
        "semigroup/character-2d",
        VariantSpec::Semigroup(SemigroupPayload::cubes(field, &f, &[1, 2, 3, 4])),
        WindowSpec::new(1, 0.5, 4).unwrap(),
    ));
    let constant = LatticeField::character(vec![0.0], vec_of(&[(0.6, 0.0), (0.8, 0.0)]));
    let f: Vec<u64> = (1..=50 * scale).collect();
    cells.push(cell(
        "semigroup/constant-1d",
        VariantSpec::Semigroup(SemigroupPayload::cubes(constant, &f, &[1, 2, 3])),
        WindowSpec::new(1, 0.5, 3).unwrap(),
    ));

    let schedule: Vec<u64> = (1..=20 * scale).map(|k| 5 * k).collect();
    let alg = FiniteCStarAlgebra::matrices(2);
    let x = alg
        .element(vec![CMat::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.2, 0.1), c(-0.3, 0.0), c(0.1, 0.4)],
        )])
        .unwrap();
    let mu = State::vector_state(&alg, &vec_of(&[(0.6, 0.0), (0.0, 0.8)])).unwrap();
    cells.push(cell(
        "cstar/identity-map",
        VariantSpec::CStarAbstract(CStarPayload {
            map: AlgebraMap::identity(&alg),
            x: x.clone(),
            states: vec![mu],
            schedule: schedule.clone(),
        }),
        WindowSpec::new(1, 0.5, 6).unwrap(),
    ));
    let m = 5;
    let shift_alg = FiniteCStarAlgebra::commutative(m);
    let f_values = [(1.0, 0.0), (0.3, 0.2), (-0.5, 0.0), (0.0, 0.7), (0.2, -0.1)];
    let fx = shift_alg
        .element(
            f_values
                .iter()
                .map(|&(re, im)| CMat::from_element(1, 1, c(re, im)))
                .collect(),
        )
        .unwrap();
    cells.push(cell(
        "cstar/cyclic-shift",
        VariantSpec::CStarAbstract(CStarPayload {
            map: AlgebraMap::cyclic_shift(m),
            x: fx,
            states: vec![State::tracial(&shift_alg)],
            schedule,
        }),
        WindowSpec::new(1, 0.5, 2 * m as u64).unwrap(),
    ));

    let module = PreHilbertModule::new(4, 2).unwrap();
    let values = CMat::from_fn(4, 2, |k, i| {
        c(
            (k as f64 + 1.0) * 0.2,
            if i == 1 { 0.3 } else { -0.1 * k as f64 },
        )
    });
    let x = module.element(values).unwrap();
    cells.push(cell(
        "module/cyclic-shift",
        VariantSpec::ModuleAbstract(ModulePayload {
            pair: DominatedPair::cyclic_shift(module),
            x,
            states: vec![vec![0.25; 4]],
            schedule: (1..=20 * scale).map(|k| 4 * k).collect(),
        }),
        WindowSpec::new(1, 0.5, 8).unwrap(),
    ));
    cells
}

/// The cells of a named corpus, in canonical order.
pub fn corpus(name: SuiteName) -> Vec<SuiteCell> {
    let scale = match name {
        SuiteName::Smoke => 1,
        SuiteName::Full => 10,
    };
    let mut cells = sequence_cells(scale);
    cells.extend(structured_cells(scale));
    if name == SuiteName::Full {
        let wide = WindowSpec::new(20_000, 0.5, 4).unwrap();
        cells.push(cell(
            "scalar/constant-geometric-grid",
            VariantSpec::Scalar(VectorSequence::constant(vec_of(&[(0.0, 1.0)]))),
            wide,
        ));
        cells.push(cell(
            "hilbert/orbit-geometric-grid",
            VariantSpec::Hilbert(
                VectorSequence::rotation_orbit(vec![0.0, 0.25], vec_of(&[(0.8, 0.0), (0.6, 0.0)]))
                    .unwrap(),
            ),
            endpoint(20_000, 4),
        ));
    }
    cells
}

/// Evaluates every cell (in parallel) and keeps outcomes up to the first
/// failure in corpus order.
pub fn run_cells(suite: &str, cells: &[SuiteCell], tol: f64, base_seed: u64) -> SuiteResult {
    let outcomes: Vec<CellOutcome> = cells
        .par_iter()
        .map(|cell| {
            let variant = cell.spec.variant().name().to_string();
            match verify_seeded(&cell.spec, &cell.window, tol, base_seed) {
                Ok(mut report) => {
                    report.diagnostics.label = cell.name.clone();
                    CellOutcome {
                        name: cell.name.clone(),
                        variant,
                        report: Some(report),
                        error: None,
                    }
                }
                Err(e) => CellOutcome {
                    name: cell.name.clone(),
                    variant,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let total = outcomes.len();
    let stop = outcomes.iter().position(|o| !o.passed());
    let kept: Vec<CellOutcome> = match stop {
        Some(i) => outcomes.into_iter().take(i + 1).collect(),
        None => outcomes,
    };
    SuiteResult {
        suite: suite.into(),
        completed: kept.len(),
        cells: kept,
        total,
        halted: stop.is_some(),
    }
}

pub fn run_suite(name: SuiteName, tol: f64, base_seed: u64) -> SuiteResult {
    run_cells(name.as_str(), &corpus(name), tol, base_seed)
}
