//! A pre-Hilbert module of maps `K → ℂ^d`: domination check for a lifted
//! lazy random walk on three points and both sides of the module inequality
//! under its stationary state.

use nalgebra::DMatrix;
use vdcorput::harness::{verify, ModulePayload, VariantSpec, DEFAULT_MARGIN_TOL};
use vdcorput::hilbert_module::{DominatedPair, PreHilbertModule};
use vdcorput::linalg::c;
use vdcorput::sequences::WindowSpec;

fn main() -> vdcorput::Result<()> {
    let module = PreHilbertModule::new(3, 2)?;
    let p = DMatrix::from_row_slice(
        3,
        3,
        &[0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5].map(|v| c(v, 0.0)),
    );
    let pair = DominatedPair::lifted(module, p)?;
    let verdict = pair.is_s_dominated(1e-9, 200, 1);
    println!(
        "dominated: {} (worst margin {:.3e})",
        verdict.passed, verdict.worst_margin
    );

    let x = module.element(DMatrix::from_fn(3, 2, |k, i| {
        c(1.0 + k as f64, i as f64 - 0.5)
    }))?;
    let payload = ModulePayload {
        pair,
        x,
        states: vec![vec![1.0 / 3.0; 3]],
        schedule: (1..=40).map(|k| 25 * k).collect(),
    };
    let report = verify(
        &VariantSpec::ModuleAbstract(payload),
        &WindowSpec::new(1, 0.5, 30)?,
        DEFAULT_MARGIN_TOL,
    )?;
    print!("{}", report.to_text());
    Ok(())
}
