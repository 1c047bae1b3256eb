//! Hilbert-space-valued sequences: a rotation orbit in ℂ² whose first
//! coordinate is fixed, and a constant sequence that saturates the bound.

use nalgebra::DVector;
use vdcorput::harness::{verify, VariantSpec, DEFAULT_MARGIN_TOL};
use vdcorput::linalg::c;
use vdcorput::sequences::{VectorSequence, WindowSpec};

fn main() -> vdcorput::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let orbit = VectorSequence::rotation_orbit(
        vec![0.0, 1.0 / 3.0],
        DVector::from_vec(vec![c(h, 0.0), c(0.0, h)]),
    )?;
    // the fixed coordinate carries mass 1/2, which both sides recover
    let w = WindowSpec::new(3000, 1e-4, 30)?;
    let report = verify(&VariantSpec::Hilbert(orbit), &w, DEFAULT_MARGIN_TOL)?;
    print!("{}", report.to_text());

    let constant = VectorSequence::constant(DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]));
    let report = verify(
        &VariantSpec::Hilbert(constant),
        &WindowSpec::new(1000, 0.5, 10)?,
        DEFAULT_MARGIN_TOL,
    )?;
    println!(
        "\nconstant: lhs {:.12} rhs {:.12} margin {:+.2e}",
        report.lhs, report.rhs, report.margin
    );
    Ok(())
}
