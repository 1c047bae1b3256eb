//! Twisted averages `sup_λ ‖(1/N) Σ λ^n u_n‖²`: recovering a planted
//! frequency under noise.

use vdcorput::harness::{verify, wiener_wintner_sup, GridSpec, VariantSpec, DEFAULT_MARGIN_TOL};
use vdcorput::linalg::c;
use vdcorput::sequences::{IidDistribution, VectorSequence, WindowSpec};

fn main() -> vdcorput::Result<()> {
    let theta = 0.3;
    let planted =
        VectorSequence::geometric_turns(-theta, nalgebra::DVector::from_vec(vec![c(1.0, 0.0)]));
    let noise = VectorSequence::iid_random(0, IidDistribution::UnitCircle, 1);
    let u = planted.add_scaled(0.1, &noise)?;

    let best = wiener_wintner_sup(&u, 2000, GridSpec::for_length(2000))?;
    println!(
        "N = 2000: lambda* at {:.6} turns (planted {theta}), value {:.6}",
        best.turns, best.value
    );

    let report = verify(
        &VariantSpec::WienerWintner(u),
        &WindowSpec::new(5000, 0.5, 50)?,
        DEFAULT_MARGIN_TOL,
    )?;
    print!("{}", report.to_text());
    Ok(())
}
