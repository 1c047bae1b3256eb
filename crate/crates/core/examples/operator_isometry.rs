//! Orbits `S^n ξ` of an isometry tested against a contraction `T`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vdcorput::harness::{verify, OperatorPayload, VariantSpec, DEFAULT_MARGIN_TOL};
use vdcorput::linalg::{c, random_matrix, spectral_norm, CVec, ONE, ZERO};
use vdcorput::sequences::WindowSpec;

fn main() -> vdcorput::Result<()> {
    let s = DMatrix::from_diagonal(&CVec::from_vec(vec![ONE, c(1f64.cos(), 1f64.sin())]));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let raw = random_matrix(&mut rng, 2, 2);
    let t = &raw / c(spectral_norm(&raw), 0.0);
    let xi = CVec::from_vec(vec![ONE, ZERO]);

    let payload = OperatorPayload { s, t, xi };
    let report = verify(
        &VariantSpec::Operator(payload),
        &WindowSpec::new(2000, 0.5, 20)?,
        DEFAULT_MARGIN_TOL,
    )?;
    print!("{}", report.to_text());
    Ok(())
}
