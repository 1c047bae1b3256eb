//! The argument on a finite C*-algebra, link by link: the averaged state,
//! its GNS space, the induced contraction and the mean ergodic projection.

use vdcorput::cstar::{AlgebraMap, FiniteCStarAlgebra, State};
use vdcorput::harness::{run_proof_pipeline, CStarPayload};
use vdcorput::linalg::{c, CMat};
use vdcorput::sequences::WindowSpec;

fn main() -> vdcorput::Result<()> {
    let m = 6;
    let alg = FiniteCStarAlgebra::commutative(m);
    let x = alg.element(
        (0..m)
            .map(|k| CMat::from_element(1, 1, c(k as f64 / m as f64, 0.3)))
            .collect(),
    )?;
    let payload = CStarPayload {
        map: AlgebraMap::cyclic_shift(m),
        x,
        states: vec![State::point_mass(&alg, 0)?],
        schedule: vec![10 * m as u64],
    };
    let trace = run_proof_pipeline(&payload, &WindowSpec::new(1, 0.5, 12)?, 0)?;
    println!("cyclic shift on C(Z/{m}Z), point mass:");
    print!("{}", trace.to_text());

    let v = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0, 0.0),
        c(1f64.cos(), 1f64.sin()),
    ]));
    let alg = FiniteCStarAlgebra::matrices(2);
    let x = alg.element(vec![CMat::from_row_slice(
        2,
        2,
        &[c(0.2, 0.0), c(0.7, 0.1), c(0.0, -0.4), c(0.5, 0.0)],
    )])?;
    let payload = CStarPayload {
        map: AlgebraMap::blockwise_conjugation(&alg, &[v])?,
        x,
        states: vec![State::tracial(&alg)],
        schedule: vec![5, 10, 20, 40],
    };
    let trace = run_proof_pipeline(&payload, &WindowSpec::new(1, 0.5, 40)?, 0)?;
    println!("\nconjugation by diag(1, e^i) on M_2, tracial state:");
    print!("{}", trace.to_text());
    Ok(())
}
