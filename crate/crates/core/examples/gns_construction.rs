//! GNS spaces of states on `M_2 ⊕ ℂ`: dimension, Gram spectrum, and the
//! contraction induced by a Markov map with an invariant state.

use vdcorput::cstar::{AlgebraMap, FiniteCStarAlgebra, State};
use vdcorput::gns::{GnsSpace, DEFAULT_TOL};
use vdcorput::linalg::{c, CMat};

fn main() -> vdcorput::Result<()> {
    let alg = FiniteCStarAlgebra::new(vec![2, 1])?;
    let pure = State::new(
        &alg,
        vec![
            CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            CMat::zeros(1, 1),
        ],
    )?;
    for (name, mu) in [("tracial", State::tracial(&alg)), ("pure", pure)] {
        let space = GnsSpace::from_state(&alg, &mu, DEFAULT_TOL)?;
        println!("{name:>8}: h = {}, spectrum {:?}", space.h, space.spectrum);
    }

    let theta = 0.7f64;
    let v = CMat::from_row_slice(
        2,
        2,
        &[
            c(theta.cos(), 0.0),
            c(-theta.sin(), 0.0),
            c(theta.sin(), 0.0),
            c(theta.cos(), 0.0),
        ],
    );
    let map = AlgebraMap::blockwise_conjugation(&alg, &[v, CMat::identity(1, 1)])?;
    let space = GnsSpace::from_state(&alg, &State::tracial(&alg), DEFAULT_TOL)?;
    let s = space.induce_operator(&map.matrix, DEFAULT_TOL)?;
    println!(
        "induced operator: norm {:.12}, unitarity defect {:.2e}",
        s.norm_bound,
        s.unitarity_defect()
    );
    Ok(())
}
