//! Cesàro averages of a unitary with a spectral gap converge to the
//! projection onto its fixed space at rate `O(1/J)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vdcorput::ergodic::{mean_ergodic_projection, met_convergence_trace, Contraction, DEFAULT_TOL};
use vdcorput::linalg::{random_unitary, CMat, CVec, Complex};

fn main() -> vdcorput::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let angles = [0.0, 0.0, 0.4, -1.1, 2.5, 3.0];
    let u = random_unitary(&mut rng, angles.len());
    let d = CMat::from_diagonal(&CVec::from_iterator(
        angles.len(),
        angles.iter().map(|&a| Complex::from_polar(1.0, a)),
    ));
    let t = Contraction::new(&u * d * u.adjoint())?;
    let gap = angles
        .iter()
        .filter(|&&a| a != 0.0)
        .map(|&a| (Complex::new(1.0, 0.0) - Complex::from_polar(1.0, a)).norm())
        .fold(f64::INFINITY, f64::min);

    let p = mean_ergodic_projection(&t, DEFAULT_TOL)?;
    println!("fixed space rank {}, gap {gap:.4}", p.rank);
    for (j, delta) in met_convergence_trace(&t, &[10, 100, 1000, 10_000], DEFAULT_TOL)? {
        println!(
            "J = {j:>6}: |C_J - P| = {delta:.3e}   2/(J g) = {:.3e}",
            2.0 / (j as f64 * gap)
        );
    }
    Ok(())
}
