//! Averages over boxes in ℕ²: Følner defects of the boxes, the net lemma
//! for a character, and the inequality for `u_t = e^{2πi⟨θ,t⟩}`.

use nalgebra::DVector;
use vdcorput::folner::{
    ergodic_net_defect, folner_defect, lattice_character, FolnerSet, Semigroup,
};
use vdcorput::harness::{verify, LatticeField, SemigroupPayload, VariantSpec, DEFAULT_MARGIN_TOL};
use vdcorput::linalg::c;
use vdcorput::sequences::WindowSpec;

fn main() -> vdcorput::Result<()> {
    let sg = Semigroup::lattice(2)?;
    for l in [10, 100, 1000] {
        let f = FolnerSet::cube(2, l)?;
        let d = folner_defect(&sg, &f, &vec![1, 0])?;
        println!("L = {l:>4}: defect of [1..L]^2 under (1,0) = {d}");
    }
    let f = FolnerSet::cube(2, 40)?;
    let net = ergodic_net_defect(&sg, lattice_character(vec![0.3, 0.7]), &f, &vec![1, 1])?;
    println!("net defect {:.3e} <= bound {:.3e}", net.value, net.bound());

    let field = LatticeField::character(vec![0.3, 0.7], DVector::from_vec(vec![c(1.0, 0.0)]));
    let sides: Vec<u64> = (10..=200).step_by(10).collect();
    let payload = SemigroupPayload::cubes(field, &sides, &(1..=10).collect::<Vec<_>>());
    let report = verify(
        &VariantSpec::Semigroup(payload),
        &WindowSpec::new(1, 0.5, 10)?,
        DEFAULT_MARGIN_TOL,
    )?;
    print!("{}", report.to_text());
    Ok(())
}
