//! Uniform versions: the supremum over block starts `M`, and the
//! two-parameter window in `(N, M)`, next to the plain Hilbert variant.

use vdcorput::harness::{verify, VariantSpec, DEFAULT_MARGIN_TOL};
use vdcorput::sequences::{parse_sequence, WindowSpec};

fn main() -> vdcorput::Result<()> {
    let u = parse_sequence("periodic:[(1,0);(1,0);(-1,0)]")?;
    // N = 600 and J = 12 cover whole periods, so no O(1/N) boundary terms enter
    let w = WindowSpec::new(600, 1e-4, 12)?;
    for spec in [
        VariantSpec::Hilbert(u.clone()),
        VariantSpec::UniformSup {
            u: u.clone(),
            m_max: None,
        },
        VariantSpec::UniformWindow { u, m_max: None },
    ] {
        let r = verify(&spec, &w, DEFAULT_MARGIN_TOL)?;
        println!(
            "{:<15} lhs {:.9}  rhs {:.9}  margin {:+.3e}  {}",
            r.variant,
            r.lhs,
            r.rhs,
            r.margin,
            r.verdict.as_str()
        );
    }
    Ok(())
}
