//! Both sides of the scalar inequality for a quadratic Weyl sequence
//! `u_n = exp(2πi α n²)` and for a geometric sequence.
//!
//! `cargo run --release --example scalar_weyl`

use vdcorput::harness::{verify, VariantSpec, DEFAULT_MARGIN_TOL};
use vdcorput::sequences::{parse_sequence, WindowSpec};

fn main() -> vdcorput::Result<()> {
    let weyl = parse_sequence("weyl:alpha=0.41421356237309515,deg=2")?;
    let w = WindowSpec::new(20_000, 0.5, 100)?;
    let report = verify(&VariantSpec::Scalar(weyl), &w, DEFAULT_MARGIN_TOL)?;
    print!("{}", report.to_text());

    // u_n = λ^n with λ = e^{2πi·0.3}; the averages vanish whenever 10 | N
    let geometric = parse_sequence("geometric:theta=0.3,c=[(1,0)]")?;
    let at_end = WindowSpec::new(5000, 1e-4, 50)?;
    let report = verify(&VariantSpec::Scalar(geometric), &at_end, DEFAULT_MARGIN_TOL)?;
    println!();
    print!("{}", report.to_text());
    Ok(())
}
