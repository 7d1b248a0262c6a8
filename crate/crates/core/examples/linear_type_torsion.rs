//! The linear-type structure on hyperbolic space has torsion along ξ.

use co1as::co1::{normal_torsion_at, structure_at};
use co1as::decomp::{classify, CLASSIFY_TOL};
use co1as::registry::{build_example, ExampleName, ExampleParams};

fn main() -> co1as::Result<()> {
    let ex = build_example(ExampleName::LinearTypeHyperbolic, 3, &ExampleParams::default())?;
    let p = [0.4, 1.0, -1.0, 0.5];
    println!("g(T̃(ξ, e_b), e_c):\n{:.6}", normal_torsion_at(&ex.setup, &p)?);
    let report = classify(&structure_at(&ex.setup, &p)?, CLASSIFY_TOL)?;
    for c in report.present() {
        println!("{} norm {:.6} param {:?}", c.id, c.norm, c.param);
    }
    Ok(())
}
