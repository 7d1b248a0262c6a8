//! Rebuilds the sphere structure from Killing fields and compares it with ∇ − ∇̃.

use co1as::co1::{canonical_structure_at, direct_structure_value, normal_torsion_at, Slot};
use co1as::registry::{build_example, ExampleName, ExampleParams};

fn main() -> co1as::Result<()> {
    let ex = build_example(ExampleName::ConcentricSpheres, 2, &ExampleParams::default())?;
    let killing = ex.killing.as_ref().expect("the sphere example has Killing data");
    let basis = Slot::basis(killing.len());
    for t in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let mut worst = 0.0_f64;
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let a = canonical_structure_at(&ex.setup, killing, t, *x, *y, *z)?;
                    let b = direct_structure_value(&ex.setup, killing, t, *x, *y, *z)?;
                    worst = worst.max((a - b).abs());
                }
            }
        }
        let q = killing.geodesic(t);
        let torsion = normal_torsion_at(&ex.setup, &q)?.amax();
        println!("t = {t:.1}  r = {:.1}  max |canonical - direct| {worst:.1e}  |T̃(ξ,·)| {torsion:.1e}", q[0]);
    }
    Ok(())
}
