//! Second fundamental form of the leaves, computed two ways.

use co1as::co1::second_fundamental_form_at;
use co1as::registry::{build_example, ExampleName, ExampleParams};

fn main() -> co1as::Result<()> {
    let spheres = build_example(ExampleName::ConcentricSpheres, 2, &ExampleParams::default())?;
    for r in [0.75, 1.5, 3.0] {
        let ii = second_fundamental_form_at(spheres.setup.metric(), spheres.setup.xi(), &[r, 0.1, -0.3])?;
        println!(
            "sphere r = {r:<4}  mean curvature {:+.9} (-1/r = {:+.9})  two-way discrepancy {:.1e}",
            ii.mean_curvature(),
            -1.0 / r,
            ii.discrepancy()
        );
    }
    let horo = build_example(ExampleName::Horospheres, 3, &ExampleParams::default())?;
    let ii = second_fundamental_form_at(horo.setup.metric(), horo.setup.xi(), &[0.3, 0.0, 1.0, 2.0])?;
    println!("horosphere II =\n{:.6}", ii.components);
    Ok(())
}
