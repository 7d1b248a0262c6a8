//! Shape operator of the orbits along the normal geodesic, from the Killing Gram matrix.

use co1as::co1::shape_operator_along_geodesic;
use co1as::registry::{build_example, ExampleName, ExampleParams};

fn main() -> co1as::Result<()> {
    for name in [ExampleName::ConcentricSpheres, ExampleName::Horospheres, ExampleName::ParallelHyperplanes] {
        let ex = build_example(name, 3, &ExampleParams::default())?;
        let killing = ex.killing.as_ref().expect("Killing data");
        println!("{name}");
        for s in shape_operator_along_geodesic(&ex.setup, killing, &[0.0, 0.5, 1.0])? {
            let q = killing.geodesic(s.t);
            println!(
                "  t = {:.1}  eigenvalues {:?}  f'/f = {:+.6}",
                s.t,
                s.eigenvalues.iter().map(|e| format!("{e:+.6}")).collect::<Vec<_>>(),
                ex.trace_parameter(&q)
            );
        }
    }
    Ok(())
}
