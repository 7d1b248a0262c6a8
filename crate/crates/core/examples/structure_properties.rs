//! Pointwise properties shared by every cohomogeneity-one structure.

use co1as::co1::verify_structure_properties;
use co1as::registry::{build_example, ExampleName, ExampleParams};

fn main() -> co1as::Result<()> {
    for name in [ExampleName::Horospheres, ExampleName::LinearTypeHyperbolic, ExampleName::ConcentricSpheres] {
        let ex = build_example(name, 3, &ExampleParams::default())?;
        let p = &ex.sample_points(1, 5)?[0];
        let props = verify_structure_properties(&ex.setup, p, 1e-6)?;
        println!("{name}");
        println!("  ∇̃_X S, X in D      {:.1e}", props.parallel_along_d);
        println!("  S_X metric in D     {:.1e}", props.metric_in_d);
        println!("  S_ij0 - II_ij       {:.1e}", props.second_fundamental_form);
        println!("  S_ξ ξ               {:.1e}", props.normal_normal);
        println!("  ∇̃_ξ S (measured)    {:.3e}", props.parallel_along_xi);
        println!("  holds: {:?}", props.holds());
    }
    Ok(())
}
