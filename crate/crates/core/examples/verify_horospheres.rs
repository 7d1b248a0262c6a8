//! Checks the structure equations for the horosphere foliation of hyperbolic space.
//!
//! `cargo run --example verify_horospheres -- 4` picks the leaf dimension.

use co1as::co1::verify_co1;
use co1as::registry::{build_example, ExampleName, ExampleParams};

fn main() -> co1as::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    for analytic in [true, false] {
        let params = ExampleParams { analytic, ..Default::default() };
        let ex = build_example(ExampleName::Horospheres, n, &params)?;
        let points = ex.sample_points(50, 0)?;
        let report = verify_co1(&ex.setup, &points, 1e-6)?;
        let w = report.worst;
        println!(
            "{} derivatives: pass = {}  nabla_R {:.1e}  nabla_T {:.1e}  nabla_xi {:.1e}  nabla_g_D {:.1e}  torsion_D {:.1e}  frobenius {:.1e}",
            if analytic { "closed-form" } else { "difference" },
            report.pass,
            w.nabla_curvature,
            w.nabla_torsion,
            w.nabla_xi,
            w.nabla_metric_d,
            w.torsion_d,
            w.frobenius
        );
    }
    Ok(())
}
