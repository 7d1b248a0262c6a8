//! A user-built setup: dt² + cosh²t dx² with the product connection, and one that fails.

use co1as::co1::{structure_at, verify_co1, Co1Setup};
use co1as::connection::levi_civita;
use co1as::decomp::{classify, CLASSIFY_TOL};
use co1as::geometry::{warped_metric, Chart, MetricField, Point, VectorField, WarpFunction};

fn main() -> co1as::Result<()> {
    let fiber = MetricField::euclidean(Chart::cube("R^2", 2, -3.0, 3.0)?);
    let metric = warped_metric((-1.5, 1.5), &WarpFunction::cosh(), &fiber)?;
    let product = warped_metric((-1.5, 1.5), &WarpFunction::constant(1.0), &fiber)?;
    let xi = VectorField::coordinate(metric.chart().clone(), 0);
    let setup = Co1Setup::new("cosh", metric.clone(), xi.clone(), levi_civita(&product))?;

    let points: Vec<Point> = [[-1.0, 0.0, 0.5], [0.2, 1.0, -2.0], [1.1, 0.3, 0.3]].map(|p| Point(p.to_vec())).into();
    let report = verify_co1(&setup, &points, 1e-6)?;
    println!("product connection: pass = {}, worst {:.1e}", report.pass, report.worst.max());
    for p in &points {
        let c = classify(&structure_at(&setup, p)?, CLASSIFY_TOL)?;
        println!("  t = {:+.1}  {:?}  tanh t = {:+.6}", p[0], c.present_ids(), p[0].tanh());
    }

    // the Levi-Civita connection of the warped metric does not keep ξ parallel
    let broken = Co1Setup::new("cosh-lc", metric.clone(), xi, levi_civita(&metric))?;
    let report = verify_co1(&broken, &points, 1e-6)?;
    println!("Levi-Civita connection: pass = {}, nabla_xi {:.3}", report.pass, report.worst.nabla_xi);
    Ok(())
}
