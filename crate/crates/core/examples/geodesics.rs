//! Geodesics of the upper half-space model written as dt² + e^{-2t} |dx|².

use co1as::connection::{integrate_geodesic, levi_civita};
use co1as::geometry::{warped_metric, Chart, MetricField, WarpFunction};
use nalgebra::DVector;

fn main() -> co1as::Result<()> {
    let fiber = MetricField::euclidean(Chart::cube("R^2", 2, -10.0, 10.0)?);
    let metric = warped_metric((-3.0, 3.0), &WarpFunction::exp(-1.0), &fiber)?;
    let lc = levi_civita(&metric);
    let curve = integrate_geodesic(&lc, &[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], (0.0, 4.0), 0.01)?;
    for s in curve.samples.iter().step_by(50) {
        let v = DVector::from_column_slice(&s.v);
        let speed = metric.inner(&s.x, &v, &v)?.sqrt();
        println!("s = {:.2}  t = {:+.6}  x = {:+.6}  speed {:.10}", s.t, s.x[0], s.x[1], speed);
    }
    println!("left the chart: {}", curve.truncated);
    Ok(())
}
