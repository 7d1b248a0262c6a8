//! Christoffel symbols and sectional curvature from a metric.

use co1as::connection::{levi_civita, sectional_curvature};
use co1as::geometry::{warped_metric, Chart, MetricField, WarpFunction};
use nalgebra::DVector;

fn main() -> co1as::Result<()> {
    let sphere = MetricField::round_sphere_stereographic(Chart::cube("S^2", 2, -2.0, 2.0)?);
    let u = DVector::from_vec(vec![1.0, 0.0]);
    let v = DVector::from_vec(vec![0.0, 1.0]);
    println!("unit sphere K = {:.12}", sectional_curvature(&sphere, &[0.4, -0.7], &u, &v)?);

    let fiber = MetricField::euclidean(Chart::cube("R^2", 2, -5.0, 5.0)?);
    let hyperbolic = warped_metric((-2.0, 2.0), &WarpFunction::exp(-1.0), &fiber)?;
    let p = [0.5, 1.0, 1.0];
    let gamma = levi_civita(&hyperbolic).gamma(&p)?;
    println!("Γ^t_xx = {:.9} (e^(-2t) = {:.9})", gamma[[0, 1, 1]], (-2.0 * p[0]).exp());
    println!("Γ^x_tx = {:.9}", gamma[[1, 0, 1]]);
    let a = DVector::from_vec(vec![0.3, 1.0, 0.0]);
    let b = DVector::from_vec(vec![0.0, 0.5, 2.0]);
    println!("hyperbolic K = {:.12}", sectional_curvature(&hyperbolic, &p, &a, &b)?);
    Ok(())
}
