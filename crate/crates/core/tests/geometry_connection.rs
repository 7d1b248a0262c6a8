use co1as::connection::*;
use co1as::geometry::*;
use co1as::registry::{build_example, ExampleName, ExampleParams};
use co1as::FdSteps;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &co1as::Tensor, b: &co1as::Tensor) -> f64 {
    (a - b).max_abs()
}

fn hyperbolic() -> MetricField {
    let fiber = MetricField::euclidean(Chart::cube("R^3", 3, -5.0, 5.0).unwrap());
    warped_metric((-2.0, 2.0), &WarpFunction::exp(-1.0), &fiber).unwrap()
}

fn spherical_shell() -> MetricField {
    let fiber = MetricField::round_sphere_stereographic(Chart::cube("S^2", 2, -1.0, 1.0).unwrap());
    warped_metric((0.5, 5.0), &WarpFunction::linear(0.0, 1.0), &fiber).unwrap()
}

#[test]
fn analytic_metric_partials_match_differences() {
    for metric in [hyperbolic(), spherical_shell()] {
        let stripped = metric.without_derivatives();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in metric.chart().sample(&mut rng, 10, 0.1).unwrap() {
            let d = metric.partials(&p).unwrap();
            // central differences are accurate relative to the size of the field
            let scale = metric.at(&p).unwrap().amax();
            let e = max_diff(&d, &stripped.partials(&p).unwrap());
            assert!(e < 1e-9 * scale, "{e} at {p:?}");
            let dd = metric.second_partials(&p).unwrap();
            assert!(max_diff(&dd, &stripped.second_partials(&p).unwrap()) < 1e-6 * scale);
        }
    }
}

#[test]
fn analytic_christoffel_partials_match_differences() {
    let metric = spherical_shell();
    let exact = levi_civita(&metric);
    let approx = levi_civita(&metric).without_derivatives();
    for p in [[1.0, 0.2, -0.3], [3.0, -0.5, 0.6]] {
        assert!(max_diff(&exact.partials(&p).unwrap(), &approx.partials(&p).unwrap()) < 1e-8);
    }
}

#[test]
fn hyperbolic_sectional_curvature_is_minus_one() {
    let metric = hyperbolic();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for p in metric.chart().sample(&mut rng, 10, 0.1).unwrap() {
        let u = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let v = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let k = sectional_curvature(&metric, &p, &u, &v).unwrap();
        assert!((k + 1.0).abs() < 1e-6, "K = {k}");
    }
}

#[test]
fn round_sphere_sectional_curvature_is_one() {
    let metric = MetricField::round_sphere_stereographic(Chart::cube("S^3", 3, -1.0, 1.0).unwrap());
    let u = DVector::from_vec(vec![1.0, 0.2, 0.0]);
    let v = DVector::from_vec(vec![0.0, 1.0, -0.4]);
    let k = sectional_curvature(&metric, &[0.3, -0.2, 0.5], &u, &v).unwrap();
    assert!((k - 1.0).abs() < 1e-8);
}

#[test]
fn shell_is_flat() {
    // dr² + r² g_{S²} is Euclidean space in polar form
    let metric = spherical_shell();
    let u = DVector::from_vec(vec![0.3, 1.0, 0.0]);
    let v = DVector::from_vec(vec![1.0, 0.0, 0.7]);
    assert!(sectional_curvature(&metric, &[2.0, 0.1, 0.4], &u, &v).unwrap().abs() < 1e-8);
}

#[test]
fn normal_lines_are_geodesics() {
    let metric = hyperbolic();
    let lc = levi_civita(&metric);
    let curve = integrate_geodesic(&lc, &[-1.0, 0.5, 0.5, 0.5], &[1.0, 0.0, 0.0, 0.0], (0.0, 2.0), 0.01).unwrap();
    assert!(!curve.truncated);
    for s in &curve.samples {
        assert!((s.x[0] - (-1.0 + s.t)).abs() < 1e-12);
        assert!(s.x[1..].iter().all(|x| (x - 0.5).abs() < 1e-14));
    }
}

#[test]
fn geodesics_keep_their_speed() {
    let metric = hyperbolic();
    let lc = levi_civita(&metric);
    let p = [0.0, 0.0, 0.0, 0.0];
    let v = [0.3, 0.8, -0.2, 0.1];
    let curve = integrate_geodesic(&lc, &p, &v, (0.0, 1.5), 0.005).unwrap();
    let speed = |x: &[f64], u: &[f64]| {
        let u = DVector::from_column_slice(u);
        metric.inner(x, &u, &u).unwrap()
    };
    let s0 = speed(&p, &v);
    for s in &curve.samples {
        assert!((speed(&s.x, &s.v) - s0).abs() < 1e-8);
    }
}

#[test]
fn geodesic_leaving_the_chart_is_truncated() {
    let lc = ConnectionField::flat(Chart::cube("box", 2, -1.0, 1.0).unwrap());
    let curve = integrate_geodesic(&lc, &[0.0, 0.0], &[1.0, 0.0], (0.0, 5.0), 0.1).unwrap();
    assert!(curve.truncated);
    assert!(curve.samples.last().unwrap().x[0] < 1.0);
}

#[test]
fn radial_flow_of_the_sphere_example_is_geodesic() {
    let ex = build_example(ExampleName::ConcentricSpheres, 2, &ExampleParams::default()).unwrap();
    let k = ex.killing.as_ref().unwrap();
    let lc = ex.setup.levi_civita();
    let curve = integrate_geodesic(lc, k.base_point(), &[1.0, 0.0, 0.0], (0.0, 2.0), 0.01).unwrap();
    for s in &curve.samples {
        let expected = k.geodesic(s.t);
        assert!(s.x.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-10));
    }
}

#[test]
fn covariant_derivative_of_metric_vanishes() {
    let metric = spherical_shell();
    let lc = levi_civita(&metric);
    let nabla_g = covariant_derivative_at(&lc, &TensorField::from_metric(&metric), &[1.7, 0.2, 0.3]).unwrap();
    assert!(nabla_g.max_abs() < 1e-12);
}

#[test]
fn levi_civita_curvature_has_the_expected_symmetries() {
    let metric = hyperbolic();
    let lc = levi_civita(&metric);
    let r = curvature_at(&lc, &[0.4, 0.1, 0.2, 0.3]).unwrap();
    let first_bianchi = r.permute(&[0, 1, 2, 3]).data().iter().zip(r.permute(&[0, 2, 3, 1]).data()).zip(r.permute(&[0, 3, 1, 2]).data())
        .map(|((a, b), c)| (a + b + c).abs())
        .fold(0.0, f64::max);
    assert!(first_bianchi < 1e-12);
    assert!((&r + &r.permute(&[0, 1, 3, 2])).max_abs() < 1e-12);
}

#[test]
fn difference_steps_are_configurable() {
    let fd = FdSteps { first: 1e-4, nested: 1e-3 };
    let metric = hyperbolic().without_derivatives().with_fd(fd);
    assert_eq!(metric.fd(), fd);
    let chart = metric.chart().clone();
    assert!(metric.partials(&[chart.upper()[0] - 5e-5, 0.0, 0.0, 0.0]).is_err());
}
