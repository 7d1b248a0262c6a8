//! Coordinate charts, metric and vector fields, adapted frames, Lie brackets
//! and warped-product metrics.
//!
//! A field is a map from points of a single coordinate box to components in
//! the chart frame. Derivative callbacks are optional; when absent, central
//! differences with the field's [`FdSteps`] are used instead.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fd::{self, FdSteps};
use crate::tensor::Tensor;
use crate::{Error, Result};

pub type Eval<T> = Arc<dyn Fn(&[f64]) -> Result<T> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An axis-aligned coordinate box. Bounds are open and may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    name: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Chart {
    pub fn new(name: impl Into<String>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if lower.len() != upper.len() {
            return Err(Error::Config(format!(
                "chart {name}: {} lower bounds but {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        if lower.len() < 2 {
            return Err(Error::Config(format!("chart {name}: dimension must be at least 2")));
        }
        for (axis, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(Error::Config(format!(
                    "chart {name}: axis {axis} has lower {lo} not below upper {hi}"
                )));
            }
        }
        Ok(Self { name, lower, upper })
    }

    /// The same box extent on every axis.
    pub fn cube(name: impl Into<String>, dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(name, vec![lo; dim], vec![hi; dim])
    }

    /// `interval × other`, with the interval as coordinate 0.
    pub fn product(name: impl Into<String>, interval: (f64, f64), other: &Chart) -> Result<Self> {
        let mut lower = vec![interval.0];
        let mut upper = vec![interval.1];
        lower.extend_from_slice(&other.lower);
        upper.extend_from_slice(&other.upper);
        Self::new(name, lower, upper)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| x > lo && x < hi)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, chart {} has dimension {}",
                p.len(),
                self.name,
                self.dim()
            )));
        }
        if !self.contains(p) {
            return Err(Error::Domain(format!("point {p:?} lies outside chart {}", self.name)));
        }
        Ok(())
    }

    /// Checks that `p ± h e_m` stays inside the domain for every axis `m`.
    pub fn check_stencil(&self, p: &[f64], h: f64) -> Result<()> {
        self.check_point(p)?;
        for (m, x) in p.iter().enumerate() {
            if x - h <= self.lower[m] || x + h >= self.upper[m] {
                return Err(Error::Domain(format!(
                    "difference stencil of width {h:e} around {p:?} leaves chart {} on axis {m}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        self.check_point(&coords)?;
        Ok(Point(coords))
    }

    /// Uniform samples from the box shrunk by `margin` on every side.
    pub fn sample<R: Rng>(&self, rng: &mut R, count: usize, margin: f64) -> Result<Vec<Point>> {
        let mut ranges = Vec::with_capacity(self.dim());
        for (axis, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Domain(format!(
                    "cannot sample chart {} uniformly: axis {axis} is unbounded",
                    self.name
                )));
            }
            let (a, b) = (lo + margin, hi - margin);
            if !(a < b) {
                return Err(Error::Domain(format!(
                    "margin {margin} empties axis {axis} of chart {}",
                    self.name
                )));
            }
            ranges.push((a, b));
        }
        Ok((0..count)
            .map(|_| Point(ranges.iter().map(|&(a, b)| rng.gen_range(a..b)).collect()))
            .collect())
    }
}

/// Coordinates of a point of a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// A Riemannian metric `g_ij` on a chart.
#[derive(Clone)]
pub struct MetricField {
    chart: Chart,
    eval: Eval<DMatrix<f64>>,
    d_eval: Option<Eval<Tensor>>,
    dd_eval: Option<Eval<Tensor>>,
    fd: FdSteps,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("chart", &self.chart)
            .field("analytic_first", &self.d_eval.is_some())
            .field("analytic_second", &self.dd_eval.is_some())
            .finish()
    }
}

impl MetricField {
    pub fn new<F>(chart: Chart, eval: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            chart,
            eval: Arc::new(move |p| Ok(eval(p))),
            d_eval: None,
            dd_eval: None,
            fd: FdSteps::default(),
        }
    }

    /// Attaches `∂_k g_ij`, laid out `[k][i][j]`.
    pub fn with_partials<F>(mut self, d: F) -> Self
    where
        F: Fn(&[f64]) -> Tensor + Send + Sync + 'static,
    {
        self.d_eval = Some(Arc::new(move |p| Ok(d(p))));
        self
    }

    /// Attaches `∂_l ∂_k g_ij`, laid out `[l][k][i][j]`.
    pub fn with_second_partials<F>(mut self, dd: F) -> Self
    where
        F: Fn(&[f64]) -> Tensor + Send + Sync + 'static,
    {
        self.dd_eval = Some(Arc::new(move |p| Ok(dd(p))));
        self
    }

    pub fn with_fd(mut self, fd: FdSteps) -> Self {
        self.fd = fd;
        self
    }

    pub fn without_derivatives(&self) -> Self {
        Self {
            chart: self.chart.clone(),
            eval: self.eval.clone(),
            d_eval: None,
            dd_eval: None,
            fd: self.fd,
        }
    }

    pub fn euclidean(chart: Chart) -> Self {
        let n = chart.dim();
        Self::new(chart, move |_| DMatrix::identity(n, n))
            .with_partials(move |_| Tensor::zeros(n, 3))
            .with_second_partials(move |_| Tensor::zeros(n, 4))
    }

    /// Unit round sphere in stereographic coordinates: `g = 4 / (1 + |u|²)² δ`.
    pub fn round_sphere_stereographic(chart: Chart) -> Self {
        let n = chart.dim();
        let conformal = move |u: &[f64]| 1.0 + u.iter().map(|x| x * x).sum::<f64>();
        Self::new(chart, move |u| DMatrix::identity(n, n) * (4.0 / conformal(u).powi(2)))
            .with_partials(move |u| {
                let s = conformal(u);
                Tensor::from_fn(n, 3, |i| {
                    if i[1] == i[2] {
                        -16.0 * u[i[0]] / s.powi(3)
                    } else {
                        0.0
                    }
                })
            })
            .with_second_partials(move |u| {
                let s = conformal(u);
                Tensor::from_fn(n, 4, |i| {
                    if i[2] != i[3] {
                        return 0.0;
                    }
                    let (l, k) = (i[0], i[1]);
                    let delta = if l == k { 1.0 } else { 0.0 };
                    -16.0 * delta / s.powi(3) + 96.0 * u[k] * u[l] / s.powi(4)
                })
            })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn fd(&self) -> FdSteps {
        self.fd
    }

    pub fn has_partials(&self) -> bool {
        self.d_eval.is_some()
    }

    pub fn has_second_partials(&self) -> bool {
        self.dd_eval.is_some()
    }

    /// `g_ij(p)`, checked for symmetry and positive definiteness.
    pub fn at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.chart.check_point(p)?;
        let g = (self.eval)(p)?;
        let n = self.dim();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::Numeric(format!(
                "metric returned a {}x{} matrix on a chart of dimension {n}",
                g.nrows(),
                g.ncols()
            )));
        }
        let scale = g.amax().max(1.0);
        for i in 0..n {
            for j in i + 1..n {
                if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Numeric(format!("metric is not symmetric at {p:?}")));
                }
            }
        }
        if g.clone().cholesky().is_none() {
            let eig = g.clone().symmetric_eigen();
            return Err(Error::Numeric(format!(
                "metric is not positive definite at {p:?} (smallest eigenvalue {:e})",
                eig.eigenvalues.min()
            )));
        }
        Ok(g)
    }

    pub fn inverse(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.at(p)?;
        invert_spd(&g)
    }

    pub fn partials(&self, p: &[f64]) -> Result<Tensor> {
        match &self.d_eval {
            Some(d) => {
                self.chart.check_point(p)?;
                d(p)
            }
            None => fd::partials(&self.chart, p, self.fd.first, |q| {
                Ok(Tensor::from_matrix(&self.at(q)?))
            }),
        }
    }

    pub fn second_partials(&self, p: &[f64]) -> Result<Tensor> {
        match (&self.dd_eval, &self.d_eval) {
            (Some(dd), _) => {
                self.chart.check_point(p)?;
                dd(p)
            }
            (None, Some(d)) => fd::partials(&self.chart, p, self.fd.first, |q| d(q)),
            (None, None) => fd::partials(&self.chart, p, self.fd.nested, |q| self.partials(q)),
        }
    }

    pub fn inner(&self, p: &[f64], u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        Ok(u.dot(&(self.at(p)? * v)))
    }
}

/// Inverse of a symmetric positive definite matrix; failure reports a condition estimate.
pub fn invert_spd(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match g.clone().cholesky() {
        Some(c) => Ok(c.inverse()),
        None => {
            let eig = g.clone().symmetric_eigen();
            let (lo, hi) = (eig.eigenvalues.amin(), eig.eigenvalues.amax());
            Err(Error::Numeric(format!(
                "singular metric (condition estimate {:e})",
                if lo == 0.0 { f64::INFINITY } else { hi / lo }
            )))
        }
    }
}

/// A vector field with components in the chart frame.
#[derive(Clone)]
pub struct VectorField {
    chart: Chart,
    eval: Eval<DVector<f64>>,
    jac: Option<Eval<DMatrix<f64>>>,
    fd: FdSteps,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("chart", &self.chart)
            .field("analytic_jacobian", &self.jac.is_some())
            .finish()
    }
}

impl VectorField {
    pub fn new<F>(chart: Chart, eval: F) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            chart,
            eval: Arc::new(move |p| Ok(eval(p))),
            jac: None,
            fd: FdSteps::default(),
        }
    }

    pub(crate) fn from_eval(chart: Chart, eval: Eval<DVector<f64>>, jac: Option<Eval<DMatrix<f64>>>, fd: FdSteps) -> Self {
        Self { chart, eval, jac, fd }
    }

    /// Attaches the Jacobian `J[(k, j)] = ∂_j X^k`.
    pub fn with_jacobian<F>(mut self, jac: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.jac = Some(Arc::new(move |p| Ok(jac(p))));
        self
    }

    pub fn with_fd(mut self, fd: FdSteps) -> Self {
        self.fd = fd;
        self
    }

    /// The coordinate field `∂_k`.
    pub fn coordinate(chart: Chart, k: usize) -> Self {
        let n = chart.dim();
        assert!(k < n);
        Self::new(chart, move |_| {
            let mut v = DVector::zeros(n);
            v[k] = 1.0;
            v
        })
        .with_jacobian(move |_| DMatrix::zeros(n, n))
    }

    pub fn without_derivatives(&self) -> Self {
        Self {
            chart: self.chart.clone(),
            eval: self.eval.clone(),
            jac: None,
            fd: self.fd,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn has_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    pub fn at(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.chart.check_point(p)?;
        (self.eval)(p)
    }

    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        match &self.jac {
            Some(j) => {
                self.chart.check_point(p)?;
                j(p)
            }
            None => {
                let d = fd::partials(&self.chart, p, self.fd.first, |q| {
                    Ok(Tensor::from_vec(q.len(), 1, self.at(q)?.as_slice().to_vec()))
                })?;
                // d[m][k] = ∂_m X^k
                Ok(d.to_matrix().transpose())
            }
        }
    }
}

/// Orthonormal frame `e_0 = ξ, e_1, …, e_n` at a point, in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    vectors: Vec<DVector<f64>>,
}

impl AdaptedFrame {
    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// Frame vectors as columns.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.vectors)
    }

    /// Dual covectors as rows: `θ^a_k = g_km e_a^m`.
    pub fn coframe(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        (g * self.matrix()).transpose()
    }

    /// Largest entry of `Eᵀ g E − I`.
    pub fn orthonormality_defect(&self, g: &DMatrix<f64>) -> f64 {
        let e = self.matrix();
        let n = e.ncols();
        (e.transpose() * g * &e - DMatrix::identity(n, n)).amax()
    }
}

/// Gram–Schmidt of `(ξ, ∂_0, …, ∂_n)` against `g(p)`.
///
/// The first vector is `ξ(p)` unchanged. Chart axes whose residual after
/// projection has norm below `1e-10` are dropped.
pub fn adapted_frame(metric: &MetricField, xi: &VectorField, p: &[f64]) -> Result<AdaptedFrame> {
    const PIVOT_TOL: f64 = 1e-10;
    let g = metric.at(p)?;
    let x = xi.at(p)?;
    let n = g.nrows();
    let norm2 = x.dot(&(&g * &x));
    if (norm2 - 1.0).abs() >= 1e-8 {
        return Err(Error::Precondition(format!(
            "ξ is not a unit field at {p:?}: g(ξ,ξ) = {norm2}"
        )));
    }
    let mut vectors = vec![x];
    for k in 0..n {
        if vectors.len() == n {
            break;
        }
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for e in &vectors {
                let c = e.dot(&(&g * &v));
                v -= e * c;
            }
        }
        let len2 = v.dot(&(&g * &v));
        if !(len2 > PIVOT_TOL * PIVOT_TOL) {
            continue;
        }
        vectors.push(v / len2.sqrt());
    }
    if vectors.len() != n {
        return Err(Error::Numeric(format!(
            "could not complete an adapted frame at {p:?}"
        )));
    }
    Ok(AdaptedFrame { vectors })
}

/// `[X,Y]^k = X^j ∂_j Y^k − Y^j ∂_j X^k`.
pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
    let (xv, yv) = (x.at(p)?, y.at(p)?);
    let (jx, jy) = (x.jacobian(p)?, y.jacobian(p)?);
    Ok(jy * xv - jx * yv)
}

/// Largest component of the Lie derivative `L_X g` at `p`.
pub fn killing_residual(metric: &MetricField, x: &VectorField, p: &[f64]) -> Result<f64> {
    let g = metric.at(p)?;
    let dg = metric.partials(p)?;
    let xv = x.at(p)?;
    let jx = x.jacobian(p)?;
    let n = g.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for k in 0..n {
                v += xv[k] * dg[[k, i, j]] + g[(k, j)] * jx[(k, i)] + g[(i, k)] * jx[(k, j)];
            }
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// A positive warping function `f(t)` with its first two derivatives.
#[derive(Clone)]
pub struct WarpFunction {
    pub f: ScalarFn,
    pub df: ScalarFn,
    pub ddf: ScalarFn,
}

impl fmt::Debug for WarpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("WarpFunction")
    }
}

impl WarpFunction {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ddf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Arc::new(df),
            ddf: Arc::new(ddf),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0, |_| 0.0)
    }

    /// `f(t) = e^{k t}`.
    pub fn exp(k: f64) -> Self {
        Self::new(
            move |t| (k * t).exp(),
            move |t| k * (k * t).exp(),
            move |t| k * k * (k * t).exp(),
        )
    }

    /// `f(t) = a + b t`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(move |t| a + b * t, move |_| b, |_| 0.0)
    }

    pub fn cosh() -> Self {
        Self::new(f64::cosh, f64::sinh, f64::cosh)
    }

    /// `f′(t) / f(t)`.
    pub fn log_derivative(&self, t: f64) -> f64 {
        (self.df)(t) / (self.f)(t)
    }
}

/// `g = dt² + f(t)² g_fiber` on `interval × fiber chart`, with `t` as coordinate 0.
///
/// Derivative callbacks are assembled by the chain rule whenever the fiber
/// metric has them.
pub fn warped_metric(interval: (f64, f64), warp: &WarpFunction, fiber: &MetricField) -> Result<MetricField> {
    let chart = Chart::product(format!("R x_f {}", fiber.chart().name()), interval, fiber.chart())?;
    check_warp_positive(interval, warp)?;
    let n = chart.dim();
    let fib = fiber.clone();
    let w = warp.clone();
    let mut metric = MetricField {
        chart,
        eval: Arc::new(move |p| {
            let h = fib.at(&p[1..])?;
            let f = (w.f)(p[0]);
            let mut g = DMatrix::zeros(n, n);
            g[(0, 0)] = 1.0;
            g.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(h * (f * f)));
            Ok(g)
        }),
        d_eval: None,
        dd_eval: None,
        fd: fiber.fd(),
    };
    if fiber.has_partials() {
        let fib = fiber.clone();
        let w = warp.clone();
        metric.d_eval = Some(Arc::new(move |p| {
            let y = &p[1..];
            let h = fib.at(y)?;
            let dh = fib.partials(y)?;
            let (f, df) = ((w.f)(p[0]), (w.df)(p[0]));
            let mut d = Tensor::zeros(n, 3);
            for i in 1..n {
                for j in 1..n {
                    d[[0, i, j]] = 2.0 * f * df * h[(i - 1, j - 1)];
                    for k in 1..n {
                        d[[k, i, j]] = f * f * dh[[k - 1, i - 1, j - 1]];
                    }
                }
            }
            Ok(d)
        }));
    }
    if fiber.has_partials() && fiber.has_second_partials() {
        let fib = fiber.clone();
        let w = warp.clone();
        metric.dd_eval = Some(Arc::new(move |p| {
            let y = &p[1..];
            let h = fib.at(y)?;
            let dh = fib.partials(y)?;
            let ddh = fib.second_partials(y)?;
            let t = p[0];
            let (f, df, ddf) = ((w.f)(t), (w.df)(t), (w.ddf)(t));
            let mut dd = Tensor::zeros(n, 4);
            for i in 1..n {
                for j in 1..n {
                    dd[[0, 0, i, j]] = 2.0 * (df * df + f * ddf) * h[(i - 1, j - 1)];
                    for k in 1..n {
                        let mixed = 2.0 * f * df * dh[[k - 1, i - 1, j - 1]];
                        dd[[0, k, i, j]] = mixed;
                        dd[[k, 0, i, j]] = mixed;
                        for l in 1..n {
                            dd[[l, k, i, j]] = f * f * ddh[[l - 1, k - 1, i - 1, j - 1]];
                        }
                    }
                }
            }
            Ok(dd)
        }));
    }
    Ok(metric)
}

fn check_warp_positive(interval: (f64, f64), warp: &WarpFunction) -> Result<()> {
    const SAMPLES: usize = 257;
    let lo = if interval.0.is_finite() { interval.0 } else { -50.0 };
    let hi = if interval.1.is_finite() { interval.1 } else { 50.0 };
    for s in 0..SAMPLES {
        // interior samples only: the interval is open
        let t = lo + (hi - lo) * (s as f64 + 0.5) / SAMPLES as f64;
        let f = (warp.f)(t);
        if !(f > 0.0) {
            return Err(Error::Domain(format!("warping function is not positive at t = {t}: f = {f}")));
        }
    }
    Ok(())
}
