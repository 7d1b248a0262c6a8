//! Affine connections on a chart: Levi-Civita, torsion, curvature, covariant
//! derivatives of tensor fields and geodesics.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `Γ^k_ij` is stored `[k][i][j]` with `∇_{∂_i} ∂_j = Γ^k_ij ∂_k`.
//! * Torsion `T^k_ij = Γ^k_ij − Γ^k_ji`, i.e. `T(X,Y) = ∇_X Y − ∇_Y X − [X,Y]`.
//! * Curvature `R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z`, stored
//!   `[l][k][i][j]` with `R(∂_i, ∂_j) ∂_k = R^l_kij ∂_l`.
//! * Covariant derivatives put the derivative index first:
//!   `(∇T)[m][a..][b..] = (∇_{∂_m} T)^{a..}_{b..}`.
//! * A structure `S` is the difference `∇ − ∇̃` and is stored like `Γ`,
//!   `S_{∂_i} ∂_j = S^k_ij ∂_k`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::fd::{self, FdSteps};
use crate::geometry::{Chart, Eval, MetricField, VectorField};
use crate::tensor::{Tensor, Variance};
use crate::{Error, Result};

/// Connection coefficients `Γ^k_ij` on a chart.
#[derive(Clone)]
pub struct ConnectionField {
    chart: Chart,
    gamma: Eval<Tensor>,
    d_gamma: Option<Eval<Tensor>>,
    // true when `gamma` involves no difference quotients
    exact: bool,
    fd: FdSteps,
}

impl fmt::Debug for ConnectionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConnectionField")
            .field("chart", &self.chart)
            .field("exact", &self.exact)
            .field("analytic_partials", &self.d_gamma.is_some())
            .finish()
    }
}

impl ConnectionField {
    pub fn new<F>(chart: Chart, gamma: F) -> Self
    where
        F: Fn(&[f64]) -> Tensor + Send + Sync + 'static,
    {
        Self {
            chart,
            gamma: Arc::new(move |p| Ok(gamma(p))),
            d_gamma: None,
            exact: true,
            fd: FdSteps::default(),
        }
    }

    /// Attaches `∂_l Γ^k_ij`, laid out `[l][k][i][j]`.
    pub fn with_partials<F>(mut self, d: F) -> Self
    where
        F: Fn(&[f64]) -> Tensor + Send + Sync + 'static,
    {
        self.d_gamma = Some(Arc::new(move |p| Ok(d(p))));
        self
    }

    pub fn with_fd(mut self, fd: FdSteps) -> Self {
        self.fd = fd;
        self
    }

    /// The connection whose coefficients vanish in this chart.
    pub fn flat(chart: Chart) -> Self {
        let n = chart.dim();
        Self::new(chart, move |_| Tensor::zeros(n, 3)).with_partials(move |_| Tensor::zeros(n, 4))
    }

    pub fn without_derivatives(&self) -> Self {
        Self {
            d_gamma: None,
            ..self.clone()
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn has_partials(&self) -> bool {
        self.d_gamma.is_some()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn fd(&self) -> FdSteps {
        self.fd
    }

    pub fn gamma(&self, p: &[f64]) -> Result<Tensor> {
        self.chart.check_point(p)?;
        (self.gamma)(p)
    }

    pub fn partials(&self, p: &[f64]) -> Result<Tensor> {
        match &self.d_gamma {
            Some(d) => {
                self.chart.check_point(p)?;
                d(p)
            }
            None => fd::partials(&self.chart, p, self.fd.for_field(self.exact), |q| self.gamma(q)),
        }
    }

    /// `∇_u v` for a vector field `v` given by its value and Jacobian at the point.
    pub fn derivative_along(
        &self,
        p: &[f64],
        u: &DVector<f64>,
        v: &DVector<f64>,
        jac_v: &DMatrix<f64>,
    ) -> Result<DVector<f64>> {
        let gamma = self.gamma(p)?;
        let n = self.dim();
        let mut out = jac_v * u;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k] += gamma[[k, i, j]] * u[i] * v[j];
                }
            }
        }
        Ok(out)
    }
}

/// A tensor field of type `(up, down)`, components laid out with the
/// contravariant indices first.
#[derive(Clone)]
pub struct TensorField {
    chart: Chart,
    up: usize,
    down: usize,
    eval: Eval<Tensor>,
    d_eval: Option<Eval<Tensor>>,
    exact: bool,
    fd: FdSteps,
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorField")
            .field("type", &(self.up, self.down))
            .field("exact", &self.exact)
            .field("analytic_partials", &self.d_eval.is_some())
            .finish()
    }
}

impl TensorField {
    pub fn new<F>(chart: Chart, up: usize, down: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Tensor + Send + Sync + 'static,
    {
        Self {
            chart,
            up,
            down,
            eval: Arc::new(move |p| Ok(eval(p))),
            d_eval: None,
            exact: true,
            fd: FdSteps::default(),
        }
    }

    pub(crate) fn from_eval(
        chart: Chart,
        up: usize,
        down: usize,
        eval: Eval<Tensor>,
        d_eval: Option<Eval<Tensor>>,
        exact: bool,
        fd: FdSteps,
    ) -> Self {
        Self {
            chart,
            up,
            down,
            eval,
            d_eval,
            exact,
            fd,
        }
    }

    /// Attaches partial derivatives, derivative index first.
    pub fn with_partials<F>(mut self, d: F) -> Self
    where
        F: Fn(&[f64]) -> Tensor + Send + Sync + 'static,
    {
        self.d_eval = Some(Arc::new(move |p| Ok(d(p))));
        self
    }

    pub fn without_derivatives(&self) -> Self {
        Self {
            d_eval: None,
            ..self.clone()
        }
    }

    pub fn with_fd(mut self, fd: FdSteps) -> Self {
        self.fd = fd;
        self
    }

    /// The metric as a `(0,2)` field.
    pub fn from_metric(metric: &MetricField) -> Self {
        let m = metric.clone();
        let eval: Eval<Tensor> = Arc::new(move |p| Ok(Tensor::from_matrix(&m.at(p)?)));
        let d_eval: Option<Eval<Tensor>> = metric.has_partials().then(|| {
            let m = metric.clone();
            Arc::new(move |p: &[f64]| m.partials(p)) as Eval<Tensor>
        });
        Self::from_eval(metric.chart().clone(), 0, 2, eval, d_eval, true, metric.fd())
    }

    /// A vector field as a `(1,0)` field.
    pub fn from_vector(field: &VectorField) -> Self {
        let v = field.clone();
        let eval: Eval<Tensor> = Arc::new(move |p| {
            let x = v.at(p)?;
            Ok(Tensor::from_vec(x.len(), 1, x.as_slice().to_vec()))
        });
        let v = field.clone();
        // the Jacobian is always available (analytic or differenced), so route through it
        let d_eval: Eval<Tensor> = Arc::new(move |p| Ok(Tensor::from_matrix(&v.jacobian(p)?.transpose())));
        Self::from_eval(field.chart().clone(), 1, 0, eval, Some(d_eval), true, FdSteps::default())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn up(&self) -> usize {
        self.up
    }

    pub fn down(&self) -> usize {
        self.down
    }

    pub fn rank(&self) -> usize {
        self.up + self.down
    }

    pub fn variance(&self) -> Vec<Variance> {
        let mut v = vec![Variance::Up; self.up];
        v.extend(std::iter::repeat_n(Variance::Down, self.down));
        v
    }

    pub fn has_partials(&self) -> bool {
        self.d_eval.is_some()
    }

    pub fn at(&self, p: &[f64]) -> Result<Tensor> {
        self.chart.check_point(p)?;
        let t = (self.eval)(p)?;
        if t.rank() != self.rank() || t.dim() != self.chart.dim() {
            return Err(Error::Numeric(format!(
                "tensor field of type ({}, {}) returned rank {} with extent {}",
                self.up,
                self.down,
                t.rank(),
                t.dim()
            )));
        }
        Ok(t)
    }

    pub fn partials(&self, p: &[f64]) -> Result<Tensor> {
        match &self.d_eval {
            Some(d) => {
                self.chart.check_point(p)?;
                d(p)
            }
            None => fd::partials(&self.chart, p, self.fd.for_field(self.exact), |q| self.at(q)),
        }
    }
}

/// Levi-Civita connection `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
///
/// Metric derivatives come from the callbacks when present, otherwise from
/// central differences. `∂Γ` is assembled analytically when both derivative
/// callbacks exist.
pub fn levi_civita(metric: &MetricField) -> ConnectionField {
    let m = metric.clone();
    let gamma: Eval<Tensor> = Arc::new(move |p| {
        let ginv = m.inverse(p)?;
        let dg = m.partials(p)?;
        Ok(christoffel(&ginv, &dg))
    });
    let d_gamma: Option<Eval<Tensor>> = (metric.has_partials() && metric.has_second_partials()).then(|| {
        let m = metric.clone();
        Arc::new(move |p: &[f64]| {
            let ginv = m.inverse(p)?;
            let dg = m.partials(p)?;
            let ddg = m.second_partials(p)?;
            Ok(christoffel_partials(&ginv, &dg, &ddg))
        }) as Eval<Tensor>
    });
    ConnectionField {
        chart: metric.chart().clone(),
        gamma,
        d_gamma,
        exact: metric.has_partials(),
        fd: metric.fd(),
    }
}

fn christoffel(ginv: &DMatrix<f64>, dg: &Tensor) -> Tensor {
    let n = ginv.nrows();
    // first kind: c[l][i][j] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let c = Tensor::from_fn(n, 3, |x| {
        let (l, i, j) = (x[0], x[1], x[2]);
        0.5 * (dg[[i, j, l]] + dg[[j, i, l]] - dg[[l, i, j]])
    });
    c.transform_slot(0, ginv)
}

fn christoffel_partials(ginv: &DMatrix<f64>, dg: &Tensor, ddg: &Tensor) -> Tensor {
    let n = ginv.nrows();
    let c = Tensor::from_fn(n, 3, |x| {
        let (l, i, j) = (x[0], x[1], x[2]);
        0.5 * (dg[[i, j, l]] + dg[[j, i, l]] - dg[[l, i, j]])
    });
    let mut out = Tensor::zeros(n, 4);
    for m in 0..n {
        // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
        let dgm = DMatrix::from_fn(n, n, |a, b| dg[[m, a, b]]);
        let dginv = -(ginv * dgm * ginv);
        let dc = Tensor::from_fn(n, 3, |x| {
            let (l, i, j) = (x[0], x[1], x[2]);
            0.5 * (ddg[[m, i, j, l]] + ddg[[m, j, i, l]] - ddg[[m, l, i, j]])
        });
        let block = &c.transform_slot(0, &dginv) + &dc.transform_slot(0, ginv);
        let len = block.data().len();
        out.data_mut()[m * len..(m + 1) * len].copy_from_slice(block.data());
    }
    out
}

/// `T^k_ij = Γ^k_ij − Γ^k_ji`.
pub fn torsion_at(conn: &ConnectionField, p: &[f64]) -> Result<Tensor> {
    let g = conn.gamma(p)?;
    Ok(&g - &g.permute(&[0, 2, 1]))
}

/// Torsion as a `(1,2)` field; its partials are analytic whenever `∂Γ` is.
pub fn torsion_field(conn: &ConnectionField) -> TensorField {
    let c = conn.clone();
    let eval: Eval<Tensor> = Arc::new(move |p| torsion_at(&c, p));
    let d_eval: Option<Eval<Tensor>> = conn.has_partials().then(|| {
        let c = conn.clone();
        Arc::new(move |p: &[f64]| {
            let d = c.partials(p)?;
            Ok(&d - &d.permute(&[0, 1, 3, 2]))
        }) as Eval<Tensor>
    });
    TensorField::from_eval(conn.chart().clone(), 1, 2, eval, d_eval, conn.exact, conn.fd)
}

/// `R^l_kij = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`.
pub fn curvature_at(conn: &ConnectionField, p: &[f64]) -> Result<Tensor> {
    let g = conn.gamma(p)?;
    let dg = conn.partials(p)?;
    let n = conn.dim();
    Ok(Tensor::from_fn(n, 4, |x| {
        let (l, k, i, j) = (x[0], x[1], x[2], x[3]);
        let mut v = dg[[i, l, j, k]] - dg[[j, l, i, k]];
        for m in 0..n {
            v += g[[l, i, m]] * g[[m, j, k]] - g[[l, j, m]] * g[[m, i, k]];
        }
        v
    }))
}

/// Curvature as a `(1,3)` field. It is exact only when `∂Γ` is analytic.
pub fn curvature_field(conn: &ConnectionField) -> TensorField {
    let c = conn.clone();
    let eval: Eval<Tensor> = Arc::new(move |p| curvature_at(&c, p));
    TensorField::from_eval(
        conn.chart().clone(),
        1,
        3,
        eval,
        None,
        conn.has_partials() && conn.exact,
        conn.fd,
    )
}

/// `∇T` at `p`, with the derivative index first:
/// `∂_m T + Σ_up Γ^a_{mc} T^{..c..} − Σ_down Γ^c_{mb} T_{..c..}`.
pub fn covariant_derivative_at(conn: &ConnectionField, field: &TensorField, p: &[f64]) -> Result<Tensor> {
    let n = conn.dim();
    if field.chart().dim() != n {
        return Err(Error::Config(format!(
            "field on a {}-dimensional chart, connection on {n}",
            field.chart().dim()
        )));
    }
    let gamma = conn.gamma(p)?;
    let t = field.at(p)?;
    let mut out = field.partials(p)?;
    let variance = field.variance();
    let block_len = t.data().len();
    for m in 0..n {
        let up = DMatrix::from_fn(n, n, |a, c| gamma[[a, m, c]]);
        let down = DMatrix::from_fn(n, n, |b, c| -gamma[[c, m, b]]);
        let mut correction = Tensor::zeros(n, t.rank());
        for (slot, v) in variance.iter().enumerate() {
            let term = match v {
                Variance::Up => t.transform_slot(slot, &up),
                Variance::Down => t.transform_slot(slot, &down),
            };
            correction = &correction + &term;
        }
        let dst = &mut out.data_mut()[m * block_len..(m + 1) * block_len];
        for (d, c) in dst.iter_mut().zip(correction.data()) {
            *d += c;
        }
    }
    Ok(out)
}

/// `Γ̃ = Γ − S`.
pub fn apply_structure(conn: &ConnectionField, structure: &TensorField) -> Result<ConnectionField> {
    if (structure.up(), structure.down()) != (1, 2) {
        return Err(Error::Config(format!(
            "a structure must be a (1,2) field, got ({}, {})",
            structure.up(),
            structure.down()
        )));
    }
    let (c, s) = (conn.clone(), structure.clone());
    let gamma: Eval<Tensor> = Arc::new(move |p| Ok(&c.gamma(p)? - &s.at(p)?));
    let d_gamma: Option<Eval<Tensor>> = (conn.has_partials() && structure.has_partials()).then(|| {
        let (c, s) = (conn.clone(), structure.clone());
        Arc::new(move |p: &[f64]| Ok(&c.partials(p)? - &s.partials(p)?)) as Eval<Tensor>
    });
    Ok(ConnectionField {
        chart: conn.chart.clone(),
        gamma,
        d_gamma,
        exact: conn.exact && structure.exact,
        fd: conn.fd,
    })
}

/// Sectional curvature `g(R(u,v)v, u) / (|u|²|v|² − g(u,v)²)` of the Levi-Civita connection.
pub fn sectional_curvature(metric: &MetricField, p: &[f64], u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let g = metric.at(p)?;
    let area = u.dot(&(&g * u)) * v.dot(&(&g * v)) - u.dot(&(&g * v)).powi(2);
    if !(area > 1e-14) {
        return Err(Error::Precondition("sectional curvature needs two independent vectors".into()));
    }
    let r = curvature_at(&levi_civita(metric), p)?;
    let n = metric.dim();
    let mut rv = DVector::zeros(n);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    rv[l] += r[[l, k, i, j]] * v[k] * u[i] * v[j];
                }
            }
        }
    }
    Ok(rv.dot(&(&g * u)) / area)
}

/// The `(1,2)` difference tensor `a − b` of two connections.
pub fn difference(a: &ConnectionField, b: &ConnectionField) -> TensorField {
    let (x, y) = (a.clone(), b.clone());
    let eval: Eval<Tensor> = Arc::new(move |p| Ok(&x.gamma(p)? - &y.gamma(p)?));
    let d_eval: Option<Eval<Tensor>> = (a.has_partials() && b.has_partials()).then(|| {
        let (x, y) = (a.clone(), b.clone());
        Arc::new(move |p: &[f64]| Ok(&x.partials(p)? - &y.partials(p)?)) as Eval<Tensor>
    });
    TensorField::from_eval(a.chart.clone(), 1, 2, eval, d_eval, a.exact && b.exact, a.fd)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub samples: Vec<GeodesicSample>,
    /// The curve left the chart before the end of the requested interval.
    pub truncated: bool,
}

/// Fixed-step RK4 on `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0`.
///
/// The interval is split into equal steps no longer than `step`. A curve
/// that leaves the chart after the first step is returned truncated.
pub fn integrate_geodesic(
    conn: &ConnectionField,
    p: &[f64],
    v: &[f64],
    t_span: (f64, f64),
    step: f64,
) -> Result<Geodesic> {
    if !(step > 0.0) {
        return Err(Error::Precondition(format!("geodesic step must be positive, got {step}")));
    }
    let n = conn.dim();
    if v.len() != n {
        return Err(Error::Precondition(format!("velocity has {} components, expected {n}", v.len())));
    }
    conn.chart().check_point(p)?;
    let (t0, t1) = t_span;
    let steps = ((t1 - t0).abs() / step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;

    let rhs = |x: &[f64], u: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        let gamma = conn.gamma(x)?;
        let mut acc = vec![0.0; n];
        for (k, a) in acc.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    *a -= gamma[[k, i, j]] * u[i] * u[j];
                }
            }
        }
        Ok((u.to_vec(), acc))
    };
    let axpy = |base: &[f64], d: &[f64], c: f64| -> Vec<f64> { base.iter().zip(d).map(|(b, x)| b + c * x).collect() };

    let mut samples = vec![GeodesicSample {
        t: t0,
        x: p.to_vec(),
        v: v.to_vec(),
    }];
    let mut truncated = false;
    for s in 0..steps {
        let cur = samples.last().expect("nonempty");
        let (x, u) = (&cur.x, &cur.v);
        let stage = || -> Result<(Vec<f64>, Vec<f64>)> {
            let (k1x, k1v) = rhs(x, u)?;
            let (k2x, k2v) = rhs(&axpy(x, &k1x, h / 2.0), &axpy(u, &k1v, h / 2.0))?;
            let (k3x, k3v) = rhs(&axpy(x, &k2x, h / 2.0), &axpy(u, &k2v, h / 2.0))?;
            let (k4x, k4v) = rhs(&axpy(x, &k3x, h), &axpy(u, &k3v, h))?;
            let nx = (0..n)
                .map(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]))
                .collect::<Vec<_>>();
            let nv = (0..n)
                .map(|i| u[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]))
                .collect::<Vec<_>>();
            conn.chart().check_point(&nx)?;
            Ok((nx, nv))
        };
        match stage() {
            Ok((nx, nv)) => samples.push(GeodesicSample {
                t: t0 + (s + 1) as f64 * h,
                x: nx,
                v: nv,
            }),
            Err(Error::Domain(msg)) => {
                if s == 0 {
                    return Err(Error::Domain(format!("geodesic leaves the chart immediately: {msg}")));
                }
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Geodesic { samples, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polar() -> MetricField {
        let chart = Chart::new("polar", vec![0.1, -3.0], vec![10.0, 3.0]).unwrap();
        MetricField::new(chart, |p| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, p[0] * p[0]]))
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let g = MetricField::euclidean(Chart::cube("R3", 3, -1.0, 1.0).unwrap());
        let lc = levi_civita(&g);
        assert_eq!(lc.gamma(&[0.1, 0.2, 0.3]).unwrap().max_abs(), 0.0);
        assert_eq!(curvature_at(&lc, &[0.1, 0.2, 0.3]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn polar_christoffels_by_hand() {
        // Γ^r_θθ = −r, Γ^θ_rθ = Γ^θ_θr = 1/r
        let lc = levi_civita(&polar());
        let g = lc.gamma(&[2.0, 0.5]).unwrap();
        assert!((g[[0, 1, 1]] + 2.0).abs() < 1e-8);
        assert!((g[[1, 0, 1]] - 0.5).abs() < 1e-8);
        assert!((g[[1, 1, 0]] - 0.5).abs() < 1e-8);
        assert!(g[[0, 0, 0]].abs() < 1e-8 && g[[1, 1, 1]].abs() < 1e-8);
    }

    #[test]
    fn levi_civita_is_torsion_free_exactly() {
        let lc = levi_civita(&polar());
        assert_eq!(torsion_at(&lc, &[1.3, 0.2]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn torsion_is_antisymmetric() {
        let chart = Chart::cube("R2", 2, -1.0, 1.0).unwrap();
        let conn = ConnectionField::new(chart, |p| Tensor::from_fn(2, 3, |i| (i[0] + 2 * i[1] + 3 * i[2]) as f64 * p[0]));
        let t = torsion_at(&conn, &[0.5, 0.1]).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(t[[k, i, j]], -t[[k, j, i]]);
                }
            }
        }
    }

    #[test]
    fn constant_field_is_parallel_for_flat_connection() {
        let chart = Chart::cube("R3", 3, -1.0, 1.0).unwrap();
        let conn = ConnectionField::flat(chart.clone());
        let v = VectorField::new(chart, |_| DVector::from_vec(vec![1.0, -2.0, 0.5]));
        let d = covariant_derivative_at(&conn, &TensorField::from_vector(&v), &[0.0, 0.1, 0.2]).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn structure_round_trip() {
        let lc = levi_civita(&polar());
        let chart = lc.chart().clone();
        let s = TensorField::new(chart, 1, 2, |p| Tensor::from_fn(2, 3, |i| (i[0] as f64 - i[1] as f64 + 0.5 * i[2] as f64) * p[1]));
        let tilde = apply_structure(&lc, &s).unwrap();
        let back = difference(&lc, &tilde);
        let p = [1.7, -0.4];
        assert!((&back.at(&p).unwrap() - &s.at(&p).unwrap()).max_abs() < 1e-14);
    }

    #[test]
    fn apply_structure_rejects_wrong_type() {
        let lc = levi_civita(&polar());
        let s = TensorField::new(lc.chart().clone(), 0, 2, |_| Tensor::zeros(2, 2));
        assert!(apply_structure(&lc, &s).is_err());
    }

    #[test]
    fn geodesic_rejects_bad_step() {
        let lc = levi_civita(&polar());
        assert!(integrate_geodesic(&lc, &[1.0, 0.0], &[1.0, 0.0], (0.0, 1.0), 0.0).is_err());
    }
}
