//! The cohomogeneity-one verifier and structure extraction.
//!
//! A [`Co1Setup`] bundles a metric `g`, a unit field `ξ` and a candidate
//! connection `∇̃`. [`verify_co1`] measures, point by point,
//!
//! ```text
//! ∇̃R̃,  ∇̃T̃,  ∇̃ξ,  (∇̃_X g) for X ∈ D,  g(T̃(X,Y), ξ) for X,Y ∈ D,  g([X,Y], ξ) for X,Y ∈ D
//! ```
//!
//! in the adapted orthonormal frame `e_0 = ξ, e_1..e_n`. The structure
//! `S = ∇ − ∇̃` is returned as an [`AlgebraicStructure`] with components
//! `S_abc = g(S_{e_a} e_b, e_c)`.
//!
//! With Killing data along the normal geodesic `γ(t) = φ_t(p)` the canonical
//! structure can be rebuilt from `g(φ_{t*}X, φ_{t*}Y)` and the reductive
//! bracket alone; see [`canonical_structure_at`].

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{
    covariant_derivative_at, curvature_field, difference, levi_civita, torsion_at, torsion_field, ConnectionField,
    TensorField,
};
use crate::decomp::AlgebraicStructure;
use crate::fd::{self, FdSteps};
use crate::geometry::{adapted_frame, lie_bracket, AdaptedFrame, Chart, Eval, MetricField, Point, VectorField};
use crate::tensor::{Tensor, Variance};
use crate::{Error, Result};

use Variance::{Down, Up};

/// Metric, unit normal field and candidate connection on one chart.
#[derive(Clone)]
pub struct Co1Setup {
    name: String,
    metric: MetricField,
    xi: VectorField,
    connection: ConnectionField,
    levi_civita: ConnectionField,
    structure: Option<TensorField>,
    fd: FdSteps,
}

impl fmt::Debug for Co1Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Co1Setup")
            .field("name", &self.name)
            .field("chart", self.metric.chart())
            .field("connection", &self.connection)
            .finish()
    }
}

impl Co1Setup {
    pub fn new(
        name: impl Into<String>,
        metric: MetricField,
        xi: VectorField,
        connection: ConnectionField,
    ) -> Result<Self> {
        let n = metric.dim();
        if xi.chart().dim() != n || connection.dim() != n {
            return Err(Error::Config(format!(
                "metric, ξ and connection live on charts of dimensions {n}, {}, {}",
                xi.chart().dim(),
                connection.dim()
            )));
        }
        let fd = metric.fd();
        Ok(Self {
            name: name.into(),
            levi_civita: levi_civita(&metric),
            metric,
            xi,
            connection,
            structure: None,
            fd,
        })
    }

    /// Records a closed form of `S = ∇ − ∇̃` for cross-checks.
    pub fn with_structure(mut self, structure: TensorField) -> Self {
        self.structure = Some(structure);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    /// Dimension of the leaves.
    pub fn n(&self) -> usize {
        self.metric.dim() - 1
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn xi(&self) -> &VectorField {
        &self.xi
    }

    pub fn connection(&self) -> &ConnectionField {
        &self.connection
    }

    pub fn levi_civita(&self) -> &ConnectionField {
        &self.levi_civita
    }

    pub fn closed_form_structure(&self) -> Option<&TensorField> {
        self.structure.as_ref()
    }

    pub fn fd(&self) -> FdSteps {
        self.fd
    }

    /// Distance from the chart boundary needed by the nested difference stencils.
    pub fn margin(&self) -> f64 {
        2.0 * (self.fd.first + 2.0 * self.fd.nested)
    }

    /// `S = ∇ − ∇̃` as a `(1,2)` field.
    pub fn structure_field(&self) -> TensorField {
        difference(&self.levi_civita, &self.connection)
    }

    fn check_unit(&self, p: &[f64]) -> Result<()> {
        let x = self.xi.at(p)?;
        let norm2 = self.metric.inner(p, &x, &x)?;
        if (norm2 - 1.0).abs() >= 1e-8 {
            return Err(Error::Precondition(format!(
                "setup {}: ξ is not a unit field at {p:?}: g(ξ,ξ) = {norm2}",
                self.name
            )));
        }
        Ok(())
    }

    fn frame(&self, p: &[f64]) -> Result<Frame> {
        let g = self.metric.at(p)?;
        let frame = adapted_frame(&self.metric, &self.xi, p)?;
        let e = frame.matrix();
        let theta = frame.coframe(&g);
        Ok((g, frame, e, theta))
    }
}

/// Max-abs residuals of the verified equations at one point, in frame components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    #[serde(rename = "nabla_R")]
    pub nabla_curvature: f64,
    #[serde(rename = "nabla_T")]
    pub nabla_torsion: f64,
    pub nabla_xi: f64,
    #[serde(rename = "nabla_g_D")]
    pub nabla_metric_d: f64,
    #[serde(rename = "torsion_D")]
    pub torsion_d: f64,
    pub frobenius: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.nabla_curvature,
            self.nabla_torsion,
            self.nabla_xi,
            self.nabla_metric_d,
            self.torsion_d,
            self.frobenius,
        ]
    }

    /// Componentwise maximum.
    pub fn merge(&self, other: &Residuals) -> Residuals {
        Residuals {
            nabla_curvature: self.nabla_curvature.max(other.nabla_curvature),
            nabla_torsion: self.nabla_torsion.max(other.nabla_torsion),
            nabla_xi: self.nabla_xi.max(other.nabla_xi),
            nabla_metric_d: self.nabla_metric_d.max(other.nabla_metric_d),
            torsion_d: self.torsion_d.max(other.torsion_d),
            frobenius: self.frobenius.max(other.frobenius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResiduals {
    pub coords: Vec<f64>,
    pub residuals: Residuals,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub example: String,
    pub tolerance: f64,
    pub fd: FdSteps,
    pub points: Vec<PointResiduals>,
    pub worst: Residuals,
    pub pass: bool,
}

/// Residuals of the cohomogeneity-one equations at a single point.
pub fn residuals_at(setup: &Co1Setup, p: &[f64]) -> Result<Residuals> {
    setup.chart().check_stencil(p, setup.margin())?;
    setup.check_unit(p)?;
    let (g, _, e, theta) = setup.frame(p)?;
    let n = g.nrows();
    let conn = &setup.connection;

    let nabla_r = covariant_derivative_at(conn, &curvature_field(conn), p)?;
    let nabla_r = nabla_r.to_frame(&[Down, Up, Down, Down, Down], &e, &theta);

    let torsion = torsion_field(conn);
    let nabla_t = covariant_derivative_at(conn, &torsion, p)?;
    let nabla_t = nabla_t.to_frame(&[Down, Up, Down, Down], &e, &theta);

    let nabla_xi = covariant_derivative_at(conn, &TensorField::from_vector(&setup.xi), p)?;
    let nabla_xi = nabla_xi.to_frame(&[Down, Up], &e, &theta);

    let nabla_g = covariant_derivative_at(conn, &TensorField::from_metric(&setup.metric), p)?;
    let nabla_g = nabla_g.to_frame(&[Down, Down, Down], &e, &theta);
    let mut nabla_metric_d = 0.0_f64;
    for m in 1..n {
        for a in 0..n {
            for b in 0..n {
                nabla_metric_d = nabla_metric_d.max(nabla_g[[m, a, b]].abs());
            }
        }
    }

    let t = torsion_at(conn, p)?.to_frame(&[Up, Down, Down], &e, &theta);
    let mut torsion_d = 0.0_f64;
    for i in 1..n {
        for j in 1..n {
            torsion_d = torsion_d.max(t[[0, i, j]].abs());
        }
    }

    Ok(Residuals {
        nabla_curvature: nabla_r.max_abs(),
        nabla_torsion: nabla_t.max_abs(),
        nabla_xi: nabla_xi.max_abs(),
        nabla_metric_d,
        torsion_d,
        frobenius: frobenius_residual(&setup.metric, &setup.xi, p)?,
    })
}

/// Runs [`residuals_at`] over the sample points; passes iff every residual is `≤ tol`.
pub fn verify_co1(setup: &Co1Setup, points: &[Point], tol: f64) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let records = points
        .par_iter()
        .map(|p| {
            residuals_at(setup, p).map(|residuals| PointResiduals {
                coords: p.to_vec(),
                pass: residuals.max() <= tol,
                residuals,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = records
        .iter()
        .fold(Residuals::default(), |acc, r| acc.merge(&r.residuals));
    Ok(VerificationReport {
        example: setup.name.clone(),
        tolerance: tol,
        fd: setup.fd,
        pass: records.iter().all(|r| r.pass),
        points: records,
        worst,
    })
}

/// `∂_k − g(∂_k, ξ) ξ`: the chart field `∂_k` projected onto `D`.
pub fn projected_coordinate_field(metric: &MetricField, xi: &VectorField, k: usize) -> VectorField {
    let n = metric.dim();
    let (m, x) = (metric.clone(), xi.clone());
    let eval: Eval<DVector<f64>> = Arc::new(move |p| {
        let g = m.at(p)?;
        let xv = x.at(p)?;
        let c = (&g * &xv)[k];
        let mut v = -xv * c;
        v[k] += 1.0;
        Ok(v)
    });
    let jac: Option<Eval<DMatrix<f64>>> = (metric.has_partials() && xi.has_jacobian()).then(|| {
        let (m, x) = (metric.clone(), xi.clone());
        Arc::new(move |p: &[f64]| {
            let g = m.at(p)?;
            let dg = m.partials(p)?;
            let xv = x.at(p)?;
            let jx = x.jacobian(p)?;
            let c = (&g * &xv)[k];
            let mut out = DMatrix::zeros(n, n);
            for l in 0..n {
                let mut dc = 0.0;
                for q in 0..n {
                    dc += dg[[l, k, q]] * xv[q] + g[(k, q)] * jx[(q, l)];
                }
                for a in 0..n {
                    out[(a, l)] = -dc * xv[a] - c * jx[(a, l)];
                }
            }
            Ok(out)
        }) as Eval<DMatrix<f64>>
    });
    VectorField::from_eval(metric.chart().clone(), eval, jac, metric.fd())
}

/// Fields spanning `D` near `p`: every projected chart field except the one
/// along the largest component of `ξ(p)`.
pub fn local_d_fields(metric: &MetricField, xi: &VectorField, p: &[f64]) -> Result<Vec<VectorField>> {
    let x = xi.at(p)?;
    let drop = x.iamax();
    Ok((0..metric.dim())
        .filter(|&k| k != drop)
        .map(|k| projected_coordinate_field(metric, xi, k))
        .collect())
}

/// `max |g([E_k, E_l], ξ)|` over the local `D`-spanning fields.
pub fn frobenius_residual(metric: &MetricField, xi: &VectorField, p: &[f64]) -> Result<f64> {
    let fields = local_d_fields(metric, xi, p)?;
    let g = metric.at(p)?;
    let xv = xi.at(p)?;
    let gx = &g * &xv;
    let mut worst = 0.0_f64;
    for (i, a) in fields.iter().enumerate() {
        for b in &fields[i + 1..] {
            worst = worst.max(lie_bracket(a, b, p)?.dot(&gx).abs());
        }
    }
    Ok(worst)
}

/// `S_abc = g(S_{e_a} e_b, e_c)` for `S = ∇ − ∇̃` in the adapted frame.
pub fn structure_at(setup: &Co1Setup, p: &[f64]) -> Result<AlgebraicStructure> {
    let (_, _, e, theta) = setup.frame(p)?;
    let s = &setup.levi_civita.gamma(p)? - &setup.connection.gamma(p)?;
    // frame components come out as [c][a][b]
    let framed = s.to_frame(&[Up, Down, Down], &e, &theta).permute(&[1, 2, 0]);
    AlgebraicStructure::from_tensor(framed)
}

/// Frame components of the closed-form structure recorded on the setup, if any.
pub fn closed_form_structure_at(setup: &Co1Setup, p: &[f64]) -> Result<Option<AlgebraicStructure>> {
    let Some(s) = &setup.structure else {
        return Ok(None);
    };
    let (_, _, e, theta) = setup.frame(p)?;
    let framed = s.at(p)?.to_frame(&[Up, Down, Down], &e, &theta).permute(&[1, 2, 0]);
    AlgebraicStructure::from_tensor(framed).map(Some)
}

/// `II_ij = g(∇_{e_i} e_j, ξ)` on the leaf through a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamentalForm {
    pub components: DMatrix<f64>,
    /// The same form computed as `−g(∇_{e_i} ξ, e_j)`.
    pub from_shape_operator: DMatrix<f64>,
}

impl SecondFundamentalForm {
    /// Largest disagreement between the two computations.
    pub fn discrepancy(&self) -> f64 {
        (&self.components - &self.from_shape_operator).amax()
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.components - self.components.transpose()).amax()
    }

    pub fn mean_curvature(&self) -> f64 {
        self.components.trace() / self.components.nrows() as f64
    }
}

/// Second fundamental form of the leaf through `p` with respect to `ξ`.
///
/// `e_j` is extended by projecting its constant chart components onto
/// `ξ^⊥` at nearby points; the result does not depend on the extension.
pub fn second_fundamental_form_at(
    metric: &MetricField,
    xi: &VectorField,
    p: &[f64],
) -> Result<SecondFundamentalForm> {
    let g = metric.at(p)?;
    let xv = xi.at(p)?;
    let norm2 = xv.dot(&(&g * &xv));
    if (norm2 - 1.0).abs() >= 1e-8 {
        return Err(Error::Precondition(format!("ξ is not a unit field at {p:?}: g(ξ,ξ) = {norm2}")));
    }
    let lc = levi_civita(metric);
    let frame = adapted_frame(metric, xi, p)?;
    let dg = metric.partials(p)?;
    let jx = xi.jacobian(p)?;
    let dim = g.nrows();
    let n = dim - 1;
    let gx = &g * &xv;
    let e = frame.vectors();

    let mut components = DMatrix::zeros(n, n);
    let mut shape = DMatrix::zeros(n, n);
    for j in 1..=n {
        // Jacobian of Y(x) = e_j − g_x(e_j, ξ(x)) ξ(x) at p, where g(e_j, ξ) = 0
        let mut jy = DMatrix::zeros(dim, dim);
        for l in 0..dim {
            let mut dc = 0.0;
            for k in 0..dim {
                for q in 0..dim {
                    dc += e[j][k] * (dg[[l, k, q]] * xv[q] + g[(k, q)] * jx[(q, l)]);
                }
            }
            for a in 0..dim {
                jy[(a, l)] = -dc * xv[a];
            }
        }
        for i in 1..=n {
            let nabla = lc.derivative_along(p, &e[i], &e[j], &jy)?;
            components[(i - 1, j - 1)] = nabla.dot(&gx);
        }
    }
    for i in 1..=n {
        let nabla_xi = lc.derivative_along(p, &e[i], &xv, &jx)?;
        for j in 1..=n {
            shape[(i - 1, j - 1)] = -nabla_xi.dot(&(&g * &e[j]));
        }
    }
    Ok(SecondFundamentalForm {
        components,
        from_shape_operator: shape,
    })
}

/// Residuals of the four pointwise properties every cohomogeneity-one structure has.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureProperties {
    /// `max |(∇̃_X S)|` over `X ∈ D`.
    pub parallel_along_d: f64,
    /// `max |S_abc + S_acb|` over `a ≥ 1`.
    pub metric_in_d: f64,
    /// `max |S_ij0 − II_ij|`.
    pub second_fundamental_form: f64,
    /// `max |S_00c|`.
    pub normal_normal: f64,
    /// `max |(∇̃_ξ S)|`, measured but not part of the pass criterion.
    pub parallel_along_xi: f64,
    pub tolerance: f64,
}

impl StructureProperties {
    pub fn holds(&self) -> [bool; 4] {
        let tol = self.tolerance;
        [
            self.parallel_along_d <= tol,
            self.metric_in_d <= tol,
            self.second_fundamental_form <= tol,
            self.normal_normal <= tol,
        ]
    }

    pub fn pass(&self) -> bool {
        self.holds().iter().all(|&b| b)
    }
}

pub fn verify_structure_properties(setup: &Co1Setup, p: &[f64], tol: f64) -> Result<StructureProperties> {
    setup.chart().check_stencil(p, setup.margin())?;
    let (_, _, e, theta) = setup.frame(p)?;
    let s = structure_at(setup, p)?;
    let ii = second_fundamental_form_at(&setup.metric, &setup.xi, p)?;
    let nabla_s = covariant_derivative_at(&setup.connection, &setup.structure_field(), p)?;
    let nabla_s = nabla_s.to_frame(&[Down, Up, Down, Down], &e, &theta);
    Ok(properties_of(&s, &ii.components, &nabla_s, tol))
}

/// Property residuals for a frame-component array, independent of any field.
pub fn properties_of(s: &AlgebraicStructure, ii: &DMatrix<f64>, nabla_s: &Tensor, tol: f64) -> StructureProperties {
    let dim = s.n() + 1;
    let (mut metric_in_d, mut sff, mut normal_normal) = (0.0_f64, 0.0_f64, 0.0_f64);
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                if a >= 1 {
                    metric_in_d = metric_in_d.max((s.get(a, b, c) + s.get(a, c, b)).abs());
                }
            }
        }
    }
    for c in 0..dim {
        normal_normal = normal_normal.max(s.get(0, 0, c).abs());
    }
    for i in 1..dim {
        for j in 1..dim {
            sff = sff.max((s.get(i, j, 0) - ii[(i - 1, j - 1)]).abs());
        }
    }
    let (mut along_d, mut along_xi) = (0.0_f64, 0.0_f64);
    for idx in nabla_s.indices() {
        let v = nabla_s.get(&idx).abs();
        if idx[0] == 0 {
            along_xi = along_xi.max(v);
        } else {
            along_d = along_d.max(v);
        }
    }
    StructureProperties {
        parallel_along_d: along_d,
        metric_in_d,
        second_fundamental_form: sff,
        normal_normal,
        parallel_along_xi: along_xi,
        tolerance: tol,
    }
}

/// Frame components of `T̃(ξ, e_b)`: entry `(c, b)` is `g(T̃(ξ, e_b), e_c)`.
pub fn normal_torsion_at(setup: &Co1Setup, p: &[f64]) -> Result<DMatrix<f64>> {
    let (_, _, e, theta) = setup.frame(p)?;
    let t = torsion_at(&setup.connection, p)?.to_frame(&[Up, Down, Down], &e, &theta);
    let dim = e.ncols();
    Ok(DMatrix::from_fn(dim, dim, |c, b| t[[c, 0, b]]))
}

/// Rebuilds a structure with `T̃(ξ,·) = 0` from its leaf part and the second
/// fundamental form: `S_ij0 = II_ij`, `S_i0k = −II_ik`, `S_0jk = −II_jk`,
/// with the `T` block copied and every other component zero.
pub fn reconstruct_from_leaf_data(leaf: &AlgebraicStructure, ii: &DMatrix<f64>) -> Result<AlgebraicStructure> {
    let n = leaf.n();
    if ii.nrows() != n || ii.ncols() != n {
        return Err(Error::Config(format!(
            "second fundamental form is {}x{}, leaves have dimension {n}",
            ii.nrows(),
            ii.ncols()
        )));
    }
    let mut s = AlgebraicStructure::zeros(n)?;
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                s.set(i, j, k, leaf.get(i, j, k));
            }
            let v = ii[(i - 1, j - 1)];
            s.set(i, j, 0, v);
            s.set(i, 0, j, -v);
            s.set(0, i, j, -v);
        }
    }
    Ok(s)
}

type GeodesicFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;
type FlowDiffFn = Arc<dyn Fn(f64, &DVector<f64>) -> DVector<f64> + Send + Sync>;
type Frame = (DMatrix<f64>, AdaptedFrame, DMatrix<f64>, DMatrix<f64>);

/// Killing fields spanning a reductive complement `m` at a base point `p`,
/// with the bracket `[X_i, X_j]_m` and the differential of the normal flow.
#[derive(Clone)]
pub struct KillingModel {
    base_point: Vec<f64>,
    fields: Vec<VectorField>,
    bracket_m: Vec<Vec<Vec<f64>>>,
    geodesic: GeodesicFn,
    flow_diff: FlowDiffFn,
    time_step: f64,
}

impl fmt::Debug for KillingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KillingModel")
            .field("base_point", &self.base_point)
            .field("fields", &self.fields.len())
            .finish()
    }
}

impl KillingModel {
    /// `bracket_m[i][j]` lists the coefficients of `[X_i, X_j]_m` in the basis.
    /// `geodesic(t)` is `γ(t) = φ_t(p)` and `flow_diff(t, v)` is `φ_{t*p} v`.
    pub fn new(
        base_point: Vec<f64>,
        fields: Vec<VectorField>,
        bracket_m: Vec<Vec<Vec<f64>>>,
        geodesic: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        flow_diff: impl Fn(f64, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let k = fields.len();
        let complete = bracket_m.len() == k && bracket_m.iter().all(|row| row.len() == k && row.iter().all(|c| c.len() == k));
        if !complete {
            return Err(Error::Config(format!(
                "bracket data must be a {k}x{k} table of {k}-vectors"
            )));
        }
        Ok(Self {
            base_point,
            fields,
            bracket_m,
            geodesic: Arc::new(geodesic),
            flow_diff: Arc::new(flow_diff),
            time_step: 1e-5,
        })
    }

    pub fn with_time_step(mut self, h: f64) -> Self {
        self.time_step = h;
        self
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn geodesic(&self, t: f64) -> Vec<f64> {
        (self.geodesic)(t)
    }

    pub fn bracket(&self, i: usize, j: usize) -> Result<&[f64]> {
        self.bracket_m
            .get(i)
            .and_then(|row| row.get(j))
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Config(format!("no bracket data for basis pair ({i}, {j})")))
    }

    /// `φ_{t*p} X_i(p)`.
    pub fn pushed(&self, t: f64, i: usize) -> Result<DVector<f64>> {
        let field = self
            .fields
            .get(i)
            .ok_or_else(|| Error::Config(format!("Killing basis has no element {i}")))?;
        Ok((self.flow_diff)(t, &field.at(&self.base_point)?))
    }

    /// `φ_{t*p} Σ_k c_k X_k(p)`.
    fn pushed_combination(&self, t: f64, coeffs: &[f64]) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.base_point.len());
        for (k, c) in coeffs.iter().enumerate() {
            if *c != 0.0 {
                out += self.pushed(t, k)? * *c;
            }
        }
        Ok(out)
    }

    fn gram_entry(&self, metric: &MetricField, t: f64, i: usize, j: usize) -> Result<f64> {
        metric.inner(&self.geodesic(t), &self.pushed(t, i)?, &self.pushed(t, j)?)
    }
}

/// Largest Killing-equation residual `|L_X g|` of the basis at the given points.
pub fn killing_model_residual(metric: &MetricField, model: &KillingModel, points: &[Point]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for f in &model.fields {
        for p in points {
            worst = worst.max(crate::geometry::killing_residual(metric, f, p)?);
        }
    }
    Ok(worst)
}

/// One argument `a ξ + X*` of the canonical structure; `killing: None` is the zero vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub normal: f64,
    pub killing: Option<usize>,
}

impl Slot {
    pub fn normal(a: f64) -> Self {
        Self { normal: a, killing: None }
    }

    pub fn killing(i: usize) -> Self {
        Self {
            normal: 0.0,
            killing: Some(i),
        }
    }

    pub fn new(normal: f64, killing: Option<usize>) -> Self {
        Self { normal, killing }
    }

    /// `ξ, X_0, .., X_{k-1}`.
    pub fn basis(k: usize) -> Vec<Slot> {
        std::iter::once(Slot::normal(1.0)).chain((0..k).map(Slot::killing)).collect()
    }
}

/// `g(S_{aξ+X*}(bξ+Y*), cξ+Z*)` at `γ(t)` from the Killing data alone:
///
/// ```text
/// 2g(S_{aξ+X*}(bξ+Y*), cξ+Z*) =
///     a d/dt g(φY,φZ) + b d/dt g(φX,φZ) − c d/dt g(φX,φY)
///   + g(φ[X,Y]_m, φZ) − g(φ[X,Z]_m, φY) − g(φ[Y,Z]_m, φX)
/// ```
///
/// with `φ = φ_{t*p}` and the `t`-derivatives taken by central differences.
pub fn canonical_structure_at(
    setup: &Co1Setup,
    killing: &KillingModel,
    t: f64,
    x: Slot,
    y: Slot,
    z: Slot,
) -> Result<f64> {
    let metric = &setup.metric;
    let h = killing.time_step;
    let gram_rate = |u: Option<usize>, v: Option<usize>| -> Result<f64> {
        match (u, v) {
            (Some(i), Some(j)) => fd::derivative(t, h, |s| killing.gram_entry(metric, s, i, j)),
            _ => Ok(0.0),
        }
    };
    let bracket_term = |u: Option<usize>, v: Option<usize>, w: Option<usize>| -> Result<f64> {
        match (u, v, w) {
            (Some(i), Some(j), Some(k)) => {
                let coeffs = killing.bracket(i, j)?;
                let b = killing.pushed_combination(t, coeffs)?;
                metric.inner(&killing.geodesic(t), &b, &killing.pushed(t, k)?)
            }
            _ => Ok(0.0),
        }
    };
    let (a, b, c) = (x.normal, y.normal, z.normal);
    let (xk, yk, zk) = (x.killing, y.killing, z.killing);
    let twice = a * gram_rate(yk, zk)? + b * gram_rate(xk, zk)? - c * gram_rate(xk, yk)?
        + bracket_term(xk, yk, zk)?
        - bracket_term(xk, zk, yk)?
        - bracket_term(yk, zk, xk)?;
    Ok(0.5 * twice)
}

/// The same quantity as [`canonical_structure_at`], read off `S = ∇ − ∇̃` of the setup.
pub fn direct_structure_value(
    setup: &Co1Setup,
    killing: &KillingModel,
    t: f64,
    x: Slot,
    y: Slot,
    z: Slot,
) -> Result<f64> {
    let q = killing.geodesic(t);
    let xi = setup.xi.at(&q)?;
    let vector = |s: Slot| -> Result<DVector<f64>> {
        let mut v = &xi * s.normal;
        if let Some(i) = s.killing {
            v += killing.pushed(t, i)?;
        }
        Ok(v)
    };
    let (u, v, w) = (vector(x)?, vector(y)?, vector(z)?);
    let s = &setup.levi_civita.gamma(&q)? - &setup.connection.gamma(&q)?;
    let dim = u.len();
    let mut suv = DVector::zeros(dim);
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                suv[k] += s[[k, i, j]] * u[i] * v[j];
            }
        }
    }
    setup.metric.inner(&q, &suv, &w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOperatorSample {
    pub t: f64,
    /// `A(t)` acting on coefficients in the moving Killing basis.
    pub operator: DMatrix<f64>,
    /// Eigenvalues of `A(t)`, ascending.
    pub eigenvalues: Vec<f64>,
}

/// `A(t) = G(t)^{-1} · ½ dG/dt` with `G_ij(t) = g(φ_{t*p} X_i, φ_{t*p} X_j)`.
pub fn shape_operator_along_geodesic(
    setup: &Co1Setup,
    killing: &KillingModel,
    t_samples: &[f64],
) -> Result<Vec<ShapeOperatorSample>> {
    let k = killing.len();
    let metric = &setup.metric;
    let h = killing.time_step;
    t_samples
        .iter()
        .map(|&t| {
            let mut gram = DMatrix::zeros(k, k);
            let mut rate = DMatrix::zeros(k, k);
            for i in 0..k {
                for j in i..k {
                    let gij = killing.gram_entry(metric, t, i, j)?;
                    let rij = 0.5 * fd::derivative(t, h, |s| killing.gram_entry(metric, s, i, j))?;
                    gram[(i, j)] = gij;
                    gram[(j, i)] = gij;
                    rate[(i, j)] = rij;
                    rate[(j, i)] = rij;
                }
            }
            let eig = gram.clone().symmetric_eigen();
            let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.amax());
            if !(lo > 1e-12 * hi.max(1.0)) {
                return Err(Error::Rank(format!(
                    "Killing fields are dependent at γ({t}): Gram eigenvalues in [{lo:e}, {hi:e}]"
                )));
            }
            let chol = gram.clone().cholesky().expect("positive definite Gram matrix");
            let operator = chol.solve(&rate);
            // A is similar to L⁻¹ B L⁻ᵀ, which is symmetric
            let l_inv = chol.l().try_inverse().expect("invertible Cholesky factor");
            let sym = &l_inv * &rate * l_inv.transpose();
            let sym = (&sym + sym.transpose()) * 0.5;
            let mut eigenvalues: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
            eigenvalues.sort_by(f64::total_cmp);
            Ok(ShapeOperatorSample {
                t,
                operator,
                eigenvalues,
            })
        })
        .collect()
}
