//! Built-in cohomogeneity-one examples.
//!
//! Every example is a warped product `dt² + f(t)² g_fiber` with `ξ = ∂t`
//! pointing towards increasing `t`:
//!
//! | name                     | chart                        | `f`      | `∇̃`                                 |
//! |--------------------------|------------------------------|----------|--------------------------------------|
//! | `parallel_hyperplanes`   | `(−5,5)^{n+1}`, `ξ = ∂x_{n+1}` | `1`    | Levi-Civita                          |
//! | `concentric_spheres`     | `r × stereographic u`        | `r`      | Levi-Civita of `dr² + g_{S^n}`       |
//! | `horospheres`            | `t × x`                      | `e^{−t}` | flat coordinate connection           |
//! | `linear_type_hyperbolic` | `t × x`                      | `e^{−t}` | `∇ − S̄`, `S̄_X Y = g(X,Y)ξ − g(Y,ξ)X` |
//! | `warped_generic`         | `t × fiber`                  | chosen   | Levi-Civita of `dt² + g_fiber`       |
//!
//! Leaves are the level sets of `t` (or `r`, or `x_{n+1}`), and `n` is their dimension.
//! With this orientation the second fundamental form `g(∇_X Y, ξ)` equals
//! `−(f′/f) g(X,Y)` and both trace parameters of the structure equal `f′/f`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::co1::{Co1Setup, KillingModel};
use crate::connection::{apply_structure, levi_civita, ConnectionField, TensorField};
use crate::decomp::{DecompositionReport, SubmoduleId};
use crate::fd::FdSteps;
use crate::geometry::{warped_metric, Chart, Eval, MetricField, Point, VectorField, WarpFunction};
use crate::tensor::Tensor;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    ParallelHyperplanes,
    ConcentricSpheres,
    Horospheres,
    LinearTypeHyperbolic,
    WarpedGeneric,
}

impl ExampleName {
    pub const ALL: [ExampleName; 5] = [
        Self::ParallelHyperplanes,
        Self::ConcentricSpheres,
        Self::Horospheres,
        Self::LinearTypeHyperbolic,
        Self::WarpedGeneric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ParallelHyperplanes => "parallel_hyperplanes",
            Self::ConcentricSpheres => "concentric_spheres",
            Self::Horospheres => "horospheres",
            Self::LinearTypeHyperbolic => "linear_type_hyperbolic",
            Self::WarpedGeneric => "warped_generic",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|e| e.as_str()).collect();
            Error::Config(format!("unknown example {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

/// A warping function by name: `exp:K`, `cosh`, `const:C` or `linear:A,B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WarpSpec {
    Exp(f64),
    Cosh,
    Constant(f64),
    Linear(f64, f64),
}

impl WarpSpec {
    pub fn warp(&self) -> WarpFunction {
        match *self {
            WarpSpec::Exp(k) => WarpFunction::exp(k),
            WarpSpec::Cosh => WarpFunction::cosh(),
            WarpSpec::Constant(c) => WarpFunction::constant(c),
            WarpSpec::Linear(a, b) => WarpFunction::linear(a, b),
        }
    }
}

impl fmt::Display for WarpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WarpSpec::Exp(k) => write!(f, "exp:{k}"),
            WarpSpec::Cosh => f.write_str("cosh"),
            WarpSpec::Constant(c) => write!(f, "const:{c}"),
            WarpSpec::Linear(a, b) => write!(f, "linear:{a},{b}"),
        }
    }
}

impl FromStr for WarpSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse warp {s:?}; expected exp:K, cosh, const:C or linear:A,B"));
        let num = |x: &str| x.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "cosh" if args.is_empty() => Ok(WarpSpec::Cosh),
            "exp" => num(args).map(WarpSpec::Exp).ok_or_else(bad),
            "const" => num(args).map(WarpSpec::Constant).ok_or_else(bad),
            "linear" => {
                let (a, b) = args.split_once(',').ok_or_else(bad)?;
                Ok(WarpSpec::Linear(num(a).ok_or_else(bad)?, num(b).ok_or_else(bad)?))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fiber {
    Flat,
    Sphere,
}

impl FromStr for Fiber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Fiber::Flat),
            "sphere" => Ok(Fiber::Sphere),
            _ => Err(Error::Config(format!("unknown fiber {s:?}; expected flat or sphere"))),
        }
    }
}

/// Optional knobs for [`build_example`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    /// Use closed-form derivatives; otherwise everything goes through differences.
    pub analytic: bool,
    /// Radial range for `concentric_spheres`, `t`-range for the warped examples.
    pub range: Option<(f64, f64)>,
    /// Warping function for `warped_generic`.
    pub warp: WarpSpec,
    /// Fiber for `warped_generic`.
    pub fiber: Fiber,
    pub fd: FdSteps,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self {
            analytic: true,
            range: None,
            warp: WarpSpec::Cosh,
            fiber: Fiber::Flat,
            fd: FdSteps::default(),
        }
    }
}

/// Static facts about a registry entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleEntry {
    pub name: ExampleName,
    pub min_n: usize,
    pub has_killing_model: bool,
    /// Largest residual expected on the closed-form path.
    pub residual_budget: f64,
    pub orientation: &'static str,
}

pub fn registry() -> [ExampleEntry; 5] {
    ExampleName::ALL.map(entry)
}

pub fn entry(name: ExampleName) -> ExampleEntry {
    let (killing, orientation) = match name {
        ExampleName::ParallelHyperplanes => (true, "ξ = ∂x_{n+1}; leaves totally geodesic"),
        ExampleName::ConcentricSpheres => (true, "ξ = ∂r points outward; II = −(1/r) g, S_{e_i} ξ = (1/r) e_i"),
        ExampleName::Horospheres => (true, "ξ = ∂t, f = e^{−t}; II = g, trace parameters −1"),
        ExampleName::LinearTypeHyperbolic => (true, "ξ = ∂t, f = e^{−t}; trace parameter of II1 is −1"),
        ExampleName::WarpedGeneric => (false, "ξ = ∂t; II = −(f′/f) g, trace parameters f′/f"),
    };
    ExampleEntry {
        name,
        min_n: 2,
        has_killing_model: killing,
        residual_budget: 1e-6,
        orientation,
    }
}

/// A built example: the setup plus its Killing data, if the registry has one.
#[derive(Debug, Clone)]
pub struct BuiltExample {
    pub entry: ExampleEntry,
    pub n: usize,
    pub params: ExampleParams,
    pub setup: Co1Setup,
    pub killing: Option<KillingModel>,
    warp: WarpFunction,
}

impl BuiltExample {
    /// `f′/f` at the leaf through `p`.
    pub fn trace_parameter(&self, p: &[f64]) -> f64 {
        let t = match self.entry.name {
            ExampleName::ParallelHyperplanes => return 0.0,
            _ => p[0],
        };
        self.warp.log_derivative(t)
    }

    /// Expected fine components at `p`, each with its scalar parameter.
    pub fn fingerprint_at(&self, p: &[f64]) -> Vec<(SubmoduleId, f64)> {
        let lambda = self.trace_parameter(p);
        match self.entry.name {
            ExampleName::ParallelHyperplanes => vec![],
            ExampleName::LinearTypeHyperbolic => vec![(SubmoduleId::II1, lambda)],
            _ if lambda == 0.0 => vec![],
            _ => vec![(SubmoduleId::II1, lambda), (SubmoduleId::Z1, lambda)],
        }
    }

    /// Whether a classification matches [`Self::fingerprint_at`] to `tol`.
    pub fn fingerprint_matches(&self, p: &[f64], report: &DecompositionReport, tol: f64) -> bool {
        let expected = self.fingerprint_at(p);
        let ids: Vec<_> = expected.iter().map(|(id, _)| *id).collect();
        ids == report.present_ids()
            && expected.iter().all(|(id, lambda)| {
                report
                    .component(*id)
                    .and_then(|c| c.param.as_ref())
                    .and_then(|param| param.scalar())
                    .is_some_and(|v| (v - lambda).abs() <= tol)
            })
    }

    /// Seeded uniform samples from the chart shrunk by the difference-stencil margin.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.setup.chart().sample(&mut rng, count, 2.0 * self.setup.margin())
    }
}

pub fn build_example(name: ExampleName, n: usize, params: &ExampleParams) -> Result<BuiltExample> {
    let entry = entry(name);
    if n < entry.min_n {
        return Err(Error::Config(format!("{name} needs n ≥ {}, got {n}", entry.min_n)));
    }
    let fd = params.fd;
    if !(fd.first > 0.0 && fd.nested > 0.0) {
        return Err(Error::Config(format!("difference steps must be positive, got {fd:?}")));
    }
    let strip = |m: MetricField| if params.analytic { m } else { m.without_derivatives() };
    let flat_fiber = |name: &str| Chart::cube(name, n, -5.0, 5.0);
    let range = |default: (f64, f64)| -> Result<(f64, f64)> {
        let (lo, hi) = params.range.unwrap_or(default);
        if !(lo < hi) {
            return Err(Error::Config(format!("empty range ({lo}, {hi})")));
        }
        Ok((lo, hi))
    };

    let (metric, connection, structure, warp) = match name {
        ExampleName::ParallelHyperplanes => {
            let chart = Chart::cube("R^{n+1}", n + 1, -5.0, 5.0)?;
            let metric = strip(MetricField::euclidean(chart).with_fd(fd));
            let conn = levi_civita(&metric);
            (metric, conn, None, WarpSpec::Constant(1.0).warp())
        }
        ExampleName::ConcentricSpheres => {
            let (lo, hi) = range((0.5, 5.0))?;
            if lo <= 0.0 {
                return Err(Error::Config(format!("radial range must be positive, got ({lo}, {hi})")));
            }
            let fiber = MetricField::round_sphere_stereographic(Chart::cube("S^n stereographic", n, -1.0, 1.0)?);
            let warp = WarpFunction::linear(0.0, 1.0);
            let metric = strip(warped_metric((lo, hi), &warp, &fiber)?.with_fd(fd));
            let product = strip(warped_metric((lo, hi), &WarpFunction::constant(1.0), &fiber)?.with_fd(fd));
            (metric, levi_civita(&product), None, warp)
        }
        ExampleName::Horospheres | ExampleName::LinearTypeHyperbolic => {
            let interval = range((-2.0, 2.0))?;
            let fiber = MetricField::euclidean(flat_fiber("R^n")?);
            let warp = WarpFunction::exp(-1.0);
            let metric = strip(warped_metric(interval, &warp, &fiber)?.with_fd(fd));
            let xi = normal_field(&metric, 0, params.analytic);
            if name == ExampleName::Horospheres {
                let mut conn = ConnectionField::flat(metric.chart().clone()).with_fd(fd);
                if !params.analytic {
                    conn = conn.without_derivatives();
                }
                let s = horosphere_structure(&metric, &xi);
                (metric, conn, Some(s), warp)
            } else {
                let s = linear_type_structure(&metric, &xi);
                let conn = apply_structure(&levi_civita(&metric), &s)?;
                (metric, conn, Some(s), warp)
            }
        }
        ExampleName::WarpedGeneric => {
            let warp = params.warp.warp();
            let (interval, fiber) = match params.fiber {
                Fiber::Flat => (range((-2.0, 2.0))?, MetricField::euclidean(flat_fiber("R^n")?)),
                Fiber::Sphere => (
                    range((0.5, 2.5))?,
                    MetricField::round_sphere_stereographic(Chart::cube("S^n stereographic", n, -1.0, 1.0)?),
                ),
            };
            let metric = strip(warped_metric(interval, &warp, &fiber)?.with_fd(fd));
            let product = strip(warped_metric(interval, &WarpFunction::constant(1.0), &fiber)?.with_fd(fd));
            (metric, levi_civita(&product), None, warp)
        }
    };

    let normal_axis = if name == ExampleName::ParallelHyperplanes { n } else { 0 };
    let xi = normal_field(&metric, normal_axis, params.analytic);
    let mut setup = Co1Setup::new(name.as_str(), metric.clone(), xi, connection)?;
    if let Some(s) = structure {
        setup = setup.with_structure(s);
    }
    let killing = match name {
        ExampleName::ParallelHyperplanes => Some(translation_model(&metric, n + 1, normal_axis, 0.0)?),
        ExampleName::Horospheres | ExampleName::LinearTypeHyperbolic => Some(translation_model(&metric, n + 1, 0, 0.0)?),
        ExampleName::ConcentricSpheres => Some(sphere_rotation_model(&metric, n, 1.0)?),
        ExampleName::WarpedGeneric => None,
    };
    Ok(BuiltExample {
        entry,
        n,
        params: params.clone(),
        setup,
        killing,
        warp,
    })
}

/// `ξ = ∂_axis`; the examples are written so that this coordinate field has unit length.
fn normal_field(metric: &MetricField, axis: usize, analytic: bool) -> VectorField {
    let field = VectorField::coordinate(metric.chart().clone(), axis).with_fd(metric.fd());
    if analytic {
        field
    } else {
        field.without_derivatives()
    }
}

/// Coordinate translations `∂x_k`, `k ≠ normal`, at the point with `x = 0`
/// and normal coordinate `start`. The normal flow is a coordinate shift.
fn translation_model(metric: &MetricField, dim: usize, normal: usize, start: f64) -> Result<KillingModel> {
    let chart = metric.chart().clone();
    let fields: Vec<_> = (0..dim)
        .filter(|&k| k != normal)
        .map(|k| VectorField::coordinate(chart.clone(), k))
        .collect();
    let k = fields.len();
    let mut base = vec![0.0; dim];
    base[normal] = start;
    let origin = base.clone();
    KillingModel::new(
        base,
        fields,
        vec![vec![vec![0.0; k]; k]; k],
        move |t| {
            let mut q = origin.clone();
            q[normal] += t;
            q
        },
        |_, v| v.clone(),
    )
}

/// Infinitesimal rotations of `R^{n+1}` in the `(x_i, x_{n+1})` planes, acting on
/// the stereographic fiber. At the south pole `u = 0` they span a complement of
/// the isotropy algebra, and `[m, m]` lies in the isotropy algebra.
fn sphere_rotation_model(metric: &MetricField, n: usize, r0: f64) -> Result<KillingModel> {
    let chart = metric.chart().clone();
    let dim = n + 1;
    let fields: Vec<_> = (0..n)
        .map(|i| {
            let eval: Eval<DVector<f64>> = Arc::new(move |p: &[f64]| Ok(rotation_field(&p[1..], i)));
            VectorField::from_eval(chart.clone(), eval, None, metric.fd())
        })
        .collect();
    let mut base = vec![0.0; dim];
    base[0] = r0;
    KillingModel::new(
        base,
        fields,
        vec![vec![vec![0.0; n]; n]; n],
        move |t| {
            let mut q = vec![0.0; dim];
            q[0] = r0 + t;
            q
        },
        |_, v| v.clone(),
    )
}

/// The rotation `e_i ↦ e_{n+1}, e_{n+1} ↦ −e_i` pushed through stereographic
/// projection from the north pole, as a vector on `(r, u)`.
fn rotation_field(u: &[f64], i: usize) -> DVector<f64> {
    let n = u.len();
    let s = 1.0 + u.iter().map(|x| x * x).sum::<f64>();
    // σ(u) = (2u, |u|² − 1) / (1 + |u|²)
    let mut x: Vec<f64> = u.iter().map(|v| 2.0 * v / s).collect();
    x.push((s - 2.0) / s);
    let mut w = vec![0.0; n + 1];
    w[n] = x[i];
    w[i] = -x[n];
    // π(x) = x_{1..n} / (1 − x_{n+1}); Dπ(x) w = w_{1..n}/(1 − x_{n+1}) + x_{1..n} w_{n+1}/(1 − x_{n+1})²
    let denom = 1.0 - x[n];
    let mut out = DVector::zeros(n + 1);
    for k in 0..n {
        out[k + 1] = w[k] / denom + x[k] * w[n] / (denom * denom);
    }
    out
}

/// `S^k_ij = g_ij ξ^k − ξ_i δ^k_j − ξ_j δ^k_i + ξ_i ξ_j ξ^k`.
pub fn horosphere_structure(metric: &MetricField, xi: &VectorField) -> TensorField {
    polynomial_structure(metric, xi, |g, up, down, k, i, j| {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        g[(i, j)] * up[k] - down[i] * d(k, j) - down[j] * d(k, i) + down[i] * down[j] * up[k]
    }, |g, up, down, dg, dup, ddown, k, i, j| {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        dg[(i, j)] * up[k] + g[(i, j)] * dup[k] - ddown[i] * d(k, j) - ddown[j] * d(k, i)
            + (ddown[i] * down[j] + down[i] * ddown[j]) * up[k]
            + down[i] * down[j] * dup[k]
    })
}

/// `S̄^k_ij = g_ij ξ^k − ξ_j δ^k_i`, that is `S̄_X Y = g(X,Y) ξ − g(Y,ξ) X`.
pub fn linear_type_structure(metric: &MetricField, xi: &VectorField) -> TensorField {
    polynomial_structure(metric, xi, |g, up, down, k, i, j| {
        let d = if k == i { 1.0 } else { 0.0 };
        g[(i, j)] * up[k] - down[j] * d
    }, |g, up, _, dg, dup, ddown, k, i, j| {
        let d = if k == i { 1.0 } else { 0.0 };
        dg[(i, j)] * up[k] + g[(i, j)] * dup[k] - ddown[j] * d
    })
}

type Value = fn(&DMatrix<f64>, &DVector<f64>, &DVector<f64>, usize, usize, usize) -> f64;
type Rate = fn(
    &DMatrix<f64>,
    &DVector<f64>,
    &DVector<f64>,
    &DMatrix<f64>,
    &DVector<f64>,
    &DVector<f64>,
    usize,
    usize,
    usize,
) -> f64;

/// A `(1,2)` field built pointwise from `g`, `ξ^k` and `ξ_k`, with its partials
/// by the product rule when `∂g` and the Jacobian of `ξ` are available.
fn polynomial_structure(metric: &MetricField, xi: &VectorField, value: Value, rate: Rate) -> TensorField {
    let dim = metric.dim();
    let (m, x) = (metric.clone(), xi.clone());
    let eval: Eval<Tensor> = Arc::new(move |p| {
        let g = m.at(p)?;
        let up = x.at(p)?;
        let down = &g * &up;
        Ok(Tensor::from_fn(dim, 3, |ix| value(&g, &up, &down, ix[0], ix[1], ix[2])))
    });
    let exact = metric.has_partials() && xi.has_jacobian();
    let d_eval: Option<Eval<Tensor>> = exact.then(|| {
        let (m, x) = (metric.clone(), xi.clone());
        Arc::new(move |p: &[f64]| {
            let g = m.at(p)?;
            let dg = m.partials(p)?;
            let up = x.at(p)?;
            let jx = x.jacobian(p)?;
            let down = &g * &up;
            let mut out = Tensor::zeros(dim, 4);
            for l in 0..dim {
                let dgl = DMatrix::from_fn(dim, dim, |a, b| dg[[l, a, b]]);
                let dup = jx.column(l).into_owned();
                let ddown = &dgl * &up + &g * &dup;
                for k in 0..dim {
                    for i in 0..dim {
                        for j in 0..dim {
                            out[[l, k, i, j]] = rate(&g, &up, &down, &dgl, &dup, &ddown, k, i, j);
                        }
                    }
                }
            }
            Ok(out)
        }) as Eval<Tensor>
    });
    TensorField::from_eval(metric.chart().clone(), 1, 2, eval, d_eval, exact, metric.fd())
}
