//! Pointwise algebra of cohomogeneity-one structures.
//!
//! `V = span(ξ) ⊕ D` with `dim D = n`, orthonormal basis `e_0 = ξ, e_1..e_n`.
//! An element of `S(V)` is an array `S_abc` with
//!
//! ```text
//! S_abc + S_acb = 0   (a ≥ 1)        S_00c = 0
//! ```
//!
//! It splits into four blocks, each further split under `SO(n)`:
//!
//! | block | components            | pieces                                         |
//! |-------|-----------------------|------------------------------------------------|
//! | `T`   | `S_ijk`               | `T1` (trace), `T3` (alternating), `T2` (rest)  |
//! | `II`  | `S_i0k = −S_ik0`      | `II1` trace, `II2` sym. trace-free, `II3` skew |
//! | `Z`   | `S_0jk`               | `Z1`, `Z2`, `Z3` as for `II`                   |
//! | `SU`  | `S_0j0`               | `SU1`                                          |
//!
//! Latin indices run over `1..=n`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::tensor::Tensor;
use crate::{Error, Result};

/// Membership tolerance, relative to `max(1, max |S_abc|)`.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Default classification threshold, relative to the input norm.
pub const CLASSIFY_TOL: f64 = 1e-8;

/// Norms below this are never reported, whatever the relative threshold.
const ABSOLUTE_FLOOR: f64 = 1e-12;

/// A `(0,3)` array over `V` in an orthonormal basis with index 0 along `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicStructure {
    n: usize,
    data: Tensor,
}

impl AlgebraicStructure {
    pub fn zeros(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            data: Tensor::zeros(n + 1, 3),
        })
    }

    pub fn from_tensor(data: Tensor) -> Result<Self> {
        if data.rank() != 3 {
            return Err(Error::Config(format!("structure arrays have rank 3, got {}", data.rank())));
        }
        let n = data.dim().saturating_sub(1);
        check_n(n)?;
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            data: Tensor::from_fn(n + 1, 3, |i| f(i[0], i[1], i[2])),
        })
    }

    /// Dimension of `D`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tensor(&self) -> &Tensor {
        &self.data
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[[a, b, c]]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[[a, b, c]] = v;
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.max_abs()
    }

    /// Frobenius pairing.
    pub fn dot(&self, other: &AlgebraicStructure) -> f64 {
        self.data.data().iter().zip(other.data.data()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.scale(c),
        }
    }

    pub fn add(&self, other: &AlgebraicStructure) -> Self {
        Self {
            n: self.n,
            data: &self.data + &other.data,
        }
    }

    pub fn sub(&self, other: &AlgebraicStructure) -> Self {
        Self {
            n: self.n,
            data: &self.data - &other.data,
        }
    }

    /// Largest membership violation and where it occurs.
    pub fn worst_violation(&self) -> (f64, [usize; 3], &'static str) {
        let d = self.n + 1;
        let mut worst = (0.0, [0, 0, 0], "S_abc + S_acb = 0");
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if a >= 1 {
                        let v = (self.get(a, b, c) + self.get(a, c, b)).abs();
                        if v > worst.0 {
                            worst = (v, [a, b, c], "S_abc + S_acb = 0");
                        }
                    }
                }
            }
        }
        for c in 0..d {
            let v = self.get(0, 0, c).abs();
            if v > worst.0 {
                worst = (v, [0, 0, c], "S_00c = 0");
            }
        }
        worst
    }

    /// The nearest element of `S(V)`: skew part in the last two slots for
    /// `a ≥ 1`, and `S_00c` cleared.
    pub fn project_to_membership(&self) -> Self {
        let mut out = self.clone();
        let d = self.n + 1;
        for a in 1..d {
            for b in 0..d {
                for c in 0..d {
                    out.set(a, b, c, 0.5 * (self.get(a, b, c) - self.get(a, c, b)));
                }
            }
        }
        for c in 0..d {
            out.set(0, 0, c, 0.0);
        }
        out
    }

    /// `(Q·S)_abc = R_aa' R_bb' R_cc' S_a'b'c'` with `R = diag(1, Q)`.
    pub fn rotate(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.n || q.ncols() != self.n {
            return Err(Error::Config(format!(
                "rotation is {}x{}, D has dimension {}",
                q.nrows(),
                q.ncols(),
                self.n
            )));
        }
        let mut r = DMatrix::identity(self.n + 1, self.n + 1);
        r.view_mut((1, 1), (self.n, self.n)).copy_from(q);
        let data = (0..3).fold(self.data.clone(), |t, slot| t.transform_slot(slot, &r));
        Ok(Self { n: self.n, data })
    }

    /// `M_ik = S_i0k`.
    pub fn ii_block(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, k| self.get(i + 1, 0, k + 1))
    }

    /// `M_jk = S_0jk`.
    pub fn z_block(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |j, k| self.get(0, j + 1, k + 1))
    }

    /// `η_j = S_0j0`.
    pub fn su_vector(&self) -> Vec<f64> {
        (1..=self.n).map(|j| self.get(0, j, 0)).collect()
    }

    /// `θ_k = Σ_i S_iik / (n − 1)`.
    pub fn theta(&self) -> Vec<f64> {
        let n = self.n;
        (1..=n)
            .map(|k| (1..=n).map(|i| self.get(i, i, k)).sum::<f64>() / (n as f64 - 1.0))
            .collect()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension of D must be at least 2, got {n}")));
    }
    Ok(())
}

/// Checks membership in `S(V)` within [`MEMBERSHIP_TOL`].
pub fn validate(s: &AlgebraicStructure) -> Result<()> {
    validate_within(s, MEMBERSHIP_TOL)
}

/// Checks membership with a tolerance relative to `max(1, max |S_abc|)`.
pub fn validate_within(s: &AlgebraicStructure, tol: f64) -> Result<()> {
    let (violation, [a, b, c], rule) = s.worst_violation();
    if violation > tol * s.max_abs().max(1.0) {
        return Err(Error::Membership {
            a,
            b,
            c,
            rule,
            violation,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubmoduleId {
    T1,
    T2,
    T3,
    II1,
    II2,
    II3,
    Z1,
    Z2,
    Z3,
    SU1,
    T,
    II,
    Z,
    SU,
}

impl SubmoduleId {
    pub const FINE: [SubmoduleId; 10] = [
        Self::T1,
        Self::T2,
        Self::T3,
        Self::II1,
        Self::II2,
        Self::II3,
        Self::Z1,
        Self::Z2,
        Self::Z3,
        Self::SU1,
    ];

    pub const COARSE: [SubmoduleId; 4] = [Self::T, Self::II, Self::Z, Self::SU];

    pub fn is_fine(self) -> bool {
        !Self::COARSE.contains(&self)
    }

    pub fn coarse(self) -> SubmoduleId {
        use SubmoduleId::*;
        match self {
            T1 | T2 | T3 | T => T,
            II1 | II2 | II3 | II => II,
            Z1 | Z2 | Z3 | Z => Z,
            SU1 | SU => SU,
        }
    }

    pub fn fine_parts(self) -> Vec<SubmoduleId> {
        if self.is_fine() {
            vec![self]
        } else {
            Self::FINE.into_iter().filter(|f| f.coarse() == self).collect()
        }
    }

    pub fn as_str(self) -> &'static str {
        use SubmoduleId::*;
        match self {
            T1 => "T1",
            T2 => "T2",
            T3 => "T3",
            II1 => "II1",
            II2 => "II2",
            II3 => "II3",
            Z1 => "Z1",
            Z2 => "Z2",
            Z3 => "Z3",
            SU1 => "SU1",
            T => "T",
            II => "II",
            Z => "Z",
            SU => "SU",
        }
    }
}

impl fmt::Display for SubmoduleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubmoduleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::FINE
            .into_iter()
            .chain(Self::COARSE)
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown submodule {s:?}")))
    }
}

/// Orthogonal projection onto a submodule. The input must lie in `S(V)`.
pub fn project(s: &AlgebraicStructure, id: SubmoduleId) -> Result<AlgebraicStructure> {
    validate(s)?;
    Ok(project_member(s, id))
}

fn project_member(s: &AlgebraicStructure, id: SubmoduleId) -> AlgebraicStructure {
    use SubmoduleId::*;
    let n = s.n;
    let mut out = AlgebraicStructure {
        n,
        data: Tensor::zeros(n + 1, 3),
    };
    match id {
        T | II | Z | SU => {
            for part in id.fine_parts() {
                out = out.add(&project_member(s, part));
            }
        }
        T1 | T2 | T3 => {
            let t1 = t1_part(s);
            let t3 = t3_part(s);
            for i in 1..=n {
                for j in 1..=n {
                    for k in 1..=n {
                        let v = match id {
                            T1 => t1(i, j, k),
                            T3 => t3(i, j, k),
                            _ => s.get(i, j, k) - t1(i, j, k) - t3(i, j, k),
                        };
                        out.set(i, j, k, v);
                    }
                }
            }
        }
        II1 | II2 | II3 => {
            let m = matrix_part(&s.ii_block(), id);
            for i in 1..=n {
                for k in 1..=n {
                    let v = m[(i - 1, k - 1)];
                    out.set(i, 0, k, v);
                    out.set(i, k, 0, -v);
                }
            }
        }
        Z1 | Z2 | Z3 => {
            let m = matrix_part(&s.z_block(), id);
            for j in 1..=n {
                for k in 1..=n {
                    out.set(0, j, k, m[(j - 1, k - 1)]);
                }
            }
        }
        SU1 => {
            for j in 1..=n {
                out.set(0, j, 0, s.get(0, j, 0));
            }
        }
    }
    out
}

/// `δ_ij θ_k − δ_ik θ_j`.
fn t1_part(s: &AlgebraicStructure) -> impl Fn(usize, usize, usize) -> f64 {
    let theta = s.theta();
    move |i, j, k| {
        let mut v = 0.0;
        if i == j {
            v += theta[k - 1];
        }
        if i == k {
            v -= theta[j - 1];
        }
        v
    }
}

/// `(S_ijk + S_jki + S_kij) / 3`.
fn t3_part(s: &AlgebraicStructure) -> impl Fn(usize, usize, usize) -> f64 + '_ {
    move |i, j, k| (s.get(i, j, k) + s.get(j, k, i) + s.get(k, i, j)) / 3.0
}

fn matrix_part(m: &DMatrix<f64>, id: SubmoduleId) -> DMatrix<f64> {
    use SubmoduleId::*;
    let n = m.nrows();
    let trace = DMatrix::identity(n, n) * (m.trace() / n as f64);
    let sym = (m + m.transpose()) * 0.5;
    match id {
        II1 | Z1 => trace,
        II2 | Z2 => sym - trace,
        _ => (m - m.transpose()) * 0.5,
    }
}

/// Parameter of a parameterized submodule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Param {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            Param::Scalar(v) => Some(*v),
            Param::Vector(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentNorm {
    pub id: SubmoduleId,
    pub norm: f64,
    /// `θ` for `T1`, `λ` for `II1` and `Z1`, `η` for `SU1`.
    pub param: Option<Param>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub norm: f64,
    pub tolerance: f64,
    /// All ten fine submodules, in a fixed order.
    pub components: Vec<ComponentNorm>,
}

impl DecompositionReport {
    /// The threshold a component norm must exceed to be reported.
    pub fn threshold(&self) -> f64 {
        (self.tolerance * self.norm).max(ABSOLUTE_FLOOR)
    }

    /// Components above the threshold.
    pub fn present(&self) -> Vec<&ComponentNorm> {
        let cut = self.threshold();
        self.components.iter().filter(|c| c.norm > cut).collect()
    }

    pub fn present_ids(&self) -> Vec<SubmoduleId> {
        self.present().into_iter().map(|c| c.id).collect()
    }

    pub fn component(&self, id: SubmoduleId) -> Option<&ComponentNorm> {
        self.components.iter().find(|c| c.id == id)
    }

    /// Norm of a coarse or fine block.
    pub fn block_norm(&self, id: SubmoduleId) -> f64 {
        id.fine_parts()
            .iter()
            .filter_map(|f| self.component(*f))
            .map(|c| c.norm * c.norm)
            .sum::<f64>()
            .sqrt()
    }
}

/// Projects onto the ten fine submodules. A component is present when its
/// norm exceeds `max(tol·‖S‖, 1e-12)`.
pub fn classify(s: &AlgebraicStructure, tol: f64) -> Result<DecompositionReport> {
    use SubmoduleId::*;
    validate(s)?;
    let n = s.n;
    let components = SubmoduleId::FINE
        .into_iter()
        .map(|id| {
            let norm = project_member(s, id).norm();
            let param = match id {
                T1 => Some(Param::Vector(s.theta())),
                II1 => Some(Param::Scalar(s.ii_block().trace() / n as f64)),
                Z1 => Some(Param::Scalar(s.z_block().trace() / n as f64)),
                SU1 => Some(Param::Vector(s.su_vector())),
                _ => None,
            };
            ComponentNorm { id, norm, param }
        })
        .collect();
    Ok(DecompositionReport {
        n,
        norm: s.norm(),
        tolerance: tol,
        components,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub n: usize,
    pub t: usize,
    pub t1: usize,
    pub t2: usize,
    pub t3: usize,
    pub ii: usize,
    pub ii1: usize,
    pub ii2: usize,
    pub ii3: usize,
    pub z: usize,
    pub z1: usize,
    pub z2: usize,
    pub z3: usize,
    pub su1: usize,
    pub total: usize,
}

impl DimensionTable {
    pub fn get(&self, id: SubmoduleId) -> usize {
        use SubmoduleId::*;
        match id {
            T1 => self.t1,
            T2 => self.t2,
            T3 => self.t3,
            II1 => self.ii1,
            II2 => self.ii2,
            II3 => self.ii3,
            Z1 => self.z1,
            Z2 => self.z2,
            Z3 => self.z3,
            SU1 | SU => self.su1,
            T => self.t,
            II => self.ii,
            Z => self.z,
        }
    }
}

pub fn submodule_dims(n: usize) -> Result<DimensionTable> {
    check_n(n)?;
    let t = n * n * (n - 1) / 2;
    let t1 = n;
    let t3 = n * (n - 1) * (n - 2) / 6;
    let sq = n * n;
    let sym = n * (n + 1) / 2 - 1;
    let skew = n * (n - 1) / 2;
    Ok(DimensionTable {
        n,
        t,
        t1,
        t2: t - t1 - t3,
        t3,
        ii: sq,
        ii1: 1,
        ii2: sym,
        ii3: skew,
        z: sq,
        z1: 1,
        z2: sym,
        z3: skew,
        su1: n,
        total: t + 2 * sq + n,
    })
}

/// Seeded uniform entries in `[-1, 1]`, then made a member of `S(V)` exactly.
pub fn random_structure(n: usize, seed: u64) -> Result<AlgebraicStructure> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = AlgebraicStructure::from_fn(n, |_, _, _| rng.gen_range(-1.0..=1.0))?;
    Ok(raw.project_to_membership())
}

/// The `T1` element with the given `θ`.
pub fn t1_template(theta: &[f64]) -> Result<AlgebraicStructure> {
    let n = theta.len();
    AlgebraicStructure::from_fn(n, |i, j, k| {
        if i == 0 || j == 0 || k == 0 {
            return 0.0;
        }
        let mut v = 0.0;
        if i == j {
            v += theta[k - 1];
        }
        if i == k {
            v -= theta[j - 1];
        }
        v
    })
}
