//! Dense component arrays with equal extents on every axis.
//!
//! Components are stored row-major. Partial-derivative arrays put the
//! derivative index first: `d[m][..]` holds `∂_m` of the component `[..]`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;

/// Position of an index: contravariant (upper) or covariant (lower).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dim: usize,
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            data: vec![0.0; dim.pow(rank as u32)],
        }
    }

    pub fn from_vec(dim: usize, rank: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim.pow(rank as u32), "component count mismatch");
        Self { dim, rank, data }
    }

    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dim, rank);
        let mut idx = vec![0; rank];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            increment(&mut idx, dim);
        }
        t
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        Self::from_fn(n, 2, |i| m[(i[0], i[1])])
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.rank, 2);
        DMatrix::from_fn(self.dim, self.dim, |i, j| self[[i, j]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// Returns the array with its slots reordered: output index `k` is input slot `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        let mut src = vec![0; self.rank];
        Self::from_fn(self.dim, self.rank, |idx| {
            for (k, &p) in perm.iter().enumerate() {
                src[p] = idx[k];
            }
            self.get(&src)
        })
    }

    /// Contracts slot `slot` with a matrix: `out[.., a, ..] = Σ_k m[(a, k)] self[.., k, ..]`.
    pub fn transform_slot(&self, slot: usize, m: &DMatrix<f64>) -> Self {
        assert!(slot < self.rank);
        let d = self.dim;
        let stride = d.pow((self.rank - slot - 1) as u32);
        let outer = d.pow(slot as u32);
        let mut out = vec![0.0; self.data.len()];
        for o in 0..outer {
            for a in 0..d {
                for k in 0..d {
                    let c = m[(a, k)];
                    if c == 0.0 {
                        continue;
                    }
                    let src = (o * d + k) * stride;
                    let dst = (o * d + a) * stride;
                    for s in 0..stride {
                        out[dst + s] += c * self.data[src + s];
                    }
                }
            }
        }
        Self {
            dim: d,
            rank: self.rank,
            data: out,
        }
    }

    /// Re-expresses every slot in a frame. `frame` holds the frame vectors as
    /// columns; `coframe` holds the dual covectors as rows.
    pub fn to_frame(&self, variance: &[Variance], frame: &DMatrix<f64>, coframe: &DMatrix<f64>) -> Self {
        assert_eq!(variance.len(), self.rank);
        let frame_t = frame.transpose();
        variance
            .iter()
            .enumerate()
            .fold(self.clone(), |acc, (slot, v)| match v {
                Variance::Up => acc.transform_slot(slot, coframe),
                Variance::Down => acc.transform_slot(slot, &frame_t),
            })
    }

    /// Iterates over all multi-indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> {
        let (dim, rank) = (self.dim, self.rank);
        let total = self.data.len();
        let mut idx = vec![0; rank];
        (0..total).map(move |_| {
            let out = idx.clone();
            increment(&mut idx, dim);
            out
        })
    }
}

fn increment(idx: &mut [usize], dim: usize) {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < dim {
            return;
        }
        idx[i] = 0;
    }
}

impl<const R: usize> Index<[usize; R]> for Tensor {
    type Output = f64;
    fn index(&self, idx: [usize; R]) -> &f64 {
        &self.data[self.offset(&idx)]
    }
}

impl<const R: usize> IndexMut<[usize; R]> for Tensor {
    fn index_mut(&mut self, idx: [usize; R]) -> &mut f64 {
        let o = self.offset(&idx);
        &mut self.data[o]
    }
}

impl Add for &Tensor {
    type Output = Tensor;
    fn add(self, rhs: &Tensor) -> Tensor {
        assert_eq!((self.dim, self.rank), (rhs.dim, rhs.rank));
        Tensor {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Tensor {
    type Output = Tensor;
    fn sub(self, rhs: &Tensor) -> Tensor {
        assert_eq!((self.dim, self.rank), (rhs.dim, rhs.rank));
        Tensor {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &Tensor {
    type Output = Tensor;
    fn mul(self, c: f64) -> Tensor {
        self.scale(c)
    }
}
