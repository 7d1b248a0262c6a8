//! Central finite differences on chart domains.

use serde::{Deserialize, Serialize};

use crate::geometry::Chart;
use crate::tensor::Tensor;
use crate::Result;

/// Step sizes for central differences.
///
/// `first` differentiates fields that are evaluated in closed form; `nested`
/// differentiates fields whose evaluation already involves a difference quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSteps {
    pub first: f64,
    pub nested: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self {
            first: 1e-5,
            nested: 1e-4,
        }
    }
}

impl FdSteps {
    pub fn for_field(&self, exact: bool) -> f64 {
        if exact {
            self.first
        } else {
            self.nested
        }
    }
}

/// Partial derivatives of an array-valued field, derivative index first.
pub fn partials<F>(chart: &Chart, p: &[f64], h: f64, f: F) -> Result<Tensor>
where
    F: Fn(&[f64]) -> Result<Tensor>,
{
    chart.check_stencil(p, h)?;
    let dim = chart.dim();
    let mut q = p.to_vec();
    let mut rows: Vec<Tensor> = Vec::with_capacity(dim);
    for m in 0..dim {
        q[m] = p[m] + h;
        let plus = f(&q)?;
        q[m] = p[m] - h;
        let minus = f(&q)?;
        q[m] = p[m];
        rows.push((&plus - &minus).scale(0.5 / h));
    }
    let rank = rows[0].rank() + 1;
    let mut data = Vec::with_capacity(dim.pow(rank as u32));
    for r in &rows {
        data.extend_from_slice(r.data());
    }
    Ok(Tensor::from_vec(dim, rank, data))
}

/// Central difference of a scalar function of one variable.
pub fn derivative<F>(t: f64, h: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
}
