//! Brute-force decomposition oracle shared by the integration tests.
//!
//! Each submodule is described by linear constraints on the raw `(n+1)³`
//! coefficient vector (or by an explicit spanning set), and its orthogonal
//! projector is built from a numerically computed basis.

#![allow(dead_code)]

use co1as::decomp::SubmoduleId;
use nalgebra::{DMatrix, DVector};

pub fn idx(n: usize, a: usize, b: usize, c: usize) -> usize {
    let d = n + 1;
    (a * d + b) * d + c
}

fn row(n: usize, terms: &[((usize, usize, usize), f64)]) -> Vec<f64> {
    let d = n + 1;
    let mut r = vec![0.0; d * d * d];
    for &((a, b, c), w) in terms {
        r[idx(n, a, b, c)] += w;
    }
    r
}

/// Constraints defining `S(V)`.
fn membership(n: usize) -> Vec<Vec<f64>> {
    let d = n + 1;
    let mut rows = Vec::new();
    for a in 1..d {
        for b in 0..d {
            for c in 0..d {
                rows.push(row(n, &[((a, b, c), 1.0), ((a, c, b), 1.0)]));
            }
        }
    }
    for c in 0..d {
        rows.push(row(n, &[((0, 0, c), 1.0)]));
    }
    rows
}

/// Forces every component outside `keep` to vanish.
fn support(n: usize, keep: impl Fn(usize, usize, usize) -> bool) -> Vec<Vec<f64>> {
    let d = n + 1;
    let mut rows = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                if !keep(a, b, c) {
                    rows.push(row(n, &[((a, b, c), 1.0)]));
                }
            }
        }
    }
    rows
}

fn t_block(a: usize, b: usize, c: usize) -> bool {
    a >= 1 && b >= 1 && c >= 1
}

fn ii_block(a: usize, b: usize, c: usize) -> bool {
    a >= 1 && ((b == 0) ^ (c == 0))
}

fn z_block(a: usize, b: usize, c: usize) -> bool {
    a == 0 && b >= 1 && c >= 1
}

fn su_block(a: usize, b: usize, c: usize) -> bool {
    a == 0 && b >= 1 && c == 0
}

/// Orthonormal basis (columns) of the null space of the constraint rows.
pub fn null_space(n: usize, rows: &[Vec<f64>]) -> DMatrix<f64> {
    let dim = (n + 1).pow(3);
    if rows.is_empty() {
        return DMatrix::identity(dim, dim);
    }
    let c = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let gram = c.transpose() * &c;
    let eig = gram.symmetric_eigen();
    let cols: Vec<DVector<f64>> = (0..dim)
        .filter(|&i| eig.eigenvalues[i].abs() < 1e-9)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the span of the given vectors.
pub fn span(vectors: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    if vectors.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    let m = DMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i]);
    let svd = m.svd(true, false);
    let u = svd.u.unwrap();
    let cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-9)
        .map(|i| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of a submodule, built independently of the library.
pub fn basis(n: usize, id: SubmoduleId) -> DMatrix<f64> {
    use SubmoduleId::*;
    let d = n + 1;
    let dim = d * d * d;
    let mut rows = membership(n);
    match id {
        T => rows.extend(support(n, t_block)),
        II => rows.extend(support(n, ii_block)),
        Z => rows.extend(support(n, z_block)),
        SU | SU1 => rows.extend(support(n, su_block)),
        T1 => {
            // span of g(X,Y)θ(Z) − g(X,Z)θ(Y) over θ = e_m
            let vs: Vec<Vec<f64>> = (1..d)
                .map(|m| {
                    let mut v = vec![0.0; dim];
                    for i in 1..d {
                        v[idx(n, i, i, m)] += 1.0;
                        v[idx(n, i, m, i)] -= 1.0;
                    }
                    v
                })
                .collect();
            return span(&vs, dim);
        }
        T2 => {
            rows.extend(support(n, t_block));
            for k in 1..d {
                rows.push(row(n, &(1..d).map(|i| ((i, i, k), 1.0)).collect::<Vec<_>>()));
            }
            for i in 1..d {
                for j in 1..d {
                    for k in 1..d {
                        rows.push(row(n, &[((i, j, k), 1.0), ((j, k, i), 1.0), ((k, i, j), 1.0)]));
                    }
                }
            }
        }
        T3 => {
            rows.extend(support(n, t_block));
            for i in 1..d {
                for j in 1..d {
                    for k in 1..d {
                        rows.push(row(n, &[((i, j, k), 1.0), ((j, i, k), 1.0)]));
                    }
                }
            }
        }
        II1 => {
            let mut v = vec![0.0; dim];
            for i in 1..d {
                v[idx(n, i, 0, i)] = 1.0;
                v[idx(n, i, i, 0)] = -1.0;
            }
            return span(&[v], dim);
        }
        Z1 => {
            let mut v = vec![0.0; dim];
            for i in 1..d {
                v[idx(n, 0, i, i)] = 1.0;
            }
            return span(&[v], dim);
        }
        II2 | II3 | Z2 | Z3 => {
            let (block, first): (fn(usize, usize, usize) -> bool, fn(usize, usize) -> (usize, usize, usize)) =
                if matches!(id, II2 | II3) {
                    (ii_block, |i, k| (i, 0, k))
                } else {
                    (z_block, |j, k| (0, j, k))
                };
            rows.extend(support(n, block));
            let sign = if matches!(id, II2 | Z2) { -1.0 } else { 1.0 };
            for i in 1..d {
                for k in 1..d {
                    rows.push(row(n, &[(first(i, k), 1.0), (first(k, i), sign)]));
                }
            }
            if matches!(id, II2 | Z2) {
                rows.push(row(n, &(1..d).map(|i| (first(i, i), 1.0)).collect::<Vec<_>>()));
            }
        }
    }
    null_space(n, &rows)
}

pub fn membership_basis(n: usize) -> DMatrix<f64> {
    null_space(n, &membership(n))
}

/// `P = B Bᵀ` applied to a flat coefficient vector.
pub fn project_flat(basis: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let x = DVector::from_column_slice(v);
    let coeffs = basis.transpose() * x;
    (basis * coeffs).as_slice().to_vec()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// A uniformly random rotation of `R^n` from a seeded generator.
pub fn random_rotation(n: usize, seed: u64) -> DMatrix<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    if q.determinant() < 0.0 {
        let col = -q.column(0);
        q.set_column(0, &col);
    }
    q
}
