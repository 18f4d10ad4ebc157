//! Small dense and sparse linear algebra: CSR symmetric matrices, diagonally
//! preconditioned conjugate gradients, dense Cholesky and a cyclic Jacobi
//! eigensolver.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num;

/// Square sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(col, value)` lists; duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            offsets.push(cols.len());
        }
        Self {
            n,
            offsets,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        self.cols[a..b]
            .iter()
            .copied()
            .zip(self.vals[a..b].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).filter(|&(c, _)| c == i).map(|(_, v)| v).sum())
            .collect()
    }

    pub fn mul_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.offsets[i]..self.offsets[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            out[i] = s;
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                d[(i, c)] += v;
            }
        }
        d
    }
}

/// Outcome of a single CG solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients for SPD `a`. Stops when
/// `‖b − a x‖ ≤ tol ‖b‖`.
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<CgSolution> {
    let n = a.dim();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let bnorm = num::sqrt(dot(b, b));
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 0..max_iter {
        a.mul_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Indefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = num::sqrt(dot(&r, &r)) / bnorm;
        if res <= tol {
            return Ok(CgSolution {
                x,
                iterations: it + 1,
                relative_residual: res,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        residual: res,
        iterations: max_iter,
    })
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, o) in dst.iter_mut().zip(orow) {
                    *d += a * o;
                }
            }
        }
        out
    }

    /// Lower Cholesky factor; `Error::Indefinite` when a pivot is not positive.
    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.data[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return Err(Error::Indefinite);
            }
            let d = num::sqrt(d);
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Cholesky { n, l })
    }
}

/// Dense Cholesky factorisation `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.n;
        let mut inv = DenseMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
/// `vectors[(i, k)]` is component `i` of eigenvector `k`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi rotations until the off-diagonal mass is below `1e-14`
/// of the Frobenius norm.
pub fn symmetric_eigen(a: &DenseMatrix) -> SymmetricEigen {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let frob: f64 = num::sqrt(m.data.iter().map(|x| x * x).sum::<f64>());
    let target = 1e-14 * frob.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if num::sqrt(2.0 * off) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + num::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + num::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / num::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, k)] = v[(i, src)];
        }
    }
    SymmetricEigen { values, vectors }
}
