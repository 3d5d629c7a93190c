use serde::Serialize;

use crate::structure::LocalStructure;

use super::linear::reduce_over_d;
use super::{invert, Matrix, MatrixError, ResidueMatrix};

/// `U * A * V = diag(I_unit, x * I_x, 0)` with `U`, `V` invertible.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub u: Matrix,
    pub v: Matrix,
    pub unit_rank: usize,
    pub x_rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormalFormShape {
    pub rows: usize,
    pub cols: usize,
    pub unit_rank: usize,
    pub x_rank: usize,
}

impl NormalForm {
    pub fn shape(&self) -> NormalFormShape {
        NormalFormShape {
            rows: self.u.rows(),
            cols: self.v.rows(),
            unit_rank: self.unit_rank,
            x_rank: self.x_rank,
        }
    }

    /// The diagonal matrix `U * A * V`.
    pub fn diagonal(&self, ls: &LocalStructure) -> Matrix {
        diagonal(ls, self.u.rows(), self.v.rows(), self.unit_rank, self.x_rank)
    }
}

pub(crate) fn diagonal(ls: &LocalStructure, rows: usize, cols: usize, unit_rank: usize, x_rank: usize) -> Matrix {
    let ring = ls.ring();
    let mut d = Matrix::zeros(ring, rows, cols);
    for i in 0..unit_rank {
        d[(i, i)] = ring.one();
    }
    let x = ls.x().unwrap_or(ring.zero());
    for i in unit_rank..unit_rank + x_rank {
        d[(i, i)] = x;
    }
    d
}

pub fn normal_form(ls: &LocalStructure, a: &Matrix) -> Result<NormalForm, MatrixError> {
    let ring = a.ring().clone();
    let (rows, cols) = a.shape();
    let mut m = a.clone();
    let mut u = Matrix::identity(&ring, rows);
    let mut v = Matrix::identity(&ring, cols);

    // Clear rows and columns through unit pivots.
    let mut k = 0;
    while k < rows.min(cols) {
        let pivot = (k..rows)
            .flat_map(|i| (k..cols).map(move |j| (i, j)))
            .find(|&(i, j)| ring.is_unit(m[(i, j)]));
        let Some((pi, pj)) = pivot else { break };
        m.swap_rows(k, pi);
        u.swap_rows(k, pi);
        m.swap_cols(k, pj);
        v.swap_cols(k, pj);
        let s = ring
            .unit_inverse(m[(k, k)])
            .map_err(|e| MatrixError::Structure(e.into()))?;
        m.scale_row(k, s);
        u.scale_row(k, s);
        for i in 0..rows {
            let c = m[(i, k)];
            if i != k && c != ring.zero() {
                m.add_row_multiple(i, k, ring.neg(c));
                u.add_row_multiple(i, k, ring.neg(c));
            }
        }
        for j in 0..cols {
            let c = m[(k, j)];
            if j != k && c != ring.zero() {
                m.add_col_multiple(j, k, ring.neg(c));
                v.add_col_multiple(j, k, ring.neg(c));
            }
        }
        k += 1;
    }
    let unit_rank = k;

    // The rest lies in m; write it as lift(C) x and reduce C over d.
    let (sr, sc) = (rows - unit_rank, cols - unit_rank);
    let mut coeffs = Vec::with_capacity(sr * sc);
    for i in unit_rank..rows {
        for j in unit_rank..cols {
            let c = ls
                .x_coefficient(m[(i, j)])
                .ok_or_else(|| MatrixError::Inconsistent("non-unit entry outside the maximal ideal".into()))?;
            coeffs.push(c);
        }
    }
    let red = reduce_over_d(
        ls.d(),
        &ResidueMatrix {
            rows: sr,
            cols: sc,
            entries: coeffs,
        },
    );
    let mut u2 = Matrix::identity(&ring, rows);
    let mut v2 = Matrix::identity(&ring, cols);
    for i in 0..sr {
        for j in 0..sr {
            u2[(unit_rank + i, unit_rank + j)] = ls.lift(red.p.get(i, j));
        }
    }
    // x lift(t) = lift(sigma(t)) x, so Q passes through x as sigma^{-1}(Q).
    for i in 0..sc {
        for j in 0..sc {
            v2[(unit_rank + i, unit_rank + j)] = ls.lift(ls.sigma_inv(red.q.get(i, j)));
        }
    }
    let u = u2.mul(&u)?;
    let v = v.mul(&v2)?;
    let x_rank = if ls.x().is_some() { red.rank } else { 0 };

    let nf = NormalForm {
        u,
        v,
        unit_rank,
        x_rank,
    };
    if nf.u.mul(a)?.mul(&nf.v)? != nf.diagonal(ls) {
        return Err(MatrixError::Inconsistent("normal form failed verification".into()));
    }
    invert(ls, &nf.u)?;
    invert(ls, &nf.v)?;
    Ok(nf)
}
