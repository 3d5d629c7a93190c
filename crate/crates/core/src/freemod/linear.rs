//! Linear algebra over the residue field and over its prime field, plus the
//! exact solver for additive systems over the ring.

use crate::rings::RingElem;
use crate::scalars::{FieldElem, GfField};
use crate::structure::LocalStructure;

use super::{MatrixError, ResidueMatrix};

/// Dense matrix over `F_p` with entries in `0..p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduced row echelon form of `[self | rhs]`; returns the pivot columns.
    fn rref(&mut self, rhs: &mut [u32]) -> Vec<usize> {
        let p = self.p as u64;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&i| self.get(i, col) != 0) else {
                continue;
            };
            if piv != row {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, row * self.cols + j);
                }
                rhs.swap(piv, row);
            }
            let s = inv_mod(self.get(row, col), self.p) as u64;
            for j in col..self.cols {
                let v = self.get(row, j) as u64 * s % p;
                self.data[row * self.cols + j] = v as u32;
            }
            rhs[row] = (rhs[row] as u64 * s % p) as u32;
            for i in 0..self.rows {
                let f = self.get(i, col) as u64;
                if i == row || f == 0 {
                    continue;
                }
                for j in col..self.cols {
                    let v = (self.get(i, j) as u64 + p * p - f * self.get(row, j) as u64) % p;
                    self.data[i * self.cols + j] = v as u32;
                }
                rhs[i] = ((rhs[i] as u64 + p * p - f * rhs[row] as u64) % p) as u32;
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// A particular solution of `A z = b` and a basis of the kernel of `A`.
    pub fn solve(&self, b: &[u32]) -> Option<(Vec<u32>, Vec<Vec<u32>>)> {
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        let pivots = m.rref(&mut rhs);
        if rhs[pivots.len()..].iter().any(|&v| v != 0) {
            return None;
        }
        let mut z = vec![0u32; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            z[c] = rhs[r];
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let kernel = free
            .iter()
            .map(|&f| {
                let mut v = vec![0u32; self.cols];
                v[f] = 1;
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = (self.p - m.get(r, f)) % self.p;
                }
                v
            })
            .collect();
        Some((z, kernel))
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rhs = vec![0; self.rows];
        m.rref(&mut rhs).len()
    }
}

pub(crate) struct Reduction {
    pub p: ResidueMatrix,
    pub q: ResidueMatrix,
    pub rank: usize,
}

fn identity_d(n: usize) -> ResidueMatrix {
    let mut m = ResidueMatrix {
        rows: n,
        cols: n,
        entries: vec![FieldElem::ZERO; n * n],
    };
    for i in 0..n {
        m.entries[i * n + i] = FieldElem::ONE;
    }
    m
}

impl ResidueMatrix {
    fn at(&mut self, i: usize, j: usize) -> &mut FieldElem {
        &mut self.entries[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn row_axpy(&mut self, d: &GfField, target: usize, source: usize, c: FieldElem) {
        for j in 0..self.cols {
            let v = d.mul(c, self.get(source, j));
            *self.at(target, j) = d.add(self.get(target, j), v);
        }
    }

    fn col_axpy(&mut self, d: &GfField, target: usize, source: usize, c: FieldElem) {
        for i in 0..self.rows {
            let v = d.mul(self.get(i, source), c);
            *self.at(i, target) = d.add(self.get(i, target), v);
        }
    }

    fn scale_row(&mut self, d: &GfField, row: usize, c: FieldElem) {
        for j in 0..self.cols {
            *self.at(row, j) = d.mul(c, self.get(row, j));
        }
    }
}

/// Invertible `P`, `Q` with `P C Q = diag(I_rank, 0)`.
pub(crate) fn reduce_over_d(d: &GfField, c: &ResidueMatrix) -> Reduction {
    let mut m = c.clone();
    let mut p = identity_d(c.rows);
    let mut q = identity_d(c.cols);
    let mut k = 0;
    while k < m.rows.min(m.cols) {
        let Some((pi, pj)) = (k..m.rows)
            .flat_map(|i| (k..m.cols).map(move |j| (i, j)))
            .find(|&(i, j)| !m.get(i, j).is_zero())
        else {
            break;
        };
        m.swap_rows(k, pi);
        p.swap_rows(k, pi);
        m.swap_cols(k, pj);
        q.swap_cols(k, pj);
        let s = d.inv(m.get(k, k)).expect("nonzero pivot");
        m.scale_row(d, k, s);
        p.scale_row(d, k, s);
        for i in 0..m.rows {
            let f = m.get(i, k);
            if i != k && !f.is_zero() {
                let c = d.neg(f);
                m.row_axpy(d, i, k, c);
                p.row_axpy(d, i, k, c);
            }
        }
        for j in 0..m.cols {
            let f = m.get(k, j);
            if j != k && !f.is_zero() {
                let c = d.neg(f);
                m.col_axpy(d, j, k, c);
                q.col_axpy(d, j, k, c);
            }
        }
        k += 1;
    }
    Reduction { p, q, rank: k }
}

pub(crate) fn invert_over_d(d: &GfField, a: &ResidueMatrix) -> Option<ResidueMatrix> {
    if a.rows != a.cols {
        return None;
    }
    let red = reduce_over_d(d, a);
    if red.rank != a.rows {
        return None;
    }
    // P A Q = I, so A^{-1} = Q P.
    let n = a.rows;
    let mut out = ResidueMatrix {
        rows: n,
        cols: n,
        entries: vec![FieldElem::ZERO; n * n],
    };
    for i in 0..n {
        for j in 0..n {
            let mut acc = FieldElem::ZERO;
            for k in 0..n {
                acc = d.add(acc, d.mul(red.q.get(i, k), red.p.get(k, j)));
            }
            *out.at(i, j) = acc;
        }
    }
    Some(out)
}

fn scalar_multiple(ls: &LocalStructure, a: u32, z: RingElem) -> RingElem {
    let r = ls.ring();
    (0..a).fold(r.zero(), |acc, _| r.add(acc, z))
}

/// Exact solution of `L(z) = target` for an additive map `L: R^n -> R^m`.
///
/// Stage one solves the residue system over `F_p`. Stage two corrects the
/// remaining error in `m = dx`, using both the residue kernel and unknowns of
/// the form `lift(c) x`. Every solution of `L(z) = target` decomposes this way,
/// so `None` means the system has no solution.
pub fn solve_additive(
    ls: &LocalStructure,
    unknowns: usize,
    target: &[RingElem],
    map: impl Fn(&[RingElem]) -> Vec<RingElem>,
) -> Result<Option<Vec<RingElem>>, MatrixError> {
    let ring = ls.ring();
    let d = ls.d();
    let p = d.characteristic();
    let k = d.degree() as usize;
    let eqs = target.len();
    let basis: Vec<FieldElem> = (0..k).map(|j| FieldElem(p.pow(j as u32))).collect();
    let from_fp = |coords: &[u32]| d.from_coeffs(coords).expect("coordinates in range");

    let eval = |z: &[RingElem]| -> Result<Vec<RingElem>, MatrixError> {
        let out = map(z);
        if out.len() != eqs {
            return Err(MatrixError::ShapeMismatch(format!(
                "map returned {} values for {eqs} equations",
                out.len()
            )));
        }
        Ok(out)
    };
    let unit_vector = |u: usize, value: RingElem| {
        let mut z = vec![ring.zero(); unknowns];
        z[u] = value;
        z
    };
    let residue_coords = |v: &[RingElem]| -> Vec<u32> { v.iter().flat_map(|&e| d.coeffs(ls.project(e))).collect() };
    let x_coords = |v: &[RingElem]| -> Result<Vec<u32>, MatrixError> {
        let mut out = Vec::with_capacity(v.len() * k);
        for &e in v {
            let c = ls.x_coefficient(e).ok_or_else(|| {
                MatrixError::Inconsistent(format!("{} expected in the maximal ideal", ring.format_elem(e)))
            })?;
            out.extend(d.coeffs(c));
        }
        Ok(out)
    };
    let lift_coords =
        |coords: &[u32]| -> Vec<RingElem> { coords.chunks(k.max(1)).map(|c| ls.lift(from_fp(c))).collect() };

    // Stage one.
    let mut a1 = FpMatrix::zeros(p, eqs * k, unknowns * k);
    for u in 0..unknowns {
        for (j, &b) in basis.iter().enumerate() {
            let col = residue_coords(&eval(&unit_vector(u, ls.lift(b)))?);
            for (i, v) in col.into_iter().enumerate() {
                a1.set(i, u * k + j, v);
            }
        }
    }
    let Some((z0_coords, kernel)) = a1.solve(&residue_coords(target)) else {
        return Ok(None);
    };
    let z0 = lift_coords(&z0_coords);
    let image0 = eval(&z0)?;
    let error: Vec<RingElem> = target.iter().zip(&image0).map(|(&t, &y)| ring.sub(t, y)).collect();

    let mut z = z0;
    if let Some(_x) = ls.x() {
        // Stage two.
        let lifted_kernel: Vec<Vec<RingElem>> = kernel.iter().map(|n| lift_coords(n)).collect();
        let mut columns = Vec::new();
        for n in &lifted_kernel {
            columns.push(x_coords(&eval(n)?)?);
        }
        for u in 0..unknowns {
            for &b in &basis {
                columns.push(x_coords(&eval(&unit_vector(u, ls.times_x(b)))?)?);
            }
        }
        let mut a2 = FpMatrix::zeros(p, eqs * k, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                a2.set(i, c, v);
            }
        }
        let Some((alpha, _)) = a2.solve(&x_coords(&error)?) else {
            return Ok(None);
        };
        let (alpha_kernel, beta) = alpha.split_at(lifted_kernel.len());
        for (a, n) in alpha_kernel.iter().zip(&lifted_kernel) {
            for (zi, &ni) in z.iter_mut().zip(n) {
                *zi = ring.add(*zi, scalar_multiple(ls, *a, ni));
            }
        }
        for (u, c) in beta.chunks(k.max(1)).enumerate() {
            z[u] = ring.add(z[u], ls.times_x(from_fp(c)));
        }
    }

    if eval(&z)? != target {
        return Err(MatrixError::Inconsistent(
            "additive solution failed verification".into(),
        ));
    }
    Ok(Some(z))
}
