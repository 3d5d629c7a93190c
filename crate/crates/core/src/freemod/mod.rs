//! Homomorphisms of finitely generated free left modules.
//!
//! Module elements are row vectors and a map `R^a -> R^b` is `v -> v * A` for an
//! `a x b` matrix `A`. Composition "f then g" is the product `A * B`.

mod linear;
mod normal_form;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::rings::{Ring, RingElem};
use crate::scalars::FieldElem;
use crate::structure::{LocalStructure, StructureError};

pub use linear::{solve_additive, FpMatrix};
pub use normal_form::{normal_form, NormalForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operands belong to different rings")]
    MixedRings,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("enumeration of {0} vectors exceeds the guard")]
    TooLarge(u128),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("internal check failed: {0}")]
    Inconsistent(String),
}

#[derive(Clone)]
pub struct Matrix {
    ring: Arc<Ring>,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries == other.entries
            && same_ring(&self.ring, &other.ring)
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.ring.format_elem(self[(i, j)]))?;
            }
        }
        write!(f, "]")
    }
}

pub(crate) fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || a.spec() == b.spec()
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = RingElem;

    fn index(&self, (i, j): (usize, usize)) -> &RingElem {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut RingElem {
        &mut self.entries[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(ring: &Arc<Ring>, rows: usize, cols: usize) -> Self {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Arc<Ring>, n: usize) -> Self {
        Self::scalar(ring, n, ring.one())
    }

    /// `s * I_n`, i.e. right multiplication by `s` on `R^n`.
    pub fn scalar(ring: &Arc<Ring>, n: usize, s: RingElem) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_entries(
        ring: &Arc<Ring>,
        rows: usize,
        cols: usize,
        entries: Vec<RingElem>,
    ) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::ShapeMismatch(format!(
                "{} entries for {rows}x{cols}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !ring.contains(**e)) {
            return Err(MatrixError::ShapeMismatch(format!("entry {bad} outside the ring")));
        }
        Ok(Matrix {
            ring: ring.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(ring: &Arc<Ring>, rows: &[Vec<RingElem>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::ShapeMismatch("ragged rows".into()));
        }
        Self::from_entries(ring, rows.len(), cols, rows.concat())
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == self.ring.zero())
    }

    pub fn map(&self, f: impl Fn(RingElem) -> RingElem) -> Self {
        Matrix {
            entries: self.entries.iter().map(|&e| f(e)).collect(),
            ..self.clone()
        }
    }

    fn check_ring(&self, other: &Matrix) -> Result<(), MatrixError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(MatrixError::MixedRings)
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_ring(other)?;
        if self.shape() != other.shape() {
            return Err(MatrixError::ShapeMismatch(format!(
                "{:?} + {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let r = &self.ring;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| r.add(a, b))
            .collect();
        Ok(Matrix {
            entries,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        let r = self.ring.clone();
        self.map(|e| r.neg(e))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(MatrixError::ShapeMismatch(format!(
                "{:?} * {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let r = &self.ring;
        let mut out = Matrix::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == r.zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = r.add(out[(i, j)], r.mul(a, other[(k, j)]));
                }
            }
        }
        Ok(out)
    }

    /// Left scalar multiple `s * A`.
    pub fn scale_left(&self, s: RingElem) -> Matrix {
        let r = self.ring.clone();
        self.map(|e| r.mul(s, e))
    }

    /// Right scalar multiple `A * s`.
    pub fn scale_right(&self, s: RingElem) -> Matrix {
        let r = self.ring.clone();
        self.map(|e| r.mul(e, s))
    }

    pub fn direct_sum(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_ring(other)?;
        let mut out = Matrix::zeros(&self.ring, self.rows + other.rows, self.cols + other.cols);
        out.paste(0, 0, self);
        out.paste(self.rows, self.cols, other);
        Ok(out)
    }

    /// Side-by-side concatenation `[A | B]`.
    pub fn augment(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_ring(other)?;
        if self.rows != other.rows {
            return Err(MatrixError::ShapeMismatch("augment needs equal row counts".into()));
        }
        let mut out = Matrix::zeros(&self.ring, self.rows, self.cols + other.cols);
        out.paste(0, 0, self);
        out.paste(0, self.cols, other);
        Ok(out)
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_ring(other)?;
        if self.cols != other.cols {
            return Err(MatrixError::ShapeMismatch("stack needs equal column counts".into()));
        }
        let mut out = Matrix::zeros(&self.ring, self.rows + other.rows, self.cols);
        out.paste(0, 0, self);
        out.paste(self.rows, 0, other);
        Ok(out)
    }

    /// 2x2 block matrix `[[a, b], [c, d]]`.
    pub fn block2(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix, MatrixError> {
        a.augment(b)?.stack(&c.augment(d)?)
    }

    pub fn paste(&mut self, row: usize, col: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.ring, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out[(i, j)] = self[(r, c)];
            }
        }
        out
    }

    /// Permutation matrix sending basis vector `i` to `perm[i]`.
    pub fn permutation(ring: &Arc<Ring>, perm: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(ring, perm.len(), perm.len());
        for (i, &j) in perm.iter().enumerate() {
            out[(i, j)] = ring.one();
        }
        out
    }

    /// Applies the map to a row vector.
    pub fn apply(&self, v: &[RingElem]) -> Vec<RingElem> {
        let r = &self.ring;
        (0..self.cols)
            .map(|j| (0..self.rows).fold(r.zero(), |acc, i| r.add(acc, r.mul(v[i], self[(i, j)]))))
            .collect()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row_target += c * row_source`.
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, c: RingElem) {
        let r = self.ring.clone();
        for j in 0..self.cols {
            let v = r.mul(c, self[(source, j)]);
            self[(target, j)] = r.add(self[(target, j)], v);
        }
    }

    /// `col_target += col_source * c`.
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, c: RingElem) {
        let r = self.ring.clone();
        for i in 0..self.rows {
            let v = r.mul(self[(i, source)], c);
            self[(i, target)] = r.add(self[(i, target)], v);
        }
    }

    pub(crate) fn scale_row(&mut self, row: usize, c: RingElem) {
        let r = self.ring.clone();
        for j in 0..self.cols {
            self[(row, j)] = r.mul(c, self[(row, j)]);
        }
    }
}

/// A matrix over the residue field `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<FieldElem>,
}

impl ResidueMatrix {
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.cols + j]
    }

    pub fn rank(&self, ls: &LocalStructure) -> usize {
        linear::reduce_over_d(ls.d(), self).rank
    }
}

/// Entrywise projection to `d`.
pub fn residue_matrix(ls: &LocalStructure, a: &Matrix) -> ResidueMatrix {
    ResidueMatrix {
        rows: a.rows,
        cols: a.cols,
        entries: a.entries.iter().map(|&e| ls.project(e)).collect(),
    }
}

/// Entrywise lift of a residue matrix through the canonical section.
pub fn lift_matrix(ls: &LocalStructure, m: &ResidueMatrix) -> Matrix {
    Matrix {
        ring: ls.ring().clone(),
        rows: m.rows,
        cols: m.cols,
        entries: m.entries.iter().map(|&t| ls.lift(t)).collect(),
    }
}

/// Invertible iff the residue matrix is, since `m` is the Jacobson radical.
pub fn is_invertible(ls: &LocalStructure, a: &Matrix) -> bool {
    a.is_square() && residue_matrix(ls, a).rank(ls) == a.rows
}

/// Lifts a residue inverse `B0` and corrects it to `B0 (2I - A B0)`, which is
/// exact because the error `A B0 - I` has entries in `m` and `m^2 = 0`.
pub fn invert(ls: &LocalStructure, a: &Matrix) -> Result<Matrix, MatrixError> {
    if !a.is_square() {
        return Err(MatrixError::ShapeMismatch("only square matrices invert".into()));
    }
    let res = residue_matrix(ls, a);
    let inv = linear::invert_over_d(ls.d(), &res).ok_or(MatrixError::NotInvertible)?;
    let ring = a.ring();
    let b0 = lift_matrix(ls, &inv);
    let n = a.rows;
    let two_i = Matrix::scalar(ring, n, ring.from_int(2));
    let b = b0.mul(&two_i.sub(&a.mul(&b0)?)?)?;
    let id = Matrix::identity(ring, n);
    if a.mul(&b)? != id || b.mul(a)? != id {
        return Err(MatrixError::Inconsistent("lifted inverse failed verification".into()));
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Solve `X * A = C`.
    Left,
    /// Solve `A * X = C`.
    Right,
}

/// One solution of `X A = C` or `A X = C`, or `None` when there is none.
pub fn solve_linear(ls: &LocalStructure, a: &Matrix, c: &Matrix, side: Side) -> Result<Option<Matrix>, MatrixError> {
    a.check_ring(c)?;
    let ring = a.ring().clone();
    let (xr, xc) = match side {
        Side::Left => {
            if a.cols != c.cols {
                return Err(MatrixError::ShapeMismatch(
                    "X*A = C needs A and C with equal column counts".into(),
                ));
            }
            (c.rows, a.rows)
        }
        Side::Right => {
            if a.rows != c.rows {
                return Err(MatrixError::ShapeMismatch(
                    "A*X = C needs A and C with equal row counts".into(),
                ));
            }
            (a.cols, c.cols)
        }
    };
    let map = |z: &[RingElem]| -> Vec<RingElem> {
        let x = Matrix {
            ring: ring.clone(),
            rows: xr,
            cols: xc,
            entries: z.to_vec(),
        };
        let prod = match side {
            Side::Left => x.mul(a),
            Side::Right => a.mul(&x),
        };
        prod.expect("shapes checked").entries
    };
    let sol = solve_additive(ls, xr * xc, &c.entries, map)?;
    Ok(sol.map(|entries| Matrix {
        ring: ring.clone(),
        rows: xr,
        cols: xc,
        entries,
    }))
}

pub const EXACTNESS_GUARD: u128 = 1 << 20;

#[cfg(test)]
fn vectors(ring: &Ring, len: usize) -> Result<Vec<Vec<RingElem>>, MatrixError> {
    vectors_within(ring, len, EXACTNESS_GUARD)
}

fn vectors_within(ring: &Ring, len: usize, guard: u128) -> Result<Vec<Vec<RingElem>>, MatrixError> {
    let count = (ring.size() as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if count > guard {
        return Err(MatrixError::TooLarge(count));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0u64; len];
    loop {
        out.push(idx.iter().map(|&i| ring.element(i)).collect());
        let mut pos = 0;
        loop {
            if pos == len {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < ring.size() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Whether `image(A) = kernel(B)` for `R^a -A-> R^b -B-> R^c`.
///
/// With `U A V = diag(I_k, x I_l, 0)` the image of `A` has `|R|^k |m|^l`
/// elements, so exactness is `AB = 0` plus `|im A| |im B| = |R|^b`.
pub fn is_exact(ls: &LocalStructure, a: &Matrix, b: &Matrix) -> Result<bool, MatrixError> {
    a.check_ring(b)?;
    if a.cols != b.rows {
        return Err(MatrixError::ShapeMismatch("A and B are not composable".into()));
    }
    if !a.mul(b)?.is_zero() {
        return Ok(false);
    }
    // sizes as powers of |d|
    let unit = if ls.x().is_some() { 2 } else { 1 };
    let weight = |m: &Matrix| -> Result<usize, MatrixError> {
        let nf = normal_form(ls, m)?;
        Ok(unit * nf.unit_rank + nf.x_rank)
    };
    Ok(weight(a)? + weight(b)? == unit * a.cols)
}

/// Whether `image(A) = kernel(B)` for `R^a -A-> R^b -B-> R^c`, by enumeration.
pub fn exactness_check(a: &Matrix, b: &Matrix) -> Result<bool, MatrixError> {
    exactness_check_within(a, b, EXACTNESS_GUARD)
}

/// As [`exactness_check`] with a caller-chosen bound on enumerated vectors.
pub fn exactness_check_within(a: &Matrix, b: &Matrix, guard: u128) -> Result<bool, MatrixError> {
    a.check_ring(b)?;
    if a.cols != b.rows {
        return Err(MatrixError::ShapeMismatch("A and B are not composable".into()));
    }
    let ring = a.ring();
    let source = vectors_within(ring, a.rows, guard)?;
    let middle = vectors_within(ring, a.cols, guard)?;
    let image: std::collections::HashSet<Vec<RingElem>> = source.iter().map(|v| a.apply(v)).collect();
    let zero = vec![ring.zero(); b.cols];
    let kernel_size = middle.iter().filter(|w| b.apply(w) == zero).count();
    if image.iter().any(|v| b.apply(v) != zero) {
        return Ok(false);
    }
    Ok(image.len() == kernel_size)
}

#[cfg(test)]
mod tests;
