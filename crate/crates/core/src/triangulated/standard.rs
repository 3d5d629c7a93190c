use std::sync::Arc;

use serde::Serialize;

use crate::freemod::{invert, is_exact, is_invertible, normal_form, Matrix};
use crate::rings::RingElem;
use crate::scalars::FieldElem;
use crate::structure::{LocalStructure, TriangulationDescriptor};

use super::{solve_matrices, Result, Triangle, TriangleError, TriangleMorphism};

/// The generating data of a class of triangles: the residues `r` whose
/// triangles `(.x, .x, .lift(r) x)` are declared distinguished, together with
/// all contractible triangles. A single `r` gives the triangulations of the
/// classification; two or more give deliberately mixed classes.
#[derive(Debug, Clone)]
pub struct DistinguishedClass {
    ls: Arc<LocalStructure>,
    rs: Vec<FieldElem>,
}

impl DistinguishedClass {
    pub fn standard(ls: Arc<LocalStructure>, desc: &TriangulationDescriptor) -> Self {
        let rs = if desc.x.is_some() { vec![desc.r] } else { Vec::new() };
        DistinguishedClass { ls, rs }
    }

    /// The class of the first admissible residue.
    pub fn canonical(ls: Arc<LocalStructure>) -> Result<Self> {
        let desc = TriangulationDescriptor::canonical(&ls)?;
        Ok(Self::standard(ls, &desc))
    }

    /// Generating triangles for every listed residue, without admissibility checks.
    pub fn mixed(ls: Arc<LocalStructure>, rs: Vec<FieldElem>) -> Self {
        let mut rs = rs;
        rs.dedup();
        DistinguishedClass { ls, rs }
    }

    pub fn ls(&self) -> &LocalStructure {
        &self.ls
    }

    pub fn ls_arc(&self) -> &Arc<LocalStructure> {
        &self.ls
    }

    pub fn residues(&self) -> &[FieldElem] {
        &self.rs
    }

    pub fn is_mixed(&self) -> bool {
        self.rs.len() > 1
    }

    /// The right multiplier `lift(r) x` of the third generating map.
    pub(crate) fn third_map(&self, r: FieldElem) -> RingElem {
        let ls = &self.ls;
        ls.ring().mul(ls.lift(r), ls.x().unwrap_or(ls.ring().zero()))
    }

    fn primary_residue(&self) -> FieldElem {
        self.rs.first().copied().unwrap_or(FieldElem::ONE)
    }

    /// Generating triangle for `r` on `R^n`.
    pub fn delta(&self, r: FieldElem, n: usize) -> Triangle {
        let ring = self.ls.ring();
        let x = self.ls.x().unwrap_or(ring.zero());
        Triangle {
            u: Matrix::scalar(ring, n, x),
            v: Matrix::scalar(ring, n, x),
            w: Matrix::scalar(ring, n, self.third_map(r)),
        }
    }
}

/// `u = v = x I_n`, `w = (lift(r) x) I_n`.
pub fn delta_triangle(ls: &LocalStructure, desc: &TriangulationDescriptor, n: usize) -> Triangle {
    let ring = ls.ring();
    let x = desc.x.unwrap_or(ring.zero());
    Triangle {
        u: Matrix::scalar(ring, n, x),
        v: Matrix::scalar(ring, n, x),
        w: Matrix::scalar(ring, n, ring.mul(desc.r_lift, x)),
    }
}

/// Block sizes of the standard triangle
/// `M + N + V -> M + N + W -> V + N + W -> M + N + V`: identity on `M`,
/// generating triangles on `N` (one residue per summand), and the elementary
/// contractibles on `V` and `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandardShape {
    pub m: usize,
    pub deltas: Vec<FieldElem>,
    pub v: usize,
    pub w: usize,
}

impl StandardShape {
    pub fn n(&self) -> usize {
        self.deltas.len()
    }

    pub fn ranks(&self) -> (usize, usize, usize) {
        let n = self.n();
        (self.m + n + self.v, self.m + n + self.w, self.v + n + self.w)
    }

    pub fn is_contractible(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn triangle(&self, class: &DistinguishedClass) -> Triangle {
        let ring = class.ls.ring();
        let x = class.ls.x().unwrap_or(ring.zero());
        let (m, n, v, w) = (self.m, self.n(), self.v, self.w);
        let (a, b, c) = self.ranks();
        let mut u_map = Matrix::zeros(ring, a, b);
        let mut v_map = Matrix::zeros(ring, b, c);
        let mut w_map = Matrix::zeros(ring, c, a);
        for i in 0..m {
            u_map[(i, i)] = ring.one();
        }
        for (k, &r) in self.deltas.iter().enumerate() {
            u_map[(m + k, m + k)] = x;
            v_map[(m + k, v + k)] = x;
            w_map[(v + k, m + k)] = class.third_map(r);
        }
        for k in 0..w {
            v_map[(m + n + k, v + n + k)] = ring.one();
        }
        for k in 0..v {
            w_map[(k, m + n + k)] = ring.one();
        }
        Triangle {
            u: u_map,
            v: v_map,
            w: w_map,
        }
    }

    /// Indices of the generating summands in `X`, `Y`, `Z`.
    pub(crate) fn delta_indices(&self) -> [Vec<usize>; 3] {
        let n = self.n();
        [
            (self.m..self.m + n).collect(),
            (self.m..self.m + n).collect(),
            (self.v..self.v + n).collect(),
        ]
    }

    /// Indices of the contractible summands in `X`, `Y`, `Z`.
    pub(crate) fn contractible_indices(&self) -> [Vec<usize>; 3] {
        let (a, b, c) = self.ranks();
        let [dx, dy, dz] = self.delta_indices();
        let rest = |len: usize, skip: &[usize]| (0..len).filter(|i| !skip.contains(i)).collect::<Vec<_>>();
        [rest(a, &dx), rest(b, &dy), rest(c, &dz)]
    }
}

/// An isomorphism from a standard triangle onto the tested one.
#[derive(Debug, Clone)]
pub struct DistinguishedWitness {
    pub shape: StandardShape,
    pub iso: TriangleMorphism,
}

impl DistinguishedWitness {
    pub fn verify(&self, class: &DistinguishedClass) -> bool {
        self.iso.source == self.shape.triangle(class) && self.iso.check().is_ok() && self.iso.is_isomorphism(class.ls())
    }
}

/// Completes `f: R^a -> R^b` to a distinguished triangle whose first map is `f`.
///
/// With `U f V = D` in normal form the standard triangle `S` with first map `D`
/// is carried to `(f, V v_S, w_S U)` by the isomorphism `(U, V^{-1}, I)`.
pub fn complete_morphism(class: &DistinguishedClass, f: &Matrix) -> Result<(Triangle, DistinguishedWitness)> {
    let ls = class.ls();
    let nf = normal_form(ls, f)?;
    let (a, b) = f.shape();
    let shape = StandardShape {
        m: nf.unit_rank,
        deltas: vec![class.primary_residue(); nf.x_rank],
        v: a - nf.unit_rank - nf.x_rank,
        w: b - nf.unit_rank - nf.x_rank,
    };
    let s = shape.triangle(class);
    let t = Triangle::new(f.clone(), nf.v.mul(&s.v)?, s.w.mul(&nf.u)?)?;
    let v_inv = invert(ls, &nf.v)?;
    let c = s.ranks().2;
    let iso = TriangleMorphism::new(s, t.clone(), nf.u, v_inv, Matrix::identity(ls.ring(), c))?;
    Ok((t, DistinguishedWitness { shape, iso }))
}

/// Multisets of size `n` over `rs`, as sorted sequences.
fn residue_multisets(rs: &[FieldElem], n: usize) -> Vec<Vec<FieldElem>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if rs.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &r) in rs.iter().enumerate() {
        for mut rest in residue_multisets(&rs[i..], n - 1) {
            rest.insert(0, r);
            out.push(rest);
        }
    }
    out
}

/// Decides membership in the class for triangles of rank at most `budget`.
///
/// After the composites and exactness at all three junctions, the first map is put in
/// normal form, which fixes the standard triangle `S` up to the residues of
/// its generating summands, and the isomorphisms `f`, `g` of the first square.
/// A third component `h` is then solved for exactly. For a triangulation any
/// such `h` between distinguished triangles is invertible, so a non-invertible
/// solution or none at all rules membership out.
pub fn is_distinguished(
    class: &DistinguishedClass,
    t: &Triangle,
    budget: usize,
) -> Result<Option<DistinguishedWitness>> {
    let rank = t.max_rank();
    if rank > budget {
        return Err(TriangleError::BudgetExceeded { rank, budget });
    }
    let ls = class.ls();
    if !t.composites_vanish() {
        return Ok(None);
    }
    for (p, q) in [(&t.u, &t.v), (&t.v, &t.w), (&t.w, &t.u)] {
        if !is_exact(ls, p, q)? {
            return Ok(None);
        }
    }
    let (a, b, c) = t.ranks();
    let nf = normal_form(ls, &t.u)?;
    let (mu, mx) = (nf.unit_rank, nf.x_rank);
    let (v, w) = (a - mu - mx, b - mu - mx);
    if v + mx + w != c {
        return Ok(None);
    }
    let f = nf.u.clone();
    let g = invert(ls, &nf.v)?;
    for deltas in residue_multisets(class.residues(), mx) {
        let shape = StandardShape { m: mu, deltas, v, w };
        let s = shape.triangle(class);
        // g v_T = v_S h and h w_T = w_S f.
        let targets = [g.mul(&t.v)?, s.w.mul(&f)?];
        let sol = solve_matrices(ls, vec![(c, c)], &targets, |m| {
            vec![s.v.mul(&m[0]).expect("shapes"), m[0].mul(&t.w).expect("shapes")]
        })?;
        let Some(h) = sol.map(|mut m| m.remove(0)) else {
            continue;
        };
        if !is_invertible(ls, &h) {
            continue;
        }
        let iso = TriangleMorphism::new(s, t.clone(), f.clone(), g.clone(), h)?;
        return Ok(Some(DistinguishedWitness { shape, iso }));
    }
    Ok(None)
}
