//! Triangles of finitely generated free modules with identity translation.
//!
//! A triangle `X -u-> Y -v-> Z -w-> X` is stored as three matrices in the
//! row-vector convention, so the composite "u then v" is `u * v`.

mod fill;
mod standard;
mod suite;

use thiserror::Error;

use crate::freemod::{invert, is_invertible, solve_additive, Matrix, MatrixError};
use crate::rings::RingElem;
use crate::structure::{LocalStructure, StructureError};

pub use fill::{fill_square, fill_square_with};
pub use standard::{
    complete_morphism, delta_triangle, is_distinguished, DistinguishedClass, DistinguishedWitness, StandardShape,
};
pub use suite::{axiom_suite, AxiomReport, CheckTally, Counterexample, SuiteConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangleError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a morphism of triangles: {0}")]
    NotAMorphism(String),
    #[error("no filler completes the square")]
    NoFiller,
    #[error("triangle is not distinguished")]
    NotDistinguished,
    #[error("rank {rank} exceeds the budget {budget}")]
    BudgetExceeded { rank: usize, budget: usize },
    #[error("internal check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, TriangleError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub u: Matrix,
    pub v: Matrix,
    pub w: Matrix,
}

impl Triangle {
    pub fn new(u: Matrix, v: Matrix, w: Matrix) -> Result<Self> {
        let (a, b) = u.shape();
        if v.rows() != b || w.rows() != v.cols() || w.cols() != a {
            return Err(TriangleError::ShapeMismatch(format!(
                "u {:?}, v {:?}, w {:?} do not chain",
                u.shape(),
                v.shape(),
                w.shape()
            )));
        }
        // Products fail on mixed rings.
        u.mul(&v)?;
        v.mul(&w)?;
        Ok(Triangle { u, v, w })
    }

    pub fn zero(ls: &LocalStructure) -> Self {
        let z = Matrix::zeros(ls.ring(), 0, 0);
        Triangle {
            u: z.clone(),
            v: z.clone(),
            w: z,
        }
    }

    pub fn ranks(&self) -> (usize, usize, usize) {
        (self.u.rows(), self.u.cols(), self.v.cols())
    }

    pub fn max_rank(&self) -> usize {
        let (a, b, c) = self.ranks();
        a.max(b).max(c)
    }

    /// `u v`, `v w` and `w u` all vanish.
    pub fn composites_vanish(&self) -> bool {
        let zero = |m: std::result::Result<Matrix, MatrixError>| m.map(|m| m.is_zero()).unwrap_or(false);
        zero(self.u.mul(&self.v)) && zero(self.v.mul(&self.w)) && zero(self.w.mul(&self.u))
    }

    /// `Y -v-> Z -w-> X -(-u)-> Y`.
    pub fn rotate(&self) -> Triangle {
        Triangle {
            u: self.v.clone(),
            v: self.w.clone(),
            w: self.u.neg(),
        }
    }

    pub fn direct_sum(&self, other: &Triangle) -> Result<Triangle> {
        Ok(Triangle {
            u: self.u.direct_sum(&other.u)?,
            v: self.v.direct_sum(&other.v)?,
            w: self.w.direct_sum(&other.w)?,
        })
    }

    /// The image of the triangle under the isomorphism `(f, g, h)`, i.e. the
    /// triangle `T'` making `(f, g, h): T -> T'` a morphism.
    pub fn transport(&self, ls: &LocalStructure, f: &Matrix, g: &Matrix, h: &Matrix) -> Result<Triangle> {
        let (fi, gi, hi) = (invert(ls, f)?, invert(ls, g)?, invert(ls, h)?);
        Triangle::new(
            fi.mul(&self.u)?.mul(g)?,
            gi.mul(&self.v)?.mul(h)?,
            hi.mul(&self.w)?.mul(f)?,
        )
    }
}

/// The three rotation shapes of `R^n -1-> R^n -> 0 -> R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ElementaryShape {
    /// `(I, 0, 0)` on ranks `(n, n, 0)`.
    First,
    /// `(0, I, 0)` on ranks `(0, n, n)`.
    Second,
    /// `(0, 0, I)` on ranks `(n, 0, n)`.
    Third,
}

impl ElementaryShape {
    pub const ALL: [ElementaryShape; 3] = [ElementaryShape::First, ElementaryShape::Second, ElementaryShape::Third];

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(ElementaryShape::First),
            2 => Some(ElementaryShape::Second),
            3 => Some(ElementaryShape::Third),
            _ => None,
        }
    }
}

pub fn elementary_contractible(ls: &LocalStructure, shape: ElementaryShape, n: usize) -> Triangle {
    let ring = ls.ring();
    let id = Matrix::identity(ring, n);
    let z = |r, c| Matrix::zeros(ring, r, c);
    match shape {
        ElementaryShape::First => Triangle {
            u: id,
            v: z(n, 0),
            w: z(0, n),
        },
        ElementaryShape::Second => Triangle {
            u: z(0, n),
            v: id,
            w: z(n, 0),
        },
        ElementaryShape::Third => Triangle {
            u: z(n, 0),
            v: z(0, n),
            w: id,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleMorphism {
    pub source: Triangle,
    pub target: Triangle,
    pub f: Matrix,
    pub g: Matrix,
    pub h: Matrix,
}

impl TriangleMorphism {
    /// Builds the morphism after checking shapes and the three squares
    /// `f u' = u g`, `g v' = v h`, `h w' = w f`.
    pub fn new(source: Triangle, target: Triangle, f: Matrix, g: Matrix, h: Matrix) -> Result<Self> {
        let m = TriangleMorphism {
            source,
            target,
            f,
            g,
            h,
        };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let (a, b, c) = self.source.ranks();
        let (a2, b2, c2) = self.target.ranks();
        if self.f.shape() != (a, a2) || self.g.shape() != (b, b2) || self.h.shape() != (c, c2) {
            return Err(TriangleError::ShapeMismatch(
                "morphism components do not match the ranks".into(),
            ));
        }
        let (s, t) = (&self.source, &self.target);
        if self.f.mul(&t.u)? != s.u.mul(&self.g)? {
            return Err(TriangleError::NotAMorphism("first square".into()));
        }
        if self.g.mul(&t.v)? != s.v.mul(&self.h)? {
            return Err(TriangleError::NotAMorphism("second square".into()));
        }
        if self.h.mul(&t.w)? != s.w.mul(&self.f)? {
            return Err(TriangleError::NotAMorphism("third square".into()));
        }
        Ok(())
    }

    pub fn identity(t: &Triangle) -> Self {
        let ring = t.u.ring();
        let (a, b, c) = t.ranks();
        TriangleMorphism {
            source: t.clone(),
            target: t.clone(),
            f: Matrix::identity(ring, a),
            g: Matrix::identity(ring, b),
            h: Matrix::identity(ring, c),
        }
    }

    pub fn zero(source: &Triangle, target: &Triangle) -> Self {
        let ring = source.u.ring();
        let (a, b, c) = source.ranks();
        let (a2, b2, c2) = target.ranks();
        TriangleMorphism {
            source: source.clone(),
            target: target.clone(),
            f: Matrix::zeros(ring, a, a2),
            g: Matrix::zeros(ring, b, b2),
            h: Matrix::zeros(ring, c, c2),
        }
    }

    pub fn is_isomorphism(&self, ls: &LocalStructure) -> bool {
        is_invertible(ls, &self.f) && is_invertible(ls, &self.g) && is_invertible(ls, &self.h)
    }

    /// "self then other".
    pub fn compose(&self, other: &TriangleMorphism) -> Result<TriangleMorphism> {
        TriangleMorphism::new(
            self.source.clone(),
            other.target.clone(),
            self.f.mul(&other.f)?,
            self.g.mul(&other.g)?,
            self.h.mul(&other.h)?,
        )
    }
}

/// `theta: Y -> X'`, `phi: Z -> Y'`, `psi: X -> Z'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homotopy {
    pub theta: Matrix,
    pub phi: Matrix,
    pub psi: Matrix,
}

impl Homotopy {
    pub fn zero(source: &Triangle, target: &Triangle) -> Self {
        let ring = source.u.ring();
        let (a, b, c) = source.ranks();
        let (a2, b2, c2) = target.ranks();
        Homotopy {
            theta: Matrix::zeros(ring, b, a2),
            phi: Matrix::zeros(ring, c, b2),
            psi: Matrix::zeros(ring, a, c2),
        }
    }

    /// The differences `(f - f', g - g', h - h')` a homotopy accounts for:
    /// `u theta + psi w'`, `v phi + theta u'`, `w psi + phi v'`.
    pub fn differences(&self, source: &Triangle, target: &Triangle) -> Result<(Matrix, Matrix, Matrix)> {
        let (a, b, c) = source.ranks();
        let (a2, b2, c2) = target.ranks();
        if self.theta.shape() != (b, a2) || self.phi.shape() != (c, b2) || self.psi.shape() != (a, c2) {
            return Err(TriangleError::ShapeMismatch(
                "homotopy components do not match the ranks".into(),
            ));
        }
        let df = source.u.mul(&self.theta)?.add(&self.psi.mul(&target.w)?)?;
        let dg = source.v.mul(&self.phi)?.add(&self.theta.mul(&target.u)?)?;
        let dh = source.w.mul(&self.psi)?.add(&self.phi.mul(&target.v)?)?;
        Ok((df, dg, dh))
    }
}

fn same_ends(phi: &TriangleMorphism, phi2: &TriangleMorphism) -> Result<()> {
    if phi.source != phi2.source || phi.target != phi2.target {
        return Err(TriangleError::ShapeMismatch(
            "morphisms do not share source and target".into(),
        ));
    }
    Ok(())
}

pub fn is_homotopy(phi: &TriangleMorphism, phi2: &TriangleMorphism, hom: &Homotopy) -> Result<bool> {
    same_ends(phi, phi2)?;
    let (df, dg, dh) = hom.differences(&phi.source, &phi.target)?;
    Ok(phi.f.sub(&phi2.f)? == df && phi.g.sub(&phi2.g)? == dg && phi.h.sub(&phi2.h)? == dh)
}

/// The triangle on `(Y + X', Z + Y', X + Z')` with maps
/// `[[-v, g], [0, u']]`, `[[-w, h], [0, v']]`, `[[-u, f], [0, w']]`.
pub fn mapping_cone(phi: &TriangleMorphism) -> Result<Triangle> {
    phi.check()?;
    let (s, t) = (&phi.source, &phi.target);
    let ring = s.u.ring();
    let block = |m: &Matrix, comp: &Matrix, m2: &Matrix| -> Result<Matrix> {
        let zero = Matrix::zeros(ring, m2.rows(), m.cols());
        Ok(Matrix::block2(&m.neg(), comp, &zero, m2)?)
    };
    Triangle::new(
        block(&s.v, &phi.g, &t.u)?,
        block(&s.w, &phi.h, &t.v)?,
        block(&s.u, &phi.f, &t.w)?,
    )
}

struct Unknowns {
    shapes: Vec<(usize, usize)>,
}

impl Unknowns {
    fn total(&self) -> usize {
        self.shapes.iter().map(|(r, c)| r * c).sum()
    }

    fn split(&self, ls: &LocalStructure, z: &[RingElem]) -> Vec<Matrix> {
        let mut out = Vec::with_capacity(self.shapes.len());
        let mut at = 0;
        for &(r, c) in &self.shapes {
            out.push(Matrix::from_entries(ls.ring(), r, c, z[at..at + r * c].to_vec()).expect("sized"));
            at += r * c;
        }
        out
    }
}

fn flatten(ms: &[Matrix]) -> Vec<RingElem> {
    ms.iter().flat_map(|m| m.entries().iter().copied()).collect()
}

/// Solves `L(m_1, ..., m_k) = targets` for matrix unknowns of the given shapes.
pub(crate) fn solve_matrices(
    ls: &LocalStructure,
    shapes: Vec<(usize, usize)>,
    targets: &[Matrix],
    map: impl Fn(&[Matrix]) -> Vec<Matrix>,
) -> Result<Option<Vec<Matrix>>> {
    let unknowns = Unknowns { shapes };
    let sol = solve_additive(ls, unknowns.total(), &flatten(targets), |z| {
        flatten(&map(&unknowns.split(ls, z)))
    })?;
    Ok(sol.map(|z| unknowns.split(ls, &z)))
}

/// A homotopy from `phi` to `phi2`, if one exists.
pub fn homotopy_solve(
    ls: &LocalStructure,
    phi: &TriangleMorphism,
    phi2: &TriangleMorphism,
) -> Result<Option<Homotopy>> {
    same_ends(phi, phi2)?;
    let (s, t) = (&phi.source, &phi.target);
    let (a, b, c) = s.ranks();
    let (a2, b2, c2) = t.ranks();
    let targets = [phi.f.sub(&phi2.f)?, phi.g.sub(&phi2.g)?, phi.h.sub(&phi2.h)?];
    let sol = solve_matrices(ls, vec![(b, a2), (c, b2), (a, c2)], &targets, |m| {
        let hom = Homotopy {
            theta: m[0].clone(),
            phi: m[1].clone(),
            psi: m[2].clone(),
        };
        let (df, dg, dh) = hom.differences(s, t).expect("shapes fixed");
        vec![df, dg, dh]
    })?;
    let Some(m) = sol else { return Ok(None) };
    let hom = Homotopy {
        theta: m[0].clone(),
        phi: m[1].clone(),
        psi: m[2].clone(),
    };
    if !is_homotopy(phi, phi2, &hom)? {
        return Err(TriangleError::Inconsistent(
            "solved homotopy failed verification".into(),
        ));
    }
    Ok(Some(hom))
}

/// A nullhomotopy of the identity of `t`, or `None` when `t` is not contractible.
pub fn nullhomotopy_solve(ls: &LocalStructure, t: &Triangle) -> Result<Option<Homotopy>> {
    homotopy_solve(ls, &TriangleMorphism::identity(t), &TriangleMorphism::zero(t, t))
}

pub fn is_contractible(ls: &LocalStructure, t: &Triangle) -> Result<bool> {
    Ok(nullhomotopy_solve(ls, t)?.is_some())
}

/// The isomorphism `cone(phi) -> cone(phi2)` induced by a homotopy from `phi`
/// to `phi2`, with unitriangular components `[[I, theta], [0, I]]` and so on.
pub fn homotopy_cone_iso(phi: &TriangleMorphism, phi2: &TriangleMorphism, hom: &Homotopy) -> Result<TriangleMorphism> {
    if !is_homotopy(phi, phi2, hom)? {
        return Err(TriangleError::NotAMorphism("not a homotopy".into()));
    }
    let ring = phi.source.u.ring();
    let unitri = |m: &Matrix| -> Result<Matrix> {
        let (r, c) = m.shape();
        Ok(Matrix::block2(
            &Matrix::identity(ring, r),
            m,
            &Matrix::zeros(ring, c, r),
            &Matrix::identity(ring, c),
        )?)
    };
    TriangleMorphism::new(
        mapping_cone(phi)?,
        mapping_cone(phi2)?,
        unitri(&hom.theta)?,
        unitri(&hom.phi)?,
        unitri(&hom.psi)?,
    )
}

#[cfg(test)]
mod tests;
