use crate::freemod::{invert, normal_form, Matrix};
use crate::structure::LocalStructure;

use super::standard::{is_distinguished, DistinguishedClass, DistinguishedWitness};
use super::{solve_matrices, Result, Triangle, TriangleError, TriangleMorphism};

/// Completes the square `alpha u2 = u1 beta` between distinguished triangles
/// to a morphism `(alpha, beta, gamma)`.
pub fn fill_square(
    class: &DistinguishedClass,
    t1: &Triangle,
    t2: &Triangle,
    alpha: &Matrix,
    beta: &Matrix,
    budget: usize,
) -> Result<TriangleMorphism> {
    let w1 = is_distinguished(class, t1, budget)?.ok_or(TriangleError::NotDistinguished)?;
    let w2 = is_distinguished(class, t2, budget)?.ok_or(TriangleError::NotDistinguished)?;
    fill_square_with(class, (t1, &w1), (t2, &w2), alpha, beta)
}

/// As [`fill_square`] with known witnesses.
///
/// The square is moved to the standard triangles, where both sides split
/// into contractible and generating summands and the filler decouples into
/// four blocks. Blocks touching a contractible summand are solved exactly.
/// Between generating summands of one residue the filler is built from the
/// normal form of `alpha`; other blocks fall back to an exact solve.
pub fn fill_square_with(
    class: &DistinguishedClass,
    (t1, w1): (&Triangle, &DistinguishedWitness),
    (t2, w2): (&Triangle, &DistinguishedWitness),
    alpha: &Matrix,
    beta: &Matrix,
) -> Result<TriangleMorphism> {
    let ls = class.ls();
    if alpha.shape() != (t1.ranks().0, t2.ranks().0) || beta.shape() != (t1.ranks().1, t2.ranks().1) {
        return Err(TriangleError::ShapeMismatch(
            "square components do not match the ranks".into(),
        ));
    }
    if alpha.mul(&t2.u)? != t1.u.mul(beta)? {
        return Err(TriangleError::NotAMorphism("first square".into()));
    }
    let (i1, i2) = (&w1.iso, &w2.iso);
    let alpha_s = i1.f.mul(alpha)?.mul(&invert(ls, &i2.f)?)?;
    let beta_s = i1.g.mul(beta)?.mul(&invert(ls, &i2.g)?)?;
    let (s1, s2) = (&i1.source, &i2.source);

    let parts1 = [w1.shape.contractible_indices(), w1.shape.delta_indices()];
    let parts2 = [w2.shape.contractible_indices(), w2.shape.delta_indices()];
    let one_residue = {
        let mut all = w1.shape.deltas.iter().chain(&w2.shape.deltas);
        match all.next() {
            Some(r) => all.all(|q| q == r),
            None => true,
        }
    };
    let mut gamma_s = Matrix::zeros(ls.ring(), s1.ranks().2, s2.ranks().2);
    for (p, src_idx) in parts1.iter().enumerate() {
        for (q, tgt_idx) in parts2.iter().enumerate() {
            let src = restrict(s1, src_idx);
            let tgt = restrict(s2, tgt_idx);
            let a = alpha_s.submatrix(&src_idx[0], &tgt_idx[0]);
            let b = beta_s.submatrix(&src_idx[1], &tgt_idx[1]);
            let block = if p == 1 && q == 1 && one_residue {
                match delta_fill(ls, &src, &tgt, &a, &b)? {
                    Some(g) => Some(g),
                    None => generic_fill(ls, &src, &tgt, &a, &b)?,
                }
            } else {
                generic_fill(ls, &src, &tgt, &a, &b)?
            };
            let block = block.ok_or(TriangleError::NoFiller)?;
            for (i, &r) in src_idx[2].iter().enumerate() {
                for (j, &c) in tgt_idx[2].iter().enumerate() {
                    gamma_s[(r, c)] = block[(i, j)];
                }
            }
        }
    }
    let gamma = invert(ls, &i1.h)?.mul(&gamma_s)?.mul(&i2.h)?;
    TriangleMorphism::new(t1.clone(), t2.clone(), alpha.clone(), beta.clone(), gamma)
        .map_err(|e| TriangleError::Inconsistent(format!("assembled filler: {e}")))
}

fn restrict(t: &Triangle, [x, y, z]: &[Vec<usize>; 3]) -> Triangle {
    Triangle {
        u: t.u.submatrix(x, y),
        v: t.v.submatrix(y, z),
        w: t.w.submatrix(z, x),
    }
}

/// Any `gamma` with `v1 gamma = beta v2` and `gamma w2 = w1 alpha`.
pub(crate) fn generic_fill(
    ls: &LocalStructure,
    src: &Triangle,
    tgt: &Triangle,
    alpha: &Matrix,
    beta: &Matrix,
) -> Result<Option<Matrix>> {
    let targets = [beta.mul(&tgt.v)?, src.w.mul(alpha)?];
    let shape = (src.ranks().2, tgt.ranks().2);
    let sol = solve_matrices(ls, vec![shape], &targets, |m| {
        vec![src.v.mul(&m[0]).expect("shapes"), m[0].mul(&tgt.w).expect("shapes")]
    })?;
    Ok(sol.map(|mut m| m.remove(0)))
}

/// `lift(sigma^{-1}[M])` entrywise; `(P, tau P, tau^2 P)` is an endomorphism
/// of a sum of generating triangles for any `P`.
fn twist(ls: &LocalStructure, m: &Matrix) -> Matrix {
    m.map(|e| ls.lift(ls.sigma_inv(ls.project(e))))
}

/// Filler between sums of generating triangles of one residue.
///
/// With `P alpha Q = diag(1, x, 0)` the square is conjugated by
/// `(P, tau P, tau^2 P)` and `(Q, tau Q, tau^2 Q)`. There `beta' = alpha' + x Phi`
/// and `gamma' = alpha' + delta x + Phi x`, where `delta` is the identity on the
/// `x` block; this morphism is homotopic to one whose cone is a sum of
/// generating and contractible triangles.
fn delta_fill(
    ls: &LocalStructure,
    src: &Triangle,
    tgt: &Triangle,
    alpha: &Matrix,
    beta: &Matrix,
) -> Result<Option<Matrix>> {
    let Some(x) = ls.x() else { return Ok(None) };
    let ring = ls.ring();
    let nf = normal_form(ls, alpha)?;
    let (p, q) = (&nf.u, &nf.v);
    let (tp, tq) = (twist(ls, p), twist(ls, q));
    let alpha_bar = nf.diagonal(ls);
    let beta_bar = tp.mul(beta)?.mul(&tq)?;
    let diff = beta_bar.sub(&alpha_bar)?;
    let mut phi = Matrix::zeros(ring, diff.rows(), diff.cols());
    for i in 0..diff.rows() {
        for j in 0..diff.cols() {
            let Some(c) = ls.x_coefficient(diff[(i, j)]) else {
                return Ok(None);
            };
            phi[(i, j)] = ls.lift(ls.sigma_inv(c));
        }
    }
    let mut delta = Matrix::zeros(ring, alpha.rows(), alpha.cols());
    for i in nf.unit_rank..nf.unit_rank + nf.x_rank {
        delta[(i, i)] = ring.one();
    }
    let gamma_bar = alpha_bar.add(&delta.scale_right(x))?.add(&phi.scale_right(x))?;
    let gamma = invert(ls, &twist(ls, &tp))?
        .mul(&gamma_bar)?
        .mul(&invert(ls, &twist(ls, &tq))?)?;
    let ok = beta.mul(&tgt.v)? == src.v.mul(&gamma)? && gamma.mul(&tgt.w)? == src.w.mul(alpha)?;
    Ok(ok.then_some(gamma))
}
