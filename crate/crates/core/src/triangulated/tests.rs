use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::rings::Ring;
use crate::scalars::FieldElem;
use crate::structure::TriangulationDescriptor;

fn class(spec: &str) -> DistinguishedClass {
    let ring = Ring::parse(spec).unwrap();
    DistinguishedClass::canonical(Arc::new(LocalStructure::new(&ring).unwrap())).unwrap()
}

fn m(c: &DistinguishedClass, rows: &[&[u64]]) -> Matrix {
    let ring = c.ls().ring();
    let rows: Vec<Vec<_>> = rows
        .iter()
        .map(|r| r.iter().map(|&i| ring.element(i)).collect())
        .collect();
    if rows.is_empty() {
        return Matrix::zeros(ring, 0, 0);
    }
    Matrix::from_rows(ring, &rows).unwrap()
}

fn tri(c: &DistinguishedClass, u: u64, v: u64, w: u64) -> Triangle {
    Triangle::new(m(c, &[&[u]]), m(c, &[&[v]]), m(c, &[&[w]])).unwrap()
}

fn z4() -> DistinguishedClass {
    class("w2(2)")
}

/// Element index of the integer `n` in the Z/4 model.
fn z4_index(n: u64) -> u64 {
    let c = z4();
    let ring = c.ls().ring();
    ring.index(ring.from_int(n as i64)) as u64
}

#[test]
fn z4_index_map() {
    let c = z4();
    let ring = c.ls().ring();
    for n in 0..4 {
        assert_eq!(ring.element(z4_index(n)), ring.from_int(n as i64));
    }
}

#[test]
fn delta_over_z4() {
    let c = z4();
    let desc = TriangulationDescriptor::canonical(c.ls()).unwrap();
    let d = delta_triangle(c.ls(), &desc, 1);
    let two = z4_index(2);
    assert_eq!(d, tri(&c, two, two, two));
    assert!(d.composites_vanish());
    assert_eq!(delta_triangle(c.ls(), &desc, 0).ranks(), (0, 0, 0));
    let d2 = delta_triangle(c.ls(), &desc, 2);
    assert_eq!(d2, d.direct_sum(&d).unwrap());
}

#[test]
fn elementary_shapes() {
    let c = z4();
    let ls = c.ls();
    assert_eq!(
        elementary_contractible(ls, ElementaryShape::First, 1).ranks(),
        (1, 1, 0)
    );
    assert_eq!(
        elementary_contractible(ls, ElementaryShape::Second, 1).ranks(),
        (0, 1, 1)
    );
    assert_eq!(
        elementary_contractible(ls, ElementaryShape::Third, 1).ranks(),
        (1, 0, 1)
    );
    for s in ElementaryShape::ALL {
        assert_eq!(elementary_contractible(ls, s, 0).ranks(), (0, 0, 0));
        let e = elementary_contractible(ls, s, 2);
        assert!(e.composites_vanish());
        assert!(nullhomotopy_solve(ls, &e).unwrap().is_some());
        assert!(is_distinguished(&c, &e, 4).unwrap().is_some());
    }
}

#[test]
fn rotation_signs() {
    let c = z4();
    let two = z4_index(2);
    let d = tri(&c, two, two, two);
    assert_eq!(d.rotate(), d);
    let t = tri(&c, z4_index(1), 0, 0);
    let r3 = t.rotate().rotate().rotate();
    assert_eq!(r3.u, t.u.neg());
    assert_eq!(r3.u, m(&c, &[&[z4_index(3)]]));
    let e = elementary_contractible(c.ls(), ElementaryShape::First, 1);
    let r = e.rotate();
    assert_eq!(r.ranks(), (1, 0, 1));
    assert_eq!(r.w, m(&c, &[&[z4_index(3)]]));
}

#[test]
fn triple_rotation_negates() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in ["w2(2)", "w2(4)", "skewpoly(8; frob)"] {
        let c = class(spec);
        let ring = c.ls().ring().clone();
        for _ in 0..20 {
            let (a, b, cc) = (rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3));
            let mut rand = |r, k| {
                let e = (0..r * k)
                    .map(|_| ring.element(rng.gen_range(0..ring.size())))
                    .collect();
                Matrix::from_entries(&ring, r, k, e).unwrap()
            };
            let t = Triangle::new(rand(a, b), rand(b, cc), rand(cc, a)).unwrap();
            let r3 = t.rotate().rotate().rotate();
            assert_eq!((r3.u, r3.v, r3.w), (t.u.neg(), t.v.neg(), t.w.neg()));
        }
        // On generating triangles x = -x, so three rotations return the triangle itself.
        let d = c.delta(c.residues()[0], 2);
        assert_eq!(d.rotate().rotate().rotate(), d);
    }
}

#[test]
fn cone_of_identity_on_delta_is_contractible() {
    let c = z4();
    let two = z4_index(2);
    let d = tri(&c, two, two, two);
    let cone = mapping_cone(&TriangleMorphism::identity(&d)).unwrap();
    assert_eq!(cone.ranks(), (2, 2, 2));
    assert!(cone.composites_vanish());
    assert!(nullhomotopy_solve(c.ls(), &cone).unwrap().is_some());
    assert!(is_distinguished(&c, &cone, 4).unwrap().is_some());
}

#[test]
fn cone_blocks() {
    let c = z4();
    let two = z4_index(2);
    let d = tri(&c, two, two, two);
    let id = TriangleMorphism::identity(&d);
    let cone = mapping_cone(&id).unwrap();
    let ring = c.ls().ring();
    assert_eq!(cone.u[(0, 0)], ring.neg(d.v[(0, 0)]));
    assert_eq!(cone.u[(0, 1)], id.g[(0, 0)]);
    assert_eq!(cone.u[(1, 0)], ring.zero());
    assert_eq!(cone.u[(1, 1)], d.u[(0, 0)]);
    // Cone of the zero morphism out of the zero triangle is the target.
    let z = Triangle::zero(c.ls());
    assert_eq!(mapping_cone(&TriangleMorphism::zero(&z, &d)).unwrap(), d);
}

#[test]
fn zero_homotopy_only_between_equal_maps() {
    let c = z4();
    let two = z4_index(2);
    let d = tri(&c, two, two, two);
    let id = TriangleMorphism::identity(&d);
    let h0 = Homotopy::zero(&d, &d);
    assert!(is_homotopy(&id, &id, &h0).unwrap());
    let three = TriangleMorphism::new(
        d.clone(),
        d.clone(),
        m(&c, &[&[z4_index(3)]]),
        m(&c, &[&[z4_index(3)]]),
        m(&c, &[&[z4_index(3)]]),
    )
    .unwrap();
    assert!(!is_homotopy(&id, &three, &h0).unwrap());
}

/// `(delta, Phi, 0)` is a homotopy from `(a, a + x Phi, a + delta x + Phi x)`
/// to `(e, e, e)` with `a = diag(1, x, 0)`, `e = diag(1, 0, 0)`.
#[test]
fn normalized_filler_homotopy() {
    let c = z4();
    let ls = c.ls();
    let ring = ls.ring().clone();
    let x = ls.x().unwrap();
    let d3 = c.delta(c.residues()[0], 3);
    let diag = |vals: [RingElem; 3]| {
        let mut out = Matrix::zeros(&ring, 3, 3);
        for (i, v) in vals.into_iter().enumerate() {
            out[(i, i)] = v;
        }
        out
    };
    let (one, zero) = (ring.one(), ring.zero());
    let alpha = diag([one, x, zero]);
    let eps = diag([one, zero, zero]);
    let delta = diag([zero, one, zero]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..20 {
        let e = (0..9).map(|_| ring.element(rng.gen_range(0..ring.size()))).collect();
        let phi = Matrix::from_entries(&ring, 3, 3, e).unwrap();
        let xi = Matrix::scalar(&ring, 3, x);
        let beta = alpha.add(&xi.mul(&phi).unwrap()).unwrap();
        let gamma = alpha
            .add(&delta.mul(&xi).unwrap())
            .unwrap()
            .add(&phi.mul(&xi).unwrap())
            .unwrap();
        let bar = TriangleMorphism::new(d3.clone(), d3.clone(), alpha.clone(), beta, gamma).unwrap();
        let zeta = TriangleMorphism::new(d3.clone(), d3.clone(), eps.clone(), eps.clone(), eps.clone()).unwrap();
        let hom = Homotopy {
            theta: delta.clone(),
            phi: phi.clone(),
            psi: Matrix::zeros(&ring, 3, 3),
        };
        assert!(is_homotopy(&bar, &zeta, &hom).unwrap());
        let iso = homotopy_cone_iso(&bar, &zeta, &hom).unwrap();
        assert!(iso.is_isomorphism(ls));
        assert!(is_distinguished(&c, &mapping_cone(&zeta).unwrap(), 8)
            .unwrap()
            .is_some());
    }
}

#[test]
fn homotopy_mutations_are_detected() {
    let c = class("skewpoly(8; frob)");
    let ls = c.ls();
    let ring = ls.ring().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = c.delta(c.residues()[0], 2);
    let id = TriangleMorphism::identity(&d);
    for _ in 0..30 {
        let mut rand = |r, k| {
            let e = (0..r * k)
                .map(|_| ring.element(rng.gen_range(0..ring.size())))
                .collect();
            Matrix::from_entries(&ring, r, k, e).unwrap()
        };
        let hom = Homotopy {
            theta: rand(2, 2),
            phi: rand(2, 2),
            psi: rand(2, 2),
        };
        let (df, dg, dh) = hom.differences(&d, &d).unwrap();
        let other = TriangleMorphism::new(
            d.clone(),
            d.clone(),
            id.f.sub(&df).unwrap(),
            id.g.sub(&dg).unwrap(),
            id.h.sub(&dh).unwrap(),
        )
        .unwrap();
        assert!(is_homotopy(&id, &other, &hom).unwrap());
        let mut bad = hom.clone();
        let i = rng.gen_range(0..2);
        let j = rng.gen_range(0..2);
        let which = rng.gen_range(0..3);
        let slot = match which {
            0 => &mut bad.theta,
            1 => &mut bad.phi,
            _ => &mut bad.psi,
        };
        slot[(i, j)] = ring.add(slot[(i, j)], ring.one());
        assert!(!is_homotopy(&id, &other, &bad).unwrap());
    }
}

/// All `(theta, phi, psi)` of the right shapes.
fn brute_nullhomotopic(c: &DistinguishedClass, t: &Triangle) -> bool {
    let ring = c.ls().ring();
    let (a, b, cc) = t.ranks();
    let total = b * a + cc * b + a * cc;
    let count = ring.size().pow(total as u32);
    let id = TriangleMorphism::identity(t);
    let zero = TriangleMorphism::zero(t, t);
    (0..count).any(|mut code| {
        let mut take = |r: usize, k: usize| {
            let e = (0..r * k)
                .map(|_| {
                    let v = ring.element(code % ring.size());
                    code /= ring.size();
                    v
                })
                .collect();
            Matrix::from_entries(ring, r, k, e).unwrap()
        };
        let hom = Homotopy {
            theta: take(b, a),
            phi: take(cc, b),
            psi: take(a, cc),
        };
        is_homotopy(&id, &zero, &hom).unwrap()
    })
}

#[test]
fn nullhomotopy_matches_brute_force_over_z4() {
    let c = z4();
    let two = z4_index(2);
    assert!(nullhomotopy_solve(c.ls(), &tri(&c, two, two, two)).unwrap().is_none());
    assert!(nullhomotopy_solve(c.ls(), &Triangle::zero(c.ls())).unwrap().is_some());
    let mut contractible = 0;
    for (a, b, cc) in [(1, 1, 1), (1, 1, 0), (0, 1, 1), (1, 0, 1)] {
        let ring = c.ls().ring();
        let all = |r: usize, k: usize| -> Vec<Matrix> {
            let n = ring.size().pow((r * k) as u32);
            (0..n)
                .map(|i| {
                    let e = if r * k == 1 { vec![ring.element(i)] } else { vec![] };
                    Matrix::from_entries(ring, r, k, e).unwrap()
                })
                .collect()
        };
        for u in all(a, b) {
            for v in all(b, cc) {
                for w in all(cc, a) {
                    let t = Triangle::new(u.clone(), v.clone(), w.clone()).unwrap();
                    let solved = nullhomotopy_solve(c.ls(), &t).unwrap();
                    assert_eq!(solved.is_some(), brute_nullhomotopic(&c, &t), "{t:?}");
                    contractible += solved.is_some() as usize;
                }
            }
        }
    }
    assert!(contractible > 0);
}

#[test]
fn completions() {
    let c = z4();
    let two = z4_index(2);
    let (t, w) = complete_morphism(&c, &m(&c, &[&[two]])).unwrap();
    assert_eq!(t, tri(&c, two, two, two));
    assert!(w.verify(&c));
    let (t, _) = complete_morphism(&c, &m(&c, &[&[z4_index(1)]])).unwrap();
    assert_eq!(t.ranks(), (1, 1, 0));
    assert!(nullhomotopy_solve(c.ls(), &t).unwrap().is_some());
    let (t, _) = complete_morphism(&c, &m(&c, &[&[0]])).unwrap();
    assert_eq!(t.ranks(), (1, 1, 2));
    assert!(t.composites_vanish());
    assert!(is_distinguished(&c, &t, 4).unwrap().is_some());
}

#[test]
fn completion_starts_with_f_and_is_distinguished() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for spec in ["w2(4)", "skewpoly(8; frob)", "gf(8)", "w2(2)"] {
        let c = class(spec);
        let ring = c.ls().ring().clone();
        for _ in 0..25 {
            let (a, b) = (rng.gen_range(0..4), rng.gen_range(0..4));
            let e = (0..a * b)
                .map(|_| ring.element(rng.gen_range(0..ring.size())))
                .collect();
            let f = Matrix::from_entries(&ring, a, b, e).unwrap();
            let (t, w) = complete_morphism(&c, &f).unwrap();
            assert_eq!(t.u, f);
            assert!(w.verify(&c));
            assert!(is_distinguished(&c, &t, 8).unwrap().is_some(), "{spec} {f:?}");
        }
    }
}

#[test]
fn membership_examples() {
    let c = z4();
    let two = z4_index(2);
    let w = is_distinguished(&c, &tri(&c, two, two, two), 4).unwrap().unwrap();
    assert_eq!(w.shape.n(), 1);
    assert!(is_distinguished(&c, &tri(&c, two, 0, two), 4).unwrap().is_none());
    let t = Triangle::new(
        m(&c, &[&[z4_index(3)]]),
        Matrix::zeros(c.ls().ring(), 1, 0),
        Matrix::zeros(c.ls().ring(), 0, 1),
    )
    .unwrap();
    let w = is_distinguished(&c, &t, 4).unwrap().unwrap();
    assert!(w.shape.is_contractible());
    assert!(matches!(
        is_distinguished(&c, &c.delta(c.residues()[0], 3), 2),
        Err(TriangleError::BudgetExceeded { .. })
    ));
}

#[test]
fn wrong_residue_is_not_distinguished() {
    // Over w2(4) the generating triangles of distinct residues are not isomorphic.
    let c = class("w2(4)");
    let ls = c.ls_arc().clone();
    let others: Vec<_> = ls
        .admissible_elements()
        .into_iter()
        .filter(|r| !c.residues().contains(r))
        .collect();
    assert!(!others.is_empty());
    for r in others {
        let other = DistinguishedClass::mixed(ls.clone(), vec![r]);
        assert!(is_distinguished(&c, &other.delta(r, 1), 4).unwrap().is_none());
    }
}

#[test]
fn identity_square_on_delta() {
    let c = z4();
    let two = z4_index(2);
    let d = tri(&c, two, two, two);
    let one = m(&c, &[&[z4_index(1)]]);
    let phi = fill_square(&c, &d, &d, &one, &one, 4).unwrap();
    assert_eq!(c.ls().project(phi.h[(0, 0)]), FieldElem::ONE);
}

#[test]
fn twisted_filler_over_skewpoly() {
    let c = class("skewpoly(8; frob)");
    let ls = c.ls();
    let d = ls.d();
    let g = d.primitive_element();
    let d1 = c.delta(c.residues()[0], 1);
    let beta = Matrix::scalar(ls.ring(), 1, ls.lift(g));
    let alpha = Matrix::scalar(ls.ring(), 1, ls.lift(d.pow(g, 2)));
    let phi = fill_square(&c, &d1, &d1, &alpha, &beta, 4).unwrap();
    assert_eq!(ls.project(phi.h[(0, 0)]), d.pow(g, 4));
    assert!(is_distinguished(&c, &mapping_cone(&phi).unwrap(), 4).unwrap().is_some());
}

#[test]
fn filler_into_contractible_target() {
    let c = z4();
    let two = z4_index(2);
    let d = tri(&c, two, two, two);
    let e = elementary_contractible(c.ls(), ElementaryShape::First, 1);
    let x = m(&c, &[&[two]]);
    let one = m(&c, &[&[z4_index(1)]]);
    let phi = fill_square(&c, &d, &e, &x, &one, 4).unwrap();
    assert_eq!(phi.h.shape(), (1, 0));
    let zero = TriangleMorphism::zero(&d, &e);
    assert!(homotopy_solve(c.ls(), &phi, &zero).unwrap().is_some());
}

#[test]
fn delta_fillers_preserve_invertibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for spec in ["w2(4)", "skewpoly(8; frob)", "skewpoly(64; frob^2)"] {
        let c = class(spec);
        let ls = c.ls();
        let ring = ls.ring().clone();
        let d = c.delta(c.residues()[0], 2);
        let mut done = 0;
        while done < 10 {
            let e = (0..4).map(|_| ring.element(rng.gen_range(0..ring.size()))).collect();
            let f = Matrix::from_entries(&ring, 2, 2, e).unwrap();
            if !crate::freemod::is_invertible(ls, &f) {
                continue;
            }
            let Some(g) =
                crate::freemod::solve_linear(ls, &d.u, &f.mul(&d.u).unwrap(), crate::freemod::Side::Right).unwrap()
            else {
                continue;
            };
            let phi = fill_square(&c, &d, &d, &f, &g, 4).unwrap();
            assert!(phi.is_isomorphism(ls), "{spec}");
            done += 1;
        }
    }
}

#[test]
fn semisimple_suite_passes() {
    let c = class("gf(4)");
    let report = axiom_suite(
        &c,
        SuiteConfig {
            max_rank: 2,
            samples: 25,
            ..SuiteConfig::default()
        },
    );
    assert!(report.passed(), "{:?}", report.counterexamples);
    assert!(report.tally("A3.cone").passed > 0);
}

#[test]
fn exhaustive_z4_suite() {
    let report = axiom_suite(
        &z4(),
        SuiteConfig {
            max_rank: 1,
            ..SuiteConfig::default()
        },
    );
    assert!(report.exhaustive);
    assert!(report.passed(), "{:?}", report.counterexamples);
    assert_eq!(report.tally("A1.completion").passed, 7);
    assert!(report.tally("A3.filler").passed > 10);
}

#[test]
fn sampled_suite_is_deterministic() {
    let c = class("skewpoly(8; frob)");
    let cfg = SuiteConfig {
        max_rank: 2,
        samples: 15,
        seed: 4,
        ..SuiteConfig::default()
    };
    let a = axiom_suite(&c, cfg.clone());
    let b = axiom_suite(&c, cfg);
    assert!(a.passed());
    assert_eq!(a.checks, b.checks);
}

#[test]
fn mixed_class_is_flagged() {
    let ring = Ring::parse("w2(4)").unwrap();
    let ls = Arc::new(LocalStructure::new(&ring).unwrap());
    let rs = ls.admissible_elements();
    let c = DistinguishedClass::mixed(ls, vec![rs[0], rs[1]]);
    let report = axiom_suite(
        &c,
        SuiteConfig {
            max_rank: 1,
            samples: 10,
            ..SuiteConfig::default()
        },
    );
    assert!(report.tally("A3.filler").failed > 0);
    assert!(report.counterexamples.iter().any(|ce| ce.check == "A3.filler"));
}
