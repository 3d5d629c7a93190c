use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::rings::Ring;

fn setup(spec: &str) -> (Arc<Ring>, LocalStructure) {
    let ring = Ring::parse(spec).unwrap();
    let ls = LocalStructure::new(&ring).unwrap();
    (ring, ls)
}

fn random_matrix(ring: &Arc<Ring>, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let entries = (0..rows * cols)
        .map(|_| ring.element(rng.gen_range(0..ring.size())))
        .collect();
    Matrix::from_entries(ring, rows, cols, entries).unwrap()
}

/// Matrices with entries in the maximal ideal, to exercise the second normal form stage.
fn random_radical_matrix(ls: &LocalStructure, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let d = ls.d();
    let entries = (0..rows * cols)
        .map(|_| ls.times_x(FieldElem(rng.gen_range(0..d.order()))))
        .collect();
    Matrix::from_entries(ls.ring(), rows, cols, entries).unwrap()
}

const RINGS: [&str; 5] = ["gf(4)", "w2(2)", "w2(3)", "skewpoly(8; frob)", "skewpoly(4; id)"];

#[test]
fn inverse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in RINGS {
        let (ring, ls) = setup(spec);
        let mut inverted = 0;
        for _ in 0..60 {
            let n = rng.gen_range(1..=3);
            let a = random_matrix(&ring, &mut rng, n, n);
            match invert(&ls, &a) {
                Ok(b) => {
                    inverted += 1;
                    assert_eq!(a.mul(&b).unwrap(), Matrix::identity(&ring, n));
                    assert!(is_invertible(&ls, &a));
                }
                Err(MatrixError::NotInvertible) => assert!(!is_invertible(&ls, &a)),
                Err(e) => panic!("{spec}: {e}"),
            }
        }
        assert!(inverted > 0, "{spec}");
    }
}

#[test]
fn normal_form_is_verified() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in RINGS {
        let (ring, ls) = setup(spec);
        for trial in 0..40 {
            let (r, c) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
            let a = if trial % 2 == 0 {
                random_matrix(&ring, &mut rng, r, c)
            } else {
                random_radical_matrix(&ls, &mut rng, r, c)
            };
            let nf = normal_form(&ls, &a).unwrap();
            assert_eq!(nf.u.mul(&a).unwrap().mul(&nf.v).unwrap(), nf.diagonal(&ls));
            assert!(nf.unit_rank + nf.x_rank <= r.min(c));
        }
    }
}

#[test]
fn normal_form_of_x_times_identity() {
    let (ring, ls) = setup("skewpoly(8; frob)");
    let a = Matrix::scalar(&ring, 3, ls.x().unwrap());
    let nf = normal_form(&ls, &a).unwrap();
    assert_eq!((nf.unit_rank, nf.x_rank), (0, 3));
}

/// Brute force over every candidate matrix.
fn brute_solvable(ring: &Arc<Ring>, a: &Matrix, c: &Matrix, side: Side, xr: usize, xc: usize) -> bool {
    let all = vectors(ring, xr * xc).unwrap();
    all.into_iter().any(|e| {
        let x = Matrix::from_entries(ring, xr, xc, e).unwrap();
        match side {
            Side::Left => x.mul(a).unwrap() == *c,
            Side::Right => a.mul(&x).unwrap() == *c,
        }
    })
}

#[test]
fn solver_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in ["w2(2)", "skewpoly(4; id)", "w2(3)"] {
        let (ring, ls) = setup(spec);
        let mut found = [0usize; 2];
        for trial in 0..80 {
            let side = if trial % 2 == 0 { Side::Left } else { Side::Right };
            let (ar, ac) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
            let a = random_radical_matrix(&ls, &mut rng, ar, ac)
                .add(&random_matrix(&ring, &mut rng, ar, ac).scale_right(ring.from_int((trial % 3) as i64)))
                .unwrap();
            let (c, xr, xc) = match side {
                Side::Left => (random_matrix(&ring, &mut rng, 1, ac), 1, ar),
                Side::Right => (random_matrix(&ring, &mut rng, ar, 1), ac, 1),
            };
            let expected = brute_solvable(&ring, &a, &c, side, xr, xc);
            let got = solve_linear(&ls, &a, &c, side).unwrap();
            assert_eq!(got.is_some(), expected, "{spec} {a:?} {c:?}");
            found[expected as usize] += 1;
            if let Some(x) = got {
                match side {
                    Side::Left => assert_eq!(x.mul(&a).unwrap(), c),
                    Side::Right => assert_eq!(a.mul(&x).unwrap(), c),
                }
            }
        }
        assert!(found[0] > 0 && found[1] > 0, "{spec}: {found:?}");
    }
}

#[test]
fn solver_handles_twisted_unknowns() {
    // X * x = x * t needs X = lift(sigma(t)) modulo the annihilator.
    let (ring, ls) = setup("skewpoly(8; frob)");
    let x = ls.x().unwrap();
    let t = ls.lift(FieldElem(2));
    let a = Matrix::scalar(&ring, 1, x);
    let c = Matrix::scalar(&ring, 1, ring.mul(x, t));
    let sol = solve_linear(&ls, &a, &c, Side::Left).unwrap().unwrap();
    assert_eq!(ls.project(sol[(0, 0)]), ls.sigma_apply(FieldElem(2)));
}

#[test]
fn exactness_of_x_sequence() {
    let (ring, ls) = setup("w2(2)");
    let x = Matrix::scalar(&ring, 1, ls.x().unwrap());
    assert!(exactness_check(&x, &x).unwrap());
    let one = Matrix::identity(&ring, 1);
    let zero = Matrix::zeros(&ring, 1, 1);
    assert!(exactness_check(&one, &zero).unwrap());
    assert!(!exactness_check(&zero, &zero).unwrap());
    assert!(!exactness_check(&x, &zero).unwrap());
}

#[test]
fn exactness_guard() {
    let (ring, _) = setup("skewpoly(16; frob)");
    let a = Matrix::zeros(&ring, 3, 3);
    assert!(matches!(exactness_check(&a, &a), Err(MatrixError::TooLarge(_))));
}

#[test]
fn mixed_rings_rejected() {
    let (r1, _) = setup("w2(2)");
    let (r2, _) = setup("gf(4)");
    let a = Matrix::identity(&r1, 1);
    let b = Matrix::identity(&r2, 1);
    assert_eq!(a.mul(&b), Err(MatrixError::MixedRings));
    assert!(matches!(
        a.mul(&Matrix::identity(&r1, 2)),
        Err(MatrixError::ShapeMismatch(_))
    ));
}

#[test]
fn fp_kernel() {
    let mut m = FpMatrix::zeros(3, 1, 3);
    m.set(0, 0, 1);
    m.set(0, 1, 2);
    let (z, kernel) = m.solve(&[1]).unwrap();
    assert_eq!((z[0] + 2 * z[1]) % 3, 1);
    assert_eq!(kernel.len(), 2);
    for v in kernel {
        assert_eq!((v[0] + 2 * v[1]) % 3, 0);
    }
}

fn all_matrices(ring: &Arc<Ring>, rows: usize, cols: usize) -> Vec<Matrix> {
    vectors_within(ring, rows * cols, 1 << 16)
        .unwrap()
        .into_iter()
        .map(|e| Matrix::from_entries(ring, rows, cols, e).unwrap())
        .collect()
}

#[test]
fn rank_exactness_agrees_with_enumeration() {
    let (ring, ls) = setup("w2(2)");
    let mut exact = 0;
    for (a, b, c) in [
        (1, 1, 1),
        (1, 2, 1),
        (2, 1, 2),
        (2, 2, 1),
        (1, 2, 2),
        (0, 1, 1),
        (1, 1, 0),
    ] {
        for f in all_matrices(&ring, a, b) {
            for g in all_matrices(&ring, b, c) {
                let by_rank = is_exact(&ls, &f, &g).unwrap();
                assert_eq!(by_rank, exactness_check(&f, &g).unwrap(), "{f:?} {g:?}");
                exact += by_rank as usize;
            }
        }
    }
    assert!(exact > 50);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in ["w2(4)", "gf(4)", "skewpoly(9; frob)", "w2(3)"] {
        let (ring, ls) = setup(spec);
        // entries from {0, 1} and the maximal ideal, so composites often vanish
        let pool: Vec<RingElem> = ring
            .elements()
            .filter(|&e| !ring.is_unit(e) || e == ring.one())
            .collect();
        let mut exact = 0;
        for _ in 0..3000 {
            let (a, b, c) = (rng.gen_range(0..3), rng.gen_range(1..3), rng.gen_range(0..3));
            let mut pick = |r, c| {
                let e = (0..r * c).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
                Matrix::from_entries(&ring, r, c, e).unwrap()
            };
            let (f, g) = (pick(a, b), pick(b, c));
            let by_rank = is_exact(&ls, &f, &g).unwrap();
            assert_eq!(by_rank, exactness_check(&f, &g).unwrap(), "{spec}");
            exact += by_rank as usize;
        }
        assert!(exact > 20, "{spec}: {exact}");
    }
}
