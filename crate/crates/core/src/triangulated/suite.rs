use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::freemod::{is_exact, is_invertible, solve_linear, Matrix, Side};
use crate::json::{matrix_to_json, morphism_to_json, triangle_to_json};
use crate::rings::RingElem;

use super::fill::fill_square_with;
use super::standard::{complete_morphism, is_distinguished, DistinguishedClass, DistinguishedWitness, StandardShape};
use super::{
    elementary_contractible, homotopy_cone_iso, homotopy_solve, mapping_cone, nullhomotopy_solve, ElementaryShape,
    Homotopy, Triangle, TriangleError, TriangleMorphism,
};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub max_rank: usize,
    pub samples: usize,
    pub seed: u64,
    /// Largest rank handed to membership tests; cones double the rank.
    pub budget: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_rank: 2,
            samples: 200,
            seed: 0,
            budget: 8,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub check: String,
    pub seed: u64,
    /// Sample index, or the running case number in exhaustive mode.
    pub case: usize,
    pub detail: String,
    /// Command that reproduces the violation when given `instance` as input.
    pub replay: &'static str,
    pub instance: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub ring: String,
    pub residues: Vec<u32>,
    pub exhaustive: bool,
    pub config: SuiteConfig,
    pub checks: BTreeMap<String, CheckTally>,
    pub counterexamples: Vec<Counterexample>,
}

impl AxiomReport {
    pub fn violations(&self) -> usize {
        self.checks.values().map(|t| t.failed).sum()
    }

    pub fn cases(&self) -> usize {
        self.checks.values().map(|t| t.passed + t.failed).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn tally(&self, check: &str) -> CheckTally {
        self.checks.get(check).cloned().unwrap_or_default()
    }
}

const MAX_COUNTEREXAMPLES: usize = 25;

fn replay_command(check: &str) -> &'static str {
    match check {
        "A1.completion" => "complete",
        "A3.filler" => "fill",
        "A3.cone" | "homotopy.cone_iso" => "cone",
        "contractible.nullhomotopic" | "contractible.identity_cone" => "contract",
        _ => "distinguished",
    }
}

struct Suite<'a> {
    class: &'a DistinguishedClass,
    cfg: SuiteConfig,
    rng: ChaCha8Rng,
    case: usize,
    report: AxiomReport,
}

type Outcome = std::result::Result<(), (String, Value)>;

impl<'a> Suite<'a> {
    fn record(&mut self, check: &str, outcome: Outcome) {
        let tally = self.report.checks.entry(check.to_string()).or_default();
        match outcome {
            Ok(()) => tally.passed += 1,
            Err((detail, instance)) => {
                tally.failed += 1;
                if self.report.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    self.report.counterexamples.push(Counterexample {
                        check: check.to_string(),
                        seed: self.cfg.seed,
                        case: self.case,
                        detail,
                        replay: replay_command(check),
                        instance,
                    });
                }
            }
        }
    }

    fn skip(&mut self, check: &str) {
        self.report.checks.entry(check.to_string()).or_default().skipped += 1;
    }

    fn ls(&self) -> &crate::structure::LocalStructure {
        self.class.ls()
    }

    /// Membership, with a budget overrun recorded as a skip.
    fn member(&mut self, check: &str, t: &Triangle) -> Option<Option<DistinguishedWitness>> {
        match is_distinguished(self.class, t, self.cfg.budget) {
            Ok(w) => Some(w),
            Err(TriangleError::BudgetExceeded { .. }) => {
                self.skip(check);
                None
            }
            Err(e) => {
                self.record(
                    check,
                    Err((format!("membership test failed: {e}"), triangle_to_json(t))),
                );
                None
            }
        }
    }

    fn expect_distinguished(&mut self, check: &str, t: &Triangle) -> Option<DistinguishedWitness> {
        let w = self.member(check, t)?;
        let outcome = match &w {
            Some(w) if w.verify(self.class) => Ok(()),
            Some(_) => Err(("witness failed verification".to_string(), triangle_to_json(t))),
            None => Err(("triangle is not distinguished".to_string(), triangle_to_json(t))),
        };
        self.record(check, outcome);
        w
    }

    fn completion(&mut self, f: &Matrix) {
        let outcome = match complete_morphism(self.class, f) {
            Ok((t, _)) if t.u != *f => Err(("completed triangle does not start with f".into(), matrix_to_json(f))),
            Ok((t, _)) => {
                self.expect_distinguished("A1.completion", &t);
                return;
            }
            Err(e) => Err((e.to_string(), matrix_to_json(f))),
        };
        self.record("A1.completion", outcome);
    }

    fn exactness(&mut self, t: &Triangle) {
        let mut outcome = Ok(());
        for (p, q) in [(&t.u, &t.v), (&t.v, &t.w), (&t.w, &t.u)] {
            match is_exact(self.class.ls(), p, q) {
                Ok(true) => {}
                Ok(false) => outcome = Err(("distinguished triangle is not exact".to_string(), triangle_to_json(t))),
                Err(e) => outcome = Err((e.to_string(), triangle_to_json(t))),
            }
        }
        self.record("distinguished.exact", outcome);
    }

    fn random_elem(&mut self) -> RingElem {
        let ring = self.ls().ring().clone();
        ring.element(self.rng.gen_range(0..ring.size()))
    }

    fn random_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let ring = self.ls().ring().clone();
        let entries = (0..rows * cols).map(|_| self.random_elem()).collect();
        Matrix::from_entries(&ring, rows, cols, entries).expect("sized")
    }

    /// Mixes generic, radical and sparse matrices so that all normal form
    /// blocks occur.
    fn random_map(&mut self, rows: usize, cols: usize) -> Matrix {
        let m = self.random_matrix(rows, cols);
        match self.rng.gen_range(0..4) {
            0 => {
                let x = self.ls().x().unwrap_or(self.ls().ring().zero());
                m.scale_right(x)
            }
            1 => {
                let mask = self.random_matrix(rows, cols);
                let ring = self.ls().ring().clone();
                let mut out = m.clone();
                for i in 0..rows {
                    for j in 0..cols {
                        if ring.index(mask[(i, j)]).is_multiple_of(2) {
                            out[(i, j)] = ring.zero();
                        }
                    }
                }
                out
            }
            _ => m,
        }
    }

    fn random_invertible(&mut self, n: usize) -> Matrix {
        loop {
            let m = self.random_matrix(n, n);
            if is_invertible(self.ls(), &m) {
                return m;
            }
        }
    }

    fn random_shape(&mut self) -> StandardShape {
        let r = self.cfg.max_rank;
        let residues = self.class.residues().to_vec();
        loop {
            let n = if residues.is_empty() {
                0
            } else {
                self.rng.gen_range(0..=r)
            };
            let (m, v, w) = (
                self.rng.gen_range(0..=r),
                self.rng.gen_range(0..=r),
                self.rng.gen_range(0..=r),
            );
            let shape = StandardShape {
                m,
                deltas: (0..n).map(|_| *residues.choose(&mut self.rng).unwrap()).collect(),
                v,
                w,
            };
            let (a, b, c) = shape.ranks();
            if a.max(b).max(c) <= r {
                return shape;
            }
        }
    }

    /// A random isomorphic image of a random standard triangle.
    fn random_distinguished(&mut self) -> Triangle {
        let shape = self.random_shape();
        let s = shape.triangle(self.class);
        let (a, b, c) = s.ranks();
        let (f, g, h) = (
            self.random_invertible(a),
            self.random_invertible(b),
            self.random_invertible(c),
        );
        s.transport(self.ls(), &f, &g, &h).expect("invertible")
    }

    fn iso_closure(&mut self, t: &Triangle) {
        let (a, b, c) = t.ranks();
        let (f, g, h) = (
            self.random_invertible(a),
            self.random_invertible(b),
            self.random_invertible(c),
        );
        match t.transport(self.ls(), &f, &g, &h) {
            Ok(t2) => {
                self.expect_distinguished("A1.isomorphism_closure", &t2);
            }
            Err(e) => self.record("A1.isomorphism_closure", Err((e.to_string(), triangle_to_json(t)))),
        }
    }

    fn rotation(&mut self, t: &Triangle) {
        let r = t.rotate();
        self.expect_distinguished("A2.rotation", &r);
    }

    /// A commuting first square `alpha u2 = u1 beta`.
    fn random_square(&mut self, t1: &Triangle, t2: &Triangle) -> (Matrix, Matrix) {
        let (a1, _, c1) = t1.ranks();
        let (a2, b2, _) = t2.ranks();
        let ring = self.ls().ring().clone();
        for _ in 0..12 {
            let alpha = self.random_map(a1, a2);
            let target = alpha.mul(&t2.u).expect("shapes");
            if let Ok(Some(beta0)) = solve_linear(self.ls(), &t1.u, &target, Side::Right) {
                let n = self.random_matrix(c1, b2);
                let beta = beta0.add(&t1.v.mul(&n).expect("shapes")).expect("shapes");
                return (alpha, beta);
            }
        }
        let n = self.random_matrix(c1, b2);
        (Matrix::zeros(&ring, a1, a2), t1.v.mul(&n).expect("shapes"))
    }

    fn random_homotopy(&mut self, s: &Triangle, t: &Triangle) -> Homotopy {
        let (a, b, c) = s.ranks();
        let (a2, b2, c2) = t.ranks();
        Homotopy {
            theta: self.random_matrix(b, a2),
            phi: self.random_matrix(c, b2),
            psi: self.random_matrix(a, c2),
        }
    }

    fn square(
        &mut self,
        (t1, w1): (&Triangle, &DistinguishedWitness),
        (t2, w2): (&Triangle, &DistinguishedWitness),
        alpha: &Matrix,
        beta: &Matrix,
    ) {
        let instance = || {
            json!({
                "ring": t1.u.ring().spec().to_string(),
                "source": triangle_to_json(t1),
                "target": triangle_to_json(t2),
                "alpha": matrix_to_json(alpha),
                "beta": matrix_to_json(beta),
            })
        };
        let phi = match fill_square_with(self.class, (t1, w1), (t2, w2), alpha, beta) {
            Ok(phi) => {
                self.record("A3.filler", Ok(()));
                phi
            }
            Err(e) => {
                self.record("A3.filler", Err((e.to_string(), instance())));
                return;
            }
        };
        match mapping_cone(&phi) {
            Ok(cone) => match self.member("A3.cone", &cone) {
                Some(Some(_)) => self.record("A3.cone", Ok(())),
                Some(None) => self.record(
                    "A3.cone",
                    Err(("mapping cone is not distinguished".into(), morphism_to_json(&phi))),
                ),
                None => {}
            },
            Err(e) => self.record("A3.cone", Err((e.to_string(), morphism_to_json(&phi)))),
        }
        if w1.shape.is_contractible() || w2.shape.is_contractible() {
            let zero = TriangleMorphism::zero(t1, t2);
            let outcome = match homotopy_solve(self.ls(), &phi, &zero) {
                Ok(Some(_)) => Ok(()),
                Ok(None) => Err((
                    "morphism with contractible end is not nullhomotopic".into(),
                    morphism_to_json(&phi),
                )),
                Err(e) => Err((e.to_string(), morphism_to_json(&phi))),
            };
            self.record("contractible.nullhomotopic", outcome);
        }
        self.homotopic_cones(&phi);
    }

    fn homotopic_cones(&mut self, phi: &TriangleMorphism) {
        let hom = self.random_homotopy(&phi.source, &phi.target);
        let perturbed = hom.differences(&phi.source, &phi.target).and_then(|(df, dg, dh)| {
            TriangleMorphism::new(
                phi.source.clone(),
                phi.target.clone(),
                phi.f.sub(&df)?,
                phi.g.sub(&dg)?,
                phi.h.sub(&dh)?,
            )
        });
        let outcome = perturbed
            .and_then(|phi2| homotopy_cone_iso(phi, &phi2, &hom))
            .map_err(|e| (e.to_string(), morphism_to_json(phi)))
            .and_then(|iso| {
                if iso.is_isomorphism(self.ls()) {
                    Ok(())
                } else {
                    Err(("cone comparison map is not invertible".into(), morphism_to_json(phi)))
                }
            });
        self.record("homotopy.cone_iso", outcome);
    }

    fn contractible_cone(&mut self, t: &Triangle) {
        let id = TriangleMorphism::identity(t);
        let Ok(cone) = mapping_cone(&id) else { return };
        let outcome = match nullhomotopy_solve(self.ls(), &cone) {
            Ok(Some(_)) => Ok(()),
            Ok(None) => Err((
                "cone of an identity is not contractible".into(),
                triangle_to_json(&cone),
            )),
            Err(e) => Err((e.to_string(), triangle_to_json(&cone))),
        };
        self.record("contractible.identity_cone", outcome);
        self.expect_distinguished("contractible.distinguished", &cone);
    }

    fn generators(&mut self) {
        let ls = self.ls().clone();
        let ring = ls.ring().clone();
        let one = Matrix::identity(&ring, 1);
        for shape in ElementaryShape::ALL {
            for n in 0..=self.cfg.max_rank {
                let e = elementary_contractible(&ls, shape, n);
                self.expect_distinguished("A1.elementary", &e);
            }
        }
        let residues = self.class.residues().to_vec();
        for &r in &residues {
            let d = self.class.delta(r, 1);
            let rot = d.rotate();
            let h = Matrix::scalar(&ring, 1, ls.lift(r));
            let outcome = TriangleMorphism::new(d.clone(), rot, one.clone(), one.clone(), h)
                .map_err(|e| (e.to_string(), triangle_to_json(&d)))
                .and_then(|m| {
                    if m.is_isomorphism(&ls) {
                        Ok(())
                    } else {
                        Err(("not invertible".into(), triangle_to_json(&d)))
                    }
                });
            self.record("A2.generator_iso", outcome);
        }
        // Identity squares between generating triangles of every pair of residues.
        for &r1 in &residues {
            for &r2 in &residues {
                let (d1, d2) = (self.class.delta(r1, 1), self.class.delta(r2, 1));
                let (Some(Some(w1)), Some(Some(w2))) = (self.member("A3.filler", &d1), self.member("A3.filler", &d2))
                else {
                    continue;
                };
                self.square((&d1, &w1), (&d2, &w2), &one, &one);
            }
        }
    }

    fn all_matrices(&self, rows: usize, cols: usize) -> Vec<Matrix> {
        let ring = self.ls().ring();
        let count = ring.size().pow((rows * cols) as u32);
        (0..count)
            .map(|mut code| {
                let entries = (0..rows * cols)
                    .map(|_| {
                        let e = ring.element(code % ring.size());
                        code /= ring.size();
                        e
                    })
                    .collect();
                Matrix::from_entries(ring, rows, cols, entries).expect("sized")
            })
            .collect()
    }

    fn exhaustive(&mut self) {
        let r = self.cfg.max_rank;
        for a in 0..=r {
            for b in 0..=r {
                for f in self.all_matrices(a, b) {
                    self.case += 1;
                    self.completion(&f);
                }
            }
        }
        let mut distinguished = Vec::new();
        for a in 0..=r {
            for b in 0..=r {
                for c in 0..=r {
                    let (us, vs, ws) = (
                        self.all_matrices(a, b),
                        self.all_matrices(b, c),
                        self.all_matrices(c, a),
                    );
                    for u in &us {
                        for v in &vs {
                            for w in &ws {
                                self.case += 1;
                                let t = Triangle {
                                    u: u.clone(),
                                    v: v.clone(),
                                    w: w.clone(),
                                };
                                if !t.composites_vanish() {
                                    continue;
                                }
                                self.classify_triangle(t, &mut distinguished);
                            }
                        }
                    }
                }
            }
        }
        for (t1, w1) in &distinguished {
            for (t2, w2) in &distinguished {
                let (a1, b1, _) = t1.ranks();
                let (a2, b2, _) = t2.ranks();
                for alpha in self.all_matrices(a1, a2) {
                    for beta in self.all_matrices(b1, b2) {
                        if alpha.mul(&t2.u).expect("shapes") != t1.u.mul(&beta).expect("shapes") {
                            continue;
                        }
                        self.case += 1;
                        self.square((t1, w1), (t2, w2), &alpha, &beta);
                    }
                }
            }
        }
    }

    /// Exhaustive-mode checks on one triangle with vanishing composites.
    fn classify_triangle(&mut self, t: Triangle, distinguished: &mut Vec<(Triangle, DistinguishedWitness)>) {
        let Some(member) = self.member("A2.rotation", &t) else {
            return;
        };
        let contractible = nullhomotopy_solve(self.ls(), &t).ok().flatten().is_some();
        if contractible {
            let outcome = if member.is_some() {
                Ok(())
            } else {
                Err(("contractible but not distinguished".into(), triangle_to_json(&t)))
            };
            self.record("contractible.distinguished", outcome);
        }
        match member {
            Some(w) => {
                let ok = w.verify(self.class);
                self.record(
                    "A1.witness",
                    if ok {
                        Ok(())
                    } else {
                        Err(("witness failed verification".into(), triangle_to_json(&t)))
                    },
                );
                self.exactness(&t);
                self.rotation(&t);
                self.iso_closure(&t);
                self.contractible_cone(&t);
                distinguished.push((t, w));
            }
            None => {
                // A.2 also asks that a rotation of a non-member is a non-member.
                if let Some(rot) = self.member("A2.rotation_reflects", &t.rotate()) {
                    let outcome = if rot.is_none() {
                        Ok(())
                    } else {
                        Err(("rotation of a non-member is distinguished".into(), triangle_to_json(&t)))
                    };
                    self.record("A2.rotation_reflects", outcome);
                }
            }
        }
    }

    fn sampled(&mut self) {
        let r = self.cfg.max_rank;
        for i in 0..self.cfg.samples {
            self.case = i;
            let (a, b) = (self.rng.gen_range(0..=r), self.rng.gen_range(0..=r));
            let f = self.random_map(a, b);
            self.completion(&f);

            let t1 = self.random_distinguished();
            let Some(w1) = self.expect_distinguished("A1.isomorphism_closure", &t1) else {
                continue;
            };
            self.exactness(&t1);
            self.rotation(&t1);
            self.iso_closure(&t1);
            self.contractible_cone(&t1);

            let t2 = if self.rng.gen_bool(0.5) {
                t1.clone()
            } else {
                self.random_distinguished()
            };
            let Some(w2) = self.member("A3.filler", &t2).flatten() else {
                continue;
            };
            let (alpha, beta) = self.random_square(&t1, &t2);
            self.square((&t1, &w1), (&t2, &w2), &alpha, &beta);
        }
    }
}

/// Runs the axiom checks for the class. Rank at most one over a ring of at most
/// four elements is covered exhaustively; otherwise `samples` seeded instances
/// are drawn.
pub fn axiom_suite(class: &DistinguishedClass, cfg: SuiteConfig) -> AxiomReport {
    let ring = class.ls().ring().clone();
    let exhaustive = ring.size() <= 4 && cfg.max_rank <= 1;
    let report = AxiomReport {
        ring: ring.spec().to_string(),
        residues: class.residues().iter().map(|r| r.0).collect(),
        exhaustive,
        config: cfg.clone(),
        checks: BTreeMap::new(),
        counterexamples: Vec::new(),
    };
    let mut suite = Suite {
        class,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg,
        case: 0,
        report,
    };
    suite.generators();
    if exhaustive {
        suite.exhaustive();
    } else {
        suite.sampled();
    }
    suite.report
}
