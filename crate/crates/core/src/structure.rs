//! Local structure of a ring: premises, residue field, the twist automorphism
//! `sigma_x`, centers, and the classification of triangulations.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::rings::{Ring, RingElem, RingError};
use crate::scalars::{self, FieldElem, GfField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("quotient by the maximal ideal is not a field: {0}")]
    NotAField(String),
    #[error("no s with s*x = x*lift(t) for t = {0}")]
    NoSolution(FieldElem),
    #[error("ring premises fail: {0}")]
    PremisesFailed(String),
    #[error("{0} is not a nonzero element of the maximal ideal")]
    NotAGenerator(RingElem),
    #[error("residue element {0} violates the triangulation conditions")]
    NotAdmissible(FieldElem),
    #[error("not applicable to the {0:?} case")]
    NotApplicable(Case),
    #[error("internal cross-check failed: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: &'static str, failure: Option<String>) -> Self {
        Check {
            name,
            passed: failure.is_none(),
            counterexample: failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PremiseReport {
    pub checks: Vec<Check>,
}

impl PremiseReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn first_failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.counterexample.clone().unwrap_or_default()))
    }
}

/// Locality, `m^2 = 0`, and `m = Rx = xR` for every nonzero `x` in `m`, by enumeration.
pub fn verify_premises(ring: &Ring) -> PremiseReport {
    let m = ring.nonunits();
    let in_m = |a: RingElem| !ring.is_unit(a);
    let mut locality = None;
    'outer: for &a in m {
        for &b in m {
            if !in_m(ring.add(a, b)) {
                locality = Some(format!("{a} + {b} is a unit"));
                break 'outer;
            }
        }
        for r in ring.elements() {
            if !in_m(ring.mul(r, a)) || !in_m(ring.mul(a, r)) {
                locality = Some(format!("{r} * {a} leaves the nonunits"));
                break 'outer;
            }
        }
    }
    let square = m
        .iter()
        .flat_map(|&a| m.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| ring.mul(a, b) != ring.zero())
        .map(|(a, b)| format!("{a} * {b} = {}", ring.mul(a, b)));
    let size = ring.size() as usize;
    let mut target = vec![false; size];
    for &a in m {
        target[ring.index(a)] = true;
    }
    // Rx is inside m once m is an ideal, so equal sizes mean equal sets.
    let covers = |f: &dyn Fn(RingElem) -> RingElem| {
        let mut hit = vec![false; size];
        let mut count = 0;
        for r in ring.elements() {
            let i = ring.index(f(r));
            if !target[i] {
                return false;
            }
            if !hit[i] {
                hit[i] = true;
                count += 1;
            }
        }
        count == m.len()
    };
    let principal = m.iter().filter(|&&x| x != ring.zero()).find_map(|&x| {
        if !covers(&|r| ring.mul(r, x)) {
            Some(format!("Rx != m for x = {x}"))
        } else if !covers(&|r| ring.mul(x, r)) {
            Some(format!("xR != m for x = {x}"))
        } else {
            None
        }
    });
    PremiseReport {
        checks: vec![
            Check::new("nonunits form a two-sided ideal", locality),
            Check::new("m^2 = 0", square),
            Check::new("m = Rx = xR", principal),
        ],
    }
}

/// The residue field `d = R/m`, modeled as an abstract GF, with the projection
/// `[r]` and the canonical section `t -> (t, 0)`.
#[derive(Debug, Clone)]
pub struct ResidueField {
    ring: Arc<Ring>,
    d: Arc<GfField>,
    to_d: Vec<FieldElem>,
    from_d: Vec<FieldElem>,
}

impl ResidueField {
    pub fn field(&self) -> &Arc<GfField> {
        &self.d
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    #[inline]
    pub fn project(&self, r: RingElem) -> FieldElem {
        self.to_d[r.a0.0 as usize]
    }

    #[inline]
    pub fn lift(&self, t: FieldElem) -> RingElem {
        self.ring.constant(self.from_d[t.0 as usize])
    }

    /// All ring elements mapping to `t`.
    pub fn preimage(&self, t: FieldElem) -> impl Iterator<Item = RingElem> + '_ {
        let a0 = self.from_d[t.0 as usize];
        let ones = if self.ring.is_field() {
            1
        } else {
            self.ring.base().order()
        };
        (0..ones).map(move |a1| RingElem { a0, a1: FieldElem(a1) })
    }
}

/// Builds `d` and the isomorphism from the quotient (represented by the `a0`
/// component) onto `GF(p^n)` by matching multiplicative generators.
pub fn residue_field(ring: &Arc<Ring>) -> Result<ResidueField, StructureError> {
    let base = ring.base();
    let quotient_order = ring.size() / ring.nonunits().len() as u64;
    let (p, n) = scalars::prime_power(quotient_order).map_err(|e| StructureError::NotAField(e.to_string()))?;
    let d = Arc::new(scalars::gf_make(p, n).map_err(|e| StructureError::NotAField(e.to_string()))?);
    if d.order() != base.order() || d.characteristic() != base.characteristic() {
        return Err(StructureError::NotAField(
            "quotient order does not match the a0 component".into(),
        ));
    }
    let q = base.order();
    let g = base.primitive_element();
    let mut powers = vec![FieldElem::ZERO; (q - 1) as usize];
    let mut acc = FieldElem::ONE;
    for slot in powers.iter_mut() {
        *slot = acc;
        acc = base.mul(acc, g);
    }
    let first = d.units().filter(|&h| h.0 == g.0);
    let rest = d.units().filter(|&h| h.0 != g.0);
    for h in first.chain(rest) {
        let mut to_d = vec![FieldElem::ZERO; q as usize];
        let mut img = FieldElem::ONE;
        let mut ok = true;
        for &src in &powers {
            if to_d[src.0 as usize] != FieldElem::ZERO {
                ok = false;
                break;
            }
            to_d[src.0 as usize] = img;
            img = d.mul(img, h);
        }
        if !ok || img != FieldElem::ONE {
            continue;
        }
        // Multiplicative by construction; additive iff f(1 + y) = 1 + f(y).
        let additive = base
            .elements()
            .all(|y| to_d[base.add(FieldElem::ONE, y).0 as usize] == d.add(FieldElem::ONE, to_d[y.0 as usize]));
        if !additive {
            continue;
        }
        if q <= 256 {
            let full = base.elements().all(|a| {
                base.elements().all(|b| {
                    to_d[base.add(a, b).0 as usize] == d.add(to_d[a.0 as usize], to_d[b.0 as usize])
                        && to_d[base.mul(a, b).0 as usize] == d.mul(to_d[a.0 as usize], to_d[b.0 as usize])
                })
            });
            if !full {
                return Err(StructureError::NotAField(
                    "candidate isomorphism failed pairwise check".into(),
                ));
            }
        }
        let mut from_d = vec![FieldElem::ZERO; q as usize];
        for (src, &dst) in to_d.iter().enumerate() {
            from_d[dst.0 as usize] = FieldElem(src as u32);
        }
        return Ok(ResidueField {
            ring: ring.clone(),
            d,
            to_d,
            from_d,
        });
    }
    Err(StructureError::NotAField("no field isomorphism found".into()))
}

/// The automorphism `sigma_x` of `d`, defined by `x * lift(t) = lift(sigma_x(t)) * x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaAut {
    pub x: RingElem,
    table: Vec<FieldElem>,
    inverse: Vec<FieldElem>,
}

impl SigmaAut {
    #[inline]
    pub fn apply(&self, t: FieldElem) -> FieldElem {
        self.table[t.0 as usize]
    }

    #[inline]
    pub fn apply_inv(&self, t: FieldElem) -> FieldElem {
        self.inverse[t.0 as usize]
    }

    pub fn apply_pow(&self, t: FieldElem, k: u32) -> FieldElem {
        (0..k).fold(t, |acc, _| self.apply(acc))
    }

    pub fn table(&self) -> &[FieldElem] {
        &self.table
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, t)| t.0 as usize == i)
    }
}

fn check_generator(ring: &Ring, x: RingElem) -> Result<(), StructureError> {
    if !ring.contains(x) || ring.is_unit(x) || x == ring.zero() {
        return Err(StructureError::NotAGenerator(x));
    }
    Ok(())
}

pub fn sigma(res: &ResidueField, x: RingElem) -> Result<SigmaAut, StructureError> {
    let ring = res.ring();
    check_generator(ring, x)?;
    let d = res.field();
    let mut table = vec![FieldElem::ZERO; d.order() as usize];
    for t in d.elements() {
        let target = ring.mul(x, res.lift(t));
        let s = ring
            .elements()
            .find(|&s| ring.mul(s, x) == target)
            .ok_or(StructureError::NoSolution(t))?;
        table[t.0 as usize] = res.project(s);
    }
    let mut inverse = vec![FieldElem::ZERO; table.len()];
    let mut seen = vec![false; table.len()];
    for (i, &img) in table.iter().enumerate() {
        if seen[img.0 as usize] {
            return Err(StructureError::Inconsistent("sigma is not injective".into()));
        }
        seen[img.0 as usize] = true;
        inverse[img.0 as usize] = FieldElem(i as u32);
    }
    let sig = SigmaAut { x, table, inverse };
    for a in d.elements() {
        if ring.mul(x, res.lift(a)) != ring.mul(res.lift(sig.apply(a)), x) {
            return Err(StructureError::Inconsistent(format!("defining relation fails at {a}")));
        }
        for b in d.elements() {
            if sig.apply(d.add(a, b)) != d.add(sig.apply(a), sig.apply(b))
                || sig.apply(d.mul(a, b)) != d.mul(sig.apply(a), sig.apply(b))
            {
                return Err(StructureError::Inconsistent(format!(
                    "sigma is not a homomorphism at ({a}, {b})"
                )));
            }
        }
    }
    Ok(sig)
}

/// Checks `sigma_y(t) = sigma_x(r) sigma_x(t) sigma_x(r)^{-1}` for all `t`, where `y = x * lift(r)`.
pub fn sigma_relation_check(res: &ResidueField, x: RingElem, y: RingElem) -> Result<bool, StructureError> {
    let ring = res.ring();
    let d = res.field();
    let sx = sigma(res, x)?;
    let sy = sigma(res, y)?;
    let r = d
        .units()
        .find(|&r| ring.mul(x, res.lift(r)) == y)
        .ok_or(StructureError::NotAGenerator(y))?;
    let sr = sx.apply(r);
    let sr_inv = d.inv(sr).expect("sigma preserves units");
    Ok(d.elements()
        .all(|t| sy.apply(t) == d.mul(d.mul(sr, sx.apply(t)), sr_inv)))
}

/// Everything derived from a ring that satisfies the premises: residue field,
/// canonical generator, `sigma_x`, and the coefficient map `m -> d`,
/// `lift(c) * x -> c`.
#[derive(Debug, Clone)]
pub struct LocalStructure {
    ring: Arc<Ring>,
    residue: ResidueField,
    x: Option<RingElem>,
    sigma: Option<SigmaAut>,
    x_coeff: Vec<Option<FieldElem>>,
}

impl LocalStructure {
    pub fn new(ring: &Arc<Ring>) -> Result<Self, StructureError> {
        let report = verify_premises(ring);
        if let Some(why) = report.first_failure() {
            return Err(StructureError::PremisesFailed(why));
        }
        let residue = residue_field(ring)?;
        let x = ring.generator();
        let sigma = x.map(|x| sigma(&residue, x)).transpose()?;
        let mut x_coeff = vec![None; ring.size() as usize];
        if let Some(x) = x {
            for c in residue.field().elements() {
                let s = ring.mul(residue.lift(c), x);
                x_coeff[ring.index(s)] = Some(c);
            }
        } else {
            x_coeff[0] = Some(FieldElem::ZERO);
        }
        Ok(LocalStructure {
            ring: ring.clone(),
            residue,
            x,
            sigma,
            x_coeff,
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn residue(&self) -> &ResidueField {
        &self.residue
    }

    pub fn d(&self) -> &Arc<GfField> {
        self.residue.field()
    }

    pub fn x(&self) -> Option<RingElem> {
        self.x
    }

    pub fn sigma(&self) -> Option<&SigmaAut> {
        self.sigma.as_ref()
    }

    #[inline]
    pub fn project(&self, r: RingElem) -> FieldElem {
        self.residue.project(r)
    }

    #[inline]
    pub fn lift(&self, t: FieldElem) -> RingElem {
        self.residue.lift(t)
    }

    /// `c` with `lift(c) * x = s`, for `s` in `m`.
    #[inline]
    pub fn x_coefficient(&self, s: RingElem) -> Option<FieldElem> {
        self.x_coeff[self.ring.index(s)]
    }

    /// `lift(c) * x`, or zero in the semisimple case.
    pub fn times_x(&self, c: FieldElem) -> RingElem {
        match self.x {
            Some(x) => self.ring.mul(self.lift(c), x),
            None => self.ring.zero(),
        }
    }

    #[inline]
    pub fn sigma_apply(&self, t: FieldElem) -> FieldElem {
        self.sigma.as_ref().map_or(t, |s| s.apply(t))
    }

    #[inline]
    pub fn sigma_inv(&self, t: FieldElem) -> FieldElem {
        self.sigma.as_ref().map_or(t, |s| s.apply_inv(t))
    }

    /// Whether `r` is nonzero, fixed by `sigma_x`, and `sigma_x^3(t) = r^{-1} t r` for all `t`.
    pub fn is_admissible(&self, r: FieldElem) -> bool {
        self.admissibility_failure(r).is_none()
    }

    fn admissibility_failure(&self, r: FieldElem) -> Option<Condition> {
        let d = self.d();
        if r.is_zero() {
            return Some(Condition::A);
        }
        if self.sigma_apply(r) != r {
            return Some(Condition::A);
        }
        let r_inv = d.inv(r).expect("nonzero");
        let twisted = |t| self.sigma_apply(self.sigma_apply(self.sigma_apply(t)));
        d.elements()
            .any(|t| twisted(t) != d.mul(d.mul(r_inv, t), r))
            .then_some(Condition::B)
    }

    pub fn admissible_elements(&self) -> Vec<FieldElem> {
        if self.x.is_none() {
            return Vec::new();
        }
        self.d().units().filter(|&r| self.is_admissible(r)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Centers {
    pub center_r: Vec<RingElem>,
    pub center_d: Vec<FieldElem>,
    pub d_prime: Vec<FieldElem>,
    pub fixed: Vec<FieldElem>,
}

/// `Z(R)`, `Z(d)`, `d' = [Z(R)]`, and `Z(d)^{sigma_x}`, all by exhaustive commutation.
pub fn centers(ls: &LocalStructure) -> Centers {
    let ring = ls.ring();
    let d = ls.d();
    let all: Vec<RingElem> = ring.elements().collect();
    let center_r: Vec<RingElem> = all
        .iter()
        .copied()
        .filter(|&z| all.iter().all(|&a| ring.mul(z, a) == ring.mul(a, z)))
        .collect();
    let center_d: Vec<FieldElem> = d
        .elements()
        .filter(|&z| d.elements().all(|a| d.mul(z, a) == d.mul(a, z)))
        .collect();
    let d_prime: BTreeSet<FieldElem> = center_r.iter().map(|&z| ls.project(z)).collect();
    let fixed = center_d.iter().copied().filter(|&t| ls.sigma_apply(t) == t).collect();
    Centers {
        center_r,
        center_d,
        d_prime: d_prime.into_iter().collect(),
        fixed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Semisimple,
    Mixed,
    Equicharacteristic,
    None,
}

/// The checks whose failure rules out a triangulation, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    #[serde(rename = "m=2R")]
    MEqualsTwoR,
    #[serde(rename = "char=2")]
    CharTwo,
    #[serde(rename = "condition (a)")]
    A,
    #[serde(rename = "condition (b)")]
    B,
    #[serde(rename = "x=-x")]
    SignSymmetric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub failed: Vec<Condition>,
    pub premise_failure: Option<String>,
    /// `(x, -x)` when they differ.
    pub sign_witness: Option<(RingElem, RingElem)>,
    /// For each nonzero `r` fixed by `sigma_x`, some `t` with `sigma_x^3(t) != r^{-1} t r`.
    pub residue_witnesses: Vec<(FieldElem, FieldElem)>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub case: Case,
    pub x: Option<RingElem>,
    pub admissible_r: Vec<FieldElem>,
    pub obstruction: Option<Obstruction>,
}

/// `Some((x, -x))` when `x != -x`, which rules out any triangulation.
pub fn sign_obstruction(ring: &Ring, x: RingElem) -> Result<Option<(RingElem, RingElem)>, StructureError> {
    check_generator(ring, x)?;
    let neg = ring.neg(x);
    Ok((neg != x).then_some((x, neg)))
}

fn m_equals_two_r(ring: &Ring) -> bool {
    let two = ring.from_int(2);
    let two_r: BTreeSet<RingElem> = ring.elements().map(|r| ring.mul(two, r)).collect();
    let m: BTreeSet<RingElem> = ring.nonunits().iter().copied().collect();
    two_r == m
}

pub fn classify(ring: &Arc<Ring>) -> Classification {
    let ls = match LocalStructure::new(ring) {
        Ok(ls) => ls,
        Err(e) => {
            return Classification {
                case: Case::None,
                x: ring.generator(),
                admissible_r: Vec::new(),
                obstruction: Some(Obstruction {
                    failed: Vec::new(),
                    premise_failure: Some(e.to_string()),
                    sign_witness: None,
                    residue_witnesses: Vec::new(),
                    detail: format!("premises fail: {e}"),
                }),
            }
        }
    };
    classify_with(&ls)
}

pub fn classify_with(ls: &LocalStructure) -> Classification {
    let ring = ls.ring();
    let Some(x) = ls.x() else {
        return Classification {
            case: Case::Semisimple,
            x: None,
            admissible_r: Vec::new(),
            obstruction: None,
        };
    };
    let mut failed = Vec::new();
    let mixed = m_equals_two_r(ring);
    if !mixed {
        failed.push(Condition::MEqualsTwoR);
    }
    let char_two = ring.characteristic() == 2;
    if !char_two {
        failed.push(Condition::CharTwo);
    }
    let sign_witness = sign_obstruction(ring, x).expect("canonical generator is valid");
    let mut residue_witnesses = Vec::new();
    if mixed || char_two {
        let admissible = ls.admissible_elements();
        if !admissible.is_empty() {
            let case = if mixed { Case::Mixed } else { Case::Equicharacteristic };
            return Classification {
                case,
                x: Some(x),
                admissible_r: admissible,
                obstruction: None,
            };
        }
        let d = ls.d();
        let cube = |t| ls.sigma_apply(ls.sigma_apply(ls.sigma_apply(t)));
        for r in d.units().filter(|&r| ls.sigma_apply(r) == r) {
            let r_inv = d.inv(r).expect("unit");
            let t = d
                .elements()
                .find(|&t| cube(t) != d.mul(d.mul(r_inv, t), r))
                .expect("r is not admissible");
            residue_witnesses.push((r, t));
        }
        failed.push(if residue_witnesses.is_empty() {
            Condition::A
        } else {
            Condition::B
        });
    }
    if sign_witness.is_some() {
        failed.push(Condition::SignSymmetric);
    }
    let detail = match (&sign_witness, failed.last()) {
        (Some((a, b)), _) => format!("x != -x: x = {a}, -x = {b}"),
        (None, Some(Condition::B)) => {
            let (r, t) = residue_witnesses[0];
            format!(
                "no fixed r satisfies sigma_x^3(t) = r^-1 t r; e.g. r = {}, t = {}",
                r.0, t.0
            )
        }
        (None, Some(Condition::A)) => "sigma_x has no nonzero fixed residue".to_string(),
        _ => "no admissible residue".to_string(),
    };
    Classification {
        case: Case::None,
        x: Some(x),
        admissible_r: Vec::new(),
        obstruction: Some(Obstruction {
            failed,
            premise_failure: None,
            sign_witness,
            residue_witnesses,
            detail,
        }),
    }
}

/// Number of triangulations, cross-checked against `|Z(d)| - 1` (mixed) or
/// `|Z(d)^{sigma_x}| - 1` (equicharacteristic).
pub fn count_triangulations(ls: &LocalStructure) -> Result<usize, StructureError> {
    let class = classify_with(ls);
    match class.case {
        Case::Semisimple => Ok(1),
        Case::None => Ok(0),
        Case::Mixed | Case::Equicharacteristic => {
            let c = centers(ls);
            let expected = if class.case == Case::Mixed {
                c.center_d.len()
            } else {
                c.fixed.len()
            } - 1;
            if expected != class.admissible_r.len() {
                return Err(StructureError::Inconsistent(format!(
                    "{} admissible residues but the center formula gives {expected}",
                    class.admissible_r.len()
                )));
            }
            Ok(expected)
        }
    }
}

/// Partition of the admissible residues: `r ~ r'` iff some lift of `r^{-1} r'` is central in `R`.
pub fn equivalence_classes(ls: &LocalStructure) -> Result<Vec<Vec<FieldElem>>, StructureError> {
    let class = classify_with(ls);
    if !matches!(class.case, Case::Mixed | Case::Equicharacteristic) {
        return Err(StructureError::NotApplicable(class.case));
    }
    let ring = ls.ring();
    let d = ls.d();
    let c = centers(ls);
    let mut central = vec![false; ring.size() as usize];
    for &z in &c.center_r {
        central[ring.index(z)] = true;
    }
    let related = |r: FieldElem, s: FieldElem| {
        let t = d.mul(d.inv(r).expect("admissible residues are nonzero"), s);
        ls.residue().preimage(t).any(|lift| central[ring.index(lift)])
    };
    let mut classes: Vec<Vec<FieldElem>> = Vec::new();
    for &r in &class.admissible_r {
        match classes.iter_mut().find(|cl| related(cl[0], r)) {
            Some(cl) => cl.push(r),
            None => classes.push(vec![r]),
        }
    }
    let units = |v: &[FieldElem]| v.iter().filter(|t| !t.is_zero()).count();
    let numerator = if class.case == Case::Mixed {
        units(&c.center_d)
    } else {
        units(&c.fixed)
    };
    let expected = numerator / units(&c.d_prime);
    if expected != classes.len() || numerator % units(&c.d_prime) != 0 {
        return Err(StructureError::Inconsistent(format!(
            "{} classes but |Z^x| / |d'^x| = {numerator} / {}",
            classes.len(),
            units(&c.d_prime)
        )));
    }
    Ok(classes)
}

/// The pair `(x, r)` selecting the triangulation generated by `(.x, .x, .lift(r) x)`.
/// In the semisimple case there is no `x` and no `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangulationDescriptor {
    pub x: Option<RingElem>,
    pub r: FieldElem,
    pub r_lift: RingElem,
}

impl TriangulationDescriptor {
    pub fn new(ls: &LocalStructure, r: FieldElem) -> Result<Self, StructureError> {
        match ls.x() {
            None => Ok(Self::semisimple(ls)),
            Some(x) => {
                if !ls.d().contains(r) || !ls.is_admissible(r) {
                    return Err(StructureError::NotAdmissible(r));
                }
                let case = classify_with(ls).case;
                if case == Case::None {
                    return Err(StructureError::NotApplicable(case));
                }
                Ok(TriangulationDescriptor {
                    x: Some(x),
                    r,
                    r_lift: ls.lift(r),
                })
            }
        }
    }

    /// Builds a descriptor without checking the conditions; used for negative controls.
    pub fn unchecked(ls: &LocalStructure, r: FieldElem) -> Self {
        TriangulationDescriptor {
            x: ls.x(),
            r,
            r_lift: ls.lift(r),
        }
    }

    pub fn semisimple(ls: &LocalStructure) -> Self {
        TriangulationDescriptor {
            x: None,
            r: FieldElem::ONE,
            r_lift: ls.ring().one(),
        }
    }

    /// The first admissible residue, or the semisimple descriptor.
    pub fn canonical(ls: &LocalStructure) -> Result<Self, StructureError> {
        if ls.x().is_none() {
            return Ok(Self::semisimple(ls));
        }
        let class = classify_with(ls);
        let r = *class
            .admissible_r
            .first()
            .ok_or(StructureError::NotApplicable(class.case))?;
        Self::new(ls, r)
    }
}
