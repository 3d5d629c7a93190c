//! The three finite local ring families: fields, Witt vectors of length two, and
//! skew polynomial quotients `k[X; Frob^e] / (X^2)`.
//!
//! A ring element is a pair `(a0, a1)` of base-field elements; for the field
//! family `a1` is always zero. The ring handle does all the arithmetic.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{self, FieldElem, FieldError, GfField};

/// Largest ring order accepted by [`Ring::new`].
pub const DEFAULT_RING_CEILING: u64 = 1 << 16;
/// Largest ring order [`Ring::enumerate_elements`] will list.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("invalid ring spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("element {0} is not a unit")]
    NotAUnit(RingElem),
    #[error("ring has {size} elements, above the enumeration limit {limit}")]
    RingTooLarge { size: u64, limit: u64 },
    #[error("nonunits do not form a two-sided ideal: {0}")]
    NotLocal(String),
    #[error("element components out of range: {0}")]
    BadElement(String),
    #[error("operands belong to different rings")]
    MixedRings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Field,
    Witt2,
    SkewPoly,
}

/// What to build: the family, the base field GF(p^n), and for skew polynomials
/// the exponent `e` of the twist `tau = Frob^e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingSpec {
    pub family: Family,
    pub p: u32,
    pub n: u32,
    pub aut_exponent: u32,
}

impl RingSpec {
    pub fn field(p: u32, n: u32) -> Self {
        RingSpec {
            family: Family::Field,
            p,
            n,
            aut_exponent: 0,
        }
    }

    pub fn witt2(p: u32, n: u32) -> Self {
        RingSpec {
            family: Family::Witt2,
            p,
            n,
            aut_exponent: 0,
        }
    }

    pub fn skewpoly(p: u32, n: u32, e: u32) -> Self {
        RingSpec {
            family: Family::SkewPoly,
            p,
            n,
            aut_exponent: e,
        }
    }

    fn base_order(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.base_order();
        match self.family {
            Family::Field => write!(f, "gf({q})"),
            Family::Witt2 => write!(f, "w2({q})"),
            Family::SkewPoly => write!(f, "skewpoly({q}; frob^{})", self.aut_exponent),
        }
    }
}

impl FromStr for RingSpec {
    type Err = RingError;

    /// `gf(q)` | `w2(q)` | `skewpoly(q; frob^k)`, case-insensitive, whitespace ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RingError::InvalidSpec(s.to_string());
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_lowercase();
        let (head, rest) = compact.split_once('(').ok_or_else(bad)?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        let order = |t: &str| -> Result<(u32, u32), RingError> {
            let (p, n) = scalars::parse_order(t).ok_or_else(bad)??;
            Ok((p as u32, n))
        };
        match head {
            "gf" => {
                let (p, n) = order(body)?;
                Ok(RingSpec::field(p, n))
            }
            "w2" => {
                let (p, n) = order(body)?;
                Ok(RingSpec::witt2(p, n))
            }
            "skewpoly" => {
                let (q, aut) = body.split_once(';').ok_or_else(bad)?;
                let (p, n) = order(q)?;
                let e = match aut {
                    "frob" => 1,
                    "id" => 0,
                    _ => aut.strip_prefix("frob^").and_then(|k| k.parse().ok()).ok_or_else(bad)?,
                };
                Ok(RingSpec::skewpoly(p, n, e))
            }
            _ => Err(bad()),
        }
    }
}

/// An element `a0 + a1 * (generator of m)`; `a1 = 0` for fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct RingElem {
    pub a0: FieldElem,
    pub a1: FieldElem,
}

impl RingElem {
    pub const fn new(a0: u32, a1: u32) -> Self {
        RingElem {
            a0: FieldElem(a0),
            a1: FieldElem(a1),
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a0, self.a1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Mul,
    Neg,
}

/// A constructed ring with eagerly built caches.
#[derive(Debug)]
pub struct Ring {
    spec: RingSpec,
    base: Arc<GfField>,
    /// Integer coefficients `-binom(p, i) / p mod p`, i = 1..p-1, of the Witt carry.
    carry: Vec<u32>,
    size: u64,
    characteristic: u64,
    units: Vec<bool>,
    maximal: Vec<RingElem>,
    generator: Option<RingElem>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Ring {}

/// `-(C(p, i) / p) mod p`, which is `(-1)^i / i`.
fn carry_coefficient(p: u64, i: u64) -> u32 {
    let (mut inv, mut base, mut e) = (1, i % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    let c = if i.is_multiple_of(2) { inv } else { (p - inv) % p };
    c as u32
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Arc<Ring>, RingError> {
        Self::with_ceiling(spec, DEFAULT_RING_CEILING)
    }

    pub fn parse(s: &str) -> Result<Arc<Ring>, RingError> {
        Self::new(s.parse()?)
    }

    pub fn with_ceiling(spec: RingSpec, ceiling: u64) -> Result<Arc<Ring>, RingError> {
        let base = Arc::new(scalars::gf_make(spec.p as u64, spec.n)?);
        let q = base.order() as u64;
        let size = match spec.family {
            Family::Field => q,
            Family::Witt2 | Family::SkewPoly => q * q,
        };
        if size > ceiling {
            return Err(RingError::InvalidSpec(format!(
                "{spec} has {size} elements, above {ceiling}"
            )));
        }
        if spec.family == Family::SkewPoly && spec.aut_exponent >= spec.n {
            return Err(RingError::InvalidSpec(format!(
                "twist exponent {} must be below the degree {}",
                spec.aut_exponent, spec.n
            )));
        }
        if spec.family != Family::SkewPoly && spec.aut_exponent != 0 {
            return Err(RingError::InvalidSpec("only skew polynomials take a twist".into()));
        }
        let p = spec.p as u64;
        let carry = match spec.family {
            Family::Witt2 => (1..p).map(|i| carry_coefficient(p, i)).collect(),
            _ => Vec::new(),
        };
        let mut ring = Ring {
            spec,
            base,
            carry,
            size,
            characteristic: 0,
            units: Vec::new(),
            maximal: Vec::new(),
            generator: None,
        };
        ring.characteristic = ring.compute_characteristic();
        ring.units = (0..size).map(|i| ring.element(i).a0 != FieldElem::ZERO).collect();
        ring.maximal = match ring.spec.family {
            Family::Field => vec![ring.zero()],
            _ => ring
                .base
                .elements()
                .map(|a1| RingElem {
                    a0: FieldElem::ZERO,
                    a1,
                })
                .collect(),
        };
        ring.generator = match ring.spec.family {
            Family::Field => None,
            Family::Witt2 => Some(ring.from_int(p as i64)),
            Family::SkewPoly => Some(RingElem::new(0, 1)),
        };
        Ok(Arc::new(ring))
    }

    fn compute_characteristic(&self) -> u64 {
        let one = self.one();
        let mut acc = one;
        let mut k = 1;
        while acc != self.zero() {
            acc = self.add(acc, one);
            k += 1;
        }
        k
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn base(&self) -> &Arc<GfField> {
        &self.base
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    /// Canonical generator of the maximal ideal: `p` for Witt vectors, `[X]` for
    /// skew polynomials, none for fields.
    pub fn generator(&self) -> Option<RingElem> {
        self.generator
    }

    pub fn is_field(&self) -> bool {
        self.spec.family == Family::Field
    }

    pub fn is_commutative_family(&self) -> bool {
        self.spec.family != Family::SkewPoly || self.spec.aut_exponent == 0
    }

    pub fn zero(&self) -> RingElem {
        RingElem::default()
    }

    pub fn one(&self) -> RingElem {
        RingElem::new(1, 0)
    }

    /// The section `t -> (t, 0)` of the residue map.
    pub fn constant(&self, t: FieldElem) -> RingElem {
        RingElem {
            a0: t,
            a1: FieldElem::ZERO,
        }
    }

    pub fn from_int(&self, k: i64) -> RingElem {
        let mut acc = self.zero();
        let mut power = self.one();
        let mut steps = k.unsigned_abs() % self.characteristic_or_bound();
        while steps > 0 {
            if steps & 1 == 1 {
                acc = self.add(acc, power);
            }
            power = self.add(power, power);
            steps >>= 1;
        }
        if k < 0 {
            self.neg(acc)
        } else {
            acc
        }
    }

    fn characteristic_or_bound(&self) -> u64 {
        if self.characteristic == 0 {
            u64::MAX
        } else {
            self.characteristic
        }
    }

    /// Position of `a` in the enumeration order `a0 * q + a1`.
    #[inline]
    pub fn index(&self, a: RingElem) -> usize {
        match self.spec.family {
            Family::Field => a.a0.0 as usize,
            _ => (a.a0.0 * self.base.order() + a.a1.0) as usize,
        }
    }

    #[inline]
    pub fn element(&self, i: u64) -> RingElem {
        match self.spec.family {
            Family::Field => RingElem::new(i as u32, 0),
            _ => {
                let q = self.base.order() as u64;
                RingElem::new((i / q) as u32, (i % q) as u32)
            }
        }
    }

    pub fn contains(&self, a: RingElem) -> bool {
        self.base.contains(a.a0)
            && self.base.contains(a.a1)
            && (self.spec.family != Family::Field || a.a1 == FieldElem::ZERO)
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        (0..self.size).map(|i| self.element(i))
    }

    /// Every element, in index order, refusing rings above the limit.
    pub fn enumerate_elements(&self) -> Result<Vec<RingElem>, RingError> {
        self.enumerate_with_limit(DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn enumerate_with_limit(&self, limit: u64) -> Result<Vec<RingElem>, RingError> {
        if self.size > limit {
            return Err(RingError::RingTooLarge { size: self.size, limit });
        }
        Ok(self.elements().collect())
    }

    fn witt_carry(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let f = &*self.base;
        let p = self.spec.p as u64;
        if p == 2 {
            return f.mul(a, b);
        }
        let mut acc = FieldElem::ZERO;
        for (i, &c) in self.carry.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let i = i as u64 + 1;
            let term = f.mul(f.pow(a, i), f.pow(b, p - i));
            acc = f.add(acc, f.mul(FieldElem(c), term));
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: RingElem, b: RingElem) -> RingElem {
        let f = &*self.base;
        match self.spec.family {
            Family::Field => RingElem {
                a0: f.add(a.a0, b.a0),
                a1: FieldElem::ZERO,
            },
            Family::SkewPoly => RingElem {
                a0: f.add(a.a0, b.a0),
                a1: f.add(a.a1, b.a1),
            },
            Family::Witt2 => RingElem {
                a0: f.add(a.a0, b.a0),
                a1: f.add(f.add(a.a1, b.a1), self.witt_carry(a.a0, b.a0)),
            },
        }
    }

    #[inline]
    pub fn neg(&self, a: RingElem) -> RingElem {
        let f = &*self.base;
        match self.spec.family {
            Family::Field => RingElem {
                a0: f.neg(a.a0),
                a1: FieldElem::ZERO,
            },
            Family::SkewPoly => RingElem {
                a0: f.neg(a.a0),
                a1: f.neg(a.a1),
            },
            Family::Witt2 => {
                let b0 = f.neg(a.a0);
                RingElem {
                    a0: b0,
                    a1: f.neg(f.add(a.a1, self.witt_carry(a.a0, b0))),
                }
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        let f = &*self.base;
        match self.spec.family {
            Family::Field => RingElem {
                a0: f.mul(a.a0, b.a0),
                a1: FieldElem::ZERO,
            },
            Family::Witt2 => {
                let p = self.spec.p as u64;
                RingElem {
                    a0: f.mul(a.a0, b.a0),
                    a1: f.add(f.mul(f.pow(b.a0, p), a.a1), f.mul(b.a1, f.pow(a.a0, p))),
                }
            }
            Family::SkewPoly => {
                let tb0 = f.frobenius(b.a0, self.spec.aut_exponent);
                RingElem {
                    a0: f.mul(a.a0, b.a0),
                    a1: f.add(f.mul(a.a0, b.a1), f.mul(a.a1, tb0)),
                }
            }
        }
    }

    /// Checked dispatch; rejects operands whose components fall outside the base field.
    pub fn arith(&self, op: RingOp, a: RingElem, b: Option<RingElem>) -> Result<RingElem, RingError> {
        for x in std::iter::once(a).chain(b) {
            if !self.contains(x) {
                return Err(RingError::BadElement(x.to_string()));
            }
        }
        let rhs = || b.ok_or_else(|| RingError::BadElement("missing second operand".into()));
        Ok(match op {
            RingOp::Add => self.add(a, rhs()?),
            RingOp::Mul => self.mul(a, rhs()?),
            RingOp::Neg => self.neg(a),
        })
    }

    #[inline]
    pub fn is_unit(&self, a: RingElem) -> bool {
        a.a0 != FieldElem::ZERO
    }

    /// Closed form: `a = u (1 + e)` with `u = (a0, 0)` and `e` in m, so
    /// `a^{-1} = (1 - e) u^{-1}` because `e^2 = 0`.
    pub fn unit_inverse(&self, a: RingElem) -> Result<RingElem, RingError> {
        if !self.is_unit(a) {
            return Err(RingError::NotAUnit(a));
        }
        let u_inv = self.constant(self.base.inv(a.a0)?);
        let e = self.sub(self.mul(u_inv, a), self.one());
        let inv = self.mul(self.sub(self.one(), e), u_inv);
        debug_assert_eq!(self.mul(a, inv), self.one());
        debug_assert_eq!(self.mul(inv, a), self.one());
        Ok(inv)
    }

    pub fn unit_mask(&self) -> &[bool] {
        &self.units
    }

    /// The nonunits and the canonical generator, after checking that the nonunits
    /// form a two-sided ideal equal to `Rx = xR`.
    pub fn maximal_ideal(&self) -> Result<(Vec<RingElem>, Option<RingElem>), RingError> {
        let m = &self.maximal;
        let in_m = |a: RingElem| !self.is_unit(a);
        for &a in m {
            for &b in m {
                if !in_m(self.add(a, b)) {
                    return Err(RingError::NotLocal(format!("{a} + {b} is a unit")));
                }
            }
            for r in self.elements() {
                if !in_m(self.mul(r, a)) || !in_m(self.mul(a, r)) {
                    return Err(RingError::NotLocal(format!("{r} * {a} is a unit")));
                }
            }
        }
        if let Some(x) = self.generator {
            let target: BTreeSet<_> = m.iter().copied().collect();
            let left: BTreeSet<_> = self.elements().map(|r| self.mul(r, x)).collect();
            let right: BTreeSet<_> = self.elements().map(|r| self.mul(x, r)).collect();
            if left != target || right != target {
                return Err(RingError::NotLocal(format!("{x} does not generate the nonunits")));
            }
        }
        Ok((m.clone(), self.generator))
    }

    pub fn nonunits(&self) -> &[RingElem] {
        &self.maximal
    }

    pub fn format_elem(&self, a: RingElem) -> String {
        match self.spec.family {
            Family::Field => format!("{}", a.a0),
            _ => a.to_string(),
        }
    }
}
