//! Exact arithmetic in the finite fields GF(p^n) and their Frobenius automorphisms.
//!
//! Elements are stored as the integer `c_0 + c_1 p + ... + c_{n-1} p^{n-1}` of their
//! little-endian coefficient vector, so an element is a plain `u32` index into
//! `0..q`. Multiplication goes through discrete log tables built once per field.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default ceiling on the field order accepted by [`gf_make`].
pub const DEFAULT_FIELD_CEILING: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    CompositeP(u64),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the ceiling {ceiling}")]
    DegreeTooLarge { p: u64, n: u32, ceiling: u64 },
    #[error("element index {0} is outside the field")]
    OutOfRange(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation {0:?} needs a second operand")]
    MissingOperand(GfOp),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid field spec `{0}`")]
    BadSpec(String),
}

/// An element of a finite field, encoded as the base-p integer of its coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The data that pins down GF(p^n): characteristic, degree and defining polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    pub p: u32,
    pub n: u32,
    /// Monic modulus, constant term first, length `n + 1`.
    pub modulus: Vec<u32>,
}

impl FieldDescriptor {
    pub fn order(&self) -> u32 {
        self.p.pow(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// A constructed finite field with log/exp tables.
#[derive(Debug, Clone)]
pub struct GfField {
    desc: FieldDescriptor,
    q: u32,
    generator: FieldElem,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for GfField {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}

impl Eq for GfField {}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^n`, or fails when `q` is not a prime power.
pub fn prime_power(q: u64) -> Result<(u64, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
    let mut rest = q;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    if rest != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    Ok((p, n))
}

/// Builds GF(p^n) with the default size ceiling.
pub fn gf_make(p: u64, n: u32) -> Result<GfField, FieldError> {
    gf_make_with_ceiling(p, n, DEFAULT_FIELD_CEILING)
}

pub fn gf_make_with_ceiling(p: u64, n: u32, ceiling: u64) -> Result<GfField, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::CompositeP(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let order = p.checked_pow(n).filter(|&q| q <= ceiling);
    let Some(q) = order else {
        return Err(FieldError::DegreeTooLarge { p, n, ceiling });
    };
    let p = p as u32;
    let modulus = least_irreducible(p, n);
    GfField::from_descriptor(FieldDescriptor { p, n, modulus }, q as u32)
}

/// Parses `gf(q)` or `gf(p^n)`; also accepts the bare argument `q` / `p^n`.
pub fn parse_field_spec(s: &str) -> Result<(u64, u32), FieldError> {
    let compact: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let inner = compact
        .strip_prefix("gf(")
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(&compact);
    parse_order(inner).ok_or_else(|| FieldError::BadSpec(s.to_string()))?
}

pub(crate) fn parse_order(s: &str) -> Option<Result<(u64, u32), FieldError>> {
    if let Some((base, exp)) = s.split_once('^') {
        let p: u64 = base.parse().ok()?;
        let n: u32 = exp.parse().ok()?;
        if !is_prime(p) {
            return Some(Err(FieldError::CompositeP(p)));
        }
        Some(Ok((p, n)))
    } else {
        let q: u64 = s.parse().ok()?;
        Some(prime_power(q))
    }
}

fn poly_degree(f: &[u32]) -> Option<usize> {
    f.iter().rposition(|&c| c != 0)
}

/// Remainder of `f` modulo the monic polynomial `g` over Z/p.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while let Some(dr) = poly_degree(&r) {
        if dr < dg {
            break;
        }
        let lead = r[dr];
        let shift = dr - dg;
        for (i, &gc) in g.iter().enumerate() {
            r[i + shift] = (r[i + shift] + p - (lead * gc) % p) % p;
        }
    }
    r.truncate(dg.max(1));
    r
}

fn decode(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

fn encode(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Monic polynomial of degree `deg` whose lower coefficients encode to `code`.
fn monic(code: u32, p: u32, deg: usize) -> Vec<u32> {
    let mut f = decode(code, p, deg);
    f.push(1);
    f
}

pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for deg in 1..=n / 2 {
        for code in 0..p.pow(deg as u32) {
            let g = monic(code, p, deg);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `n` over Z/p, ordered by the
/// base-p integer of its lower coefficients. Degree one uses the modulus `x`.
fn least_irreducible(p: u32, n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0, 1];
    }
    (0..p.pow(n))
        .map(|code| monic(code, p, n as usize))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

impl GfField {
    fn from_descriptor(desc: FieldDescriptor, q: u32) -> Result<Self, FieldError> {
        let p = desc.p;
        let n = desc.n as usize;
        let mulmod = |a: u32, b: u32| -> u32 {
            if n == 1 {
                return ((a as u64 * b as u64) % p as u64) as u32;
            }
            let ac = decode(a, p, n);
            let bc = decode(b, p, n);
            let mut prod = vec![0u32; 2 * n - 1];
            for (i, &x) in ac.iter().enumerate() {
                for (j, &y) in bc.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            encode(&poly_rem(&prod, &desc.modulus, p), p)
        };
        let mut exp = vec![0u32; q as usize];
        let mut log = vec![0u32; q as usize];
        let mut generator = FieldElem::ONE;
        for g in 1..q {
            let mut x = 1u32;
            let mut order = 0u32;
            loop {
                exp[order as usize] = x;
                order += 1;
                x = mulmod(x, g);
                if x == 1 || order >= q - 1 {
                    break;
                }
            }
            if x == 1 && order == q - 1 {
                generator = FieldElem(g);
                break;
            }
        }
        for (i, &e) in exp.iter().enumerate().take((q - 1) as usize) {
            log[e as usize] = i as u32;
        }
        Ok(GfField {
            desc,
            q,
            generator,
            exp,
            log,
        })
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn characteristic(&self) -> u32 {
        self.desc.p
    }

    pub fn degree(&self) -> u32 {
        self.desc.n
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// A generator of the multiplicative group (least index with full order).
    pub fn primitive_element(&self) -> FieldElem {
        self.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn units(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(FieldElem)
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        a.0 < self.q
    }

    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        decode(a.0, self.desc.p, self.desc.n as usize)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<FieldElem, FieldError> {
        if c.len() > self.desc.n as usize || c.iter().any(|&d| d >= self.desc.p) {
            return Err(FieldError::BadSpec(format!("{c:?}")));
        }
        Ok(FieldElem(encode(c, self.desc.p)))
    }

    /// Image of an integer under Z -> GF(q).
    pub fn from_int(&self, k: i64) -> FieldElem {
        FieldElem(k.rem_euclid(self.desc.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.desc.p;
        if p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.desc.p;
        if p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0;
        let mut place = 1;
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let e = (self.log[a.0 as usize] + self.log[b.0 as usize]) % (self.q - 1);
        FieldElem(self.exp[e as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let l = self.log[a.0 as usize];
        Ok(FieldElem(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]))
    }

    /// Checked dispatch over the four field operations.
    pub fn arith(&self, op: GfOp, a: FieldElem, b: Option<FieldElem>) -> Result<FieldElem, FieldError> {
        for x in std::iter::once(a).chain(b) {
            if !self.contains(x) {
                return Err(FieldError::OutOfRange(x.0));
            }
        }
        match op {
            GfOp::Add => Ok(self.add(a, b.ok_or(FieldError::MissingOperand(op))?)),
            GfOp::Mul => Ok(self.mul(a, b.ok_or(FieldError::MissingOperand(op))?)),
            GfOp::Neg => Ok(self.neg(a)),
            GfOp::Inv => self.inv(a),
        }
    }

    /// Square-and-multiply exponentiation.
    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: FieldElem, k: u32) -> FieldElem {
        let k = k % self.desc.n;
        let mut out = a;
        for _ in 0..k {
            out = self.pow(out, self.desc.p as u64);
        }
        out
    }

    pub fn frobenius_aut(&self, k: u32) -> FieldAut {
        FieldAut { k: k % self.desc.n }
    }
}

/// The automorphism `a -> a^(p^k)` of a fixed field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldAut {
    pub k: u32,
}

impl FieldAut {
    pub fn apply(&self, field: &GfField, a: FieldElem) -> FieldElem {
        field.frobenius(a, self.k)
    }

    pub fn compose(&self, other: FieldAut, field: &GfField) -> FieldAut {
        FieldAut {
            k: (self.k + other.k) % field.degree(),
        }
    }

    pub fn inverse(&self, field: &GfField) -> FieldAut {
        FieldAut {
            k: (field.degree() - self.k) % field.degree(),
        }
    }
}

/// All fixed points of `aut`; a subfield of order `p^gcd(n, k)`.
pub fn fixed_subfield(field: &GfField, aut: FieldAut) -> BTreeSet<FieldElem> {
    field.elements().filter(|&a| aut.apply(field, a) == a).collect()
}
