//! JSON forms of matrices, triangles, morphisms and homotopies.
//!
//! An element is the list of its component coefficient vectors, e.g.
//! `[[1,0],[0,1]]` for `(a0, a1)` over a two-component family and `[[1,0]]`
//! over a field. A bare integer is accepted on input as an element index.

use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::freemod::Matrix;
use crate::rings::{Family, Ring, RingElem, RingError};
use crate::scalars::FieldElem;
use crate::triangulated::{Homotopy, Triangle, TriangleError, TriangleMorphism};

pub const SCHEMA: &str = "trilocal/1";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
}

type Result<T> = std::result::Result<T, JsonError>;

fn bad(msg: impl Into<String>) -> JsonError {
    JsonError::Malformed(msg.into())
}

pub fn elem_to_json(ring: &Ring, e: RingElem) -> Value {
    let base = ring.base();
    match ring.family() {
        Family::Field => json!([base.coeffs(e.a0)]),
        _ => json!([base.coeffs(e.a0), base.coeffs(e.a1)]),
    }
}

pub fn elem_from_json(ring: &Ring, v: &Value) -> Result<RingElem> {
    if let Some(i) = v.as_u64() {
        if i >= ring.size() {
            return Err(bad(format!("element index {i} outside a ring of size {}", ring.size())));
        }
        return Ok(ring.element(i));
    }
    let parts = v
        .as_array()
        .ok_or_else(|| bad("element must be a list of coefficient lists"))?;
    let components = if ring.family() == Family::Field { 1 } else { 2 };
    if parts.is_empty() || parts.len() > components {
        return Err(bad(format!(
            "element needs {components} component(s), got {}",
            parts.len()
        )));
    }
    let base = ring.base();
    let mut comps = [FieldElem::ZERO; 2];
    for (k, part) in parts.iter().enumerate() {
        let coeffs: Vec<u32> = part
            .as_array()
            .ok_or_else(|| bad("component must be a coefficient list"))?
            .iter()
            .map(|c| {
                c.as_u64()
                    .and_then(|c| u32::try_from(c).ok())
                    .ok_or_else(|| bad("coefficient must be a small integer"))
            })
            .collect::<Result<_>>()?;
        comps[k] = base.from_coeffs(&coeffs).map_err(|e| bad(e.to_string()))?;
    }
    Ok(RingElem {
        a0: comps[0],
        a1: comps[1],
    })
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let ring = m.ring();
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| elem_to_json(ring, m[(i, j)])).collect()))
        .collect();
    json!({ "ring": ring.spec().to_string(), "rows": m.rows(), "cols": m.cols(), "entries": rows })
}

fn ring_of(v: &Value) -> Result<Arc<Ring>> {
    let spec = v
        .get("ring")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing \"ring\""))?;
    Ok(Ring::parse(spec)?)
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|n| n as usize)
        .ok_or_else(|| bad(format!("missing \"{key}\"")))
}

/// Parses a matrix; the embedded ring, if any, must match `ring`.
pub fn matrix_from_json(ring: &Arc<Ring>, v: &Value) -> Result<Matrix> {
    if let Some(spec) = v.get("ring").and_then(Value::as_str) {
        if Ring::parse(spec)?.spec() != ring.spec() {
            return Err(bad(format!("matrix over {spec}, expected {}", ring.spec())));
        }
    }
    let rows = usize_field(v, "rows")?;
    let cols = usize_field(v, "cols")?;
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"entries\""))?;
    if entries.len() != rows {
        return Err(bad(format!("{} rows listed, {rows} declared", entries.len())));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for row in entries {
        let row = row.as_array().ok_or_else(|| bad("rows must be lists"))?;
        if row.len() != cols {
            return Err(bad(format!("row of length {}, {cols} declared", row.len())));
        }
        for e in row {
            flat.push(elem_from_json(ring, e)?);
        }
    }
    Matrix::from_entries(ring, rows, cols, flat).map_err(|e| bad(e.to_string()))
}

pub fn triangle_to_json(t: &Triangle) -> Value {
    let (a, b, c) = t.ranks();
    json!({
        "ring": t.u.ring().spec().to_string(),
        "ranks": [a, b, c],
        "u": matrix_to_json(&t.u),
        "v": matrix_to_json(&t.v),
        "w": matrix_to_json(&t.w),
    })
}

fn part<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing \"{key}\"")))
}

pub fn triangle_from_json(ring: &Arc<Ring>, v: &Value) -> Result<Triangle> {
    let t = Triangle::new(
        matrix_from_json(ring, part(v, "u")?)?,
        matrix_from_json(ring, part(v, "v")?)?,
        matrix_from_json(ring, part(v, "w")?)?,
    )?;
    if let Some(ranks) = v.get("ranks") {
        let (a, b, c) = t.ranks();
        if ranks != &json!([a, b, c]) {
            return Err(bad("declared ranks disagree with the maps"));
        }
    }
    Ok(t)
}

pub fn morphism_to_json(m: &TriangleMorphism) -> Value {
    json!({
        "ring": m.f.ring().spec().to_string(),
        "source": triangle_to_json(&m.source),
        "target": triangle_to_json(&m.target),
        "f": matrix_to_json(&m.f),
        "g": matrix_to_json(&m.g),
        "h": matrix_to_json(&m.h),
    })
}

pub fn morphism_from_json(ring: &Arc<Ring>, v: &Value) -> Result<TriangleMorphism> {
    Ok(TriangleMorphism::new(
        triangle_from_json(ring, part(v, "source")?)?,
        triangle_from_json(ring, part(v, "target")?)?,
        matrix_from_json(ring, part(v, "f")?)?,
        matrix_from_json(ring, part(v, "g")?)?,
        matrix_from_json(ring, part(v, "h")?)?,
    )?)
}

pub fn homotopy_to_json(h: &Homotopy) -> Value {
    json!({ "theta": matrix_to_json(&h.theta), "phi": matrix_to_json(&h.phi), "psi": matrix_to_json(&h.psi) })
}

pub fn homotopy_from_json(ring: &Arc<Ring>, v: &Value) -> Result<Homotopy> {
    Ok(Homotopy {
        theta: matrix_from_json(ring, part(v, "theta")?)?,
        phi: matrix_from_json(ring, part(v, "phi")?)?,
        psi: matrix_from_json(ring, part(v, "psi")?)?,
    })
}

/// The ring named by a payload's top-level `"ring"` key.
pub fn payload_ring(v: &Value) -> Result<Arc<Ring>> {
    ring_of(v)
}
