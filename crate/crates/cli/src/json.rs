//! JSON encoding of ring elements and matrices.
//!
//! An element is a pair `[c0, c1]` of integral-basis coordinates, meaning
//! `c0 + c1·√d` in `Z[√d]` and `c0 + c1·(1+√d)/2` in half form. Output
//! always writes coordinates as decimal strings; input also accepts JSON
//! integers.

use num_bigint::BigInt;
use quadidem::{Mat2, QuadInt, RingSpec};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonError(pub String);

type Res<T> = std::result::Result<T, JsonError>;

fn err<T>(msg: impl Into<String>) -> Res<T> {
    Err(JsonError(msg.into()))
}

fn integer(v: &Value) -> Res<BigInt> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| JsonError(format!("not an integer: {s:?}"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integral number")),
        other => err(format!("not an integer: {other}")),
    }
}

pub fn element_from_value(ring: RingSpec, v: &Value) -> Res<QuadInt> {
    match v.as_array().map(Vec::as_slice) {
        Some([c0, c1]) => Ok(QuadInt::from_basis(ring, integer(c0)?, integer(c1)?)),
        _ => err(format!("element must be a [c0, c1] pair, got {v}")),
    }
}

pub fn element_to_value(q: &QuadInt) -> Value {
    let (c0, c1) = q.basis_coords();
    Value::Array(vec![Value::String(c0.to_string()), Value::String(c1.to_string())])
}

/// A parsed matrix argument: 2×2, or the 1×2 row shorthand.
#[derive(Debug, Clone)]
pub enum MatrixArg {
    Full(Mat2),
    Row(QuadInt, QuadInt),
}

impl MatrixArg {
    /// Row inputs become `(x y; 0 0)`.
    pub fn into_matrix(self) -> Mat2 {
        match self {
            MatrixArg::Full(m) => m,
            MatrixArg::Row(x, y) => Mat2::row(x, y),
        }
    }
}

fn row_from_value(ring: RingSpec, v: &Value) -> Res<[QuadInt; 2]> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok([element_from_value(ring, a)?, element_from_value(ring, b)?]),
        _ => err(format!("matrix row must hold two elements, got {v}")),
    }
}

pub fn matrix_from_value(ring: RingSpec, v: &Value) -> Res<MatrixArg> {
    match v.as_array().map(Vec::as_slice) {
        Some([r1]) => {
            let [x, y] = row_from_value(ring, r1)?;
            Ok(MatrixArg::Row(x, y))
        }
        Some([r1, r2]) => {
            let [a, b] = row_from_value(ring, r1)?;
            let [c, d] = row_from_value(ring, r2)?;
            Ok(MatrixArg::Full(Mat2::new(a, b, c, d).expect("entries share one ring")))
        }
        _ => err(format!("matrix must have one or two rows, got {v}")),
    }
}

pub fn parse_matrix(ring: RingSpec, text: &str) -> Res<MatrixArg> {
    let v: Value = serde_json::from_str(text).map_err(|e| JsonError(format!("invalid JSON: {e}")))?;
    matrix_from_value(ring, &v)
}

/// Only full 2×2 matrices are accepted as factors.
pub fn parse_factor_list(ring: RingSpec, text: &str) -> Res<Vec<Mat2>> {
    let v: Value = serde_json::from_str(text).map_err(|e| JsonError(format!("invalid JSON: {e}")))?;
    let Some(items) = v.as_array() else {
        return err("factors must be a JSON array of matrices");
    };
    items
        .iter()
        .map(|item| match matrix_from_value(ring, item)? {
            MatrixArg::Full(m) => Ok(m),
            MatrixArg::Row(..) => err("factors must be 2×2 matrices"),
        })
        .collect()
}

pub fn matrix_to_value(m: &Mat2) -> Value {
    let [a, b, c, d] = m.entries();
    Value::Array(vec![
        Value::Array(vec![element_to_value(a), element_to_value(b)]),
        Value::Array(vec![element_to_value(c), element_to_value(d)]),
    ])
}

/// `"x0,x1 y0,y1"`: two basis-coordinate pairs separated by whitespace.
pub fn parse_row_shorthand(ring: RingSpec, text: &str) -> Res<(QuadInt, QuadInt)> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let [x, y] = parts.as_slice() else {
        return err(format!("row must look like \"x0,x1 y0,y1\", got {text:?}"));
    };
    let element = |s: &str| -> Res<QuadInt> {
        let Some((c0, c1)) = s.split_once(',') else {
            return err(format!("element must look like \"c0,c1\", got {s:?}"));
        };
        let c0 = integer(&Value::String(c0.into()))?;
        let c1 = integer(&Value::String(c1.into()))?;
        Ok(QuadInt::from_basis(ring, c0, c1))
    };
    Ok((element(x)?, element(y)?))
}
