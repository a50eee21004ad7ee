//! Independent check of a claimed factorization.
//!
//! Products are recomputed here entry by entry through [`ring_arithmetic`]
//! rather than through the matrix type's own multiplication.

use std::fmt;

use crate::error::Result;
use crate::matrix::Matrix2;
use crate::quad_ring::{ring_arithmetic, QuadInteger, RingOp};
use crate::scalar::Coord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    NoFactors,
    /// Factor at this 0-based position has `F·F ≠ F`.
    NotIdempotent { index: usize },
    ProductMismatch { product: String, target: String },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::NoFactors => f.write_str("empty factor list"),
            Failure::NotIdempotent { index } => write!(f, "factor {index} is not idempotent"),
            Failure::ProductMismatch { product, target } => {
                write!(f, "product {product} differs from target {target}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub failures: Vec<Failure>,
}

type Entries<T> = [[QuadInteger<T>; 2]; 2];

fn entries<T: Coord>(m: &Matrix2<T>) -> Entries<T> {
    [[m.e11.clone(), m.e12.clone()], [m.e21.clone(), m.e22.clone()]]
}

fn multiply<T: Coord>(l: &Entries<T>, r: &Entries<T>) -> Result<Entries<T>> {
    let cell = |i: usize, j: usize| -> Result<QuadInteger<T>> {
        let p = ring_arithmetic(&l[i][0], &r[0][j], RingOp::Mul)?;
        let q = ring_arithmetic(&l[i][1], &r[1][j], RingOp::Mul)?;
        ring_arithmetic(&p, &q, RingOp::Add)
    };
    Ok([[cell(0, 0)?, cell(0, 1)?], [cell(1, 0)?, cell(1, 1)?]])
}

fn render<T: Coord>(m: &Entries<T>) -> String {
    format!("({}, {}; {}, {})", m[0][0], m[0][1], m[1][0], m[1][1])
}

/// `ok` iff every factor is idempotent and the ordered product is `target`.
/// Fails with `MixedRings` when the inputs do not share a ring.
pub fn verify<T: Coord>(factors: &[Matrix2<T>], target: &Matrix2<T>) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    let target_e = entries(target);
    let mut acc: Option<Entries<T>> = None;
    for (index, f) in factors.iter().enumerate() {
        let fe = entries(f);
        if multiply(&fe, &fe)? != fe {
            failures.push(Failure::NotIdempotent { index });
        }
        acc = Some(match acc {
            None => fe,
            Some(a) => multiply(&a, &fe)?,
        });
    }
    match acc {
        None => failures.push(Failure::NoFactors),
        Some(p) => {
            // Compare through the ring operations so mixed rings surface here too.
            let diff_zero = p.iter().flatten().zip(target_e.iter().flatten()).try_fold(
                true,
                |all, (u, v)| -> Result<bool> {
                    Ok(all && ring_arithmetic(u, v, RingOp::Sub)?.is_zero())
                },
            )?;
            if !diff_zero {
                failures.push(Failure::ProductMismatch { product: render(&p), target: render(&target_e) });
            }
        }
    }
    Ok(VerifyReport { ok: failures.is_empty(), failures })
}
