//! Continued fractions of quadratic surds, fundamental units, and the
//! norm equation `N(z) = ±n` in real quadratic rings.

use crate::error::{Error, Result};
use crate::quad_ring::{Form, QuadInteger, RingSpec};
use crate::scalar::Coord;

/// `√d = [a0; period, period, ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion<T> {
    pub a0: T,
    pub period: Vec<T>,
}

/// Partial quotients of `(p + √d)/q`, assuming `q | d − p²` and `q > 0`.
struct SurdDigits<T> {
    p: T,
    q: T,
    d: T,
    root: T,
}

impl<T: Coord> SurdDigits<T> {
    fn new(p: T, q: T, d: T) -> Self {
        let root = d.sqrt();
        Self { p, q, d, root }
    }
}

impl<T: Coord> Iterator for SurdDigits<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let a = (self.p.clone() + self.root.clone()).div_floor(&self.q);
        let p = a.clone() * self.q.clone() - self.p.clone();
        let q = (self.d.clone() - p.clone() * p.clone()) / self.q.clone();
        self.p = p;
        self.q = q;
        Some(a)
    }
}

pub fn cf_sqrt<T: Coord>(d: &T) -> Result<CfExpansion<T>> {
    if *d <= T::one() {
        let root = d.sqrt();
        if !d.is_negative() && root.clone() * root == *d {
            return Err(Error::SquareInput(d.to_string()));
        }
        return Err(Error::PreconditionViolated(format!("cf_sqrt needs d > 1, got {d}")));
    }
    let a0 = d.sqrt();
    if a0.clone() * a0.clone() == *d {
        return Err(Error::SquareInput(d.to_string()));
    }
    let stop = a0.clone() + a0.clone();
    let mut digits = SurdDigits::new(T::zero(), T::one(), d.clone());
    digits.next();
    let mut period = Vec::new();
    for a in digits {
        let done = a == stop;
        period.push(a);
        if done {
            break;
        }
    }
    Ok(CfExpansion { a0, period })
}

/// The unit `ε > 1` generating the unit group modulo `±1`.
///
/// Walks the convergents `h/k` of the basis generator `θ` (`√d` or
/// `(1+√d)/2`); the first `h − k·θ̄` of norm `±1` is fundamental.
pub fn fundamental_unit<T: Coord>(ring: RingSpec) -> Result<QuadInteger<T>> {
    if !ring.is_real() {
        return Err(Error::NotRealQuadratic(ring.d()));
    }
    let d: T = T::from_i64_lossless(ring.d());
    let digits = match ring.form() {
        Form::Whole => SurdDigits::new(T::zero(), T::one(), d),
        Form::Half => SurdDigits::new(T::one(), T::one() + T::one(), d),
    };
    let theta_bar = QuadInteger::<T>::basis_generator(ring).conj();
    let (mut h_prev, mut h) = (T::zero(), T::one());
    let (mut k_prev, mut k) = (T::one(), T::zero());
    for a in digits.take(4_000_000) {
        let h_next = a.clone() * h.clone() + h_prev;
        let k_next = a * k.clone() + k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let candidate = QuadInteger::from_int(ring, h.clone()) - theta_bar.scale(&k);
        if candidate.is_unit() {
            return Ok(candidate);
        }
    }
    unreachable!("continued fraction period of a quadratic surd is finite")
}

/// Representatives of every class of solutions of `N(z) = ±n` up to units.
///
/// Each class has a member `z` with `√|n| ≤ z < ε√|n|` on the real embedding,
/// so `|z − z̄| < (ε + 1)√|n|`; that bounds the `√d`-coordinate and the box
/// is scanned exactly. Representatives are the smallest members under
/// `(|b|, |a|, sign a, sign b)`.
pub fn solve_norm_equation<T: Coord>(ring: RingSpec, n: &T) -> Result<Vec<QuadInteger<T>>> {
    if !ring.is_real() {
        return Err(Error::NotRealQuadratic(ring.d()));
    }
    if n.is_zero() {
        return Err(Error::ZeroNorm);
    }
    let eps = fundamental_unit::<T>(ring)?;
    let abs_n = n.abs();
    let d: T = T::from_i64_lossless(ring.d());
    let slack = eps.trace().abs() + T::from_i64_lossless(2);
    let b_max = (slack.clone() * slack * abs_n.clone() / d.clone()).sqrt() + T::one();
    let scale = match ring.form() {
        Form::Whole => T::one(),
        Form::Half => T::from_i64_lossless(4),
    };

    let mut found = Vec::new();
    let mut b = T::zero();
    while b <= b_max {
        for target in [abs_n.clone(), -abs_n.clone()] {
            let rhs = scale.clone() * target + d.clone() * b.clone() * b.clone();
            if rhs.is_negative() {
                continue;
            }
            let a = rhs.sqrt();
            if a.clone() * a.clone() != rhs {
                continue;
            }
            for a in [a.clone(), -a.clone()] {
                for b in [b.clone(), -b.clone()] {
                    found.push(QuadInteger::raw(ring, a.clone(), b));
                }
            }
        }
        b = b + T::one();
    }
    found.sort_by(|u, v| rep_key(u).cmp(&rep_key(v)));
    found.dedup();

    let mut reps: Vec<QuadInteger<T>> = Vec::new();
    for z in found {
        if !reps.iter().any(|r| are_associates(&z, r)) {
            reps.push(z);
        }
    }
    Ok(reps)
}

fn rep_key<T: Coord>(z: &QuadInteger<T>) -> (T, T, bool, bool) {
    let (a, b) = z.coords();
    (b.abs(), a.abs(), a.is_negative(), b.is_negative())
}

/// True when `u = v·w` for a unit `w`.
pub fn are_associates<T: Coord>(u: &QuadInteger<T>, v: &QuadInteger<T>) -> bool {
    if u.is_zero() || v.is_zero() {
        return u.is_zero() && v.is_zero();
    }
    matches!(u.try_divide(v), Ok(Some(q)) if q.is_unit())
}
