//! Exact 2×2 matrices over a quadratic ring, and idempotents.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::quad_ring::{QuadInteger, RingSpec};
use crate::scalar::Coord;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix2<T> {
    pub e11: QuadInteger<T>,
    pub e12: QuadInteger<T>,
    pub e21: QuadInteger<T>,
    pub e22: QuadInteger<T>,
}

impl<T: Coord> Matrix2<T> {
    pub fn new(
        e11: QuadInteger<T>,
        e12: QuadInteger<T>,
        e21: QuadInteger<T>,
        e22: QuadInteger<T>,
    ) -> Result<Self> {
        e11.same_ring(&e12)?;
        e11.same_ring(&e21)?;
        e11.same_ring(&e22)?;
        Ok(Self { e11, e12, e21, e22 })
    }

    pub(crate) fn from_entries(
        e11: QuadInteger<T>,
        e12: QuadInteger<T>,
        e21: QuadInteger<T>,
        e22: QuadInteger<T>,
    ) -> Self {
        Self { e11, e12, e21, e22 }
    }

    /// Parses four entries in the element text syntax, row-major.
    pub fn parse(ring: RingSpec, entries: [&str; 4]) -> Result<Self> {
        let [a, b, c, d] = entries.map(|s| QuadInteger::parse(ring, s));
        Ok(Self::from_entries(a?, b?, c?, d?))
    }

    pub fn from_i64(ring: RingSpec, entries: [[i64; 2]; 4]) -> Result<Self> {
        let [a, b, c, d] = entries.map(|[x, y]| {
            QuadInteger::new(ring, T::from_i64_lossless(x), T::from_i64_lossless(y))
        });
        Ok(Self::from_entries(a?, b?, c?, d?))
    }

    /// The row matrix `[x y] = (x y; 0 0)`.
    pub fn row(x: QuadInteger<T>, y: QuadInteger<T>) -> Self {
        let zero = QuadInteger::zero(x.ring());
        Self::from_entries(x, y, zero.clone(), zero)
    }

    pub fn zero(ring: RingSpec) -> Self {
        let z = QuadInteger::zero(ring);
        Self::from_entries(z.clone(), z.clone(), z.clone(), z)
    }

    pub fn identity(ring: RingSpec) -> Self {
        let (z, o) = (QuadInteger::zero(ring), QuadInteger::one(ring));
        Self::from_entries(o.clone(), z.clone(), z, o)
    }

    /// `(1 0; q 1)`.
    pub fn lower(q: QuadInteger<T>) -> Self {
        let ring = q.ring();
        Self::from_entries(QuadInteger::one(ring), QuadInteger::zero(ring), q, QuadInteger::one(ring))
    }

    /// `(1 q; 0 1)`.
    pub fn upper(q: QuadInteger<T>) -> Self {
        let ring = q.ring();
        Self::from_entries(QuadInteger::one(ring), q, QuadInteger::zero(ring), QuadInteger::one(ring))
    }

    /// `(0 1; 1 0)`.
    pub fn swap(ring: RingSpec) -> Self {
        let (z, o) = (QuadInteger::zero(ring), QuadInteger::one(ring));
        Self::from_entries(z.clone(), o.clone(), o, z)
    }

    pub fn ring(&self) -> RingSpec {
        self.e11.ring()
    }

    pub fn entries(&self) -> [&QuadInteger<T>; 4] {
        [&self.e11, &self.e12, &self.e21, &self.e22]
    }

    pub fn det(&self) -> QuadInteger<T> {
        &self.e11 * &self.e22 - &self.e12 * &self.e21
    }

    pub fn trace(&self) -> QuadInteger<T> {
        &self.e11 + &self.e22
    }

    pub fn is_singular(&self) -> bool {
        self.det().is_zero()
    }

    pub fn is_idempotent(&self) -> bool {
        &(self * self) == self
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    /// True for `(x y; 0 0)`.
    pub fn is_row(&self) -> bool {
        self.e21.is_zero() && self.e22.is_zero()
    }

    pub fn transpose(&self) -> Self {
        Self::from_entries(self.e11.clone(), self.e21.clone(), self.e12.clone(), self.e22.clone())
    }

    /// Entrywise `√d ↦ −√d`.
    pub fn conj(&self) -> Self {
        Self::from_entries(self.e11.conj(), self.e12.conj(), self.e21.conj(), self.e22.conj())
    }

    /// Conjugate transpose `Mᴴ`.
    pub fn conj_transpose(&self) -> Self {
        self.conj().transpose()
    }

    /// `s_inv · self · s`.
    pub fn conjugate_by(&self, s: &Self, s_inv: &Self) -> Self {
        &(s_inv * self) * s
    }

    /// Largest coordinate height among the entries.
    pub fn height(&self) -> T {
        self.entries().iter().map(|e| e.height()).max().expect("four entries")
    }
}

impl<T: Coord> Mul for &Matrix2<T> {
    type Output = Matrix2<T>;
    fn mul(self, r: Self) -> Matrix2<T> {
        Matrix2::from_entries(
            &self.e11 * &r.e11 + &self.e12 * &r.e21,
            &self.e11 * &r.e12 + &self.e12 * &r.e22,
            &self.e21 * &r.e11 + &self.e22 * &r.e21,
            &self.e21 * &r.e12 + &self.e22 * &r.e22,
        )
    }
}

impl<T: Coord> fmt::Display for Matrix2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.e11, self.e12, self.e21, self.e22)
    }
}

/// A matrix `E` with `E·E = E`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Idempotent<T>(Matrix2<T>);

impl<T: Coord> Idempotent<T> {
    pub fn new(m: Matrix2<T>) -> Result<Self> {
        if !m.is_idempotent() {
            return Err(Error::NotIdempotent);
        }
        Ok(Self(m))
    }

    /// Caller guarantees idempotence (e.g. a similarity image of an idempotent).
    pub(crate) fn trusted(m: Matrix2<T>) -> Self {
        debug_assert!(m.is_idempotent(), "not idempotent: {m}");
        Self(m)
    }

    /// `(a b; c 1−a)`, valid iff `b·c = a·(1−a)`.
    pub fn from_pair(a: QuadInteger<T>, b: QuadInteger<T>, c: QuadInteger<T>) -> Result<Self> {
        let one = QuadInteger::one(a.ring());
        let d = &one - &a;
        Self::new(Matrix2::new(a, b, c, d)?)
    }

    pub fn matrix(&self) -> &Matrix2<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix2<T> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj_transpose(&self) -> Self {
        Self(self.0.conj_transpose())
    }

    pub fn conjugate_by(&self, s: &Matrix2<T>, s_inv: &Matrix2<T>) -> Self {
        Self::trusted(self.0.conjugate_by(s, s_inv))
    }
}

impl<T: Coord> fmt::Display for Idempotent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Ordered product of the factors; `None` for an empty list.
pub fn product<T: Coord>(factors: &[Idempotent<T>]) -> Option<Matrix2<T>> {
    let mut it = factors.iter();
    let first = it.next()?.matrix().clone();
    Some(it.fold(first, |acc, f| &acc * f.matrix()))
}
