//! Exact arithmetic in the ring of integers of `Q(√d)`.
//!
//! When `d ≡ 1 (mod 4)` the ring is `Z[(1+√d)/2]` and elements are stored as
//! numerator pairs `(a, b)` meaning `(a + b√d)/2` with `a ≡ b (mod 2)`.
//! Otherwise the ring is `Z[√d]` and `(a, b)` means `a + b√d`. Either way the
//! stored pair is unique for each ring element.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Coord;

/// Shape of the integral basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// `Z[√d]`, for `d ≡ 2, 3 (mod 4)`.
    Whole,
    /// `Z[(1+√d)/2]`, for `d ≡ 1 (mod 4)`.
    Half,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Whole => "whole",
            Form::Half => "half",
        }
    }
}

/// The ring of integers of `Q(√d)` for a square-free `d ∉ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingSpec {
    d: i64,
    form: Form,
}

impl RingSpec {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(Error::InvalidRing { d, reason: "d must not be 0 or 1".into() });
        }
        if !is_square_free(d) {
            return Err(Error::InvalidRing { d, reason: "d is not square-free".into() });
        }
        let form = if d.rem_euclid(4) == 1 { Form::Half } else { Form::Whole };
        Ok(Self { d, form })
    }

    /// Like [`RingSpec::new`] but insists on a particular basis form.
    pub fn with_form(d: i64, form: Form) -> Result<Self> {
        let ring = Self::new(d)?;
        if ring.form != form {
            return Err(Error::InvalidRing {
                d,
                reason: format!("form {} does not match d mod 4", form.as_str()),
            });
        }
        Ok(ring)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn discriminant(&self) -> i64 {
        match self.form {
            Form::Whole => 4 * self.d,
            Form::Half => self.d,
        }
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    pub(crate) fn d_as<T: Coord>(&self) -> T {
        T::from_i64_lossless(self.d)
    }
}

fn is_square_free(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// An element of the ring described by a [`RingSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInteger<T> {
    a: T,
    b: T,
    ring: RingSpec,
}

/// Binary ring operations, for the checked entry point [`ring_arithmetic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic: fails with `MixedRings` instead of panicking.
pub fn ring_arithmetic<T: Coord>(
    u: &QuadInteger<T>,
    v: &QuadInteger<T>,
    op: RingOp,
) -> Result<QuadInteger<T>> {
    u.same_ring(v)?;
    Ok(match op {
        RingOp::Add => u + v,
        RingOp::Sub => u - v,
        RingOp::Mul => u * v,
    })
}

impl<T: Coord> QuadInteger<T> {
    /// Builds an element from its stored coordinates, checking the Half-form parity.
    pub fn new(ring: RingSpec, a: T, b: T) -> Result<Self> {
        if ring.form == Form::Half && a.is_odd() != b.is_odd() {
            return Err(Error::InvalidElement(format!(
                "({a}+{b}*s)/2 has mismatched parity"
            )));
        }
        Ok(Self { a, b, ring })
    }

    pub(crate) fn raw(ring: RingSpec, a: T, b: T) -> Self {
        debug_assert!(ring.form == Form::Whole || a.is_odd() == b.is_odd());
        Self { a, b, ring }
    }

    pub fn from_int(ring: RingSpec, n: T) -> Self {
        match ring.form {
            Form::Whole => Self::raw(ring, n, T::zero()),
            Form::Half => Self::raw(ring, n.clone() + n, T::zero()),
        }
    }

    pub fn from_i64(ring: RingSpec, n: i64) -> Self {
        Self::from_int(ring, T::from_i64_lossless(n))
    }

    /// `α + β√d` with integer `α, β`.
    pub fn from_parts(ring: RingSpec, alpha: T, beta: T) -> Self {
        match ring.form {
            Form::Whole => Self::raw(ring, alpha, beta),
            Form::Half => Self::raw(ring, alpha.clone() + alpha, beta.clone() + beta),
        }
    }

    pub fn zero(ring: RingSpec) -> Self {
        Self::raw(ring, T::zero(), T::zero())
    }

    pub fn one(ring: RingSpec) -> Self {
        Self::from_int(ring, T::one())
    }

    /// The generator `θ` of the integral basis `{1, θ}`: `√d` or `(1+√d)/2`.
    pub fn basis_generator(ring: RingSpec) -> Self {
        Self::raw(
            ring,
            match ring.form {
                Form::Whole => T::zero(),
                Form::Half => T::one(),
            },
            T::one(),
        )
    }

    /// Element `c0 + c1·θ` in the integral basis.
    pub fn from_basis(ring: RingSpec, c0: T, c1: T) -> Self {
        match ring.form {
            Form::Whole => Self::raw(ring, c0, c1),
            Form::Half => Self::raw(ring, c0.clone() + c0 + c1.clone(), c1),
        }
    }

    /// Coordinates `(c0, c1)` with `self = c0 + c1·θ`.
    pub fn basis_coords(&self) -> (T, T) {
        match self.ring.form {
            Form::Whole => (self.a.clone(), self.b.clone()),
            Form::Half => ((self.a.clone() - self.b.clone()) / two(), self.b.clone()),
        }
    }

    /// Stored coordinates (numerators in Half form).
    pub fn coords(&self) -> (&T, &T) {
        (&self.a, &self.b)
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn same_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::MixedRings(self.ring.d, other.ring.d));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.ring)
    }

    /// True when the element is a rational integer.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_integer(&self) -> Option<T> {
        if !self.is_rational() {
            return None;
        }
        Some(match self.ring.form {
            Form::Whole => self.a.clone(),
            Form::Half => self.a.clone() / two(),
        })
    }

    pub fn conj(&self) -> Self {
        Self::raw(self.ring, self.a.clone(), -self.b.clone())
    }

    pub fn norm(&self) -> T {
        let d: T = self.ring.d_as();
        let n = self.a.clone() * self.a.clone() - d * self.b.clone() * self.b.clone();
        match self.ring.form {
            Form::Whole => n,
            Form::Half => n / T::from_i64_lossless(4),
        }
    }

    /// `self + conj(self)`, a rational integer.
    pub fn trace(&self) -> T {
        match self.ring.form {
            Form::Whole => self.a.clone() + self.a.clone(),
            Form::Half => self.a.clone(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::raw(self.ring, self.a.clone() * k.clone(), self.b.clone() * k.clone())
    }

    /// Max of the absolute stored coordinates.
    pub fn height(&self) -> T {
        std::cmp::max(self.a.abs(), self.b.abs())
    }

    /// Exact quotient `self / v` if `v` divides `self` in the ring.
    pub fn try_divide(&self, v: &Self) -> Result<Option<Self>> {
        self.same_ring(v)?;
        if v.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self * &v.conj();
        let n = v.norm();
        let (p, q) = (num.a, num.b);
        if !(p.is_multiple_of(&n) && q.is_multiple_of(&n)) {
            return Ok(None);
        }
        Self::new(self.ring, p / n.clone(), q / n).map(Some).or(Ok(None))
    }

    /// Exact quotient when divisibility is already known.
    pub(crate) fn div_exact(&self, v: &Self) -> Self {
        self.try_divide(v)
            .ok()
            .flatten()
            .unwrap_or_else(|| panic!("{v} does not divide {self}"))
    }

    /// Exact `self / v` as rational basis coordinates: `(c0, c1, den)` with `den > 0`.
    pub(crate) fn rational_quotient(&self, v: &Self) -> (T, T, T) {
        let num = self * &v.conj();
        let (c0, c1) = num.basis_coords();
        let n = v.norm();
        if n.is_negative() {
            (-c0, -c1, -n)
        } else {
            (c0, c1, n)
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Parses the text syntax `a`, `a+b*s`, `a-b*s`, `(a+b*s)/2`.
    pub fn parse(ring: RingSpec, text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (inner, halved) = match compact.strip_prefix('(').and_then(|r| r.strip_suffix(")/2")) {
            Some(inner) => (inner, true),
            None => (compact.as_str(), false),
        };
        let (a, b) = parse_linear::<T>(inner).ok_or_else(|| Error::Parse(text.to_string()))?;
        match (ring.form, halved) {
            (Form::Whole, false) => Ok(Self::raw(ring, a, b)),
            (Form::Half, true) => Self::new(ring, a, b),
            (Form::Half, false) => Ok(Self::from_parts(ring, a, b)),
            (Form::Whole, true) => {
                if a.is_even() && b.is_even() {
                    Ok(Self::raw(ring, a / two(), b / two()))
                } else {
                    Err(Error::InvalidElement(format!("{text} is not in Z[√{}]", ring.d)))
                }
            }
        }
    }
}

fn two<T: Coord>() -> T {
    T::one() + T::one()
}

fn parse_linear<T: Coord>(s: &str) -> Option<(T, T)> {
    if s.is_empty() {
        return None;
    }
    if !s.contains('s') {
        return Some((s.parse().ok()?, T::zero()));
    }
    let split = s
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .map(|(i, _)| i)
        .last();
    let (a_part, b_part) = match split {
        Some(i) => (&s[..i], &s[i..]),
        None => ("", s),
    };
    let a = if a_part.is_empty() { T::zero() } else { a_part.parse().ok()? };
    let body = b_part.strip_suffix('s')?;
    let (negative, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let b: T = if body.is_empty() {
        T::one()
    } else {
        body.strip_suffix('*')?.parse().ok()?
    };
    if b.is_negative() {
        return None;
    }
    Some((a, if negative { -b } else { b }))
}

fn write_linear<T: Coord>(f: &mut fmt::Formatter<'_>, a: &T, b: &T) -> fmt::Result {
    if b.is_zero() {
        return write!(f, "{a}");
    }
    if !a.is_zero() {
        write!(f, "{a}")?;
        if b.is_positive() {
            write!(f, "+")?;
        }
    }
    if b.is_one() {
        write!(f, "s")
    } else if *b == -T::one() {
        write!(f, "-s")
    } else {
        write!(f, "{b}*s")
    }
}

impl<T: Coord> fmt::Display for QuadInteger<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ring.form {
            Form::Whole => write_linear(f, &self.a, &self.b),
            Form::Half if self.a.is_even() => {
                write_linear(f, &(self.a.clone() / two()), &(self.b.clone() / two()))
            }
            Form::Half => {
                write!(f, "(")?;
                write_linear(f, &self.a, &self.b)?;
                write!(f, ")/2")
            }
        }
    }
}

fn assert_same<T: Coord>(u: &QuadInteger<T>, v: &QuadInteger<T>) {
    assert_eq!(u.ring, v.ring, "mixed rings in arithmetic");
}

impl<T: Coord> Add for &QuadInteger<T> {
    type Output = QuadInteger<T>;
    fn add(self, rhs: Self) -> QuadInteger<T> {
        assert_same(self, rhs);
        QuadInteger::raw(self.ring, self.a.clone() + rhs.a.clone(), self.b.clone() + rhs.b.clone())
    }
}

impl<T: Coord> Sub for &QuadInteger<T> {
    type Output = QuadInteger<T>;
    fn sub(self, rhs: Self) -> QuadInteger<T> {
        assert_same(self, rhs);
        QuadInteger::raw(self.ring, self.a.clone() - rhs.a.clone(), self.b.clone() - rhs.b.clone())
    }
}

impl<T: Coord> Mul for &QuadInteger<T> {
    type Output = QuadInteger<T>;
    fn mul(self, rhs: Self) -> QuadInteger<T> {
        assert_same(self, rhs);
        let d: T = self.ring.d_as();
        let (a1, b1, a2, b2) = (&self.a, &self.b, &rhs.a, &rhs.b);
        let a = a1.clone() * a2.clone() + d * b1.clone() * b2.clone();
        let b = a1.clone() * b2.clone() + a2.clone() * b1.clone();
        match self.ring.form {
            Form::Whole => QuadInteger::raw(self.ring, a, b),
            Form::Half => QuadInteger::raw(self.ring, a / two(), b / two()),
        }
    }
}

impl<T: Coord> Neg for &QuadInteger<T> {
    type Output = QuadInteger<T>;
    fn neg(self) -> QuadInteger<T> {
        QuadInteger::raw(self.ring, -self.a.clone(), -self.b.clone())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl<T: Coord> $tr for QuadInteger<T> {
            type Output = QuadInteger<T>;
            fn $m(self, rhs: Self) -> QuadInteger<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Coord> $tr<&QuadInteger<T>> for QuadInteger<T> {
            type Output = QuadInteger<T>;
            fn $m(self, rhs: &QuadInteger<T>) -> QuadInteger<T> {
                (&self).$m(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl<T: Coord> Neg for QuadInteger<T> {
    type Output = QuadInteger<T>;
    fn neg(self) -> QuadInteger<T> {
        -&self
    }
}
