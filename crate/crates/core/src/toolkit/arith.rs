use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Coord;

const TRIAL_LIMIT: u64 = 1_000_000;

/// Nonnegative gcd.
pub fn gcd<T: Coord>(a: &T, b: &T) -> T {
    a.gcd(b)
}

/// `(g, u, v)` with `g = gcd(a, b) ≥ 0` and `u·a + v·b = g`.
pub fn extended_gcd<T: Coord>(a: &T, b: &T) -> (T, T, T) {
    if a.is_zero() && b.is_zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    let (mut old_t, mut t) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.clone() / r.clone();
        let next_r = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = old_s - q.clone() * s.clone();
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = old_t - q * t.clone();
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Least nonnegative solution of a system of congruences `x ≡ r (mod m)`.
pub fn crt<T: Coord>(residues: &[(T, T)]) -> Result<T> {
    let mut x = T::zero();
    let mut modulus = T::one();
    for (r, m) in residues {
        if !m.is_positive() {
            return Err(Error::InvalidModulus);
        }
        let (g, u, _) = extended_gcd(&modulus, m);
        if !g.is_one() {
            return Err(Error::ModuliNotCoprime);
        }
        // x + modulus·k ≡ r (mod m), with modulus⁻¹ ≡ u.
        let k = ((r.clone() - x.clone()) * u).mod_floor(m);
        x = x + modulus.clone() * k;
        modulus = modulus * m.clone();
        x = x.mod_floor(&modulus);
    }
    Ok(x)
}

/// A p-adic valuation; `v_p(0)` is [`Valuation::Infinite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn is_zero(self) -> bool {
        self == Valuation::Finite(0)
    }

    pub fn is_positive(self) -> bool {
        !self.is_zero()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => write!(f, "∞"),
        }
    }
}

pub fn padic_valuation<T: Coord>(n: &T, p: &T) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(valuation_unchecked(n, p))
}

pub(crate) fn valuation_unchecked<T: Coord>(n: &T, p: &T) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let mut m = n.abs();
    let mut k = 0;
    while m.is_multiple_of(p) {
        m = m / p.clone();
        k += 1;
    }
    Valuation::Finite(k)
}

/// Primality by trial division up to 10⁶, then Miller–Rabin on the first
/// thirteen prime bases (deterministic below 3.3·10²⁴).
pub fn is_prime<T: Coord>(n: &T) -> bool {
    let n = n.to_big();
    if n < BigInt::from(2) {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = BigInt::from(p);
        if n == p {
            return true;
        }
        if n.is_multiple_of(&p) {
            return false;
        }
    }
    if n < BigInt::from(TRIAL_LIMIT) * BigInt::from(TRIAL_LIMIT) {
        let mut p = BigInt::from(43);
        while &p * &p <= n {
            if n.is_multiple_of(&p) {
                return false;
            }
            p += 2;
        }
        return true;
    }
    miller_rabin(&n)
}

fn miller_rabin(n: &BigInt) -> bool {
    let one = BigInt::one();
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for base in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigInt::from(base).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of `|n|` as `(p, exponent)` pairs in increasing order.
pub fn factorize<T: Coord>(n: &T) -> Result<Vec<(T, u32)>> {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return Err(Error::ZeroInput);
    }
    let limit = T::from_u64(TRIAL_LIMIT);
    let mut p = T::from_i64_lossless(2);
    loop {
        if p.clone() * p.clone() > m {
            break;
        }
        if let Some(l) = &limit {
            if p > *l {
                break;
            }
        }
        if m.is_multiple_of(&p) {
            let mut e = 0;
            while m.is_multiple_of(&p) {
                m = m / p.clone();
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p = if p == T::from_i64_lossless(2) { p + T::one() } else { p + T::from_i64_lossless(2) };
    }
    if !m.is_one() {
        if !is_prime(&m) {
            return Err(Error::FactorizationTooHard(n.to_string()));
        }
        out.push((m, 1));
    }
    Ok(out)
}

/// All positive divisors of `n ≠ 0`, ascending.
pub fn divisors<T: Coord>(n: &T) -> Result<Vec<T>> {
    let mut divs = vec![T::one()];
    for (p, e) in factorize(n)? {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = T::one();
            for _ in 0..=e {
                next.push(d.clone() * pk.clone());
                pk = pk * p.clone();
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}
