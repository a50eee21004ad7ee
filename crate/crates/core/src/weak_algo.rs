//! Weak Euclidean algorithms: chains of divisions `rᵢ = qᵢ₊₁·rᵢ₊₁ + rᵢ₊₂`
//! ending in a zero remainder, with no requirement that norms decrease.
//!
//! A chain for `(x, y)` turns into an idempotent factorization of `[x y]`
//! by peeling one `(1 0; q 0)` factor every other division and closing with
//! the two-factor forms of `[z 0]` or `[0 z]`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::{Idempotent, Matrix2};
use crate::quad_ring::QuadInteger;
use crate::scalar::Coord;
use crate::toolkit::fundamental_unit;

/// Default bound on the number of divisions in a searched chain.
pub const DEFAULT_BUDGET: usize = 12;

/// Nodes explored per unit of budget before a search gives up.
const NODES_PER_BUDGET: usize = 4_000;

/// Remainders `r₋₁, r₀, …, rₙ` (stored from index 0) and quotients `q₀, …, qₙ₋₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakChain<T> {
    remainders: Vec<QuadInteger<T>>,
    quotients: Vec<QuadInteger<T>>,
}

impl<T: Coord> WeakChain<T> {
    pub fn new(remainders: Vec<QuadInteger<T>>, quotients: Vec<QuadInteger<T>>) -> Result<Self> {
        let chain = Self { remainders, quotients };
        chain.validate()?;
        Ok(chain)
    }

    /// Checks `rᵢ = qᵢ₊₁·rᵢ₊₁ + rᵢ₊₂` for every step and `rₙ = 0`.
    pub fn validate(&self) -> Result<()> {
        let (r, q) = (&self.remainders, &self.quotients);
        if r.len() != q.len() + 2 {
            return Err(Error::InvalidChain(format!(
                "{} remainders for {} quotients",
                r.len(),
                q.len()
            )));
        }
        for (j, qj) in q.iter().enumerate() {
            r[j].same_ring(qj)?;
            if r[j] != qj * &r[j + 1] + &r[j + 2] {
                return Err(Error::InvalidChain(format!("division {j} does not replay")));
            }
        }
        let last = r.last().expect("at least two remainders");
        if !last.is_zero() {
            return Err(Error::InvalidChain(format!("final remainder {last} is not zero")));
        }
        Ok(())
    }

    pub fn remainders(&self) -> &[QuadInteger<T>] {
        &self.remainders
    }

    pub fn quotients(&self) -> &[QuadInteger<T>] {
        &self.quotients
    }

    /// Number of divisions `n`.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn x(&self) -> &QuadInteger<T> {
        &self.remainders[0]
    }

    pub fn y(&self) -> &QuadInteger<T> {
        &self.remainders[1]
    }

    /// Drops pairs of consecutive zero quotients; each such pair just
    /// swaps twice and returns to the same pair of remainders.
    pub fn minimized(mut self) -> Self {
        let mut j = 0;
        while j + 1 < self.quotients.len() {
            if self.quotients[j].is_zero() && self.quotients[j + 1].is_zero() {
                self.quotients.drain(j..j + 2);
                self.remainders.drain(j + 1..j + 3);
                j = j.saturating_sub(1);
            } else {
                j += 1;
            }
        }
        debug_assert!(self.validate().is_ok());
        self
    }
}

/// How candidate quotients are generated from the exact ratio `a/b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientRule {
    /// Nearest integer in each basis coordinate, plus offsets of ±1 on each,
    /// also against the associates `b·ε^j` in real rings; explored
    /// depth-first in order of remainder norm. Small-norm divisors are first
    /// tried for a two-step finish through a unit remainder.
    Nearest,
    /// Floor of each basis coordinate only; classical Euclid on integers.
    Floor,
}

/// Bounded search for a weak chain starting `r₋₁ = x`, `r₀ = y`.
pub fn find_weak_chain<T: Coord>(
    x: &QuadInteger<T>,
    y: &QuadInteger<T>,
    budget: usize,
) -> Result<Option<WeakChain<T>>> {
    find_weak_chain_with(x, y, budget, QuotientRule::Nearest)
}

pub fn find_weak_chain_with<T: Coord>(
    x: &QuadInteger<T>,
    y: &QuadInteger<T>,
    budget: usize,
    rule: QuotientRule,
) -> Result<Option<WeakChain<T>>> {
    x.same_ring(y)?;
    if y.is_zero() {
        return Err(Error::ZeroDivisorChain);
    }
    let ring = x.ring();
    let unit = if ring.is_real() && rule == QuotientRule::Nearest {
        let eps = fundamental_unit::<T>(ring)?;
        // ε⁻¹ = ±ε̄ depending on the sign of N(ε).
        let inv = if eps.norm().is_one() { eps.conj() } else { -eps.conj() };
        Some((eps, inv))
    } else {
        None
    };
    let mut search = Search {
        rule,
        budget,
        node_cap: NODES_PER_BUDGET * budget.max(1),
        nodes: 0,
        unit,
        visited: HashMap::new(),
        remainders: vec![x.clone(), y.clone()],
        quotients: Vec::new(),
    };
    if !search.descend(0) {
        return Ok(None);
    }
    let chain = WeakChain::new(search.remainders, search.quotients)?;
    Ok(Some(chain.minimized()))
}

/// Longest unit orbit walked modulo one remainder norm.
const MAX_UNIT_ORDER: usize = 6_000;

/// Remainder norms small enough for the unit-congruence finish.
const UNIT_FINISH_NORM: i64 = 5_000;

/// Associates `b·εʲ`, `|j| ≤ UNIT_SPREAD`, used as divisors.
const UNIT_SPREAD: i32 = 2;

/// `w ≡ 0 (mod r)`, decided as `w·r̄ ∈ N(r)·D` on basis coordinates.
fn divides_mod<T: Coord>(r_conj: &QuadInteger<T>, n: &T, w: &QuadInteger<T>) -> bool {
    let (c0, c1) = (w * r_conj).basis_coords();
    c0.is_multiple_of(n) && c1.is_multiple_of(n)
}

fn reduce_mod<T: Coord>(w: &QuadInteger<T>, n: &T) -> QuadInteger<T> {
    let (c0, c1) = w.basis_coords();
    QuadInteger::from_basis(w.ring(), c0.mod_floor(n), c1.mod_floor(n))
}

/// A unit `u = ±εᵏ` with `target ≡ u (mod r)`, choosing the exponent of least
/// size within the orbit of `ε` modulo `N(r)`.
fn unit_congruent<T: Coord>(
    target: &QuadInteger<T>,
    r: &QuadInteger<T>,
    eps: &QuadInteger<T>,
    eps_inv: &QuadInteger<T>,
) -> Option<QuadInteger<T>> {
    let n = r.norm().abs();
    if n.is_zero() {
        return None;
    }
    let ring = r.ring();
    let r_conj = r.conj();
    let one = QuadInteger::one(ring);
    if n.is_one() {
        return Some(one);
    }
    // Walk ε⁰, ε¹, … modulo N(r) until the orbit closes.
    let mut hit = None;
    let mut period = None;
    let mut z = reduce_mod(&one, &n);
    for k in 0..MAX_UNIT_ORDER {
        if hit.is_none() {
            for sign in [true, false] {
                let u = if sign { z.clone() } else { -&z };
                if divides_mod(&r_conj, &n, &(target - &u)) {
                    hit = Some((k, sign));
                    break;
                }
            }
        }
        z = reduce_mod(&(&z * eps), &n);
        if divides_mod(&r_conj, &n, &(&z - &one)) {
            period = Some(k + 1);
            break;
        }
    }
    let (k, sign) = hit?;
    let unit = match period {
        Some(p) if p - k < k => eps_inv.pow(u32::try_from(p - k).ok()?),
        _ => eps.pow(u32::try_from(k).ok()?),
    };
    Some(if sign { unit } else { -unit })
}

struct Search<T> {
    rule: QuotientRule,
    budget: usize,
    node_cap: usize,
    nodes: usize,
    unit: Option<(QuadInteger<T>, QuadInteger<T>)>,
    visited: HashMap<(QuadInteger<T>, QuadInteger<T>), usize>,
    remainders: Vec<QuadInteger<T>>,
    quotients: Vec<QuadInteger<T>>,
}

impl<T: Coord> Search<T> {
    fn descend(&mut self, depth: usize) -> bool {
        let remaining = self.budget - depth;
        if remaining == 0 || self.nodes >= self.node_cap {
            return false;
        }
        self.nodes += 1;
        let n = self.remainders.len();
        let (a, b) = (self.remainders[n - 2].clone(), self.remainders[n - 1].clone());
        if remaining == 1 {
            // Only an exact division can finish the chain.
            return match a.try_divide(&b) {
                Ok(Some(q)) => {
                    self.quotients.push(q);
                    self.remainders.push(QuadInteger::zero(a.ring()));
                    true
                }
                _ => false,
            };
        }
        let key = (a.clone(), b.clone());
        if self.visited.get(&key).is_some_and(|&seen| seen >= remaining) {
            return false;
        }
        self.visited.insert(key, remaining);

        if let Some(u) = self.unit_finish(&a, &b) {
            // a = q·b + u, then b = (b/u)·u.
            if let (Ok(Some(q0)), Ok(Some(q1))) = ((&a - &u).try_divide(&b), b.try_divide(&u)) {
                self.quotients.extend([q0, q1]);
                self.remainders.extend([u, QuadInteger::zero(a.ring())]);
                return true;
            }
        }

        for (q, r) in self.candidates(&a, &b) {
            let done = r.is_zero();
            self.quotients.push(q);
            self.remainders.push(r);
            if done || self.descend(depth + 1) {
                return true;
            }
            self.quotients.pop();
            self.remainders.pop();
        }
        false
    }

    fn candidates(
        &self,
        a: &QuadInteger<T>,
        b: &QuadInteger<T>,
    ) -> Vec<(QuadInteger<T>, QuadInteger<T>)> {
        let ring = a.ring();
        let (c0, c1, den) = a.rational_quotient(b);
        let with_remainder = |q: QuadInteger<T>| {
            let r = a - &(&q * b);
            (q, r)
        };
        if self.rule == QuotientRule::Floor {
            let q = QuadInteger::from_basis(ring, c0.div_floor(&den), c1.div_floor(&den));
            return vec![with_remainder(q)];
        }
        let mut out = nearest_candidates(a, b, &QuadInteger::one(ring));
        if let Some((eps, eps_inv)) = &self.unit {
            // Dividing by an associate b·εʲ changes the rounding error, and
            // N(r) = N(b)·N(error) whatever j is.
            let (mut up, mut down) = (QuadInteger::one(ring), QuadInteger::one(ring));
            for _ in 0..UNIT_SPREAD {
                up = &up * eps;
                down = &down * eps_inv;
                out.extend(nearest_candidates(a, b, &up));
                out.extend(nearest_candidates(a, b, &down));
            }
        }
        out.sort_by_key(|(_, r)| r.norm().abs());
        out.dedup_by(|p, q| p.1 == q.1);
        out
    }

    fn unit_finish(&self, a: &QuadInteger<T>, b: &QuadInteger<T>) -> Option<QuadInteger<T>> {
        let (eps, eps_inv) = self.unit.as_ref()?;
        if b.norm().abs() > T::from_i64_lossless(UNIT_FINISH_NORM) {
            return None;
        }
        unit_congruent(a, b, eps, eps_inv)
    }
}

/// Quotients `q = s·round(a/(b·s))` with offsets of ±1 per basis coordinate
/// before scaling back by the unit `s`.
fn nearest_candidates<T: Coord>(
    a: &QuadInteger<T>,
    b: &QuadInteger<T>,
    s: &QuadInteger<T>,
) -> Vec<(QuadInteger<T>, QuadInteger<T>)> {
    let ring = a.ring();
    let (c0, c1, den) = a.rational_quotient(&(b * s));
    let two = T::one() + T::one();
    let round = |c: &T| (two.clone() * c.clone() + den.clone()).div_floor(&(two.clone() * den.clone()));
    let (base0, base1) = (round(&c0), round(&c1));
    let offsets = [T::zero(), -T::one(), T::one()];
    offsets
        .iter()
        .flat_map(|d0| offsets.iter().map(move |d1| (d0.clone(), d1.clone())))
        .map(|(d0, d1)| {
            let q = &QuadInteger::from_basis(ring, base0.clone() + d0, base1.clone() + d1) * s;
            let r = a - &(&q * b);
            (q, r)
        })
        .collect()
}

/// Idempotent factors `F₁…F_k` with `F₁·…·F_k = [r₋₁ r₀]`.
///
/// Even-indexed divisions are undone by conjugating with `(1 0; q 1)` and
/// peeling `(1 0; q 0)`; odd-indexed ones are a pure similarity by
/// `(1 q; 0 1)`. Accumulated similarities are pushed into every factor.
pub fn chain_to_idempotents<T: Coord>(chain: &WeakChain<T>) -> Result<Vec<Idempotent<T>>> {
    chain.validate()?;
    let ring = chain.x().ring();
    let (zero, one) = (QuadInteger::zero(ring), QuadInteger::one(ring));
    let mut acc = Matrix2::identity(ring);
    let mut acc_inv = Matrix2::identity(ring);
    let mut factors = Vec::with_capacity(chain.len() / 2 + 2);

    for (j, q) in chain.quotients().iter().enumerate() {
        let (s, s_inv) = if j % 2 == 0 {
            (Matrix2::lower(q.clone()), Matrix2::lower(-q))
        } else {
            (Matrix2::upper(q.clone()), Matrix2::upper(-q))
        };
        acc = &s * &acc;
        acc_inv = &acc_inv * &s_inv;
        if j % 2 == 0 {
            let peel = Matrix2::from_entries(one.clone(), zero.clone(), q.clone(), zero.clone());
            factors.push(Idempotent::trusted(peel).conjugate_by(&acc, &acc_inv));
        }
    }

    let n = chain.len();
    let z = chain.remainders()[n].clone();
    let terminal = if n % 2 == 0 {
        // [z 0] = [1 −1]·(1 0; 1−z 0)
        [
            Matrix2::row(one.clone(), -&one),
            Matrix2::from_entries(one.clone(), zero.clone(), &one - &z, zero.clone()),
        ]
    } else {
        // [0 z] = [1 0]·(0 z; 0 1)
        [
            Matrix2::row(one.clone(), zero.clone()),
            Matrix2::from_entries(zero.clone(), z, zero.clone(), one.clone()),
        ]
    };
    for t in terminal {
        factors.push(Idempotent::trusted(t).conjugate_by(&acc, &acc_inv));
    }
    Ok(collapse_repeats(factors))
}

/// `E·E = E`, so adjacent equal factors merge.
pub(crate) fn collapse_repeats<T: Coord>(mut factors: Vec<Idempotent<T>>) -> Vec<Idempotent<T>> {
    factors.dedup();
    factors
}

/// The chain defined by `r₁ = x − y·q₀`, `rᵢ₊₂ = rᵢ − rᵢ₊₁·qᵢ₊₁`, as produced
/// from an elementary factorization of a matrix with first column `(x, y)`.
pub fn elementary_to_weak_chain<T: Coord>(
    quotients: &[QuadInteger<T>],
    seed: (&QuadInteger<T>, &QuadInteger<T>),
) -> Result<WeakChain<T>> {
    seed.0.same_ring(seed.1)?;
    let mut remainders = vec![seed.0.clone(), seed.1.clone()];
    for (i, q) in quotients.iter().enumerate() {
        let next = &remainders[i] - &(&remainders[i + 1] * q);
        remainders.push(next);
    }
    let last = remainders.last().expect("seed present");
    if !last.is_zero() {
        return Err(Error::NonTerminatingReplay(last.to_string()));
    }
    WeakChain::new(remainders, quotients.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::product;
    use crate::quad_ring::RingSpec;
    use num_bigint::BigInt;

    type Q = QuadInteger<BigInt>;

    fn q(d: i64, s: &str) -> Q {
        Q::parse(RingSpec::new(d).unwrap(), s).unwrap()
    }

    fn strings(v: &[Q]) -> Vec<String> {
        v.iter().map(|z| z.to_string()).collect()
    }

    #[test]
    fn integer_euclid_with_floor_rule() {
        let chain = find_weak_chain_with(&q(2, "15"), &q(2, "4"), 12, QuotientRule::Floor)
            .unwrap()
            .unwrap();
        assert_eq!(strings(chain.remainders()), ["15", "4", "3", "1", "0"]);
        assert_eq!(strings(chain.quotients()), ["3", "1", "3"]);
    }

    #[test]
    fn two_exact_divisions() {
        let chain = find_weak_chain_with(&q(2, "1+s"), &q(2, "s"), 12, QuotientRule::Floor)
            .unwrap()
            .unwrap();
        assert_eq!(strings(chain.remainders()), ["1+s", "s", "1", "0"]);
        assert_eq!(strings(chain.quotients()), ["1", "s"]);
        let nearest = find_weak_chain(&q(2, "1+s"), &q(2, "s"), 12).unwrap().unwrap();
        assert!(nearest.len() <= 2);
    }

    #[test]
    fn comaximal_pair_in_non_euclidean_ring() {
        let chain = find_weak_chain(&q(10, "8"), &q(10, "1+s"), DEFAULT_BUDGET).unwrap().unwrap();
        chain.validate().unwrap();
        assert!(chain.len() <= DEFAULT_BUDGET);
    }

    #[test]
    fn zero_divisor_rejected() {
        assert_eq!(
            find_weak_chain(&q(10, "3"), &q(10, "0"), 12),
            Err(Error::ZeroDivisorChain)
        );
    }

    #[test]
    fn non_principal_pair_finds_nothing() {
        assert_eq!(find_weak_chain(&q(10, "3"), &q(10, "1+s"), 6).unwrap(), None);
    }

    #[test]
    fn zero_case_closed_forms() {
        let z = q(10, "2+s");
        let chain = WeakChain::new(vec![z.clone(), q(10, "0")], vec![]).unwrap();
        let f = chain_to_idempotents(&chain).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].matrix().to_string(), "(1, -1; 0, 0)");
        assert_eq!(f[1].matrix().to_string(), "(1, 0; -1-s, 0)");
        assert_eq!(product(&f).unwrap(), Matrix2::row(z.clone(), q(10, "0")));

        let chain = WeakChain::new(vec![q(10, "0"), z.clone(), q(10, "0")], vec![q(10, "0")]).unwrap();
        let f = chain_to_idempotents(&chain).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].matrix().to_string(), "(1, 0; 0, 0)");
        assert_eq!(f[1].matrix().to_string(), "(0, 2+s; 0, 1)");
        assert_eq!(product(&f).unwrap(), Matrix2::row(q(10, "0"), z));
    }

    #[test]
    fn chain_factors_multiply_back() {
        let chain = find_weak_chain_with(&q(2, "1+s"), &q(2, "s"), 12, QuotientRule::Floor)
            .unwrap()
            .unwrap();
        let f = chain_to_idempotents(&chain).unwrap();
        assert!(f.iter().all(|e| e.matrix().is_idempotent()));
        assert_eq!(product(&f).unwrap(), Matrix2::row(q(2, "1+s"), q(2, "s")));
    }

    #[test]
    fn invalid_chain_rejected() {
        let bad = WeakChain::new(vec![q(10, "5"), q(10, "2"), q(10, "0")], vec![q(10, "2")]);
        assert!(matches!(bad, Err(Error::InvalidChain(_))));
    }

    #[test]
    fn elementary_replay() {
        let chain = elementary_to_weak_chain(&[], (&q(10, "1"), &q(10, "0"))).unwrap();
        assert_eq!(chain.len(), 0);
        let quots = [q(10, "3"), q(10, "1"), q(10, "3")];
        let chain = elementary_to_weak_chain(&quots, (&q(10, "15"), &q(10, "4"))).unwrap();
        assert_eq!(strings(chain.remainders()), ["15", "4", "3", "1", "0"]);
        // Zero-quotient padding is a legitimate step.
        let chain = elementary_to_weak_chain(&[q(10, "0"), q(10, "2")], (&q(10, "1"), &q(10, "2")))
            .unwrap();
        assert!(chain.quotients()[0].is_zero());
        assert!(matches!(
            elementary_to_weak_chain(&[q(10, "2")], (&q(10, "5"), &q(10, "2"))),
            Err(Error::NonTerminatingReplay(_))
        ));
    }

    #[test]
    fn minimize_drops_zero_pairs() {
        let quots = [q(10, "0"), q(10, "0"), q(10, "3"), q(10, "1"), q(10, "3")];
        let chain = elementary_to_weak_chain(&quots, (&q(10, "15"), &q(10, "4"))).unwrap();
        assert_eq!(chain.len(), 5);
        let m = chain.minimized();
        assert_eq!(strings(m.quotients()), ["3", "1", "3"]);
        assert_eq!(strings(m.remainders()), ["15", "4", "3", "1", "0"]);
    }
}
