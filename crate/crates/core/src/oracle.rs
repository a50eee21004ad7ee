//! Brute-force search for idempotent factorizations of small matrices.
//!
//! A nonzero singular target `T` has rank one, `T = c·τ·rᵀ`. Any product
//! `E₁⋯E_k = T` of non-identity idempotents has `E₁·T = T` and `T·E_k = T`,
//! so the first factor comes from the left stabilizer and the last from
//! the right one. Splitting the product as `P·Q` with `P = E₁⋯` and
//! `Q = ⋯E_k`, both sides live in the line spanned by `c·rᵀ`, and `P·Q = T`
//! reduces to the single bilinear entry condition `(P·Q)ᵢⱼ = Tᵢⱼ` at any
//! position where `Tᵢⱼ ≠ 0`. Length four is a hash join on that condition.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{Idempotent, Matrix2};
use crate::quad_ring::{QuadInteger, RingSpec};
use crate::scalar::Coord;

type Q<T> = QuadInteger<T>;

/// Ring elements with both stored coordinates in `[−h, h]`, sorted by height
/// then coordinates.
fn element_box<T: Coord>(ring: RingSpec, h: i64) -> Vec<Q<T>> {
    let mut out: Vec<Q<T>> = (-h..=h)
        .flat_map(|a| (-h..=h).map(move |b| (a, b)))
        .filter_map(|(a, b)| {
            QuadInteger::new(ring, T::from_i64_lossless(a), T::from_i64_lossless(b)).ok()
        })
        .collect();
    out.sort_by(|u, v| (u.height(), u.coords()).cmp(&(v.height(), v.coords())));
    out
}

fn matrix_key<T: Coord>(m: &Matrix2<T>) -> (T, [(&T, &T); 4]) {
    (m.height(), m.entries().map(|e| e.coords()))
}

/// Every idempotent matrix whose entries have coordinate height at most `h`.
///
/// Besides `0` and `I`, idempotents are `(a b; c 1−a)` with `b·c = a(1−a)`;
/// for `b ≠ 0`, `c` is forced, and for `b = 0`, `a ∈ {0, 1}` and `c` is free.
pub fn enumerate_idempotents<T: Coord>(ring: RingSpec, h: u32) -> Vec<Idempotent<T>> {
    let hh = T::from_i64_lossless(h as i64);
    let elems = element_box::<T>(ring, h as i64);
    let (zero, one) = (Q::<T>::zero(ring), Q::<T>::one(ring));
    let mut out = vec![Matrix2::zero(ring), Matrix2::identity(ring)];
    for a in &elems {
        let d = &one - a;
        if d.height() > hh {
            continue;
        }
        let ad = a * &d;
        for b in &elems {
            if b.is_zero() {
                if ad.is_zero() {
                    for c in &elems {
                        out.push(Matrix2::from_entries(a.clone(), zero.clone(), c.clone(), d.clone()));
                    }
                }
                continue;
            }
            if let Ok(Some(c)) = ad.try_divide(b) {
                if c.height() <= hh {
                    out.push(Matrix2::from_entries(a.clone(), b.clone(), c, d.clone()));
                }
            }
        }
    }
    out.sort_by(|u, v| matrix_key(u).cmp(&matrix_key(v)));
    out.dedup();
    out.into_iter().map(Idempotent::trusted).collect()
}

/// A shortest factorization found with factors of height at most
/// `height_bound` and at most `max_len` factors.
///
/// Heights are tried in increasing order, then lengths; within one level the
/// factor index tuple (positions in [`enumerate_idempotents`]) is
/// lexicographically least, so the result is deterministic.
pub fn brute_force_factor<T: Coord>(
    target: &Matrix2<T>,
    height_bound: u32,
    max_len: usize,
) -> Result<Option<Vec<Idempotent<T>>>> {
    if !target.is_singular() {
        return Err(Error::NotSingular);
    }
    if target.is_zero() {
        return Ok(Some(vec![Idempotent::trusted(Matrix2::zero(target.ring()))]));
    }
    for h in 1..=height_bound {
        let level = Level::new(target, enumerate_idempotents(target.ring(), h));
        for len in 1..=max_len {
            if let Some(found) = level.search(len) {
                debug_assert_eq!(crate::matrix::product(&found).as_ref(), Some(target));
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

struct Level<'a, T> {
    target: &'a Matrix2<T>,
    all: Vec<Idempotent<T>>,
    /// Non-identity `E` with `E·T = T`, as indices into `all`.
    left: Vec<usize>,
    /// Non-identity `E` with `T·E = T`.
    right: Vec<usize>,
    /// Position `(i, j)` with `Tᵢⱼ ≠ 0`.
    pivot: (usize, usize),
}

fn entry<T>(m: &Matrix2<T>, i: usize, j: usize) -> &Q<T> {
    match (i, j) {
        (0, 0) => &m.e11,
        (0, 1) => &m.e12,
        (1, 0) => &m.e21,
        _ => &m.e22,
    }
}

fn row_of<T: Coord>(m: &Matrix2<T>, i: usize) -> (Q<T>, Q<T>) {
    (entry(m, i, 0).clone(), entry(m, i, 1).clone())
}

fn col_of<T: Coord>(m: &Matrix2<T>, j: usize) -> (Q<T>, Q<T>) {
    (entry(m, 0, j).clone(), entry(m, 1, j).clone())
}

impl<'a, T: Coord> Level<'a, T> {
    fn new(target: &'a Matrix2<T>, all: Vec<Idempotent<T>>) -> Self {
        let identity = Matrix2::identity(target.ring());
        let stab = |pred: &dyn Fn(&Matrix2<T>) -> bool| -> Vec<usize> {
            all.iter()
                .enumerate()
                .filter(|(_, e)| e.matrix() != &identity && pred(e.matrix()))
                .map(|(i, _)| i)
                .collect()
        };
        let left = stab(&|e| &(e * target) == target);
        let right = stab(&|e| &(target * e) == target);
        let pivot = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .into_iter()
            .find(|&(i, j)| !entry(target, i, j).is_zero())
            .expect("nonzero target");
        Self { target, all, left, right, pivot }
    }

    fn pick(&self, idx: &[usize]) -> Vec<Idempotent<T>> {
        idx.iter().map(|&i| self.all[i].clone()).collect()
    }

    fn search(&self, len: usize) -> Option<Vec<Idempotent<T>>> {
        let (pi, pj) = self.pivot;
        let t = entry(self.target, pi, pj);
        match len {
            1 => self.all.iter().position(|e| e.matrix() == self.target).map(|i| self.pick(&[i])),
            2 => {
                let vs: Vec<_> = self.right.iter().map(|&k| col_of(self.all[k].matrix(), pj)).collect();
                self.left.iter().find_map(|&i| {
                    let u = row_of(self.all[i].matrix(), pi);
                    vs.iter()
                        .position(|v| &(&u.0 * &v.0 + &u.1 * &v.1) == t)
                        .map(|k| self.pick(&[i, self.right[k]]))
                })
            }
            3 => {
                let vs: Vec<_> = self.right.iter().map(|&k| col_of(self.all[k].matrix(), pj)).collect();
                let pairs: Vec<(usize, usize)> = self
                    .left
                    .iter()
                    .flat_map(|&i| (0..self.all.len()).map(move |j| (i, j)))
                    .collect();
                pairs.par_iter().find_map_first(|&(i, j)| {
                    let p = self.all[i].matrix() * self.all[j].matrix();
                    let u = row_of(&p, pi);
                    if u.0.is_zero() && u.1.is_zero() {
                        return None;
                    }
                    vs.iter()
                        .position(|v| &(&u.0 * &v.0 + &u.1 * &v.1) == t)
                        .map(|k| self.pick(&[i, j, self.right[k]]))
                })
            }
            4 => self.search_four(),
            _ => self.search_deep(len),
        }
    }

    /// Hash join of `P = E₁E₂` against `Q = E₃E₄` on `uᵀ·v = Tᵢⱼ`, with `u`
    /// row `i` of `P` and `v` column `j` of `Q`.
    fn search_four(&self) -> Option<Vec<Idempotent<T>>> {
        let (pi, pj) = self.pivot;
        let t = entry(self.target, pi, pj);
        // v₂ ↦ (v₁ ↦ least (E₃, E₄) index pair).
        let mut by_second: HashMap<Q<T>, HashMap<Q<T>, (usize, usize)>> = HashMap::new();
        for (k, e3) in self.all.iter().enumerate() {
            for &l in &self.right {
                let q = e3.matrix() * self.all[l].matrix();
                let (v1, v2) = col_of(&q, pj);
                let slot = by_second.entry(v2).or_default().entry(v1).or_insert((k, l));
                *slot = (*slot).min((k, l));
            }
        }
        let keys: Vec<&Q<T>> = by_second.keys().collect();
        let pairs: Vec<(usize, usize)> =
            self.left.iter().flat_map(|&i| (0..self.all.len()).map(move |j| (i, j))).collect();
        pairs.par_iter().find_map_first(|&(i, j)| {
            let p = self.all[i].matrix() * self.all[j].matrix();
            let (u1, u2) = row_of(&p, pi);
            let mut best: Option<(usize, usize)> = None;
            let mut consider = |hit: Option<&(usize, usize)>| {
                if let Some(&h) = hit {
                    best = Some(best.map_or(h, |b| b.min(h)));
                }
            };
            if u1.is_zero() {
                if u2.is_zero() {
                    return None;
                }
                let Ok(Some(v2)) = t.try_divide(&u2) else { return None };
                for hit in by_second.get(&v2).into_iter().flat_map(|m| m.values()) {
                    consider(Some(hit));
                }
            } else {
                for &v2 in &keys {
                    let rest = t - &(&u2 * v2);
                    if let Ok(Some(v1)) = rest.try_divide(&u1) {
                        consider(by_second.get(v2).and_then(|m| m.get(&v1)));
                    }
                }
            }
            best.map(|(k, l)| self.pick(&[i, j, k, l]))
        })
    }

    /// Plain depth-first search for lengths beyond four.
    fn search_deep(&self, len: usize) -> Option<Vec<Idempotent<T>>> {
        fn go<T: Coord>(
            lvl: &Level<'_, T>,
            acc: &Matrix2<T>,
            idx: &mut Vec<usize>,
            len: usize,
        ) -> bool {
            if idx.len() + 1 == len {
                for &k in &lvl.right {
                    if &(acc * lvl.all[k].matrix()) == lvl.target {
                        idx.push(k);
                        return true;
                    }
                }
                return false;
            }
            for k in 0..lvl.all.len() {
                idx.push(k);
                if go(lvl, &(acc * lvl.all[k].matrix()), idx, len) {
                    return true;
                }
                idx.pop();
            }
            false
        }
        for &i in &self.left {
            let mut idx = vec![i];
            if go(self, self.all[i].matrix(), &mut idx, len) {
                return Some(self.pick(&idx));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::product;

    fn z2() -> RingSpec {
        RingSpec::new(2).unwrap()
    }

    #[test]
    fn enumeration_matches_direct_scan() {
        for (ring, h) in [(z2(), 1u32), (RingSpec::new(5).unwrap(), 2), (RingSpec::new(-1).unwrap(), 1)] {
            let listed = enumerate_idempotents::<i64>(ring, h);
            let elems = element_box::<i64>(ring, h as i64);
            let mut scanned = Vec::new();
            for a in &elems {
                for b in &elems {
                    for c in &elems {
                        for d in &elems {
                            let m = Matrix2::from_entries(a.clone(), b.clone(), c.clone(), d.clone());
                            if m.is_idempotent() {
                                scanned.push(m);
                            }
                        }
                    }
                }
            }
            let mut listed: Vec<_> = listed.into_iter().map(Idempotent::into_matrix).collect();
            listed.sort_by(|u, v| matrix_key(u).cmp(&matrix_key(v)));
            scanned.sort_by(|u, v| matrix_key(u).cmp(&matrix_key(v)));
            assert_eq!(listed, scanned, "ring {}", ring.d());
        }
    }

    #[test]
    fn small_examples() {
        let r = z2();
        let t = Matrix2::<i64>::from_i64(r, [[0, 0], [5, 0], [0, 0], [0, 0]]).unwrap();
        let f = brute_force_factor(&t, 5, 2).unwrap().unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(product(&f).unwrap(), t);

        let t = Matrix2::<i64>::from_i64(r, [[1, 0], [0, 0], [0, 0], [0, 0]]).unwrap();
        let f = brute_force_factor(&t, 1, 1).unwrap().unwrap();
        assert_eq!(f.len(), 1);

        let t = Matrix2::<i64>::from_i64(r, [[2, 0], [3, 0], [0, 0], [0, 0]]).unwrap();
        let f = brute_force_factor(&t, 6, 4).unwrap().unwrap();
        assert_eq!(product(&f).unwrap(), t);

        let t = Matrix2::<i64>::identity(r);
        assert_eq!(brute_force_factor(&t, 1, 1), Err(Error::NotSingular));
    }

    #[test]
    fn four_factor_join_agrees_with_depth_first() {
        let r = z2();
        let t = Matrix2::<i64>::from_i64(r, [[4, 0], [2, 1], [0, 0], [0, 0]]).unwrap();
        let all = enumerate_idempotents(r, 1);
        let level = Level::new(&t, all);
        let joined = level.search_four();
        let deep = level.search_deep(4);
        assert_eq!(joined.is_some(), deep.is_some());
        if let Some(f) = joined {
            assert_eq!(product(&f).unwrap(), t);
        }
    }
}
