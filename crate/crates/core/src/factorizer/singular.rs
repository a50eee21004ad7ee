//! Singular matrices that are not rows: column-row splits, the `UᴴU` ansatz
//! and the bounded oracle fallback.

use super::row::factor_row;
use super::{cohn_gate, FactorizationTrace, GateVerdict, Rule, TraceStep};
use crate::divisibility::{comaximal_witness, is_pair_principal, norm_classes};
use crate::error::{Error, Result};
use crate::matrix::{Idempotent, Matrix2};
use crate::oracle::brute_force_factor;
use crate::quad_ring::QuadInteger;
use crate::scalar::Coord;
use crate::toolkit::{divisors, gcd, solve_affine_system};
use crate::weak_algo::DEFAULT_BUDGET;

type Q<T> = QuadInteger<T>;

/// A split `M = (x; y)·(a b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRow<T> {
    pub col: (QuadInteger<T>, QuadInteger<T>),
    pub row: (QuadInteger<T>, QuadInteger<T>),
}

impl<T: Coord> ColumnRow<T> {
    pub fn product(&self) -> Matrix2<T> {
        let ((x, y), (a, b)) = (&self.col, &self.row);
        Matrix2::from_entries(x * a, x * b, y * a, y * b)
    }

    fn transposed(self) -> Self {
        Self { col: self.row, row: self.col }
    }
}

/// If `(p₁, p₂)` is principal, `p = g·(a, b)` with `(a, b)` comaximal and the
/// other (proportional) row is `o = y·(a, b)` with `y = o₁u + o₂v`.
fn split_on_row<T: Coord>(p: (&Q<T>, &Q<T>), o: (&Q<T>, &Q<T>)) -> Result<Option<(Q<T>, Q<T>, Q<T>, Q<T>)>> {
    let Some(g) = is_pair_principal(p.0, p.1)? else { return Ok(None) };
    let a = p.0.div_exact(&g);
    let b = p.1.div_exact(&g);
    let (u, v) = comaximal_witness(&a, &b)?.expect("generator quotient is comaximal");
    let y = o.0 * &u + o.1 * &v;
    Ok(Some((g, y, a, b)))
}

fn rows_split<T: Coord>(m: &Matrix2<T>) -> Result<Option<ColumnRow<T>>> {
    let ring = m.ring();
    let (zero, one) = (Q::zero(ring), Q::one(ring));
    let r1 = (&m.e11, &m.e12);
    let r2 = (&m.e21, &m.e22);
    if r1.0.is_zero() && r1.1.is_zero() {
        return Ok(Some(ColumnRow { col: (zero, one), row: (r2.0.clone(), r2.1.clone()) }));
    }
    if r2.0.is_zero() && r2.1.is_zero() {
        return Ok(Some(ColumnRow { col: (one, zero), row: (r1.0.clone(), r1.1.clone()) }));
    }
    if let Some((g, y, a, b)) = split_on_row(r1, r2)? {
        return Ok(Some(ColumnRow { col: (g, y), row: (a, b) }));
    }
    if let Some((g, y, a, b)) = split_on_row(r2, r1)? {
        return Ok(Some(ColumnRow { col: (y, g), row: (a, b) }));
    }
    Ok(None)
}

/// Splits through a divisor `z` of a pivot row: `row' = rowᵢ/z` and the
/// column is read off the pivot column. Any split `(x; y)(a b)` is found with
/// `z` an associate of `xᵢ`, so trying every divisor class is complete.
fn divisor_split<T: Coord>(m: &Matrix2<T>) -> Result<Option<ColumnRow<T>>> {
    let rows = [[&m.e11, &m.e12], [&m.e21, &m.e22]];
    let Some((i, j)) = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).find(|&(i, j)| !rows[i][j].is_zero())
    else {
        return Ok(None);
    };
    let row = rows[i];
    let g = gcd(&row[0].norm().abs(), &row[1].norm().abs());
    for n in divisors(&g)? {
        for z in norm_classes(m.ring(), &n)? {
            let (Some(a), Some(b)) = (row[0].try_divide(&z)?, row[1].try_divide(&z)?) else { continue };
            let pivot = if j == 0 { &a } else { &b };
            let (Some(x), Some(y)) = (rows[0][j].try_divide(pivot)?, rows[1][j].try_divide(pivot)?) else {
                continue;
            };
            return Ok(Some(ColumnRow { col: (x, y), row: (a, b) }));
        }
    }
    Ok(None)
}

/// A column-row split: first through a principal row or column ideal, then
/// by scanning divisor classes of a pivot row. `None` means `M` is not a
/// column-row matrix.
pub fn as_column_row<T: Coord>(m: &Matrix2<T>) -> Result<Option<ColumnRow<T>>> {
    if !m.is_singular() {
        return Err(Error::NotSingular);
    }
    let split = match rows_split(m)? {
        Some(s) => Some(s),
        None => match rows_split(&m.transpose())? {
            Some(s) => Some(s.transposed()),
            None => divisor_split(m)?,
        },
    };
    if let Some(s) = &split {
        if &s.product() != m {
            return Err(Error::VerificationFailed(format!("column-row split of {m}")));
        }
    }
    Ok(split)
}

/// `(x; y)·(a b) = (x 0; y 0)·(a b; 0 0)`, the left factor being the
/// transpose of `[x y]`.
pub fn factor_column_row<T: Coord>(split: &ColumnRow<T>, budget: usize) -> Result<FactorizationTrace<T>> {
    let ((x, y), (a, b)) = (&split.col, &split.row);
    let left = factor_row(x, y, budget)?;
    let right = factor_row(a, b, budget)?;
    let mut factors: Vec<Idempotent<T>> = left.factors().iter().rev().map(Idempotent::transpose).collect();
    factors.extend(right.factors().iter().cloned());
    let mut steps = vec![TraceStep::new(Rule::ColumnRowSplit, format!("({x}; {y})·({a} {b})"))];
    steps.extend(left.steps().iter().cloned());
    steps.extend(right.steps().iter().cloned());
    let mut chains = left.chains().to_vec();
    chains.extend(right.chains().iter().cloned());
    FactorizationTrace::new(split.product(), factors, steps, chains)
        .map_err(|e| Error::VerificationFailed(e.to_string()))
}

/// The residue check behind the non-existence of `S = UᴴU`: the norm
/// equation forced by the ansatz for `S` has no solution modulo 5.
pub fn mod5_obstruction_holds() -> bool {
    (0..5i64).all(|h| {
        (0..5i64).all(|k| (3 * h * h - 30 * k * k + 20 * k - 3 - 1).rem_euclid(5) != 0)
    })
}

/// An idempotent `U = (a b; c 1−a)` with `Uᴴ·U = M`.
///
/// Rows of `U` must be proportional to the nonzero row `r` of `M`, which is
/// an affine integer system in the basis coordinates of `a, b, c` with a
/// two-dimensional solution lattice `p + h·k₁ + k·k₂`. Every remaining
/// condition is quadratic in `k` for fixed `h`, so `h` is scanned over
/// `|h| ≤ height_bound` (in order of `|h|`) and `k` is solved exactly.
pub fn ansatz_uhu<T: Coord>(m: &Matrix2<T>, height_bound: u32) -> Result<Option<(Q<T>, Q<T>, Q<T>)>> {
    if !m.is_singular() {
        return Err(Error::NotSingular);
    }
    if !(m.e11.is_rational() && m.e22.is_rational() && m.e21 == m.e12.conj()) {
        return Err(Error::NotHermitianShape);
    }
    if m.is_zero() {
        return Ok(None);
    }
    let ring = m.ring();
    let (r1, r2) = if m.e11.is_zero() && m.e12.is_zero() {
        (&m.e21, &m.e22)
    } else {
        (&m.e11, &m.e12)
    };
    let theta = Q::<T>::basis_generator(ring);
    // Columns of multiplication by z in the integral basis.
    let mul = |z: &Q<T>| -> [(T, T); 2] { [z.basis_coords(), (z * &theta).basis_coords()] };
    let neg_r1 = -r1;
    let zero_block = [(T::zero(), T::zero()), (T::zero(), T::zero())];
    // a·r₂ − b·r₁ = 0 and a·r₁ + c·r₂ = r₁; unknowns (a₀, a₁, b₀, b₁, c₀, c₁).
    let blocks = [[mul(r2), mul(&neg_r1), zero_block.clone()], [mul(r1), zero_block, mul(r2)]];
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(4);
    for eq in &blocks {
        for coord in 0..2 {
            let row = eq
                .iter()
                .flat_map(|block| block.iter().map(|col| if coord == 0 { col.0.clone() } else { col.1.clone() }))
                .collect();
            rows.push(row);
        }
    }
    let (t0, t1) = r1.basis_coords();
    let Some(sol) = solve_affine_system(&rows, &[T::zero(), T::zero(), t0, t1]) else {
        return Ok(None);
    };
    let candidate = |v: &[T]| -> (Q<T>, Q<T>, Q<T>) {
        let el = |i: usize| Q::from_basis(ring, v[i].clone(), v[i + 1].clone());
        (el(0), el(2), el(4))
    };
    let residuals = |v: &[T]| -> Vec<T> {
        let (a, b, c) = candidate(v);
        let one = Q::one(ring);
        let u = Matrix2::from_entries(a.clone(), b.clone(), c.clone(), &one - &a);
        let diff = &u.conj_transpose() * &u;
        let idem = &(&b * &c) - &(&a * &(&one - &a));
        let mut out = Vec::with_capacity(10);
        for (p, q) in diff.entries().iter().zip(m.entries()) {
            let (x0, x1) = (*p - q).basis_coords();
            out.push(x0);
            out.push(x1);
        }
        let (i0, i1) = idem.basis_coords();
        out.push(i0);
        out.push(i1);
        out
    };
    let accept = |v: &[T]| residuals(v).iter().all(|r| r.is_zero());

    let mut kernel = sol.kernel.clone();
    let mut p = sol.particular.clone();
    match kernel.len() {
        0 => return Ok(accept(&p).then(|| candidate(&p))),
        1 => {
            size_reduce(&mut p, &kernel);
            for h in signed_range(height_bound) {
                let v = axpy(&p, &T::from_i64_lossless(h), &kernel[0]);
                if accept(&v) {
                    return Ok(Some(candidate(&v)));
                }
            }
            return Ok(None);
        }
        2 => {}
        n => {
            return Err(Error::PreconditionViolated(format!("ansatz lattice has rank {n}")));
        }
    }
    lagrange_reduce(&mut kernel);
    size_reduce(&mut p, &kernel);
    let (k1, k2) = (&kernel[0], &kernel[1]);
    let (minus_one, one) = (-T::one(), T::one());
    for h in signed_range(height_bound) {
        let base = axpy(&p, &T::from_i64_lossless(h), k1);
        let at = |k: &T| residuals(&axpy(&base, k, k2));
        let (rm, r0, rp) = (at(&minus_one), at(&T::zero()), at(&one));
        let two = T::one() + T::one();
        let mut roots: Option<Vec<T>> = None;
        for i in 0..r0.len() {
            // r(k) = c₀ + c₁k + c₂k² through k = −1, 0, 1.
            let c0 = r0[i].clone();
            let c1 = (rp[i].clone() - rm[i].clone()) / two.clone();
            let c2 = (rp[i].clone() + rm[i].clone()) / two.clone() - c0.clone();
            if c0.is_zero() && c1.is_zero() && c2.is_zero() {
                continue;
            }
            roots = Some(integer_roots(&c2, &c1, &c0));
            break;
        }
        let roots = roots.unwrap_or_else(|| vec![T::zero()]);
        for k in roots {
            let v = axpy(&base, &k, k2);
            if accept(&v) {
                return Ok(Some(candidate(&v)));
            }
        }
    }
    Ok(None)
}

/// `0, 1, −1, 2, −2, …, ±n`.
fn signed_range(n: u32) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=n as i64).flat_map(|h| [h, -h]))
}

fn axpy<T: Coord>(p: &[T], s: &T, k: &[T]) -> Vec<T> {
    p.iter().zip(k).map(|(a, b)| a.clone() + s.clone() * b.clone()).collect()
}

fn dot<T: Coord>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// `round(n/d)` for `d > 0`.
fn round_div<T: Coord>(n: &T, d: &T) -> T {
    let two = T::one() + T::one();
    (two.clone() * n.clone() + d.clone()).div_floor(&(two * d.clone()))
}

/// Gauss–Lagrange reduction of a two-vector lattice basis.
fn lagrange_reduce<T: Coord>(basis: &mut [Vec<T>]) {
    loop {
        if dot(&basis[0], &basis[0]) > dot(&basis[1], &basis[1]) {
            basis.swap(0, 1);
        }
        let n0 = dot(&basis[0], &basis[0]);
        let mu = round_div(&dot(&basis[0], &basis[1]), &n0);
        if mu.is_zero() {
            return;
        }
        basis[1] = axpy(&basis[1], &-mu, &basis[0]);
        if dot(&basis[1], &basis[1]) >= n0 {
            return;
        }
    }
}

/// Moves `p` close to the origin within its coset.
fn size_reduce<T: Coord>(p: &mut Vec<T>, basis: &[Vec<T>]) {
    for _ in 0..2 {
        for b in basis.iter().rev() {
            let mu = round_div(&dot(p, b), &dot(b, b));
            *p = axpy(p, &-mu, b);
        }
    }
}

/// Integer roots of `c₂k² + c₁k + c₀` (not all coefficients zero).
fn integer_roots<T: Coord>(c2: &T, c1: &T, c0: &T) -> Vec<T> {
    if c2.is_zero() {
        if c1.is_zero() || !c0.is_multiple_of(c1) {
            return Vec::new();
        }
        return vec![-(c0.clone() / c1.clone())];
    }
    let four = T::from_i64_lossless(4);
    let disc = c1.clone() * c1.clone() - four * c2.clone() * c0.clone();
    if disc.is_negative() {
        return Vec::new();
    }
    let root = disc.sqrt();
    if root.clone() * root.clone() != disc {
        return Vec::new();
    }
    let den = c2.clone() + c2.clone();
    let mut out = Vec::new();
    for num in [-c1.clone() + root.clone(), -c1.clone() - root] {
        if num.is_multiple_of(&den) {
            let k = num / den.clone();
            if !out.contains(&k) {
                out.push(k);
            }
        }
    }
    out
}

/// Bounds for [`factor_singular`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularOptions {
    pub budget: usize,
    pub ansatz_height: u32,
    pub oracle_height: u32,
    pub oracle_len: usize,
}

impl Default for SingularOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, ansatz_height: 1000, oracle_height: 2, oracle_len: 3 }
    }
}

/// Why no factorization was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    /// Row and column pairs whose ideal is not principal.
    pub non_principal: Vec<String>,
    pub ansatz: String,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingularOutcome<T> {
    Factored(FactorizationTrace<T>),
    Unknown(Diagnostics),
}

/// Column-row route, then the `UᴴU` ansatz, then the bounded oracle.
/// `Unknown` is an honest answer: no route found a factorization.
pub fn factor_singular<T: Coord>(m: &Matrix2<T>, opts: &SingularOptions) -> Result<SingularOutcome<T>> {
    if !m.is_singular() {
        return Err(Error::NotSingular);
    }
    let ring = m.ring();
    if cohn_gate(ring) == GateVerdict::NotId2Imaginary {
        return Err(Error::NotId2Imaginary(ring.d()));
    }
    if let Some(split) = as_column_row(m)? {
        return Ok(SingularOutcome::Factored(factor_column_row(&split, opts.budget)?));
    }

    let ansatz_note = if !ring.is_real() {
        "not applicable: imaginary ring".to_string()
    } else {
        match ansatz_uhu(m, opts.ansatz_height) {
            Ok(Some((a, b, c))) => {
                let one = Q::one(ring);
                let u = Idempotent::trusted(Matrix2::from_entries(a.clone(), b.clone(), c.clone(), &one - &a));
                let steps = vec![TraceStep::new(Rule::Ansatz, format!("a = {a}, b = {b}, c = {c}"))];
                let trace = FactorizationTrace::new(m.clone(), vec![u.conj_transpose(), u], steps, Vec::new())
                    .map_err(|e| Error::VerificationFailed(e.to_string()))?;
                return Ok(SingularOutcome::Factored(trace));
            }
            Ok(None) => format!("no idempotent pair with |h| ≤ {}", opts.ansatz_height),
            Err(Error::NotHermitianShape) => "not applicable: not of Hermitian shape".to_string(),
            Err(e) => return Err(e),
        }
    };

    if let Some(factors) = brute_force_factor(m, opts.oracle_height, opts.oracle_len)? {
        let steps = vec![TraceStep::new(
            Rule::Oracle,
            format!("height ≤ {}, length {}", opts.oracle_height, factors.len()),
        )];
        let trace = FactorizationTrace::new(m.clone(), factors, steps, Vec::new())
            .map_err(|e| Error::VerificationFailed(e.to_string()))?;
        return Ok(SingularOutcome::Factored(trace));
    }

    let pairs = [
        ("row 1", &m.e11, &m.e12),
        ("row 2", &m.e21, &m.e22),
        ("column 1", &m.e11, &m.e21),
        ("column 2", &m.e12, &m.e22),
    ];
    let mut non_principal = Vec::new();
    for (name, u, v) in pairs {
        if !(u.is_zero() && v.is_zero()) && is_pair_principal(u, v)?.is_none() {
            non_principal.push(format!("{name} ({u}, {v})"));
        }
    }
    Ok(SingularOutcome::Unknown(Diagnostics {
        non_principal,
        ansatz: ansatz_note,
        oracle: format!(
            "nothing with height ≤ {} and length ≤ {}",
            opts.oracle_height, opts.oracle_len
        ),
    }))
}
