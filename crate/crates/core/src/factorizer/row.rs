//! Factorizations of row matrices `[x y] = (x y; 0 0)` over real quadratic rings.

use std::fmt;

use super::{cohn_gate, FactorizationTrace, GateVerdict, Rule, TraceStep};
use crate::divisibility::{comaximal_witness, common_divisor};
use crate::error::{Error, Result};
use crate::matrix::{Idempotent, Matrix2};
use crate::quad_ring::{Form, QuadInteger};
use crate::scalar::Coord;
use crate::toolkit::{crt, extended_gcd, factorize, gcd};
use crate::weak_algo::{chain_to_idempotents, find_weak_chain, WeakChain};

/// Weak-chain retries in a branch where a chain is known to exist.
const CHAIN_RETRIES: u32 = 3;

/// Guards the recursion; every level strictly shrinks a norm or an index.
const MAX_DEPTH: usize = 256;

type Q<T> = QuadInteger<T>;
type Factors<T> = Vec<Idempotent<T>>;

/// `[z 0] = [1 −1]·(1 0; 1−z 0)`.
fn first_entry_only<T: Coord>(z: &Q<T>) -> Factors<T> {
    let ring = z.ring();
    let (zero, one) = (Q::zero(ring), Q::one(ring));
    vec![
        Idempotent::trusted(Matrix2::row(one.clone(), -&one)),
        Idempotent::trusted(Matrix2::from_entries(one.clone(), zero.clone(), &one - z, zero)),
    ]
}

/// `[0 z] = [1 0]·(0 z; 0 1)`.
fn second_entry_only<T: Coord>(z: &Q<T>) -> Factors<T> {
    let ring = z.ring();
    let (zero, one) = (Q::zero(ring), Q::one(ring));
    vec![
        Idempotent::trusted(Matrix2::row(one.clone(), zero.clone())),
        Idempotent::trusted(Matrix2::from_entries(zero.clone(), z.clone(), zero, one)),
    ]
}

/// Factors of `[x y]` from factors of `[y x]`: `[x y] = (1 1; 0 0)·J·[y x]·J`.
fn swap_lift<T: Coord>(factors: Factors<T>) -> Factors<T> {
    let Some(first) = factors.first() else { return factors };
    let ring = first.matrix().ring();
    let j = Matrix2::swap(ring);
    let one = Q::one(ring);
    let mut out = Vec::with_capacity(factors.len() + 1);
    out.push(Idempotent::trusted(Matrix2::row(one.clone(), one)));
    out.extend(factors.iter().map(|f| f.conjugate_by(&j, &j)));
    out
}

/// Factors of `[x y]` from factors of `[x, y − q·x] = M·[x y]·M⁻¹`, `M = (1 q; 0 1)`.
fn shear_lift<T: Coord>(factors: Factors<T>, q: &Q<T>) -> Factors<T> {
    let (m, m_inv) = (Matrix2::upper(q.clone()), Matrix2::upper(-q));
    factors.iter().map(|f| f.conjugate_by(&m, &m_inv)).collect()
}

/// Turns a trace for `[x y]` into one for `[y x]`.
pub fn swap_factorization<T: Coord>(trace: &FactorizationTrace<T>) -> Result<FactorizationTrace<T>> {
    let target = trace.target();
    if !target.is_row() {
        return Err(Error::InvalidTrace(format!("{target} is not a row matrix")));
    }
    let factors = swap_lift(trace.factors().to_vec());
    let mut steps = trace.steps().to_vec();
    steps.push(TraceStep::new(Rule::Swap, "conjugate by the antidiagonal permutation"));
    let swapped = Matrix2::row(target.e12.clone(), target.e11.clone());
    FactorizationTrace::new(swapped, factors, steps, trace.chains().to_vec())
}

/// A similarity applied to a row pair during reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementaryMove<T> {
    /// `(x, y) ↦ (x, y − q·x)`.
    Shear(QuadInteger<T>),
    /// `(x, y) ↦ (y, x)`.
    Swap,
}

impl<T: Coord> fmt::Display for ElementaryMove<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryMove::Shear(q) => write!(f, "shear({q})"),
            ElementaryMove::Swap => f.write_str("swap"),
        }
    }
}

/// `[x y]` reduced to `[α w]` with `α` a rational integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerReduction<T> {
    pub moves: Vec<ElementaryMove<T>>,
    pub alpha: T,
    pub w: QuadInteger<T>,
}

impl<T: Coord> IntegerReduction<T> {
    /// Factors of the original pair from factors of `[α w]`.
    pub fn lift(&self, mut factors: Vec<Idempotent<T>>) -> Vec<Idempotent<T>> {
        for mv in self.moves.iter().rev() {
            factors = match mv {
                ElementaryMove::Shear(q) => shear_lift(factors, q),
                ElementaryMove::Swap => swap_lift(factors),
            };
        }
        factors
    }
}

/// Euclid on the `θ`-coordinates: shear the larger one down by the smaller,
/// swap, and repeat until the first entry is a rational integer.
pub fn reduce_to_integer_x<T: Coord>(x: &Q<T>, y: &Q<T>) -> Result<IntegerReduction<T>> {
    x.same_ring(y)?;
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroInput);
    }
    let ring = x.ring();
    let (mut x, mut y) = (x.clone(), y.clone());
    let mut moves = Vec::new();
    loop {
        let x1 = x.basis_coords().1;
        if x1.is_zero() {
            break;
        }
        let y1 = y.basis_coords().1;
        if !y1.is_zero() {
            let q = Q::from_int(ring, y1.div_floor(&x1));
            y = &y - &(&q * &x);
            moves.push(ElementaryMove::Shear(q));
        }
        std::mem::swap(&mut x, &mut y);
        moves.push(ElementaryMove::Swap);
    }
    let alpha = x.to_integer().expect("zero θ-coordinate");
    Ok(IntegerReduction { moves, alpha, w: y })
}

/// Output of the gcd-repairing construction `[x y] = [x' y']·U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step1Output<T> {
    pub u: Idempotent<T>,
    pub x_prime: T,
    pub y_prime: QuadInteger<T>,
    pub m: T,
    pub lambda: T,
    pub a_prime: T,
    pub t: T,
}

fn integer_entry<T: Coord>(x: &Q<T>) -> Result<T> {
    match x.to_integer() {
        Some(v) if !v.is_zero() => Ok(v),
        _ => Err(Error::PreconditionViolated(format!("x = {x} is not a nonzero rational integer"))),
    }
}

/// `(m, λ)` with `m = gcd(|x|, |N(y)|)` and `N(y) = m·λ`.
fn norm_split<T: Coord>(x: &T, y: &Q<T>) -> (T, T) {
    let n = y.norm();
    let m = gcd(&x.abs(), &n.abs());
    let lambda = if m.is_zero() { T::zero() } else { n / m.clone() };
    (m, lambda)
}

/// Needs `x ∈ Z∖{0}`, `m > 1` and `gcd(x, λ) = 1`; the result has
/// `x'` coprime to `N(y')`, so `x'D + y'D = D`.
pub fn step1_factor<T: Coord>(x: &Q<T>, y: &Q<T>) -> Result<Step1Output<T>> {
    x.same_ring(y)?;
    let xi = integer_entry(x)?;
    if y.is_zero() {
        return Err(Error::PreconditionViolated("y = 0".into()));
    }
    let (m, lambda) = norm_split(&xi, y);
    if m.is_one() {
        return Err(Error::PreconditionViolated("m = 1".into()));
    }
    let s = gcd(&xi, &lambda);
    if !s.is_one() {
        return Err(Error::PreconditionViolated(format!("s = {s}")));
    }
    Ok(step1_unchecked(&xi, y, m, lambda))
}

fn step1_unchecked<T: Coord>(x: &T, y: &Q<T>, m: T, lambda: T) -> Step1Output<T> {
    let ring = y.ring();
    let (g, a_prime, t) = extended_gcd(x, &lambda);
    debug_assert!(g.is_one());
    let xa = x.clone() * a_prime.clone();
    let u = Matrix2::from_entries(
        Q::from_int(ring, xa.clone()),
        y.scale(&a_prime),
        y.conj().scale(&(t.clone() * x.clone() / m.clone())),
        Q::from_int(ring, T::one() - xa),
    );
    let x_prime = x.clone() - t.clone() * lambda.clone();
    let y_prime = y.scale(&(T::one() + a_prime.clone()));
    Step1Output { u: Idempotent::trusted(u), x_prime, y_prime, m, lambda, a_prime, t }
}

/// Which variant of the shift applies, by ring form and the parity of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftCase {
    /// `D = Z[√d]`.
    Whole,
    /// `D = Z[(1+√d)/2]` and `y ∈ 2D`.
    HalfEven,
    /// `D = Z[(1+√d)/2]` and `y ∉ 2D`.
    HalfOdd,
}

impl ShiftCase {
    pub fn rule(self) -> Rule {
        match self {
            ShiftCase::Whole => Rule::Step2Shift,
            ShiftCase::HalfEven => Rule::Step3ShiftA,
            ShiftCase::HalfOdd => Rule::Step3ShiftB,
        }
    }
}

/// How the shift `e` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMethod {
    /// The three-class prime partition and CRT.
    PrimePartition,
    /// Per-prime search for a residue avoiding the roots of the norm quadratic.
    ResidueSearch,
}

/// Data of the shift `y ↦ y + e·x` that makes `gcd(x, N(y + e·x)/m) = 1`.
///
/// With `c₁ = Tr(y)`, `N(y + e·x)/m = λ + e·x₀·c₁ + e²·x₀²·m` in every case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step2Context<T> {
    pub m: T,
    pub lambda: T,
    pub x0: T,
    pub s: T,
    /// Stored coordinates of `y` (numerators in half form).
    pub y1: T,
    pub y2: T,
    pub c1: T,
    pub e: T,
    pub a1: Vec<T>,
    pub a2: Vec<T>,
    pub a3: Vec<T>,
    pub case: ShiftCase,
    pub method: ShiftMethod,
}

impl<T: Coord> Step2Context<T> {
    /// `N(y + e·x)/m` for this context's quadratic.
    pub fn shifted_lambda(&self, e: &T) -> T {
        self.lambda.clone()
            + e.clone() * self.x0.clone() * self.c1.clone()
            + e.clone() * e.clone() * self.x0.clone() * self.x0.clone() * self.m.clone()
    }
}

pub fn shift_to_step1<T: Coord>(x: &Q<T>, y: &Q<T>) -> Result<(T, Step2Context<T>)> {
    x.same_ring(y)?;
    let xi = integer_entry(x)?;
    if y.is_zero() {
        return Err(Error::PreconditionViolated("y = 0".into()));
    }
    let (m, lambda) = norm_split(&xi, y);
    if m.is_one() {
        return Err(Error::PreconditionViolated("m = 1".into()));
    }
    let s = gcd(&xi, &lambda);
    if s.is_one() {
        return Err(Error::PreconditionViolated("s = 1".into()));
    }
    let (y1, y2) = (y.a().clone(), y.b().clone());
    if !gcd(&gcd(&xi, &y1), &y2).is_one() {
        return Err(Error::PreconditionViolated(format!("x = {xi} and y = {y} share a factor")));
    }
    let ring = y.ring();
    let case = match ring.form() {
        Form::Whole => ShiftCase::Whole,
        Form::Half if y.try_divide(&Q::from_i64(ring, 2))?.is_some() => ShiftCase::HalfEven,
        Form::Half => ShiftCase::HalfOdd,
    };
    let x0 = xi.clone() / m.clone();
    let mut ctx = Step2Context {
        m,
        lambda,
        x0,
        s,
        y1,
        y2,
        c1: y.trace(),
        e: T::zero(),
        a1: Vec::new(),
        a2: Vec::new(),
        a3: Vec::new(),
        case,
        method: ShiftMethod::PrimePartition,
    };

    let primes: Vec<T> = factorize(&xi)?.into_iter().map(|(p, _)| p).collect();
    let two = T::one() + T::one();
    let mut residues = Vec::with_capacity(primes.len());
    for p in &primes {
        let clean = !ctx.lambda.is_multiple_of(p) && !ctx.x0.is_multiple_of(p);
        if clean && (ctx.lambda.clone() + ctx.x0.clone() * ctx.c1.clone()).is_multiple_of(p) {
            ctx.a1.push(p.clone());
            residues.push((two.mod_floor(p), p.clone()));
        } else {
            if clean { &mut ctx.a2 } else { &mut ctx.a3 }.push(p.clone());
            residues.push((T::one().mod_floor(p), p.clone()));
        }
    }
    let admissible = |ctx: &Step2Context<T>, e: &T| gcd(&xi, &ctx.shifted_lambda(e)).is_one();
    ctx.e = crt(&residues)?;
    if !admissible(&ctx, &ctx.e) {
        // The partition recipe does not cover every shape of y in half form;
        // any residue off the (at most two) roots mod each p works.
        ctx.method = ShiftMethod::ResidueSearch;
        let mut residues = Vec::with_capacity(primes.len());
        for p in &primes {
            let mut r = T::zero();
            let limit = p.clone().min(T::from_i64_lossless(3));
            while r < limit && ctx.shifted_lambda(&r).is_multiple_of(p) {
                r = r + T::one();
            }
            if r == limit {
                return Err(Error::PreconditionViolated(format!(
                    "every shift makes N(y + e·x)/m divisible by {p}"
                )));
            }
            residues.push((r, p.clone()));
        }
        ctx.e = crt(&residues)?;
        if !admissible(&ctx, &ctx.e) {
            return Err(Error::VerificationFailed(format!("shift e = {} for ({x}, {y})", ctx.e)));
        }
    }
    debug_assert_eq!(
        (y + &x.scale(&ctx.e)).norm(),
        ctx.shifted_lambda(&ctx.e) * ctx.m.clone()
    );
    Ok((ctx.e.clone(), ctx))
}

/// A verified trace for `(x y; 0 0)`.
///
/// Pipeline: zero cases, unit entries, integer first entry, common
/// factors, comaximal pairs, then the gcd-repairing construction (after a
/// shift when needed). Comaximal pairs retry the weak-chain search with
/// doubled budgets before giving up with `SearchExhausted`.
pub fn factor_row<T: Coord>(x: &Q<T>, y: &Q<T>, budget: usize) -> Result<FactorizationTrace<T>> {
    x.same_ring(y)?;
    if budget == 0 {
        return Err(Error::PreconditionViolated("budget must be positive".into()));
    }
    let mut p = Pipeline { budget, steps: Vec::new(), chains: Vec::new() };
    let factors = match cohn_gate(x.ring()) {
        GateVerdict::SupportedRealQuadratic => p.row(x, y, 0)?,
        GateVerdict::EuclideanImaginary => match p.zero_case(x, y) {
            Some(f) => f,
            None => p.chain_branch(x, y)?,
        },
        GateVerdict::NotId2Imaginary => match p.zero_case(x, y) {
            Some(f) => f,
            None => return Err(Error::NotId2Imaginary(x.ring().d())),
        },
    };
    let target = Matrix2::row(x.clone(), y.clone());
    FactorizationTrace::new(target, factors, p.steps, p.chains)
        .map_err(|e| Error::VerificationFailed(e.to_string()))
}

struct Pipeline<T> {
    budget: usize,
    steps: Vec<TraceStep>,
    chains: Vec<WeakChain<T>>,
}

impl<T: Coord> Pipeline<T> {
    fn log(&mut self, rule: Rule, detail: String) {
        self.steps.push(TraceStep::new(rule, detail));
    }

    fn zero_case(&mut self, x: &Q<T>, y: &Q<T>) -> Option<Factors<T>> {
        let factors = match (x.is_zero(), y.is_zero()) {
            (true, true) => vec![Idempotent::trusted(Matrix2::zero(x.ring()))],
            (false, true) => first_entry_only(x),
            (true, false) => second_entry_only(y),
            (false, false) => return None,
        };
        self.log(Rule::ZeroCase, format!("[{x} {y}] in closed form"));
        Some(factors)
    }

    fn row(&mut self, x: &Q<T>, y: &Q<T>, depth: usize) -> Result<Factors<T>> {
        if depth > MAX_DEPTH {
            return Err(Error::VerificationFailed(format!("pipeline did not settle on ({x}, {y})")));
        }
        if let Some(f) = self.zero_case(x, y) {
            return Ok(f);
        }
        if x.is_unit() || y.is_unit() {
            return self.unit_chain(x, y);
        }
        if !x.is_rational() {
            let red = reduce_to_integer_x(x, y)?;
            let moves: Vec<String> = red.moves.iter().map(|m| m.to_string()).collect();
            self.log(
                Rule::IntegerXReduce,
                format!("[{x} {y}] ~ [{} {}] via {}", red.alpha, red.w, moves.join(", ")),
            );
            let alpha = Q::from_int(x.ring(), red.alpha.clone());
            let inner = self.row(&alpha, &red.w, depth + 1)?;
            return Ok(red.lift(inner));
        }
        if let Some(z) = common_divisor(x, y)? {
            let (xz, yz) = (x.div_exact(&z), y.div_exact(&z));
            self.log(Rule::PeelCommonFactor, format!("[{x} {y}] = [{z} 0]·[{xz} {yz}]"));
            let mut factors = first_entry_only(&z);
            factors.extend(self.row(&xz, &yz, depth + 1)?);
            return Ok(factors);
        }
        if comaximal_witness(x, y)?.is_some() {
            return self.chain_branch(x, y);
        }
        let xi = x.to_integer().expect("rational entry");
        let (m, lambda) = norm_split(&xi, y);
        if m.is_one() {
            return self.chain_branch(x, y);
        }
        if gcd(&xi, &lambda).is_one() {
            let out = step1_unchecked(&xi, y, m, lambda);
            self.log(
                Rule::Step1,
                format!(
                    "m = {}, λ = {}, a' = {}, t = {}: [{x} {y}] = [{} {}]·{}",
                    out.m,
                    out.lambda,
                    out.a_prime,
                    out.t,
                    out.x_prime,
                    out.y_prime,
                    out.u
                ),
            );
            let xp = Q::from_int(x.ring(), out.x_prime);
            let mut factors = self.row(&xp, &out.y_prime, depth + 1)?;
            factors.push(out.u);
            return Ok(factors);
        }
        let (e, ctx) = shift_to_step1(x, y)?;
        let shifted = y + &x.scale(&e);
        self.log(
            ctx.case.rule(),
            format!(
                "m = {}, λ = {}, s = {}, e = {} ({:?}): [{x} {y}] ~ [{x} {shifted}]",
                ctx.m, ctx.lambda, ctx.s, e, ctx.method
            ),
        );
        let inner = self.row(x, &shifted, depth + 1)?;
        Ok(shear_lift(inner, &Q::from_int(x.ring(), -e)))
    }

    /// Chains for pairs with a unit entry, written down directly.
    fn unit_chain(&mut self, x: &Q<T>, y: &Q<T>) -> Result<Factors<T>> {
        let ring = x.ring();
        let (zero, one) = (Q::zero(ring), Q::one(ring));
        let chain = if let Some(inv) = one.try_divide(y)? {
            WeakChain::new(vec![x.clone(), y.clone(), zero], vec![x * &inv])?
        } else {
            let inv = one.try_divide(x)?.expect("x is a unit");
            WeakChain::new(
                vec![x.clone(), y.clone(), x.clone(), zero.clone()],
                vec![zero, y * &inv],
            )?
        };
        self.emit_chain(chain, "unit entry")
    }

    fn chain_branch(&mut self, x: &Q<T>, y: &Q<T>) -> Result<Factors<T>> {
        let mut budget = self.budget;
        for attempt in 0..=CHAIN_RETRIES {
            if let Some(chain) = find_weak_chain(x, y, budget)? {
                let note = if attempt == 0 {
                    format!("budget {budget}")
                } else {
                    format!("budget {budget} after {attempt} retries")
                };
                return self.emit_chain(chain, &note);
            }
            if attempt < CHAIN_RETRIES {
                budget *= 2;
            }
        }
        Err(Error::SearchExhausted { x: x.to_string(), y: y.to_string(), budget })
    }

    fn emit_chain(&mut self, chain: WeakChain<T>, note: &str) -> Result<Factors<T>> {
        let quotients: Vec<String> = chain.quotients().iter().map(|q| q.to_string()).collect();
        self.log(
            Rule::WeakChain,
            format!(
                "({}, {}): length {} [{}], {note}",
                chain.x(),
                chain.y(),
                chain.len(),
                quotients.join(", ")
            ),
        );
        let factors = chain_to_idempotents(&chain)?;
        self.chains.push(chain);
        Ok(factors)
    }
}
