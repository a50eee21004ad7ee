//! Ideal-theoretic predicates on pairs: common non-unit divisors,
//! comaximality witnesses and principality of `xD + yD`.

use crate::error::{Error, Result};
use crate::quad_ring::{Form, QuadInteger, RingSpec};
use crate::scalar::Coord;
use crate::toolkit::{divisors, gcd, solve_linear_integer_system, solve_norm_equation};

/// Representatives of all elements of norm `±n` up to units, in the order
/// divisor candidates are tried: lexicographic on the stored `(a, b)`.
pub(crate) fn norm_classes<T: Coord>(ring: RingSpec, n: &T) -> Result<Vec<QuadInteger<T>>> {
    let mut reps = if ring.is_real() {
        solve_norm_equation(ring, n)?
    } else {
        imaginary_norm_classes(ring, n)
    };
    reps.sort_by(|u, v| u.coords().cmp(&v.coords()));
    Ok(reps)
}

/// Positive definite case: the norm form bounds both coordinates directly.
fn imaginary_norm_classes<T: Coord>(ring: RingSpec, n: &T) -> Vec<QuadInteger<T>> {
    let n = n.abs();
    let abs_d = T::from_i64_lossless(-ring.d());
    let scale = match ring.form() {
        Form::Whole => T::one(),
        Form::Half => T::from_i64_lossless(4),
    };
    let rhs_max = scale * n;
    let b_max = (rhs_max.clone() / abs_d.clone()).sqrt();
    let mut reps: Vec<QuadInteger<T>> = Vec::new();
    let mut b = -b_max.clone();
    while b <= b_max {
        let rest = rhs_max.clone() - abs_d.clone() * b.clone() * b.clone();
        let a = rest.sqrt();
        if a.clone() * a.clone() == rest {
            for a in [a.clone(), -a.clone()] {
                if let Ok(z) = QuadInteger::new(ring, a, b.clone()) {
                    if !reps.iter().any(|r| crate::toolkit::are_associates(&z, r)) {
                        reps.push(z);
                    }
                }
            }
        }
        b = b + T::one();
    }
    reps
}

/// A non-unit `z` dividing both `x` and `y`, if any.
///
/// Candidates have `|N(z)|` dividing `gcd(|N(x)|, |N(y)|)`; they are tried by
/// ascending `|N(z)|`, then by stored coordinates.
pub fn common_divisor<T: Coord>(
    x: &QuadInteger<T>,
    y: &QuadInteger<T>,
) -> Result<Option<QuadInteger<T>>> {
    x.same_ring(y)?;
    if x.is_zero() && y.is_zero() {
        return Err(Error::BothZero);
    }
    if y.is_zero() || x.is_zero() {
        let other = if y.is_zero() { x } else { y };
        return Ok((!other.is_unit()).then(|| other.clone()));
    }
    let g = gcd(&x.norm().abs(), &y.norm().abs());
    if g.is_one() {
        return Ok(None);
    }
    for n in divisors(&g)?.into_iter().skip(1) {
        for z in norm_classes(x.ring(), &n)? {
            if x.try_divide(&z)?.is_some() && y.try_divide(&z)?.is_some() {
                return Ok(Some(z));
            }
        }
    }
    Ok(None)
}

/// `(u, v)` with `x·u + y·v = 1`, or `None` when `xD + yD ≠ D`.
pub fn comaximal_witness<T: Coord>(
    x: &QuadInteger<T>,
    y: &QuadInteger<T>,
) -> Result<Option<(QuadInteger<T>, QuadInteger<T>)>> {
    x.same_ring(y)?;
    if x.is_zero() && y.is_zero() {
        return Err(Error::BothZero);
    }
    let ring = x.ring();
    let theta = QuadInteger::basis_generator(ring);
    // Unknowns are basis coordinates of u and v.
    let columns = [x.clone(), x * &theta, y.clone(), y * &theta].map(|c| c.basis_coords());
    let system = [
        std::array::from_fn(|j| columns[j].0.clone()),
        std::array::from_fn(|j| columns[j].1.clone()),
    ];
    let Some([u0, u1, v0, v1]) = solve_linear_integer_system(&system, &[T::one(), T::zero()])
    else {
        return Ok(None);
    };
    let u = QuadInteger::from_basis(ring, u0, u1);
    let v = QuadInteger::from_basis(ring, v0, v1);
    if !(x * &u + y * &v).is_one() {
        return Err(Error::VerificationFailed(format!(
            "comaximality witness ({u}, {v}) for ({x}, {y})"
        )));
    }
    Ok(Some((u, v)))
}

/// A generator `g` with `xD + yD = gD`, or `None` if the ideal is not principal.
///
/// Common non-unit divisors are peeled greedily; the ideal is principal exactly
/// when the fully peeled pair is comaximal.
pub fn is_pair_principal<T: Coord>(
    x: &QuadInteger<T>,
    y: &QuadInteger<T>,
) -> Result<Option<QuadInteger<T>>> {
    x.same_ring(y)?;
    if x.is_zero() && y.is_zero() {
        return Err(Error::BothZero);
    }
    if x.is_zero() {
        return Ok(Some(y.clone()));
    }
    if y.is_zero() {
        return Ok(Some(x.clone()));
    }
    let mut g = QuadInteger::one(x.ring());
    let (mut x, mut y) = (x.clone(), y.clone());
    while let Some(z) = common_divisor(&x, &y)? {
        x = x.div_exact(&z);
        y = y.div_exact(&z);
        g = &g * &z;
    }
    Ok(comaximal_witness(&x, &y)?.map(|_| g))
}
