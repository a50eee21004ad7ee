//! Rational-integer machinery: gcds, CRT, valuations, integer lattices,
//! continued fractions, fundamental units and norm equations.

mod arith;
mod lattice;
mod units;

pub use arith::{
    crt, divisors, extended_gcd, factorize, gcd, is_prime, padic_valuation, Valuation,
};
pub use lattice::{solve_affine_system, solve_linear_integer_system, AffineSolution};
pub use units::{are_associates, cf_sqrt, fundamental_unit, solve_norm_equation, CfExpansion};
