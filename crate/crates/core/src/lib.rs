//! Exact idempotent factorizations of singular 2×2 matrices over rings of
//! integers of quadratic fields.
//!
//! Everything is generic over the coordinate type [`Coord`]; the aliases at
//! the crate root fix it to `BigInt`.

pub mod divisibility;
pub mod error;
pub mod factorizer;
pub mod matrix;
pub mod oracle;
pub mod quad_ring;
pub mod scalar;
pub mod toolkit;
pub mod verifier;
pub mod weak_algo;

use num_bigint::BigInt;

pub use divisibility::{comaximal_witness, common_divisor, is_pair_principal};
pub use error::{Error, Result};
pub use factorizer::{
    ansatz_uhu, as_column_row, cohn_gate, factor_column_row, factor_row, factor_singular,
    FactorizationTrace, GateVerdict, Rule, SingularOptions, SingularOutcome, TraceStep,
};
pub use matrix::{product, Idempotent, Matrix2};
pub use oracle::{brute_force_factor, enumerate_idempotents};
pub use quad_ring::{ring_arithmetic, Form, QuadInteger, RingOp, RingSpec};
pub use scalar::Coord;
pub use verifier::{verify, Failure, VerifyReport};
pub use weak_algo::{
    chain_to_idempotents, elementary_to_weak_chain, find_weak_chain, find_weak_chain_with,
    QuotientRule, WeakChain, DEFAULT_BUDGET,
};

pub type QuadInt = QuadInteger<BigInt>;
pub type Mat2 = Matrix2<BigInt>;
pub type IdempotentMat = Idempotent<BigInt>;
pub type Trace = FactorizationTrace<BigInt>;
pub type Chain = WeakChain<BigInt>;
