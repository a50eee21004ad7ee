//! Idempotent factorizations of singular 2×2 matrices.
//!
//! Row matrices `[x y]` go through a fixed pipeline of reductions (zero
//! cases, units, integer first entry, common factors, comaximal pairs, the
//! gcd-repairing construction and its shift). Full singular matrices are
//! handled through column-row splits, the `UᴴU` ansatz and, as a last
//! resort, the bounded oracle.

mod row;
mod singular;

use std::fmt;

pub use row::{
    factor_row, reduce_to_integer_x, shift_to_step1, step1_factor, swap_factorization,
    ElementaryMove, IntegerReduction, ShiftCase, ShiftMethod, Step1Output, Step2Context,
};
pub use singular::{
    ansatz_uhu, as_column_row, factor_column_row, factor_singular, mod5_obstruction_holds,
    ColumnRow, Diagnostics, SingularOptions, SingularOutcome,
};

use crate::error::{Error, Result};
use crate::matrix::{product, Idempotent, Matrix2};
use crate::quad_ring::RingSpec;
use crate::scalar::Coord;
use crate::weak_algo::WeakChain;

/// Which construction produced a stretch of a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    ZeroCase,
    Swap,
    IntegerXReduce,
    PeelCommonFactor,
    WeakChain,
    Step1,
    Step2Shift,
    Step3ShiftA,
    Step3ShiftB,
    ColumnRowSplit,
    Ansatz,
    Oracle,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::ZeroCase => "ZeroCase",
            Rule::Swap => "Swap",
            Rule::IntegerXReduce => "IntegerXReduce",
            Rule::PeelCommonFactor => "PeelCommonFactor",
            Rule::WeakChain => "WeakChain",
            Rule::Step1 => "Step1",
            Rule::Step2Shift => "Step2Shift",
            Rule::Step3ShiftA => "Step3ShiftA",
            Rule::Step3ShiftB => "Step3ShiftB",
            Rule::ColumnRowSplit => "ColumnRowSplit",
            Rule::Ansatz => "Ansatz",
            Rule::Oracle => "Oracle",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub detail: String,
}

impl TraceStep {
    pub fn new(rule: Rule, detail: impl Into<String>) -> Self {
        Self { rule, detail: detail.into() }
    }
}

/// Idempotent factors whose ordered product is exactly `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationTrace<T> {
    target: Matrix2<T>,
    factors: Vec<Idempotent<T>>,
    steps: Vec<TraceStep>,
    chains: Vec<WeakChain<T>>,
}

impl<T: Coord> FactorizationTrace<T> {
    /// Checks the product before accepting the trace.
    pub fn new(
        target: Matrix2<T>,
        factors: Vec<Idempotent<T>>,
        steps: Vec<TraceStep>,
        chains: Vec<WeakChain<T>>,
    ) -> Result<Self> {
        let Some(p) = product(&factors) else {
            return Err(Error::InvalidTrace("no factors".into()));
        };
        if p != target {
            return Err(Error::InvalidTrace(format!("product {p} differs from target {target}")));
        }
        if let Some(bad) = factors.iter().find(|f| !f.matrix().is_idempotent()) {
            return Err(Error::InvalidTrace(format!("factor {bad} is not idempotent")));
        }
        Ok(Self { target, factors, steps, chains })
    }

    pub fn target(&self) -> &Matrix2<T> {
        &self.target
    }

    pub fn factors(&self) -> &[Idempotent<T>] {
        &self.factors
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    /// Weak chains consumed along the way, in pipeline order.
    pub fn chains(&self) -> &[WeakChain<T>] {
        &self.chains
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn into_factors(self) -> Vec<Idempotent<T>> {
        self.factors
    }

    /// Factors of `Mᵀ`: transposes in reverse order.
    pub fn transpose(&self) -> Result<Self> {
        let factors = self.factors.iter().rev().map(Idempotent::transpose).collect();
        Self::new(self.target.transpose(), factors, self.steps.clone(), self.chains.clone())
    }
}

/// Where a ring stands with respect to factorizations of singular matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateVerdict {
    SupportedRealQuadratic,
    EuclideanImaginary,
    NotId2Imaginary,
}

impl GateVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            GateVerdict::SupportedRealQuadratic => "SupportedRealQuadratic",
            GateVerdict::EuclideanImaginary => "EuclideanImaginary",
            GateVerdict::NotId2Imaginary => "NotID2Imaginary",
        }
    }
}

/// The only imaginary quadratic rings where every singular matrix factors.
pub const EUCLIDEAN_IMAGINARY: [i64; 5] = [-1, -2, -3, -7, -11];

pub fn cohn_gate(ring: RingSpec) -> GateVerdict {
    if ring.is_real() {
        GateVerdict::SupportedRealQuadratic
    } else if EUCLIDEAN_IMAGINARY.contains(&ring.d()) {
        GateVerdict::EuclideanImaginary
    } else {
        GateVerdict::NotId2Imaginary
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_partition() {
        for d in [-1, -2, -3, -7, -11] {
            assert_eq!(cohn_gate(RingSpec::new(d).unwrap()), GateVerdict::EuclideanImaginary);
        }
        for d in [-5, -6, -10, -13, -15, -19, -23] {
            assert_eq!(cohn_gate(RingSpec::new(d).unwrap()), GateVerdict::NotId2Imaginary);
        }
        for d in [2, 3, 5, 10, 94] {
            assert_eq!(cohn_gate(RingSpec::new(d).unwrap()), GateVerdict::SupportedRealQuadratic);
        }
    }
}
