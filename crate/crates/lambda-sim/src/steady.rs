//! Exact steady state of the Liouvillian and coherence extraction.
//!
//! The steady state solves L·vec ρ = 0 with Tr ρ = 1. Since the Liouvillian
//! is trace preserving, one of its rows is redundant; replacing the first row
//! with the trace constraint turns the singular 9×9 system into a regular one
//! that a direct LU solve handles exactly. Uniqueness is checked beforehand
//! through the singular-value spectrum of L.

use num_complex::Complex64 as C64;

use crate::analytic::CoherenceValue;
use crate::error::{Error, Result};
use crate::model::{
    build_liouvillian, unvectorize, vectorize, ComplexMatrix3, Superoperator, SystemParams, VecRho,
    C_ONE, C_ZERO, IDX_A, IDX_B, IDX_C,
};

/// Relative singular-value threshold below which a direction counts as null.
const NULL_SV_TOL: f64 = 1e-10;
/// Condition-number ceiling for the trace-replaced system.
const MAX_CONDITION: f64 = 1e14;

/// Off-diagonal element selector, named by transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherencePair {
    /// a→b, the transition rendered active by the drive.
    Ab,
    /// a→c, the probe transition.
    Ac,
    /// b→c, the drive transition.
    Bc,
}

/// Populations of the three basis states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub rho: ComplexMatrix3,
    /// Euclidean norm of L·vec ρ for the returned ρ.
    pub residual: f64,
    /// Solver tag.
    pub method: &'static str,
}

/// Unique steady state of `l`, or an error when the null space is degenerate
/// or the solve is ill conditioned.
pub fn steady_state(l: &Superoperator) -> Result<SteadyStateResult> {
    let sv = l.svd(false, false).singular_values;
    let sv_max = sv.max();
    let null_tol = NULL_SV_TOL * sv_max.max(1.0);
    let null_dim = sv.iter().filter(|&&s| s < null_tol).count();
    if null_dim > 1 {
        return Err(Error::NonUniqueSteadyState { null_dim });
    }

    // replace the (redundant) first row with the trace constraint;
    // diagonal entries of vec ρ sit at column-major indices 0, 4, 8
    let mut a = *l;
    for col in 0..9 {
        a[(0, col)] = C_ZERO;
    }
    a[(0, 0)] = C_ONE;
    a[(0, 4)] = C_ONE;
    a[(0, 8)] = C_ONE;

    let a_sv = a.svd(false, false).singular_values;
    let cond = a_sv.max() / a_sv.min();
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::SolverFailure { cond });
    }

    let mut b = VecRho::zeros();
    b[0] = C_ONE;
    let x = a
        .full_piv_lu()
        .solve(&b)
        .ok_or(Error::SolverFailure { cond })?;

    let raw = unvectorize(&x);
    let mut rho = (raw + raw.adjoint()) * C64::from(0.5);
    rho /= C64::from(rho.trace().re);

    Ok(SteadyStateResult {
        residual: residual(l, &rho),
        rho,
        method: "trace-replacement lu",
    })
}

/// Convenience wrapper: validate, build the Liouvillian, solve.
pub fn steady_state_of(params: &SystemParams) -> Result<SteadyStateResult> {
    params.validate()?;
    steady_state(&build_liouvillian(params))
}

/// Coherence of the i→j transition, defined as the element ⟨j|ρ|i⟩ so that a
/// positive imaginary part means gain on that transition.
pub fn coherence(rho: &ComplexMatrix3, pair: CoherencePair) -> CoherenceValue {
    let value = match pair {
        CoherencePair::Ab => rho[(IDX_B, IDX_A)],
        CoherencePair::Ac => rho[(IDX_C, IDX_A)],
        CoherencePair::Bc => rho[(IDX_C, IDX_B)],
    };
    CoherenceValue::new(value)
}

pub fn populations(rho: &ComplexMatrix3) -> Populations {
    Populations {
        a: rho[(IDX_A, IDX_A)].re,
        b: rho[(IDX_B, IDX_B)].re,
        c: rho[(IDX_C, IDX_C)].re,
    }
}

/// Euclidean norm of L·vec ρ.
pub fn residual(l: &Superoperator, rho: &ComplexMatrix3) -> f64 {
    (l * vectorize(rho)).norm()
}
