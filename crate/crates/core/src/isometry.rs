//! The 4×2 isometry `W' = [U0; U1] / (1+i)^N` of a repeat-until-success
//! round, its success probability and recovery unitary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::pauli::{QuatVec, TargetUnitary};
use crate::ring::{GaussianInt, RingElem};

/// A 4×2 matrix over `Z[i, 1/(1+i)]`, row-major.
pub type Isometry = [[RingElem; 2]; 4];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("norm mismatch: <u0,u0> + <u1,u1> = {got} but 2^N = {want}")]
    NormMismatch { got: BigInt, want: BigInt },
    #[error("u0 must be nonzero")]
    ZeroU0,
}

/// Recovery applied after the failure outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recovery {
    /// `R1 = U1 / sqrt(norm_sq)`.
    Unitary { u1: QuatVec, norm_sq: BigInt },
    /// `u1 = 0`: the failure branch has probability zero.
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RusPlan {
    n: u32,
    u0: QuatVec,
    u1: QuatVec,
    w_prime: Isometry,
}

impl RusPlan {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn u0(&self) -> &QuatVec {
        &self.u0
    }

    pub fn u1(&self) -> &QuatVec {
        &self.u1
    }

    pub fn w_prime(&self) -> &Isometry {
        &self.w_prime
    }

    pub fn two_pow_n(&self) -> BigInt {
        BigInt::one() << self.n as usize
    }

    /// `⟨u0,u0⟩ / 2^N`.
    pub fn success_prob(&self) -> BigRational {
        BigRational::new(self.u0.norm_sq(), self.two_pow_n())
    }

    /// `⟨u1,u1⟩ / 2^N`.
    pub fn failure_prob(&self) -> BigRational {
        BigRational::new(self.u1.norm_sq(), self.two_pow_n())
    }

    pub fn r1_norm_sq(&self) -> BigInt {
        self.u1.norm_sq()
    }

    /// `‖U − R0‖₂` for the given target.
    pub fn error_bound(&self, target: &TargetUnitary) -> f64 {
        approx_error(&self.u0, target).expect("plans have nonzero u0")
    }
}

/// Stacks `to_matrix(u0)` over `to_matrix(u1)` and divides by `(1+i)^N`.
pub fn isometry_from_vectors(n: u32, u0: &QuatVec, u1: &QuatVec) -> Isometry {
    let top = u0.to_matrix();
    let bottom = u1.to_matrix();
    let entry = |z: &GaussianInt| RingElem::reduce(z.clone(), n);
    [
        [entry(&top[0][0]), entry(&top[0][1])],
        [entry(&top[1][0]), entry(&top[1][1])],
        [entry(&bottom[0][0]), entry(&bottom[0][1])],
        [entry(&bottom[1][0]), entry(&bottom[1][1])],
    ]
}

pub fn build_plan(n: u32, u0: QuatVec, u1: QuatVec) -> Result<RusPlan, PlanError> {
    if u0.is_zero() {
        return Err(PlanError::ZeroU0);
    }
    let got = u0.norm_sq() + u1.norm_sq();
    let want = BigInt::one() << n as usize;
    if got != want {
        return Err(PlanError::NormMismatch { got, want });
    }
    let w_prime = isometry_from_vectors(n, &u0, &u1);
    Ok(RusPlan { n, u0, u1, w_prime })
}

/// `W'† · W'` computed exactly.
pub fn gram(w: &Isometry) -> [[RingElem; 2]; 2] {
    core::array::from_fn(|a| {
        core::array::from_fn(|b| {
            w.iter()
                .fold(RingElem::zero(), |acc, row| &acc + &(&row[a].conj() * &row[b]))
        })
    })
}

pub fn is_isometry(w: &Isometry) -> bool {
    let g = gram(w);
    g[0][0] == RingElem::one() && g[1][1] == RingElem::one() && g[0][1].is_zero() && g[1][0].is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("approximation error is undefined for u0 = 0")]
pub struct ZeroVectorError;

/// `‖U − U0/‖u0‖‖₂ = sqrt(4 − 4⟨u0,u⟩/‖u0‖)`, where `‖A‖₂ = sqrt(Tr(A·A†))`.
pub fn approx_error(u0: &QuatVec, target: &TargetUnitary) -> Result<f64, ZeroVectorError> {
    if u0.is_zero() {
        return Err(ZeroVectorError);
    }
    let norm = libm::sqrt(u0.norm_sq().to_f64().unwrap_or(f64::INFINITY));
    let cos = u0.inner_real(target.vector()) / norm;
    Ok(libm::sqrt((4.0 - 4.0 * cos).max(0.0)))
}

pub fn recovery_unitary(plan: &RusPlan) -> Recovery {
    if plan.u1.is_zero() {
        Recovery::Unreachable
    } else {
        Recovery::Unitary {
            u1: plan.u1.clone(),
            norm_sq: plan.u1.norm_sq(),
        }
    }
}
