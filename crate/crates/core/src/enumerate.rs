//! Integer points `u0 ∈ Z⁴` whose matrix approximates a target.
//!
//! The accuracy condition `‖U0/‖u0‖ − U‖₂ ≤ ε` is the hyperbolic cone
//! `⟨u,u0⟩² ≥ c²⟨u0,u0⟩` (with `⟨u,u0⟩ > 0`) for `c = 1 − (ε/2)²`. The
//! probability condition `(1 − p)·2^N ≤ ⟨u0,u0⟩` is strengthened to the convex
//! `⟨u0,u⟩ ≥ sqrt((1 − p)·2^N)`. Together with `⟨u0,u0⟩ ≤ 2^N` they cut out a
//! bounded convex region whose integer points are found by scanning a
//! bounding box.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::isometry::approx_error;
use crate::params::{check_epsilon, check_probability, meets_success_bound, rational_to_f64, ParamError};
use crate::pauli::{QuatVec, TargetUnitary};

/// Relative guard used when comparing against irrational bounds.
pub const GUARD: f64 = 1e-12;

/// The convex region `R_{u,ε,p,N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumRegion {
    u: [f64; 4],
    epsilon: f64,
    p: BigRational,
    n: u32,
    c: f64,
    s: f64,
    rmax: f64,
    norm_cap: BigInt,
}

impl EnumRegion {
    pub fn new(target: &TargetUnitary, epsilon: f64, p: &BigRational, n: u32) -> Result<Self, ParamError> {
        check_epsilon(epsilon)?;
        check_probability(p)?;
        let half = epsilon / 2.0;
        let pf = rational_to_f64(p);
        let two_n = libm::ldexp(1.0, n as i32);
        Ok(Self {
            u: *target.vector(),
            epsilon,
            p: p.clone(),
            n,
            c: 1.0 - half * half,
            s: libm::sqrt((1.0 - pf) * two_n),
            rmax: libm::sqrt(two_n),
            norm_cap: BigInt::one() << n as usize,
        })
    }

    pub fn target(&self) -> &[f64; 4] {
        &self.u
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `1 − (ε/2)²`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `sqrt((1 − p)·2^N)`.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// `2^(N/2)`.
    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    /// Largest distance from the `u` axis: `rmax·sqrt(1 − c²)/c`.
    pub fn max_offset(&self) -> f64 {
        self.rmax * libm::sqrt(1.0 - self.c * self.c) / self.c
    }

    pub fn contains(&self, point: &QuatVec) -> bool {
        let nsq = point.norm_sq();
        if nsq > self.norm_cap {
            return false;
        }
        let ip = point.inner_real(&self.u);
        if ip <= 0.0 {
            return false;
        }
        if ip < self.s - GUARD * self.s.max(1.0) {
            return false;
        }
        let nsq = nsq.to_f64().unwrap_or(f64::INFINITY);
        ip * ip >= self.c * self.c * nsq * (1.0 - GUARD)
    }

    /// Closed integer intervals, one per coordinate, containing every integer
    /// point of the region.
    pub fn bounding_box(&self) -> [(i64, i64); 4] {
        let w = self.max_offset();
        let cap = self.norm_cap.sqrt().to_i64().unwrap_or(i64::MAX);
        let slack = 1e-9 * self.rmax.max(1.0);
        core::array::from_fn(|j| {
            let a = self.s * self.u[j];
            let b = self.rmax * self.u[j];
            let lo = libm::floor(a.min(b) - w - slack);
            let hi = libm::ceil(a.max(b) + w + slack);
            let lo = (lo as i64).max(-cap);
            let hi = (hi as i64).min(cap);
            (lo, hi)
        })
    }
}

/// Integer points of `region`, scanning its bounding box and keeping at most
/// `budget` hits. The result is ordered by `⟨u0,u0⟩` descending, then by
/// `⟨u0,u⟩` descending, then lexicographically.
pub fn enumerate(region: &EnumRegion, budget: usize) -> Vec<QuatVec> {
    let bx = region.bounding_box();
    let cap: i128 = region.norm_cap.to_i128().unwrap_or(i128::MAX);
    let mut out = Vec::new();
    'scan: for a in bx[0].0..=bx[0].1 {
        let na = (a as i128) * (a as i128);
        if na > cap {
            continue;
        }
        for b in bx[1].0..=bx[1].1 {
            let nb = na + (b as i128) * (b as i128);
            if nb > cap {
                continue;
            }
            for c in bx[2].0..=bx[2].1 {
                let nc = nb + (c as i128) * (c as i128);
                if nc > cap {
                    continue;
                }
                for d in bx[3].0..=bx[3].1 {
                    if nc + (d as i128) * (d as i128) > cap {
                        continue;
                    }
                    let point = QuatVec::from_i64([a, b, c, d]);
                    if region.contains(&point) {
                        out.push(point);
                        if out.len() >= budget {
                            break 'scan;
                        }
                    }
                }
            }
        }
    }
    sort_candidates(&mut out, region.target());
    out
}

pub(crate) fn sort_candidates(points: &mut [QuatVec], u: &[f64; 4]) {
    points.sort_by(|x, y| {
        y.norm_sq()
            .cmp(&x.norm_sq())
            .then_with(|| y.inner_real(u).partial_cmp(&x.inner_real(u)).unwrap_or(Ordering::Equal))
            .then_with(|| x.cmp(y))
    });
}

/// Whether `u0` meets the original point-enumeration constraints:
/// `(1 − p)·2^N ≤ ⟨u0,u0⟩ ≤ 2^N` exactly and `‖U0/‖u0‖ − U‖₂ ≤ ε` up to the
/// guard band.
pub fn satisfies_original(u0: &QuatVec, target: &TargetUnitary, epsilon: f64, p: &BigRational, n: u32) -> bool {
    let nsq = u0.norm_sq();
    if u0.is_zero() || nsq > (BigInt::one() << n as usize) || !meets_success_bound(&nsq, p, n) {
        return false;
    }
    approx_error(u0, target).is_ok_and(|e| e <= epsilon + GUARD)
}

/// Candidates `u0` for one value of `N`: points of the convex region that also
/// pass the exact re-check of the original constraints.
pub fn solve_problem31(
    target: &TargetUnitary,
    epsilon: f64,
    p: &BigRational,
    n: u32,
    budget: usize,
) -> Result<Vec<QuatVec>, ParamError> {
    let region = EnumRegion::new(target, epsilon, p, n)?;
    let mut pts = enumerate(&region, budget);
    pts.retain(|u0| satisfies_original(u0, target, epsilon, p, n));
    Ok(pts)
}
