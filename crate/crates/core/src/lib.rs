//! Approximation of one-qubit special unitaries by repeat-until-success
//! circuits over the two-qubit Clifford+CS gate set.
//!
//! The pipeline has three exact stages: integer points near the target are
//! enumerated ([`enumerate`]), the leftover norm is written as a sum of four
//! squares ([`norm_eq`]), and the resulting 4×2 isometry over `Z[i, 1/(1+i)]`
//! is synthesized into gates ([`synth`]). [`pipeline`] ties them together and
//! re-verifies every result with exact ring arithmetic.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod circuit;
pub mod enumerate;
pub mod isometry;
pub mod norm_eq;
pub mod params;
pub mod pipeline;
pub mod pauli;
pub mod ring;
pub mod synth;
