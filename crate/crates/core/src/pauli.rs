//! Four-vectors `(u_I, u_X, u_Y, u_Z)` and the 2×2 matrices
//! `u_I·I + u_X·iX + u_Y·iY + u_Z·iZ` they stand for.
//!
//! Under this correspondence `U·U† = ⟨u,u⟩·I`, `det U = ⟨u,u⟩` and
//! `Tr(U·V†) = 2⟨u,v⟩`. Matrix products are quaternion products, see
//! [`QuatVec::mul`].

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::ring::{big_to_f64, GaussianInt};

/// A 2×2 matrix over the Gaussian integers, row-major.
pub type GaussMat2 = [[GaussianInt; 2]; 2];

/// Integer Pauli vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuatVec(pub [BigInt; 4]);

impl QuatVec {
    pub fn new(i: impl Into<BigInt>, x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        Self([i.into(), x.into(), y.into(), z.into()])
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_i64(v: [i64; 4]) -> Self {
        Self(v.map(BigInt::from))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn components(&self) -> &[BigInt; 4] {
        &self.0
    }

    pub fn inner(&self, other: &Self) -> BigInt {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> BigInt {
        self.inner(self)
    }

    /// Inner product with a real vector.
    pub fn inner_real(&self, u: &[f64; 4]) -> f64 {
        self.0.iter().zip(u).map(|(a, b)| big_to_f64(a) * b).sum()
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|j| big_to_f64(&self.0[j]))
    }

    /// `[[uI + i·uZ, uY + i·uX], [−uY + i·uX, uI − i·uZ]]`.
    pub fn to_matrix(&self) -> GaussMat2 {
        let [ui, ux, uy, uz] = &self.0;
        [
            [
                GaussianInt::new(ui.clone(), uz.clone()),
                GaussianInt::new(uy.clone(), ux.clone()),
            ],
            [
                GaussianInt::new(-uy, ux.clone()),
                GaussianInt::new(ui.clone(), -uz),
            ],
        ]
    }

    /// Quaternion conjugate, the vector of `U†`.
    pub fn conj(&self) -> Self {
        let [a, b, c, d] = &self.0;
        Self([a.clone(), -b, -c, -d])
    }

    /// The vector of the matrix product `to_matrix(self)·to_matrix(rhs)`.
    ///
    /// The basis `iX, iY, iZ` satisfies `(iX)(iY) = −iZ`, so the cross term
    /// enters with a minus sign relative to Hamilton's convention.
    pub fn mul(&self, rhs: &Self) -> Self {
        let [a0, a1, a2, a3] = &self.0;
        let [b0, b1, b2, b3] = &rhs.0;
        Self([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 - (a2 * b3 - a3 * b2),
            a0 * b2 + a2 * b0 - (a3 * b1 - a1 * b3),
            a0 * b3 + a3 * b0 - (a1 * b2 - a2 * b1),
        ])
    }
}

impl fmt::Display for QuatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// Real counterpart of [`QuatVec::mul`].
pub fn quat_mul_f64(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] - (a[2] * b[3] - a[3] * b[2]),
        a[0] * b[2] + a[2] * b[0] - (a[3] * b[1] - a[1] * b[3]),
        a[0] * b[3] + a[3] * b[0] - (a[1] * b[2] - a[2] * b[1]),
    ]
}

pub fn inner_f64(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Complex matrix of a real Pauli vector.
pub fn vector_to_complex_matrix(u: &[f64; 4]) -> [[Complex64; 2]; 2] {
    let [ui, ux, uy, uz] = *u;
    [
        [Complex64::new(ui, uz), Complex64::new(uy, ux)],
        [Complex64::new(-uy, ux), Complex64::new(ui, -uz)],
    ]
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TargetError {
    #[error("target vector is zero")]
    ZeroVector,
    #[error("rotation axis must be a unit vector, got norm {0}")]
    NonUnitAxis(f64),
    #[error("matrix is not special unitary: |det - 1| = {0:e} exceeds 1e-8")]
    NotSpecialUnitary(f64),
    #[error("matrix is not of the form uI·I + uX·iX + uY·iY + uZ·iZ (deviation {0:e})")]
    NotPauliForm(f64),
    #[error("non-finite value in target description")]
    NonFinite,
    #[error("cannot parse target `{0}`: expected coeffs:a,b,c,d | axis:x|y|z|nx,ny,nz:theta | matrix:re00,im00,re01,im01,re10,im10,re11,im11")]
    Syntax(String),
}

/// How a target unitary is described on input.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Coeffs([f64; 4]),
    /// `cos(θ/2)·I + sin(θ/2)·i(n·(X,Y,Z))`.
    AxisAngle { axis: [f64; 3], theta: f64 },
    /// Row-major `U00, U01, U10, U11`.
    Matrix([Complex64; 4]),
}

const DET_TOL: f64 = 1e-8;
const AXIS_TOL: f64 = 1e-8;

/// A one-qubit special unitary as a real unit Pauli vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetUnitary {
    u: [f64; 4],
}

impl TargetUnitary {
    /// Normalises a nonzero real vector.
    pub fn from_vector(v: [f64; 4]) -> Result<Self, TargetError> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(TargetError::NonFinite);
        }
        let n = libm::sqrt(inner_f64(&v, &v));
        if n == 0.0 {
            return Err(TargetError::ZeroVector);
        }
        Ok(Self { u: v.map(|x| x / n) })
    }

    pub fn identity() -> Self {
        Self { u: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn vector(&self) -> &[f64; 4] {
        &self.u
    }

    pub fn to_complex_matrix(&self) -> [[Complex64; 2]; 2] {
        vector_to_complex_matrix(&self.u)
    }

    /// Haar-random element of SU(2): a uniform point on the 3-sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut v = [0.0; 4];
            for pair in v.chunks_mut(2) {
                // Box-Muller
                let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.gen();
                let r = libm::sqrt(-2.0 * libm::log(u1));
                let t = 2.0 * core::f64::consts::PI * u2;
                pair[0] = r * libm::cos(t);
                pair[1] = r * libm::sin(t);
            }
            if let Ok(t) = Self::from_vector(v) {
                return t;
            }
        }
    }
}

/// Converts a target description into its unit Pauli vector.
pub fn parse_target(spec: &TargetSpec) -> Result<TargetUnitary, TargetError> {
    match spec {
        TargetSpec::Coeffs(c) => TargetUnitary::from_vector(*c),
        TargetSpec::AxisAngle { axis, theta } => {
            if axis.iter().any(|x| !x.is_finite()) || !theta.is_finite() {
                return Err(TargetError::NonFinite);
            }
            let n = libm::sqrt(axis.iter().map(|x| x * x).sum());
            if (n - 1.0).abs() > AXIS_TOL {
                return Err(TargetError::NonUnitAxis(n));
            }
            let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
            TargetUnitary::from_vector([c, s * axis[0], s * axis[1], s * axis[2]])
        }
        TargetSpec::Matrix(m) => {
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(TargetError::NonFinite);
            }
            let det = m[0] * m[3] - m[1] * m[2];
            let dev = (det - Complex64::new(1.0, 0.0)).norm();
            if dev > DET_TOL {
                return Err(TargetError::NotSpecialUnitary(dev));
            }
            // U11 = conj(U00), U10 = -conj(U01)
            let form = (m[3] - m[0].conj()).norm() + (m[2] + m[1].conj()).norm();
            if form > DET_TOL {
                return Err(TargetError::NotPauliForm(form));
            }
            TargetUnitary::from_vector([m[0].re, m[1].im, m[1].re, m[0].im])
        }
    }
}

fn parse_floats(s: &str, n: usize) -> Option<alloc::vec::Vec<f64>> {
    let v: Result<alloc::vec::Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    v.ok().filter(|v| v.len() == n)
}

impl FromStr for TargetSpec {
    type Err = TargetError;

    /// `coeffs:a,b,c,d`, `axis:x|y|z|nx,ny,nz:theta` or
    /// `matrix:re00,im00,re01,im01,re10,im10,re11,im11`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || TargetError::Syntax(s.into());
        let (kind, rest) = s.split_once(':').ok_or_else(syntax)?;
        match kind.trim() {
            "coeffs" => {
                let v = parse_floats(rest, 4).ok_or_else(syntax)?;
                Ok(TargetSpec::Coeffs([v[0], v[1], v[2], v[3]]))
            }
            "axis" => {
                let (axis, theta) = rest.rsplit_once(':').ok_or_else(syntax)?;
                let theta: f64 = theta.trim().parse().map_err(|_| syntax())?;
                let axis = match axis.trim() {
                    "x" => [1.0, 0.0, 0.0],
                    "y" => [0.0, 1.0, 0.0],
                    "z" => [0.0, 0.0, 1.0],
                    other => {
                        let v = parse_floats(other, 3).ok_or_else(syntax)?;
                        [v[0], v[1], v[2]]
                    }
                };
                Ok(TargetSpec::AxisAngle { axis, theta })
            }
            "matrix" => {
                let v = parse_floats(rest, 8).ok_or_else(syntax)?;
                let c = |j: usize| Complex64::new(v[2 * j], v[2 * j + 1]);
                Ok(TargetSpec::Matrix([c(0), c(1), c(2), c(3)]))
            }
            _ => Err(syntax()),
        }
    }
}

impl FromStr for TargetUnitary {
    type Err = TargetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_target(&s.parse()?)
    }
}
