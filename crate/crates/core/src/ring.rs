//! Exact arithmetic in the Gaussian integers `Z[i]` and in the localisation
//! `Z[i, 1/(1+i)]`.
//!
//! Elements of the localised ring are stored as `num / (1+i)^k` and are kept in
//! canonical form: either `k = 0` or `num` is not divisible by `1+i`. Zero is
//! always `(0, 0)`. Canonical forms are unique, so derived equality is ring
//! equality.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element `re + im·i` of `Z[i]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    /// `1 + i`, the unique prime above 2.
    pub fn lambda() -> Self {
        Self::new(1, 1)
    }

    /// `i^t` for any integer exponent.
    pub fn unit(t: i64) -> Self {
        match t.rem_euclid(4) {
            0 => Self::new(1, 0),
            1 => Self::new(0, 1),
            2 => Self::new(-1, 0),
            _ => Self::new(0, -1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `re² + im²`.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplies by `i^t` without general multiplication.
    pub fn mul_unit(&self, t: i64) -> Self {
        match t.rem_euclid(4) {
            0 => self.clone(),
            1 => Self {
                re: -&self.im,
                im: self.re.clone(),
            },
            2 => Self {
                re: -&self.re,
                im: -&self.im,
            },
            _ => Self {
                re: self.im.clone(),
                im: -&self.re,
            },
        }
    }

    /// Multiplies by `1 + i`.
    pub fn mul_lambda(&self) -> Self {
        Self {
            re: &self.re - &self.im,
            im: &self.re + &self.im,
        }
    }

    /// Multiplies by `(1+i)^k`.
    pub fn mul_lambda_pow(&self, k: u32) -> Self {
        // (1+i)^2 = 2i
        let half = k / 2;
        let mut out = Self {
            re: &self.re << half as usize,
            im: &self.im << half as usize,
        }
        .mul_unit(half as i64);
        if k % 2 == 1 {
            out = out.mul_lambda();
        }
        out
    }

    /// Exact multiplicity of `1 + i` in `self`; `None` for zero.
    pub fn lambda_valuation(&self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let tz = |x: &BigInt| x.trailing_zeros().unwrap_or(u64::MAX);
        let t = tz(&self.re).min(tz(&self.im));
        let re = &self.re >> t as usize;
        let im = &self.im >> t as usize;
        let both_odd = re.is_odd() && im.is_odd();
        Some(2 * t as u32 + u32::from(both_odd))
    }

    /// Divides by `(1+i)^v`; the caller guarantees divisibility.
    fn div_lambda_pow_exact(&self, v: u32) -> Self {
        // 1/(1+i)^2 = -i/2
        let half = v / 2;
        let mut out = Self {
            re: &self.re >> half as usize,
            im: &self.im >> half as usize,
        }
        .mul_unit(-(half as i64));
        if v % 2 == 1 {
            out = div_lambda(&out).expect("divisibility checked by valuation");
        }
        out
    }

    /// Rounded Euclidean division: returns `(q, r)` with `self = q·d + r` and
    /// `norm(r) ≤ norm(d)/2`.
    pub fn div_rem_round(&self, d: &Self) -> (Self, Self) {
        let n = d.norm();
        let num = self * &d.conj();
        let round = |x: &BigInt| -> BigInt {
            // nearest integer to x / n, n > 0
            let two_n = &n << 1usize;
            (x * 2u32 + &n).div_floor(&two_n)
        };
        let q = Self {
            re: round(&num.re),
            im: round(&num.im),
        };
        let r = self - &(&q * d);
        (q, r)
    }

    /// A greatest common divisor (defined up to a unit).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem_round(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(big_to_f64(&self.re), big_to_f64(&self.im))
    }
}

pub(crate) fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// `z / (1+i)` when `1+i` divides `z` (equivalently `re + im` is even).
pub fn div_lambda(z: &GaussianInt) -> Option<GaussianInt> {
    let s = &z.re + &z.im;
    if s.is_odd() {
        return None;
    }
    // (a + bi)(1 - i) / 2 = ((a + b) + (b - a) i) / 2
    let d = &z.im - &z.re;
    Some(GaussianInt {
        re: s >> 1usize,
        im: d >> 1usize,
    })
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl<'a> Add<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Add for GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: GaussianInt) -> GaussianInt {
        &self + &rhs
    }
}

impl Sub for GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: GaussianInt) -> GaussianInt {
        &self - &rhs
    }
}

impl Mul for GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: GaussianInt) -> GaussianInt {
        &self * &rhs
    }
}

impl Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        -&self
    }
}

/// An element `num / (1+i)^k` of `Z[i, 1/(1+i)]`, always canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem {
    num: GaussianInt,
    k: u32,
}

impl RingElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_gaussian(GaussianInt::one())
    }

    pub fn from_gaussian(num: GaussianInt) -> Self {
        Self { num, k: 0 }
    }

    /// `i^t`.
    pub fn unit(t: i64) -> Self {
        Self::from_gaussian(GaussianInt::unit(t))
    }

    /// Canonical form of `num / (1+i)^k`.
    pub fn reduce(num: GaussianInt, k: u32) -> Self {
        match num.lambda_valuation() {
            None => Self::zero(),
            Some(v) => {
                let v = v.min(k);
                Self {
                    num: num.div_lambda_pow_exact(v),
                    k: k - v,
                }
            }
        }
    }

    pub fn num(&self) -> &GaussianInt {
        &self.num
    }

    /// Denominator exponent of the canonical form.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Smallest `k` with `(1+i)^k · self ∈ Z[i]`.
    pub fn sde(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_gaussian(&self) -> bool {
        self.k == 0
    }

    /// Numerator scaled to denominator `(1+i)^k`, `k ≥ self.k`.
    pub fn num_at(&self, k: u32) -> GaussianInt {
        debug_assert!(k >= self.k);
        self.num.mul_lambda_pow(k - self.k)
    }

    pub fn conj(&self) -> Self {
        // conj(1+i) = -i(1+i), so 1/conj(1+i)^k = i^k / (1+i)^k
        Self {
            num: self.num.conj().mul_unit(self.k as i64),
            k: self.k,
        }
    }

    pub fn mul_unit(&self, t: i64) -> Self {
        Self {
            num: self.num.mul_unit(t),
            k: self.k,
        }
    }

    /// Divides by `(1+i)^j`.
    pub fn div_lambda_pow(&self, j: u32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.clone(),
            k: self.k + j,
        }
    }

    /// `|x|²` as a ring element (a real dyadic rational).
    pub fn abs_sq(&self) -> Self {
        self * &self.conj()
    }

    /// Floating evaluation for diagnostics.
    pub fn to_complex(&self) -> Complex64 {
        let z = self.num.to_complex();
        let scale = libm::pow(2.0, -(self.k as f64) / 2.0);
        // (1+i)^k = 2^{k/2} e^{i k π/4}
        let angle = -(self.k as f64) * core::f64::consts::FRAC_PI_4;
        z * Complex64::from_polar(scale, angle)
    }
}

impl From<GaussianInt> for RingElem {
    fn from(z: GaussianInt) -> Self {
        Self::from_gaussian(z)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/(1+i)^{}", self.num, self.k)
        }
    }
}

impl<'a> Add<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let k = self.k.max(rhs.k);
        RingElem::reduce(&self.num_at(k) + &rhs.num_at(k), k)
    }
}

impl<'a> Sub<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        RingElem::reduce(&self.num * &rhs.num, self.k + rhs.k)
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem {
            num: -&self.num,
            k: self.k,
        }
    }
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, rhs: RingElem) -> RingElem {
        &self + &rhs
    }
}

impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, rhs: RingElem) -> RingElem {
        &self - &rhs
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, rhs: RingElem) -> RingElem {
        &self * &rhs
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

impl Zero for RingElem {
    fn zero() -> Self {
        RingElem::zero()
    }
    fn is_zero(&self) -> bool {
        RingElem::is_zero(self)
    }
}

impl One for RingElem {
    fn one() -> Self {
        RingElem::one()
    }
}
