//! The norm equation `⟨u1,u1⟩ = M`: writing a nonnegative integer as a sum of
//! four squares.
//!
//! Small inputs are handled by a nested scan. Large inputs use the randomized
//! Rabin–Shallit reduction: pick `a, b` at random until `M − a² − b²` is a
//! prime `≡ 1 (mod 4)` (or 0, 1, 2), then split that prime into two squares
//! through a Gaussian gcd.

use alloc::vec::Vec;

use num_bigint::{BigInt, RandBigInt, Sign};
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::pauli::QuatVec;
use crate::ring::GaussianInt;

/// Inputs up to this bound are decomposed by exhaustive scanning.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;
/// Random attempts before the deterministic fallback scan.
pub const RETRY_CAP: usize = 10_000;
/// Strong-pseudoprime rounds per primality test.
pub const MILLER_RABIN_ROUNDS: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormEqError {
    #[error("{0} is not a prime congruent to 1 mod 4")]
    NotPrimeOneModFour(BigInt),
    #[error("cannot decompose a negative integer {0}")]
    Negative(BigInt),
}

/// Four integers whose squares sum to a known value; stored as nonnegative
/// values in descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FourSquares(pub [BigInt; 4]);

impl FourSquares {
    fn canonical(mut v: [BigInt; 4]) -> Self {
        for x in v.iter_mut() {
            *x = x.abs();
        }
        v.sort_by(|a, b| b.cmp(a));
        Self(v)
    }

    fn from_u64(v: [u64; 4]) -> Self {
        Self::canonical(v.map(BigInt::from))
    }

    pub fn sum(&self) -> BigInt {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn max_component(&self) -> &BigInt {
        &self.0[0]
    }

    pub fn to_quat(&self) -> QuatVec {
        QuatVec(self.0.clone())
    }
}

/// Miller–Rabin with `rounds` random bases.
pub fn is_probable_prime<R: Rng + ?Sized>(n: &BigInt, rounds: usize, rng: &mut R) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for sp in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let sp = BigInt::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s as usize;
    'witness: for _ in 0..rounds {
        let a = rng.gen_bigint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Some `x` with `x² ≡ −1 (mod p)` for a prime `p ≡ 1 (mod 4)`.
pub fn sqrt_minus_one<R: Rng + ?Sized>(p: &BigInt, rng: &mut R) -> Result<BigInt, NormEqError> {
    let bad = || NormEqError::NotPrimeOneModFour(p.clone());
    if *p < BigInt::from(5) || (p % 4u32) != BigInt::one() {
        return Err(bad());
    }
    let exp = (p - 1u32) >> 2usize;
    let minus_one = p - 1u32;
    // a quadratic non-residue g gives g^((p-1)/4) as a square root of -1; half
    // of all g qualify, so 128 failures mean p is composite
    for _ in 0..128 {
        let g = rng.gen_bigint_range(&BigInt::from(2), &minus_one);
        let x = g.modpow(&exp, p);
        if (&x * &x) % p == minus_one {
            return Ok(x);
        }
    }
    Err(bad())
}

/// `(x, y)` with `x² + y² = p` for `p = 2` or a prime `p ≡ 1 (mod 4)`,
/// returned with `x ≥ y ≥ 0`.
pub fn two_squares<R: Rng + ?Sized>(p: &BigInt, rng: &mut R) -> Result<(BigInt, BigInt), NormEqError> {
    if *p == BigInt::from(2) {
        return Ok((BigInt::one(), BigInt::one()));
    }
    let s = sqrt_minus_one(p, rng)?;
    // p splits as (x + iy)(x − iy) and x + iy divides s + i
    let g = GaussianInt::new(p.clone(), 0).gcd(&GaussianInt::new(s, 1));
    let (x, y) = (g.re.abs(), g.im.abs());
    if &x * &x + &y * &y != *p {
        return Err(NormEqError::NotPrimeOneModFour(p.clone()));
    }
    Ok(if x >= y { (x, y) } else { (y, x) })
}

/// Decompositions of a small `m` in the order `a ≥ b ≥ c ≥ d ≥ 0`, largest
/// `a` first; stops after `count`.
fn scan_small(m: u64, count: usize) -> Vec<FourSquares> {
    let mut out = Vec::new();
    if m == 0 {
        out.push(FourSquares::from_u64([0; 4]));
        return out;
    }
    let mut a = m.sqrt();
    loop {
        let ra = m - a * a;
        // b ≤ a and 3b² ≥ ra, so b ≥ sqrt(ra/3)
        let mut b = a.min(ra.sqrt());
        loop {
            let rb = ra - b * b;
            if rb > 2 * b * b {
                break;
            }
            let mut c = b.min(rb.sqrt());
            loop {
                let rc = rb - c * c;
                if rc > c * c {
                    break;
                }
                let d = rc.sqrt();
                if d * d == rc {
                    out.push(FourSquares::from_u64([a, b, c, d]));
                    if out.len() >= count {
                        return out;
                    }
                }
                if c == 0 {
                    break;
                }
                c -= 1;
            }
            if b == 0 {
                break;
            }
            b -= 1;
        }
        // 4a² ≥ m is needed for a to be the largest part
        if a == 0 || 4 * (a - 1) * (a - 1) < m {
            break;
        }
        a -= 1;
    }
    out
}

/// Splits `r` into two squares when `r` is 0, 1, 2 or a prime `≡ 1 (mod 4)`.
fn split_remainder<R: Rng + ?Sized>(r: &BigInt, rng: &mut R) -> Option<(BigInt, BigInt)> {
    match r.to_u8() {
        Some(0) => return Some((BigInt::zero(), BigInt::zero())),
        Some(1) => return Some((BigInt::one(), BigInt::zero())),
        Some(2) => return Some((BigInt::one(), BigInt::one())),
        _ => {}
    }
    if (r % 4u32) != BigInt::one() || !is_probable_prime(r, MILLER_RABIN_ROUNDS, rng) {
        return None;
    }
    two_squares(r, rng).ok()
}

/// One randomized attempt for `m` with no factor of 4.
fn random_attempt<R: Rng + ?Sized>(m: &BigInt, rng: &mut R) -> Option<[BigInt; 4]> {
    let limit = m.sqrt() + 1u32;
    let a = rng.gen_bigint_range(&BigInt::zero(), &limit);
    let rest = m - &a * &a;
    if rest.sign() == Sign::Minus {
        return None;
    }
    let b = rng.gen_bigint_range(&BigInt::zero(), &(rest.sqrt() + 1u32));
    let r = &rest - &b * &b;
    let (c, d) = split_remainder(&r, rng)?;
    Some([a, b, c, d])
}

/// Deterministic scan over `a` then `b`, decreasing.
fn fallback_scan<R: Rng + ?Sized>(m: &BigInt, rng: &mut R) -> [BigInt; 4] {
    let mut a = m.sqrt();
    loop {
        let ra = m - &a * &a;
        let mut b = ra.sqrt();
        loop {
            let r = &ra - &b * &b;
            let sq = r.sqrt();
            if &sq * &sq == r {
                return [a, b, sq, BigInt::zero()];
            }
            if let Some((c, d)) = split_remainder(&r, rng) {
                return [a, b, c, d];
            }
            if b.is_zero() {
                break;
            }
            b -= 1u32;
        }
        assert!(!a.is_zero(), "four-squares fallback exhausted for {m}");
        a -= 1u32;
    }
}

fn strip_fours(m: &BigInt) -> (BigInt, usize) {
    let mut m = m.clone();
    let mut e = 0;
    while !m.is_zero() && (&m % 4u32).is_zero() {
        m >>= 2usize;
        e += 1;
    }
    (m, e)
}

fn large_decompositions<R: Rng + ?Sized>(m: &BigInt, count: usize, rng: &mut R) -> Vec<FourSquares> {
    let (reduced, e) = strip_fours(m);
    let mut out: Vec<FourSquares> = Vec::new();
    let push = |v: [BigInt; 4], out: &mut Vec<FourSquares>| {
        let fs = FourSquares::canonical(v.map(|x| x << e));
        if !out.contains(&fs) {
            out.push(fs);
        }
    };
    let mut attempts = 0;
    while out.len() < count && attempts < RETRY_CAP {
        attempts += 1;
        if let Some(v) = random_attempt(&reduced, rng) {
            push(v, &mut out);
        }
    }
    if out.is_empty() {
        push(fallback_scan(&reduced, rng), &mut out);
    }
    out
}

/// A decomposition of `m` into four squares.
pub fn four_squares<R: Rng + ?Sized>(m: &BigInt, rng: &mut R) -> Result<FourSquares, NormEqError> {
    Ok(four_squares_multi(m, 1, rng)?.swap_remove(0))
}

/// Up to `count` decompositions of `m`, distinct as multisets of absolute
/// values.
pub fn four_squares_multi<R: Rng + ?Sized>(m: &BigInt, count: usize, rng: &mut R) -> Result<Vec<FourSquares>, NormEqError> {
    if m.is_negative() {
        return Err(NormEqError::Negative(m.clone()));
    }
    let count = count.max(1);
    let out = match m.to_u64() {
        Some(small) if small <= BRUTE_FORCE_LIMIT => scan_small(small, count),
        _ => large_decompositions(m, count, rng),
    };
    debug_assert!(out.iter().all(|fs| fs.sum() == *m));
    Ok(out)
}

/// Stable reorder putting decompositions with a smaller largest part first.
pub fn rank_by_spread(solutions: &mut [FourSquares]) {
    solutions.sort_by(|x, y| x.max_component().cmp(y.max_component()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    fn fs(v: [u64; 4]) -> FourSquares {
        FourSquares::from_u64(v)
    }

    fn big(x: u64) -> BigInt {
        BigInt::from(x)
    }

    /// Trial division.
    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn sqrt_minus_one_examples() {
        let mut r = rng();
        for (p, roots) in [(5u64, [2u64, 3]), (13, [5, 8]), (17, [4, 13])] {
            let x = sqrt_minus_one(&big(p), &mut r).unwrap();
            assert!(roots.iter().any(|&y| x == big(y)), "p={p} x={x}");
        }
        assert!(sqrt_minus_one(&big(7), &mut r).is_err());
        assert!(sqrt_minus_one(&big(21), &mut r).is_err());
    }

    #[test]
    fn two_squares_examples() {
        let mut r = rng();
        assert_eq!(two_squares(&big(5), &mut r).unwrap(), (big(2), big(1)));
        assert_eq!(two_squares(&big(13), &mut r).unwrap(), (big(3), big(2)));
        assert_eq!(two_squares(&big(2), &mut r).unwrap(), (big(1), big(1)));
    }

    #[test]
    fn four_squares_examples() {
        let mut r = rng();
        assert_eq!(four_squares(&big(0), &mut r).unwrap(), fs([0, 0, 0, 0]));
        assert_eq!(four_squares(&big(7), &mut r).unwrap(), fs([2, 1, 1, 1]));
        assert_eq!(four_squares(&big(4), &mut r).unwrap(), fs([2, 0, 0, 0]));
        assert!(four_squares(&BigInt::from(-1), &mut r).is_err());
    }

    #[test]
    fn four_squares_multi_examples() {
        let mut r = rng();
        assert_eq!(four_squares_multi(&big(2), 5, &mut r).unwrap(), vec![fs([1, 1, 0, 0])]);
        assert_eq!(
            four_squares_multi(&big(9), 5, &mut r).unwrap(),
            vec![fs([3, 0, 0, 0]), fs([2, 2, 1, 0])]
        );
        assert_eq!(four_squares_multi(&big(0), 3, &mut r).unwrap(), vec![fs([0, 0, 0, 0])]);
    }

    #[test]
    fn multi_matches_exhaustive_count() {
        // number of multisets {a ≥ b ≥ c ≥ d ≥ 0} with the right sum
        for m in 0u64..300 {
            let mut want = 0;
            for a in 0..=17u64 {
                for b in 0..=a {
                    for c in 0..=b {
                        for d in 0..=c {
                            if a * a + b * b + c * c + d * d == m {
                                want += 1;
                            }
                        }
                    }
                }
            }
            let got = four_squares_multi(&big(m), 1000, &mut rng()).unwrap();
            assert_eq!(got.len(), want, "m={m}");
        }
    }

    #[test]
    fn small_range_is_exact() {
        let mut r = rng();
        for m in 0u64..=10_000 {
            assert_eq!(four_squares(&big(m), &mut r).unwrap().sum(), big(m));
        }
    }

    #[test]
    fn large_values_use_the_randomized_path() {
        let mut r = rng();
        for m in [1_000_001u64, 4_000_000_007, 999_999_999_989, 1 << 40, 7 * (1 << 30) + 7] {
            let sols = four_squares_multi(&big(m), 4, &mut r).unwrap();
            assert!(!sols.is_empty());
            for s in &sols {
                assert_eq!(s.sum(), big(m));
            }
        }
    }

    #[test]
    fn fallback_scan_is_exact() {
        let mut r = rng();
        for m in [1_000_003u64, 1_234_567, 8_000_007] {
            let v = fallback_scan(&big(m), &mut r);
            assert_eq!(FourSquares::canonical(v).sum(), big(m));
        }
    }

    #[test]
    fn two_squares_on_random_primes() {
        let mut r = rng();
        let mut found = 0;
        while found < 1000 {
            let p: u64 = r.gen_range(5..1_000_000_000);
            if p % 4 != 1 || !is_prime(p) {
                continue;
            }
            found += 1;
            let (x, y) = two_squares(&big(p), &mut r).unwrap();
            assert_eq!(&x * &x + &y * &y, big(p));
        }
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        let mut r = rng();
        for n in 0u64..5000 {
            assert_eq!(is_probable_prime(&big(n), 10, &mut r), is_prime(n), "n={n}");
        }
        // Carmichael numbers
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(!is_probable_prime(&big(n), 40, &mut r));
        }
    }

    #[test]
    fn same_seed_same_output() {
        let m = big(123_456_789_012);
        let a = four_squares_multi(&m, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = four_squares_multi(&m, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spread_ranking_prefers_balanced() {
        let mut v = vec![fs([3, 0, 0, 0]), fs([2, 2, 1, 0])];
        rank_by_spread(&mut v);
        assert_eq!(v, vec![fs([2, 2, 1, 0]), fs([3, 0, 0, 0])]);
    }
}
