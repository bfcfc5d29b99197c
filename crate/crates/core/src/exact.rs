//! Exact big-integer and big-rational helpers shared by the counting
//! identities and the bound evaluators. No floating point: every threshold
//! and residual is decided by integer comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// q^x for a half-integer exponent x = `x2`/2, where q = p^k.
///
/// Evaluates as p^(k*x2/2), which stays in the rationals as long as k*x2 is
/// even. Negative exponents yield 1/p^|k*x2/2|. Panics if k*x2 is odd: a
/// half-integer power of a non-square order never appears in the formulas
/// this crate evaluates.
pub fn half_power(p: u64, k: u32, x2: i64) -> BigRational {
    let num = k as i64 * x2;
    assert!(num % 2 == 0, "half-integer power of non-square order p^{k}");
    let exp = num / 2;
    let base = BigInt::from(p);
    if exp >= 0 {
        BigRational::from_integer(base.pow(exp as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-exp) as u32))
    }
}

/// Integer power q^x with a plain integer exponent, as a rational.
pub fn int_power(q: u64, x: i64) -> BigRational {
    let base = BigInt::from(q);
    if x >= 0 {
        BigRational::from_integer(base.pow(x as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-x) as u32))
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_big(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// theta_n = (q^{n+1}-1)/(q-1), the point count of PG(n,q); theta_{-1} = 0.
pub fn theta(n: i64, q: u64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    let q = BigInt::from(q);
    (q.pow(n as u32 + 1) - 1) / (q - 1)
}

/// Smallest integer t with t >= (a + sqrt(r))/d, clamped at 0.
///
/// Decided entirely in integer arithmetic: t satisfies the bound iff
/// t*d - a >= 0 and (t*d - a)^2 >= r. Panics on a negative radicand or a
/// non-positive denominator.
pub fn ceil_radical(a: &BigRational, r: &BigRational, d: &BigRational) -> BigInt {
    assert!(!r.is_negative(), "negative radicand");
    assert!(d.is_positive(), "non-positive denominator");
    let holds = |t: &BigInt| -> bool {
        let lhs = rat_big(t.clone()) * d - a;
        !lhs.is_negative() && &lhs * &lhs >= *r
    };
    if holds(&BigInt::zero()) {
        return BigInt::zero();
    }
    // Bracket then bisect; the predicate is monotone above a/d.
    let mut hi = BigInt::one();
    while !holds(&hi) {
        hi *= 2;
    }
    let mut lo = BigInt::zero(); // known to fail
    while &lo + 1u32 < hi {
        let mid = (&lo + &hi) / 2;
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Round a non-negative integer to 3 significant digits, round-half-even,
/// rendered as e.g. "2.53e24". Values below 1000 are returned as-is.
pub fn sci3(n: &BigInt) -> String {
    let digits = n.to_string();
    if digits.len() <= 3 {
        return digits;
    }
    let bytes = digits.as_bytes();
    let mut sig: u32 = digits[..3].parse().unwrap();
    let next = bytes[3] - b'0';
    let rest_nonzero = bytes[4..].iter().any(|&b| b != b'0');
    let round_up = match next.cmp(&5) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => rest_nonzero || sig % 2 == 1,
    };
    let mut exp = digits.len() as i64 - 1;
    if round_up {
        sig += 1;
        if sig == 1000 {
            sig = 100;
            exp += 1;
        }
    }
    format!("{}.{:02}e{}", sig / 100, sig % 100, exp)
}

/// Exact rational as "num/den" (or just "num" when integral), for JSON output.
pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_small() {
        assert_eq!(theta(1, 2), BigInt::from(3));
        assert_eq!(theta(2, 3), BigInt::from(13));
        assert_eq!(theta(-1, 5), BigInt::zero());
    }

    #[test]
    fn half_powers() {
        // 9^{5/2} = 3^5
        assert_eq!(half_power(3, 2, 5), rat(243));
        // 4^{-1/2} = 1/2
        assert_eq!(half_power(2, 2, -1), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn ceil_radical_examples() {
        // (-3 + sqrt(337)) / 4 ~ 3.84 -> 4
        assert_eq!(ceil_radical(&rat(-3), &rat(337), &rat(4)), BigInt::from(4));
        assert_eq!(ceil_radical(&rat(0), &rat(0), &rat(1)), BigInt::zero());
        // (-3 + sqrt(9)) / 2 = 0 exactly
        assert_eq!(ceil_radical(&rat(-3), &rat(9), &rat(2)), BigInt::zero());
    }

    #[test]
    fn ceil_radical_is_tight() {
        for (a, r, d) in [(-3i64, 337i64, 4i64), (-16, 15192, 16), (5, 2, 3), (-10, 700, 4)] {
            let (a, r, d) = (rat(a), rat(r), rat(d));
            let t = ceil_radical(&a, &r, &d);
            let lhs = rat_big(t.clone()) * &d - &a;
            assert!(&lhs * &lhs >= r && !lhs.is_negative());
            if t > BigInt::zero() {
                let lhs = rat_big(t - 1) * &d - &a;
                assert!(lhs.is_negative() || &lhs * &lhs < r);
            }
        }
    }

    #[test]
    fn sci3_rounding() {
        assert_eq!(sci3(&BigInt::from(2525u32)), "2.52e3"); // half to even
        assert_eq!(sci3(&BigInt::from(2535u32)), "2.54e3");
        assert_eq!(sci3(&BigInt::from(25251u32)), "2.53e4");
        assert_eq!(sci3(&BigInt::from(9996u32)), "1.00e4");
        assert_eq!(sci3(&BigInt::from(999u32)), "999");
    }
}
