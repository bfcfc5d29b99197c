//! Exact arithmetic in GF(q), q = p^k, via full log/antilog tables.
//!
//! Elements are encoded as integers in [0, q): the base-p digits of the
//! encoding, low to high, are the coordinates in the power basis of the
//! chosen modulus. 0 and 1 encode the additive and multiplicative
//! identities. This encoding is the wire format used by every point-set
//! file and JSON output.
//!
//! The modulus is the first primitive polynomial in the deterministic scan
//! order below, so encodings are reproducible across runs.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the configured cap {1}")]
    SizeCap(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("order {0} is not a square, conjugation undefined")]
    NotSquare(u64),
    #[error("element {0} out of range for GF({1})")]
    OutOfRange(u64, u64),
}

/// GF(p^k) with precomputed log/antilog tables.
#[derive(Debug, Clone)]
pub struct Field {
    p: u64,
    k: u32,
    q: u64,
    /// Monic modulus, coefficients low to high, length k+1.
    modulus: Vec<u32>,
    /// exp[i] = encoding of x^i, i in [0, q-1).
    exp: Vec<u32>,
    /// log[a] = discrete log of a (log[0] unused).
    log: Vec<u32>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(p: u64, k: u32) -> Result<Field, GfError> {
        Field::with_cap(p, k, crate::Config::default().max_field_order)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Field, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        assert!(k >= 1);
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= cap)
            .ok_or(GfError::SizeCap(p.saturating_pow(k), cap))?;
        let modulus = find_modulus(p, k, q);
        let mut field = Field { p, k, q, modulus, exp: Vec::new(), log: Vec::new() };
        field.build_tables();
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut exp = Vec::with_capacity(q - 1);
        let mut log = vec![0u32; q];
        let mut t = vec![0u32; self.k as usize];
        t[0] = 1;
        for i in 0..q - 1 {
            let enc = digits_encode(&t, self.p);
            exp.push(enc);
            log[enc as usize] = i as u32;
            mul_by_x(&mut t, &self.modulus, self.p);
        }
        debug_assert_eq!(digits_encode(&t, self.p), 1, "x must have order q-1");
        self.exp = exp;
        self.log = log;
    }

    pub fn check(&self, a: u32) -> Result<u32, GfError> {
        if (a as u64) < self.q {
            Ok(a)
        } else {
            Err(GfError::OutOfRange(a as u64, self.q))
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let mut out = 0u64;
        let (mut a, mut b) = (a as u64, b as u64);
        let mut place = 1u64;
        while a != 0 || b != 0 {
            out += place * ((a % self.p + b % self.p) % self.p);
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut out = 0u64;
        let mut a = a as u64;
        let mut place = 1u64;
        while a != 0 {
            out += place * ((self.p - a % self.p) % self.p);
            a /= self.p;
            place *= self.p;
        }
        out as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let s = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n;
        self.exp[s as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        let n = self.q - 1;
        let s = (n - self.log[a as usize] as u64) % n;
        Ok(self.exp[s as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e for a non-negative exponent (0^0 = 1).
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = self.q - 1;
        let s = (self.log[a as usize] as u64 % n) * (e % n) % n;
        self.exp[s as usize]
    }

    /// The square-root Frobenius a -> a^sqrt(q); requires k even.
    pub fn conjugate(&self, a: u32) -> Result<u32, GfError> {
        if self.k % 2 != 0 {
            return Err(GfError::NotSquare(self.q));
        }
        Ok(self.conj_unchecked(a))
    }

    /// sqrt(q) as an integer; requires k even.
    pub fn sqrt_order(&self) -> Result<u64, GfError> {
        if self.k % 2 != 0 {
            return Err(GfError::NotSquare(self.q));
        }
        Ok(self.p.pow(self.k / 2))
    }

    pub(crate) fn conj_unchecked(&self, a: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let s = self.p.pow(self.k / 2);
        let n = self.q - 1;
        self.exp[((self.log[a as usize] as u64 * (s % n)) % n) as usize]
    }

    /// Coefficients of the element in the power basis, low to high, length k.
    pub fn decode_element(&self, n: u32) -> Result<Vec<u32>, GfError> {
        self.check(n)?;
        let mut digits = vec![0u32; self.k as usize];
        let mut n = n as u64;
        for d in digits.iter_mut() {
            *d = (n % self.p) as u32;
            n /= self.p;
        }
        Ok(digits)
    }

    pub fn encode_element(&self, digits: &[u32]) -> Result<u32, GfError> {
        if digits.len() != self.k as usize || digits.iter().any(|&d| d as u64 >= self.p) {
            return Err(GfError::OutOfRange(u64::MAX, self.q));
        }
        Ok(digits_encode(digits, self.p))
    }

    /// All elements, in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q as u32
    }
}

/// Write q as p^k with p prime, if possible.
pub fn factor_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            return (rest == 1).then_some((p, k));
        }
        p += 1;
    }
    Some((q, 1))
}

fn digits_encode(digits: &[u32], p: u64) -> u32 {
    let mut out = 0u64;
    for &d in digits.iter().rev() {
        out = out * p + d as u64;
    }
    out as u32
}

/// Multiply the degree-<k polynomial in `t` by x and reduce by the monic
/// `modulus` of degree k. Coefficients low to high.
fn mul_by_x(t: &mut [u32], modulus: &[u32], p: u64) {
    let k = t.len();
    let lead = t[k - 1] as u64;
    for i in (1..k).rev() {
        t[i] = t[i - 1];
    }
    t[0] = 0;
    if lead != 0 {
        for i in 0..k {
            let m = modulus[i] as u64;
            t[i] = ((t[i] as u64 + (p - 1) * lead % p * m) % p) as u32;
        }
    }
}

/// First primitive monic polynomial of degree k over GF(p), scanning the
/// constant-to-leading coefficient vector as a base-p counter. Primitivity
/// is decided by checking that x has multiplicative order exactly q-1,
/// which also forces irreducibility.
fn find_modulus(p: u64, k: u32, q: u64) -> Vec<u32> {
    let k = k as usize;
    for v in 0..q {
        let mut coeffs = vec![0u32; k + 1];
        let mut v = v;
        for c in coeffs.iter_mut().take(k) {
            *c = (v % p) as u32;
            v /= p;
        }
        coeffs[k] = 1;
        if coeffs[0] == 0 {
            continue; // x divides f
        }
        if x_has_full_order(&coeffs, p, q) {
            return coeffs;
        }
    }
    unreachable!("a primitive polynomial of every degree exists over GF(p)")
}

fn x_has_full_order(modulus: &[u32], p: u64, q: u64) -> bool {
    let k = modulus.len() - 1;
    let mut t = vec![0u32; k];
    t[0] = 1;
    for i in 1..q {
        mul_by_x(&mut t, modulus, p);
        let is_one = t[0] == 1 && t[1..].iter().all(|&c| c == 0);
        if is_one {
            return i == q - 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(f.add(2, 2), 1);
        assert_eq!(f.mul(2, 2), 1);
        assert!(Field::new(4, 1).is_err());
        assert!(Field::new(2, 30).is_err());
    }

    #[test]
    fn gf4_units() {
        let f = Field::new(2, 2).unwrap();
        // the two non-identity units are mutual inverses and conjugates
        let g = f.exp[1];
        let g2 = f.mul(g, g);
        assert_ne!(g, g2);
        assert_eq!(f.mul(g, g2), 1);
        assert_eq!(f.conjugate(g).unwrap(), g2);
        // encoding: n=3 is 1 + x
        assert_eq!(f.decode_element(3).unwrap(), vec![1, 1]);
        assert_eq!(f.encode_element(&[1, 1]).unwrap(), 3);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, k) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 4)] {
            let f = Field::with_cap(p, k, 1 << 20).unwrap();
            let q = f.q() as u32;
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    if b != 0 {
                        assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
                    }
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn tables_mutually_inverse() {
        let f = Field::new(3, 2).unwrap();
        for a in 1..f.q() as u32 {
            assert_eq!(f.exp[f.log[a as usize] as usize], a);
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.div(1, 0).unwrap_err(), GfError::DivisionByZero);
    }

    #[test]
    fn conjugation_is_order_two_automorphism() {
        for (p, k) in [(2u64, 2u32), (3, 2), (2, 4), (5, 2)] {
            let f = Field::new(p, k).unwrap();
            let s = f.sqrt_order().unwrap();
            let mut fixed = 0;
            for a in 0..f.q() as u32 {
                let c = f.conjugate(a).unwrap();
                assert_eq!(f.conjugate(c).unwrap(), a);
                for b in 0..f.q() as u32 {
                    assert_eq!(f.conjugate(f.add(a, b)).unwrap(), f.add(c, f.conjugate(b).unwrap()));
                    assert_eq!(f.conjugate(f.mul(a, b)).unwrap(), f.mul(c, f.conjugate(b).unwrap()));
                }
                if c == a {
                    fixed += 1;
                }
                // norms land in the fixed subfield
                let norm = f.mul(a, c);
                assert_eq!(f.conjugate(norm).unwrap(), norm);
            }
            assert_eq!(fixed as u64, s, "fixed subfield has order sqrt(q)");
        }
        assert_eq!(Field::new(3, 1).unwrap().conjugate(1), Err(GfError::NotSquare(3)));
    }
}
