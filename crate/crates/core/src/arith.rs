//! Small-integer number theory and residue arithmetic shared by the other modules.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// Primes `p` with `lo <= p <= hi`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&p| is_prime(p)).collect()
}

/// Largest primes below `2^62`, descending; moduli for multi-modular computations.
pub fn large_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Legendre symbol via Euler's criterion, returned as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Row `C(n, 0), ..., C(n, n)`.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

/// Reduce a big integer into `[0, m)`.
pub fn big_mod(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64")
}

/// An element of `Z / mZ` with `2 <= m < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    value: u64,
    modulus: u64,
}

impl ResidueClass {
    pub fn new(value: i128, modulus: u64) -> Self {
        assert!(modulus >= 2 && modulus < 1 << 63, "modulus out of range");
        let value = value.rem_euclid(modulus as i128) as u64;
        ResidueClass { value, modulus }
    }

    pub fn from_big(x: &BigInt, modulus: u64) -> Self {
        ResidueClass::new(0, modulus).with_value(big_mod(x, modulus))
    }

    pub fn from_biguint(x: &BigUint, modulus: u64) -> Self {
        let v = (x % modulus).to_u64().expect("residue fits in u64");
        ResidueClass::new(v as i128, modulus)
    }

    fn with_value(self, value: u64) -> Self {
        ResidueClass { value: value % self.modulus, modulus: self.modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn zero(modulus: u64) -> Self {
        ResidueClass::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        ResidueClass::new(1, modulus)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, exp: u64) -> Self {
        self.with_value(pow_mod(self.value, exp, self.modulus))
    }

    pub fn inv(&self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|v| self.with_value(v))
    }

    /// Representative in `(-m/2, m/2]`.
    pub fn signed(&self) -> i128 {
        let v = self.value as i128;
        if 2 * v > self.modulus as i128 {
            v - self.modulus as i128
        } else {
            v
        }
    }

    fn check(&self, other: &Self) {
        debug_assert_eq!(self.modulus, other.modulus, "mixed moduli");
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Add for ResidueClass {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        let s = (self.value as u128 + rhs.value as u128) % self.modulus as u128;
        self.with_value(s as u64)
    }
}

impl Sub for ResidueClass {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ResidueClass {
    type Output = Self;
    fn neg(self) -> Self {
        self.with_value((self.modulus - self.value) % self.modulus)
    }
}

impl Mul for ResidueClass {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(&rhs);
        self.with_value(mul_mod(self.value, rhs.value, self.modulus))
    }
}

impl Mul<u64> for ResidueClass {
    type Output = Self;
    fn mul(self, rhs: u64) -> Self {
        self.with_value(mul_mod(self.value, rhs % self.modulus, self.modulus))
    }
}

impl std::iter::Sum for ResidueClass {
    fn sum<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let first = iter.next().expect("sum of residues needs a first element");
        iter.fold(first, |a, b| a + b)
    }
}

/// Binomial coefficients modulo `m` for arguments up to `n_max`, by Pascal's rule.
#[derive(Clone, Debug)]
pub struct BinomialTable {
    modulus: u64,
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    pub fn new(n_max: usize, modulus: u64) -> Self {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![1 % modulus; n + 1];
            for k in 1..n {
                row[k] = (rows[n - 1][k - 1] + rows[n - 1][k]) % modulus;
            }
            rows.push(row);
        }
        BinomialTable { modulus, rows }
    }

    pub fn get(&self, n: usize, k: usize) -> ResidueClass {
        let v = if k > n { 0 } else { self.rows[n][k] };
        ResidueClass::new(v as i128, self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn inverse_and_power() {
        assert_eq!(inv_mod(3, 25), Some(17));
        assert_eq!(inv_mod(5, 25), None);
        assert_eq!(pow_mod(2, 5, 25), 7);
    }

    #[test]
    fn residues() {
        let a = ResidueClass::new(-1, 7);
        assert_eq!(a.value(), 6);
        assert_eq!(a.signed(), -1);
        assert_eq!((a * a).value(), 1);
        assert_eq!(ResidueClass::new(3, 7).inv().unwrap().value(), 5);
    }

    #[test]
    fn binomials_agree() {
        let row = binomial_row(10);
        let t = BinomialTable::new(10, 1_000_003);
        for k in 0..=10u64 {
            assert_eq!(row[k as usize], binomial(10, k));
            assert_eq!(BigUint::from(t.get(10, k as usize).value()), binomial(10, k));
        }
        assert_eq!(binomial(5, 7), BigUint::zero());
    }

    #[test]
    fn legendre_symbol() {
        // squares mod 5 are 1 and 4
        assert_eq!(
            (0..5).map(|a| legendre(a, 5)).collect::<Vec<_>>(),
            vec![0, 1, -1, -1, 1]
        );
    }
}
