//! Closed-form binomial sequences, rising factorials and harmonic numbers.

mod lemmas;

pub use lemmas::{lemma_suite, LemmaCheck, LemmaReport, Outcome};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{binomial_row, inv_mod, ResidueClass};
use crate::error::{Error, Result};

/// `C(n,k) C(n+k,k)` for `k = 0..=n`.
fn apery_weights(n: u64) -> Vec<BigUint> {
    let row = binomial_row(n);
    let mut central = BigUint::one(); // C(n+k, k)
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        if k > 0 {
            central = central * (n + k) / k;
        }
        out.push(&row[k as usize] * &central);
    }
    out
}

/// `a(n) = Σ_k C(n,k)^2 C(n+k,k)`.
pub fn apery_a(n: u64) -> BigUint {
    let row = binomial_row(n);
    apery_weights(n).iter().zip(&row).map(|(w, c)| w * c).sum()
}

/// `b(n) = Σ_k C(n,k)^2 C(n+k,k)^2`.
pub fn apery_b(n: u64) -> BigUint {
    apery_weights(n).iter().map(|w| w * w).sum()
}

/// `Σ_{k1+k2=k3+k4} Π C(n,k_i) C(n+k_i,k_i)`, summed by grouping on `s = k1 + k2`.
pub fn a_sigma8(n: u64) -> BigUint {
    let w = apery_weights(n);
    let len = w.len();
    let mut conv = vec![BigUint::zero(); 2 * len - 1];
    for i in 0..len {
        for j in 0..len {
            conv[i + j] += &w[i] * &w[j];
        }
    }
    conv.iter().map(|c| c * c).sum()
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub trait RisingFactorial: Sized {
    fn rising(&self, n: u64) -> Self;
}

impl RisingFactorial for BigInt {
    fn rising(&self, n: u64) -> BigInt {
        (0..n).fold(BigInt::one(), |acc, i| acc * (self + i))
    }
}

impl RisingFactorial for ResidueClass {
    fn rising(&self, n: u64) -> ResidueClass {
        let m = self.modulus();
        (0..n).fold(ResidueClass::one(m), |acc, i| acc * (*self + ResidueClass::new(i as i128, m)))
    }
}

pub fn rising_factorial<T: RisingFactorial>(a: &T, n: u64) -> T {
    a.rising(n)
}

/// `H_n = Σ_{j <= n} 1/j`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> BigRational {
    (1..=n).fold(BigRational::zero(), |acc, j| acc + BigRational::new(BigInt::one(), BigInt::from(j)))
}

/// `Σ_{j=from+1}^{to} 1/j` reduced modulo `m`; every `j` must be a unit mod `m`.
pub fn harmonic_range_mod(from: u64, to: u64, m: u64) -> Result<ResidueClass> {
    let mut acc = ResidueClass::zero(m);
    for j in from + 1..=to {
        let inv = inv_mod(j % m, m)
            .ok_or_else(|| Error::InvalidArgument(format!("1/{j} is not defined modulo {m}")))?;
        acc = acc + ResidueClass::new(inv as i128, m);
    }
    Ok(acc)
}

/// `H_n` reduced modulo `m`.
pub fn harmonic_mod(n: u64, m: u64) -> Result<ResidueClass> {
    harmonic_range_mod(0, n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::binomial;

    fn a_direct(n: u64) -> BigUint {
        (0..=n).map(|k| binomial(n, k).pow(2) * binomial(n + k, k)).sum()
    }

    fn sigma8_direct(n: u64) -> BigUint {
        let mut acc = BigUint::zero();
        let w = |k: u64| binomial(n, k) * binomial(n + k, k);
        for k1 in 0..=n {
            for k2 in 0..=n {
                for k3 in 0..=n {
                    if k1 + k2 < k3 || k1 + k2 - k3 > n {
                        continue;
                    }
                    acc += w(k1) * w(k2) * w(k3) * w(k1 + k2 - k3);
                }
            }
        }
        acc
    }

    #[test]
    fn apery_values() {
        assert_eq!(apery_a(0), BigUint::one());
        assert_eq!(apery_b(0), BigUint::one());
        assert_eq!(apery_a(2), BigUint::from(19u32));
        assert_eq!(apery_b(1), BigUint::from(5u32));
        assert_eq!(apery_b(2), BigUint::from(73u32));
        assert_eq!(apery_a(3), BigUint::from(147u32));
        for n in 0..25 {
            assert_eq!(apery_a(n), a_direct(n));
        }
    }

    #[test]
    fn sigma8_values() {
        let known = [1u64, 33, 8929, 4124193, 2435948001, 1657775448033];
        for (n, &v) in known.iter().enumerate() {
            assert_eq!(a_sigma8(n as u64), BigUint::from(v));
        }
        for n in 0..12 {
            assert_eq!(a_sigma8(n), sigma8_direct(n));
        }
    }

    #[test]
    fn rising_and_harmonic() {
        assert_eq!(rising_factorial(&BigInt::from(1), 4), BigInt::from(24));
        assert_eq!(rising_factorial(&BigInt::from(3), 2), BigInt::from(12));
        assert_eq!(rising_factorial(&BigInt::from(7), 0), BigInt::one());
        assert_eq!(rising_factorial(&ResidueClass::new(2, 5), 2).value(), 1);
        assert_eq!(harmonic(0), BigRational::zero());
        assert_eq!(harmonic(2), BigRational::new(3.into(), 2.into()));
        assert_eq!(harmonic(4), BigRational::new(25.into(), 12.into()));
        // 25/12 mod 7: 12^{-1} = 3 mod 7, 25*3 = 75 = 5 mod 7
        assert_eq!(harmonic_mod(4, 7).unwrap().value(), 5);
        assert!(harmonic_mod(5, 25).is_err());
    }
}
