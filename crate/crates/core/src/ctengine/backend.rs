//! Interchangeable constant-term extractors, selected by name.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::sweep::{constant_term_in, BigRing, ModRing};
use super::IntervalFormProduct;
use crate::arith::large_primes;
use crate::error::{Error, Result};

pub const DEFAULT_BACKEND: &str = "bigint-sweep";

pub trait ConstantTermBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn constant_term(&self, model: &IntervalFormProduct, n: u32) -> Result<BigInt>;
}

/// The sweep over arbitrary-precision integers.
pub struct BigIntSweep;

impl ConstantTermBackend for BigIntSweep {
    fn name(&self) -> &'static str {
        "bigint-sweep"
    }

    fn constant_term(&self, model: &IntervalFormProduct, n: u32) -> Result<BigInt> {
        let ring = BigRing::new(n as usize);
        constant_term_in(&ring, model, n).map(BigInt::from)
    }
}

/// The sweep modulo several primes near `2^62`, recombined by CRT. The
/// number of primes is fixed by the bound `J <= Π |I|^n`, the value of the
/// product at `x = (1, ..., 1)`.
pub struct ModularSweep;

impl ModularSweep {
    fn bound(model: &IntervalFormProduct, n: u32) -> BigUint {
        model
            .factors()
            .iter()
            .map(|&(a, b)| BigUint::from(b - a + 1).pow(n))
            .product()
    }
}

impl ConstantTermBackend for ModularSweep {
    fn name(&self) -> &'static str {
        "modular-sweep"
    }

    fn constant_term(&self, model: &IntervalFormProduct, n: u32) -> Result<BigInt> {
        let bound = Self::bound(model, n);
        let count = (bound.bits() / 61 + 1) as usize;
        let mut value = BigUint::from(0u32);
        let mut modulus = BigUint::one();
        for p in large_primes(count) {
            let r = constant_term_in(&ModRing::new(n as usize, p), model, n)?;
            // lift: value + modulus * t ≡ r (mod p)
            let current = (&value % p).to_u64_digits().first().copied().unwrap_or(0);
            let m_mod = (&modulus % p).to_u64_digits().first().copied().unwrap_or(0);
            let diff = (r + p - current) % p;
            let inv = crate::arith::inv_mod(m_mod, p).expect("distinct primes are coprime");
            let t = crate::arith::mul_mod(diff, inv, p);
            value += &modulus * t;
            modulus *= p;
        }
        debug_assert!(value <= bound);
        Ok(BigInt::from(value))
    }
}

pub fn backend_names() -> Vec<&'static str> {
    vec!["bigint-sweep", "modular-sweep"]
}

pub fn backend(name: &str) -> Result<Box<dyn ConstantTermBackend>> {
    match name {
        "bigint-sweep" => Ok(Box::new(BigIntSweep)),
        "modular-sweep" => Ok(Box::new(ModularSweep)),
        _ => Err(Error::UnknownStrategy { kind: "constant-term backend", name: name.to_string() }),
    }
}
