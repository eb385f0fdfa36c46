//! Integer q-expansions of eta quotients `Π η(m_i z)^{e_i}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaProductSpec {
    /// `(m, e)` for each factor `η(m z)^e`.
    pub factors: Vec<(u32, i32)>,
}

impl EtaProductSpec {
    pub fn new(factors: Vec<(u32, i32)>) -> Self {
        EtaProductSpec { factors }
    }

    /// `η(4z)^6`, weight 3 and level 16.
    pub fn eta6_4z() -> Self {
        Self::new(vec![(4, 6)])
    }

    /// `η(2z)^4 η(4z)^4`, weight 4 and level 8.
    pub fn eta4_2z_eta4_4z() -> Self {
        Self::new(vec![(2, 4), (4, 4)])
    }

    /// `η(2z)^12`, weight 6 and level 4.
    pub fn eta12_2z() -> Self {
        Self::new(vec![(2, 12)])
    }

    /// The exponent of the leading `q`, `Σ m_i e_i / 24`.
    pub fn leading_power(&self) -> Result<i64> {
        let total: i64 = self.factors.iter().map(|&(m, e)| m as i64 * e as i64).sum();
        if total % 24 != 0 {
            return Err(Error::InvalidArgument(format!("leading power {total}/24 is not an integer")));
        }
        Ok(total / 24)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSeries {
    /// `coefficients[n]` is the coefficient of `q^n`.
    pub coefficients: Vec<BigInt>,
    pub source: String,
}

impl CoefficientSeries {
    pub fn get(&self, n: usize) -> Option<&BigInt> {
        self.coefficients.get(n)
    }
}

/// `Π (1 - q^n)` to order `len - 1`, from the pentagonal number theorem.
fn euler_product(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = BigInt::one();
    for k in 1i64.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let first = (k * (3 * k - 1) / 2) as usize;
        if first >= len {
            break;
        }
        out[first] += sign;
        let second = (k * (3 * k + 1) / 2) as usize;
        if second < len {
            out[second] += sign;
        }
    }
    out
}

fn mul_truncated(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Inverse of a series with constant term 1.
fn inverse_truncated(a: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = BigInt::one();
    for n in 1..len {
        let mut s = BigInt::zero();
        for k in 1..=n.min(a.len() - 1) {
            s += &a[k] * &out[n - k];
        }
        out[n] = -s;
    }
    out
}

fn pow_truncated(base: &[BigInt], mut e: u32, len: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); len];
    if len > 0 {
        acc[0] = BigInt::one();
    }
    let mut b = base[..base.len().min(len)].to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_truncated(&acc, &b, len);
        }
        e >>= 1;
        if e > 0 {
            b = mul_truncated(&b, &b, len);
        }
    }
    acc
}

/// Coefficients of `q^0 .. q^{n_max}`.
pub fn eta_qexp(spec: &EtaProductSpec, n_max: usize) -> Result<CoefficientSeries> {
    let lead = spec.leading_power()?;
    if lead < 0 {
        return Err(Error::InvalidArgument("negative leading power".into()));
    }
    let lead = lead as usize;
    let mut coefficients = vec![BigInt::zero(); n_max + 1];
    if lead <= n_max {
        let len = n_max + 1 - lead;
        let euler = euler_product(len);
        let mut product = vec![BigInt::zero(); len];
        product[0] = BigInt::one();
        for &(m, e) in &spec.factors {
            let m = m as usize;
            let mut scaled = vec![BigInt::zero(); len];
            for (i, c) in euler.iter().enumerate() {
                if i * m >= len {
                    break;
                }
                scaled[i * m] = c.clone();
            }
            let factor = if e >= 0 { scaled } else { inverse_truncated(&scaled, len) };
            product = mul_truncated(&product, &pow_truncated(&factor, e.unsigned_abs(), len), len);
        }
        for (i, c) in product.into_iter().enumerate() {
            coefficients[i + lead] = c;
        }
    }
    let source = spec.factors.iter().map(|(m, e)| format!("eta({m}z)^{e}")).collect::<Vec<_>>().join(" ");
    Ok(CoefficientSeries { coefficients, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn pentagonal_matches_direct_product() {
        let len = 40;
        let mut direct = ints(&[1]);
        direct.resize(len, BigInt::zero());
        for n in 1..len {
            let mut factor = vec![BigInt::zero(); len];
            factor[0] = BigInt::one();
            factor[n] = BigInt::from(-1);
            direct = mul_truncated(&direct, &factor, len);
        }
        assert_eq!(euler_product(len), direct);
    }

    #[test]
    fn eta12_first_coefficients() {
        let s = eta_qexp(&EtaProductSpec::eta12_2z(), 5).unwrap();
        assert_eq!(s.coefficients, ints(&[0, 1, 0, -12, 0, 54]));
    }

    #[test]
    fn eta6_coefficient_at_five() {
        let s = eta_qexp(&EtaProductSpec::eta6_4z(), 9).unwrap();
        assert_eq!(s.get(1), Some(&BigInt::from(1)));
        assert_eq!(s.get(5), Some(&BigInt::from(-6)));
        assert_eq!(s.get(9), Some(&BigInt::from(9)));
    }

    #[test]
    fn eta8_weight4_start() {
        // η(2z)^4 η(4z)^4 = q - 4q^3 - 2q^5 + 24q^7 - ...
        let s = eta_qexp(&EtaProductSpec::eta4_2z_eta4_4z(), 7).unwrap();
        assert_eq!(s.coefficients, ints(&[0, 1, 0, -4, 0, -2, 0, 24]));
    }

    #[test]
    fn negative_exponents_invert() {
        // η(z)^2 / η(z)^2 = 1
        let spec = EtaProductSpec::new(vec![(1, 2), (1, -2)]);
        let s = eta_qexp(&spec, 6).unwrap();
        assert_eq!(s.coefficients, ints(&[1, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn rejects_fractional_power() {
        assert!(eta_qexp(&EtaProductSpec::new(vec![(1, 1)]), 4).is_err());
    }
}
