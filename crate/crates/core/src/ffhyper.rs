//! Multiplicative characters of `F_p`, Greene's hypergeometric functions with
//! quadratic numerator and trivial denominator parameters, and their exact
//! counterparts through Legendre-curve traces.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, pow_mod, require_odd_prime, BinomialTable, ResidueClass};
use crate::error::{Error, Result};
use crate::modforms::legendre_trace;
use crate::sequences::harmonic_range_mod;

/// Discrete logarithms to the smallest primitive root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    p: u64,
    generator: u64,
    /// `dlog[x]` for `1 <= x < p`; `dlog[0]` is unused.
    dlog: Vec<u64>,
}

impl CharacterTable {
    pub fn build(p: u64) -> Result<Self> {
        require_odd_prime(p)?;
        let order = p - 1;
        let factors: Vec<u64> = (2..=order).filter(|&q| order % q == 0 && is_prime(q)).collect();
        let generator = (2..p.max(3))
            .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, p) != 1))
            .unwrap_or(2 % p);
        let mut dlog = vec![0; p as usize];
        let mut x = 1u64;
        for k in 0..order {
            dlog[x as usize] = k;
            x = x * generator % p;
        }
        Ok(CharacterTable { p, generator, dlog })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `None` at `x = 0`.
    pub fn dlog(&self, x: u64) -> Option<u64> {
        let x = x % self.p;
        (x != 0).then(|| self.dlog[x as usize])
    }

    pub fn order(&self) -> u64 {
        self.p - 1
    }

    /// Index of the quadratic character.
    pub fn phi_index(&self) -> u64 {
        (self.p - 1) / 2
    }

    /// `χ_k(x) = ζ^{k dlog x}` with `ζ = e^{2πi/(p-1)}`, as an exponent of `ζ`;
    /// `None` when `χ_k(x) = 0`.
    pub fn exponent(&self, k: u64, x: u64) -> Option<u64> {
        self.dlog(x).map(|d| k % self.order() * d % self.order())
    }
}

/// `Σ_{x in F_p} χ_k(x)`, summed over the roots of unity and rounded; `p - 1`
/// for the trivial character and `0` otherwise.
pub fn orthogonality_check(p: u64, chi_index: u64) -> Result<i64> {
    let table = CharacterTable::build(p)?;
    let order = table.order();
    let mut sum = Approx::exact(Complex64::zero());
    for x in 1..p {
        let e = table.exponent(chi_index, x).expect("x is a unit");
        sum = sum.add(root_of_unity(e, order));
    }
    if sum.err >= 0.5 || sum.z.im.abs() >= 0.5 {
        return Err(Error::Precision { bound: sum.err });
    }
    Ok(sum.z.re.round() as i64)
}

/// `numerator / p^p_power`, kept with `p ∤ numerator` unless `p_power = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypValue {
    pub p: u64,
    pub numerator: BigInt,
    pub p_power: u32,
}

impl HypValue {
    pub fn new(p: u64, numerator: BigInt, p_power: u32) -> Self {
        let mut v = HypValue { p, numerator, p_power };
        let pb = BigInt::from(p);
        while v.p_power > 0 && (&v.numerator % &pb).is_zero() {
            v.numerator /= &pb;
            v.p_power -= 1;
        }
        if v.numerator.is_zero() {
            v.p_power = 0;
        }
        v
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::from(self.p).pow(self.p_power))
    }

    pub fn scale(&self, factor: i64) -> HypValue {
        HypValue::new(self.p, &self.numerator * factor, self.p_power)
    }

    /// `p · self`, when that is an integer.
    pub fn times_p(&self) -> Option<BigInt> {
        match self.p_power {
            0 => Some(&self.numerator * self.p),
            1 => Some(self.numerator.clone()),
            _ => None,
        }
    }
}

impl std::fmt::Display for HypValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.p_power {
            0 => write!(f, "{}", self.numerator),
            1 => write!(f, "{}/{}", self.numerator, self.p),
            k => write!(f, "{}/{}^{}", self.numerator, self.p, k),
        }
    }
}

/// `2F1(λ) = -φ(-1) a(p, λ) / p`.
pub fn hyp2f1_exact(p: u64, lambda: u64) -> Result<HypValue> {
    let a = legendre_trace(p, lambda)?;
    let phi_minus_one = legendre(-1, p) as i64;
    Ok(HypValue::new(p, BigInt::from(-phi_minus_one * a), 1))
}

/// A complex number with an absolute error bound.
#[derive(Clone, Copy, Debug)]
struct Approx {
    z: Complex64,
    err: f64,
}

const UNIT: f64 = f64::EPSILON; // generous: 2u per operation

impl Approx {
    fn exact(z: Complex64) -> Self {
        Approx { z, err: 0.0 }
    }

    fn add(self, o: Approx) -> Approx {
        let z = self.z + o.z;
        Approx { z, err: self.err + o.err + UNIT * z.norm() }
    }

    fn mul(self, o: Approx) -> Approx {
        let z = self.z * o.z;
        let err = self.z.norm() * o.err + o.z.norm() * self.err + self.err * o.err + 2.0 * UNIT * z.norm();
        Approx { z, err }
    }

    fn scale(self, s: f64) -> Approx {
        Approx { z: self.z * s, err: self.err * s.abs() + UNIT * (self.z * s).norm() }
    }
}

/// `e^{2πi e / order}`; cos and sin are within a few ulps and the angle carries one rounding.
fn root_of_unity(e: u64, order: u64) -> Approx {
    let angle = 2.0 * PI * e as f64 / order as f64;
    Approx { z: Complex64::new(angle.cos(), angle.sin()), err: 8.0 * UNIT }
}

/// Greene's `{n+1}F_n(φ, ..., φ; ε, ..., ε | x)` over `F_p`, for all `x` at once.
pub struct GreeneEvaluator {
    table: CharacterTable,
    roots: Vec<Approx>,
    /// `binom(φχ_k, χ_k)` for each `k`.
    binomials: Vec<Approx>,
}

impl GreeneEvaluator {
    pub fn new(p: u64) -> Result<Self> {
        let table = CharacterTable::build(p)?;
        let order = table.order();
        let roots: Vec<Approx> = (0..order).map(|e| root_of_unity(e, order)).collect();
        let phi = table.phi_index();
        let mut binomials = Vec::with_capacity(order as usize);
        for k in 0..order {
            // binom(A, B) = B(-1)/p Σ_x A(x) B̄(1-x), A = φχ_k, B = χ_k
            let a_index = (phi + k) % order;
            let b_bar = (order - k) % order;
            let mut sum = Approx::exact(Complex64::zero());
            for x in 0..p {
                let (Some(ea), Some(eb)) = (table.exponent(a_index, x), table.exponent(b_bar, (1 + p - x) % p)) else {
                    continue;
                };
                sum = sum.add(roots[((ea + eb) % order) as usize]);
            }
            let sign = roots[table.exponent(k, p - 1).unwrap() as usize];
            binomials.push(sum.mul(sign).scale(1.0 / p as f64));
        }
        Ok(GreeneEvaluator { table, roots, binomials })
    }

    pub fn p(&self) -> u64 {
        self.table.p
    }

    /// `{n+1}F_n(x)` for `1 <= n_upper <= 4`.
    pub fn evaluate(&self, n_upper: u32, x: u64) -> Result<HypValue> {
        if !(1..=4).contains(&n_upper) {
            return Err(Error::InvalidArgument(format!("n_upper = {n_upper} outside 1..=4")));
        }
        let p = self.table.p;
        let order = self.table.order();
        let mut sum = Approx::exact(Complex64::zero());
        for k in 0..order {
            let Some(e) = self.table.exponent(k, x) else { continue };
            let mut term = self.roots[e as usize];
            for _ in 0..=n_upper {
                term = term.mul(self.binomials[k as usize]);
            }
            sum = sum.add(term);
        }
        let value = sum.scale(p as f64 / order as f64);
        let spacing = (p as f64).powi(n_upper as i32 + 1);
        let scaled = value.scale(spacing);
        if scaled.err >= 0.5 || scaled.z.im.abs() > scaled.err + 0.5 {
            return Err(Error::Precision { bound: scaled.err });
        }
        let numerator = scaled.z.re.round();
        if (scaled.z.re - numerator).abs() > scaled.err {
            return Err(Error::Precision { bound: (scaled.z.re - numerator).abs() });
        }
        let numerator = BigInt::from(numerator.to_i64().ok_or(Error::Precision { bound: f64::INFINITY })?);
        Ok(HypValue::new(p, numerator, n_upper + 1))
    }
}

/// Greene's `{n+1}F_n(x)` at a single point.
pub fn hyp_greene(p: u64, n_upper: u32, x: u64) -> Result<HypValue> {
    GreeneEvaluator::new(p)?.evaluate(n_upper, x)
}

/// `ω(x) = x^{p^{n-1}} mod p^n`.
pub fn teichmuller(x: u64, p: u64, n: u32) -> Result<ResidueClass> {
    require_odd_prime(p)?;
    if n < 1 || x >= p {
        return Err(Error::InvalidArgument(format!("need 0 <= x < p and n >= 1, got x = {x}, n = {n}")));
    }
    let modulus = p.checked_pow(n).filter(|&m| m < 1 << 62).ok_or_else(|| Error::InvalidArgument("p^n too large".into()))?;
    let exp = p.pow(n - 1);
    Ok(ResidueClass::new(pow_mod(x, exp, modulus) as i128, modulus))
}

/// `(p+1) Σ_{j<=m} C(m,j) C(m+j,j) (-1)^j (1 + 2jp (H_{m+j} - H_j)) ω(λ)^j mod p^2`, `m = (p-1)/2`.
pub fn truncated_2f1_mod_p2(p: u64, lambda: u64) -> Result<ResidueClass> {
    require_odd_prime(p)?;
    if p < 5 {
        return Err(Error::InvalidArgument("needs p >= 5".into()));
    }
    let lambda = lambda % p;
    if lambda == 0 {
        return Err(Error::InvalidArgument("λ = 0".into()));
    }
    let m = (p - 1) / 2;
    let p2 = p * p;
    let table = BinomialTable::new(p as usize, p2);
    let omega = teichmuller(lambda, p, 2)?;
    let mut total = ResidueClass::zero(p2);
    let mut omega_j = ResidueClass::one(p2);
    for j in 0..=m {
        let w = table.get(m as usize, j as usize) * table.get((m + j) as usize, j as usize);
        let sign = ResidueClass::new(if j % 2 == 0 { 1 } else { -1 }, p2);
        let harmonic = harmonic_range_mod(j, m + j, p2)?;
        let correction = ResidueClass::one(p2) + harmonic * (2 * j * p);
        total = total + w * sign * correction * omega_j;
        omega_j = omega_j * omega;
    }
    Ok(total * (p + 1))
}

/// `-φ(λ) · p · 2F1(1/λ)` from Greene's sum, an integer congruent to the
/// truncated sum mod `p^2`. It equals `φ(-1) a(p, λ)`.
pub fn lr_right_side(eval: &GreeneEvaluator, lambda: u64) -> Result<BigInt> {
    Ok(lr_right_side_literal(eval, lambda)? * legendre(-1, eval.p()))
}

/// `-φ(-λ) · p · 2F1(1/λ)`, which equals `a(p, λ)`. It matches the truncated sum
/// only for `p = 1 mod 4`; for `p = 3 mod 4` the two differ by a sign.
pub fn lr_right_side_literal(eval: &GreeneEvaluator, lambda: u64) -> Result<BigInt> {
    let p = eval.p();
    let inv = crate::arith::inv_mod(lambda % p, p).ok_or_else(|| Error::InvalidArgument("λ = 0".into()))?;
    let value = eval.evaluate(1, inv)?.scale(-(legendre(-(lambda as i64), p) as i64));
    value.times_p().ok_or_else(|| Error::Model(format!("p·2F1 not integral at p = {p}")))
}

/// Outcome of the four identity checks at one `(p, λ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub p: u64,
    pub lambda: u64,
    /// Greene's 2F1 equals the trace formula (`λ ∉ {0, 1}`).
    pub koike: Option<bool>,
    /// `p · 2F1(1) = -φ(-1)` (`λ = 1` only).
    pub special_value: Option<bool>,
    /// `2F1(λ) = φ(λ) 2F1(1/λ)`.
    pub transformation: Option<bool>,
    /// Truncated sum `≡ -φ(λ) p 2F1(1/λ) (mod p^2)` (`p >= 5`).
    pub truncated: Option<bool>,
    /// Truncated sum `≡ -φ(-λ) p 2F1(1/λ) (mod p^2)`; informational, fails for `p = 3 mod 4`.
    pub truncated_literal: Option<bool>,
}

impl IdentityRow {
    pub fn all_pass(&self) -> bool {
        [self.koike, self.special_value, self.transformation, self.truncated].iter().all(|c| c.unwrap_or(true))
    }
}

/// Identity checks for every `λ = 1..p-1`.
pub fn identity_matrix(p: u64) -> Result<Vec<IdentityRow>> {
    let eval = GreeneEvaluator::new(p)?;
    let mut rows = Vec::new();
    for lambda in 1..p {
        let greene = eval.evaluate(1, lambda)?;
        let koike = (lambda != 1).then(|| hyp2f1_exact(p, lambda).map(|e| e == greene)).transpose()?;
        let special_value = (lambda == 1).then(|| greene.times_p() == Some(BigInt::from(-legendre(-1, p))));
        let inv = crate::arith::inv_mod(lambda, p).expect("λ is a unit");
        let transformation = Some(greene == eval.evaluate(1, inv)?.scale(legendre(lambda as i64, p) as i64));
        let (truncated, truncated_literal) = if p >= 5 {
            let lhs = truncated_2f1_mod_p2(p, lambda)?;
            let rhs = ResidueClass::from_big(&lr_right_side(&eval, lambda)?, p * p);
            let literal = ResidueClass::from_big(&lr_right_side_literal(&eval, lambda)?, p * p);
            (Some(lhs == rhs), Some(lhs == literal))
        } else {
            (None, None)
        };
        rows.push(IdentityRow { p, lambda, koike, special_value, transformation, truncated, truncated_literal });
    }
    Ok(rows)
}

/// Every `χ(0) = 0`, so `{n+1}F_n(0)` must round to exactly zero.
pub fn greene_vanishes_at_zero(p: u64, n_upper: u32) -> Result<bool> {
    Ok(hyp_greene(p, n_upper, 0)?.numerator.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_between;

    #[test]
    fn tables() {
        for p in primes_between(3, 100) {
            let t = CharacterTable::build(p).unwrap();
            assert_eq!(t.dlog(t.generator()), Some(1));
            assert_eq!(t.dlog(1), Some(0));
            for x in 1..p {
                assert_eq!(pow_mod(t.generator(), t.dlog(x).unwrap(), p), x);
            }
        }
        assert_eq!(CharacterTable::build(3).unwrap().generator(), 2);
        assert!([2, 3].contains(&CharacterTable::build(5).unwrap().generator()));
        assert!(CharacterTable::build(9).is_err());
    }

    #[test]
    fn orthogonality() {
        assert_eq!(orthogonality_check(5, 0).unwrap(), 4);
        assert_eq!(orthogonality_check(5, 2).unwrap(), 0);
        for k in 1..6 {
            assert_eq!(orthogonality_check(7, k).unwrap(), 0);
        }
    }

    #[test]
    fn orthogonality_numerically() {
        // independent of the symbolic shortcut: sum the roots in floating point
        let p = 13;
        let t = CharacterTable::build(p).unwrap();
        for k in 0..t.order() {
            let s: Complex64 = (1..p)
                .map(|x| {
                    let e = t.exponent(k, x).unwrap() as f64;
                    Complex64::from_polar(1.0, 2.0 * PI * e / t.order() as f64)
                })
                .sum();
            let expected = if k == 0 { 12.0 } else { 0.0 };
            assert!((s - Complex64::new(expected, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn exact_values() {
        assert_eq!(hyp2f1_exact(5, 2).unwrap().to_rational(), BigRational::new(2.into(), 5.into()));
        assert_eq!(hyp2f1_exact(5, 3).unwrap().to_rational(), BigRational::new((-2).into(), 5.into()));
        assert!(hyp2f1_exact(5, 1).is_err());
    }

    #[test]
    fn greene_small_cases() {
        let g = GreeneEvaluator::new(5).unwrap();
        assert_eq!(g.evaluate(1, 2).unwrap(), hyp2f1_exact(5, 2).unwrap());
        assert_eq!(g.evaluate(1, 1).unwrap().to_rational(), BigRational::new((-1).into(), 5.into()));
        // 2F1(2) = φ(2) 2F1(3)
        assert_eq!(g.evaluate(1, 2).unwrap(), g.evaluate(1, 3).unwrap().scale(-1));
        assert!(g.evaluate(0, 2).is_err());
        assert!(g.evaluate(5, 2).is_err());
    }

    #[test]
    fn greene_higher_orders_round() {
        for p in [5, 7, 11, 13] {
            let g = GreeneEvaluator::new(p).unwrap();
            for n in 1..=4 {
                for x in 0..p {
                    g.evaluate(n, x).unwrap();
                }
            }
            assert!(greene_vanishes_at_zero(p, 3).unwrap());
        }
    }

    #[test]
    fn teichmuller_values() {
        assert_eq!(teichmuller(0, 5, 2).unwrap().value(), 0);
        assert_eq!(teichmuller(1, 5, 2).unwrap().value(), 1);
        assert_eq!(teichmuller(2, 5, 2).unwrap().value(), 7);
        for p in primes_between(3, 100) {
            for x in 0..p {
                let w = teichmuller(x, p, 2).unwrap();
                assert_eq!(w.pow(p), w);
                assert_eq!(w.value() % p, x);
            }
        }
        assert!(teichmuller(5, 5, 2).is_err());
    }

    #[test]
    fn literal_sign_only_for_one_mod_four() {
        for p in [5, 7, 11, 13] {
            let rows = identity_matrix(p).unwrap();
            let literal_ok = rows.iter().all(|r| r.truncated_literal == Some(true));
            assert_eq!(literal_ok, p % 4 == 1, "p = {p}");
        }
    }

    #[test]
    fn right_side_is_the_trace() {
        let g = GreeneEvaluator::new(11).unwrap();
        for lambda in 2..11 {
            let a = BigInt::from(legendre_trace(11, lambda).unwrap());
            assert_eq!(lr_right_side_literal(&g, lambda).unwrap(), a);
        }
    }

    #[test]
    fn truncated_sum_examples() {
        assert_eq!(truncated_2f1_mod_p2(5, 1).unwrap().value(), 1);
        let g = GreeneEvaluator::new(5).unwrap();
        let rhs = lr_right_side(&g, 2).unwrap();
        assert_eq!(truncated_2f1_mod_p2(5, 2).unwrap(), ResidueClass::from_big(&rhs, 25));
        assert!(truncated_2f1_mod_p2(5, 0).is_err());
    }

    #[test]
    fn identities_below_30() {
        for p in primes_between(3, 30) {
            for row in identity_matrix(p).unwrap() {
                assert!(row.all_pass(), "{row:?}");
            }
        }
    }
}
