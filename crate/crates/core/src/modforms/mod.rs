//! Fourier coefficients at primes of three newforms, each from more than one
//! source: the CM closed form in `x + iy` with `p = x^2 + y^2`, eta-quotient
//! q-expansions, and point counts on the Legendre family `y^2 = x(x-1)(x-λ)`.

mod eta;

pub use eta::{eta_qexp, CoefficientSeries, EtaProductSpec};

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, is_prime, legendre, require_odd_prime};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSquares {
    pub p: u64,
    pub x: u64,
    pub y: u64,
}

/// The decomposition `p = x^2 + y^2` with `x` odd, `y` even, both positive.
pub fn two_squares(p: u64) -> Result<TwoSquares> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 4 != 1 {
        return Err(Error::InvalidArgument(format!("{p} is not 1 mod 4")));
    }
    let mut x = 1u64;
    while x * x < p {
        let rest = p - x * x;
        let y = rest.isqrt();
        if y * y == rest {
            return Ok(TwoSquares { p, x, y });
        }
        x += 2;
    }
    unreachable!("Fermat: every prime 1 mod 4 is a sum of two squares")
}

/// `(x + iy)^e` over the Gaussian integers.
fn gaussian_pow(x: &BigInt, y: &BigInt, e: u32) -> (BigInt, BigInt) {
    let (mut re, mut im) = (BigInt::one(), BigInt::zero());
    let (mut bre, mut bim) = (x.clone(), y.clone());
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            (re, im) = (&re * &bre - &im * &bim, &re * &bim + &im * &bre);
        }
        e >>= 1;
        if e > 0 {
            (bre, bim) = (&bre * &bre - &bim * &bim, BigInt::from(2) * &bre * &bim);
        }
    }
    (re, im)
}

/// `(-1)^{(x+y-1)(k-1)/2} [(x+iy)^{k-1} + (x-iy)^{k-1}]` for any signed `x` odd, `y` even.
pub fn gamma_cm_from(k: u32, x: i64, y: i64) -> BigInt {
    let (re, _) = gaussian_pow(&BigInt::from(x), &BigInt::from(y), k - 1);
    let exponent = ((x + y - 1) / 2).rem_euclid(2) * ((k as i64 - 1) % 2);
    let value: BigInt = re * 2;
    if exponent == 1 {
        -value
    } else {
        value
    }
}

/// Coefficient at `p` of the weight-`k` CM newform attached to `Q(i)`.
pub fn gamma_cm(k: u32, p: u64) -> Result<BigInt> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("weight {k} < 2")));
    }
    require_odd_prime(p)?;
    if p % 4 == 3 {
        return Ok(BigInt::zero());
    }
    let TwoSquares { x, y, .. } = two_squares(p)?;
    Ok(gamma_cm_from(k, x as i64, y as i64))
}

/// Checks `γ_k(p)^m = Σ_{t <= (m-1)/2} C(m,t) p^{t(k-1)} γ_{(m-2t)(k-1)+1}(p)`
/// plus `C(m, m/2) p^{m(k-1)/2}` when `p = 1 mod 4` and `m` is even.
pub fn gamma_cm_power_identity(k: u32, m: u32, p: u64) -> Result<bool> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let lhs = gamma_cm(k, p)?.pow(m);
    let pk = BigInt::from(p).pow(k - 1);
    let mut rhs = BigInt::zero();
    for t in 0..=(m - 1) / 2 {
        let c = BigInt::from(binomial(m as u64, t as u64));
        rhs += c * pk.pow(t) * gamma_cm((m - 2 * t) * (k - 1) + 1, p)?;
    }
    if p % 4 == 1 && m % 2 == 0 {
        rhs += BigInt::from(binomial(m as u64, m as u64 / 2)) * pk.pow(m / 2);
    }
    Ok(lhs == rhs)
}

/// `a(p, λ) = p + 1 - #E_λ(F_p)` for `E_λ: y^2 = x(x-1)(x-λ)`.
pub fn legendre_trace(p: u64, lambda: u64) -> Result<i64> {
    require_odd_prime(p)?;
    let lambda = lambda % p;
    if lambda <= 1 {
        return Err(Error::InvalidArgument(format!("λ = {lambda} is degenerate")));
    }
    let pi = p as i128;
    let mut s = 0i64;
    for x in 0..p as i128 {
        let v = (x * (x - 1)).rem_euclid(pi) * (x - lambda as i128).rem_euclid(pi) % pi;
        s += legendre(v as i64, p) as i64;
    }
    let a = -s;
    assert!((a * a) as u64 <= 4 * p, "Hasse bound violated: a({p}, {lambda}) = {a}");
    Ok(a)
}

/// Coefficient at `p` of `η(2z)^12`: `2p^3 - 4p^2 - 9p - 3 - Σ_λ a(p, λ)^4`.
pub fn gamma_eta12_pointcount(p: u64) -> Result<BigInt> {
    require_odd_prime(p)?;
    let p_big = BigInt::from(p);
    let mut value = BigInt::from(2) * p_big.pow(3) - BigInt::from(4) * p_big.pow(2) - BigInt::from(9) * &p_big - 3;
    for lambda in 2..p {
        value -= BigInt::from(legendre_trace(p, lambda)?).pow(4);
    }
    Ok(value)
}

/// `Σ_{λ=2}^{p-1} a(p, λ)^2`.
pub fn legendre_trace_square_sum(p: u64) -> Result<i64> {
    (2..p).map(|l| legendre_trace(p, l).map(|a| a * a)).sum()
}

/// The newforms whose prime coefficients the sources produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Newform {
    /// `η(4z)^6`.
    Eta6At4,
    /// `η(2z)^4 η(4z)^4`.
    Eta4At2Eta4At4,
    /// `η(2z)^12`.
    Eta12At2,
}

impl Newform {
    pub fn eta_spec(self) -> EtaProductSpec {
        match self {
            Newform::Eta6At4 => EtaProductSpec::eta6_4z(),
            Newform::Eta4At2Eta4At4 => EtaProductSpec::eta4_2z_eta4_4z(),
            Newform::Eta12At2 => EtaProductSpec::eta12_2z(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Newform::Eta6At4 => "eta6_4z",
            Newform::Eta4At2Eta4At4 => "eta4_2z_eta4_4z",
            Newform::Eta12At2 => "eta12_2z",
        }
    }
}

/// One way of computing a newform's coefficient at an odd prime.
pub trait CoefficientSource: Send + Sync {
    fn name(&self) -> &'static str;
    fn form(&self) -> Newform;
    fn coefficient(&self, p: u64) -> Result<BigInt>;
}

/// Closed form for `η(4z)^6 = f_3`.
pub struct CmSource;

impl CoefficientSource for CmSource {
    fn name(&self) -> &'static str {
        "cm"
    }
    fn form(&self) -> Newform {
        Newform::Eta6At4
    }
    fn coefficient(&self, p: u64) -> Result<BigInt> {
        gamma_cm(3, p)
    }
}

/// Point-count formula for `η(2z)^12`.
pub struct PointCountSource;

impl CoefficientSource for PointCountSource {
    fn name(&self) -> &'static str {
        "pointcount"
    }
    fn form(&self) -> Newform {
        Newform::Eta12At2
    }
    fn coefficient(&self, p: u64) -> Result<BigInt> {
        gamma_eta12_pointcount(p)
    }
}

/// q-expansion of the eta quotient, extended on demand and memoized.
pub struct EtaSource {
    form: Newform,
    series: Mutex<Vec<BigInt>>,
}

impl EtaSource {
    pub fn new(form: Newform) -> Self {
        EtaSource { form, series: Mutex::new(Vec::new()) }
    }

    /// Make the memoized expansion cover `q^{n_max}`.
    pub fn prepare(&self, n_max: usize) -> Result<()> {
        let mut series = self.series.lock().expect("eta cache poisoned");
        if series.len() <= n_max {
            // grow geometrically so repeated single lookups stay cheap
            let target = n_max.max(2 * series.len()).max(64);
            *series = eta_qexp(&self.form.eta_spec(), target)?.coefficients;
        }
        Ok(())
    }
}

impl CoefficientSource for EtaSource {
    fn name(&self) -> &'static str {
        "eta"
    }
    fn form(&self) -> Newform {
        self.form
    }
    fn coefficient(&self, p: u64) -> Result<BigInt> {
        require_odd_prime(p)?;
        self.prepare(p as usize)?;
        Ok(self.series.lock().expect("eta cache poisoned")[p as usize].clone())
    }
}

/// All sources, in a fixed order.
pub fn coefficient_sources() -> Vec<Box<dyn CoefficientSource>> {
    vec![
        Box::new(CmSource),
        Box::new(EtaSource::new(Newform::Eta6At4)),
        Box::new(EtaSource::new(Newform::Eta4At2Eta4At4)),
        Box::new(EtaSource::new(Newform::Eta12At2)),
        Box::new(PointCountSource),
    ]
}

/// Look a source up by `"<form>/<name>"`, e.g. `"eta12_2z/pointcount"`.
pub fn coefficient_source(key: &str) -> Result<Box<dyn CoefficientSource>> {
    coefficient_sources()
        .into_iter()
        .find(|s| format!("{}/{}", s.form().label(), s.name()) == key)
        .ok_or_else(|| Error::UnknownStrategy { kind: "coefficient source", name: key.to_string() })
}

/// Sources for one form.
pub fn sources_for(form: Newform) -> Vec<Box<dyn CoefficientSource>> {
    coefficient_sources().into_iter().filter(|s| s.form() == form).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceRow {
    pub p: u64,
    pub form: Newform,
    pub values: Vec<(&'static str, BigInt)>,
}

impl SourceRow {
    pub fn agree(&self) -> bool {
        self.values.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

/// Every source's coefficient at every odd prime below `pmax`, grouped by form.
pub fn source_table(pmax: u64) -> Result<Vec<SourceRow>> {
    let sources = coefficient_sources();
    let mut rows = Vec::new();
    for form in [Newform::Eta6At4, Newform::Eta4At2Eta4At4, Newform::Eta12At2] {
        for p in crate::arith::primes_between(3, pmax.saturating_sub(1)) {
            let values = sources
                .iter()
                .filter(|s| s.form() == form)
                .map(|s| s.coefficient(p).map(|v| (s.name(), v)))
                .collect::<Result<Vec<_>>>()?;
            rows.push(SourceRow { p, form, values });
        }
    }
    Ok(rows)
}

/// `|γ|` is at most `2 p^{(k-1)/2}`; used as a cheap sanity bound.
pub fn within_deligne_bound(gamma: &BigInt, k: u32, p: u64) -> bool {
    let lhs = gamma.abs().pow(2);
    let rhs = BigInt::from(4) * BigInt::from(p).pow(k - 1);
    lhs <= rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_between;

    /// `#{(x, y) in F_p^2 : y^2 = x(x-1)(x-λ)} + 1` by listing all pairs.
    fn points_by_enumeration(p: u64, lambda: u64) -> u64 {
        let mut count = 1;
        for x in 0..p {
            let rhs = x * ((x + p - 1) % p) % p * ((x + p - lambda) % p) % p;
            count += (0..p).filter(|y| y * y % p == rhs).count() as u64;
        }
        count
    }

    #[test]
    fn two_squares_examples() {
        assert_eq!(two_squares(5).unwrap(), TwoSquares { p: 5, x: 1, y: 2 });
        assert_eq!(two_squares(13).unwrap(), TwoSquares { p: 13, x: 3, y: 2 });
        assert!(two_squares(7).is_err());
        assert!(two_squares(25).is_err());
        for p in primes_between(3, 1000).into_iter().filter(|p| p % 4 == 1) {
            let t = two_squares(p).unwrap();
            assert_eq!(t.x * t.x + t.y * t.y, p);
            assert!(t.x % 2 == 1 && t.y % 2 == 0);
        }
    }

    #[test]
    fn gamma_cm_examples() {
        assert_eq!(gamma_cm(3, 5).unwrap(), BigInt::from(-6));
        assert_eq!(gamma_cm(5, 5).unwrap(), BigInt::from(-14));
        for k in 2..9 {
            assert!(gamma_cm(k, 7).unwrap().is_zero());
        }
        assert!(gamma_cm(1, 5).is_err());
        assert!(gamma_cm(3, 9).is_err());
    }

    #[test]
    fn gamma_cm_sign_choices_agree() {
        for p in primes_between(5, 199).into_iter().filter(|p| p % 4 == 1) {
            let t = two_squares(p).unwrap();
            let (x, y) = (t.x as i64, t.y as i64);
            for k in 2..=8 {
                let v = gamma_cm_from(k, x, y);
                assert_eq!(gamma_cm_from(k, -x, y), v, "p = {p}, k = {k}");
                assert_eq!(gamma_cm_from(k, x, -y), v, "p = {p}, k = {k}");
                assert_eq!(gamma_cm_from(k, -x, -y), v, "p = {p}, k = {k}");
                assert!(within_deligne_bound(&v, k, p));
            }
        }
    }

    #[test]
    fn power_identity() {
        assert!(gamma_cm_power_identity(3, 2, 5).unwrap());
        assert!(gamma_cm_power_identity(3, 3, 7).unwrap());
        for p in primes_between(3, 99) {
            for m in 1..=4 {
                assert!(gamma_cm_power_identity(3, m, p).unwrap(), "p = {p}, m = {m}");
            }
            assert!(gamma_cm_power_identity(4, 3, p).unwrap());
        }
    }

    #[test]
    fn legendre_trace_examples() {
        assert_eq!(legendre_trace(5, 2).unwrap(), -2);
        assert_eq!(legendre_trace(5, 3).unwrap(), 2);
        assert_eq!(legendre_trace_square_sum(5).unwrap(), 12);
        assert!(legendre_trace(5, 1).is_err());
        assert!(legendre_trace(5, 0).is_err());
        for p in primes_between(3, 40) {
            for lambda in 2..p {
                let a = legendre_trace(p, lambda).unwrap();
                assert_eq!(a, p as i64 + 1 - points_by_enumeration(p, lambda) as i64);
            }
        }
    }

    #[test]
    fn pointcount_small_primes() {
        assert_eq!(gamma_eta12_pointcount(3).unwrap(), BigInt::from(-12));
        assert_eq!(gamma_eta12_pointcount(5).unwrap(), BigInt::from(54));
        let series = eta_qexp(&EtaProductSpec::eta12_2z(), 7).unwrap();
        assert_eq!(&gamma_eta12_pointcount(7).unwrap(), series.get(7).unwrap());
    }

    #[test]
    fn sources_agree_below_100() {
        let rows = source_table(100).unwrap();
        for row in &rows {
            assert!(row.agree(), "{row:?}");
        }
        assert!(rows.iter().any(|r| r.form == Newform::Eta6At4 && r.values.len() == 2));
        assert!(rows.iter().any(|r| r.form == Newform::Eta12At2 && r.values.len() == 2));
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(coefficient_source("eta6_4z/cm").unwrap().coefficient(13).unwrap(), BigInt::from(10));
        assert!(coefficient_source("eta6_4z/nothing").is_err());
        assert_eq!(sources_for(Newform::Eta4At2Eta4At4).len(), 1);
    }
}
