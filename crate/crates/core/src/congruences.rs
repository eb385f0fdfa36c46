//! Verification harness for the supercongruences: every statement is a named
//! entry in a registry, run over a parameter range, and reports one case per
//! parameter tuple with both residues and the modulus.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, primes_between, require_odd_prime, BinomialTable, ResidueClass};
use crate::catalog::Catalog;
use crate::configurations::{enumerate_convergent, Configuration};
use crate::ctengine::{backend, leading_coefficients_with, DEFAULT_BACKEND};
use crate::error::{Error, Result};
use crate::modforms::{gamma_cm, gamma_eta12_pointcount, CoefficientSource, EtaSource, Newform};
use crate::sequences::{a_sigma8, apery_a, apery_b, lemma_suite, Outcome};

/// Parameters of one case; absent fields do not apply to the statement.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CaseParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
}

/// One comparison `lhs ≡ rhs (mod modulus)`; residues are reduced and written
/// as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCase {
    pub id: String,
    pub params: CaseParams,
    pub lhs: String,
    pub rhs: String,
    pub modulus: String,
    pub pass: bool,
}

impl CongruenceCase {
    pub fn compare(id: &str, params: CaseParams, lhs: &BigInt, rhs: &BigInt, modulus: &BigInt) -> Self {
        let l = lhs.mod_floor(modulus);
        let r = rhs.mod_floor(modulus);
        CongruenceCase {
            id: id.to_string(),
            params,
            pass: l == r,
            lhs: l.to_string(),
            rhs: r.to_string(),
            modulus: modulus.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub statement: String,
    pub cases: Vec<CongruenceCase>,
    pub passed: usize,
    pub failed: usize,
}

impl CongruenceReport {
    fn restricted_to(self, primes: &[u64]) -> Self {
        let cases = self.cases.into_iter().filter(|c| primes.contains(&c.params.p)).collect();
        CongruenceReport::new(&self.statement, cases)
    }

    pub fn new(statement: &str, mut cases: Vec<CongruenceCase>) -> Self {
        cases.sort_by(|a, b| a.params.cmp(&b.params));
        let passed = cases.iter().filter(|c| c.pass).count();
        CongruenceReport { statement: statement.to_string(), failed: cases.len() - passed, passed, cases }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CongruenceCase> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// One JSON object per line, in case order.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for case in &self.cases {
            out.push_str(&serde_json::to_string(case)?);
            out.push('\n');
        }
        Ok(out)
    }
}

fn big(x: impl Into<BigInt>) -> BigInt {
    x.into()
}

fn p_squared(p: u64) -> BigInt {
    big(p) * big(p)
}

/// `a((p-1)/2)^l ≡ γ_{2l+1}(p) (mod p^2)` for primes `5 <= p <= p_max`.
pub fn verify_thm1(l: u32, p_max: u64) -> Result<CongruenceReport> {
    if l < 1 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    let cases = primes_between(5, p_max)
        .into_par_iter()
        .map(|p| {
            let lhs = BigInt::from(apery_a((p - 1) / 2)).pow(l);
            let rhs = gamma_cm(2 * l + 1, p)?;
            Ok(CongruenceCase::compare("THM1", CaseParams { l: Some(l), p, ..Default::default() }, &lhs, &rhs, &p_squared(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CongruenceReport::new("THM1", cases))
}

/// `Σ_{k1+k2=k3+k4, k_i <= m} Π C(m,k_i) C(m+k_i,k_i) mod p^2` with `m = (p-1)/2`,
/// by a direct loop over `(k1, k2, k3)`.
pub fn n8p2_sum_mod_p2(p: u64) -> ResidueClass {
    let m = ((p - 1) / 2) as usize;
    let p2 = p * p;
    let table = BinomialTable::new(2 * m, p2);
    let w: Vec<ResidueClass> = (0..=m).map(|k| table.get(m, k) * table.get(m + k, k)).collect();
    let mut total = ResidueClass::zero(p2);
    for k1 in 0..=m {
        for k2 in 0..=m {
            for k3 in 0..=m {
                let Some(k4) = (k1 + k2).checked_sub(k3).filter(|&k4| k4 <= m) else { continue };
                total = total + w[k1] * w[k2] * w[k3] * w[k4];
            }
        }
    }
    total
}

/// The `n8p2` sum against the point-count coefficient of `η(2z)^12`, odd `p <= p_max`.
pub fn verify_thm2(p_max: u64) -> Result<CongruenceReport> {
    let cases = primes_between(3, p_max)
        .into_par_iter()
        .map(|p| {
            let lhs = n8p2_sum_mod_p2(p);
            // with n = (p-1)/2 the half-range sum is the full leading coefficient
            let closed = ResidueClass::from_biguint(&a_sigma8((p - 1) / 2), p * p);
            assert_eq!(lhs, closed, "n8p2 sum and a_sigma8 disagree at p = {p}");
            let rhs = gamma_eta12_pointcount(p)?;
            Ok(CongruenceCase::compare("THM2", CaseParams { p, ..Default::default() }, &big(lhs.value()), &rhs, &p_squared(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CongruenceReport::new("THM2", cases))
}

fn eta_report(id: &str, form: Newform, lo: u64, p_max: u64, seq: fn(u64) -> BigUint) -> Result<CongruenceReport> {
    let source = EtaSource::new(form);
    source.prepare(p_max as usize)?;
    let cases = primes_between(lo, p_max)
        .into_iter()
        .map(|p| {
            let lhs = BigInt::from(seq((p - 1) / 2));
            let rhs = source.coefficient(p)?;
            Ok(CongruenceCase::compare(id, CaseParams { p, ..Default::default() }, &lhs, &rhs, &p_squared(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CongruenceReport::new(id, cases))
}

/// `a((p-1)/2) ≡ α(p) (mod p^2)`, `α` from `η(4z)^6`, primes `5 <= p <= p_max`.
pub fn verify_ahlgren(p_max: u64) -> Result<CongruenceReport> {
    eta_report("AHLGREN", Newform::Eta6At4, 5, p_max, apery_a)
}

/// `b((p-1)/2) ≡ β(p) (mod p^2)`, `β` from `η(2z)^4 η(4z)^4`, odd `p <= p_max`.
pub fn verify_beukers(p_max: u64) -> Result<CongruenceReport> {
    eta_report("BEUKERS", Newform::Eta4At2Eta4At4, 3, p_max, apery_b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AperySequence {
    A,
    B,
}

impl AperySequence {
    fn eval(self, n: u64) -> BigUint {
        match self {
            AperySequence::A => apery_a(n),
            AperySequence::B => apery_b(n),
        }
    }

    fn id(self) -> &'static str {
        match self {
            AperySequence::A => "COSTER_A",
            AperySequence::B => "COSTER_B",
        }
    }
}

fn check_coster_params(p: u64, m: u64, r: u32) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m < 1 || r < 1 {
        return Err(Error::InvalidArgument(format!("need m, r >= 1, got m = {m}, r = {r}")));
    }
    Ok(())
}

/// `s(m p^r) ≡ s(m p^{r-1}) (mod p^{3r})`.
pub fn verify_coster(which: AperySequence, p: u64, m: u64, r: u32) -> Result<CongruenceCase> {
    check_coster_params(p, m, r)?;
    let hi = m * p.pow(r);
    let lo = m * p.pow(r - 1);
    let modulus = big(p).pow(3 * r);
    let params = CaseParams { p, m: Some(m), r: Some(r), ..Default::default() };
    Ok(CongruenceCase::compare(which.id(), params, &which.eval(hi).into(), &which.eval(lo).into(), &modulus))
}

/// `A_σ(m p^r) ≡ A_σ(m p^{r-1}) (mod p^{3r})` with `A_σ` from the constant-term engine.
pub fn verify_conjecture1(c: &Configuration, p: u64, m: u64, r: u32, catalog: Option<&Catalog>) -> Result<CongruenceCase> {
    check_coster_params(p, m, r)?;
    let hi = m * p.pow(r);
    let lo = m * p.pow(r - 1);
    let engine = backend(DEFAULT_BACKEND)?;
    let record = leading_coefficients_with(c, u32::try_from(hi).map_err(|_| Error::InvalidArgument("n too large".into()))?, catalog, engine.as_ref())?;
    let modulus = big(p).pow(3 * r);
    let params = CaseParams { config: Some(record.config.key()), p, m: Some(m), r: Some(r), ..Default::default() };
    Ok(CongruenceCase::compare("CONJ1", params, &record.terms[hi as usize], &record.terms[lo as usize], &modulus))
}

/// Each lemma check at every odd prime `p <= p_max`; skipped checks are omitted.
pub fn verify_lemmas(p_max: u64) -> Result<CongruenceReport> {
    verify_lemmas_at(&primes_between(3, p_max))
}

pub fn verify_lemmas_at(primes: &[u64]) -> Result<CongruenceReport> {
    let mut cases = Vec::new();
    for &p in primes {
        for check in lemma_suite(p)?.checks {
            if check.outcome == Outcome::Skipped {
                continue;
            }
            let pass = check.outcome == Outcome::Pass;
            cases.push(CongruenceCase {
                id: "LEMMA".into(),
                params: CaseParams { p, check: Some(check.id), ..Default::default() },
                lhs: String::new(),
                rhs: String::new(),
                modulus: String::new(),
                pass,
            });
        }
    }
    Ok(CongruenceReport::new("LEMMAS", cases))
}

/// Ranges for a registry run. Unset lists fall back to each statement's default.
#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub p_max: u64,
    /// Explicit primes, overriding `p_max` where a statement takes a prime list.
    pub primes: Option<Vec<u64>>,
    pub l: Vec<u32>,
    pub m: Vec<u64>,
    pub r: Vec<u32>,
    /// Point counts whose convergent configurations `conj1` covers.
    pub n_points: Vec<usize>,
    pub catalog: Option<Catalog>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { p_max: 100, primes: None, l: vec![1, 2, 3, 4], m: vec![1], r: vec![1], n_points: vec![5, 6, 7, 8], catalog: None }
    }
}

impl VerifyParams {
    fn primes_from(&self, lo: u64) -> Result<Vec<u64>> {
        match &self.primes {
            Some(ps) => {
                for &p in ps {
                    require_odd_prime(p)?;
                }
                Ok(ps.iter().copied().filter(|&p| p >= lo).collect())
            }
            None => Ok(primes_between(lo, self.p_max)),
        }
    }
}

pub trait Statement: Send + Sync {
    fn id(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport>;
}

struct Thm1;
struct Thm2;
struct Ahlgren;
struct Beukers;
struct Coster(AperySequence);
struct Conj1;
struct Lemmas;

impl Statement for Thm1 {
    fn id(&self) -> &'static str {
        "thm1"
    }
    fn summary(&self) -> &'static str {
        "a((p-1)/2)^l = gamma_{2l+1}(p) mod p^2"
    }
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport> {
        let primes = params.primes_from(5)?;
        let hi = primes.iter().copied().max().unwrap_or(0);
        let mut cases = Vec::new();
        for &l in &params.l {
            cases.extend(verify_thm1(l, hi)?.restricted_to(&primes).cases);
        }
        Ok(CongruenceReport::new("THM1", cases))
    }
}

impl Statement for Thm2 {
    fn id(&self) -> &'static str {
        "thm2"
    }
    fn summary(&self) -> &'static str {
        "sigma_8 half-range sum = gamma(p) of eta(2z)^12 mod p^2"
    }
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport> {
        let primes = params.primes_from(3)?;
        Ok(verify_thm2(primes.iter().copied().max().unwrap_or(0))?.restricted_to(&primes))
    }
}

impl Statement for Ahlgren {
    fn id(&self) -> &'static str {
        "ahlgren"
    }
    fn summary(&self) -> &'static str {
        "a((p-1)/2) = coefficient of eta(4z)^6 mod p^2"
    }
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport> {
        let primes = params.primes_from(5)?;
        Ok(verify_ahlgren(primes.iter().copied().max().unwrap_or(0))?.restricted_to(&primes))
    }
}

impl Statement for Beukers {
    fn id(&self) -> &'static str {
        "beukers"
    }
    fn summary(&self) -> &'static str {
        "b((p-1)/2) = coefficient of eta(2z)^4 eta(4z)^4 mod p^2"
    }
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport> {
        let primes = params.primes_from(3)?;
        Ok(verify_beukers(primes.iter().copied().max().unwrap_or(0))?.restricted_to(&primes))
    }
}

impl Statement for Coster {
    fn id(&self) -> &'static str {
        match self.0 {
            AperySequence::A => "coster_a",
            AperySequence::B => "coster_b",
        }
    }
    fn summary(&self) -> &'static str {
        "s(m p^r) = s(m p^(r-1)) mod p^(3r) for the Apery numbers"
    }
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport> {
        let mut cases = Vec::new();
        for p in params.primes_from(5)? {
            for &m in &params.m {
                for &r in &params.r {
                    cases.push(verify_coster(self.0, p, m, r)?);
                }
            }
        }
        Ok(CongruenceReport::new(self.0.id(), cases))
    }
}

impl Statement for Conj1 {
    fn id(&self) -> &'static str {
        "conj1"
    }
    fn summary(&self) -> &'static str {
        "A(m p^r) = A(m p^(r-1)) mod p^(3r) for convergent configurations (evidence only)"
    }
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport> {
        let mut cases = Vec::new();
        for &n in &params.n_points {
            for c in enumerate_convergent(n)?.configurations {
                for p in params.primes_from(5)? {
                    for &m in &params.m {
                        for &r in &params.r {
                            cases.push(verify_conjecture1(&c, p, m, r, params.catalog.as_ref())?);
                        }
                    }
                }
            }
        }
        Ok(CongruenceReport::new("CONJ1", cases))
    }
}

impl Statement for Lemmas {
    fn id(&self) -> &'static str {
        "lemmas"
    }
    fn summary(&self) -> &'static str {
        "elementary binomial, harmonic and rising-factorial congruences"
    }
    fn run(&self, params: &VerifyParams) -> Result<CongruenceReport> {
        verify_lemmas_at(&params.primes_from(3)?)
    }
}

/// Every statement, keyed by id.
pub fn statements() -> BTreeMap<&'static str, Box<dyn Statement>> {
    let all: Vec<Box<dyn Statement>> = vec![
        Box::new(Thm1),
        Box::new(Thm2),
        Box::new(Ahlgren),
        Box::new(Beukers),
        Box::new(Coster(AperySequence::A)),
        Box::new(Coster(AperySequence::B)),
        Box::new(Conj1),
        Box::new(Lemmas),
    ];
    all.into_iter().map(|s| (s.id(), s)).collect()
}

pub fn statement(id: &str) -> Result<Box<dyn Statement>> {
    statements()
        .remove(id.to_ascii_lowercase().as_str())
        .ok_or_else(|| Error::UnknownStrategy { kind: "statement", name: id.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_for(report: &CongruenceReport, p: u64) -> &CongruenceCase {
        report.cases.iter().find(|c| c.params.p == p).unwrap()
    }

    #[test]
    fn thm1_examples() {
        let r = verify_thm1(1, 7).unwrap();
        let c5 = case_for(&r, 5);
        assert_eq!((c5.lhs.as_str(), c5.rhs.as_str(), c5.pass), ("19", "19", true));
        assert!(case_for(&r, 7).pass);
        assert_eq!(case_for(&r, 7).lhs, "0");
        let r2 = verify_thm1(2, 5).unwrap();
        assert_eq!(case_for(&r2, 5).rhs, "11");
        assert!(verify_thm1(0, 10).is_err());
    }

    #[test]
    fn thm2_examples() {
        let r = verify_thm2(7).unwrap();
        assert_eq!(case_for(&r, 3).lhs, "6");
        assert_eq!(case_for(&r, 3).rhs, "6");
        assert_eq!(case_for(&r, 5).lhs, "4");
        assert!(r.all_pass());
        assert_eq!(r.cases.len(), 3);
    }

    #[test]
    fn n8p2_direct_loop_independent_of_grouping() {
        for p in [3u64, 5, 7, 11] {
            let m = (p - 1) / 2;
            let weights: Vec<BigUint> = (0..=m)
                .map(|k| crate::arith::binomial(m, k) * crate::arith::binomial(m + k, k))
                .collect();
            let len = weights.len();
            let mut exact = BigUint::from(0u32);
            for a in 0..len {
                for b in 0..len {
                    for c in 0..len {
                        if let Some(d) = (a + b).checked_sub(c).filter(|&d| d < len) {
                            exact += &weights[a] * &weights[b] * &weights[c] * &weights[d];
                        }
                    }
                }
            }
            assert_eq!(exact, a_sigma8(m));
            assert_eq!(n8p2_sum_mod_p2(p), ResidueClass::from_biguint(&exact, p * p));
        }
    }

    #[test]
    fn ahlgren_beukers_examples() {
        let a = verify_ahlgren(13).unwrap();
        assert_eq!(case_for(&a, 5).lhs, "19");
        assert!(a.all_pass());
        let b = verify_beukers(13).unwrap();
        assert!(case_for(&b, 3).pass);
        assert_eq!(case_for(&b, 3).lhs, "5");
        assert_eq!(case_for(&b, 5).lhs, "23");
        assert!(b.all_pass());
    }

    #[test]
    fn coster_examples() {
        assert!(verify_coster(AperySequence::A, 5, 1, 1).unwrap().pass);
        assert!(verify_coster(AperySequence::B, 5, 1, 1).unwrap().pass);
        let deep = verify_coster(AperySequence::A, 5, 1, 2).unwrap();
        assert!(deep.pass);
        assert_eq!(deep.modulus, "15625");
        assert!(verify_coster(AperySequence::A, 3, 1, 1).is_err());
        assert!(verify_coster(AperySequence::A, 5, 1, 0).is_err());
    }

    #[test]
    fn conjecture_examples() {
        let dir = tempfile::tempdir().unwrap();
        let cat = Catalog::in_dir(dir.path());
        let s8: Configuration = "8,3,6,1,4,7,2,5".parse().unwrap();
        let s7: Configuration = "1,3,7,5,2,6,4".parse().unwrap();
        let case = verify_conjecture1(&s8, 5, 1, 1, Some(&cat)).unwrap();
        assert!(case.pass);
        let expected = BigInt::from(a_sigma8(5)).mod_floor(&big(125));
        assert_eq!(case.lhs, expected.to_string());
        assert!(verify_conjecture1(&s7, 5, 1, 1, None).unwrap().pass);
        assert!(verify_conjecture1(&s8, 5, 1, 0, None).is_err());
        // the catalog now holds A(0..=5)
        assert_eq!(cat.cached_terms(&s8).unwrap().len(), 6);
    }

    #[test]
    fn registry_dispatch() {
        let ids: Vec<&str> = statements().keys().copied().collect();
        assert_eq!(ids, vec!["ahlgren", "beukers", "conj1", "coster_a", "coster_b", "lemmas", "thm1", "thm2"]);
        let params = VerifyParams { p_max: 30, ..Default::default() };
        for (id, s) in statements() {
            if id == "conj1" {
                continue;
            }
            let report = s.run(&params).unwrap();
            assert!(report.all_pass(), "{id}: {:?}", report.failures().collect::<Vec<_>>());
            assert!(!report.cases.is_empty(), "{id}");
        }
        let conj = statement("CONJ1").unwrap();
        let params = VerifyParams { primes: Some(vec![5]), n_points: vec![7], ..Default::default() };
        let report = conj.run(&params).unwrap();
        assert_eq!(report.cases.len(), 5);
        assert!(report.all_pass());
        assert!(statement("thm9").is_err());
    }

    #[test]
    fn json_lines_round_trip() {
        let report = verify_thm1(1, 13).unwrap();
        let text = report.to_json_lines().unwrap();
        let back: Vec<CongruenceCase> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(back, report.cases);
        assert_eq!(report.to_json_lines().unwrap(), text);
    }
}
