//! Dihedral structures, configurations `[id, σ]`, convergence, duality and the
//! partial star multiplication of pairs of dihedral structures.
//!
//! Permutations are one-line sequences over the labels `1..=N`, stored as `u8`.
//! A configuration is the double coset `D σ D` of the dihedral group acting on
//! labels (left) and on positions (right); its canonical representative is the
//! lexicographically least sequence in that coset.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = u8;

pub fn validate_permutation(seq: &[Label]) -> Result<()> {
    let n = seq.len();
    let mut seen = vec![false; n + 1];
    for &v in seq {
        let v = v as usize;
        if v == 0 || v > n || seen[v] {
            return Err(Error::NotAPermutation { n, seq: seq.iter().map(|&x| x as u32).collect() });
        }
        seen[v] = true;
    }
    Ok(())
}

/// Position (0-based) of every label: `inverse[v] = i` iff `seq[i] = v`. Index 0 unused.
pub(crate) fn positions(seq: &[Label]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; seq.len() + 1];
    for (i, &v) in seq.iter().enumerate() {
        pos[v as usize] = i;
    }
    pos
}

pub fn inverse(seq: &[Label]) -> Vec<Label> {
    let mut inv = vec![0; seq.len()];
    for (i, &v) in seq.iter().enumerate() {
        inv[v as usize - 1] = (i + 1) as Label;
    }
    inv
}

pub fn format_sequence(seq: &[Label]) -> String {
    seq.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_sequence(s: &str) -> Result<Vec<Label>> {
    let seq = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']'])
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Label>()
                .map_err(|_| Error::Parse(format!("bad label `{}` in `{s}`", t.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    validate_permutation(&seq)?;
    Ok(seq)
}

/// All `2N` rotations and reflections of a cyclic sequence.
pub fn dihedral_images(seq: &[Label]) -> impl Iterator<Item = Vec<Label>> + '_ {
    let n = seq.len();
    (0..2 * n).map(move |k| {
        let (shift, reflect) = (k % n, k >= n);
        (0..n)
            .map(|i| if reflect { seq[(shift + n - i) % n] } else { seq[(shift + i) % n] })
            .collect()
    })
}

/// Least rotation/reflection of `seq`; it always starts with label 1.
fn least_cyclic_form(seq: &[Label]) -> Vec<Label> {
    let n = seq.len();
    let start = seq.iter().position(|&v| v == 1).unwrap_or(0);
    let forward: Vec<Label> = (0..n).map(|i| seq[(start + i) % n]).collect();
    let backward: Vec<Label> = (0..n).map(|i| seq[(start + n - i) % n]).collect();
    forward.min(backward)
}

/// A cyclic order of `1..=N` up to rotation and reflection.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DihedralStructure {
    order: Vec<Label>,
}

impl DihedralStructure {
    pub fn as_slice(&self) -> &[Label] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Whether `a` and `b` are neighbours in the cyclic order.
    pub fn adjacent(&self, a: Label, b: Label) -> bool {
        let n = self.order.len();
        let Some(i) = self.order.iter().position(|&v| v == a) else { return false };
        self.order[(i + 1) % n] == b || self.order[(i + n - 1) % n] == b
    }

    /// Whether `a, b, c` appear consecutively (in either direction).
    pub fn consecutive(&self, a: Label, b: Label, c: Label) -> bool {
        self.adjacent(a, b) && self.adjacent(b, c) && a != c
    }
}

impl fmt::Display for DihedralStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_sequence(&self.order))
    }
}

pub fn canonical_dihedral(seq: &[Label]) -> Result<DihedralStructure> {
    validate_permutation(seq)?;
    if seq.len() < 3 {
        return Err(Error::TooFewPoints { n: seq.len(), min: 3 });
    }
    Ok(DihedralStructure { order: least_cyclic_form(seq) })
}

/// Whether `σ` shares no cyclic block of size `2..=N-2` with the identity order.
pub fn is_convergent(sigma: &[Label]) -> Result<bool> {
    validate_permutation(sigma)?;
    if sigma.len() < 5 {
        return Err(Error::TooFewPoints { n: sigma.len(), min: 5 });
    }
    Ok(convergent_unchecked(sigma))
}

/// Block scan: grow every cyclic interval of labels and count how many of its
/// members sit next to each other in `sigma`; `k` members with `k - 1`
/// adjacencies (and `k < N`) occupy a cyclic interval of positions.
fn convergent_unchecked(sigma: &[Label]) -> bool {
    let n = sigma.len();
    let pos = positions(sigma);
    let mut member = vec![false; n];
    for start in 0..n {
        member.iter_mut().for_each(|m| *m = false);
        let mut adjacencies = 0usize;
        for k in 1..=n - 2 {
            let label = (start + k - 1) % n + 1;
            let q = pos[label];
            adjacencies += member[(q + 1) % n] as usize + member[(q + n - 1) % n] as usize;
            member[q] = true;
            if k >= 2 && adjacencies == k - 1 {
                return false;
            }
        }
    }
    true
}

/// The configuration `[id, σ]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Configuration {
    n_points: usize,
    sigma: Vec<Label>,
    canonical: bool,
}

impl Configuration {
    /// Wrap a permutation without canonicalizing it.
    pub fn from_permutation(sigma: Vec<Label>) -> Result<Self> {
        validate_permutation(&sigma)?;
        Ok(Configuration { n_points: sigma.len(), sigma, canonical: false })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn sigma(&self) -> &[Label] {
        &self.sigma
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn canonical(&self) -> Configuration {
        if self.canonical {
            self.clone()
        } else {
            Configuration { n_points: self.n_points, sigma: canonical_sigma(&self.sigma), canonical: true }
        }
    }

    /// Canonical comma-separated key.
    pub fn key(&self) -> String {
        format_sequence(self.canonical().sigma())
    }

    pub fn is_convergent(&self) -> bool {
        self.n_points >= 5 && convergent_unchecked(&self.sigma)
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.canonical().sigma == other.canonical().sigma
    }
}

impl Eq for Configuration {}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Configuration {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n_points, self.canonical().sigma).cmp(&(other.n_points, other.canonical().sigma))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_sequence(&self.sigma))
    }
}

impl FromStr for Configuration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Configuration::from_permutation(parse_sequence(s)?)
    }
}

/// Least element of `{ τ σ ρ : τ, ρ dihedral }`.
///
/// For each position symmetry `ρ` only the two label symmetries sending the
/// first entry to 1 can produce the minimum.
fn canonical_sigma(sigma: &[Label]) -> Vec<Label> {
    let n = sigma.len();
    let mut best: Option<Vec<Label>> = None;
    let mut cand = vec![0 as Label; n];
    for image in dihedral_images(sigma) {
        let head = image[0] as usize - 1;
        for reflect in [false, true] {
            for (c, &v) in cand.iter_mut().zip(&image) {
                let v = v as usize - 1;
                *c = if reflect { ((head + n - v) % n + 1) as Label } else { ((v + n - head) % n + 1) as Label };
            }
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand.clone());
            }
        }
    }
    best.expect("nonempty permutation")
}

pub fn canonical_configuration(sigma: &[Label]) -> Result<Configuration> {
    validate_permutation(sigma)?;
    Ok(Configuration { n_points: sigma.len(), sigma: canonical_sigma(sigma), canonical: true })
}

/// `[δ, δ']` rewritten as `[id, σ]` by relabelling `δ` to the identity order.
pub fn configuration_of_pair(first: &[Label], second: &[Label]) -> Result<Configuration> {
    validate_permutation(first)?;
    validate_permutation(second)?;
    if first.len() != second.len() {
        return Err(Error::InvalidArgument("dihedral structures on different ground sets".into()));
    }
    let relabel = positions(first);
    let sigma: Vec<Label> = second.iter().map(|&v| (relabel[v as usize] + 1) as Label).collect();
    canonical_configuration(&sigma)
}

/// `[σ]^∨ = [σ^{-1}]`.
pub fn dual(c: &Configuration) -> Configuration {
    let inv = inverse(c.sigma());
    Configuration { n_points: c.n_points, sigma: canonical_sigma(&inv), canonical: true }
}

/// A pair `(δ, δ')` of dihedral structures on the same ground set, kept as
/// one-line representatives so the star product can respect their labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DihedralPair {
    pub first: Vec<Label>,
    pub second: Vec<Label>,
}

impl DihedralPair {
    pub fn new(first: Vec<Label>, second: Vec<Label>) -> Result<Self> {
        validate_permutation(&first)?;
        validate_permutation(&second)?;
        if first.len() != second.len() {
            return Err(Error::InvalidArgument("dihedral structures on different ground sets".into()));
        }
        Ok(DihedralPair { first, second })
    }

    /// `(id, σ)`.
    pub fn from_sigma(sigma: &[Label]) -> Result<Self> {
        let id = (1..=sigma.len() as Label).collect();
        DihedralPair::new(id, sigma.to_vec())
    }

    pub fn dual(&self) -> DihedralPair {
        DihedralPair { first: self.second.clone(), second: self.first.clone() }
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    pub fn configuration(&self) -> Configuration {
        configuration_of_pair(&self.first, &self.second).expect("validated pair")
    }

    /// `t1, t2, t3` consecutive in the first structure and `t1, t3` adjacent in the second.
    pub fn multipliable_along(&self, t: [Label; 3]) -> bool {
        let n = self.len() as Label;
        if t.iter().any(|&v| v == 0 || v > n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return false;
        }
        let first = DihedralStructure { order: self.first.clone() };
        let second = DihedralStructure { order: self.second.clone() };
        first.consecutive(t[0], t[1], t[2]) && second.adjacent(t[0], t[2])
    }

    /// Every ordered triple along which the pair is multipliable.
    pub fn multiplication_sites(&self) -> Vec<[Label; 3]> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for dir in [1, n - 1] {
                let t = [self.first[i], self.first[(i + dir) % n], self.first[(i + 2 * dir) % n]];
                if self.multipliable_along(t) {
                    out.push(t);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Gluing data for `(α, α') ⋆_{s,t} (β, β')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplicationSite {
    pub s: [Label; 3],
    pub t: [Label; 3],
}

/// Interior of the arc from `from` to `to` that avoids `avoid` (which must be a
/// neighbour of `from`), listed starting next to `from`.
fn arc_avoiding(cycle: &[Label], from: Label, to: Label, avoid: Label) -> Vec<Label> {
    let n = cycle.len();
    let i = cycle.iter().position(|&v| v == from).expect("label present");
    let step = if cycle[(i + 1) % n] == avoid { n - 1 } else { 1 };
    let mut out = Vec::new();
    let mut j = (i + step) % n;
    while cycle[j] != to {
        out.push(cycle[j]);
        j = (j + step) % n;
    }
    out
}

/// Insert `interior` (ordered from `a` to `b`) between the adjacent labels `a`, `b`.
fn splice(cycle: &[Label], a: Label, b: Label, interior: &[Label]) -> Vec<Label> {
    let n = cycle.len();
    let i = cycle.iter().position(|&v| v == a).expect("label present");
    // walk from `a` away from `b`, ending at `b`; the closing edge b-a gets the interior
    let step = if cycle[(i + 1) % n] == b { n - 1 } else { 1 };
    let mut out: Vec<Label> = (0..n).map(|k| cycle[(i + k * step) % n]).collect();
    debug_assert_eq!(out.last(), Some(&b));
    out.extend(interior.iter().rev());
    out
}

/// The pair `(γ, γ')` of the star product, using the identification that maps
/// the non-glued elements of `X` (in the order `rest_order`) to `M+1, M+2, ...`.
pub fn star_product_with_identification(
    alpha: &DihedralPair,
    beta: &DihedralPair,
    site: MultiplicationSite,
    rest_order: &[Label],
) -> Result<DihedralPair> {
    let (n, m) = (alpha.len(), beta.len());
    if !alpha.multipliable_along(site.s) {
        return Err(Error::NotMultipliable(format!(
            "({}),({}) along s = {:?}",
            format_sequence(&alpha.first),
            format_sequence(&alpha.second),
            site.s
        )));
    }
    if !beta.dual().multipliable_along(site.t) {
        return Err(Error::NotMultipliable(format!(
            "dual of ({}),({}) along t = {:?}",
            format_sequence(&beta.first),
            format_sequence(&beta.second),
            site.t
        )));
    }
    let mut expected: Vec<Label> = (1..=n as Label).filter(|v| !site.s.contains(v)).collect();
    let mut given = rest_order.to_vec();
    given.sort();
    expected.sort();
    if given != expected {
        return Err(Error::InvalidArgument(format!("identification order {rest_order:?} is not a listing of X minus s")));
    }
    let mut phi = vec![0 as Label; n + 1];
    for (s, t) in site.s.iter().zip(&site.t) {
        phi[*s as usize] = *t;
    }
    for (k, &x) in rest_order.iter().enumerate() {
        phi[x as usize] = (m + 1 + k) as Label;
    }
    let alpha_first: Vec<Label> = alpha.first.iter().map(|&v| phi[v as usize]).collect();
    let alpha_second: Vec<Label> = alpha.second.iter().map(|&v| phi[v as usize]).collect();
    let [t1, t2, t3] = site.t;

    let gamma = splice(&beta.first, t1, t3, &arc_avoiding(&alpha_first, t1, t3, t2));
    let gamma_prime = splice(&alpha_second, t1, t3, &arc_avoiding(&beta.second, t1, t3, t2));
    DihedralPair::new(least_cyclic_form(&gamma), least_cyclic_form(&gamma_prime))
}

/// `(α, α') ⋆_{s,t} (β, β')` with the standard identification (remaining
/// elements of `X` in increasing order).
pub fn star_product(alpha: &DihedralPair, beta: &DihedralPair, site: MultiplicationSite) -> Result<DihedralPair> {
    let rest: Vec<Label> = (1..=alpha.len() as Label).filter(|v| !site.s.contains(v)).collect();
    star_product_with_identification(alpha, beta, site, &rest)
}

/// The product as a configuration.
pub fn multiply(alpha: &DihedralPair, beta: &DihedralPair, site: MultiplicationSite) -> Result<Configuration> {
    Ok(star_product(alpha, beta, site)?.configuration())
}

/// `((1,2,3,4,5), (1,3,5,2,4))`, the pair representing `[σ_5]`.
pub fn sigma5_pair() -> DihedralPair {
    DihedralPair::new(vec![1, 2, 3, 4, 5], vec![1, 3, 5, 2, 4]).expect("valid")
}

fn check_extension_shape(rho: &[Label]) -> Result<()> {
    validate_permutation(rho)?;
    let n = rho.len();
    if n < 5 || rho[0] as usize != n - 1 || rho[2] as usize != n {
        return Err(Error::InvalidArgument(format!(
            "expected a permutation of the form (N-1, r0, N, ...), got {}",
            format_sequence(rho)
        )));
    }
    Ok(())
}

/// Multiply `[σ_5]` into `[ρ]` for `ρ = (N-1, ρ0, N, ρ1, ..., ρ_{N-3})`,
/// gluing along `s = (1,2,3)` and `t = (N-1, ρ0, N)`.
pub fn apery_extension(rho: &[Label]) -> Result<Configuration> {
    check_extension_shape(rho)?;
    let n = rho.len() as Label;
    let beta = DihedralPair::from_sigma(rho)?;
    multiply(&sigma5_pair(), &beta, MultiplicationSite { s: [1, 2, 3], t: [n - 1, rho[1], n] })
}

/// `τ = (N+1, ρ0+1, N+2, N, ρ_{N-3}+1, ..., ρ1+1, 1)` for the same `ρ`.
pub fn apery_extension_closed_form(rho: &[Label]) -> Result<Vec<Label>> {
    check_extension_shape(rho)?;
    let n = rho.len() as Label;
    let mut tau = vec![n + 1, rho[1] + 1, n + 2, n];
    tau.extend(rho[3..].iter().rev().map(|&r| r + 1));
    tau.push(1);
    Ok(tau)
}

/// The configuration on `2M + 1` points whose leading coefficients are `a(n)^{M-1}`:
/// `M + (M, 0, M+1, M-1, -(M-2), M-3, ..., ±1, ∓1, ±2, ..., -(M-1))`.
pub fn apery_power_family(m: usize) -> Result<Configuration> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("power family needs M >= 2, got {m}")));
    }
    let mi = m as i64;
    let mut offsets = vec![mi, 0, mi + 1];
    let mut sign = 1i64;
    for mag in (1..mi).rev() {
        offsets.push(sign * mag);
        sign = -sign;
    }
    for mag in 1..mi {
        offsets.push(sign * mag);
        sign = -sign;
    }
    let sigma: Vec<Label> = offsets.iter().map(|&o| (mi + o) as Label).collect();
    Configuration::from_permutation(sigma)
}

/// Convergent configurations on `N` points.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub n_points: usize,
    /// Canonical configurations, sorted.
    pub configurations: Vec<Configuration>,
    /// Number of classes when each configuration is identified with its dual.
    pub count_dual_identified: usize,
}

impl Enumeration {
    pub fn count(&self) -> usize {
        self.configurations.len()
    }

    pub fn self_dual_count(&self) -> usize {
        self.configurations.iter().filter(|c| dual(c) == **c).count()
    }
}

fn next_permutation(v: &mut [Label]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All convergent configurations on `N` points.
///
/// Only sequences with `σ(1) = 1` and `σ(2) < σ(N)` are scanned (every dihedral
/// structure has exactly one such listing); survivors of the block test are
/// canonicalized. Work is split by the value of `σ(2)`.
pub fn enumerate_convergent(n: usize) -> Result<Enumeration> {
    if n < 5 {
        return Err(Error::TooFewPoints { n, min: 5 });
    }
    if n > Label::MAX as usize {
        return Err(Error::InvalidArgument(format!("N = {n} is too large")));
    }
    let found: BTreeSet<Vec<Label>> = (2..=n as Label)
        .into_par_iter()
        .map(|second| {
            let mut local = BTreeSet::new();
            let mut rest: Vec<Label> = (2..=n as Label).filter(|&v| v != second).collect();
            let mut sigma = vec![0 as Label; n];
            sigma[0] = 1;
            sigma[1] = second;
            loop {
                if second < *rest.last().unwrap() {
                    sigma[2..].copy_from_slice(&rest);
                    if convergent_unchecked(&sigma) {
                        local.insert(canonical_sigma(&sigma));
                    }
                }
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let configurations: Vec<Configuration> = found
        .into_iter()
        .map(|sigma| Configuration { n_points: n, sigma, canonical: true })
        .collect();
    let self_dual = configurations.iter().filter(|c| dual(c) == **c).count();
    let count_dual_identified = (configurations.len() + self_dual) / 2;
    Ok(Enumeration { n_points: n, configurations, count_dual_identified })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_permutations(n: usize) -> Vec<Vec<Label>> {
        let mut v: Vec<Label> = (1..=n as Label).collect();
        let mut out = vec![v.clone()];
        while next_permutation(&mut v) {
            out.push(v.clone());
        }
        out
    }

    /// Orbit of `σ` under the label and position dihedral actions, by brute force.
    fn double_coset(sigma: &[Label]) -> BTreeSet<Vec<Label>> {
        let n = sigma.len();
        let id: Vec<Label> = (1..=n as Label).collect();
        let label_maps: Vec<Vec<Label>> = dihedral_images(&id).collect();
        let mut out = BTreeSet::new();
        for img in dihedral_images(sigma) {
            for tau in &label_maps {
                out.insert(img.iter().map(|&v| tau[v as usize - 1]).collect());
            }
        }
        out
    }

    #[test]
    fn canonical_dihedral_examples() {
        let id = canonical_dihedral(&[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(canonical_dihedral(&[2, 3, 4, 5, 1]).unwrap(), id);
        assert_eq!(canonical_dihedral(&[1, 5, 4, 3, 2]).unwrap(), id);
        // brute force over all 10 images
        let brute = |s: &[Label]| dihedral_images(s).min().unwrap();
        assert_eq!(brute(&[4, 2, 5, 3, 1]), brute(&[1, 3, 5, 2, 4]));
        assert_eq!(
            canonical_dihedral(&[4, 2, 5, 3, 1]).unwrap(),
            canonical_dihedral(&[1, 3, 5, 2, 4]).unwrap()
        );
    }

    #[test]
    fn canonical_dihedral_is_least_image_and_idempotent() {
        for n in 3..=6 {
            for p in all_permutations(n) {
                let c = canonical_dihedral(&p).unwrap();
                assert_eq!(c.as_slice(), dihedral_images(&p).min().unwrap().as_slice());
                assert_eq!(canonical_dihedral(c.as_slice()).unwrap(), c);
            }
        }
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(canonical_dihedral(&[1, 2, 2]).is_err());
        assert!(is_convergent(&[1, 3, 5, 2, 6]).is_err());
        assert!(is_convergent(&[1, 3, 2, 4]).is_err());
        assert!(parse_sequence("1,2,x").is_err());
    }

    #[test]
    fn convergence_examples() {
        assert!(is_convergent(&[1, 3, 5, 2, 4]).unwrap());
        assert!(!is_convergent(&[1, 2, 3, 4, 5]).unwrap());
        assert!(is_convergent(&[8, 3, 6, 1, 4, 7, 2, 5]).unwrap());
        assert!(is_convergent(&[1, 5, 3, 6, 2, 4]).unwrap());
    }

    /// Convergence straight from the definition: no subset of size 2..=N-2 is
    /// a cyclic block of both orders.
    fn convergent_by_subsets(sigma: &[Label]) -> bool {
        let n = sigma.len();
        let block_sets = |seq: &[Label]| {
            let mut sets = BTreeSet::new();
            for start in 0..n {
                for k in 2..=n - 2 {
                    let mut mask = 0u32;
                    for i in 0..k {
                        mask |= 1 << seq[(start + i) % n];
                    }
                    sets.insert(mask);
                }
            }
            sets
        };
        let id: Vec<Label> = (1..=n as Label).collect();
        block_sets(&id).is_disjoint(&block_sets(sigma))
    }

    #[test]
    fn block_scan_matches_subset_definition() {
        for n in 5..=7 {
            for p in all_permutations(n) {
                assert_eq!(is_convergent(&p).unwrap(), convergent_by_subsets(&p), "{p:?}");
            }
        }
    }

    #[test]
    fn canonical_configuration_is_coset_minimum() {
        for n in 4..=6 {
            for p in all_permutations(n) {
                let coset = double_coset(&p);
                let c = canonical_configuration(&p).unwrap();
                assert_eq!(c.sigma(), coset.iter().next().unwrap().as_slice());
            }
        }
    }

    #[test]
    fn configuration_examples() {
        let id = canonical_configuration(&[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(id.sigma(), &[1, 2, 3, 4, 5]);
        assert_eq!(
            canonical_configuration(&[1, 3, 5, 2, 4]).unwrap(),
            canonical_configuration(&[4, 2, 5, 3, 1]).unwrap()
        );
        assert_eq!(
            canonical_configuration(&[6, 3, 7, 5, 2, 4, 1]).unwrap(),
            canonical_configuration(&[1, 3, 7, 5, 2, 6, 4]).unwrap()
        );
        let c: Configuration = "8,3,6,1,4,7,2,5".parse().unwrap();
        assert!(!c.is_canonical());
        assert!(c.canonical().is_canonical());
        assert_eq!(c.key().parse::<Configuration>().unwrap(), c);
    }

    #[test]
    fn duals() {
        let s8 = canonical_configuration(&[8, 3, 6, 1, 4, 7, 2, 5]).unwrap();
        assert_eq!(dual(&s8), s8);
        let id = canonical_configuration(&[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(dual(&id), id);
        let s5 = canonical_configuration(&[1, 3, 5, 2, 4]).unwrap();
        assert_eq!(dual(&s5), s5);
    }

    #[test]
    fn example_star_product() {
        let pair = sigma5_pair();
        let site = MultiplicationSite { s: [1, 2, 3], t: [4, 2, 5] };
        let out = star_product(&pair, &pair, site).unwrap();
        assert_eq!(out.first, vec![1, 2, 3, 4, 7, 6, 5]);
        assert_eq!(
            canonical_dihedral(&out.second).unwrap(),
            canonical_dihedral(&[1, 3, 5, 7, 2, 6, 4]).unwrap()
        );
        assert_eq!(multiply(&pair, &pair, site).unwrap(), canonical_configuration(&[1, 3, 7, 5, 2, 6, 4]).unwrap());
    }

    #[test]
    fn star_product_respects_both_factors() {
        let pair = sigma5_pair();
        let site = MultiplicationSite { s: [1, 2, 3], t: [4, 2, 5] };
        let out = star_product(&pair, &pair, site).unwrap();
        let restrict = |seq: &[Label], keep: &dyn Fn(Label) -> bool| -> Vec<Label> {
            seq.iter().copied().filter(|&v| keep(v)).collect()
        };
        let y = |v: Label| v <= 5;
        assert_eq!(
            canonical_dihedral(&restrict(&out.first, &y)).unwrap(),
            canonical_dihedral(&pair.first).unwrap()
        );
        assert_eq!(
            canonical_dihedral(&restrict(&out.second, &y)).unwrap(),
            canonical_dihedral(&pair.second).unwrap()
        );
    }

    #[test]
    fn identification_does_not_matter() {
        let pair = sigma5_pair();
        let site = MultiplicationSite { s: [1, 2, 3], t: [4, 2, 5] };
        let a = star_product_with_identification(&pair, &pair, site, &[4, 5]).unwrap();
        let b = star_product_with_identification(&pair, &pair, site, &[5, 4]).unwrap();
        assert_eq!(a.configuration(), b.configuration());
        assert!(star_product_with_identification(&pair, &pair, site, &[4, 4]).is_err());
    }

    #[test]
    fn sigma8_is_not_multipliable() {
        let pair = DihedralPair::from_sigma(&[8, 3, 6, 1, 4, 7, 2, 5]).unwrap();
        assert!(pair.multiplication_sites().is_empty());
        assert!(pair.dual().multiplication_sites().is_empty());
        let err = multiply(&pair, &sigma5_pair(), MultiplicationSite { s: [1, 2, 3], t: [4, 2, 5] });
        assert!(matches!(err, Err(Error::NotMultipliable(_))));
    }

    #[test]
    fn extension_chain() {
        let mut rho: Vec<Label> = vec![4, 2, 5, 3, 1];
        let mut expected = vec![
            vec![6, 3, 7, 5, 2, 4, 1],
            vec![8, 4, 9, 7, 2, 5, 3, 6, 1],
            vec![10, 5, 11, 9, 2, 7, 4, 6, 3, 8, 1],
        ]
        .into_iter();
        for m in 3..=5 {
            let tau = apery_extension_closed_form(&rho).unwrap();
            let via_star = apery_extension(&rho).unwrap();
            assert_eq!(via_star, canonical_configuration(&tau).unwrap());
            assert_eq!(via_star, apery_power_family(m).unwrap());
            let want = expected.next().unwrap();
            assert_eq!(via_star, canonical_configuration(&want).unwrap());
            assert_eq!(apery_power_family(m).unwrap().sigma(), want.as_slice());
            rho = tau;
        }
    }

    #[test]
    fn power_family() {
        assert_eq!(apery_power_family(2).unwrap().sigma(), &[4, 2, 5, 3, 1]);
        assert!(apery_power_family(1).is_err());
        for m in 2..=5 {
            assert!(apery_power_family(m).unwrap().is_convergent());
        }
    }

    #[test]
    fn small_enumerations() {
        let e5 = enumerate_convergent(5).unwrap();
        assert_eq!(e5.count(), 1);
        let e6 = enumerate_convergent(6).unwrap();
        assert_eq!(e6.configurations, vec![canonical_configuration(&[1, 5, 3, 6, 2, 4]).unwrap()]);
        assert!(enumerate_convergent(4).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 5..=7 {
            let brute: BTreeSet<Vec<Label>> = all_permutations(n)
                .into_iter()
                .filter(|p| convergent_by_subsets(p))
                .map(|p| canonical_sigma(&p))
                .collect();
            let fast: Vec<Vec<Label>> =
                enumerate_convergent(n).unwrap().configurations.iter().map(|c| c.sigma().to_vec()).collect();
            assert_eq!(fast, brute.into_iter().collect::<Vec<_>>());
        }
    }
}
