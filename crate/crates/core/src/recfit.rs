//! Linear recurrences with polynomial coefficients, fitted to integer sequences.
//!
//! The unknowns are the coefficients of `p_0, ..., p_r`; each index `n` gives the
//! equation `Σ_j p_j(n) s(n+j) = 0`. The nullspace is found modulo several
//! word-size primes, lifted by CRT and rational reconstruction, and the lifted
//! candidate is then checked exactly against every equation. Nothing is
//! returned unless the exact check passes.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{big_mod, inv_mod, large_primes, mul_mod};
use crate::error::{Error, Result};

/// Extra equations required beyond the number of unknowns.
pub const SAFETY_MARGIN: usize = 10;

/// `Σ_{j=0}^{r} p_j(n) s(n+j) = 0`, with `coefficients[j][k]` the coefficient of
/// `n^k` in `p_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRecurrence {
    pub order: usize,
    pub degree: usize,
    pub coefficients: Vec<Vec<BigRational>>,
}

impl PolyRecurrence {
    /// `p_j(n)`.
    pub fn eval(&self, j: usize, n: &BigRational) -> BigRational {
        self.coefficients[j].iter().rev().fold(BigRational::zero(), |acc, c| acc * n + c)
    }

    /// Scale so the leading coefficient of the last nonzero polynomial is 1.
    pub fn normalized(mut self) -> Self {
        let lead = self
            .coefficients
            .iter()
            .rev()
            .find_map(|p| p.iter().rev().find(|c| !c.is_zero()).cloned());
        if let Some(lead) = lead {
            for p in &mut self.coefficients {
                for c in p.iter_mut() {
                    *c = &*c / &lead;
                }
            }
        }
        self
    }

    /// Whether `seq` satisfies the recurrence at every index where it applies.
    pub fn satisfied_by(&self, seq: &[BigInt]) -> bool {
        (0..seq.len().saturating_sub(self.order)).all(|n| {
            let nr = BigRational::from_integer(BigInt::from(n));
            let total: BigRational = (0..=self.order)
                .map(|j| self.eval(j, &nr) * BigRational::from_integer(seq[n + j].clone()))
                .sum();
            total.is_zero()
        })
    }

    /// Extend `seq` by `count` terms. Fails if the leading polynomial vanishes
    /// at a needed index or a predicted term is not an integer.
    pub fn extend(&self, seq: &[BigInt], count: usize) -> Result<Vec<BigInt>> {
        let r = self.order;
        if seq.len() < r {
            return Err(Error::InsufficientTerms { have: seq.len(), need: r });
        }
        let mut out = seq.to_vec();
        for _ in 0..count {
            let n = out.len() - r;
            let nr = BigRational::from_integer(BigInt::from(n));
            let lead = self.eval(r, &nr);
            if lead.is_zero() {
                return Err(Error::Model(format!("leading polynomial vanishes at n = {n}")));
            }
            let rest: BigRational = (0..r)
                .map(|j| self.eval(j, &nr) * BigRational::from_integer(out[n + j].clone()))
                .sum();
            let next = -rest / lead;
            if !next.is_integer() {
                return Err(Error::Model(format!("non-integral prediction at index {}", out.len())));
            }
            out.push(next.to_integer());
        }
        Ok(out)
    }

    /// `p_j(n) = -p_{r-j}(-5-n)` for every `j`, as polynomial identities.
    pub fn check_self_duality_symmetry(&self) -> Result<bool> {
        check_self_duality_symmetry(self)
    }
}

impl fmt::Display for PolyRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, p) in self.coefficients.iter().enumerate() {
            let coeffs: Vec<String> = p.iter().map(ToString::to_string).collect();
            writeln!(f, "p_{j} = [{}]", coeffs.join(", "))?;
        }
        Ok(())
    }
}

/// `p_j(n) = -p_{4-j}(-5-n)` for `j = 0..=4`; order 4 only.
pub fn check_self_duality_symmetry(rec: &PolyRecurrence) -> Result<bool> {
    if rec.order != 4 {
        return Err(Error::InvalidArgument(format!("self-duality needs order 4, got {}", rec.order)));
    }
    // compare at degree + 1 distinct points, which determines the polynomials
    Ok((0..=rec.degree as i64 + 1).all(|t| {
        let n = BigRational::from_integer(BigInt::from(t));
        let mirrored = BigRational::from_integer(BigInt::from(-5 - t));
        (0..=4).all(|j| rec.eval(j, &n) == -rec.eval(4 - j, &mirrored))
    }))
}

/// Nullspace vector modulo `q`: RREF, then the last free column set to 1 and
/// the others to 0. `None` if the nullspace is trivial.
fn nullspace_mod(rows: &[Vec<u64>], cols: usize, q: u64) -> Option<(usize, Vec<u64>)> {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(row, pr);
        let inv = inv_mod(m[row][col], q).expect("nonzero mod prime");
        for x in m[row].iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != row && r[col] != 0 {
                let f = r[col];
                for (x, &pv) in r.iter_mut().zip(&pivot_row) {
                    *x = (*x + q - mul_mod(f, pv, q)) % q;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free = (0..cols).filter(|c| !pivots.contains(c)).collect::<Vec<_>>();
    let &last_free = free.last()?;
    let mut v = vec![0u64; cols];
    v[last_free] = 1;
    for (i, &pc) in pivots.iter().enumerate() {
        v[pc] = (q - m[i][last_free]) % q;
    }
    Some((free.len(), v))
}

/// `a / b` with `|a|, b <= sqrt(m / 2)` and `a ≡ x b (mod m)`, if it exists.
fn rational_reconstruction(x: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        (r0, r1) = (r1.clone(), &r0 - &q * &r1);
        (t0, t1) = (t1.clone(), &t0 - &q * &t1);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let candidate = BigRational::new(r1, t1);
    let check = (candidate.numer() - x * candidate.denom()).mod_floor(m);
    check.is_zero().then_some(candidate)
}

fn build_rows(seq: &[BigInt], r: usize, d: usize, q: u64) -> Vec<Vec<u64>> {
    let residues: Vec<u64> = seq.iter().map(|s| big_mod(s, q)).collect();
    (0..seq.len() - r)
        .map(|n| {
            let mut row = Vec::with_capacity((r + 1) * (d + 1));
            for j in 0..=r {
                let mut pow = 1u64;
                for _ in 0..=d {
                    row.push(mul_mod(pow, residues[n + j], q));
                    pow = mul_mod(pow, n as u64 % q, q);
                }
            }
            row
        })
        .collect()
}

/// Scale so the last nonzero entry is 1.
fn normalize_mod(v: &mut [u64], q: u64) {
    if let Some(&lead) = v.iter().rev().find(|&&x| x != 0) {
        let inv = inv_mod(lead, q).expect("nonzero mod prime");
        for x in v.iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
    }
}

/// Fit an order-`r`, degree-`d` recurrence to `seq`. `Ok(None)` when no nonzero
/// recurrence of that shape fits every term.
pub fn fit(seq: &[BigInt], r: usize, d: usize) -> Result<Option<PolyRecurrence>> {
    let unknowns = (r + 1) * (d + 1);
    let need = unknowns + r + SAFETY_MARGIN;
    if seq.len() < need {
        return Err(Error::InsufficientTerms { have: seq.len(), need });
    }
    let mut modulus = BigInt::one();
    let mut lifted: Vec<BigInt> = vec![BigInt::zero(); unknowns];
    let mut best_nullity = usize::MAX;
    let mut previous: Option<Vec<BigRational>> = None;
    // far more primes than any desk-scale fit needs; the loop exits on stabilization
    for q in large_primes(400) {
        let rows = build_rows(seq, r, d, q);
        let Some((nullity, mut v)) = nullspace_mod(&rows, unknowns, q) else {
            // a prime where the nullspace is trivial proves it is trivial over Q
            return Ok(None);
        };
        if nullity > best_nullity {
            continue; // unlucky prime
        }
        if nullity < best_nullity {
            best_nullity = nullity;
            modulus = BigInt::one();
            lifted.iter_mut().for_each(|x| *x = BigInt::zero());
            previous = None;
        }
        normalize_mod(&mut v, q);
        // CRT step
        let qb = BigInt::from(q);
        let m_inv = inv_mod(big_mod(&modulus, q), q).expect("coprime moduli");
        for (x, &vi) in lifted.iter_mut().zip(&v) {
            let diff = (vi + q - big_mod(x, q)) % q;
            let t = mul_mod(diff, m_inv, q);
            *x += &modulus * t;
        }
        modulus *= &qb;
        let Some(candidate) = lifted.iter().map(|x| rational_reconstruction(x, &modulus)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        if previous.as_ref() == Some(&candidate) {
            let rec = to_recurrence(&candidate, r, d).normalized();
            return Ok(rec.satisfied_by(seq).then_some(rec));
        }
        previous = Some(candidate);
    }
    Err(Error::Model("rational reconstruction did not stabilize".into()))
}

fn to_recurrence(v: &[BigRational], r: usize, d: usize) -> PolyRecurrence {
    let coefficients = v.chunks(d + 1).map(<[BigRational]>::to_vec).collect();
    PolyRecurrence { order: r, degree: d, coefficients }
}

/// Smallest order, then smallest degree, with `order <= max_order` and
/// `degree <= max_degree`, for which a recurrence fits.
pub fn guess(seq: &[BigInt], max_order: usize, max_degree: usize) -> Result<Option<PolyRecurrence>> {
    for r in 1..=max_order {
        for d in 0..=max_degree {
            if (r + 1) * (d + 1) + r + SAFETY_MARGIN > seq.len() {
                break;
            }
            if let Some(rec) = fit(seq, r, d)? {
                return Ok(Some(rec));
            }
        }
    }
    Ok(None)
}

/// Integer form: every coefficient multiplied by the common denominator.
pub fn integer_coefficients(rec: &PolyRecurrence) -> Vec<Vec<BigInt>> {
    let lcm = rec.coefficients.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut out: Vec<Vec<BigInt>> = rec
        .coefficients
        .iter()
        .map(|p| p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect())
        .collect();
    let g = out.iter().flatten().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && g.sign() == Sign::Plus {
        for c in out.iter_mut().flatten() {
            *c = &*c / &g;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{a_sigma8, apery_a};

    fn ints(v: impl IntoIterator<Item = num_bigint::BigUint>) -> Vec<BigInt> {
        v.into_iter().map(BigInt::from).collect()
    }

    #[test]
    fn constant_sequence() {
        let seq = vec![BigInt::one(); 20];
        let rec = fit(&seq, 1, 0).unwrap().unwrap();
        assert_eq!(rec.coefficients, vec![vec![BigRational::from_integer((-1).into())], vec![BigRational::one()]]);
    }

    #[test]
    fn apery_order_two() {
        let seq = ints((0..30).map(apery_a));
        let rec = fit(&seq, 2, 2).unwrap().unwrap();
        let extended = rec.extend(&seq, 11).unwrap();
        for n in 30..=40 {
            assert_eq!(extended[n as usize], BigInt::from(apery_a(n)));
        }
        // (n+2)^2 a(n+2) - (11n^2+33n+25) a(n+1) - (n+1)^2 a(n) = 0, up to scale
        let int = integer_coefficients(&rec);
        let expected: Vec<Vec<BigInt>> = vec![vec![-1, -2, -1], vec![-25, -33, -11], vec![4, 4, 1]]
            .into_iter()
            .map(|p| p.into_iter().map(BigInt::from).collect())
            .collect();
        assert_eq!(int, expected);
        assert!(check_self_duality_symmetry(&rec).is_err());
    }

    #[test]
    fn guess_finds_minimal_shape() {
        let seq = ints((0..40).map(apery_a));
        let rec = guess(&seq, 3, 4).unwrap().unwrap();
        assert_eq!((rec.order, rec.degree), (2, 2));
    }

    #[test]
    fn scalar_stable() {
        let seq = ints((0..30).map(apery_a));
        let scaled: Vec<BigInt> = seq.iter().map(|s| s * 7).collect();
        assert_eq!(fit(&seq, 2, 2).unwrap(), fit(&scaled, 2, 2).unwrap());
        assert_eq!(fit(&seq, 2, 2).unwrap(), fit(&seq, 2, 2).unwrap());
    }

    #[test]
    fn too_short_and_no_solution() {
        let seq = ints((0..12).map(apery_a));
        assert!(matches!(fit(&seq, 2, 2), Err(Error::InsufficientTerms { .. })));
        let seq = ints((0..30).map(apery_a));
        assert_eq!(fit(&seq, 1, 3).unwrap(), None);
    }

    #[test]
    fn reconstruction() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        let target = BigRational::new(BigInt::from(-37), BigInt::from(91));
        let inv91 = BigInt::from(91).extended_gcd(&m).x;
        let residue = (BigInt::from(-37) * inv91).mod_floor(&m);
        assert_eq!(rational_reconstruction(&residue, &m), Some(target));
    }

    #[test]
    fn sigma8_order_four_symmetry() {
        let seq = ints((0..=120).map(a_sigma8));
        let rec = fit(&seq, 4, 15).unwrap().expect("order 4 degree 15 recurrence");
        assert!(check_self_duality_symmetry(&rec).unwrap());
        let mut broken = rec.clone();
        broken.coefficients[1][3] += BigRational::one();
        assert!(!check_self_duality_symmetry(&broken).unwrap());
    }
}
