//! The interval sweep: multiply the factor powers `x_{a,b}^n` in order of left
//! endpoint, capping every exponent at `n`, and project each variable out as
//! soon as its last covering factor has been consumed.
//!
//! A factor power is distributed over its variables one at a time; the state
//! carries the part of the power not yet handed out, and the weight of handing
//! `k` of the remaining `r` to a variable is `C(r, k)`. The product of these
//! binomials over one factor is its multinomial coefficient.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::IntervalFormProduct;
use crate::arith::mul_mod;
use crate::error::{Error, Result};

/// Coefficient arithmetic used by the sweep.
pub trait SweepRing {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, e: &Self::Elem) -> bool;
    fn add_assign(&self, acc: &mut Self::Elem, x: Self::Elem);
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `C(n, k)` for `k <= n <= cap` of the ring's table.
    fn binomial(&self, n: usize, k: usize) -> &Self::Elem;
}

/// Exact integer coefficients.
pub struct BigRing {
    table: Vec<Vec<BigUint>>,
}

impl BigRing {
    pub fn new(n: usize) -> Self {
        let mut table: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let mut row = vec![BigUint::one(); r + 1];
            for k in 1..r {
                row[k] = &table[r - 1][k - 1] + &table[r - 1][k];
            }
            table.push(row);
        }
        BigRing { table }
    }
}

impl SweepRing for BigRing {
    type Elem = BigUint;
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn is_zero(&self, e: &BigUint) -> bool {
        e.is_zero()
    }
    fn add_assign(&self, acc: &mut BigUint, x: BigUint) {
        *acc += x;
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn binomial(&self, n: usize, k: usize) -> &BigUint {
        &self.table[n][k]
    }
}

/// Coefficients modulo a prime below `2^63`.
pub struct ModRing {
    modulus: u64,
    table: Vec<Vec<u64>>,
}

impl ModRing {
    pub fn new(n: usize, modulus: u64) -> Self {
        let mut table: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let mut row = vec![1 % modulus; r + 1];
            for k in 1..r {
                row[k] = (table[r - 1][k - 1] + table[r - 1][k]) % modulus;
            }
            table.push(row);
        }
        ModRing { modulus, table }
    }
}

impl SweepRing for ModRing {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, e: &u64) -> bool {
        *e == 0
    }
    fn add_assign(&self, acc: &mut u64, x: u64) {
        let s = *acc + x;
        *acc = if s >= self.modulus { s - self.modulus } else { s };
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.modulus)
    }
    fn binomial(&self, n: usize, k: usize) -> &u64 {
        &self.table[n][k]
    }
}

/// Exponent vectors are packed one byte per variable; the top byte holds the
/// undistributed remainder of the factor currently being multiplied in.
type Key = u128;
const CARRY_SLOT: usize = 15;
pub const MAX_VARS: usize = 15;
pub const MAX_POWER: u32 = 255;

#[inline]
fn slot(key: Key, i: usize) -> usize {
    ((key >> (8 * i)) & 0xff) as usize
}

#[inline]
fn with_slot(key: Key, i: usize, v: usize) -> Key {
    (key & !(0xff << (8 * i))) | ((v as Key) << (8 * i))
}

/// Intermediate state of the sweep.
pub struct SweepState<E> {
    /// Variables touched by some factor and not yet projected out.
    pub active_vars: BTreeSet<usize>,
    pub terms: HashMap<Key, E>,
    /// Number of factors consumed so far.
    pub processed: usize,
}

/// Coefficient of `(x_1 ... x_d)^n` in `Π x_{a,b}^n`.
pub fn constant_term_in<R: SweepRing>(ring: &R, model: &IntervalFormProduct, n: u32) -> Result<R::Elem> {
    let d = model.n_vars();
    if d > MAX_VARS || n > MAX_POWER {
        return Err(Error::InvalidArgument(format!(
            "sweep supports at most {MAX_VARS} variables and power {MAX_POWER}, got {d} and {n}"
        )));
    }
    let n = n as usize;
    let mut factors: Vec<(usize, usize)> = model.factors().iter().map(|&(a, b)| (a as usize - 1, b as usize - 1)).collect();
    factors.sort();

    // index of the last factor covering each variable
    let mut last_cover = vec![None; d];
    for (i, &(a, b)) in factors.iter().enumerate() {
        for v in a..=b {
            last_cover[v] = Some(i);
        }
    }
    if let Some(v) = last_cover.iter().position(Option::is_none) {
        return Err(Error::Model(format!("variable x_{} is not covered by any factor", v + 1)));
    }
    // The last variable is never forced: homogeneity pins its exponent.
    let free_var = d - 1;

    let mut state = SweepState { active_vars: BTreeSet::new(), terms: HashMap::new(), processed: 0 };
    let mut one = ring.zero();
    ring.add_assign(&mut one, ring.binomial(0, 0).clone());
    state.terms.insert(0, one);

    for (index, &(a, b)) in factors.iter().enumerate() {
        state.active_vars.extend(a..=b);
        let completes = |v: usize| v != free_var && last_cover[v] == Some(index);

        let mut current: HashMap<Key, R::Elem> =
            state.terms.drain().map(|(k, c)| (with_slot(k, CARRY_SLOT, n), c)).collect();
        for v in a..=b {
            let mut next: HashMap<Key, R::Elem> = HashMap::with_capacity(current.len() * 2);
            for (key, coef) in current {
                let e = slot(key, v);
                let r = slot(key, CARRY_SLOT);
                // room left in the variables after v within this factor
                let room: usize = (v + 1..=b).map(|u| n - slot(key, u)).sum();
                let lo = r.saturating_sub(room);
                let hi = r.min(n - e);
                let (lo, hi) = if completes(v) { (lo.max(n - e), hi.min(n - e)) } else { (lo, hi) };
                if lo > hi {
                    continue;
                }
                for k in lo..=hi {
                    let mut new_key = with_slot(key, CARRY_SLOT, r - k);
                    new_key = with_slot(new_key, v, if completes(v) { 0 } else { e + k });
                    let w = ring.mul(&coef, ring.binomial(r, k));
                    match next.get_mut(&new_key) {
                        Some(acc) => ring.add_assign(acc, w),
                        None => {
                            next.insert(new_key, w);
                        }
                    }
                }
            }
            current = next;
        }
        // the last variable of the interval takes whatever carry is left
        debug_assert!(current.keys().all(|&k| slot(k, CARRY_SLOT) == 0));
        state.terms = current.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect();
        state.active_vars.retain(|&v| !completes(v));
        state.processed += 1;
    }

    debug_assert!(state.active_vars.iter().all(|&v| v == free_var));
    let mut total = ring.zero();
    for (key, coef) in state.terms {
        assert_eq!(slot(key, free_var), n, "homogeneity: last variable must end at exponent n");
        ring.add_assign(&mut total, coef);
    }
    Ok(total)
}
