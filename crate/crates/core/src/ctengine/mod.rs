//! Leading coefficients `J_σ(n)` as constant terms of products of interval sums.
//!
//! A convergent configuration `[id, σ]` is normalized so that `z_{σ(N-2)} = 1`,
//! `z_{σ(N-1)} = 0` and `z_{σ(N)} = ∞`. With `x_i = z_{σ(i)} - z_{σ(i+1)}` every
//! surviving numerator factor `z_j - z_{j+1}` becomes a signed interval sum
//! `x_a + ... + x_b`, and `J_σ(n)` is the coefficient of `(x_1 ... x_d)^n` in the
//! product of their `n`-th powers.

mod backend;
pub mod sweep;

pub use backend::{backend, backend_names, BigIntSweep, ConstantTermBackend, ModularSweep, DEFAULT_BACKEND};
pub use sweep::SweepState;

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::configurations::{inverse, Configuration, Label};
use crate::error::{Error, Result};

/// Bumped whenever the model or the extraction changes; cached terms from other
/// versions are discarded.
pub const ENGINE_VERSION: &str = "ctengine-1";

/// Product of interval sums `x_{a,b} = x_a + ... + x_b` over variables `x_1..x_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalFormProduct {
    n_vars: usize,
    factors: Vec<(u32, u32)>,
    sign: i8,
}

impl IntervalFormProduct {
    pub fn new(n_vars: usize, factors: Vec<(u32, u32)>, sign: i8) -> Result<Self> {
        if factors.len() != n_vars {
            return Err(Error::Model(format!("{} factors over {n_vars} variables", factors.len())));
        }
        let mut covered = vec![false; n_vars];
        for &(a, b) in &factors {
            if a < 1 || a > b || b as usize > n_vars {
                return Err(Error::Model(format!("interval ({a},{b}) outside 1..{n_vars}")));
            }
            covered[a as usize - 1..b as usize].iter_mut().for_each(|c| *c = true);
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::Model(format!("variable x_{} is not covered", v + 1)));
        }
        Ok(IntervalFormProduct { n_vars, factors, sign })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Intervals in the order the numerator factors were read off.
    pub fn factors(&self) -> &[(u32, u32)] {
        &self.factors
    }

    pub fn sorted_factors(&self) -> Vec<(u32, u32)> {
        let mut f = self.factors.clone();
        f.sort_unstable();
        f
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }
}

impl fmt::Display for IntervalFormProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(a, b)| format!("x[{a},{b}]")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The model of `c` read off from its stored representative.
pub fn linear_form_model(c: &Configuration) -> Result<IntervalFormProduct> {
    linear_form_model_for(c.sigma())
}

/// The model for the representative `[id, sigma]` with `sigma` taken literally:
/// its last three entries are sent to `1`, `0` and `∞`.
pub fn linear_form_model_for(sigma: &[Label]) -> Result<IntervalFormProduct> {
    let n = sigma.len();
    if !crate::configurations::is_convergent(sigma)? {
        return Err(Error::NotConvergent(crate::configurations::format_sequence(sigma)));
    }
    let pos = inverse(sigma); // pos[j-1] = σ^{-1}(j), 1-based
    let at = |j: usize| pos[(j - 1) % n] as usize;
    let infinity = sigma[n - 1] as usize;
    let mut factors = Vec::with_capacity(n - 2);
    let mut sign = 1i8;
    for j in 1..=n {
        let next = j % n + 1;
        if j == infinity || next == infinity {
            continue;
        }
        let (a, b) = (at(j), at(next));
        if a > b {
            sign = -sign;
        }
        factors.push((a.min(b) as u32, (a.max(b) - 1) as u32));
    }
    // The denominator factors z_{σ(i)} - z_{σ(i+1)}, i = 1..N-2, are x_1..x_{N-2}
    // by definition; the two involving z_{σ(N)} are the ones dropped.
    assert_eq!(factors.len(), n - 2, "numerator must lose exactly two factors");
    IntervalFormProduct::new(n - 2, factors, sign)
}

/// `[(x_1 ... x_d)^n] Π x_{a,b}^n`, exactly, with the default backend.
pub fn constant_term(m: &IntervalFormProduct, n: u32) -> Result<BigInt> {
    backend(DEFAULT_BACKEND)?.constant_term(m, n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceRecord {
    pub config: Configuration,
    pub terms: Vec<BigInt>,
    pub provenance: String,
}

/// `J_σ(0..=n_max)` with no cache.
pub fn compute_terms(c: &Configuration, n_max: u32, engine: &dyn ConstantTermBackend) -> Result<Vec<BigInt>> {
    let model = linear_form_model(c)?;
    (0..=n_max).map(|n| engine.constant_term(&model, n)).collect()
}

/// `J_σ(0..=n_max)`, read from and written back to the default catalog.
pub fn leading_coefficients(c: &Configuration, n_max: u32) -> Result<SequenceRecord> {
    let catalog = Catalog::open_default()?;
    leading_coefficients_with(c, n_max, Some(&catalog), backend(DEFAULT_BACKEND)?.as_ref())
}

/// As [`leading_coefficients`], with an explicit catalog (or none) and backend.
/// Only the terms missing from the catalog are computed.
pub fn leading_coefficients_with(
    c: &Configuration,
    n_max: u32,
    catalog: Option<&Catalog>,
    engine: &dyn ConstantTermBackend,
) -> Result<SequenceRecord> {
    let config = c.canonical();
    let model = linear_form_model(&config)?;
    let mut terms = match catalog {
        Some(cat) => cat.cached_terms(&config)?,
        None => Vec::new(),
    };
    let have = terms.len();
    terms.truncate(n_max as usize + 1);
    for n in terms.len() as u32..=n_max {
        terms.push(engine.constant_term(&model, n)?);
    }
    if let Some(cat) = catalog {
        if terms.len() > have {
            cat.store_terms(&config, &terms)?;
        }
    }
    Ok(SequenceRecord { config, terms, provenance: ENGINE_VERSION.to_string() })
}
